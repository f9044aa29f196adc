//! Carathéodory constructions, Federer densities, and measure-theoretic area
//! formulas, evaluated exactly on finite gauged metric instances and at fixed
//! resolution on discretized continuum instances.
//!
//! The crate provides:
//!
//! - extended-real arithmetic with exact-rational and float backends
//!   ([`extreal`]);
//! - finite metric spaces, gauges, covering families, and atomic measures
//!   ([`metric`], [`gauge`], [`family`], [`measure`]);
//! - the Carathéodory construction as an exact weighted set-cover optimum,
//!   with Hausdorff and spherical measures as diameter-power specializations
//!   ([`cover`]);
//! - filtered covering relations, covering limits, Federer densities,
//!   enlargements, and containment conditions ([`density`]);
//! - executable verifiers for the covering lemmas, the absolute-continuity
//!   equivalence, and the area-formula identities, plus a randomized
//!   counterexample hunt ([`theorems`]);
//! - instance generators (fractal truncations, epsilon-nets, random metrics)
//!   and continuum probes ([`spaces`]);
//! - a JSON instance format shared with the CLI ([`instance`]).

pub mod cover;
pub mod density;
pub mod error;
pub mod extreal;
pub mod family;
pub mod gauge;
pub mod instance;
pub mod measure;
pub mod metric;
pub mod spaces;
pub mod theorems;

pub use error::Error;
pub use extreal::{Alpha, Backend, ExtReal};
pub use family::{FamilyMember, GaugedFamily};
pub use gauge::Gauge;
pub use measure::AtomicMeasure;
pub use metric::{FiniteMetricSpace, PointSet};
