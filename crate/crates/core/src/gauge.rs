//! Gauges: set functions `zeta : S -> [0, +inf]` feeding the construction.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::extreal::{Alpha, ExtReal};
use crate::metric::{FiniteMetricSpace, PointSet};

/// A gauge over a family of subsets.
///
/// Diameter-power gauges evaluate `c_alpha * diam(S)^alpha`. The plain
/// `Hausdorff` kind admits every set; the spherical kinds admit only closed
/// (resp. open) balls of the space. An explicit gauge admits exactly the sets
/// listed in its table, and may assign `+inf`.
#[derive(Debug, Clone)]
pub enum Gauge {
    Explicit(BTreeMap<PointSet, ExtReal>),
    Hausdorff { alpha: Alpha, c_alpha: ExtReal },
    Spherical { alpha: Alpha, c_alpha: ExtReal },
    OpenSpherical { alpha: Alpha, c_alpha: ExtReal },
}

impl Gauge {
    pub fn hausdorff(alpha: Alpha, c_alpha: ExtReal) -> Result<Gauge, Error> {
        check_diameter_power(&c_alpha)?;
        Ok(Gauge::Hausdorff { alpha, c_alpha })
    }

    pub fn spherical(alpha: Alpha, c_alpha: ExtReal) -> Result<Gauge, Error> {
        check_diameter_power(&c_alpha)?;
        Ok(Gauge::Spherical { alpha, c_alpha })
    }

    pub fn open_spherical(alpha: Alpha, c_alpha: ExtReal) -> Result<Gauge, Error> {
        check_diameter_power(&c_alpha)?;
        Ok(Gauge::OpenSpherical { alpha, c_alpha })
    }

    pub fn explicit(table: BTreeMap<PointSet, ExtReal>) -> Gauge {
        Gauge::Explicit(table)
    }

    pub fn is_explicit(&self) -> bool {
        matches!(self, Gauge::Explicit(_))
    }

    /// Evaluate the gauge on `set`, enforcing the kind's admissible domain.
    pub fn eval(&self, space: &FiniteMetricSpace, set: &PointSet) -> Result<ExtReal, Error> {
        match self {
            Gauge::Explicit(table) => table.get(set).cloned().ok_or_else(|| {
                Error::OutsideGaugeDomain(format!("set {set:?} not listed in explicit table"))
            }),
            Gauge::Hausdorff { alpha, c_alpha } => {
                Ok(diameter_power(space, set, alpha, c_alpha)?)
            }
            Gauge::Spherical { alpha, c_alpha } => {
                if space.as_closed_ball(set).is_none() {
                    return Err(Error::OutsideGaugeDomain(format!(
                        "set {set:?} is not a closed ball"
                    )));
                }
                Ok(diameter_power(space, set, alpha, c_alpha)?)
            }
            Gauge::OpenSpherical { alpha, c_alpha } => {
                if space.as_open_ball(set).is_none() {
                    return Err(Error::OutsideGaugeDomain(format!(
                        "set {set:?} is not an open ball"
                    )));
                }
                Ok(diameter_power(space, set, alpha, c_alpha)?)
            }
        }
    }
}

fn check_diameter_power(c_alpha: &ExtReal) -> Result<(), Error> {
    if c_alpha.is_zero() || c_alpha.is_infinite() {
        return Err(Error::InvalidParameter(
            "c_alpha must be finite and positive".into(),
        ));
    }
    Ok(())
}

fn diameter_power(
    space: &FiniteMetricSpace,
    set: &PointSet,
    alpha: &Alpha,
    c_alpha: &ExtReal,
) -> Result<ExtReal, Error> {
    let diam = space.diameter(set)?;
    Ok(c_alpha.mul(&diam.pow(alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::line_space;

    fn unit_pair() -> FiniteMetricSpace {
        line_space(vec!["a".into(), "b".into()], &[(0, 1), (2, 1)]).unwrap()
    }

    #[test]
    fn hausdorff_gauge_is_diameter_power() {
        let space = unit_pair();
        let g = Gauge::hausdorff(Alpha::one(), ExtReal::one()).unwrap();
        let all = PointSet::full(2);
        assert_eq!(g.eval(&space, &all).unwrap(), ExtReal::from_int(2));
        // alpha = 2, c = 3 on a singleton: diameter 0.
        let g2 = Gauge::hausdorff(Alpha::rational(2, 1), ExtReal::from_int(3)).unwrap();
        assert_eq!(g2.eval(&space, &PointSet::singleton(0)).unwrap(), ExtReal::zero());
    }

    #[test]
    fn explicit_gauge_looks_up_and_rejects_unlisted() {
        let space = unit_pair();
        let mut table = BTreeMap::new();
        table.insert(PointSet::singleton(0), ExtReal::from_int(2));
        table.insert(PointSet::singleton(1), ExtReal::from_int(3));
        let g = Gauge::explicit(table);
        assert_eq!(g.eval(&space, &PointSet::singleton(0)).unwrap(), ExtReal::from_int(2));
        assert!(matches!(
            g.eval(&space, &PointSet::full(2)),
            Err(Error::OutsideGaugeDomain(_))
        ));
    }

    #[test]
    fn spherical_gauge_rejects_non_balls() {
        let space = line_space(
            vec!["a".into(), "b".into(), "c".into()],
            &[(0, 1), (1, 1), (2, 1)],
        )
        .unwrap();
        let g = Gauge::spherical(Alpha::one(), ExtReal::one()).unwrap();
        // {a,c} skips the midpoint: not a ball.
        assert!(g.eval(&space, &PointSet::new(vec![0, 2])).is_err());
        assert!(g.eval(&space, &PointSet::full(3)).is_ok());
    }
}
