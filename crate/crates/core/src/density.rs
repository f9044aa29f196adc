//! Filtered covering relations, covering limits, Federer densities,
//! enlargements, and the containment condition they feed.
//!
//! A family member is dropped from the filtered subfamily exactly when its
//! gauge and measure are both zero or both infinite; on the remaining sets
//! the quotient `mu(S)/zeta(S)` is unambiguous under the conventions
//! `Q = +inf` when `zeta = 0` and `Q = 0` when `zeta = +inf`.
//!
//! Finiteness of scale forces a choice of fineness semantics. On exact finite
//! instances "arbitrarily small diameter" means "a set of diameter zero
//! exists"; on resolution-truncated continuum instances a floor `h` is
//! carried and fineness-at-resolution means a set of diameter at most `h`
//! exists. Every consumer records which semantics applied.

use std::fmt;

use crate::error::Error;
use crate::extreal::ExtReal;
use crate::family::GaugedFamily;
use crate::measure::AtomicMeasure;
use crate::metric::PointSet;

/// Why a member was excluded from the filtered subfamily.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropReason {
    BothZero,
    BothInfinite,
}

/// The filtered subfamily: member indices kept, and dropped ones with the
/// exclusion clause that applied.
#[derive(Debug, Clone)]
pub struct FilteredFamily {
    kept: Vec<usize>,
    dropped: Vec<(usize, DropReason)>,
    kept_flags: Vec<bool>,
}

impl FilteredFamily {
    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn dropped(&self) -> &[(usize, DropReason)] {
        &self.dropped
    }

    pub fn is_kept(&self, index: usize) -> bool {
        self.kept_flags.get(index).copied().unwrap_or(false)
    }

    /// Kept member indices whose set contains `point`.
    pub fn kept_containing<'a>(
        &'a self,
        family: &'a GaugedFamily,
        point: usize,
    ) -> impl Iterator<Item = usize> + 'a {
        self.kept
            .iter()
            .copied()
            .filter(move |&i| family.member(i).set.contains(point))
    }
}

/// Partition the family by the exclusion clauses.
pub fn filter_family(measure: &AtomicMeasure, family: &GaugedFamily) -> FilteredFamily {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut kept_flags = vec![false; family.len()];
    for (i, member) in family.iter().enumerate() {
        let mu = measure.eval(&member.set);
        let zeta = &member.zeta;
        if zeta.is_zero() && mu.is_zero() {
            dropped.push((i, DropReason::BothZero));
        } else if zeta.is_infinite() && mu.is_infinite() {
            dropped.push((i, DropReason::BothInfinite));
        } else {
            kept_flags[i] = true;
            kept.push(i);
        }
    }
    FilteredFamily {
        kept,
        dropped,
        kept_flags,
    }
}

/// The quotient conventions on raw values.
pub fn quotient_value(mu: &ExtReal, zeta: &ExtReal) -> ExtReal {
    if zeta.is_zero() {
        ExtReal::infinity()
    } else if zeta.is_infinite() {
        ExtReal::zero()
    } else {
        mu.div_positive(zeta)
    }
}

/// Quotient of a filtered-family member; dropped members are an error.
pub fn quotient(
    measure: &AtomicMeasure,
    family: &GaugedFamily,
    filtered: &FilteredFamily,
    index: usize,
) -> Result<ExtReal, Error> {
    if !filtered.is_kept(index) {
        let reason = filtered
            .dropped()
            .iter()
            .find(|(i, _)| *i == index)
            .map(|(_, r)| format!("{r:?}"))
            .unwrap_or_else(|| "index out of range".to_string());
        return Err(Error::NotInFilteredFamily { index, reason });
    }
    let member = family.member(index);
    Ok(quotient_value(&measure.eval(&member.set), &member.zeta))
}

/// Which reading of "arbitrarily small diameter" is in force.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case", tag = "semantics", content = "floor")]
pub enum Fineness {
    /// Exact finite instance: only diameter zero is arbitrarily small.
    Exact,
    /// Truncated continuum instance: sets of diameter at most the resolution
    /// floor count as arbitrarily small.
    AtResolution(ExtReal),
}

impl Fineness {
    pub fn floor(&self) -> ExtReal {
        match self {
            Fineness::Exact => ExtReal::zero(),
            Fineness::AtResolution(h) => h.clone(),
        }
    }
}

impl fmt::Display for Fineness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fineness::Exact => write!(f, "exact"),
            Fineness::AtResolution(h) => write!(f, "at-resolution({h})"),
        }
    }
}

/// Is the filtered relation fine at `point` under the given semantics?
pub fn is_fine_at(
    family: &GaugedFamily,
    filtered: &FilteredFamily,
    point: usize,
    fineness: &Fineness,
) -> bool {
    let floor = fineness.floor();
    filtered
        .kept_containing(family, point)
        .any(|i| family.member(i).diameter <= floor)
}

/// Does the filtered family cover every point of `target` finely? Vacuously
/// true on the empty set.
pub fn covers_finely(
    family: &GaugedFamily,
    filtered: &FilteredFamily,
    target: &PointSet,
    fineness: &Fineness,
) -> bool {
    target
        .iter()
        .all(|&p| is_fine_at(family, filtered, p, fineness))
}

/// The full step function of a covering limit at a point.
///
/// `steps` descends through the thresholds at which the family
/// `{S in C({x}) : diam(S) < eps}` changes: one threshold above the largest
/// diameter at the point (the whole relation) and one at each distinct
/// positive diameter. `limit` is the covering limit under the recorded
/// fineness semantics, absent when the relation is not fine at the point.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    pub steps: Vec<(ExtReal, ExtReal)>,
    pub limit: Option<ExtReal>,
    pub fineness: Fineness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LimitKind {
    Sup,
    Inf,
}

fn covering_profile(
    family: &GaugedFamily,
    members_at_x: &[usize],
    f: &dyn Fn(usize) -> ExtReal,
    fineness: &Fineness,
    kind: LimitKind,
) -> DensityProfile {
    let mut diams: Vec<ExtReal> = members_at_x
        .iter()
        .map(|&i| family.member(i).diameter.clone())
        .collect();
    diams.sort();
    diams.dedup();

    let combine = |indices: &[usize], below: &ExtReal| -> Option<ExtReal> {
        let mut acc: Option<ExtReal> = None;
        for &i in indices {
            if family.member(i).diameter < *below {
                let v = f(i);
                acc = Some(match (acc, kind) {
                    (None, _) => v,
                    (Some(a), LimitKind::Sup) => a.max(v),
                    (Some(a), LimitKind::Inf) => a.min(v),
                });
            }
        }
        acc
    };

    let mut thresholds: Vec<ExtReal> = Vec::new();
    if let Some(top) = diams.last() {
        thresholds.push(top.add(&ExtReal::one()));
    }
    for d in diams.iter().rev() {
        if !d.is_zero() {
            thresholds.push(d.clone());
        }
    }

    let mut steps = Vec::new();
    for eps in thresholds {
        // Empty families can only arise at the smallest threshold when no
        // diameter-zero set exists; the sup convention there is 0, the inf
        // convention +inf, but such a step never defines the limit.
        let value = combine(members_at_x, &eps).unwrap_or(match kind {
            LimitKind::Sup => ExtReal::zero(),
            LimitKind::Inf => ExtReal::infinity(),
        });
        steps.push((eps, value));
    }

    // The covering limit under the fineness semantics: the value over sets of
    // diameter at most the floor. Monotonicity of sup/inf in the family makes
    // this the inf (resp. sup) of the step function over scales beyond the
    // floor.
    let floor = fineness.floor();
    let at_floor: Vec<usize> = members_at_x
        .iter()
        .copied()
        .filter(|&i| family.member(i).diameter <= floor)
        .collect();
    let limit = if at_floor.is_empty() {
        None
    } else {
        let above = floor.add(&ExtReal::one());
        combine(&at_floor, &above)
    };

    DensityProfile {
        steps,
        limit,
        fineness: fineness.clone(),
    }
}

fn relation_at(family: &GaugedFamily, filtered: &FilteredFamily, x: usize) -> Vec<usize> {
    filtered.kept_containing(family, x).collect()
}

/// Upper covering limit of `f` over the filtered relation at `x`.
pub fn covering_limsup(
    family: &GaugedFamily,
    filtered: &FilteredFamily,
    x: usize,
    f: &dyn Fn(usize) -> ExtReal,
    fineness: &Fineness,
) -> Result<ExtReal, Error> {
    limit_profile(family, filtered, x, f, fineness, LimitKind::Sup).map(|p| p.limit.unwrap())
}

/// Lower covering limit of `f` over the filtered relation at `x`.
pub fn covering_liminf(
    family: &GaugedFamily,
    filtered: &FilteredFamily,
    x: usize,
    f: &dyn Fn(usize) -> ExtReal,
    fineness: &Fineness,
) -> Result<ExtReal, Error> {
    limit_profile(family, filtered, x, f, fineness, LimitKind::Inf).map(|p| p.limit.unwrap())
}

fn limit_profile(
    family: &GaugedFamily,
    filtered: &FilteredFamily,
    x: usize,
    f: &dyn Fn(usize) -> ExtReal,
    fineness: &Fineness,
    kind: LimitKind,
) -> Result<DensityProfile, Error> {
    if !is_fine_at(family, filtered, x, fineness) {
        return Err(Error::NotFine {
            point: x.to_string(),
            semantics: fineness.to_string(),
        });
    }
    let at_x = relation_at(family, filtered, x);
    Ok(covering_profile(family, &at_x, f, fineness, kind))
}

/// Federer density at `x`: the upper covering limit of the quotient function
/// over the filtered relation. Errors when the relation is not fine at `x`
/// under the given semantics.
pub fn federer_density(
    measure: &AtomicMeasure,
    family: &GaugedFamily,
    filtered: &FilteredFamily,
    x: usize,
    fineness: &Fineness,
) -> Result<ExtReal, Error> {
    Ok(federer_density_profile(measure, family, filtered, x, fineness)?
        .limit
        .unwrap())
}

/// As `federer_density`, returning the whole approach curve.
pub fn federer_density_profile(
    measure: &AtomicMeasure,
    family: &GaugedFamily,
    filtered: &FilteredFamily,
    x: usize,
    fineness: &Fineness,
) -> Result<DensityProfile, Error> {
    let f = |i: usize| {
        let member = family.member(i);
        quotient_value(&measure.eval(&member.set), &member.zeta)
    };
    limit_profile(family, filtered, x, &f, fineness, LimitKind::Sup)
}

/// The unfiltered upper covering limit: the quotient conventions extended to
/// every family member containing `x` with no exclusion. On families that
/// contain singletons under a diameter-power gauge this diverges to `+inf`.
pub fn unfiltered_density(
    measure: &AtomicMeasure,
    family: &GaugedFamily,
    x: usize,
    fineness: &Fineness,
) -> Result<ExtReal, Error> {
    let at_x: Vec<usize> = (0..family.len())
        .filter(|&i| family.member(i).set.contains(x))
        .collect();
    let floor = fineness.floor();
    if !at_x.iter().any(|&i| family.member(i).diameter <= floor) {
        return Err(Error::NotFine {
            point: x.to_string(),
            semantics: fineness.to_string(),
        });
    }
    let f = |i: usize| {
        let member = family.member(i);
        quotient_value(&measure.eval(&member.set), &member.zeta)
    };
    let profile = covering_profile(family, &at_x, &f, fineness, LimitKind::Sup);
    Ok(profile.limit.unwrap())
}

/// Truncated upper density: the supremum of the quotient over kept sets
/// containing `x` with diameter strictly below `delta`; 0 when no such set
/// exists.
pub fn truncated_density(
    measure: &AtomicMeasure,
    family: &GaugedFamily,
    filtered: &FilteredFamily,
    x: usize,
    delta: &ExtReal,
) -> ExtReal {
    let mut best = ExtReal::zero();
    for i in filtered.kept_containing(family, x) {
        let member = family.member(i);
        if member.diameter < *delta {
            let q = quotient_value(&measure.eval(&member.set), &member.zeta);
            best = best.max(q);
        }
    }
    best
}

/// A fixed scale parameter `tau > 1` for enlargements.
#[derive(Debug, Clone, PartialEq)]
pub struct Tau(ExtReal);

impl Tau {
    pub fn new(value: ExtReal) -> Result<Tau, Error> {
        if value.is_infinite() || value <= ExtReal::one() {
            return Err(Error::InvalidParameter(format!(
                "tau must be finite and greater than 1, got {value}"
            )));
        }
        Ok(Tau(value))
    }

    pub fn value(&self) -> &ExtReal {
        &self.0
    }
}

impl Default for Tau {
    fn default() -> Tau {
        Tau(ExtReal::from_int(2))
    }
}

/// Enlargement of a set: the union of kept members meeting it whose diameter
/// is at most `tau` times its own.
pub fn enlargement(
    family: &GaugedFamily,
    filtered: &FilteredFamily,
    base: &PointSet,
    base_diameter: &ExtReal,
    tau: &Tau,
) -> PointSet {
    let cap = tau.value().mul(base_diameter);
    let mut result = PointSet::empty();
    for &i in filtered.kept() {
        let member = family.member(i);
        if member.diameter <= cap && member.set.intersects(base) {
            result = result.union(&member.set);
        }
    }
    result
}

/// Enlargement of a family member by index.
pub fn enlargement_of_member(
    family: &GaugedFamily,
    filtered: &FilteredFamily,
    index: usize,
    tau: &Tau,
) -> PointSet {
    let member = family.member(index);
    enlargement(family, filtered, &member.set, &member.diameter, tau)
}

/// Per-member outcome of the containment condition: for kept `S`, a family
/// member containing its enlargement with controlled diameter and gauge.
#[derive(Debug, Clone)]
pub struct ContainmentEntry {
    pub member: usize,
    pub enlargement: PointSet,
    /// Index of a witnessing family member, when one exists.
    pub witness: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ContainmentCheck {
    pub entries: Vec<ContainmentEntry>,
    pub feasible: bool,
}

/// Check the containment condition for given `c >= 1` and `eta > 0`: every
/// kept member `S` must admit a family member containing its enlargement with
/// diameter at most `c * diam(S)` and gauge at most `eta * zeta(S)`.
pub fn check_c_eta(
    family: &GaugedFamily,
    filtered: &FilteredFamily,
    tau: &Tau,
    c: &ExtReal,
    eta: &ExtReal,
) -> Result<ContainmentCheck, Error> {
    if *c < ExtReal::one() || c.is_infinite() {
        return Err(Error::InvalidParameter(format!("c must be finite and >= 1, got {c}")));
    }
    if eta.is_zero() || eta.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "eta must be finite and positive, got {eta}"
        )));
    }
    let mut entries = Vec::new();
    let mut feasible = true;
    for &s in filtered.kept() {
        let member = family.member(s);
        let hat = enlargement_of_member(family, filtered, s, tau);
        let diam_cap = c.mul(&member.diameter);
        let zeta_cap = eta.mul(&member.zeta);
        let witness = (0..family.len()).find(|&t| {
            let cand = family.member(t);
            hat.is_subset_of(&cand.set) && cand.diameter <= diam_cap && cand.zeta <= zeta_cap
        });
        if witness.is_none() {
            feasible = false;
        }
        entries.push(ContainmentEntry {
            member: s,
            enlargement: hat,
            witness,
        });
    }
    Ok(ContainmentCheck { entries, feasible })
}

#[derive(Debug, Clone)]
pub struct ContainmentSearch {
    pub c: ExtReal,
    /// Smallest gauge multiplier; 0 means any positive `eta` works.
    pub eta: ExtReal,
    pub witnesses: Vec<(usize, usize)>,
}

/// Minimal feasible `(c, eta)`, lexicographically: first the smallest
/// diameter multiplier `c` (at least 1) for which every kept member has a
/// witness, then the smallest gauge multiplier achievable at that `c`.
/// `None` when some kept member's enlargement has no superset in the family
/// usable at any finite `(c, eta)`.
pub fn search_c_eta(
    family: &GaugedFamily,
    filtered: &FilteredFamily,
    tau: &Tau,
) -> Option<ContainmentSearch> {
    // Minimal multiplier k with a <= k * b, in [0, +inf].
    let req = |a: &ExtReal, b: &ExtReal| -> ExtReal {
        if a.is_zero() || b.is_infinite() {
            ExtReal::zero()
        } else if b.is_zero() {
            ExtReal::infinity()
        } else {
            a.div_positive(b)
        }
    };

    struct Candidates {
        member: usize,
        // (witness index, c requirement, eta requirement), finite reqs only.
        options: Vec<(usize, ExtReal, ExtReal)>,
    }

    let mut all: Vec<Candidates> = Vec::new();
    for &s in filtered.kept() {
        let member = family.member(s);
        let hat = enlargement_of_member(family, filtered, s, tau);
        let mut options = Vec::new();
        for t in 0..family.len() {
            let cand = family.member(t);
            if !hat.is_subset_of(&cand.set) {
                continue;
            }
            let c_req = req(&cand.diameter, &member.diameter);
            let eta_req = req(&cand.zeta, &member.zeta);
            if c_req.is_finite() && eta_req.is_finite() {
                options.push((t, c_req, eta_req));
            }
        }
        if options.is_empty() {
            return None;
        }
        all.push(Candidates { member: s, options });
    }

    let mut c = ExtReal::one();
    for cand in &all {
        let best = cand
            .options
            .iter()
            .map(|(_, c_req, _)| c_req.clone())
            .min()
            .expect("nonempty options");
        c = c.max(best);
    }
    let mut eta = ExtReal::zero();
    let mut witnesses = Vec::new();
    for cand in &all {
        let (t, _, eta_req) = cand
            .options
            .iter()
            .filter(|(_, c_req, _)| *c_req <= c)
            .min_by(|a, b| a.2.cmp(&b.2))
            .expect("c chosen as max of per-member minima");
        eta = eta.max(eta_req.clone());
        witnesses.push((cand.member, *t));
    }
    Some(ContainmentSearch { c, eta, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extreal::Alpha;
    use crate::gauge::Gauge;
    use crate::metric::line_space;
    use crate::metric::FiniteMetricSpace;

    fn singleton_instance() -> (FiniteMetricSpace, GaugedFamily, AtomicMeasure) {
        // Two points, masses (1, 2), explicit singleton gauges (2, 1).
        let space = line_space(vec!["a".into(), "b".into()], &[(0, 1), (1, 1)]).unwrap();
        let table = vec![
            (PointSet::singleton(0), ExtReal::from_int(2)),
            (PointSet::singleton(1), ExtReal::one()),
        ];
        let family = GaugedFamily::from_table(&space, table).unwrap();
        let mu = AtomicMeasure::atomic(vec![ExtReal::one(), ExtReal::from_int(2)]);
        (space, family, mu)
    }

    #[test]
    fn filtration_clauses() {
        let space = line_space(vec!["a".into(), "b".into()], &[(0, 1), (1, 1)]).unwrap();
        // Hausdorff gauge: singletons get zeta 0.
        let gauge = Gauge::hausdorff(Alpha::one(), ExtReal::one()).unwrap();
        let family = GaugedFamily::all_subsets(&space, &gauge).unwrap();
        // mass 0 at a, infinite at b.
        let mu = AtomicMeasure::atomic(vec![ExtReal::zero(), ExtReal::infinity()]);
        let filtered = filter_family(&mu, &family);
        let a_idx = family.find(&PointSet::singleton(0)).unwrap();
        let b_idx = family.find(&PointSet::singleton(1)).unwrap();
        assert!(filtered
            .dropped()
            .iter()
            .any(|(i, r)| *i == a_idx && *r == DropReason::BothZero));
        assert!(filtered.is_kept(b_idx)); // zeta 0, mu infinite: kept
        // An explicit infinite gauge against infinite measure drops.
        let table = vec![(PointSet::singleton(1), ExtReal::infinity())];
        let family = GaugedFamily::from_table(&space, table).unwrap();
        let filtered = filter_family(&mu, &family);
        assert_eq!(filtered.dropped()[0].1, DropReason::BothInfinite);
        // mu = 0, zeta = 5: kept (neither clause).
        let table = vec![(PointSet::singleton(0), ExtReal::from_int(5))];
        let family = GaugedFamily::from_table(&space, table).unwrap();
        let filtered = filter_family(&mu, &family);
        assert!(filtered.is_kept(0));
    }

    #[test]
    fn filtration_is_idempotent() {
        let (_, family, mu) = singleton_instance();
        let filtered = filter_family(&mu, &family);
        for &i in filtered.kept() {
            let member = family.member(i);
            let m = mu.eval(&member.set);
            let z = &member.zeta;
            assert!(!(z.is_zero() && m.is_zero()));
            assert!(!(z.is_infinite() && m.is_infinite()));
        }
    }

    #[test]
    fn quotient_branches() {
        assert_eq!(
            quotient_value(&ExtReal::from_int(5), &ExtReal::zero()),
            ExtReal::infinity()
        );
        assert_eq!(
            quotient_value(&ExtReal::from_int(3), &ExtReal::infinity()),
            ExtReal::zero()
        );
        assert_eq!(
            quotient_value(&ExtReal::from_int(6), &ExtReal::from_int(2)),
            ExtReal::from_int(3)
        );
    }

    #[test]
    fn quotient_rejects_dropped_members() {
        let space = line_space(vec!["a".into()], &[(0, 1)]).unwrap();
        let gauge = Gauge::hausdorff(Alpha::one(), ExtReal::one()).unwrap();
        let family = GaugedFamily::all_subsets(&space, &gauge).unwrap();
        let mu = AtomicMeasure::atomic(vec![ExtReal::zero()]);
        let filtered = filter_family(&mu, &family);
        assert!(matches!(
            quotient(&mu, &family, &filtered, 0),
            Err(Error::NotInFilteredFamily { .. })
        ));
    }

    #[test]
    fn fineness_semantics() {
        let (_, family, mu) = singleton_instance();
        let filtered = filter_family(&mu, &family);
        assert!(is_fine_at(&family, &filtered, 0, &Fineness::Exact));
        assert!(covers_finely(&family, &filtered, &PointSet::full(2), &Fineness::Exact));
        assert!(covers_finely(
            &family,
            &filtered,
            &PointSet::empty(),
            &Fineness::Exact
        ));
        // Family with only the two-point set: minimal diameter 1 at each
        // point, so not fine exactly, but fine at resolution 1.
        let space = line_space(vec!["a".into(), "b".into()], &[(0, 1), (1, 1)]).unwrap();
        let table = vec![(PointSet::full(2), ExtReal::from_int(4))];
        let family = GaugedFamily::from_table(&space, table).unwrap();
        let filtered = filter_family(&mu, &family);
        assert!(!is_fine_at(&family, &filtered, 0, &Fineness::Exact));
        assert!(is_fine_at(
            &family,
            &filtered,
            0,
            &Fineness::AtResolution(ExtReal::one())
        ));
    }

    #[test]
    fn covering_limits_on_two_set_relation() {
        // C({x}) = {{x} with f = 2, {x,y} with f = 9}.
        let space = line_space(vec!["x".into(), "y".into()], &[(0, 1), (1, 1)]).unwrap();
        let table = vec![
            (PointSet::singleton(0), ExtReal::one()),
            (PointSet::full(2), ExtReal::one()),
        ];
        let family = GaugedFamily::from_table(&space, table).unwrap();
        let mu = AtomicMeasure::atomic(vec![ExtReal::one(), ExtReal::one()]);
        let filtered = filter_family(&mu, &family);
        let f = |i: usize| {
            if family.member(i).set.len() == 1 {
                ExtReal::from_int(2)
            } else {
                ExtReal::from_int(9)
            }
        };
        let sup = covering_limsup(&family, &filtered, 0, &f, &Fineness::Exact).unwrap();
        let inf = covering_liminf(&family, &filtered, 0, &f, &Fineness::Exact).unwrap();
        assert_eq!(sup, ExtReal::from_int(2));
        assert_eq!(inf, ExtReal::from_int(2));
        // Constant function: both limits are the constant.
        let c = |_: usize| ExtReal::from_int(7);
        assert_eq!(
            covering_limsup(&family, &filtered, 0, &c, &Fineness::Exact).unwrap(),
            ExtReal::from_int(7)
        );
        assert_eq!(
            covering_liminf(&family, &filtered, 0, &c, &Fineness::Exact).unwrap(),
            ExtReal::from_int(7)
        );
    }

    #[test]
    fn federer_density_on_singleton_instance() {
        let (_, family, mu) = singleton_instance();
        let filtered = filter_family(&mu, &family);
        let d0 = federer_density(&mu, &family, &filtered, 0, &Fineness::Exact).unwrap();
        let d1 = federer_density(&mu, &family, &filtered, 1, &Fineness::Exact).unwrap();
        assert_eq!(d0, ExtReal::ratio(1, 2));
        assert_eq!(d1, ExtReal::from_int(2));
    }

    #[test]
    fn federer_density_not_fine_when_atom_is_filtered() {
        // Hausdorff gauge, mass zero at the point: {x} is dropped as
        // both-zero and no other diameter-zero set exists.
        let space = line_space(vec!["a".into(), "b".into()], &[(0, 1), (1, 1)]).unwrap();
        let gauge = Gauge::hausdorff(Alpha::one(), ExtReal::one()).unwrap();
        let family = GaugedFamily::all_subsets(&space, &gauge).unwrap();
        let mu = AtomicMeasure::atomic(vec![ExtReal::zero(), ExtReal::one()]);
        let filtered = filter_family(&mu, &family);
        assert!(matches!(
            federer_density(&mu, &family, &filtered, 0, &Fineness::Exact),
            Err(Error::NotFine { .. })
        ));
        // With positive mass the density is +inf through the zeta = 0 branch.
        let mu = AtomicMeasure::atomic(vec![ExtReal::from_int(4), ExtReal::one()]);
        let filtered = filter_family(&mu, &family);
        assert_eq!(
            federer_density(&mu, &family, &filtered, 0, &Fineness::Exact).unwrap(),
            ExtReal::infinity()
        );
    }

    #[test]
    fn unfiltered_limit_diverges_with_singletons_under_diameter_gauge() {
        let space = line_space(vec!["a".into(), "b".into()], &[(0, 1), (1, 1)]).unwrap();
        let gauge = Gauge::hausdorff(Alpha::one(), ExtReal::one()).unwrap();
        let family = GaugedFamily::all_subsets(&space, &gauge).unwrap();
        for mass_a in [ExtReal::zero(), ExtReal::from_int(3)] {
            let mu = AtomicMeasure::atomic(vec![mass_a, ExtReal::one()]);
            let v = unfiltered_density(&mu, &family, 0, &Fineness::Exact).unwrap();
            assert_eq!(v, ExtReal::infinity());
        }
    }

    #[test]
    fn enlargement_on_the_line() {
        // Points 0,1,2,3; family {0,1}, {1,2}, {2,3}; tau = 3/2; S = {1,2}.
        let space = line_space(
            (0..4).map(|i| format!("p{i}")).collect(),
            &[(0, 1), (1, 1), (2, 1), (3, 1)],
        )
        .unwrap();
        let table = vec![
            (PointSet::new(vec![0, 1]), ExtReal::one()),
            (PointSet::new(vec![1, 2]), ExtReal::one()),
            (PointSet::new(vec![2, 3]), ExtReal::one()),
        ];
        let family = GaugedFamily::from_table(&space, table).unwrap();
        let mu = AtomicMeasure::atomic(vec![ExtReal::one(); 4]);
        let filtered = filter_family(&mu, &family);
        let tau = Tau::new(ExtReal::ratio(3, 2)).unwrap();
        let s = family.find(&PointSet::new(vec![1, 2])).unwrap();
        let hat = enlargement_of_member(&family, &filtered, s, &tau);
        assert_eq!(hat, PointSet::full(4));
        // No kept set intersecting: empty union.
        let hat = enlargement(
            &family,
            &filtered,
            &PointSet::empty(),
            &ExtReal::zero(),
            &tau,
        );
        assert!(hat.is_empty());
    }

    #[test]
    fn enlargement_contains_kept_base() {
        let (_, family, mu) = singleton_instance();
        let filtered = filter_family(&mu, &family);
        let tau = Tau::default();
        for &i in filtered.kept() {
            let hat = enlargement_of_member(&family, &filtered, i, &tau);
            assert!(family.member(i).set.is_subset_of(&hat));
        }
    }

    #[test]
    fn containment_search_on_complete_family() {
        // All subsets with a diameter gauge and positive masses: the
        // enlargement itself is in the family, so the search succeeds.
        let space = line_space(
            vec!["a".into(), "b".into(), "c".into()],
            &[(0, 1), (1, 1), (3, 1)],
        )
        .unwrap();
        let gauge = Gauge::hausdorff(Alpha::one(), ExtReal::one()).unwrap();
        let family = GaugedFamily::all_subsets(&space, &gauge).unwrap();
        let mu = AtomicMeasure::atomic(vec![ExtReal::one(); 3]);
        let filtered = filter_family(&mu, &family);
        let tau = Tau::default();
        let found = search_c_eta(&family, &filtered, &tau).expect("feasible");
        assert!(found.c >= ExtReal::one());
        let check = check_c_eta(
            &family,
            &filtered,
            &tau,
            &found.c,
            &found.eta.clone().max(ExtReal::one()),
        )
        .unwrap();
        assert!(check.feasible);
    }

    #[test]
    fn containment_infeasible_without_superset() {
        // Two overlapping pairs whose enlargement is the whole space, but no
        // family member contains all three points.
        let space = line_space(
            vec!["a".into(), "b".into(), "c".into()],
            &[(0, 1), (1, 1), (2, 1)],
        )
        .unwrap();
        let table = vec![
            (PointSet::new(vec![0, 1]), ExtReal::one()),
            (PointSet::new(vec![1, 2]), ExtReal::one()),
        ];
        let family = GaugedFamily::from_table(&space, table).unwrap();
        let mu = AtomicMeasure::atomic(vec![ExtReal::one(); 3]);
        let filtered = filter_family(&mu, &family);
        assert!(search_c_eta(&family, &filtered, &Tau::default()).is_none());
        let check = check_c_eta(
            &family,
            &filtered,
            &Tau::default(),
            &ExtReal::from_int(10),
            &ExtReal::from_int(10),
        )
        .unwrap();
        assert!(!check.feasible);
    }
}
