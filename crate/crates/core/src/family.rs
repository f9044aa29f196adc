//! Gauged covering families: finite collections of point subsets, each
//! carrying its diameter and gauge value.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::extreal::{Backend, ExtReal};
use crate::gauge::Gauge;
use crate::metric::{FiniteMetricSpace, PointSet};

/// Provenance of a family member generated as a metric ball.
#[derive(Debug, Clone)]
pub struct BallOrigin {
    pub center: usize,
    pub radius: ExtReal,
    pub closed: bool,
}

#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub set: PointSet,
    pub diameter: ExtReal,
    pub zeta: ExtReal,
    pub ball: Option<BallOrigin>,
}

/// A finite covering family with gauge values baked in.
///
/// The empty set is never a member. Members are deduplicated by point set;
/// ball-generated members remember one witnessing (center, radius).
#[derive(Debug, Clone)]
pub struct GaugedFamily {
    members: Vec<FamilyMember>,
}

impl GaugedFamily {
    /// Evaluate `gauge` on every set and build the family. Rejects the empty
    /// set and deduplicates repeated point sets (first occurrence wins).
    pub fn from_sets(
        space: &FiniteMetricSpace,
        sets: Vec<PointSet>,
        gauge: &Gauge,
    ) -> Result<GaugedFamily, Error> {
        let mut seen = BTreeMap::new();
        let mut members = Vec::new();
        for set in sets {
            if set.is_empty() {
                return Err(Error::InvalidInstance(
                    "the empty set cannot be a covering family member".into(),
                ));
            }
            if seen.insert(set.clone(), ()).is_some() {
                continue;
            }
            let diameter = space.diameter(&set)?;
            let zeta = gauge.eval(space, &set)?;
            let ball = space.as_closed_ball(&set).map(|(center, radius)| BallOrigin {
                center,
                radius,
                closed: true,
            });
            members.push(FamilyMember {
                set,
                diameter,
                zeta,
                ball,
            });
        }
        Ok(GaugedFamily { members })
    }

    /// Explicit table construction: the sets and their gauge values together.
    pub fn from_table(
        space: &FiniteMetricSpace,
        table: Vec<(PointSet, ExtReal)>,
    ) -> Result<GaugedFamily, Error> {
        let gauge = Gauge::explicit(table.iter().cloned().collect());
        GaugedFamily::from_sets(space, table.into_iter().map(|(s, _)| s).collect(), &gauge)
    }

    /// All distinct closed balls of the space, optionally capped by diameter.
    ///
    /// For each center the realized radii are the distinct positive distances
    /// from that center, plus one radius below the smallest so the singleton
    /// ball is present; duplicated point sets are merged.
    pub fn closed_balls(
        space: &FiniteMetricSpace,
        gauge: &Gauge,
        diameter_cap: Option<&ExtReal>,
    ) -> Result<GaugedFamily, Error> {
        Self::balls(space, gauge, diameter_cap, true)
    }

    /// All distinct open balls, analogous to `closed_balls`.
    pub fn open_balls(
        space: &FiniteMetricSpace,
        gauge: &Gauge,
        diameter_cap: Option<&ExtReal>,
    ) -> Result<GaugedFamily, Error> {
        Self::balls(space, gauge, diameter_cap, false)
    }

    fn balls(
        space: &FiniteMetricSpace,
        gauge: &Gauge,
        diameter_cap: Option<&ExtReal>,
        closed: bool,
    ) -> Result<GaugedFamily, Error> {
        let n = space.len();
        let mut seen: BTreeMap<PointSet, ()> = BTreeMap::new();
        let mut members = Vec::new();
        for center in 0..n {
            let mut radii: Vec<ExtReal> = (0..n)
                .filter(|&j| j != center)
                .map(|j| space.dist(center, j))
                .collect();
            radii.sort();
            radii.dedup();
            // Distinct closed balls at a center are realized by the distinct
            // distances from it, plus one radius below the smallest for the
            // singleton. Distinct open balls are realized at exactly the
            // distances (B(c, d_i) = {d <= d_{i-1}}, B(c, d_1) = {c}) plus one
            // radius above the largest for the full reach.
            let mut candidates: Vec<ExtReal> = Vec::with_capacity(radii.len() + 1);
            if closed {
                candidates.push(match radii.first() {
                    Some(d) => d.div_positive(&ExtReal::from_int(2)),
                    None => ExtReal::one(),
                });
                candidates.extend(radii.iter().cloned());
            } else {
                candidates.extend(radii.iter().cloned());
                candidates.push(match radii.last() {
                    Some(d) => d.add(&ExtReal::one()),
                    None => ExtReal::one(),
                });
            }
            for radius in candidates {
                if radius.is_zero() {
                    continue;
                }
                let set = if closed {
                    space.closed_ball_unchecked(center, &radius)
                } else {
                    space.open_ball(center, &radius)?
                };
                if set.is_empty() {
                    continue;
                }
                let diameter = space.diameter(&set)?;
                if let Some(cap) = diameter_cap {
                    // Radii ascend, so ball diameters are nondecreasing: once
                    // past the cap this center is done.
                    if diameter > *cap {
                        break;
                    }
                }
                if seen.insert(set.clone(), ()).is_some() {
                    continue;
                }
                let zeta = gauge.eval(space, &set)?;
                members.push(FamilyMember {
                    set,
                    diameter,
                    zeta,
                    ball: Some(BallOrigin {
                        center,
                        radius,
                        closed,
                    }),
                });
            }
        }
        Ok(GaugedFamily { members })
    }

    /// Every nonempty subset of the space. Exponential; guarded.
    pub fn all_subsets(space: &FiniteMetricSpace, gauge: &Gauge) -> Result<GaugedFamily, Error> {
        let n = space.len();
        if n > 16 {
            return Err(Error::InvalidSpec(format!(
                "all-subsets family on {n} points is too large"
            )));
        }
        let sets = (1u32..(1 << n))
            .map(|bits| PointSet::from_iter((0..n).filter(|&i| bits >> i & 1 == 1)))
            .collect();
        GaugedFamily::from_sets(space, sets, gauge)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn member(&self, index: usize) -> &FamilyMember {
        &self.members[index]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FamilyMember> {
        self.members.iter()
    }

    /// Indices of members containing the point.
    pub fn members_containing(&self, point: usize) -> Vec<usize> {
        (0..self.members.len())
            .filter(|&i| self.members[i].set.contains(point))
            .collect()
    }

    /// Distinct positive member diameters, ascending.
    pub fn positive_diameters(&self) -> Vec<ExtReal> {
        let mut diams: Vec<ExtReal> = self
            .members
            .iter()
            .map(|m| m.diameter.clone())
            .filter(|d| !d.is_zero())
            .collect();
        diams.sort();
        diams.dedup();
        diams
    }

    pub fn find(&self, set: &PointSet) -> Option<usize> {
        self.members.iter().position(|m| &m.set == set)
    }

    pub fn backend(&self) -> Backend {
        self.members.iter().fold(Backend::Rational, |acc, m| {
            acc.join(m.diameter.backend()).join(m.zeta.backend())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extreal::Alpha;
    use crate::metric::line_space;

    fn grid5() -> FiniteMetricSpace {
        // 0, 1/4, ..., 1 on the line.
        line_space(
            (0..5).map(|i| format!("p{i}")).collect(),
            &[(0, 4), (1, 4), (2, 4), (3, 4), (4, 4)],
        )
        .unwrap()
    }

    #[test]
    fn closed_ball_family_contains_singletons_and_dedupes() {
        let space = grid5();
        let gauge = Gauge::spherical(Alpha::one(), ExtReal::one()).unwrap();
        let fam = GaugedFamily::closed_balls(&space, &gauge, None).unwrap();
        for p in 0..5 {
            assert!(
                fam.iter().any(|m| m.set == PointSet::singleton(p)),
                "singleton ball {p} missing"
            );
        }
        // Every member set is distinct.
        let mut sets: Vec<_> = fam.iter().map(|m| m.set.clone()).collect();
        sets.sort();
        let before = sets.len();
        sets.dedup();
        assert_eq!(before, sets.len());
    }

    #[test]
    fn open_balls_are_contained_in_closed_of_same_radius() {
        let space = grid5();
        for center in 0..5 {
            for radius in [ExtReal::ratio(1, 4), ExtReal::ratio(3, 8), ExtReal::ratio(1, 2)] {
                let open = space.open_ball(center, &radius).unwrap();
                let closed = space.closed_ball(center, &radius).unwrap();
                assert!(open.is_subset_of(&closed));
            }
        }
    }

    #[test]
    fn rejects_empty_member() {
        let space = grid5();
        let gauge = Gauge::hausdorff(Alpha::one(), ExtReal::one()).unwrap();
        let err = GaugedFamily::from_sets(&space, vec![PointSet::empty()], &gauge);
        assert!(err.is_err());
    }

    #[test]
    fn all_subsets_count() {
        let space = line_space(
            vec!["a".into(), "b".into(), "c".into()],
            &[(0, 1), (1, 1), (2, 1)],
        )
        .unwrap();
        let gauge = Gauge::hausdorff(Alpha::one(), ExtReal::one()).unwrap();
        let fam = GaugedFamily::all_subsets(&space, &gauge).unwrap();
        assert_eq!(fam.len(), 7);
    }
}
