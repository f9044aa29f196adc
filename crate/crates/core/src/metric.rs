//! Finite metric spaces, point sets, diameters, and metric balls.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::Error;
use crate::extreal::ExtReal;

/// A finite metric space: named points with an exact symmetric distance.
///
/// Distances are either a validated explicit matrix or Euclidean distances
/// computed on demand from coordinates. Distinct points must be at positive
/// distance; duplicate points are rejected at construction.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    ids: Vec<String>,
    metric: MetricData,
    coords: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone)]
enum MetricData {
    /// Row-major upper-triangular-complete matrix of pairwise distances.
    Matrix(Vec<ExtReal>),
    /// Euclidean distances from `coords`, computed on demand as doubles
    /// (exact rationals in one dimension, where no square root is needed).
    Euclidean,
}

impl FiniteMetricSpace {
    /// Build from an explicit distance matrix. Validates symmetry, zero
    /// diagonal, positivity off the diagonal, and the triangle inequality.
    pub fn from_matrix(ids: Vec<String>, dist: Vec<Vec<ExtReal>>) -> Result<Self, Error> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::InvalidInstance("empty point set".into()));
        }
        check_unique_ids(&ids)?;
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInstance(format!(
                "distance matrix must be {n}x{n}"
            )));
        }
        for (i, row) in dist.iter().enumerate() {
            for (j, d) in row.iter().enumerate() {
                if d.is_infinite() {
                    return Err(Error::InvalidInstance(format!(
                        "distance ({}, {}) is infinite",
                        ids[i], ids[j]
                    )));
                }
                if i == j && !d.is_zero() {
                    return Err(Error::InvalidInstance(format!(
                        "nonzero diagonal at {}",
                        ids[i]
                    )));
                }
                if i != j && d.is_zero() {
                    return Err(Error::InvalidInstance(format!(
                        "duplicate points: distance ({}, {}) is zero",
                        ids[i], ids[j]
                    )));
                }
                if dist[i][j] != dist[j][i] {
                    return Err(Error::InvalidInstance(format!(
                        "asymmetric distances at ({}, {})",
                        ids[i], ids[j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i][k] > dist[i][j].add(&dist[j][k]) {
                        return Err(Error::InvalidInstance(format!(
                            "triangle inequality fails on ({}, {}, {})",
                            ids[i], ids[j], ids[k]
                        )));
                    }
                }
            }
        }
        let flat = dist.into_iter().flatten().collect();
        Ok(FiniteMetricSpace {
            ids,
            metric: MetricData::Matrix(flat),
            coords: None,
        })
    }

    /// Build a Euclidean space from coordinates. One-dimensional instances
    /// keep exact rational distances when the coordinates are exact grid
    /// values; higher dimensions use doubles.
    pub fn euclidean(ids: Vec<String>, coords: Vec<Vec<f64>>) -> Result<Self, Error> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::InvalidInstance("empty point set".into()));
        }
        check_unique_ids(&ids)?;
        if coords.len() != n {
            return Err(Error::InvalidInstance(
                "coordinate count does not match point count".into(),
            ));
        }
        let dim = coords[0].len();
        if dim == 0 || coords.iter().any(|c| c.len() != dim) {
            return Err(Error::InvalidInstance(
                "coordinates must be nonempty and of equal dimension".into(),
            ));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if coords[i] == coords[j] {
                    return Err(Error::InvalidInstance(format!(
                        "duplicate points: {} and {} share coordinates",
                        ids[i], ids[j]
                    )));
                }
            }
        }
        Ok(FiniteMetricSpace {
            ids,
            metric: MetricData::Euclidean,
            coords: Some(coords),
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|p| p == id)
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// Attach advisory coordinates (for probes) to a matrix-backed space.
    pub fn with_coords(mut self, coords: Vec<Vec<f64>>) -> Self {
        assert_eq!(coords.len(), self.ids.len());
        self.coords = Some(coords);
        self
    }

    pub fn has_matrix(&self) -> bool {
        matches!(self.metric, MetricData::Matrix(_))
    }

    pub fn dist(&self, i: usize, j: usize) -> ExtReal {
        match &self.metric {
            MetricData::Matrix(flat) => flat[i * self.ids.len() + j].clone(),
            MetricData::Euclidean => {
                let coords = self.coords.as_ref().expect("euclidean space has coords");
                euclidean_dist(&coords[i], &coords[j])
            }
        }
    }

    /// Fast path for probes on Euclidean instances.
    pub fn dist_f64(&self, i: usize, j: usize) -> f64 {
        match &self.metric {
            MetricData::Matrix(flat) => flat[i * self.ids.len() + j].to_f64(),
            MetricData::Euclidean => {
                let coords = self.coords.as_ref().expect("euclidean space has coords");
                coords[i]
                    .iter()
                    .zip(&coords[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }

    pub fn check_index(&self, index: usize) -> Result<(), Error> {
        if index < self.ids.len() {
            Ok(())
        } else {
            Err(Error::PointOutOfRange {
                index,
                len: self.ids.len(),
            })
        }
    }

    /// All distinct positive distance values, ascending.
    pub fn distance_spectrum(&self) -> Vec<ExtReal> {
        let n = self.len();
        let mut values = BTreeSet::new();
        for i in 0..n {
            for j in (i + 1)..n {
                values.insert(self.dist(i, j));
            }
        }
        values.into_iter().collect()
    }

    /// Minimal positive distance from `center` to another point, or `None`
    /// for a one-point space.
    pub fn min_positive_distance_from(&self, center: usize) -> Option<ExtReal> {
        (0..self.len())
            .filter(|&j| j != center)
            .map(|j| self.dist(center, j))
            .min()
    }

    /// `{y : d(x, y) <= r}`. Requires `r > 0`.
    pub fn closed_ball(&self, center: usize, radius: &ExtReal) -> Result<PointSet, Error> {
        self.check_index(center)?;
        if radius.is_zero() {
            return Err(Error::InvalidParameter("ball radius must be positive".into()));
        }
        Ok(self.closed_ball_unchecked(center, radius))
    }

    pub(crate) fn closed_ball_unchecked(&self, center: usize, radius: &ExtReal) -> PointSet {
        PointSet::from_iter((0..self.len()).filter(|&j| self.dist(center, j) <= *radius))
    }

    /// `{y : d(x, y) < r}`. Requires `r > 0`.
    pub fn open_ball(&self, center: usize, radius: &ExtReal) -> Result<PointSet, Error> {
        self.check_index(center)?;
        if radius.is_zero() {
            return Err(Error::InvalidParameter("ball radius must be positive".into()));
        }
        Ok(PointSet::from_iter(
            (0..self.len()).filter(|&j| self.dist(center, j) < *radius),
        ))
    }

    /// Maximum pairwise distance; 0 for the empty set and singletons.
    pub fn diameter(&self, set: &PointSet) -> Result<ExtReal, Error> {
        if let Some(&max) = set.iter().max() {
            self.check_index(max)?;
        }
        let members = set.as_slice();
        let mut best = ExtReal::zero();
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                let d = self.dist(i, j);
                if d > best {
                    best = d;
                }
            }
        }
        Ok(best)
    }

    /// Resolve `set` to `Some((center, radius))` when it equals a closed ball
    /// of this space; the radius returned is the max distance to the center.
    pub fn as_closed_ball(&self, set: &PointSet) -> Option<(usize, ExtReal)> {
        for &c in set.iter() {
            let radius = set
                .iter()
                .map(|&y| self.dist(c, y))
                .max()
                .unwrap_or_else(ExtReal::zero);
            let candidate = if radius.is_zero() {
                PointSet::singleton(c)
            } else {
                self.closed_ball_unchecked(c, &radius)
            };
            if candidate == *set {
                return Some((c, radius));
            }
        }
        None
    }

    /// Resolve `set` to an open ball `(center, radius)` of this space.
    pub fn as_open_ball(&self, set: &PointSet) -> Option<(usize, ExtReal)> {
        for &c in set.iter() {
            let max_in = set
                .iter()
                .map(|&y| self.dist(c, y))
                .max()
                .unwrap_or_else(ExtReal::zero);
            let min_out = (0..self.len())
                .filter(|j| !set.contains(*j))
                .map(|j| self.dist(c, j))
                .min();
            match min_out {
                Some(m) if m > max_in => return Some((c, m)),
                None => {
                    // Whole space: any radius above the diameter works.
                    return Some((c, max_in.add(&ExtReal::one())));
                }
                _ => {}
            }
        }
        None
    }
}

fn check_unique_ids(ids: &[String]) -> Result<(), Error> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::InvalidInstance(format!("duplicate point id {id:?}")));
        }
    }
    Ok(())
}

fn euclidean_dist(a: &[f64], b: &[f64]) -> ExtReal {
    if a.len() == 1 {
        // 1-D distances need no square root; keep them exact when the
        // coordinates are exact doubles (grid points are).
        let d = (a[0] - b[0]).abs();
        if let Some(r) = num::BigRational::from_float(d) {
            return ExtReal::Rational(r);
        }
    }
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    ExtReal::Float(sq.sqrt())
}

/// A sorted set of point indices into a `FiniteMetricSpace`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointSet {
    members: Vec<usize>,
}

impl PointSet {
    pub fn empty() -> PointSet {
        PointSet::default()
    }

    pub fn singleton(p: usize) -> PointSet {
        PointSet { members: vec![p] }
    }

    pub fn new(mut members: Vec<usize>) -> PointSet {
        members.sort_unstable();
        members.dedup();
        PointSet { members }
    }

    pub fn full(n: usize) -> PointSet {
        PointSet {
            members: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.members.binary_search(&p).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.members.iter()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        self.members.iter().all(|&p| other.contains(p))
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        // Both sorted: linear merge scan.
        let (mut a, mut b) = (0, 0);
        while a < self.members.len() && b < other.members.len() {
            match self.members[a].cmp(&other.members[b]) {
                std::cmp::Ordering::Equal => return true,
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
            }
        }
        false
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut members = self.members.clone();
        members.extend_from_slice(&other.members);
        PointSet::new(members)
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet {
            members: self
                .members
                .iter()
                .copied()
                .filter(|&p| other.contains(p))
                .collect(),
        }
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        PointSet {
            members: self
                .members
                .iter()
                .copied()
                .filter(|&p| !other.contains(p))
                .collect(),
        }
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        PointSet::new(iter.into_iter().collect())
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, p) in self.members.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Convenience: a 1-D space from exact rational line positions given as
/// (numerator, denominator) pairs. Used by generators and tests.
pub fn line_space(ids: Vec<String>, positions: &[(i64, i64)]) -> Result<FiniteMetricSpace, Error> {
    let n = positions.len();
    let mut dist = vec![vec![ExtReal::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let a = ExtReal::ratio(positions[i].0, positions[i].1);
                let b = ExtReal::ratio(positions[j].0, positions[j].1);
                dist[i][j] = a.abs_diff(&b);
            }
        }
    }
    let coords = positions
        .iter()
        .map(|(p, q)| vec![*p as f64 / *q as f64])
        .collect();
    let mut space = FiniteMetricSpace::from_matrix(ids, dist)?;
    space.coords = Some(coords);
    Ok(space)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_point_line() -> FiniteMetricSpace {
        line_space(
            vec!["a".into(), "b".into(), "c".into()],
            &[(0, 1), (1, 1), (3, 1)],
        )
        .unwrap()
    }

    #[test]
    fn diameter_of_singleton_and_empty_is_zero() {
        let space = three_point_line();
        assert_eq!(space.diameter(&PointSet::singleton(1)).unwrap(), ExtReal::zero());
        assert_eq!(space.diameter(&PointSet::empty()).unwrap(), ExtReal::zero());
    }

    #[test]
    fn diameter_is_max_pairwise_distance() {
        let space = three_point_line();
        let all = PointSet::full(3);
        assert_eq!(space.diameter(&all).unwrap(), ExtReal::from_int(3));
    }

    #[test]
    fn diameter_rejects_out_of_range() {
        let space = three_point_line();
        assert!(space.diameter(&PointSet::new(vec![0, 7])).is_err());
    }

    #[test]
    fn balls_on_the_line() {
        // Points 0,1,2 at unit spacing.
        let space = line_space(
            vec!["p0".into(), "p1".into(), "p2".into()],
            &[(0, 1), (1, 1), (2, 1)],
        )
        .unwrap();
        let one = ExtReal::one();
        assert_eq!(space.closed_ball(1, &one).unwrap(), PointSet::full(3));
        assert_eq!(space.open_ball(1, &one).unwrap(), PointSet::singleton(1));
        assert_eq!(
            space.closed_ball(0, &ExtReal::ratio(1, 2)).unwrap(),
            PointSet::singleton(0)
        );
    }

    #[test]
    fn rejects_duplicates_and_asymmetry() {
        let ids = vec!["a".to_string(), "b".to_string()];
        let zero = ExtReal::zero();
        let dup = vec![vec![zero.clone(), zero.clone()], vec![zero.clone(), zero.clone()]];
        assert!(FiniteMetricSpace::from_matrix(ids.clone(), dup).is_err());
        let asym = vec![
            vec![ExtReal::zero(), ExtReal::one()],
            vec![ExtReal::from_int(2), ExtReal::zero()],
        ];
        assert!(FiniteMetricSpace::from_matrix(ids, asym).is_err());
    }

    #[test]
    fn rejects_triangle_violation() {
        let ids: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let d = |x: u64| ExtReal::from_int(x);
        let bad = vec![
            vec![d(0), d(1), d(5)],
            vec![d(1), d(0), d(1)],
            vec![d(5), d(1), d(0)],
        ];
        assert!(FiniteMetricSpace::from_matrix(ids, bad).is_err());
    }

    #[test]
    fn ball_recognition() {
        let space = three_point_line();
        // {a,b} = closed ball around a or b with radius 1.
        let ab = PointSet::new(vec![0, 1]);
        let (c, r) = space.as_closed_ball(&ab).unwrap();
        assert!(c <= 1);
        assert!(r >= ExtReal::one());
        // {a,c} skips b: not a ball.
        let ac = PointSet::new(vec![0, 2]);
        assert!(space.as_closed_ball(&ac).is_none());
        // Open ball {a}: radius up to d(a,b).
        let (c, r) = space.as_open_ball(&PointSet::singleton(0)).unwrap();
        assert_eq!(c, 0);
        assert_eq!(r, ExtReal::one());
    }
}
