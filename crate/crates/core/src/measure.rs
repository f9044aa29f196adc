//! Outer measures on finite point sets.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::extreal::{Backend, ExtReal};
use crate::metric::PointSet;

/// A Borel-regular outer measure given by per-point masses, plus a
/// table-backed oracle variant for tiny instances.
///
/// Atomic mode evaluates `mu(E) = sum of mass[x] for x in E`; it is monotone,
/// additive, and every set is measurable. Oracle mode carries an explicit
/// table over all subsets of a small space, validated for monotonicity and
/// subadditivity at construction.
#[derive(Debug, Clone)]
pub enum AtomicMeasure {
    Atomic { mass: Vec<ExtReal> },
    TableOracle { n: usize, table: BTreeMap<PointSet, ExtReal> },
}

/// Oracle tables are only practical on tiny spaces; validation enumerates all
/// subset pairs.
const MAX_ORACLE_POINTS: usize = 10;

impl AtomicMeasure {
    pub fn atomic(mass: Vec<ExtReal>) -> AtomicMeasure {
        AtomicMeasure::Atomic { mass }
    }

    pub fn uniform(n: usize, total: ExtReal) -> AtomicMeasure {
        let per = total.div_positive(&ExtReal::from_int(n as u64));
        AtomicMeasure::Atomic {
            mass: vec![per; n],
        }
    }

    /// Validates that the table covers every subset of an `n`-point space and
    /// is monotone and subadditive on it.
    pub fn table_oracle(n: usize, table: BTreeMap<PointSet, ExtReal>) -> Result<AtomicMeasure, Error> {
        if n > MAX_ORACLE_POINTS {
            return Err(Error::InvalidInstance(format!(
                "table-oracle measures support at most {MAX_ORACLE_POINTS} points, got {n}"
            )));
        }
        let subsets: Vec<PointSet> = (0u32..(1 << n))
            .map(|bits| PointSet::from_iter((0..n).filter(|&i| bits >> i & 1 == 1)))
            .collect();
        for s in &subsets {
            if !table.contains_key(s) {
                return Err(Error::InvalidInstance(format!(
                    "table-oracle measure is missing subset {s:?}"
                )));
            }
        }
        if !table[&PointSet::empty()].is_zero() {
            return Err(Error::InvalidInstance("mu(empty) must be 0".into()));
        }
        // Monotonicity along one-point extensions implies it everywhere.
        for s in &subsets {
            for p in 0..n {
                if !s.contains(p) {
                    let bigger = s.union(&PointSet::singleton(p));
                    if table[s] > table[&bigger] {
                        return Err(Error::InvalidInstance(format!(
                            "table-oracle measure not monotone at {s:?} vs {bigger:?}"
                        )));
                    }
                }
            }
        }
        for a in &subsets {
            for b in &subsets {
                let union = a.union(b);
                if table[&union] > table[a].add(&table[b]) {
                    return Err(Error::InvalidInstance(format!(
                        "table-oracle measure not subadditive at {a:?}, {b:?}"
                    )));
                }
            }
        }
        Ok(AtomicMeasure::TableOracle { n, table })
    }

    pub fn eval(&self, set: &PointSet) -> ExtReal {
        match self {
            AtomicMeasure::Atomic { mass } => {
                ExtReal::sum(set.iter().map(|&p| &mass[p]))
            }
            AtomicMeasure::TableOracle { table, .. } => table
                .get(set)
                .cloned()
                .expect("oracle tables are validated complete"),
        }
    }

    pub fn point_mass(&self, p: usize) -> ExtReal {
        self.eval(&PointSet::singleton(p))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, AtomicMeasure::Atomic { .. })
    }

    pub fn backend(&self) -> Backend {
        let values: Box<dyn Iterator<Item = &ExtReal>> = match self {
            AtomicMeasure::Atomic { mass } => Box::new(mass.iter()),
            AtomicMeasure::TableOracle { table, .. } => Box::new(table.values()),
        };
        values.fold(Backend::Rational, |acc, v| acc.join(v.backend()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_is_additive() {
        let mu = AtomicMeasure::atomic(vec![
            ExtReal::one(),
            ExtReal::from_int(2),
            ExtReal::ratio(1, 2),
        ]);
        assert_eq!(mu.eval(&PointSet::empty()), ExtReal::zero());
        assert_eq!(mu.eval(&PointSet::full(3)), ExtReal::ratio(7, 2));
        let a = PointSet::new(vec![0, 1]);
        let b = PointSet::new(vec![1, 2]);
        let lhs = mu.eval(&a.union(&b)).add(&mu.eval(&a.intersection(&b)));
        let rhs = mu.eval(&a).add(&mu.eval(&b));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn infinite_atom_propagates() {
        let mu = AtomicMeasure::atomic(vec![ExtReal::one(), ExtReal::infinity()]);
        assert_eq!(mu.eval(&PointSet::full(2)), ExtReal::infinity());
        assert_eq!(mu.eval(&PointSet::singleton(0)), ExtReal::one());
    }

    #[test]
    fn oracle_table_validation() {
        // 1-point space: subsets {} and {0}.
        let mut table = BTreeMap::new();
        table.insert(PointSet::empty(), ExtReal::zero());
        table.insert(PointSet::singleton(0), ExtReal::from_int(4));
        assert!(AtomicMeasure::table_oracle(1, table.clone()).is_ok());
        // Nonzero empty set rejected.
        table.insert(PointSet::empty(), ExtReal::one());
        assert!(AtomicMeasure::table_oracle(1, table).is_err());
        // Non-monotone table rejected.
        let mut bad = BTreeMap::new();
        bad.insert(PointSet::empty(), ExtReal::zero());
        bad.insert(PointSet::singleton(0), ExtReal::from_int(4));
        bad.insert(PointSet::singleton(1), ExtReal::from_int(1));
        bad.insert(PointSet::full(2), ExtReal::from_int(2));
        assert!(AtomicMeasure::table_oracle(2, bad).is_err());
    }
}
