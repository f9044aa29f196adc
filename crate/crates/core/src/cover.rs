//! The Carathéodory construction.
//!
//! `min_cover` computes the delta-restricted covering optimum: the minimum of
//! `sum zeta(E_j)` over subfamilies of diameter at most `delta` whose union
//! contains the target, as an exact weighted set cover (branch and bound with
//! a greedy incumbent and a fractional lower bound). `caratheodory_measure`
//! takes the supremum over `delta`, which on a finite family is a step
//! function probed once per step.

use std::collections::HashMap;

use crate::error::Error;
use crate::extreal::{Alpha, ExtReal};
use crate::family::GaugedFamily;
use crate::gauge::Gauge;
use crate::metric::{FiniteMetricSpace, PointSet};

/// How a cover value was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// Proven minimal over all admissible subfamilies.
    Exact,
    /// Value of a greedy cover; an upper bound on the optimum.
    GreedyUpperBound,
}

/// Witnessed value of the delta-restricted covering optimum.
#[derive(Debug, Clone)]
pub struct CoverSolution {
    pub value: ExtReal,
    /// Family indices achieving the value; empty when the optimum is `+inf`
    /// (no admissible cover) or the target is empty.
    pub cover: Vec<usize>,
    pub certificate: Certificate,
}

/// Minimum gauge sum over subfamilies of diameter `<= delta` covering
/// `target`; `+inf` with an empty witness when no admissible cover exists.
/// Members with infinite gauge are never part of a finite optimum and are
/// pruned up front.
pub fn min_cover(family: &GaugedFamily, delta: &ExtReal, target: &PointSet) -> CoverSolution {
    solve(family, delta, target, false)
}

/// Greedy cover: an upper bound on `min_cover`, reported as such.
pub fn greedy_cover(family: &GaugedFamily, delta: &ExtReal, target: &PointSet) -> CoverSolution {
    solve(family, delta, target, true)
}

fn solve(
    family: &GaugedFamily,
    delta: &ExtReal,
    target: &PointSet,
    greedy_only: bool,
) -> CoverSolution {
    if target.is_empty() {
        // The empty subfamily covers the empty set at zero cost.
        return CoverSolution {
            value: ExtReal::zero(),
            cover: Vec::new(),
            certificate: Certificate::Exact,
        };
    }

    // Admissible candidates: diameter within delta, finite gauge, and a
    // nonempty footprint on the target.
    let mut base_cover: Vec<usize> = Vec::new();
    let mut covered = vec![false; target.len()];
    let point_pos: HashMap<usize, usize> = target
        .iter()
        .enumerate()
        .map(|(pos, &p)| (p, pos))
        .collect();
    let mut cand_index: Vec<usize> = Vec::new();
    let mut cand_mask: Vec<Mask> = Vec::new();
    let mut cand_cost: Vec<ExtReal> = Vec::new();

    for (i, member) in family.iter().enumerate() {
        if member.diameter > *delta || member.zeta.is_infinite() {
            continue;
        }
        let mut mask = Mask::empty(target.len());
        for &p in member.set.iter() {
            if let Some(&pos) = point_pos.get(&p) {
                mask.set(pos);
            }
        }
        if mask.is_empty() {
            continue;
        }
        if member.zeta.is_zero() {
            // Free sets can only help; take them all up front.
            for pos in mask.ones() {
                covered[pos] = true;
            }
            base_cover.push(i);
        } else {
            cand_index.push(i);
            cand_mask.push(mask);
            cand_cost.push(member.zeta.clone());
        }
    }

    let mut covered_mask = Mask::empty(target.len());
    for (pos, &c) in covered.iter().enumerate() {
        if c {
            covered_mask.set(pos);
        }
    }

    // Feasibility pre-pass.
    let mut reach = covered_mask.clone();
    for m in &cand_mask {
        reach.union_with(m);
    }
    if !reach.is_full() {
        return CoverSolution {
            value: ExtReal::infinity(),
            cover: Vec::new(),
            certificate: Certificate::Exact,
        };
    }
    if covered_mask.is_full() {
        return CoverSolution {
            value: ExtReal::zero(),
            cover: base_cover,
            certificate: Certificate::Exact,
        };
    }

    // Deduplicate candidates by footprint, keeping the cheapest.
    let mut best_by_mask: HashMap<Vec<u64>, usize> = HashMap::new();
    for k in 0..cand_index.len() {
        match best_by_mask.entry(cand_mask[k].words.clone()) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                if cand_cost[k] < cand_cost[*e.get()] {
                    e.insert(k);
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(k);
            }
        }
    }
    let keep: Vec<usize> = {
        let mut v: Vec<usize> = best_by_mask.into_values().collect();
        v.sort_unstable();
        v
    };
    let cand_index: Vec<usize> = keep.iter().map(|&k| cand_index[k]).collect();
    let cand_mask: Vec<Mask> = keep.iter().map(|&k| cand_mask[k].clone()).collect();
    let cand_cost: Vec<ExtReal> = keep.iter().map(|&k| cand_cost[k].clone()).collect();

    let mut ctx = SolveCtx {
        masks: &cand_mask,
        costs: &cand_cost,
        n_points: target.len(),
        incumbent_value: ExtReal::infinity(),
        incumbent: Vec::new(),
    };

    // Greedy incumbent.
    let greedy = greedy_complete(&ctx, &covered_mask);
    let (greedy_value, greedy_sel) = greedy.expect("feasible after pre-pass");
    ctx.incumbent_value = greedy_value;
    ctx.incumbent = greedy_sel;

    if greedy_only {
        let mut cover = base_cover;
        cover.extend(ctx.incumbent.iter().map(|&k| cand_index[k]));
        return CoverSolution {
            value: ctx.incumbent_value,
            cover,
            certificate: Certificate::GreedyUpperBound,
        };
    }

    let mut banned = vec![false; cand_mask.len()];
    let mut chosen = Vec::new();
    branch(&mut ctx, covered_mask, ExtReal::zero(), &mut chosen, &mut banned);

    let mut cover = base_cover;
    cover.extend(ctx.incumbent.iter().map(|&k| cand_index[k]));
    CoverSolution {
        value: ctx.incumbent_value,
        cover,
        certificate: Certificate::Exact,
    }
}

struct SolveCtx<'a> {
    masks: &'a [Mask],
    costs: &'a [ExtReal],
    n_points: usize,
    incumbent_value: ExtReal,
    incumbent: Vec<usize>,
}

/// Greedy completion from a partial cover: repeatedly take the candidate with
/// the best cost-per-newly-covered-point ratio.
fn greedy_complete(ctx: &SolveCtx<'_>, covered: &Mask) -> Option<(ExtReal, Vec<usize>)> {
    let mut covered = covered.clone();
    let mut total = ExtReal::zero();
    let mut picked = Vec::new();
    while !covered.is_full() {
        let mut best: Option<(usize, usize)> = None; // (candidate, newly covered)
        for k in 0..ctx.masks.len() {
            let new = ctx.masks[k].count_new(&covered);
            if new == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((bk, bnew)) => {
                    // cost_k / new_k < cost_b / new_b, cross-multiplied.
                    ctx.costs[k].mul(&ExtReal::from_int(bnew as u64))
                        < ctx.costs[bk].mul(&ExtReal::from_int(new as u64))
                }
            };
            if better {
                best = Some((k, new));
            }
        }
        let (k, _) = best?;
        covered.union_with(&ctx.masks[k]);
        total = total.add(&ctx.costs[k]);
        picked.push(k);
    }
    Some((total, picked))
}

/// Branch on the uncovered point with the fewest admissible candidates; for
/// each candidate covering it, include it and exclude the earlier siblings in
/// the subtree (each cover is enumerated once).
fn branch(
    ctx: &mut SolveCtx<'_>,
    covered: Mask,
    current: ExtReal,
    chosen: &mut Vec<usize>,
    banned: &mut Vec<bool>,
) {
    if covered.is_full() {
        if current < ctx.incumbent_value {
            ctx.incumbent_value = current;
            ctx.incumbent = chosen.clone();
        }
        return;
    }
    let bound = current.add(&fractional_bound(ctx, &covered, banned));
    if prunable(&bound, &ctx.incumbent_value) {
        return;
    }

    // Most constrained uncovered point.
    let mut branch_pos = None;
    let mut branch_cands: Vec<usize> = Vec::new();
    for pos in 0..ctx.n_points {
        if covered.contains(pos) {
            continue;
        }
        let cands: Vec<usize> = (0..ctx.masks.len())
            .filter(|&k| !banned[k] && ctx.masks[k].contains(pos))
            .collect();
        if branch_pos.is_none() || cands.len() < branch_cands.len() {
            branch_pos = Some(pos);
            branch_cands = cands;
        }
        if branch_cands.is_empty() {
            break;
        }
    }
    if branch_pos.is_none() || branch_cands.is_empty() {
        return; // infeasible branch
    }
    branch_cands.sort_by(|&a, &b| ctx.costs[a].cmp(&ctx.costs[b]));

    let mut newly_banned = Vec::new();
    for &k in &branch_cands {
        let next_cost = current.add(&ctx.costs[k]);
        if !prunable(&next_cost, &ctx.incumbent_value) {
            let mut next_covered = covered.clone();
            next_covered.union_with(&ctx.masks[k]);
            chosen.push(k);
            branch(ctx, next_covered, next_cost, chosen, banned);
            chosen.pop();
        }
        banned[k] = true;
        newly_banned.push(k);
    }
    for k in newly_banned {
        banned[k] = false;
    }
}

/// Fractional covering lower bound on completing a partial cover: each
/// uncovered point contributes the cheapest per-point rate among candidates
/// covering it; a chosen set of cost `z` covering `m` new points pays at
/// least `m` such rates, each at most `z/m`.
fn fractional_bound(ctx: &SolveCtx<'_>, covered: &Mask, banned: &[bool]) -> ExtReal {
    let mut bound = ExtReal::zero();
    for pos in 0..ctx.n_points {
        if covered.contains(pos) {
            continue;
        }
        let mut cheapest: Option<ExtReal> = None;
        for k in 0..ctx.masks.len() {
            if banned[k] || !ctx.masks[k].contains(pos) {
                continue;
            }
            let new = ctx.masks[k].count_new(covered);
            let rate = ctx.costs[k].div_positive(&ExtReal::from_int(new as u64));
            cheapest = Some(match cheapest {
                None => rate,
                Some(c) => c.min(rate),
            });
        }
        match cheapest {
            Some(c) => bound = bound.add(&c),
            None => return ExtReal::infinity(),
        }
    }
    bound
}

/// Prune when the bound cannot improve on the incumbent. Exact in rational
/// arithmetic; with floats a relative fuzz keeps rounding from discarding an
/// optimal branch (it may only explore slightly more).
fn prunable(bound: &ExtReal, incumbent: &ExtReal) -> bool {
    use crate::extreal::Backend;
    if incumbent.is_infinite() {
        return false;
    }
    match (bound.backend(), incumbent.backend()) {
        (Backend::Rational, Backend::Rational) => bound >= incumbent,
        _ => bound.to_f64() >= incumbent.to_f64() * (1.0 + 1e-12),
    }
}

/// The probe grid for the supremum over delta: one probe strictly below the
/// smallest positive member diameter, one between each consecutive pair, and
/// one above the largest. On a finite family the delta-restricted optimum is
/// a step function of delta with steps only at member diameters, so the grid
/// meets every step.
pub fn delta_probes(family: &GaugedFamily) -> Vec<ExtReal> {
    let diams = family.positive_diameters();
    if diams.is_empty() {
        return vec![ExtReal::one()];
    }
    let two = ExtReal::from_int(2);
    let mut probes = Vec::with_capacity(diams.len() + 1);
    probes.push(diams[0].div_positive(&two));
    for pair in diams.windows(2) {
        probes.push(pair[0].add(&pair[1]).div_positive(&two));
    }
    probes.push(diams[diams.len() - 1].add(&ExtReal::one()));
    probes
}

/// The approximating-value curve: `(delta, value)` over the probe grid,
/// ascending in delta.
pub fn measure_profile(family: &GaugedFamily, target: &PointSet) -> Vec<(ExtReal, ExtReal)> {
    delta_probes(family)
        .into_iter()
        .map(|delta| {
            let value = min_cover(family, &delta, target).value;
            (delta, value)
        })
        .collect()
}

/// The Carathéodory measure: supremum of the covering optimum over all
/// `delta > 0`, realized as the maximum over the probe grid.
pub fn caratheodory_measure(family: &GaugedFamily, target: &PointSet) -> ExtReal {
    measure_profile(family, target)
        .into_iter()
        .map(|(_, v)| v)
        .max()
        .unwrap_or_else(ExtReal::zero)
}

/// Hausdorff measure of `target`: the construction applied to the
/// diameter-power gauge over the given family of sets.
pub fn hausdorff_measure(
    space: &FiniteMetricSpace,
    alpha: Alpha,
    c_alpha: ExtReal,
    sets: Vec<PointSet>,
    target: &PointSet,
) -> Result<ExtReal, Error> {
    let gauge = Gauge::hausdorff(alpha, c_alpha)?;
    let family = GaugedFamily::from_sets(space, sets, &gauge)?;
    Ok(caratheodory_measure(&family, target))
}

/// Spherical measure of `target`: the construction applied to the
/// diameter-power gauge over the generated closed-ball family.
pub fn spherical_measure(
    space: &FiniteMetricSpace,
    alpha: Alpha,
    c_alpha: ExtReal,
    target: &PointSet,
) -> Result<ExtReal, Error> {
    let gauge = Gauge::spherical(alpha, c_alpha)?;
    let family = GaugedFamily::closed_balls(space, &gauge, None)?;
    Ok(caratheodory_measure(&family, target))
}

/// Fixed-width bitmask over target positions.
#[derive(Clone, PartialEq, Eq)]
struct Mask {
    words: Vec<u64>,
    len: usize,
}

impl Mask {
    fn empty(len: usize) -> Mask {
        Mask {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    fn is_full(&self) -> bool {
        self.words
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum::<usize>()
            == self.len
    }

    fn union_with(&mut self, other: &Mask) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    /// Count of points in `self` not yet in `covered`.
    fn count_new(&self, covered: &Mask) -> usize {
        self.words
            .iter()
            .zip(&covered.words)
            .map(|(w, c)| (w & !c).count_ones() as usize)
            .sum()
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.contains(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::line_space;

    /// Two points at distance 1 with explicit gauges {a}:2, {b}:3, {a,b}:4.
    fn two_point_family() -> (FiniteMetricSpace, GaugedFamily) {
        let space = line_space(vec!["a".into(), "b".into()], &[(0, 1), (1, 1)]).unwrap();
        let table = vec![
            (PointSet::singleton(0), ExtReal::from_int(2)),
            (PointSet::singleton(1), ExtReal::from_int(3)),
            (PointSet::full(2), ExtReal::from_int(4)),
        ];
        let family = GaugedFamily::from_table(&space, table).unwrap();
        (space, family)
    }

    #[test]
    fn two_point_cover_values() {
        let (_, family) = two_point_family();
        let all = PointSet::full(2);
        // delta = 1 admits the pair set: optimum 4.
        let sol = min_cover(&family, &ExtReal::one(), &all);
        assert_eq!(sol.value, ExtReal::from_int(4));
        assert_eq!(sol.certificate, Certificate::Exact);
        // delta = 1/2 leaves only singletons: 2 + 3.
        let sol = min_cover(&family, &ExtReal::ratio(1, 2), &all);
        assert_eq!(sol.value, ExtReal::from_int(5));
        assert_eq!(sol.cover.len(), 2);
    }

    #[test]
    fn empty_target_costs_nothing() {
        let (_, family) = two_point_family();
        let sol = min_cover(&family, &ExtReal::one(), &PointSet::empty());
        assert_eq!(sol.value, ExtReal::zero());
        assert!(sol.cover.is_empty());
    }

    #[test]
    fn infeasible_cover_is_infinite() {
        let space = line_space(vec!["a".into(), "b".into()], &[(0, 1), (1, 1)]).unwrap();
        let table = vec![(PointSet::singleton(0), ExtReal::from_int(2))];
        let family = GaugedFamily::from_table(&space, table).unwrap();
        let sol = min_cover(&family, &ExtReal::one(), &PointSet::full(2));
        assert_eq!(sol.value, ExtReal::infinity());
        assert!(sol.cover.is_empty());
    }

    #[test]
    fn infinite_gauge_sets_are_pruned() {
        let space = line_space(vec!["a".into(), "b".into()], &[(0, 1), (1, 1)]).unwrap();
        let table = vec![
            (PointSet::full(2), ExtReal::infinity()),
            (PointSet::singleton(0), ExtReal::one()),
            (PointSet::singleton(1), ExtReal::one()),
        ];
        let family = GaugedFamily::from_table(&space, table).unwrap();
        let sol = min_cover(&family, &ExtReal::one(), &PointSet::full(2));
        assert_eq!(sol.value, ExtReal::from_int(2));
        // With {b} missing, only the infinite-gauge set reaches b: the
        // optimum is infinite via the feasibility pre-pass.
        let table = vec![
            (PointSet::full(2), ExtReal::infinity()),
            (PointSet::singleton(0), ExtReal::one()),
        ];
        let family = GaugedFamily::from_table(&space, table).unwrap();
        let sol = min_cover(&family, &ExtReal::one(), &PointSet::full(2));
        assert_eq!(sol.value, ExtReal::infinity());
    }

    #[test]
    fn supremum_over_delta_on_two_points() {
        let (_, family) = two_point_family();
        let all = PointSet::full(2);
        assert_eq!(caratheodory_measure(&family, &all), ExtReal::from_int(5));
        let profile = measure_profile(&family, &all);
        assert_eq!(profile.len(), 2);
        assert_eq!(profile[0].1, ExtReal::from_int(5));
        assert_eq!(profile[1].1, ExtReal::from_int(4));
    }

    #[test]
    fn hausdorff_measure_vanishes_on_finite_sets() {
        // Two points, alpha = 1, family = all subsets: singleton covers are
        // free below the distance, so the measure is 0.
        let space = line_space(vec!["a".into(), "b".into()], &[(0, 1), (1, 1)]).unwrap();
        let sets = vec![
            PointSet::singleton(0),
            PointSet::singleton(1),
            PointSet::full(2),
        ];
        let value =
            hausdorff_measure(&space, Alpha::one(), ExtReal::one(), sets, &PointSet::full(2))
                .unwrap();
        assert_eq!(value, ExtReal::zero());
    }

    #[test]
    fn greedy_is_an_upper_bound() {
        let (_, family) = two_point_family();
        let all = PointSet::full(2);
        let g = greedy_cover(&family, &ExtReal::one(), &all);
        let e = min_cover(&family, &ExtReal::one(), &all);
        assert!(g.value >= e.value);
        assert_eq!(g.certificate, Certificate::GreedyUpperBound);
    }
}
