//! Instance generators and continuum probes.
//!
//! Generators are deterministic functions of their spec and seed: fractal
//! truncations at fixed depth (triadic dust on the line, the triangular dust
//! in the plane), epsilon-net grids with a resolution floor, random metrics
//! by shortest-path completion, and singleton-complete explicit-gauge
//! instances for the area-formula corpus.
//!
//! Probes interrogate discretized continuum instances: local continuity of
//! the ball-diameter function, agreement of open and closed ball diameters,
//! and agreement of the closed-ball and open-ball density profiles.

use num::rational::BigRational;
use num::BigInt;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::density::Tau;
use crate::error::Error;
use crate::extreal::{Alpha, ExtReal};
use crate::family::GaugedFamily;
use crate::gauge::Gauge;
use crate::instance::MetricInstance;
use crate::measure::AtomicMeasure;
use crate::metric::{FiniteMetricSpace, PointSet};

/// Continuum region an epsilon-net discretizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    UnitInterval,
    UnitSquare,
}

/// What to generate. Optional fields fall back to the natural defaults of
/// each kind (dimension exponents, unit scaling constant, uniform measure).
#[derive(Debug, Clone)]
pub enum GeneratorSpec {
    /// Triadic-dust truncation: representatives of the 2^depth construction
    /// intervals, with every construction interval of depth at most `depth`
    /// as the covering family. The gauge is an explicit table computed from
    /// the true interval diameters `3^-k`, not the representative spread.
    Cantor {
        depth: u32,
        alpha: Option<f64>,
        c_alpha: Option<f64>,
    },
    /// Triangular-dust truncation: centroids of the 3^depth construction
    /// cells, with cells of depth at most `depth` as the family and an
    /// explicit table from the true cell diameters `2^-k`.
    Sierpinski {
        depth: u32,
        alpha: Option<f64>,
        c_alpha: Option<f64>,
    },
    /// Grid discretization of a region at spacing `1/k`, carrying the
    /// resolution floor, a uniform unit-mass measure, and the generated
    /// closed-ball family capped at `cap_multiplier * h` in diameter.
    EpsilonNet {
        region: Region,
        k: u32,
        cap_multiplier: Option<u32>,
    },
    /// Random symmetric integer matrix, made metric by shortest-path
    /// completion; family of all subsets under a unit diameter-power gauge.
    RandomMetric { n: usize, seed: u64 },
    /// All singletons with random positive explicit gauges, a few random
    /// extra sets, and the full set; random positive masses.
    SingletonComplete { n: usize, seed: u64 },
}

/// Deterministic instance generation.
pub fn generate(spec: &GeneratorSpec) -> Result<MetricInstance, Error> {
    match spec {
        GeneratorSpec::Cantor {
            depth,
            alpha,
            c_alpha,
        } => cantor(*depth, *alpha, c_alpha.unwrap_or(1.0)),
        GeneratorSpec::Sierpinski {
            depth,
            alpha,
            c_alpha,
        } => sierpinski(*depth, *alpha, c_alpha.unwrap_or(1.0)),
        GeneratorSpec::EpsilonNet {
            region,
            k,
            cap_multiplier,
        } => epsilon_net(*region, *k, cap_multiplier.unwrap_or(4)),
        GeneratorSpec::RandomMetric { n, seed } => random_metric(*n, *seed),
        GeneratorSpec::SingletonComplete { n, seed } => {
            singleton_complete(*n, *seed, &SingletonCompleteOptions::default())
        }
    }
}

/// The similarity dimension of the triadic dust, `ln 2 / ln 3`.
pub fn cantor_dimension() -> f64 {
    2f64.ln() / 3f64.ln()
}

/// The similarity dimension of the triangular dust, `ln 3 / ln 2`.
pub fn sierpinski_dimension() -> f64 {
    3f64.ln() / 2f64.ln()
}

pub fn cantor(depth: u32, alpha: Option<f64>, c_alpha: f64) -> Result<MetricInstance, Error> {
    if depth > 10 {
        return Err(Error::InvalidSpec(format!(
            "cantor depth {depth} too large (max 10)"
        )));
    }
    let alpha = alpha.unwrap_or_else(cantor_dimension);
    if !(alpha > 0.0) {
        return Err(Error::InvalidSpec("alpha must be positive".into()));
    }
    // Construction intervals as (depth k, left numerator over 3^k); children
    // of l are 3l and 3l + 2.
    let mut levels: Vec<Vec<i64>> = vec![vec![0]];
    for _ in 0..depth {
        let next = levels
            .last()
            .unwrap()
            .iter()
            .flat_map(|&l| [3 * l, 3 * l + 2])
            .collect();
        levels.push(next);
    }
    let leaves = &levels[depth as usize];
    let three_pow_d: i64 = 3i64.pow(depth);
    // Representative of a leaf interval [l, l+1]/3^d is its midpoint.
    let positions: Vec<(i64, i64)> = leaves
        .iter()
        .map(|&l| (2 * l + 1, 2 * three_pow_d))
        .collect();
    let ids: Vec<String> = (0..positions.len()).map(|i| format!("p{i}")).collect();
    let space = crate::metric::line_space(ids, &positions)?;

    // Family: every construction interval of depth k <= depth, as the set of
    // representatives it contains; gauge from the true diameter 3^-k.
    let mut table = Vec::new();
    for (k, level) in levels.iter().enumerate() {
        let three_pow_k: i64 = 3i64.pow(k as u32);
        let zeta = interval_gauge(3, k as u32, alpha, c_alpha);
        for &l in level {
            // Leaves below (k, l): representatives with l/3^k <= pos <= (l+1)/3^k.
            let members: Vec<usize> = positions
                .iter()
                .enumerate()
                .filter(|(_, &(num, den))| {
                    // num/den in [l/3^k, (l+1)/3^k]  <=>  l*den <= num*3^k <= (l+1)*den
                    let lhs = l as i128 * den as i128;
                    let mid = num as i128 * three_pow_k as i128;
                    let rhs = (l + 1) as i128 * den as i128;
                    lhs <= mid && mid <= rhs
                })
                .map(|(i, _)| i)
                .collect();
            table.push((PointSet::new(members), zeta.clone()));
        }
    }
    let family = GaugedFamily::from_table(&space, table.clone())?;
    let gauge = Gauge::explicit(table.into_iter().collect());

    let n = space.len();
    let measure = AtomicMeasure::uniform(n, ExtReal::one());
    Ok(MetricInstance {
        space,
        family,
        gauge,
        measure,
        tau: Tau::default(),
        resolution: None,
    })
}

pub fn sierpinski(depth: u32, alpha: Option<f64>, c_alpha: f64) -> Result<MetricInstance, Error> {
    if depth > 6 {
        return Err(Error::InvalidSpec(format!(
            "sierpinski depth {depth} too large (max 6)"
        )));
    }
    let alpha = alpha.unwrap_or_else(sierpinski_dimension);
    if !(alpha > 0.0) {
        return Err(Error::InvalidSpec("alpha must be positive".into()));
    }
    // Cells are (origin, scale); children shift by the three scaled vertices.
    let h = 3f64.sqrt() / 2.0;
    let vertices = [(0.0, 0.0), (1.0, 0.0), (0.5, h)];
    #[derive(Clone)]
    struct Cell {
        origin: (f64, f64),
        k: u32,
        leaf_range: (usize, usize),
    }
    // Depth-first generation so each cell covers a contiguous leaf range.
    let mut cells_by_level: Vec<Vec<Cell>> = vec![Vec::new(); depth as usize + 1];
    let mut leaf_centroids: Vec<(f64, f64)> = Vec::new();
    fn build(
        origin: (f64, f64),
        k: u32,
        depth: u32,
        vertices: &[(f64, f64); 3],
        cells_by_level: &mut [Vec<Cell>],
        leaves: &mut Vec<(f64, f64)>,
    ) -> (usize, usize) {
        if k == depth {
            let scale = 0.5f64.powi(k as i32);
            let cx = origin.0 + scale * (vertices[0].0 + vertices[1].0 + vertices[2].0) / 3.0;
            let cy = origin.1 + scale * (vertices[0].1 + vertices[1].1 + vertices[2].1) / 3.0;
            let idx = leaves.len();
            leaves.push((cx, cy));
            let range = (idx, idx + 1);
            cells_by_level[k as usize].push(Cell {
                origin,
                k,
                leaf_range: range,
            });
            return range;
        }
        let child_scale = 0.5f64.powi(k as i32 + 1);
        let mut lo = usize::MAX;
        let mut hi = 0;
        for v in vertices {
            let child_origin = (origin.0 + child_scale * v.0, origin.1 + child_scale * v.1);
            let (a, b) = build(child_origin, k + 1, depth, vertices, cells_by_level, leaves);
            lo = lo.min(a);
            hi = hi.max(b);
        }
        cells_by_level[k as usize].push(Cell {
            origin,
            k,
            leaf_range: (lo, hi),
        });
        (lo, hi)
    }
    build(
        (0.0, 0.0),
        0,
        depth,
        &vertices,
        &mut cells_by_level,
        &mut leaf_centroids,
    );

    let ids: Vec<String> = (0..leaf_centroids.len()).map(|i| format!("p{i}")).collect();
    let coords: Vec<Vec<f64>> = leaf_centroids.iter().map(|&(x, y)| vec![x, y]).collect();
    let space = FiniteMetricSpace::euclidean(ids, coords)?;

    let mut table = Vec::new();
    for level in &cells_by_level {
        for cell in level {
            let members: Vec<usize> = (cell.leaf_range.0..cell.leaf_range.1).collect();
            let zeta = interval_gauge(2, cell.k, alpha, c_alpha);
            table.push((PointSet::new(members), zeta));
            let _ = cell.origin;
        }
    }
    let family = GaugedFamily::from_table(&space, table.clone())?;
    let gauge = Gauge::explicit(table.into_iter().collect());
    let n = space.len();
    let measure = AtomicMeasure::uniform(n, ExtReal::one());
    Ok(MetricInstance {
        space,
        family,
        gauge,
        measure,
        tau: Tau::default(),
        resolution: None,
    })
}

/// `c * (base^-k)^alpha` as a gauge value; exact when alpha is effectively an
/// integer, float otherwise.
fn interval_gauge(base: u32, k: u32, alpha: f64, c_alpha: f64) -> ExtReal {
    let diam = (base as f64).powi(-(k as i32));
    ExtReal::from_f64(c_alpha * diam.powf(alpha)).expect("positive gauge value")
}

pub fn epsilon_net(region: Region, k: u32, cap_multiplier: u32) -> Result<MetricInstance, Error> {
    if k == 0 {
        return Err(Error::InvalidSpec("grid refinement k must be positive".into()));
    }
    let max_points = 5000usize;
    let (ids, coords): (Vec<String>, Vec<Vec<f64>>) = match region {
        Region::UnitInterval => (0..=k)
            .map(|i| (format!("g{i}"), vec![i as f64 / k as f64]))
            .unzip(),
        Region::UnitSquare => {
            let mut ids = Vec::new();
            let mut coords = Vec::new();
            for i in 0..=k {
                for j in 0..=k {
                    ids.push(format!("g{i}_{j}"));
                    coords.push(vec![i as f64 / k as f64, j as f64 / k as f64]);
                }
            }
            (ids, coords)
        }
    };
    if ids.len() > max_points {
        return Err(Error::InvalidSpec(format!(
            "epsilon-net with {} points exceeds the {max_points}-point cap",
            ids.len()
        )));
    }
    let space = FiniteMetricSpace::euclidean(ids, coords)?;
    let h = ExtReal::ratio(1, k as i64);
    let alpha = match region {
        Region::UnitInterval => Alpha::from_f64(1.0)?,
        Region::UnitSquare => Alpha::from_f64(2.0)?,
    };
    let gauge = Gauge::spherical(alpha, ExtReal::one())?;
    let cap = h.mul(&ExtReal::from_int(cap_multiplier as u64));
    let family = GaugedFamily::closed_balls(&space, &gauge, Some(&cap))?;
    let n = space.len();
    let measure = AtomicMeasure::uniform(n, ExtReal::one());
    Ok(MetricInstance {
        space,
        family,
        gauge,
        measure,
        tau: Tau::default(),
        resolution: Some(h),
    })
}

pub fn random_metric(n: usize, seed: u64) -> Result<MetricInstance, Error> {
    if n == 0 || n > 64 {
        return Err(Error::InvalidSpec(format!(
            "random metric size {n} out of range 1..=64"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = random_space(n, &mut rng)?;
    let gauge = Gauge::hausdorff(Alpha::one(), ExtReal::one())?;
    let family = if n <= 8 {
        GaugedFamily::all_subsets(&space, &gauge)?
    } else {
        GaugedFamily::closed_balls(&space, &gauge, None)?
    };
    let measure = AtomicMeasure::uniform(n, ExtReal::from_int(n as u64));
    Ok(MetricInstance {
        space,
        family,
        gauge,
        measure,
        tau: Tau::default(),
        resolution: None,
    })
}

/// Random exact-rational metric by min-plus closure of a symmetric positive
/// integer matrix (quarters, so values stay small rationals).
fn random_space(n: usize, rng: &mut ChaCha8Rng) -> Result<FiniteMetricSpace, Error> {
    let quarter = |q: i64| ExtReal::ratio(q, 4);
    let mut d = vec![vec![ExtReal::zero(); n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = quarter(rng.gen_range(4..=40));
            d[i][j] = v.clone();
            d[j][i] = v;
        }
    }
    // Shortest-path completion enforces the triangle inequality.
    for via in 0..n {
        for i in 0..n {
            for j in 0..n {
                let through = d[i][via].add(&d[via][j]);
                if i != j && through < d[i][j] {
                    d[i][j] = through;
                }
            }
        }
    }
    let ids = (0..n).map(|i| format!("p{i}")).collect();
    FiniteMetricSpace::from_matrix(ids, d)
}

/// Knobs for the singleton-complete corpus.
#[derive(Debug, Clone, Default)]
pub struct SingletonCompleteOptions {
    /// Remove the singleton of one positive-mass point from the family; the
    /// filtered relation is then not fine at that point.
    pub mask_atom: bool,
    /// Give the last point infinite mass (callers typically keep it out of
    /// the domain under study).
    pub infinite_mass_last: bool,
}

pub fn singleton_complete(
    n: usize,
    seed: u64,
    options: &SingletonCompleteOptions,
) -> Result<MetricInstance, Error> {
    if n == 0 || n > 32 {
        return Err(Error::InvalidSpec(format!(
            "singleton-complete size {n} out of range 1..=32"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x5eed));
    let space = random_space(n, &mut rng)?;
    let quarter = |q: i64| ExtReal::ratio(q, 4);

    let mut table: Vec<(PointSet, ExtReal)> = Vec::new();
    let masked = if options.mask_atom {
        Some(rng.gen_range(0..n))
    } else {
        None
    };
    for p in 0..n {
        if Some(p) == masked {
            continue;
        }
        table.push((PointSet::singleton(p), quarter(rng.gen_range(1..=16))));
    }
    // A few random extras plus the full set, so enlargements always have a
    // containing family member.
    let n_extras = rng.gen_range(1..=3);
    for _ in 0..n_extras {
        if n < 2 {
            break;
        }
        let size = rng.gen_range(2..=n);
        let mut members: Vec<usize> = (0..n).collect();
        members.shuffle(&mut rng);
        members.truncate(size);
        let set = PointSet::new(members);
        if table.iter().any(|(s, _)| *s == set) {
            continue;
        }
        table.push((set, quarter(rng.gen_range(2..=24))));
    }
    let full = PointSet::full(n);
    if !table.iter().any(|(s, _)| *s == full) {
        table.push((full, quarter(rng.gen_range(4..=32))));
    }

    let family = GaugedFamily::from_table(&space, table.clone())?;
    let gauge = Gauge::explicit(table.into_iter().collect());
    let mut masses: Vec<ExtReal> = (0..n).map(|_| quarter(rng.gen_range(1..=16))).collect();
    if options.infinite_mass_last {
        masses[n - 1] = ExtReal::infinity();
    }
    let measure = AtomicMeasure::atomic(masses);
    Ok(MetricInstance {
        space,
        family,
        gauge,
        measure,
        tau: Tau::default(),
        resolution: None,
    })
}

/// Enumerate distinct balls containing `x` with positive diameter at most
/// `max_diam`, working in doubles directly from the space (no materialized
/// family). Returns `(member set, diameter)` pairs.
pub fn balls_at_point(
    space: &FiniteMetricSpace,
    x: usize,
    closed: bool,
    max_diam: f64,
) -> Vec<(PointSet, f64)> {
    let n = space.len();
    let mut seen: Vec<PointSet> = Vec::new();
    let mut result = Vec::new();
    for c in 0..n {
        let to_x = space.dist_f64(c, x);
        if to_x > max_diam {
            // A ball containing both its center and x has diameter >= d(c,x).
            continue;
        }
        let mut radii: Vec<f64> = (0..n)
            .filter(|&j| j != c)
            .map(|j| space.dist_f64(c, j))
            .filter(|&r| if closed { r >= to_x } else { r > to_x })
            .collect();
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        radii.dedup();
        for r in radii {
            let members: Vec<usize> = (0..n)
                .filter(|&j| {
                    let d = space.dist_f64(c, j);
                    if closed {
                        d <= r
                    } else {
                        d < r
                    }
                })
                .collect();
            let set = PointSet::new(members);
            if !set.contains(x) || set.len() < 2 {
                continue;
            }
            let diam = diameter_f64(space, &set);
            if diam > max_diam {
                break;
            }
            if diam == 0.0 {
                continue;
            }
            if seen.contains(&set) {
                continue;
            }
            seen.push(set.clone());
            result.push((set, diam));
        }
    }
    result
}

fn diameter_f64(space: &FiniteMetricSpace, set: &PointSet) -> f64 {
    let members = set.as_slice();
    let mut best = 0f64;
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            best = best.max(space.dist_f64(i, j));
        }
    }
    best
}

/// Continuity probe for `r -> diam(open_ball(y, r))` near a point.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RegularityReport {
    pub center: String,
    /// Radius of the neighborhood whose points were probed.
    pub r_x: f64,
    pub probed_points: usize,
    /// Largest diameter jump between consecutive probe radii.
    pub max_jump: f64,
    /// Grid-induced slack `4h`: a Euclidean ball sampled on an h-grid
    /// deviates from the continuum by at most 2h per endpoint.
    pub slack: f64,
    /// Largest probe radius before the first violating jump, per the worst
    /// probed point; `None` when the very first step already violates.
    pub delta_x: Option<f64>,
    pub consistent: bool,
}

pub fn diametric_regularity_probe(
    instance: &MetricInstance,
    x: usize,
    radii: &[f64],
) -> Result<RegularityReport, Error> {
    let h = require_resolution(instance)?;
    instance.space.check_index(x)?;
    if radii.len() < 2 {
        return Err(Error::InvalidParameter(
            "regularity probe needs at least two radii".into(),
        ));
    }
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if radii[0] < h {
        return Err(Error::ResolutionTooCoarse(format!(
            "probe radius {} below the resolution floor {h}",
            radii[0]
        )));
    }
    let space = &instance.space;
    let r_x = radii[radii.len() - 1];
    let slack = 4.0 * h;
    let probed: Vec<usize> = (0..space.len())
        .filter(|&y| space.dist_f64(x, y) < r_x)
        .collect();
    let mut max_jump = 0f64;
    let mut delta_x: Option<f64> = Some(r_x);
    for &y in &probed {
        let diams: Vec<f64> = radii
            .iter()
            .map(|&r| {
                let members: Vec<usize> = (0..space.len())
                    .filter(|&j| space.dist_f64(y, j) < r)
                    .collect();
                diameter_f64(space, &PointSet::new(members))
            })
            .collect();
        for w in 0..diams.len() - 1 {
            let jump = (diams[w + 1] - diams[w]).abs();
            max_jump = max_jump.max(jump);
            if jump > slack {
                let bound = radii[w];
                delta_x = match delta_x {
                    None => None,
                    Some(d) if bound < d => {
                        if w == 0 {
                            None
                        } else {
                            Some(bound)
                        }
                    }
                    keep => keep,
                };
            }
        }
    }
    let consistent = max_jump <= slack;
    Ok(RegularityReport {
        center: space.id(x).to_string(),
        r_x,
        probed_points: probed.len(),
        max_jump,
        slack,
        delta_x,
        consistent,
    })
}

/// One open/closed diameter comparison.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DiameterPair {
    pub center: String,
    pub radius: f64,
    pub open_diameter: f64,
    pub closed_diameter: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct BallDiameterReport {
    pub slack: f64,
    pub regularity_consistent: bool,
    pub comparisons: Vec<DiameterPair>,
    /// Pairs differing by more than the slack. On a regularity-consistent
    /// instance any entry here contradicts the open/closed diameter equality;
    /// on an inconsistent instance they witness why the hypothesis matters.
    pub exceeding: Vec<DiameterPair>,
    pub equality_violated: bool,
}

pub fn ball_diameter_probe(
    instance: &MetricInstance,
    x: usize,
    radii: &[f64],
) -> Result<BallDiameterReport, Error> {
    let h = require_resolution(instance)?;
    let regularity = diametric_regularity_probe(instance, x, radii)?;
    let slack = 4.0 * h;
    let space = &instance.space;
    let r_max = radii.iter().cloned().fold(0f64, f64::max);
    let near: Vec<usize> = (0..space.len())
        .filter(|&y| space.dist_f64(x, y) < r_max)
        .collect();
    let mut comparisons = Vec::new();
    let mut exceeding = Vec::new();
    for &y in &near {
        for &r in radii {
            let open: Vec<usize> = (0..space.len())
                .filter(|&j| space.dist_f64(y, j) < r)
                .collect();
            let closed: Vec<usize> = (0..space.len())
                .filter(|&j| space.dist_f64(y, j) <= r)
                .collect();
            let open_diameter = diameter_f64(space, &PointSet::new(open));
            let closed_diameter = diameter_f64(space, &PointSet::new(closed));
            let pair = DiameterPair {
                center: space.id(y).to_string(),
                radius: r,
                open_diameter,
                closed_diameter,
                difference: (closed_diameter - open_diameter).abs(),
            };
            if pair.difference > slack {
                exceeding.push(pair.clone());
            }
            comparisons.push(pair);
        }
    }
    Ok(BallDiameterReport {
        slack,
        regularity_consistent: regularity.consistent,
        equality_violated: regularity.consistent && !exceeding.is_empty(),
        comparisons,
        exceeding,
    })
}

/// Per-point agreement of the closed-ball and open-ball density profiles at
/// the finest scale where both families have a positive-diameter set.
#[derive(Debug, Clone, serde::Serialize)]
pub struct DensityComparison {
    pub point: String,
    pub scale: f64,
    pub closed_value: f64,
    pub open_value: f64,
    pub relative_gap: f64,
}

/// Compare the two spherical density profiles at each probe point, over the
/// positive-diameter ball families (which are their own filtration). The
/// scale cap bounds the enumerated ball diameters.
pub fn spherical_density_comparison(
    instance: &MetricInstance,
    probes: &[usize],
    alpha: f64,
    scale_cap: Option<f64>,
) -> Result<Vec<DensityComparison>, Error> {
    let h = require_resolution(instance)?;
    let cap = scale_cap.unwrap_or(6.0 * h);
    let space = &instance.space;
    let mut out = Vec::new();
    for &x in probes {
        space.check_index(x)?;
        let closed = balls_at_point(space, x, true, cap);
        let open = balls_at_point(space, x, false, cap);
        // Fineness at resolution for ball families: the smallest positive
        // ball diameter on an h-grid is 2h (the singleton balls carry
        // diameter zero and are excluded here).
        let fine_floor = 2.0 * h + 1e-12;
        let min_closed = closed.iter().map(|(_, d)| *d).fold(f64::INFINITY, f64::min);
        let min_open = open.iter().map(|(_, d)| *d).fold(f64::INFINITY, f64::min);
        if min_closed > fine_floor {
            return Err(Error::NotFine {
                point: space.id(x).to_string(),
                semantics: format!("at-resolution({h}), closed-ball family, floor 2h"),
            });
        }
        if min_open > fine_floor {
            return Err(Error::NotFine {
                point: space.id(x).to_string(),
                semantics: format!("at-resolution({h}), open-ball family, floor 2h"),
            });
        }
        let scale = min_closed.max(min_open);
        let value_at = |balls: &[(PointSet, f64)]| -> f64 {
            balls
                .iter()
                .filter(|(_, d)| *d <= scale + 1e-12)
                .map(|(set, d)| {
                    let mu = instance.measure.eval(set).to_f64();
                    mu / d.powf(alpha)
                })
                .fold(0f64, f64::max)
        };
        let closed_value = value_at(&closed);
        let open_value = value_at(&open);
        let relative_gap =
            (closed_value - open_value).abs() / 1f64.max(closed_value.abs()).max(open_value.abs());
        out.push(DensityComparison {
            point: space.id(x).to_string(),
            scale,
            closed_value,
            open_value,
            relative_gap,
        });
    }
    Ok(out)
}

fn require_resolution(instance: &MetricInstance) -> Result<f64, Error> {
    match &instance.resolution {
        Some(h) => Ok(h.to_f64()),
        None => Err(Error::InvalidParameter(
            "probe requires an epsilon-net instance with a resolution floor".into(),
        )),
    }
}

// Exactness helper for tests: 2^d as a rational.
#[allow(dead_code)]
fn pow2_rational(d: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(2).pow(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover;

    #[test]
    fn cantor_depth_one_counts() {
        let inst = cantor(1, None, 1.0).unwrap();
        assert_eq!(inst.space.len(), 2);
        // Depth 0 and depth 1 construction intervals: 1 + 2.
        assert_eq!(inst.family.len(), 3);
    }

    #[test]
    fn cantor_uniform_covers_have_unit_gauge_sum() {
        let inst = cantor(4, None, 1.0).unwrap();
        // 31 construction intervals at depths 0..=4.
        assert_eq!(inst.family.len(), 31);
        for k in 0..=4u32 {
            let sum: f64 = inst
                .family
                .iter()
                .filter(|m| m.set.len() == 1 << (4 - k))
                .map(|m| m.zeta.to_f64())
                .sum();
            assert!(
                (sum - 1.0).abs() < 1e-12,
                "depth {k} cover sums to {sum}"
            );
        }
    }

    #[test]
    fn cantor_measure_is_one_at_every_probe() {
        let inst = cantor(3, None, 1.0).unwrap();
        let all = PointSet::full(inst.space.len());
        for (_, value) in cover::measure_profile(&inst.family, &all) {
            assert!((value.to_f64() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sierpinski_counts_and_cover_sums() {
        let inst = sierpinski(3, None, 1.0).unwrap();
        assert_eq!(inst.space.len(), 27);
        assert_eq!(inst.family.len(), 1 + 3 + 9 + 27);
        for k in 0..=3u32 {
            let sum: f64 = inst
                .family
                .iter()
                .filter(|m| m.set.len() == 3usize.pow(3 - k))
                .map(|m| m.zeta.to_f64())
                .sum();
            assert!((sum - 1.0).abs() < 1e-12, "depth {k} cover sums to {sum}");
        }
    }

    #[test]
    fn epsilon_net_grid_counts() {
        let inst = epsilon_net(Region::UnitInterval, 4, 4).unwrap();
        assert_eq!(inst.space.len(), 5);
        assert!(inst.resolution.is_some());
        let inst = epsilon_net(Region::UnitSquare, 4, 4).unwrap();
        assert_eq!(inst.space.len(), 25);
    }

    #[test]
    fn random_metric_passes_invariants() {
        // Construction of FiniteMetricSpace validates the axioms; surviving
        // construction is the test.
        for seed in 0..10 {
            let inst = random_metric(6, seed).unwrap();
            assert_eq!(inst.space.len(), 6);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let a = singleton_complete(5, 42, &SingletonCompleteOptions::default()).unwrap();
        let b = singleton_complete(5, 42, &SingletonCompleteOptions::default()).unwrap();
        assert_eq!(a.to_json_string().unwrap(), b.to_json_string().unwrap());
        let c = singleton_complete(5, 43, &SingletonCompleteOptions::default()).unwrap();
        assert_ne!(a.to_json_string().unwrap(), c.to_json_string().unwrap());
    }

    #[test]
    fn masked_atom_removes_singleton() {
        let opts = SingletonCompleteOptions {
            mask_atom: true,
            ..Default::default()
        };
        let inst = singleton_complete(5, 7, &opts).unwrap();
        let singles = inst.family.iter().filter(|m| m.set.len() == 1).count();
        assert_eq!(singles, 4);
    }

    #[test]
    fn regularity_probe_on_interval_grid() {
        let inst = epsilon_net(Region::UnitInterval, 16, 4).unwrap();
        let x = inst.space.index_of("g8").unwrap();
        let h = 1.0 / 16.0;
        let radii: Vec<f64> = (1..=6).map(|i| i as f64 * h).collect();
        let report = diametric_regularity_probe(&inst, x, &radii).unwrap();
        assert!(report.consistent, "max jump {}", report.max_jump);
    }

    #[test]
    fn regularity_probe_flags_two_cluster_gap() {
        // Two clusters on the line separated by a gap much larger than 4h.
        let positions: Vec<(i64, i64)> = (0..4)
            .map(|i| (i, 16))
            .chain((0..4).map(|i| (i + 32, 16)))
            .collect();
        let ids = (0..8).map(|i| format!("p{i}")).collect();
        let space = crate::metric::line_space(ids, &positions).unwrap();
        let gauge = Gauge::hausdorff(Alpha::one(), ExtReal::one()).unwrap();
        let family = GaugedFamily::closed_balls(&space, &gauge, None).unwrap();
        let instance = MetricInstance {
            space,
            family,
            gauge,
            measure: AtomicMeasure::uniform(8, ExtReal::one()),
            tau: Tau::default(),
            resolution: Some(ExtReal::ratio(1, 16)),
        };
        let radii: Vec<f64> = (1..=40).map(|i| i as f64 / 16.0).collect();
        let report = diametric_regularity_probe(&instance, 0, &radii).unwrap();
        assert!(!report.consistent);
        assert!(report.max_jump > 4.0 / 16.0);
    }

    #[test]
    fn ball_diameter_probe_on_grid_is_clean() {
        let inst = epsilon_net(Region::UnitInterval, 16, 4).unwrap();
        let x = inst.space.index_of("g8").unwrap();
        let h = 1.0 / 16.0;
        // Radii off the realized distance spectrum: exact open/closed equality.
        let radii: Vec<f64> = (1..=5).map(|i| i as f64 * h + h / 3.0).collect();
        let report = ball_diameter_probe(&inst, x, &radii).unwrap();
        assert!(report.regularity_consistent);
        assert!(!report.equality_violated);
        assert!(report
            .comparisons
            .iter()
            .all(|p| p.difference == 0.0));
    }

    #[test]
    fn zero_one_metric_shows_open_closed_divergence() {
        // Discrete 0-1 metric: at radius exactly 1 the closed ball is the
        // whole space while the open ball is a point.
        let n = 5;
        let ids = (0..n).map(|i| format!("p{i}")).collect();
        let one = ExtReal::one();
        let mut d = vec![vec![ExtReal::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    d[i][j] = one.clone();
                }
            }
        }
        let space = FiniteMetricSpace::from_matrix(ids, d).unwrap();
        let gauge = Gauge::hausdorff(Alpha::one(), ExtReal::one()).unwrap();
        let family = GaugedFamily::closed_balls(&space, &gauge, None).unwrap();
        let instance = MetricInstance {
            space,
            family,
            gauge,
            measure: AtomicMeasure::uniform(n, ExtReal::one()),
            tau: Tau::default(),
            resolution: Some(ExtReal::ratio(1, 10)),
        };
        let report = ball_diameter_probe(&instance, 0, &[0.5, 1.0, 1.5]).unwrap();
        // The jump just past radius 1 breaks regularity, and the open/closed
        // difference at radius 1 exceeds the slack: the equality fails
        // exactly where its hypothesis does.
        assert!(!report.regularity_consistent);
        assert!(!report.exceeding.is_empty());
        assert!(!report.equality_violated);
    }

    #[test]
    fn density_profiles_agree_on_uniform_interval_grid() {
        let inst = epsilon_net(Region::UnitInterval, 32, 6).unwrap();
        let probes: Vec<usize> = vec![0, 7, 16, 31];
        let out = spherical_density_comparison(&inst, &probes, 1.0, None).unwrap();
        for cmp in out {
            assert!(
                cmp.relative_gap <= 1e-6,
                "gap {} at {}",
                cmp.relative_gap,
                cmp.point
            );
        }
    }

    #[test]
    fn comparison_on_empty_probe_set_is_empty() {
        let inst = epsilon_net(Region::UnitInterval, 8, 4).unwrap();
        let out = spherical_density_comparison(&inst, &[], 1.0, None).unwrap();
        assert!(out.is_empty());
    }
}
