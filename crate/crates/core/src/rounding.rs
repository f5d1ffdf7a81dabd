//! Turning fractional edge values into edge sets.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use petgraph::unionfind::UnionFind;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::PointSet;
use crate::lp::{pairs, FractionalSolution};
use crate::num::{int, Rational};
use crate::range_space::{crossing_number, RangeSpace};

/// Retry budget of `round_until_reduced` used by the pipeline.
pub const DEFAULT_MAX_RETRIES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Randomized,
    DeterministicPlanar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeSet {
    /// Sorted pairs `(a, b)` with `a < b`.
    pub edges: Vec<(usize, usize)>,
    pub source: Source,
    pub seed: Option<u64>,
}

impl EdgeSet {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RoundingStats {
    pub components: usize,
    pub singletons: usize,
    pub crossing: usize,
    pub retries: usize,
}

impl RoundingStats {
    pub fn measure(n: usize, edges: &[(usize, usize)], space: &RangeSpace, retries: usize) -> Self {
        let mut degree = vec![0usize; n];
        for &(a, b) in edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        Self {
            components: component_count(n, edges),
            singletons: degree.iter().filter(|d| **d == 0).count(),
            crossing: crossing_number(edges, space),
            retries,
        }
    }
}

pub fn component_count(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut uf = UnionFind::<usize>::new(n);
    let mut count = n;
    for &(a, b) in edges {
        if uf.union(a, b) {
            count -= 1;
        }
    }
    count
}

/// Component label of every vertex: the smallest vertex in its component.
pub fn component_leaders(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut uf = UnionFind::<usize>::new(n);
    for &(a, b) in edges {
        uf.union(a, b);
    }
    let mut leader = vec![usize::MAX; n];
    for v in 0..n {
        let root = uf.find(v);
        leader[root] = leader[root].min(v);
    }
    (0..n).map(|v| leader[uf.find(v)]).collect()
}

/// Next seed in a retry chain (SplitMix64 finalizer).
pub fn next_seed(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn edge_values(sol: &FractionalSolution, n: usize) -> Result<&[Rational]> {
    let m = n * (n.saturating_sub(1)) / 2;
    sol.values
        .get(..m)
        .ok_or_else(|| Error::InvalidSolution(format!("expected {m} edge values, got {}", sol.values.len())))
}

/// `u < p` for `u` uniform on `[0, 1)` with 64-bit resolution, decided exactly.
fn draw_below(rng: &mut ChaCha8Rng, p: &Rational) -> bool {
    let r = BigInt::from(rng.next_u64());
    r * p.denom() < p.numer() << 64
}

/// Keeps each edge with probability `min(y, 1)`. Every pair consumes one
/// draw, in pair order, so the outcome depends only on `(sol, seed)`.
pub fn randomized_round(sol: &FractionalSolution, space: &RangeSpace, seed: u64) -> Result<EdgeSet> {
    let n = space.ground_size();
    let values = edge_values(sol, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for (pair, y) in pairs(n).into_iter().zip(values) {
        let keep = draw_below(&mut rng, y);
        if *y >= Rational::one() || (y.is_positive() && keep) {
            edges.push(pair);
        }
    }
    Ok(EdgeSet { edges, source: Source::Randomized, seed: Some(seed) })
}

/// Rounds with seeds `seed, next_seed(seed), ...` until the edge set leaves
/// at most `19n/20` components, giving up after `max_retries` repeats.
pub fn round_until_reduced(
    sol: &FractionalSolution,
    space: &RangeSpace,
    seed: u64,
    max_retries: usize,
) -> Result<(EdgeSet, RoundingStats)> {
    let n = space.ground_size();
    let mut current = seed;
    for retries in 0..=max_retries {
        let set = randomized_round(sol, space, current)?;
        let components = component_count(n, &set.edges);
        if 20 * components <= 19 * n {
            let stats = RoundingStats::measure(n, &set.edges, space, retries);
            return Ok((set, stats));
        }
        current = next_seed(current);
    }
    Err(Error::RetriesExhausted { attempts: max_retries + 1 })
}

/// Keeps every edge with `12 x >= 1` after checking that the support of `x`
/// has no two properly crossing segments.
pub fn deterministic_planar_round(sol: &FractionalSolution, points: &PointSet, space: &RangeSpace) -> Result<EdgeSet> {
    if points.dim() != 2 {
        return Err(Error::UnsupportedDimension(points.dim()));
    }
    let n = points.len();
    if space.ground_size() != n {
        return Err(Error::DimensionMismatch { expected: n, got: space.ground_size() });
    }
    let values = edge_values(sol, n)?;
    let support: Vec<(usize, usize)> =
        pairs(n).into_iter().zip(values).filter(|(_, x)| x.is_positive()).map(|(e, _)| e).collect();
    for (i, &(a, b)) in support.iter().enumerate() {
        for &(c, d) in &support[i + 1..] {
            if a != c && a != d && b != c && b != d && points.segments_cross(a, b, c, d) {
                return Err(Error::NonPlanarSupport((a, b), (c, d)));
            }
        }
    }
    let twelve = int(12);
    let edges = pairs(n).into_iter().zip(values).filter(|(_, x)| *x * &twelve >= Rational::one()).map(|(e, _)| e).collect();
    Ok(EdgeSet { edges, source: Source::DeterministicPlanar, seed: None })
}

/// Degrees in the support graph `{pq : x_pq > 0}`.
pub fn support_degrees(sol: &FractionalSolution, n: usize) -> Result<Vec<usize>> {
    let values = edge_values(sol, n)?;
    let mut degree = vec![0; n];
    for ((a, b), x) in pairs(n).into_iter().zip(values) {
        if !x.is_zero() {
            degree[a] += 1;
            degree[b] += 1;
        }
    }
    Ok(degree)
}
