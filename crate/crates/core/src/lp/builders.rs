use num_traits::{One, Zero};

use super::{solve, Constraint, LpInstance, Relation, RowName, Sense, Status, VarName};
use crate::error::{Error, Result};
use crate::geom::PointSet;
use crate::num::{int, sqrt_floor, Rational};
use crate::range_space::RangeSpace;

/// Fractional bits of the edge-length approximations.
pub const LENGTH_BITS: u32 = 60;

/// All pairs `a < b` in lexicographic order; edge variables use this order.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

/// Position of `(a, b)` in `pairs(n)`.
pub fn pair_index(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

fn need_two(space: &RangeSpace) -> Result<usize> {
    let n = space.ground_size();
    if n < 2 {
        return Err(Error::TooFewPoints { n, min: 2 });
    }
    Ok(n)
}

/// Edge indices crossing each range.
fn crossing_lists(space: &RangeSpace, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    space
        .ranges()
        .iter()
        .map(|r| edges.iter().enumerate().filter(|(_, &(a, b))| r.crossed_by(a, b)).map(|(e, _)| e).collect())
        .collect()
}

fn ones(idx: impl IntoIterator<Item = usize>) -> Vec<(usize, Rational)> {
    idx.into_iter().map(|j| (j, Rational::one())).collect()
}

/// Range rows `sum y <= t` (or `sum y - t <= 0` when `t` is a variable) and
/// cover rows `sum y >= 1`.
fn edge_rows(space: &RangeSpace, t: Option<&Rational>, t_var: Option<usize>) -> Vec<Constraint> {
    let n = space.ground_size();
    let edges = pairs(n);
    let mut rows = Vec::with_capacity(space.len() + n);
    for (r, list) in crossing_lists(space, &edges).into_iter().enumerate() {
        let mut coeffs = ones(list);
        if let Some(tv) = t_var {
            coeffs.push((tv, -Rational::one()));
        }
        rows.push(Constraint {
            name: RowName::Range(r),
            coeffs,
            relation: Relation::Le,
            rhs: t.cloned().unwrap_or_else(Rational::zero),
        });
    }
    for p in 0..n {
        let incident = (0..n).filter(|&q| q != p).map(|q| pair_index(n, p, q));
        let mut coeffs = ones(incident);
        coeffs.sort_by_key(|(j, _)| *j);
        rows.push(Constraint { name: RowName::Cover(p), coeffs, relation: Relation::Ge, rhs: Rational::one() });
    }
    rows
}

fn edge_vars(n: usize) -> Vec<VarName> {
    pairs(n).into_iter().map(|(a, b)| VarName::Edge(a, b)).collect()
}

/// `max sum y` subject to every range being crossed at most `t` times and
/// every point being covered.
pub fn build_primal(space: &RangeSpace, t: &Rational) -> Result<LpInstance> {
    let n = need_two(space)?;
    let vars = edge_vars(n);
    Ok(LpInstance {
        sense: Sense::Maximize,
        objective: vec![Rational::one(); vars.len()],
        rows: edge_rows(space, Some(t), None),
        vars,
    })
}

/// Euclidean edge lengths, rounded down to `LENGTH_BITS` fractional bits.
pub fn edge_lengths(points: &PointSet) -> Vec<Rational> {
    pairs(points.len()).into_iter().map(|(a, b)| sqrt_floor(&points.dist2(a, b), LENGTH_BITS)).collect()
}

/// Same feasible region as the primal, minimizing total edge length.
pub fn build_weighted_primal(space: &RangeSpace, t: &Rational) -> Result<LpInstance> {
    let points = space.points().ok_or(Error::NotGeometric)?;
    let n = need_two(space)?;
    Ok(LpInstance {
        sense: Sense::Minimize,
        objective: edge_lengths(points),
        rows: edge_rows(space, Some(t), None),
        vars: edge_vars(n),
    })
}

/// `min t sum z_l - sum z_p` subject to
/// `sum_{l crossed by pq} z_l - z_p - z_q >= 1` for every pair.
pub fn build_dual(space: &RangeSpace, t: &Rational) -> Result<LpInstance> {
    let n = need_two(space)?;
    let m = space.len();
    let mut vars: Vec<VarName> = (0..m).map(VarName::Range).collect();
    vars.extend((0..n).map(VarName::Point));
    let mut objective = vec![t.clone(); m];
    objective.extend(std::iter::repeat_n(-Rational::one(), n));
    let rows = pair_rows(space, true);
    Ok(LpInstance { sense: Sense::Minimize, objective, rows, vars })
}

/// `min sum z_l` subject to every pair being separated with weight 1.
pub fn build_separation(space: &RangeSpace) -> Result<LpInstance> {
    need_two(space)?;
    let m = space.len();
    Ok(LpInstance {
        sense: Sense::Minimize,
        objective: vec![Rational::one(); m],
        rows: pair_rows(space, false),
        vars: (0..m).map(VarName::Range).collect(),
    })
}

fn pair_rows(space: &RangeSpace, with_points: bool) -> Vec<Constraint> {
    let n = space.ground_size();
    let m = space.len();
    pairs(n)
        .into_iter()
        .map(|(a, b)| {
            let mut coeffs = ones((0..m).filter(|&l| space.ranges()[l].crossed_by(a, b)));
            if with_points {
                coeffs.push((m + a, -Rational::one()));
                coeffs.push((m + b, -Rational::one()));
            }
            Constraint { name: RowName::Pair(a, b), coeffs, relation: Relation::Ge, rhs: Rational::one() }
        })
        .collect()
}

/// The primal constraints with `t` as an extra variable, minimizing `t`.
pub fn build_threshold(space: &RangeSpace) -> Result<LpInstance> {
    let n = need_two(space)?;
    let mut vars = edge_vars(n);
    let tv = vars.len();
    vars.push(VarName::Threshold);
    let mut objective = vec![Rational::zero(); tv];
    objective.push(Rational::one());
    Ok(LpInstance { sense: Sense::Minimize, objective, rows: edge_rows(space, None, Some(tv)), vars })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Granularity {
    Integer,
    #[default]
    Exact,
}

/// Smallest `t` at which the primal is feasible: the exact fractional
/// threshold, or the least feasible integer in `[1, n]`.
pub fn min_feasible_t(space: &RangeSpace, granularity: Granularity) -> Result<Rational> {
    let n = need_two(space)?;
    match granularity {
        Granularity::Exact => {
            let sol = solve(&build_threshold(space)?);
            match sol.status {
                Status::Optimal => Ok(sol.objective),
                Status::Infeasible => Err(Error::Infeasible),
                Status::Unbounded => Err(Error::Unbounded),
            }
        }
        Granularity::Integer => {
            let (mut lo, mut hi) = (1i64, n as i64);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if solve(&build_primal(space, &int(mid))?).status == Status::Optimal {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            Ok(int(lo))
        }
    }
}
