//! Brute-force oracles and certificate checks.
//!
//! Nothing here reuses the pipeline's code paths: the oracle enumerates trees
//! through Prüfer sequences and counts crossings on its own bitmasks.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geom::{crossing_disk_size, side_of, HalfCount, Hyperplane, Point, PointSet, Side};
use crate::lp::{build_dual, build_primal, build_separation, min_feasible_t, solve, FractionalSolution, Granularity, Status};
use crate::num::{at_least_half_sqrt, fmt_rational, Rational};
use crate::pipeline::{Run, SpanningTree};
use crate::range_space::{canonical_ranges, RangeSpace};

/// Largest ground set the oracle accepts (`8^6 = 262144` trees).
pub const ORACLE_LIMIT: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub t_opt: usize,
    pub witness: SpanningTree,
    pub examined: u64,
}

/// Decodes a Prüfer sequence over `0..n` into its tree's edges.
fn prufer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf exists");
        edges.push((leaf.min(v), leaf.max(v)));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn tree_crossing(edges: &[(usize, usize)], masks: &[u64]) -> usize {
    masks
        .iter()
        .map(|m| edges.iter().filter(|&&(a, b)| ((m >> a) ^ (m >> b)) & 1 == 1).count())
        .max()
        .unwrap_or(0)
}

fn tree_of(n: usize, mut edges: Vec<(usize, usize)>) -> SpanningTree {
    edges.sort_unstable();
    let mut parent = vec![None; n];
    let mut stack = vec![0usize];
    let mut seen = vec![false; n];
    if n > 0 {
        seen[0] = true;
    }
    while let Some(v) = stack.pop() {
        for &(a, b) in &edges {
            let w = if a == v { b } else if b == v { a } else { continue };
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                stack.push(w);
            }
        }
    }
    SpanningTree { n, edges, root: 0, parent }
}

/// Minimum crossing number over all labeled spanning trees of the ground set.
pub fn brute_force_opt_tree(space: &RangeSpace) -> Result<OracleResult> {
    let n = space.ground_size();
    if n > ORACLE_LIMIT {
        return Err(Error::TooLarge { n, limit: ORACLE_LIMIT });
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let masks: Vec<u64> =
        space.ranges().iter().map(|r| r.members.ones().fold(0u64, |m, i| m | (1 << i))).collect();
    if n <= 2 {
        let edges = if n == 2 { vec![(0, 1)] } else { Vec::new() };
        let t_opt = tree_crossing(&edges, &masks);
        return Ok(OracleResult { t_opt, witness: tree_of(n, edges), examined: 1 });
    }
    let len = n - 2;
    // Each worker owns the sequences starting with one symbol; ties go to
    // the lexicographically smallest sequence.
    let best = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut seq = vec![0usize; len];
            seq[0] = first;
            let mut best: Option<(usize, Vec<usize>)> = None;
            let mut examined = 0u64;
            loop {
                let c = tree_crossing(&prufer_edges(&seq, n), &masks);
                examined += 1;
                if best.as_ref().is_none_or(|(b, _)| c < *b) {
                    best = Some((c, seq.clone()));
                }
                let mut k = len;
                loop {
                    if k == 1 {
                        return (best.expect("at least one tree"), examined);
                    }
                    k -= 1;
                    seq[k] += 1;
                    if seq[k] < n {
                        break;
                    }
                    seq[k] = 0;
                }
                if len == 1 {
                    return (best.expect("at least one tree"), examined);
                }
            }
        })
        .collect::<Vec<_>>();
    let examined = best.iter().map(|(_, e)| e).sum();
    let ((t_opt, seq), _) = best.into_iter().min_by(|a, b| a.0.cmp(&b.0)).expect("n >= 3");
    Ok(OracleResult { t_opt, witness: tree_of(n, prufer_edges(&seq, n)), examined })
}

/// Exact feasibility of both sides at `t` and equality of the objectives.
pub fn check_duality_certificate(
    space: &RangeSpace,
    t: &Rational,
    primal: &FractionalSolution,
    dual: &FractionalSolution,
) -> bool {
    let (Ok(p_lp), Ok(d_lp)) = (build_primal(space, t), build_dual(space, t)) else { return false };
    primal.status == Status::Optimal
        && dual.status == Status::Optimal
        && p_lp.is_feasible(&primal.values)
        && d_lp.is_feasible(&dual.values)
        && p_lp.objective_value(&primal.values) == primal.objective
        && d_lp.objective_value(&dual.values) == dual.objective
        && primal.objective == dual.objective
}

/// Optimum of the separation program over the canonical ranges of `points`.
pub fn separation_optimum(points: &PointSet) -> Result<Rational> {
    let sol = solve(&build_separation(&canonical_ranges(points)?)?);
    match sol.status {
        Status::Optimal => Ok(sol.objective),
        _ => Err(Error::InvalidSolution("separation program has no optimum".into())),
    }
}

/// Whether the separation optimum is at least `sqrt(n) / 2`.
pub fn check_separation_lower_bound(points: &PointSet) -> Result<bool> {
    if points.dim() != 2 {
        return Err(Error::UnsupportedDimension(points.dim()));
    }
    Ok(at_least_half_sqrt(&separation_optimum(points)?, points.len() as u64))
}

fn lines_in_general_position(lines: &[Hyperplane]) -> Result<()> {
    for (i, a) in lines.iter().enumerate() {
        for (j, b) in lines.iter().enumerate().skip(i + 1) {
            let Some(v) = crate::geom::line_intersection(a, b) else {
                return Err(Error::Degenerate(format!("lines {i} and {j} are parallel")));
            };
            let p = Point::new(0, v.to_vec());
            for (k, c) in lines.iter().enumerate().skip(j + 1) {
                if side_of(c, &p)? == Side::On {
                    return Err(Error::Degenerate(format!("lines {i}, {j}, {k} are concurrent")));
                }
            }
        }
    }
    Ok(())
}

/// Every point has at least `r (r + 1) / 2` arrangement vertices within
/// crossing distance `r`.
pub fn check_crossing_disk_lemma(lines: &[Hyperplane], points: &PointSet, r: u64) -> Result<bool> {
    if points.dim() != 2 {
        return Err(Error::UnsupportedDimension(points.dim()));
    }
    if (lines.len() as u64) < 2 * r {
        return Err(Error::Degenerate(format!("{} lines are fewer than 2r = {}", lines.len(), 2 * r)));
    }
    lines_in_general_position(lines)?;
    for p in points.points() {
        for h in lines {
            if side_of(h, p)? == Side::On {
                return Err(Error::Degenerate(format!("point {} lies on a line", p.id)));
            }
        }
    }
    let need = (r * (r + 1) / 2) as usize;
    for p in points.points() {
        if crossing_disk_size(lines, p, HalfCount::from_whole(r))? < need {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `t* <= t_opt`, with both sides exact.
pub fn threshold_below_oracle(t_star: &Rational, oracle: &OracleResult) -> bool {
    *t_star <= Rational::from_integer((oracle.t_opt as i64).into())
}

/// Largest point set whose separation program `--verify` solves.
pub const SEPARATION_LIMIT: usize = 36;

fn is_spanning_tree(n: usize, edges: &[(usize, usize)]) -> bool {
    edges.len() + 1 == n && crate::rounding::component_count(n, edges) == 1
}

/// Every check that applies to `space`, run against a finished pipeline run.
pub fn verification_block(space: &RangeSpace, run: &Run) -> Result<Value> {
    let n = space.ground_size();
    let edges = &run.tree.edges;
    let mut out = serde_json::Map::new();
    out.insert("spanning_tree".into(), json!(is_spanning_tree(n, edges)));
    let recount = crate::range_space::crossings_per_range(edges, space).into_iter().max().unwrap_or(0);
    out.insert("crossing_recount".into(), json!(recount == run.report.total_crossing));

    // Twins make the primal unbounded, so the certificate is checked on one
    // representative per class, at that space's own minimal threshold.
    let leaders = crate::rounding::component_leaders(n, &crate::pipeline::twin_edges(space));
    let reps: Vec<usize> = (0..n).filter(|&v| leaders[v] == v).collect();
    if reps.len() >= 2 {
        let rep_space = if reps.len() == n { space.clone() } else { crate::range_space::restrict(space, &reps)? };
        let t = &match run.traces.first() {
            Some(level) if reps.len() == n => level.t.clone(),
            _ => min_feasible_t(&rep_space, Granularity::Exact)?,
        };
        let primal = solve(&build_primal(&rep_space, t)?);
        let dual = solve(&build_dual(&rep_space, t)?);
        out.insert(
            "duality".into(),
            json!({
                "t": fmt_rational(t),
                "primal": fmt_rational(&primal.objective),
                "dual": fmt_rational(&dual.objective),
                "ok": check_duality_certificate(&rep_space, t, &primal, &dual),
            }),
        );
        if n <= ORACLE_LIMIT {
            let oracle = brute_force_opt_tree(space)?;
            out.insert(
                "oracle".into(),
                json!({
                    "t_opt": oracle.t_opt,
                    "examined": oracle.examined,
                    "crossing_at_least_opt": run.report.total_crossing >= oracle.t_opt,
                    "threshold_at_most_opt": threshold_below_oracle(t, &oracle),
                }),
            );
        }
    }
    if let Some(points) = space.points() {
        if points.dim() == 2 && (2..=SEPARATION_LIMIT).contains(&n) {
            let sep = separation_optimum(points)?;
            out.insert(
                "separation".into(),
                json!({
                    "optimum": fmt_rational(&sep),
                    "at_least_half_sqrt_n": at_least_half_sqrt(&sep, n as u64),
                }),
            );
        }
    }
    let passed = out.values().all(|v| match v {
        Value::Bool(b) => *b,
        Value::Object(o) => o.iter().filter(|(k, _)| k.as_str() != "t_opt").all(|(_, v)| v.as_bool().unwrap_or(true)),
        _ => true,
    });
    out.insert("passed".into(), json!(passed));
    Ok(Value::Object(out))
}
