//! The recursive driver: solve, round, contract components, repeat.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{build_primal, build_weighted_primal, solve, solve_at_threshold, FractionalSolution, Status, LENGTH_BITS};
use crate::num::{fmt_rational, int, Rational};
use crate::range_space::{crossing_number, restrict, RangeSpace};
use crate::rounding::{
    component_leaders, deterministic_planar_round, round_until_reduced, DEFAULT_MAX_RETRIES,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Randomized,
    DeterministicPlanar,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "randomized" => Ok(Mode::Randomized),
            "deterministic-planar" | "planar" => Ok(Mode::DeterministicPlanar),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Randomized => "randomized",
            Mode::DeterministicPlanar => "deterministic-planar",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningTree {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub root: usize,
    pub parent: Vec<Option<usize>>,
}

/// Breadth-first tree of `(0..n, edges)` from vertex 0, visiting neighbors
/// in ascending order.
pub fn extract_spanning_tree(n: usize, edges: &[(usize, usize)]) -> Result<SpanningTree> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let mut adj = vec![BTreeSet::new(); n];
    for &(a, b) in edges {
        if a >= n || b >= n {
            return Err(Error::IndexOutOfRange { index: a.max(b), size: n });
        }
        if a != b {
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut tree = Vec::with_capacity(n - 1);
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                tree.push((v.min(w), v.max(w)));
                queue.push_back(w);
            }
        }
    }
    if tree.len() + 1 != n {
        return Err(Error::Disconnected);
    }
    tree.sort_unstable();
    Ok(SpanningTree { n, edges: tree, root: 0, parent })
}

/// Visits `subset` in the order a depth-first walk of `tree` from the
/// smallest element of `subset` first reaches them; this is the doubled-tree
/// Euler tour with repeated and unwanted vertices skipped. The closing edge is
/// implied. The result is checked to cross no range more than twice as often
/// as the tree does.
pub fn euler_shortcut(tree: &SpanningTree, subset: &[usize], space: &RangeSpace) -> Result<Vec<usize>> {
    let mut wanted = vec![false; tree.n];
    for &x in subset {
        if x >= tree.n {
            return Err(Error::IndexOutOfRange { index: x, size: tree.n });
        }
        wanted[x] = true;
    }
    let start = *subset.iter().min().ok_or(Error::EmptySubset)?;
    let mut adj = vec![Vec::new(); tree.n];
    for &(a, b) in &tree.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut order = Vec::new();
    let mut seen = vec![false; tree.n];
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if wanted[v] {
            order.push(v);
        }
        stack.extend(adj[v].iter().rev().filter(|w| !seen[**w]));
    }
    let cycle_cross = crossing_number(&cycle_edges(&order), space);
    let tree_cross = crossing_number(&tree.edges, space);
    if cycle_cross > 2 * tree_cross {
        return Err(Error::ShortcutVerification { cycle: cycle_cross, tree: tree_cross });
    }
    Ok(order)
}

/// Distinct edges of the closed walk through `order`.
pub fn cycle_edges(order: &[usize]) -> Vec<(usize, usize)> {
    if order.len() < 2 {
        return Vec::new();
    }
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (i, &a) in order.iter().enumerate() {
        let b = order[(i + 1) % order.len()];
        edges.insert((a.min(b), a.max(b)));
    }
    edges.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub mode: Mode,
    pub seed: u64,
    /// Used at every level instead of the minimal feasible threshold.
    pub t_override: Option<Rational>,
    pub max_retries: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self { mode: Mode::Randomized, seed: 0, t_override: None, max_retries: DEFAULT_MAX_RETRIES }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelTrace {
    pub level: usize,
    /// Surviving ground indices, ascending.
    pub points: Vec<usize>,
    pub t: Rational,
    /// Rounded edges in ground indices.
    pub edges: Vec<(usize, usize)>,
    pub components: usize,
    /// Crossing number of `edges` in the full range space.
    pub crossing: usize,
    pub retries: usize,
    pub lp_objective: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub i: usize,
    pub n_i: usize,
    pub t_i: String,
    pub t_i_approx: f64,
    pub edges: Vec<(usize, usize)>,
    pub components: usize,
    pub crossing_i: usize,
    pub retries: usize,
    pub lp_objective: String,
}

impl From<&LevelTrace> for LevelReport {
    fn from(l: &LevelTrace) -> Self {
        Self {
            i: l.level,
            n_i: l.points.len(),
            t_i: fmt_rational(&l.t),
            t_i_approx: crate::num::to_f64(&l.t),
            edges: l.edges.clone(),
            components: l.components,
            crossing_i: l.crossing,
            retries: l.retries,
            lp_objective: fmt_rational(&l.lp_objective),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub ranges: u64,
    pub levels: Vec<u64>,
    pub total: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub ranges: usize,
    pub mode: Mode,
    pub seed: u64,
    pub t_override: Option<String>,
    pub length_bits: u32,
    pub levels: Vec<LevelReport>,
    pub tree: Vec<(usize, usize)>,
    pub total_crossing: usize,
    pub timings_ms: Timings,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<serde_json::Value>,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub tree: SpanningTree,
    pub traces: Vec<LevelTrace>,
    pub report: RunReport,
}

fn elapsed_ms(since: Instant) -> u64 {
    since.elapsed().as_millis() as u64
}

struct LevelSolve {
    t: Rational,
    solution: FractionalSolution,
}

fn solve_level(space: &RangeSpace, opts: &Options) -> Result<LevelSolve> {
    let weighted = opts.mode == Mode::DeterministicPlanar;
    let (t, solution) = match &opts.t_override {
        Some(t) => {
            let lp = if weighted { build_weighted_primal(space, t)? } else { build_primal(space, t)? };
            (t.clone(), solve(&lp))
        }
        None => {
            let res = solve_at_threshold(space, weighted)?;
            (res.t, res.solution)
        }
    };
    match solution.status {
        Status::Optimal => Ok(LevelSolve { t, solution }),
        Status::Infeasible => Err(Error::Infeasible),
        Status::Unbounded => Err(Error::Unbounded),
    }
}

/// Star edges joining points that lie in exactly the same ranges, in local
/// indices.
pub fn twin_edges(space: &RangeSpace) -> Vec<(usize, usize)> {
    let mut first: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut edges = Vec::new();
    for v in 0..space.ground_size() {
        let signature: Vec<bool> = space.ranges().iter().map(|r| r.contains(v)).collect();
        match first.get(&signature) {
            Some(&u) => edges.push((u, v)),
            None => {
                first.insert(signature, v);
            }
        }
    }
    edges
}

/// Runs the level recursion on `space` and returns a spanning tree of the
/// union of all rounded edge sets.
pub fn build_tree(space: &RangeSpace, opts: &Options) -> Result<Run> {
    let started = Instant::now();
    let n = space.ground_size();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if opts.mode == Mode::DeterministicPlanar {
        let points = space.points().ok_or(Error::NotGeometric)?;
        if points.dim() != 2 {
            return Err(Error::UnsupportedDimension(points.dim()));
        }
    }
    let mut current: Vec<usize> = (0..n).collect();
    let mut traces = Vec::new();
    let mut level_ms = Vec::new();
    let mut union: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut seed = opts.seed;
    while current.len() > 1 {
        let level_start = Instant::now();
        let level = traces.len();
        let m = current.len();
        let local_space = if m == n { space.clone() } else { restrict(space, &current)? };
        // Points no range separates can be joined for free; the program only
        // sees one representative per class.
        let mut local_edges = twin_edges(&local_space);
        let reps: Vec<usize> = {
            let leaders = component_leaders(m, &local_edges);
            (0..m).filter(|&v| leaders[v] == v).collect()
        };
        let (t, objective, retries) = if reps.len() == 1 {
            (int(0), int(0), 0)
        } else {
            let rep_space = if reps.len() == m { local_space } else { restrict(&local_space, &reps)? };
            let LevelSolve { t, solution } = solve_level(&rep_space, opts)?;
            let (rounded, retries) = match opts.mode {
                Mode::Randomized => {
                    let (set, stats) = round_until_reduced(&solution, &rep_space, seed, opts.max_retries)?;
                    (set.edges, stats.retries)
                }
                Mode::DeterministicPlanar => {
                    let points = rep_space.points().ok_or(Error::NotGeometric)?;
                    (deterministic_planar_round(&solution, points, &rep_space)?.edges, 0)
                }
            };
            local_edges.extend(rounded.into_iter().map(|(a, b)| (reps[a], reps[b])));
            (t, solution.objective, retries)
        };
        let leaders = component_leaders(m, &local_edges);
        let mut next: Vec<usize> = leaders.iter().enumerate().filter(|(v, l)| *v == **l).map(|(v, _)| current[v]).collect();
        next.sort_unstable();
        if next.len() == m {
            return Err(Error::InvalidSolution(format!("level {level} merged no components")));
        }
        let edges: Vec<(usize, usize)> = local_edges.iter().map(|&(a, b)| (current[a], current[b])).collect();
        union.extend(edges.iter().copied());
        log::info!("level {level}: n_i = {m}, t_i = {}, {} edges, {} components", fmt_rational(&t), edges.len(), next.len());
        traces.push(LevelTrace {
            level,
            points: current.clone(),
            t,
            crossing: crossing_number(&edges, space),
            edges,
            components: next.len(),
            retries,
            lp_objective: objective,
        });
        level_ms.push(elapsed_ms(level_start));
        current = next;
        seed = crate::rounding::next_seed(seed);
    }
    let all: Vec<(usize, usize)> = union.into_iter().collect();
    let tree = extract_spanning_tree(n, &all)?;
    let total_crossing = crossing_number(&tree.edges, space);
    let report = RunReport {
        n,
        ranges: space.len(),
        mode: opts.mode,
        seed: opts.seed,
        t_override: opts.t_override.as_ref().map(fmt_rational),
        length_bits: LENGTH_BITS,
        levels: traces.iter().map(LevelReport::from).collect(),
        tree: tree.edges.clone(),
        total_crossing,
        timings_ms: Timings { ranges: 0, levels: level_ms, total: elapsed_ms(started) },
        verification: None,
    };
    Ok(Run { tree, traces, report })
}

/// Builds the canonical ranges of `points`, then runs `build_tree`.
pub fn build_tree_for_points(points: &crate::geom::PointSet, opts: &Options) -> Result<(RangeSpace, Run)> {
    let started = Instant::now();
    let space = crate::range_space::canonical_ranges(points)?;
    let ranges_ms = elapsed_ms(started);
    let mut run = build_tree(&space, opts)?;
    run.report.timings_ms.ranges = ranges_ms;
    run.report.timings_ms.total += ranges_ms;
    Ok((space, run))
}

/// Level bound `ceil(log_{20/19} n) + 1`.
pub fn level_bound(n: usize) -> usize {
    let mut levels = 0;
    let mut size = n as f64;
    while size > 1.0 {
        size *= 19.0 / 20.0;
        levels += 1;
    }
    levels + 1
}
