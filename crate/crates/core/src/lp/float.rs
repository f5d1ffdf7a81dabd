//! Floating-point tableau simplex used only to find a promising basis.
//!
//! `<=` rows are generated lazily once there are many of them: the tableau
//! starts from the `>=` rows plus enough `<=` rows to bound every profitable
//! column, and the most violated rows are appended after each solve. The
//! basis it reports is re-derived exactly by the caller.

use super::std_form::StdForm;
use crate::num::to_f64;

const TOL: f64 = 1e-9;
const LAZY_MIN: usize = 64;
const BATCH: usize = 32;
const BLAND_AFTER: usize = 1000;
/// Slack above which a generated row is dropped again.
const PURGE_MARGIN: f64 = 1e-3;
const MAX_PIVOTS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Optimal,
    Infeasible,
    Unbounded,
    Stalled,
}

pub(crate) struct FloatOutcome {
    pub kind: Kind,
    /// Basic structural columns.
    pub structurals: Vec<usize>,
    /// Standard rows whose slack is nonbasic.
    pub tight: Vec<usize>,
    pub pivots: usize,
}

struct Row {
    coeffs: Vec<(usize, f64)>,
    sigma: f64,
    rhs: f64,
}

impl Row {
    fn dot(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|(j, a)| a * x[*j]).sum()
    }
}

enum Step {
    Done,
    Unbounded(usize),
    Infeasible,
    Stalled,
}

struct Tableau {
    n: usize,
    cost: Vec<f64>,
    /// Standard row of each tableau row; its slack is column `n + position`.
    active: Vec<usize>,
    t: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    /// `c_k - c_B B^-1 A_k`; a column improves when this is positive.
    d: Vec<f64>,
    pivots: usize,
}

impl Tableau {
    fn new(cost: Vec<f64>) -> Self {
        let n = cost.len();
        Self { n, d: cost.clone(), cost, active: Vec::new(), t: Vec::new(), rhs: Vec::new(), basis: Vec::new(), pivots: 0 }
    }

    fn width(&self) -> usize {
        self.n + self.active.len()
    }

    fn add_row(&mut self, id: usize, row: &Row) {
        for r in &mut self.t {
            r.push(0.0);
        }
        self.d.push(0.0);
        let width = self.width() + 1;
        let mut new = vec![0.0; width];
        for (j, a) in &row.coeffs {
            new[*j] += a;
        }
        new[width - 1] = row.sigma;
        let mut rhs = row.rhs;
        for r in 0..self.t.len() {
            let b = self.basis[r];
            let f = new[b];
            if f == 0.0 {
                continue;
            }
            for (v, a) in new.iter_mut().zip(&self.t[r]) {
                *v -= f * a;
            }
            new[b] = 0.0;
            rhs -= f * self.rhs[r];
        }
        if row.sigma < 0.0 {
            for v in &mut new {
                *v = -*v;
            }
            rhs = -rhs;
        }
        self.t.push(new);
        self.rhs.push(rhs);
        self.basis.push(width - 1);
        self.active.push(id);
    }

    fn pivot(&mut self, r: usize, k: usize) {
        let p = self.t[r][k];
        for v in &mut self.t[r] {
            *v /= p;
        }
        self.rhs[r] /= p;
        self.t[r][k] = 1.0;
        let prow: Vec<(usize, f64)> =
            self.t[r].iter().enumerate().filter(|(_, v)| v.abs() > 1e-14).map(|(j, v)| (j, *v)).collect();
        let prhs = self.rhs[r];
        for i in 0..self.t.len() {
            if i == r {
                continue;
            }
            let f = self.t[i][k];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.t[i];
            for (j, v) in &prow {
                row[*j] -= f * v;
            }
            row[k] = 0.0;
            self.rhs[i] -= f * prhs;
        }
        let f = self.d[k];
        if f != 0.0 {
            for (j, v) in &prow {
                self.d[*j] -= f * v;
            }
        }
        self.d[k] = 0.0;
        self.basis[r] = k;
        self.pivots += 1;
    }

    fn recompute_costs(&mut self) {
        let width = self.width();
        let mut d: Vec<f64> = (0..width).map(|k| self.cost.get(k).copied().unwrap_or(0.0)).collect();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = self.cost.get(b).copied().unwrap_or(0.0);
            if cb == 0.0 {
                continue;
            }
            for (dk, a) in d.iter_mut().zip(&self.t[r]) {
                *dk -= cb * a;
            }
        }
        for &b in &self.basis {
            d[b] = 0.0;
        }
        self.d = d;
    }

    fn primal(&mut self) -> Step {
        let mut degenerate = 0;
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Step::Stalled;
            }
            let bland = degenerate > BLAND_AFTER;
            let entering = if bland {
                self.d.iter().position(|v| *v > TOL)
            } else {
                self.d
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v > TOL)
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(k, _)| k)
            };
            let Some(k) = entering else { return Step::Done };
            let mut min_ratio = f64::INFINITY;
            for r in 0..self.t.len() {
                let a = self.t[r][k];
                if a > TOL {
                    min_ratio = min_ratio.min(self.rhs[r].max(0.0) / a);
                }
            }
            if min_ratio.is_infinite() {
                return Step::Unbounded(k);
            }
            let mut chosen: Option<usize> = None;
            for r in 0..self.t.len() {
                let a = self.t[r][k];
                if a <= TOL || self.rhs[r].max(0.0) / a > min_ratio + 1e-12 {
                    continue;
                }
                chosen = match chosen {
                    None => Some(r),
                    Some(c) if bland && self.basis[r] < self.basis[c] => Some(r),
                    Some(c) if !bland && a > self.t[c][k] => Some(r),
                    keep => keep,
                };
            }
            let r = chosen.expect("ratio test row");
            degenerate = if min_ratio < 1e-12 { degenerate + 1 } else { 0 };
            self.pivot(r, k);
        }
    }

    /// Dual simplex. Without `use_costs` every ratio is zero, which restores
    /// primal feasibility while ignoring the objective.
    fn dual(&mut self, use_costs: bool) -> Step {
        let mut degenerate = 0;
        loop {
            if self.pivots >= MAX_PIVOTS {
                return Step::Stalled;
            }
            let bland = degenerate > BLAND_AFTER;
            let leaving = if bland {
                (0..self.t.len()).filter(|&r| self.rhs[r] < -TOL).min_by_key(|&r| self.basis[r])
            } else {
                (0..self.t.len())
                    .filter(|&r| self.rhs[r] < -TOL)
                    .min_by(|&a, &b| self.rhs[a].total_cmp(&self.rhs[b]))
            };
            let Some(r) = leaving else { return Step::Done };
            let row = &self.t[r];
            let ratio = |k: usize| if use_costs { self.d[k].min(0.0) / row[k] } else { 0.0 };
            let mut min_ratio = f64::INFINITY;
            for (k, a) in row.iter().enumerate() {
                if *a < -TOL {
                    min_ratio = min_ratio.min(ratio(k));
                }
            }
            if min_ratio.is_infinite() {
                return Step::Infeasible;
            }
            let mut chosen: Option<usize> = None;
            for (k, a) in row.iter().enumerate() {
                if *a >= -TOL || ratio(k) > min_ratio + 1e-12 {
                    continue;
                }
                chosen = match chosen {
                    None => Some(k),
                    Some(_) if bland => chosen,
                    Some(c) if a.abs() > row[c].abs() => Some(k),
                    keep => keep,
                };
            }
            let k = chosen.expect("dual ratio column");
            degenerate = if use_costs && min_ratio > 1e-12 { 0 } else { degenerate + 1 };
            self.pivot(r, k);
        }
    }

    /// Drops tableau rows whose slack is basic with value above `margin`,
    /// together with their slack columns. Returns the dropped row ids.
    fn purge(&mut self, margin: f64, removable: impl Fn(usize) -> bool) -> Vec<usize> {
        let n = self.n;
        let m = self.active.len();
        let mut drop_pos = vec![false; m];
        let mut drop_row = vec![false; self.t.len()];
        for (r, &b) in self.basis.iter().enumerate() {
            if b >= n && self.rhs[r] > margin && removable(self.active[b - n]) {
                drop_pos[b - n] = true;
                drop_row[r] = true;
            }
        }
        if !drop_pos.iter().any(|d| *d) {
            return Vec::new();
        }
        let mut new_col = vec![usize::MAX; n + m];
        let mut next = 0;
        for (k, slot) in new_col.iter_mut().enumerate() {
            if k < n || !drop_pos[k - n] {
                *slot = next;
                next += 1;
            }
        }
        let keep_cols = |v: &Vec<f64>| -> Vec<f64> {
            v.iter().enumerate().filter(|(k, _)| *k < n || !drop_pos[*k - n]).map(|(_, x)| *x).collect()
        };
        let mut t = Vec::new();
        let mut rhs = Vec::new();
        let mut basis = Vec::new();
        for r in 0..self.t.len() {
            if drop_row[r] {
                continue;
            }
            t.push(keep_cols(&self.t[r]));
            rhs.push(self.rhs[r]);
            basis.push(new_col[self.basis[r]]);
        }
        self.d = keep_cols(&self.d);
        let dropped = (0..m).filter(|&p| drop_pos[p]).map(|p| self.active[p]).collect();
        self.active = (0..m).filter(|&p| !drop_pos[p]).map(|p| self.active[p]).collect();
        self.t = t;
        self.rhs = rhs;
        self.basis = basis;
        dropped
    }

    fn values(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rhs[r];
            }
        }
        x
    }

    fn ray(&self, k: usize) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        if k < self.n {
            d[k] = 1.0;
        }
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                d[b] = -self.t[r][k];
            }
        }
        d
    }

    fn outcome(&self, kind: Kind) -> FloatOutcome {
        let mut structurals: Vec<usize> = self.basis.iter().copied().filter(|&b| b < self.n).collect();
        structurals.sort_unstable();
        let mut basic_slack = vec![false; self.active.len()];
        for &b in &self.basis {
            if b >= self.n {
                basic_slack[b - self.n] = true;
            }
        }
        let mut tight: Vec<usize> =
            self.active.iter().zip(&basic_slack).filter(|(_, basic)| !**basic).map(|(id, _)| *id).collect();
        tight.sort_unstable();
        FloatOutcome { kind, structurals, tight, pivots: self.pivots }
    }
}

fn initial_rows(rows: &[Row], cost: &[f64]) -> Vec<usize> {
    let le: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].sigma > 0.0).collect();
    if le.len() <= LAZY_MIN {
        return (0..rows.len()).collect();
    }
    let mut chosen: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].sigma < 0.0).collect();
    let mut covered: Vec<bool> = cost.iter().map(|c| *c <= 0.0).collect();
    for &i in &le {
        if covered.iter().all(|c| *c) {
            break;
        }
        let mut useful = false;
        for (j, a) in &rows[i].coeffs {
            if *a > 0.0 && !covered[*j] {
                covered[*j] = true;
                useful = true;
            }
        }
        if useful {
            chosen.push(i);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Rows outside the tableau ranked by `score`, best first, capped at `BATCH`.
fn pick(rows: &[Row], in_tableau: &[bool], score: impl Fn(&Row) -> f64) -> Vec<usize> {
    let mut cands: Vec<(f64, usize)> = (0..rows.len())
        .filter(|&i| !in_tableau[i])
        .map(|i| (score(&rows[i]), i))
        .filter(|(s, _)| *s > TOL)
        .collect();
    cands.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    cands.truncate(BATCH);
    cands.into_iter().map(|(_, i)| i).collect()
}

fn float_rows(std: &StdForm) -> Vec<Row> {
    std.rows
        .iter()
        .map(|r| Row {
            coeffs: r.coeffs.iter().map(|(j, a)| (*j, to_f64(a))).collect(),
            sigma: f64::from(r.sigma),
            rhs: to_f64(r.rhs),
        })
        .collect()
}

/// A resumable solve: the objective can be replaced and rows appended
/// between runs, keeping the current basis as a warm start.
pub(crate) struct Session {
    rows: Vec<Row>,
    /// Rows of the original program; later rows are never purged.
    original: usize,
    in_tableau: Vec<bool>,
    lazy: bool,
    tab: Tableau,
}

impl Session {
    pub fn new(std: &StdForm) -> Self {
        let rows = float_rows(std);
        let cost: Vec<f64> = std.cost.iter().map(to_f64).collect();
        let mut in_tableau = vec![false; rows.len()];
        let mut tab = Tableau::new(cost.clone());
        let initial = initial_rows(&rows, &cost);
        let lazy = initial.len() < rows.len();
        for i in initial {
            tab.add_row(i, &rows[i]);
            in_tableau[i] = true;
        }
        let original = rows.len();
        Self { rows, original, in_tableau, lazy, tab }
    }

    pub fn run(&mut self) -> Kind {
        self.iterate()
    }

    pub fn snapshot(&self, kind: Kind) -> FloatOutcome {
        self.tab.outcome(kind)
    }

    fn iterate(&mut self) -> Kind {
        let tab = &mut self.tab;
        loop {
            if tab.rhs.iter().any(|v| *v < -TOL) {
                let dual_ok = tab.d.iter().all(|v| *v <= TOL);
                let step = tab.dual(dual_ok);
                if !dual_ok {
                    tab.recompute_costs();
                }
                match step {
                    Step::Infeasible => return Kind::Infeasible,
                    Step::Stalled => return Kind::Stalled,
                    _ => {}
                }
            }
            let added = match tab.primal() {
                Step::Stalled => return Kind::Stalled,
                Step::Unbounded(k) => {
                    let ray = tab.ray(k);
                    let blocking = pick(&self.rows, &self.in_tableau, |r| r.sigma * r.dot(&ray));
                    if blocking.is_empty() {
                        return Kind::Unbounded;
                    }
                    blocking
                }
                _ => {
                    let x = tab.values();
                    let violated = pick(&self.rows, &self.in_tableau, |r| r.sigma * (r.dot(&x) - r.rhs));
                    if violated.is_empty() {
                        return Kind::Optimal;
                    }
                    if self.lazy {
                        let (rows, original) = (&self.rows, self.original);
                        for i in tab.purge(PURGE_MARGIN, |i| i < original && rows[i].sigma > 0.0) {
                            self.in_tableau[i] = false;
                        }
                    }
                    violated
                }
            };
            log::trace!("adding {} rows to a tableau of {} after {} pivots", added.len(), tab.active.len(), tab.pivots);
            for i in added {
                tab.add_row(i, &self.rows[i]);
                self.in_tableau[i] = true;
            }
        }
    }

    /// Appends `x_col <= bound` as a permanent row and returns its id.
    pub fn add_upper_bound(&mut self, col: usize, bound: f64) -> usize {
        let id = self.rows.len();
        self.rows.push(Row { coeffs: vec![(col, 1.0)], sigma: 1.0, rhs: bound });
        self.in_tableau.push(true);
        self.tab.add_row(id, &self.rows[id]);
        id
    }

    pub fn set_cost(&mut self, cost: Vec<f64>) {
        self.tab.cost = cost;
        self.tab.recompute_costs();
    }

    /// Makes the slack of row `id` nonbasic with a degenerate pivot when it
    /// is basic at zero, avoiding column `avoid`.
    pub fn make_tight(&mut self, id: usize, avoid: usize) -> bool {
        let tab = &mut self.tab;
        let Some(pos) = tab.active.iter().position(|&a| a == id) else { return false };
        let slack = tab.n + pos;
        let Some(r) = tab.basis.iter().position(|&b| b == slack) else { return true };
        if tab.rhs[r].abs() > 1e-7 {
            return false;
        }
        let best = (0..tab.width())
            .filter(|&k| k != avoid && k != slack && !tab.basis.contains(&k))
            .max_by(|&a, &b| tab.t[r][a].abs().total_cmp(&tab.t[r][b].abs()));
        match best {
            Some(k) if tab.t[r][k].abs() > 1e-9 => {
                tab.rhs[r] = 0.0;
                tab.pivot(r, k);
                true
            }
            _ => false,
        }
    }
}

pub(crate) fn solve(std: &StdForm) -> FloatOutcome {
    let mut session = Session::new(std);
    let kind = session.run();
    session.snapshot(kind)
}
