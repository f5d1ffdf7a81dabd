//! Exact revised simplex started from a guessed basis.
//!
//! A basis is a set `J` of basic structural columns and a set `T` of rows
//! whose slack is nonbasic, with `|J| = |T|`; every other slack is basic.
//! Each step refactors `A[T, J]` exactly. Pivots follow Bland's rule, so a
//! good starting basis finishes in a handful of steps and a poor one still
//! terminates. Variable `v < n` is structural `v`; `v >= n` is the slack of
//! row `v - n`.

use num_traits::{One, Signed, Zero};

use super::float::{FloatOutcome, Kind};
use super::lu::ExactLu;
use super::std_form::{RawSolution, StdForm};
use crate::num::Rational;

#[derive(Clone, Debug, Default)]
struct Basis {
    cols: Vec<usize>,
    rows: Vec<usize>,
}

impl Basis {
    fn exchange(&mut self, n: usize, enter: usize, leave: usize) {
        if enter < n {
            self.cols.push(enter);
        } else {
            self.rows.retain(|&r| r != enter - n);
        }
        if leave < n {
            self.cols.retain(|&c| c != leave);
        } else {
            self.rows.push(leave - n);
        }
        self.cols.sort_unstable();
        self.rows.sort_unstable();
    }
}

struct Factored<'s, 'a> {
    std: &'s StdForm<'a>,
    basis: Basis,
    lu: ExactLu,
    /// Position of each structural in `basis.cols`.
    col_pos: Vec<Option<usize>>,
    /// Position of each row in `basis.rows`.
    row_pos: Vec<Option<usize>>,
    x: Vec<Rational>,
}

impl<'s, 'a> Factored<'s, 'a> {
    fn new(std: &'s StdForm<'a>, basis: Basis) -> Option<Self> {
        let k = basis.cols.len();
        if basis.rows.len() != k {
            return None;
        }
        let mut col_pos = vec![None; std.n];
        for (q, &c) in basis.cols.iter().enumerate() {
            col_pos[c] = Some(q);
        }
        let mut row_pos = vec![None; std.num_rows()];
        for (p, &r) in basis.rows.iter().enumerate() {
            row_pos[r] = Some(p);
        }
        let mut m = vec![vec![Rational::zero(); k]; k];
        for (p, &r) in basis.rows.iter().enumerate() {
            for (j, a) in std.rows[r].coeffs {
                if let Some(q) = col_pos[*j] {
                    m[p][q] += a;
                }
            }
        }
        let lu = ExactLu::factor(m).ok()?;
        let b: Vec<Rational> = basis.rows.iter().map(|&r| std.rows[r].rhs.clone()).collect();
        let xj = lu.solve(&b);
        let mut x = vec![Rational::zero(); std.n];
        for (q, v) in xj.into_iter().enumerate() {
            x[basis.cols[q]] = v;
        }
        Some(Self { std, basis, lu, col_pos, row_pos, x })
    }

    fn slack(&self, i: usize) -> Rational {
        self.std.rows[i].slack(&self.x)
    }

    /// Smallest-index basic variable with a negative value.
    fn infeasible_basic(&self) -> Option<usize> {
        let n = self.std.n;
        let structural = self.basis.cols.iter().copied().find(|&j| self.x[j].is_negative());
        let slack = (0..self.std.num_rows())
            .filter(|&i| self.row_pos[i].is_none())
            .find(|&i| self.slack(i).is_negative())
            .map(|i| n + i);
        match (structural, slack) {
            (Some(a), _) => Some(a),
            (None, b) => b,
        }
    }

    /// `sum_p w_p a_{T_p, j}` for every structural `j`.
    fn row_combination(&self, w: &[Rational]) -> Vec<Rational> {
        let mut acc = vec![Rational::zero(); self.std.n];
        for (p, &r) in self.basis.rows.iter().enumerate() {
            if w[p].is_zero() {
                continue;
            }
            for (j, a) in self.std.rows[r].coeffs {
                acc[*j] += a * &w[p];
            }
        }
        acc
    }

    /// Simplex multipliers on `T` and reduced costs of every nonbasic
    /// variable; a positive reduced cost means the variable improves.
    fn pricing(&self, use_costs: bool) -> (Vec<Rational>, Vec<(usize, Rational)>) {
        let n = self.std.n;
        let k = self.basis.cols.len();
        if !use_costs {
            let reduced = self.nonbasic().map(|v| (v, Rational::zero())).collect();
            return (vec![Rational::zero(); k], reduced);
        }
        let cj: Vec<Rational> = self.basis.cols.iter().map(|&j| self.std.cost[j].clone()).collect();
        let u = self.lu.solve_transpose(&cj);
        let au = self.row_combination(&u);
        let reduced = self
            .nonbasic()
            .map(|v| {
                let d = if v < n {
                    &self.std.cost[v] - &au[v]
                } else {
                    let p = self.row_pos[v - n].expect("tight row");
                    let s = &u[p];
                    if self.std.rows[v - n].sigma > 0 {
                        -s
                    } else {
                        s.clone()
                    }
                };
                (v, d)
            })
            .collect();
        (u, reduced)
    }

    fn nonbasic(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.std.n;
        (0..n)
            .filter(|&j| self.col_pos[j].is_none())
            .chain(self.basis.rows.iter().map(move |&r| n + r))
            .collect::<Vec<_>>()
            .into_iter()
    }

    /// Change of `x` per unit increase of nonbasic variable `v`.
    fn direction(&self, v: usize) -> Vec<Rational> {
        let n = self.std.n;
        let k = self.basis.cols.len();
        let mut rhs = vec![Rational::zero(); k];
        if v < n {
            for (i, a) in &self.std.cols[v] {
                if let Some(p) = self.row_pos[*i] {
                    rhs[p] -= *a;
                }
            }
        } else {
            let p = self.row_pos[v - n].expect("tight row");
            rhs[p] = Rational::from_integer((-self.std.rows[v - n].sigma).into());
        }
        let dj = self.lu.solve(&rhs);
        let mut dx = vec![Rational::zero(); n];
        if v < n {
            dx[v] = Rational::one();
        }
        for (q, val) in dj.into_iter().enumerate() {
            dx[self.basis.cols[q]] = val;
        }
        dx
    }

    /// `a_i . dx` for every row, using the sparsity of `dx`.
    fn row_activity(&self, dx: &[Rational]) -> Vec<Rational> {
        let mut g = vec![Rational::zero(); self.std.num_rows()];
        for (j, v) in dx.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            for (i, a) in &self.std.cols[j] {
                g[*i] += *a * v;
            }
        }
        g
    }

    fn duals(&self, u: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.std.num_rows()];
        for (p, &r) in self.basis.rows.iter().enumerate() {
            out[r] = u[p].clone();
        }
        out
    }
}

enum Next {
    Pivot { enter: usize, leave: usize },
    Done(RawSolution),
}

fn primal_step(f: &Factored) -> Next {
    let n = f.std.n;
    let (u, reduced) = f.pricing(true);
    let Some(enter) = reduced.iter().filter(|(_, d)| d.is_positive()).map(|(v, _)| *v).min() else {
        return Next::Done(RawSolution::Optimal { x: f.x.clone(), duals: f.duals(&u) });
    };
    let dx = f.direction(enter);
    let g = f.row_activity(&dx);
    let mut best: Option<(Rational, usize)> = None;
    let mut offer = |ratio: Rational, var: usize| {
        let better = match &best {
            None => true,
            Some((r, v)) => ratio < *r || (ratio == *r && var < *v),
        };
        if better {
            best = Some((ratio, var));
        }
    };
    for &j in &f.basis.cols {
        if dx[j].is_negative() {
            offer(&f.x[j] / -&dx[j], j);
        }
    }
    for (i, row) in f.std.rows.iter().enumerate() {
        if f.row_pos[i].is_some() {
            continue;
        }
        // slack = sigma (b - a.x) changes by -sigma g_i.
        let ds = if row.sigma > 0 { -&g[i] } else { g[i].clone() };
        if ds.is_negative() {
            offer(f.slack(i) / -ds, n + i);
        }
    }
    match best {
        Some((_, leave)) => Next::Pivot { enter, leave },
        None => Next::Done(RawSolution::Unbounded { x: f.x.clone(), ray: dx }),
    }
}

fn dual_step(f: &Factored, leave: usize, use_costs: bool) -> Next {
    let n = f.std.n;
    let k = f.basis.cols.len();
    // The leaving variable equals h.x plus a constant.
    let mut h = vec![Rational::zero(); n];
    if leave < n {
        h[leave] = Rational::one();
    } else {
        let row = &f.std.rows[leave - n];
        for (j, a) in row.coeffs {
            h[*j] += if row.sigma > 0 { -a } else { a.clone() };
        }
    }
    let hj: Vec<Rational> = (0..k).map(|q| h[f.basis.cols[q]].clone()).collect();
    let rho = f.lu.solve_transpose(&hj);
    let arho = f.row_combination(&rho);
    let (_, reduced) = f.pricing(use_costs);
    let mut best: Option<(Rational, usize)> = None;
    for (v, d) in &reduced {
        let delta = if *v < n {
            &h[*v] - &arho[*v]
        } else {
            let p = f.row_pos[*v - n].expect("tight row");
            if f.std.rows[*v - n].sigma > 0 {
                -&rho[p]
            } else {
                rho[p].clone()
            }
        };
        if !delta.is_positive() {
            continue;
        }
        let ratio = -d / &delta;
        let better = match &best {
            None => true,
            Some((r, b)) => ratio < *r || (ratio == *r && *v < *b),
        };
        if better {
            best = Some((ratio, *v));
        }
    }
    if let Some((_, enter)) = best {
        return Next::Pivot { enter, leave };
    }
    let mut farkas = f.duals(&rho);
    if leave >= n {
        farkas[leave - n] = Rational::from_integer(f.std.rows[leave - n].sigma.into());
    }
    Next::Done(RawSolution::Infeasible { farkas })
}

fn dual_feasible(f: &Factored) -> bool {
    f.pricing(true).1.iter().all(|(_, d)| !d.is_positive())
}

/// Completes a solve exactly, starting from the basis the float simplex
/// settled on.
pub(crate) fn finish(std: &StdForm, guess: FloatOutcome) -> RawSolution {
    let start = Basis { cols: guess.structurals, rows: guess.tight };
    let mut f = match Factored::new(std, start) {
        Some(f) => f,
        None => {
            log::warn!("float basis is singular in exact arithmetic; restarting from the slack basis");
            Factored::new(std, Basis::default()).expect("empty basis")
        }
    };
    if guess.kind == Kind::Stalled {
        log::warn!("float simplex stalled; continuing exactly");
    }
    let mut steps = 0usize;
    // Set while restoring feasibility: whether the objective steers the ratio test.
    let mut repair_with_costs: Option<bool> = None;
    loop {
        let next = match f.infeasible_basic() {
            Some(leave) => {
                let use_costs = *repair_with_costs.get_or_insert_with(|| dual_feasible(&f));
                dual_step(&f, leave, use_costs)
            }
            None => {
                repair_with_costs = None;
                primal_step(&f)
            }
        };
        match next {
            Next::Done(raw) => {
                if steps > 0 {
                    log::debug!("exact simplex took {steps} pivots after the float basis");
                }
                return raw;
            }
            Next::Pivot { enter, leave } => {
                let mut basis = f.basis.clone();
                basis.exchange(std.n, enter, leave);
                f = Factored::new(std, basis).expect("pivot keeps the basis nonsingular");
                steps += 1;
            }
        }
    }
}
