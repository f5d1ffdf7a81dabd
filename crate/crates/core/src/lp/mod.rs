//! Linear programs over edge, range and point variables, and the simplex
//! machinery that solves them exactly.

mod builders;
mod dense;
mod export;
mod float;
mod lu;
mod revised;
mod std_form;

use std::fmt;

use num_traits::{Signed, Zero};

pub use builders::{
    build_dual, build_primal, build_separation, build_threshold, build_weighted_primal, edge_lengths, min_feasible_t,
    pair_index, pairs, Granularity, LENGTH_BITS,
};
pub use export::export_text;

use crate::error::{Error, Result};
use crate::num::{to_f64, Rational};
use crate::range_space::RangeSpace;
use std_form::StdForm;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VarName {
    Edge(usize, usize),
    Threshold,
    Range(usize),
    Point(usize),
    /// Multiplier of a standard row in a transposed program.
    Multiplier(usize),
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarName::Edge(a, b) => write!(f, "y_{a}_{b}"),
            VarName::Threshold => f.write_str("t"),
            VarName::Range(r) => write!(f, "z_l{r}"),
            VarName::Point(p) => write!(f, "z_p{p}"),
            VarName::Multiplier(i) => write!(f, "u_{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RowName {
    Range(usize),
    Cover(usize),
    Pair(usize, usize),
    Other(String),
}

impl fmt::Display for RowName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowName::Range(r) => write!(f, "range_{r}"),
            RowName::Cover(p) => write!(f, "cover_{p}"),
            RowName::Pair(a, b) => write!(f, "pair_{a}_{b}"),
            RowName::Other(s) => f.write_str(s),
        }
    }
}

/// `sum coeffs[k].1 * x[coeffs[k].0]  relation  rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub name: RowName,
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn activity(&self, x: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, a)| a * &x[*j]).sum()
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs = self.activity(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// A linear program with nonnegative variables.
#[derive(Clone, Debug, PartialEq)]
pub struct LpInstance {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub rows: Vec<Constraint>,
    pub vars: Vec<VarName>,
}

impl LpInstance {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &VarName) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Exact feasibility of `x`, including nonnegativity.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars() && x.iter().all(|v| !v.is_negative()) && self.rows.iter().all(|r| r.satisfied_by(x))
    }

    /// Checks the status claim of `sol` exactly: a primal point plus an
    /// optimal dual vector, a Farkas vector, or a feasible point plus an
    /// improving ray.
    pub fn verify(&self, sol: &FractionalSolution) -> bool {
        match sol.status {
            Status::Optimal => {
                self.is_feasible(&sol.values)
                    && self.objective_value(&sol.values) == sol.objective
                    && self.dual_feasible(&sol.duals)
                    && self.rows.iter().zip(&sol.duals).map(|(r, y)| &r.rhs * y).sum::<Rational>() == sol.objective
            }
            Status::Infeasible => self.is_farkas(&sol.duals),
            Status::Unbounded => self.is_feasible(&sol.values) && self.is_improving_ray(&sol.ray),
        }
    }

    fn column_products(&self, y: &[Rational]) -> Vec<Rational> {
        let mut aty = vec![Rational::zero(); self.num_vars()];
        for (row, yi) in self.rows.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (j, a) in &row.coeffs {
                aty[*j] += a * yi;
            }
        }
        aty
    }

    /// Sign pattern of a dual vector written for a maximization:
    /// `y >= 0` on `<=` rows and `y <= 0` on `>=` rows.
    fn max_form_signs_ok(&self, y: &[Rational]) -> bool {
        self.rows.iter().zip(y).all(|(r, v)| match r.relation {
            Relation::Le => !v.is_negative(),
            Relation::Ge => !v.is_positive(),
            Relation::Eq => true,
        })
    }

    fn dual_feasible(&self, y: &[Rational]) -> bool {
        if y.len() != self.rows.len() {
            return false;
        }
        let aty = self.column_products(y);
        match self.sense {
            Sense::Maximize => self.max_form_signs_ok(y) && aty.iter().zip(&self.objective).all(|(a, c)| a >= c),
            Sense::Minimize => {
                let neg: Vec<Rational> = y.iter().map(|v| -v).collect();
                self.max_form_signs_ok(&neg) && aty.iter().zip(&self.objective).all(|(a, c)| a <= c)
            }
        }
    }

    fn is_farkas(&self, y: &[Rational]) -> bool {
        if y.len() != self.rows.len() || !self.max_form_signs_ok(y) {
            return false;
        }
        let by: Rational = self.rows.iter().zip(y).map(|(r, v)| &r.rhs * v).sum();
        by.is_negative() && self.column_products(y).iter().all(|v| !v.is_negative())
    }

    fn is_improving_ray(&self, d: &[Rational]) -> bool {
        if d.len() != self.num_vars() || d.iter().any(Signed::is_negative) {
            return false;
        }
        let rows_ok = self.rows.iter().all(|r| {
            let a = r.activity(d);
            match r.relation {
                Relation::Le => !a.is_positive(),
                Relation::Ge => !a.is_negative(),
                Relation::Eq => a.is_zero(),
            }
        });
        let gain = self.objective_value(d);
        rows_ok
            && match self.sense {
                Sense::Maximize => gain.is_positive(),
                Sense::Minimize => gain.is_negative(),
            }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of a solve.
///
/// For `Optimal`, `values` is an optimal basic solution and `duals` a row
/// vector certifying optimality (`A^T y >= c` for maximization, `<= c` for
/// minimization, with `b.y` equal to the objective). For `Infeasible`,
/// `duals` is a Farkas vector (`y >= 0` on `<=` rows, `y <= 0` on `>=` rows,
/// `A^T y >= 0`, `b.y < 0`). For `Unbounded`, `values` is feasible and `ray`
/// an improving direction.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalSolution {
    pub status: Status,
    pub values: Vec<Rational>,
    pub objective: Rational,
    pub duals: Vec<Rational>,
    pub ray: Vec<Rational>,
}

impl FractionalSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    /// Dense tableau for small instances, certified floating-point guidance otherwise.
    #[default]
    Auto,
    /// Exact rational dense tableau with Bland's rule throughout.
    DenseExact,
    /// Floating-point simplex with lazy rows, followed by exact certification
    /// and exact Bland pivots where the certificate fails.
    Guided,
}

/// Below this many tableau entries the dense exact tableau is used directly.
const DENSE_LIMIT: usize = 12_000;

/// Solves `lp` exactly.
pub fn solve(lp: &LpInstance) -> FractionalSolution {
    solve_with(lp, Backend::Auto)
}

pub fn solve_with(lp: &LpInstance, backend: Backend) -> FractionalSolution {
    let std = StdForm::new(lp);
    let use_dense = match backend {
        Backend::DenseExact => true,
        Backend::Guided => false,
        Backend::Auto => use_dense(&std),
    };
    let raw = if use_dense { dense::solve(&std) } else { guided_solve(&std) };
    std.to_solution(raw)
}

fn use_dense(std: &StdForm) -> bool {
    std.num_rows() * (std.n + std.num_rows()) <= DENSE_LIMIT
}

/// The exact minimal threshold `t*` together with an optimal solution of
/// the primal at `t*` (or of the length-weighted primal when `weighted`).
#[derive(Clone, Debug)]
pub struct ThresholdSolve {
    pub t: Rational,
    pub lp: LpInstance,
    pub solution: FractionalSolution,
}

/// Solves the threshold program, then re-solves at `t*` warm-started from
/// the threshold basis: fixing `t <= t*` in the threshold program leaves
/// exactly the primal's feasible region.
pub fn solve_at_threshold(space: &RangeSpace, weighted: bool) -> Result<ThresholdSolve> {
    let build = |t: &Rational| if weighted { build_weighted_primal(space, t) } else { build_primal(space, t) };
    let threshold = build_threshold(space)?;
    let std_t = StdForm::new(&threshold);
    if use_dense(&std_t) {
        let t = optimum(std_t.to_solution(dense::solve(&std_t)))?;
        let lp = build(&t)?;
        let solution = solve(&lp);
        return Ok(ThresholdSolve { t, lp, solution });
    }
    let mut session = float::Session::new(&std_t);
    let kind = session.run();
    let t = optimum(std_t.to_solution(revised::finish(&std_t, session.snapshot(kind))))?;
    let lp = build(&t)?;
    let std_p = StdForm::new(&lp);
    let t_col = threshold.num_vars() - 1;
    let bound_row = session.add_upper_bound(t_col, to_f64(&t));
    let mut cost: Vec<f64> = std_p.cost.iter().map(to_f64).collect();
    cost.push(0.0);
    session.set_cost(cost);
    let kind = session.run();
    let tight = session.make_tight(bound_row, t_col);
    let guess = session.snapshot(kind);
    let raw = if tight && guess.structurals.contains(&t_col) {
        let guess = float::FloatOutcome {
            structurals: guess.structurals.into_iter().filter(|&j| j != t_col).collect(),
            tight: guess.tight.into_iter().filter(|&i| i != bound_row).collect(),
            ..guess
        };
        log::debug!("warm-started float simplex: {:?}", guess.kind);
        revised::finish(&std_p, guess)
    } else {
        log::debug!("warm start unusable; solving the primal from scratch");
        guided_solve(&std_p)
    };
    let solution = std_p.to_solution(raw);
    Ok(ThresholdSolve { t, lp, solution })
}

fn optimum(sol: FractionalSolution) -> Result<Rational> {
    match sol.status {
        Status::Optimal => Ok(sol.objective),
        Status::Infeasible => Err(Error::Infeasible),
        Status::Unbounded => Err(Error::Unbounded),
    }
}

/// Programs dominated by `>=` rows get no help from lazy rows, so their
/// basis is found on the transposed program instead.
fn prefers_transpose(std: &StdForm) -> bool {
    let ge = std.rows.iter().filter(|r| r.sigma < 0).count();
    2 * ge > std.num_rows()
}

/// Float basis of `std` read off an optimal basis of its transpose by
/// complementary slackness.
fn transposed_guess(std: &StdForm) -> Option<float::FloatOutcome> {
    let lp_t = std.transpose();
    let std_t = StdForm::new(&lp_t);
    let out = float::solve(&std_t);
    if out.kind != float::Kind::Optimal {
        log::debug!("transposed float simplex ended {:?}", out.kind);
        return None;
    }
    Some(float::FloatOutcome { kind: out.kind, structurals: out.tight, tight: out.structurals, pivots: out.pivots })
}

fn guided_solve(std: &StdForm) -> std_form::RawSolution {
    let started = std::time::Instant::now();
    let outcome = match prefers_transpose(std).then(|| transposed_guess(std)).flatten() {
        Some(guess) => guess,
        None => float::solve(std),
    };
    log::debug!(
        "float simplex: {:?} after {} pivots, {} tight rows, {:?}",
        outcome.kind,
        outcome.pivots,
        outcome.tight.len(),
        started.elapsed()
    );
    let started = std::time::Instant::now();
    let raw = revised::finish(std, outcome);
    log::debug!("exact completion took {:?}", started.elapsed());
    raw
}

#[cfg(test)]
mod tests;
