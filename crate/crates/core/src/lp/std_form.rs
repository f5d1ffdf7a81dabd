//! Maximization form shared by the solvers: `max c.x` subject to
//! `a_i.x + sigma_i s_i = b_i` with `x, s >= 0`. Equalities become a `<=`
//! row and a `>=` row. Slack `i` has column index `n + i`.

use num_traits::{Signed, Zero};

use super::{Constraint, FractionalSolution, LpInstance, Relation, RowName, Sense, Status, VarName};
use crate::num::Rational;

pub(crate) struct StdRow<'a> {
    pub coeffs: &'a [(usize, Rational)],
    /// +1 for `<=`, -1 for `>=`.
    pub sigma: i8,
    pub rhs: &'a Rational,
    pub origin: usize,
}

impl StdRow<'_> {
    pub fn activity(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (j, a) in self.coeffs {
            if !x[*j].is_zero() {
                acc += a * &x[*j];
            }
        }
        acc
    }

    /// Exact slack value `sigma (b - a.x)`.
    pub fn slack(&self, x: &[Rational]) -> Rational {
        let gap = self.rhs - self.activity(x);
        if self.sigma > 0 {
            gap
        } else {
            -gap
        }
    }
}

pub(crate) struct StdForm<'a> {
    pub lp: &'a LpInstance,
    pub n: usize,
    pub cost: Vec<Rational>,
    pub rows: Vec<StdRow<'a>>,
    /// Column view: `(row, coefficient)` per structural.
    pub cols: Vec<Vec<(usize, &'a Rational)>>,
}

pub(crate) enum RawSolution {
    /// `duals` are max-form multipliers per standard row: `A^T u >= c`,
    /// `sigma_i u_i >= 0`.
    Optimal { x: Vec<Rational>, duals: Vec<Rational> },
    /// `sigma_i u_i >= 0`, `A^T u >= 0`, `b.u < 0`.
    Infeasible { farkas: Vec<Rational> },
    Unbounded { x: Vec<Rational>, ray: Vec<Rational> },
}

impl<'a> StdForm<'a> {
    pub fn new(lp: &'a LpInstance) -> Self {
        let n = lp.num_vars();
        let cost = match lp.sense {
            Sense::Maximize => lp.objective.clone(),
            Sense::Minimize => lp.objective.iter().map(|c| -c).collect(),
        };
        let mut rows = Vec::with_capacity(lp.rows.len());
        for (origin, row) in lp.rows.iter().enumerate() {
            let signs: &[i8] = match row.relation {
                Relation::Le => &[1],
                Relation::Ge => &[-1],
                Relation::Eq => &[1, -1],
            };
            for &sigma in signs {
                rows.push(StdRow { coeffs: &row.coeffs, sigma, rhs: &row.rhs, origin });
            }
        }
        let mut cols = vec![Vec::new(); n];
        for (i, row) in rows.iter().enumerate() {
            for (j, a) in row.coeffs {
                if !a.is_zero() {
                    cols[*j].push((i, a));
                }
            }
        }
        Self { lp, n, cost, rows, cols }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// The LP dual in the substituted variables `v_i = sigma_i u_i >= 0`:
    /// `max -sum sigma_i b_i v_i` subject to `sum_i sigma_i a_ij v_i >= c_j`
    /// for every column `j`. Row `j` of the result belongs to column `j`;
    /// only its orientation may differ.
    pub fn transpose(&self) -> LpInstance {
        let sign = |i: usize, v: &Rational| if self.rows[i].sigma > 0 { v.clone() } else { -v };
        let objective = self.rows.iter().enumerate().map(|(i, r)| -sign(i, r.rhs)).collect();
        let rows = self
            .cols
            .iter()
            .zip(&self.cost)
            .enumerate()
            .map(|(j, (col, c))| {
                let coeffs = col.iter().map(|&(i, a)| (i, sign(i, a)));
                let name = RowName::Other(format!("col_{j}"));
                // Negated when that makes the slack basis feasible, so the
                // float phase can treat the row lazily.
                if c.is_positive() {
                    Constraint { name, coeffs: coeffs.collect(), relation: Relation::Ge, rhs: c.clone() }
                } else {
                    Constraint { name, coeffs: coeffs.map(|(i, a)| (i, -a)).collect(), relation: Relation::Le, rhs: -c }
                }
            })
            .collect();
        LpInstance {
            sense: Sense::Maximize,
            objective,
            rows,
            vars: (0..self.num_rows()).map(VarName::Multiplier).collect(),
        }
    }

    /// Fold standard-row multipliers back onto the original rows and
    /// switch to the caller's sign convention.
    fn fold(&self, std: &[Rational], negate: bool) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.lp.rows.len()];
        for (row, v) in self.rows.iter().zip(std) {
            out[row.origin] += v;
        }
        if negate {
            for v in &mut out {
                *v = -&*v;
            }
        }
        out
    }

    pub fn to_solution(&self, raw: RawSolution) -> FractionalSolution {
        let zeros = || vec![Rational::zero(); self.n];
        match raw {
            RawSolution::Optimal { x, duals } => {
                let objective = self.lp.objective_value(&x);
                let duals = self.fold(&duals, self.lp.sense == Sense::Minimize);
                FractionalSolution { status: Status::Optimal, values: x, objective, duals, ray: zeros() }
            }
            RawSolution::Infeasible { farkas } => FractionalSolution {
                status: Status::Infeasible,
                values: zeros(),
                objective: Rational::zero(),
                duals: self.fold(&farkas, false),
                ray: zeros(),
            },
            RawSolution::Unbounded { x, ray } => {
                let objective = self.lp.objective_value(&x);
                FractionalSolution {
                    status: Status::Unbounded,
                    values: x,
                    objective,
                    duals: vec![Rational::zero(); self.lp.rows.len()],
                    ray,
                }
            }
        }
    }
}
