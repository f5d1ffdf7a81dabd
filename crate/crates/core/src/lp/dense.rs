//! Two-phase dense rational tableau with Bland's rule.

use num_traits::{One, Signed, Zero};

use super::std_form::{RawSolution, StdForm};
use crate::num::Rational;

struct Tableau {
    /// Rows over `n` structurals, `m` slacks and the artificials.
    t: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs `c_B B^-1 A_k - c_k`; optimal when all are >= 0.
    obj: Vec<Rational>,
}

enum Outcome {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, k: usize) {
        let p = self.t[r][k].clone();
        if !p.is_one() {
            for v in &mut self.t[r] {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let prow: Vec<(usize, Rational)> =
            self.t[r].iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect();
        let prhs = self.rhs[r].clone();
        for i in 0..self.t.len() {
            if i == r || self.t[i][k].is_zero() {
                continue;
            }
            let f = self.t[i][k].clone();
            for (j, v) in &prow {
                let d = &f * v;
                self.t[i][*j] -= d;
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !self.obj[k].is_zero() {
            let f = self.obj[k].clone();
            for (j, v) in &prow {
                let d = &f * v;
                self.obj[*j] -= d;
            }
        }
        self.basis[r] = k;
    }

    /// Primal simplex with Bland's rule over columns `< limit`.
    fn run(&mut self, limit: usize) -> Outcome {
        loop {
            let Some(k) = (0..limit).find(|&k| self.obj[k].is_negative()) else {
                return Outcome::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.t.len() {
                if !self.t[r][k].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / &self.t[r][k];
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, k),
                None => return Outcome::Unbounded(k),
            }
        }
    }

    fn set_costs(&mut self, cost: &[Rational]) {
        let width = self.obj.len();
        let mut obj: Vec<Rational> = (0..width).map(|k| cost.get(k).map_or_else(Rational::zero, |c| -c)).collect();
        for (r, &b) in self.basis.iter().enumerate() {
            let Some(cb) = cost.get(b) else { continue };
            if cb.is_zero() {
                continue;
            }
            for (k, v) in self.t[r].iter().enumerate() {
                if !v.is_zero() {
                    obj[k] += cb * v;
                }
            }
        }
        self.obj = obj;
    }

    fn slack_multipliers(&self, std: &StdForm) -> Vec<Rational> {
        std.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let z = &self.obj[std.n + i];
                if row.sigma > 0 {
                    z.clone()
                } else {
                    -z
                }
            })
            .collect()
    }
}

pub(crate) fn solve(std: &StdForm) -> RawSolution {
    let n = std.n;
    let m = std.num_rows();
    let mut flip = vec![false; m];
    let mut artificial_rows = Vec::new();
    for (i, row) in std.rows.iter().enumerate() {
        flip[i] = row.rhs.is_negative();
        let slack_coeff = if flip[i] { -row.sigma } else { row.sigma };
        if slack_coeff < 0 {
            artificial_rows.push(i);
        }
    }
    let width = n + m + artificial_rows.len();
    let mut t = vec![vec![Rational::zero(); width]; m];
    let mut rhs = Vec::with_capacity(m);
    let mut basis = vec![0; m];
    for (i, row) in std.rows.iter().enumerate() {
        let s = if flip[i] { -Rational::one() } else { Rational::one() };
        for (j, a) in row.coeffs {
            t[i][*j] += a * &s;
        }
        t[i][n + i] = &s * Rational::from_integer(row.sigma.into());
        rhs.push(row.rhs * &s);
        basis[i] = n + i;
    }
    for (a, &i) in artificial_rows.iter().enumerate() {
        t[i][n + m + a] = Rational::one();
        basis[i] = n + m + a;
    }
    let mut tab = Tableau { t, rhs, basis, obj: vec![Rational::zero(); width] };

    if !artificial_rows.is_empty() {
        let mut phase1 = vec![Rational::zero(); width];
        for c in &mut phase1[n + m..] {
            *c = -Rational::one();
        }
        tab.set_costs(&phase1);
        // Phase 1 is bounded above by zero.
        let _ = tab.run(width);
        let value: Rational = tab.basis.iter().zip(&tab.rhs).filter(|(b, _)| **b >= n + m).map(|(_, v)| v.clone()).sum();
        if value.is_positive() {
            return RawSolution::Infeasible { farkas: tab.slack_multipliers(std) };
        }
        for r in 0..m {
            if tab.basis[r] < n + m {
                continue;
            }
            if let Some(k) = (0..n + m).find(|&k| !tab.t[r][k].is_zero()) {
                tab.pivot(r, k);
            }
        }
    }

    let mut cost = std.cost.clone();
    cost.resize(n + m, Rational::zero());
    tab.set_costs(&cost);
    let outcome = tab.run(n + m);
    let mut x = vec![Rational::zero(); n];
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs[r].clone();
        }
    }
    match outcome {
        Outcome::Optimal => RawSolution::Optimal { x, duals: tab.slack_multipliers(std) },
        Outcome::Unbounded(k) => {
            let mut ray = vec![Rational::zero(); n];
            if k < n {
                ray[k] = Rational::one();
            }
            for (r, &b) in tab.basis.iter().enumerate() {
                if b < n {
                    ray[b] = -&tab.t[r][k];
                }
            }
            RawSolution::Unbounded { x, ray }
        }
    }
}
