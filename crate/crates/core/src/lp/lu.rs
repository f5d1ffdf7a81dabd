//! Exact LU factorization of small square rational matrices.
//!
//! Pivots are chosen by a Markowitz-style count so that the 0/±1 constraint
//! matrices of the crossing LPs stay sparse during elimination.

use num_traits::Zero;

use crate::num::Rational;

#[derive(Debug)]
pub(crate) struct Singular;

pub(crate) struct ExactLu {
    k: usize,
    /// `(row, col)` of each elimination step.
    steps: Vec<(usize, usize)>,
    /// Row operations `row_i -= f * row_p`, in application order.
    ops: Vec<(usize, usize, Rational)>,
    /// Remaining entries of each pivot row when it was eliminated, pivot first.
    upper: Vec<Vec<(usize, Rational)>>,
}

impl ExactLu {
    pub(crate) fn factor(mut m: Vec<Vec<Rational>>) -> Result<Self, Singular> {
        let k = m.len();
        let mut row_count: Vec<usize> = m.iter().map(|r| r.iter().filter(|v| !v.is_zero()).count()).collect();
        let mut col_count = vec![0usize; k];
        for r in &m {
            for (j, v) in r.iter().enumerate() {
                if !v.is_zero() {
                    col_count[j] += 1;
                }
            }
        }
        let mut row_done = vec![false; k];
        let mut col_done = vec![false; k];
        let mut steps = Vec::with_capacity(k);
        let mut ops = Vec::new();
        let mut upper = vec![Vec::new(); k];

        for _ in 0..k {
            let q = (0..k)
                .filter(|&j| !col_done[j])
                .min_by_key(|&j| (if col_count[j] == 0 { usize::MAX } else { col_count[j] }, j))
                .ok_or(Singular)?;
            if col_count[q] == 0 {
                return Err(Singular);
            }
            let p = (0..k)
                .filter(|&i| !row_done[i] && !m[i][q].is_zero())
                .min_by_key(|&i| (row_count[i], i))
                .ok_or(Singular)?;
            row_done[p] = true;
            col_done[q] = true;
            steps.push((p, q));

            let pivot_row: Vec<(usize, Rational)> = (0..k)
                .filter(|&j| !col_done[j] || j == q)
                .filter(|&j| !m[p][j].is_zero())
                .map(|j| (j, m[p][j].clone()))
                .collect();
            for &(j, _) in &pivot_row {
                col_count[j] -= 1;
            }
            let pivot = m[p][q].clone();
            for i in 0..k {
                if row_done[i] || m[i][q].is_zero() {
                    continue;
                }
                let f = &m[i][q] / &pivot;
                for (j, v) in &pivot_row {
                    let before = m[i][*j].is_zero();
                    let updated = &m[i][*j] - &f * v;
                    let after = updated.is_zero();
                    m[i][*j] = updated;
                    if *j == q {
                        continue;
                    }
                    match (before, after) {
                        (true, false) => {
                            row_count[i] += 1;
                            col_count[*j] += 1;
                        }
                        (false, true) => {
                            row_count[i] -= 1;
                            col_count[*j] -= 1;
                        }
                        _ => {}
                    }
                }
                m[i][q] = Rational::zero();
                row_count[i] -= 1;
                ops.push((i, p, f));
            }
            let mut u = pivot_row;
            let pos = u.iter().position(|(j, _)| *j == q).expect("pivot entry");
            u.swap(0, pos);
            upper[p] = u;
        }
        Ok(Self { k, steps, ops, upper })
    }

    /// Solves `A x = b`; `x` is indexed by column.
    pub(crate) fn solve(&self, b: &[Rational]) -> Vec<Rational> {
        let mut y = b.to_vec();
        for (i, p, f) in &self.ops {
            if !y[*p].is_zero() {
                let delta = f * &y[*p];
                y[*i] -= delta;
            }
        }
        let mut x = vec![Rational::zero(); self.k];
        for &(p, q) in self.steps.iter().rev() {
            let row = &self.upper[p];
            let mut acc = y[p].clone();
            for (j, v) in &row[1..] {
                if !x[*j].is_zero() {
                    acc -= v * &x[*j];
                }
            }
            x[q] = acc / &row[0].1;
        }
        x
    }

    /// Solves `A^T u = c`; `c` is indexed by column, `u` by row.
    pub(crate) fn solve_transpose(&self, c: &[Rational]) -> Vec<Rational> {
        let mut acc = c.to_vec();
        let mut w = vec![Rational::zero(); self.k];
        for &(p, q) in &self.steps {
            let row = &self.upper[p];
            let wp = &acc[q] / &row[0].1;
            if !wp.is_zero() {
                for (j, v) in &row[1..] {
                    acc[*j] -= v * &wp;
                }
            }
            w[p] = wp;
        }
        for (i, p, f) in self.ops.iter().rev() {
            if !w[*i].is_zero() {
                let delta = f * &w[*i];
                w[*p] -= delta;
            }
        }
        w
    }
}
