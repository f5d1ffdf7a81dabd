use std::fmt::Write;

use super::{LpInstance, Sense};
use crate::num::{fmt_rational, Rational};

fn term(out: &mut String, first: bool, coeff: &Rational, name: &str) {
    let text = fmt_rational(coeff);
    match (first, text.strip_prefix('-')) {
        (true, Some(abs)) => write!(out, "-{abs} {name}"),
        (true, None) => write!(out, "{text} {name}"),
        (false, Some(abs)) => write!(out, " - {abs} {name}"),
        (false, None) => write!(out, " + {text} {name}"),
    }
    .expect("write to string");
}

/// Plain sectioned text: objective, one row per line, bounds. Coefficients
/// are exact `p/q` rationals.
pub fn export_text(lp: &LpInstance) -> String {
    let mut out = String::new();
    out.push_str(match lp.sense {
        Sense::Maximize => "maximize\n",
        Sense::Minimize => "minimize\n",
    });
    out.push_str("  obj:");
    let mut first = true;
    for (j, c) in lp.objective.iter().enumerate() {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        if first {
            out.push(' ');
        }
        term(&mut out, first, c, &lp.vars[j].to_string());
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
    out.push_str("\nsubject to\n");
    for row in &lp.rows {
        write!(out, "  {}:", row.name).expect("write to string");
        if row.coeffs.is_empty() {
            out.push_str(" 0");
        }
        for (k, (j, a)) in row.coeffs.iter().enumerate() {
            if k == 0 {
                out.push(' ');
            }
            term(&mut out, k == 0, a, &lp.vars[*j].to_string());
        }
        writeln!(out, " {} {}", row.relation, fmt_rational(&row.rhs)).expect("write to string");
    }
    out.push_str("bounds\n");
    for v in &lp.vars {
        writeln!(out, "  {v} >= 0").expect("write to string");
    }
    out.push_str("end\n");
    out
}
