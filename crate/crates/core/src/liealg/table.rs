//! Commutator tables (plain text, LaTeX) and JSON structure-constant dumps.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::LieAlgebra;
use crate::symexpr::Rational;

/// `Σ v_k name_k` as text, e.g. `X1 - 2*X3`; zero prints as `0`.
pub fn combination_text(v: &[Rational], names: &[String]) -> String {
    combination(v, names, |n| n.to_string(), "*")
}

fn combination(v: &[Rational], names: &[String], fmt_name: impl Fn(&str) -> String, times: &str) -> String {
    let mut out = String::new();
    for (q, n) in v.iter().zip(names) {
        if q.is_zero() {
            continue;
        }
        let neg = q.is_negative();
        let a = q.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if !a.is_one() {
            out.push_str(&format!("{a}{times}"));
        }
        out.push_str(&fmt_name(n));
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Plain-text commutator table; entry `(i, j)` is `[X_i, X_j]`.
pub fn commutator_table_text(g: &LieAlgebra) -> String {
    let m = g.dim();
    let names = g.names();
    let mut cells = vec![vec![String::new(); m + 1]; m + 1];
    cells[0][0] = "[ , ]".into();
    for i in 0..m {
        cells[0][i + 1] = names[i].clone();
        cells[i + 1][0] = names[i].clone();
        for j in 0..m {
            cells[i + 1][j + 1] = combination_text(g.basis_bracket(i, j), names);
        }
    }
    let widths: Vec<usize> = (0..=m)
        .map(|c| cells.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for (r, row) in cells.iter().enumerate() {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect();
        out.push_str(line.join(" | ").trim_end());
        out.push('\n');
        if r == 0 {
            let sep: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            out.push_str(&sep.join("-+-"));
            out.push('\n');
        }
    }
    out
}

fn latex_name(n: &str) -> String {
    let digits = n.trim_start_matches(|c: char| !c.is_ascii_digit());
    let stem = &n[..n.len() - digits.len()];
    if !digits.is_empty() && stem.len() == 1 {
        format!("{{\\bf {stem}}}_{{{digits}}}")
    } else {
        format!("\\mathrm{{{n}}}")
    }
}

/// LaTeX `tabular` commutator table.
pub fn commutator_table_latex(g: &LieAlgebra) -> String {
    let m = g.dim();
    let names = g.names();
    let mut out = String::new();
    out.push_str("\\begin{tabular}{");
    out.push_str("c ".repeat(m + 1).trim_end());
    out.push_str("}\n\\hline\\hline\n");
    let header: Vec<String> = std::iter::once("[~,~]".to_string())
        .chain(names.iter().map(|n| format!("${}$", latex_name(n))))
        .collect();
    out.push_str(&header.join(" & "));
    out.push_str(" \\\\\n\\hline\n");
    for i in 0..m {
        let mut row = vec![format!("${}$", latex_name(&names[i]))];
        for j in 0..m {
            let v = g.basis_bracket(i, j);
            let s = combination(v, names, latex_name, " ");
            row.push(if s == "0" { s } else { format!("${s}$") });
        }
        out.push_str(&row.join(" & "));
        out.push_str(" \\\\\n\\hline\n");
    }
    out.push_str("\\end{tabular}\n");
    out
}

/// `{ basis: [names], c: [[i, j, k, value], …] }` with 1-based indices and
/// only `i < j`, nonzero entries.
pub fn structure_json(g: &LieAlgebra) -> Value {
    let m = g.dim();
    let mut c = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in 0..m {
                let v = g.constant(i, j, k);
                if !v.is_zero() {
                    c.push(json!([i + 1, j + 1, k + 1, v.to_string()]));
                }
            }
        }
    }
    json!({ "basis": g.names(), "c": c })
}
