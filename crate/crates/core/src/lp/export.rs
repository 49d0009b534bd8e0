use std::fmt::Write;

use super::{Problem, RowSense};

fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

fn push_terms(out: &mut String, terms: &[(usize, f64)], col_names: &[String]) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (k, &(c, v)) in terms.iter().enumerate() {
        let sign = if v < 0.0 { " -" } else if k == 0 { "" } else { " +" };
        let mag = v.abs();
        if mag == 1.0 {
            let _ = write!(out, "{sign} {}", col_names[c]);
        } else {
            let _ = write!(out, "{sign} {} {}", num(mag), col_names[c]);
        }
        if k % 8 == 7 && k + 1 < terms.len() {
            out.push_str("\n   ");
        }
    }
}

/// Renders `p` in CPLEX LP format. Names must be unique LP identifiers.
pub fn write_lp_format(p: &Problem, title: &str, col_names: &[String], row_names: &[String]) -> String {
    assert_eq!(col_names.len(), p.num_cols());
    assert_eq!(row_names.len(), p.num_rows());
    let mut out = String::new();
    let _ = writeln!(out, "\\ {title}");
    if p.objective_offset != 0.0 {
        let _ = writeln!(out, "\\ objective constant {}", num(p.objective_offset));
    }
    out.push_str("Minimize\n obj:");
    let obj: Vec<(usize, f64)> =
        p.objective.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(j, &c)| (j, c)).collect();
    push_terms(&mut out, &obj, col_names);
    out.push_str("\nSubject To\n");

    let rows = p.matrix.rows();
    for (i, terms) in rows.iter().enumerate() {
        let (lo, hi) = (p.row_lower[i], p.row_upper[i]);
        match p.row_sense(i) {
            RowSense::Free => {
                let _ = writeln!(out, "\\ {} is free", row_names[i]);
                continue;
            }
            RowSense::Range => {
                let _ = write!(out, " {}: {} <=", row_names[i], num(lo));
                push_terms(&mut out, terms, col_names);
                let _ = writeln!(out, " <= {}", num(hi));
                continue;
            }
            _ => {}
        }
        let _ = write!(out, " {}:", row_names[i]);
        push_terms(&mut out, terms, col_names);
        let tail = match p.row_sense(i) {
            RowSense::Equal => format!(" = {}", num(lo)),
            RowSense::LessEqual => format!(" <= {}", num(hi)),
            _ => format!(" >= {}", num(lo)),
        };
        let _ = writeln!(out, "{tail}");
    }

    out.push_str("Bounds\n");
    for j in 0..p.num_cols() {
        let (lo, hi) = (p.col_lower[j], p.col_upper[j]);
        let name = &col_names[j];
        let _ = match (lo.is_finite(), hi.is_finite()) {
            (false, false) => writeln!(out, " {name} free"),
            _ if lo == hi => writeln!(out, " {name} = {}", num(lo)),
            (true, false) if lo == 0.0 => Ok(()),
            _ => writeln!(out, " {} <= {name} <= {}", num(lo), num(hi)),
        };
    }
    out.push_str("End\n");
    out
}
