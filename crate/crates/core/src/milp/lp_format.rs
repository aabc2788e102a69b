use std::fmt::Write as _;

use super::model::{MilpModel, RowSense, VarKind};

fn sanitize(name: &str) -> String {
    let mut out: String =
        name.chars().map(|c| if c.is_ascii_alphanumeric() || "_.".contains(c) { c } else { '_' }).collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        out.insert(0, '_');
    }
    out
}

fn term(coef: f64, name: &str, first: bool) -> String {
    match (coef < 0.0, first) {
        (true, _) => format!(" - {} {name}", -coef),
        (false, true) => format!(" {coef} {name}"),
        (false, false) => format!(" + {coef} {name}"),
    }
}

/// Renders the model in CPLEX LP format. Variable names are made
/// LP-safe and suffixed with their index so they stay unique.
pub fn to_lp_string(model: &MilpModel) -> String {
    let names: Vec<String> =
        model.variables().iter().enumerate().map(|(i, v)| format!("{}_{i}", sanitize(&v.name))).collect();
    let mut s = String::new();
    s.push_str("Minimize\n obj:");
    let mut first = true;
    for (v, name) in model.variables().iter().zip(&names) {
        if v.objective != 0.0 {
            s.push_str(&term(v.objective, name, first));
            first = false;
        }
    }
    if first {
        s.push_str(" 0");
    }
    s.push_str("\nSubject To\n");
    for (i, c) in model.constraints().iter().enumerate() {
        let _ = write!(s, " {}_{i}:", sanitize(&c.family));
        if c.terms.is_empty() {
            s.push_str(" 0");
        }
        for (j, &(v, coef)) in c.terms.iter().enumerate() {
            s.push_str(&term(coef, &names[v.index()], j == 0));
        }
        let op = match c.sense {
            RowSense::Le => "<=",
            RowSense::Ge => ">=",
            RowSense::Eq => "=",
        };
        let _ = writeln!(s, " {op} {}", c.rhs);
    }
    s.push_str("Bounds\n");
    for (v, name) in model.variables().iter().zip(&names) {
        let _ = match (v.lower.is_finite(), v.upper.is_finite()) {
            (true, true) => writeln!(s, " {} <= {name} <= {}", v.lower, v.upper),
            (true, false) => writeln!(s, " {name} >= {}", v.lower),
            (false, true) => writeln!(s, " -inf <= {name} <= {}", v.upper),
            (false, false) => writeln!(s, " {name} free"),
        };
    }
    let binaries: Vec<&String> =
        model.variables().iter().zip(&names).filter(|(v, _)| v.kind == VarKind::Binary).map(|(_, n)| n).collect();
    if !binaries.is_empty() {
        s.push_str("Binaries\n");
        for chunk in binaries.chunks(8) {
            let line: Vec<&str> = chunk.iter().map(|n| n.as_str()).collect();
            let _ = writeln!(s, " {}", line.join(" "));
        }
    }
    s.push_str("End\n");
    s
}
