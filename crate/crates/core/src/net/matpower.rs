//! Reader and writer for the subset of the MATPOWER case format used here.
//!
//! Only `mpc.baseMVA`, `mpc.bus`, `mpc.gen` and `mpc.branch` are read; every
//! other field is skipped. Resistance, shunts, tap ratios and ratings are
//! ignored because the islanding models are pure DC.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::case::{Branch, Bus, BusId, NetworkCase};
use crate::error::{Error, Result};

// Zero-based column indices.
const BUS_I: usize = 0;
const BUS_TYPE: usize = 1;
const PD: usize = 2;
const GEN_BUS: usize = 0;
const PG: usize = 1;
const GEN_STATUS: usize = 7;
const F_BUS: usize = 0;
const T_BUS: usize = 1;
const BR_X: usize = 3;
const BR_STATUS: usize = 10;

const ISOLATED_BUS: f64 = 4.0;

#[derive(Debug, Default)]
struct RawCase {
    base_mva: Option<f64>,
    bus: Vec<(usize, Vec<f64>)>,
    gen: Vec<(usize, Vec<f64>)>,
    branch: Vec<(usize, Vec<f64>)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Block {
    None,
    Matrix(Target),
    Skip { closer: char },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Target {
    Bus,
    Gen,
    Branch,
    Other,
}

fn strip_comment(line: &str) -> &str {
    let mut in_str = false;
    for (i, c) in line.char_indices() {
        match c {
            '\'' => in_str = !in_str,
            '%' | '#' if !in_str => return &line[..i],
            _ => {}
        }
    }
    line
}

fn parse_row(text: &str, line: usize, min_cols: usize) -> Result<Vec<f64>> {
    let row = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| parse_number(t).ok_or_else(|| Error::Parse { line, message: format!("invalid numeric token '{t}'") }))
        .collect::<Result<Vec<f64>>>()?;
    if row.len() < min_cols {
        return Err(Error::Parse {
            line,
            message: format!("expected at least {min_cols} columns, found {}", row.len()),
        });
    }
    Ok(row)
}

fn parse_number(token: &str) -> Option<f64> {
    match token {
        "Inf" | "inf" => Some(f64::INFINITY),
        "-Inf" | "-inf" => Some(f64::NEG_INFINITY),
        _ => token.parse().ok(),
    }
}

fn tokenize(text: &str) -> Result<RawCase> {
    let mut raw = RawCase::default();
    let mut block = Block::None;

    for (lineno, full) in text.lines().enumerate() {
        let line = lineno + 1;
        let mut rest = strip_comment(full).trim();

        loop {
            match block {
                Block::None => {
                    if rest.is_empty() {
                        break;
                    }
                    let Some(eq) = rest.find('=') else {
                        break;
                    };
                    let lhs = rest[..eq].trim();
                    let rhs = rest[eq + 1..].trim();
                    let field = lhs.strip_prefix("mpc.").unwrap_or(lhs);
                    if let Some(after) = rhs.strip_prefix('[') {
                        block = Block::Matrix(match field {
                            "bus" => Target::Bus,
                            "gen" => Target::Gen,
                            "branch" => Target::Branch,
                            _ => Target::Other,
                        });
                        rest = after;
                        continue;
                    }
                    if let Some(after) = rhs.strip_prefix('{') {
                        block = Block::Skip { closer: '}' };
                        rest = after;
                        continue;
                    }
                    if field == "baseMVA" {
                        let value = rhs.trim_end_matches(';').trim();
                        let v = parse_number(value)
                            .ok_or_else(|| Error::Parse { line, message: format!("invalid baseMVA '{value}'") })?;
                        raw.base_mva = Some(v);
                    }
                    break;
                }
                Block::Skip { closer } => match rest.find(closer) {
                    Some(pos) => {
                        block = Block::None;
                        rest = rest[pos + 1..].trim_start_matches(';').trim();
                    }
                    None => break,
                },
                Block::Matrix(target) => {
                    let (body, closed) = match rest.find(']') {
                        Some(pos) => (&rest[..pos], true),
                        None => (rest, false),
                    };
                    for piece in body.split(';') {
                        if piece.trim().is_empty() {
                            continue;
                        }
                        let (dest, min_cols) = match target {
                            Target::Bus => (&mut raw.bus, PD + 1),
                            Target::Gen => (&mut raw.gen, GEN_STATUS + 1),
                            Target::Branch => (&mut raw.branch, BR_STATUS + 1),
                            Target::Other => continue,
                        };
                        dest.push((line, parse_row(piece, line, min_cols)?));
                    }
                    if closed {
                        block = Block::None;
                    }
                    break;
                }
            }
        }
    }
    if let Block::Matrix(_) = block {
        return Err(Error::Parse { line: text.lines().count(), message: "unterminated matrix".into() });
    }
    Ok(raw)
}

fn bus_id(value: f64, line: usize) -> Result<BusId> {
    if value.fract() != 0.0 || !(value >= 0.0) || value > BusId::MAX as f64 {
        return Err(Error::Parse { line, message: format!("invalid bus number {value}") });
    }
    Ok(value as BusId)
}

/// Parses MATPOWER case text into a per-unit [`NetworkCase`].
///
/// Out-of-service branches and generators are dropped, isolated buses
/// (type 4) are removed, parallel circuits are merged by adding their
/// susceptances. Negative demand is booked as generation and negative
/// generator output as demand, so that both stay nonnegative. Flow limits
/// default to `b * pi / 4`.
pub fn parse_case(text: &str) -> Result<NetworkCase> {
    let raw = tokenize(text)?;
    let base_mva = raw.base_mva.ok_or_else(|| Error::Parse { line: 0, message: "missing mpc.baseMVA".into() })?;
    if !(base_mva > 0.0) {
        return Err(Error::Parse { line: 0, message: format!("baseMVA must be positive, got {base_mva}") });
    }
    if raw.bus.is_empty() {
        return Err(Error::Parse { line: 0, message: "missing mpc.bus".into() });
    }

    let mut buses = Vec::with_capacity(raw.bus.len());
    let mut index: HashMap<BusId, usize> = HashMap::new();
    let mut isolated = std::collections::HashSet::new();
    for (line, row) in &raw.bus {
        let id = bus_id(row[BUS_I], *line)?;
        if row[BUS_TYPE] == ISOLATED_BUS {
            isolated.insert(id);
            continue;
        }
        if index.insert(id, buses.len()).is_some() {
            return Err(Error::Parse { line: *line, message: format!("duplicate bus {id}") });
        }
        let pd = row[PD] / base_mva;
        buses.push(Bus { id, load_pu: pd.max(0.0), gen_pu: (-pd).max(0.0) });
    }

    for (line, row) in &raw.gen {
        if row[GEN_STATUS] <= 0.0 {
            continue;
        }
        let id = bus_id(row[GEN_BUS], *line)?;
        if isolated.contains(&id) {
            continue;
        }
        let &i = index
            .get(&id)
            .ok_or_else(|| Error::Parse { line: *line, message: format!("generator at unknown bus {id}") })?;
        let pg = row[PG] / base_mva;
        if pg >= 0.0 {
            buses[i].gen_pu += pg;
        } else {
            buses[i].load_pu -= pg;
        }
    }

    // Merge parallel circuits, keeping the orientation of the first one seen.
    let mut branches: Vec<Branch> = Vec::new();
    let mut by_pair: HashMap<(usize, usize), usize> = HashMap::new();
    for (line, row) in &raw.branch {
        if row[BR_STATUS] <= 0.0 {
            continue;
        }
        let (f_id, t_id) = (bus_id(row[F_BUS], *line)?, bus_id(row[T_BUS], *line)?);
        if isolated.contains(&f_id) || isolated.contains(&t_id) {
            continue;
        }
        let lookup = |id: BusId| {
            index
                .get(&id)
                .copied()
                .ok_or_else(|| Error::Parse { line: *line, message: format!("branch references unknown bus {id}") })
        };
        let (f, t) = (lookup(f_id)?, lookup(t_id)?);
        if f == t {
            return Err(Error::Parse { line: *line, message: format!("self-loop at bus {f_id}") });
        }
        let x = row[BR_X];
        if !(x > 0.0) {
            return Err(Error::Unsupported(format!(
                "branch {f_id}-{t_id} (line {line}) has reactance {x}; only x > 0 is supported"
            )));
        }
        let key = (f.min(t), f.max(t));
        match by_pair.get(&key) {
            Some(&e) => {
                let merged = &mut branches[e];
                *merged = Branch::new(merged.from, merged.to, merged.susceptance_pu + 1.0 / x);
            }
            None => {
                by_pair.insert(key, branches.len());
                branches.push(Branch::new(f, t, 1.0 / x));
            }
        }
    }

    NetworkCase::new(base_mva, buses, branches)
}

/// Writes a case back out in MATPOWER syntax.
///
/// Each bus gets one aggregated generator row when it has generation, and each
/// merged branch is written as a single circuit with `x = 1/b`.
pub fn write_case(case: &NetworkCase) -> String {
    let base = case.base_mva();
    let mut out = String::new();
    let _ = writeln!(out, "function mpc = case_export\nmpc.version = '2';");
    let _ = writeln!(out, "mpc.baseMVA = {base};");
    let _ = writeln!(out, "%\tbus_i\ttype\tPd\tQd\tGs\tBs\tarea\tVm\tVa\tbaseKV\tzone\tVmax\tVmin");
    let _ = writeln!(out, "mpc.bus = [");
    for (i, bus) in case.buses().iter().enumerate() {
        let kind = if i == 0 { 3 } else { 1 };
        let _ = writeln!(out, "\t{}\t{kind}\t{}\t0\t0\t0\t1\t1\t0\t0\t1\t1.1\t0.9;", bus.id, bus.load_pu * base);
    }
    let _ = writeln!(out, "];\n%\tbus\tPg\tQg\tQmax\tQmin\tVg\tmBase\tstatus\tPmax\tPmin");
    let _ = writeln!(out, "mpc.gen = [");
    for bus in case.buses().iter().filter(|b| b.gen_pu > 0.0) {
        let pg = bus.gen_pu * base;
        let _ = writeln!(out, "\t{}\t{pg}\t0\t0\t0\t1\t{base}\t1\t{pg}\t0;", bus.id);
    }
    let _ = writeln!(out, "];\n%\tfbus\ttbus\tr\tx\tb\trateA\trateB\trateC\tratio\tangle\tstatus\tangmin\tangmax");
    let _ = writeln!(out, "mpc.branch = [");
    for br in case.branches() {
        let (f, t) = (case.buses()[br.from].id, case.buses()[br.to].id);
        let _ = writeln!(out, "\t{f}\t{t}\t0\t{}\t0\t0\t0\t0\t0\t0\t1\t-360\t360;", 1.0 / br.susceptance_pu);
    }
    let _ = writeln!(out, "];");
    out
}
