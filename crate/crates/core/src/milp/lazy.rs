use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::backend::{relative_gap, MilpBackend, MilpSolution, SolveOptions, SolveStatus};
use super::model::{LinearConstraint, MilpModel, FEASIBILITY_TOL};
use crate::error::{Error, Result};

/// Minimum violation a separated row must show at the point it cuts off.
pub const VIOLATION_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ROUNDS: usize = 50;

/// Produces rows violated by an incumbent, or nothing when it is clean.
pub trait LazySeparator: Sync {
    fn family(&self) -> &'static str;

    /// Groups of rows; each group holds at least one row violated by
    /// `values`. Symmetric partners of a violated row may ride along.
    fn separate(&self, values: &[f64]) -> Result<Vec<Vec<LinearConstraint>>>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LazyConfig {
    pub options: SolveOptions,
    pub max_rounds: usize,
    /// Re-solve the LP with binaries fixed to clean up continuous values.
    pub polish: bool,
}

impl Default for LazyConfig {
    fn default() -> Self {
        Self { options: SolveOptions::default(), max_rounds: DEFAULT_MAX_ROUNDS, polish: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub status: SolveStatus,
    pub objective: f64,
    pub bound: f64,
    pub rows_added: BTreeMap<String, usize>,
    pub elapsed: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub rounds: usize,
    pub rows_by_family: BTreeMap<String, usize>,
    pub log: Vec<RoundRecord>,
    pub start_accepted: bool,
    /// True when the returned valuation is the supplied start.
    pub returned_start: bool,
    pub polished: bool,
    pub round_cap_hit: bool,
}

impl SeparationReport {
    pub fn total_rows(&self) -> usize {
        self.rows_by_family.values().sum()
    }
}

/// What the observer sees after each round's separation pass.
#[derive(Debug)]
pub struct RoundEvent<'a> {
    pub round: usize,
    pub values: &'a [f64],
    pub objective: f64,
    pub added: &'a [LinearConstraint],
}

/// Runs every separator in order and checks each emitted group really cuts
/// `values` off.
pub fn separate_all(separators: &[&dyn LazySeparator], values: &[f64]) -> Result<Vec<LinearConstraint>> {
    let mut rows = Vec::new();
    for sep in separators {
        for group in sep.separate(values)? {
            let viol = group.iter().map(|r| r.violation(values)).fold(0.0, f64::max);
            if viol <= VIOLATION_TOL {
                return Err(Error::Contract(format!(
                    "separator {} emitted rows violated by only {viol:.3e}",
                    sep.family()
                )));
            }
            rows.extend(group);
        }
    }
    Ok(rows)
}

/// Solve, separate, extend, re-solve, until an incumbent passes every
/// separator or the round cap or time budget runs out.
///
/// The returned solution is never worse than a valid `start`.
pub fn solve_lazy(
    backend: &dyn MilpBackend,
    model: &MilpModel,
    separators: &[&dyn LazySeparator],
    start: Option<&[f64]>,
    config: &LazyConfig,
    mut observer: Option<&mut dyn FnMut(&RoundEvent)>,
) -> Result<(MilpSolution, SeparationReport)> {
    let t0 = Instant::now();
    let budget = config.options.time_limit;
    let mut report = SeparationReport::default();
    let mut working = model.clone();

    // Best separator-clean incumbent and whether it came from the start.
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    if let Some(start) = start {
        let mut s = start.to_vec();
        model.snap_binaries(&mut s);
        let clean = model.is_feasible(&s, FEASIBILITY_TOL) && separate_all(separators, &s)?.is_empty();
        if clean {
            let obj = model.objective_value(&s);
            best = Some((s, obj, true));
            report.start_accepted = true;
        } else {
            log::warn!("ignoring a start that violates the model or a separator");
        }
    }

    let mut bound = f64::NEG_INFINITY;
    let mut proven = false;
    let mut infeasible = false;
    for round in 1..=config.max_rounds.max(1) {
        let remaining = budget - t0.elapsed().as_secs_f64();
        if remaining <= 0.0 {
            break;
        }
        let warm = best.as_ref().map(|b| b.0.as_slice());
        let sol = backend.solve(&working, &config.options.with_time_limit(remaining), warm)?;
        report.rounds = round;
        if sol.bound.is_finite() {
            bound = bound.max(sol.bound);
        }
        let mut record = RoundRecord {
            round,
            status: sol.status,
            objective: sol.objective,
            bound: sol.bound,
            rows_added: BTreeMap::new(),
            elapsed: t0.elapsed().as_secs_f64(),
        };
        if !sol.has_incumbent() {
            infeasible = sol.status == SolveStatus::Infeasible;
            report.log.push(record);
            break;
        }

        let mut values = sol.values;
        working.snap_binaries(&mut values);
        let rows = separate_all(separators, &values)?;
        if let Some(obs) = observer.as_mut() {
            obs(&RoundEvent { round, values: &values, objective: sol.objective, added: &rows });
        }
        if rows.is_empty() {
            let improves = best.as_ref().is_none_or(|b| sol.objective < b.1);
            if improves {
                best = Some((values, sol.objective, false));
            }
            proven = sol.status == SolveStatus::Optimal;
            report.log.push(record);
            break;
        }
        for row in rows {
            *record.rows_added.entry(row.family.clone()).or_default() += 1;
            *report.rows_by_family.entry(row.family.clone()).or_default() += 1;
            working.add_constraint(row)?;
        }
        report.log.push(record);
        if round == config.max_rounds {
            report.round_cap_hit = true;
        }
    }

    let Some((mut values, mut objective, from_start)) = best else {
        let status = if infeasible { SolveStatus::Infeasible } else { SolveStatus::Limit };
        return Ok((MilpSolution::without_incumbent(status, bound), report));
    };
    report.returned_start = from_start;

    if config.polish && model.num_binaries() > 0 {
        let lp = working.with_binaries_fixed(&values);
        let remaining = (budget - t0.elapsed().as_secs_f64()).max(1.0);
        let polished = backend.solve(&lp, &config.options.with_time_limit(remaining), None)?;
        if polished.status == SolveStatus::Optimal {
            let mut pv = polished.values;
            model.snap_binaries(&mut pv);
            let pobj = model.objective_value(&pv);
            if pobj <= objective + FEASIBILITY_TOL && separate_all(separators, &pv)?.is_empty() {
                values = pv;
                objective = pobj;
                report.polished = true;
            }
        }
    }

    let status = if proven && !report.round_cap_hit { SolveStatus::Optimal } else { SolveStatus::Feasible };
    let bound = bound.min(objective);
    Ok((MilpSolution { gap: relative_gap(objective, bound), values, objective, bound, status }, report))
}
