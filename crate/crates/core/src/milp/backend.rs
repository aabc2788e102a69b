use highs::{HighsModelStatus, HighsSolutionStatus, RowProblem, Sense};
use serde::{Deserialize, Serialize};

use super::model::{MilpModel, RowSense, VarKind};
use crate::error::{Error, Result};

/// Denominator floor for the relative gap.
pub const GAP_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    Limit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpSolution {
    /// One value per model variable; empty when no incumbent exists.
    pub values: Vec<f64>,
    pub objective: f64,
    pub bound: f64,
    pub gap: f64,
    pub status: SolveStatus,
}

impl MilpSolution {
    pub fn without_incumbent(status: SolveStatus, bound: f64) -> Self {
        Self { values: Vec::new(), objective: f64::INFINITY, bound, gap: f64::INFINITY, status }
    }

    pub fn has_incumbent(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

/// `(obj - bound) / max(|obj|, GAP_EPS)`, infinite without both numbers.
pub fn relative_gap(objective: f64, bound: f64) -> f64 {
    if !objective.is_finite() || !bound.is_finite() {
        return f64::INFINITY;
    }
    (objective - bound).max(0.0) / objective.abs().max(GAP_EPS)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Wall-clock budget in seconds.
    pub time_limit: f64,
    pub mip_rel_gap: f64,
    /// Solver thread count; `None` leaves the backend default.
    pub threads: Option<u32>,
    pub random_seed: i32,
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { time_limit: 60.0, mip_rel_gap: 1e-4, threads: None, random_seed: 0, verbose: false }
    }
}

impl SolveOptions {
    pub fn with_time_limit(&self, seconds: f64) -> Self {
        Self { time_limit: seconds, ..self.clone() }
    }
}

pub trait MilpBackend: Sync {
    fn name(&self) -> &'static str;

    /// Minimises `model`. `start` is an optional full valuation used as a
    /// warm start; backends may ignore it.
    fn solve(&self, model: &MilpModel, options: &SolveOptions, start: Option<&[f64]>) -> Result<MilpSolution>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HighsBackend;

impl MilpBackend for HighsBackend {
    fn name(&self) -> &'static str {
        "highs"
    }

    fn solve(&self, model: &MilpModel, options: &SolveOptions, start: Option<&[f64]>) -> Result<MilpSolution> {
        let mut problem = RowProblem::new();
        let cols: Vec<_> = model
            .variables()
            .iter()
            .map(|v| problem.add_column_with_integrality(v.objective, v.lower..=v.upper, v.kind == VarKind::Binary))
            .collect();
        for con in model.constraints() {
            let factors = con.terms.iter().map(|&(v, c)| (cols[v.index()], c));
            match con.sense {
                RowSense::Le => problem.add_row(..=con.rhs, factors),
                RowSense::Ge => problem.add_row(con.rhs.., factors),
                RowSense::Eq => problem.add_row(con.rhs..=con.rhs, factors),
            };
        }
        let is_mip = model.num_binaries() > 0;

        let mut highs = problem
            .try_optimise(Sense::Minimise)
            .map_err(|s| Error::Solver(format!("HiGHS rejected the model: {s:?}")))?;
        if !options.verbose {
            highs.make_quiet();
        }
        highs.set_option("time_limit", options.time_limit.max(0.01));
        highs.set_option("mip_rel_gap", options.mip_rel_gap);
        highs.set_option("random_seed", options.random_seed);
        highs.set_option("primal_feasibility_tolerance", 1e-9);
        highs.set_option("mip_feasibility_tolerance", 1e-7);
        if let Some(t) = options.threads {
            highs.set_option("threads", t as i32);
        }
        if let Some(start) = start {
            if is_mip && start.len() == model.num_vars() {
                if let Err(s) = highs.try_set_solution(Some(start), None, None, None) {
                    log::warn!("HiGHS refused the warm start: {s:?}");
                }
            }
        }

        let solved = highs.try_solve().map_err(|s| Error::Solver(format!("HiGHS run failed: {s:?}")))?;
        let status = solved.status();
        let has_primal = solved.primal_solution_status() == HighsSolutionStatus::Feasible;
        let raw_bound = if is_mip {
            solved.double_info_value(c"mip_dual_bound").unwrap_or(f64::NEG_INFINITY)
        } else {
            f64::NEG_INFINITY
        };

        let status = match status {
            HighsModelStatus::Optimal => SolveStatus::Optimal,
            HighsModelStatus::ModelEmpty => SolveStatus::Optimal,
            HighsModelStatus::Infeasible | HighsModelStatus::UnboundedOrInfeasible => {
                return Ok(MilpSolution::without_incumbent(SolveStatus::Infeasible, f64::INFINITY));
            }
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedSolutionLimit
            | HighsModelStatus::ReachedInterrupt
            | HighsModelStatus::ReachedMemoryLimit
            | HighsModelStatus::ObjectiveBound
            | HighsModelStatus::ObjectiveTarget
            | HighsModelStatus::Unknown => {
                if has_primal {
                    SolveStatus::Feasible
                } else {
                    let bound = if raw_bound.is_finite() { raw_bound } else { f64::NEG_INFINITY };
                    return Ok(MilpSolution::without_incumbent(SolveStatus::Limit, bound));
                }
            }
            other => return Err(Error::Solver(format!("HiGHS ended with status {other:?}"))),
        };

        let values = solved.get_solution().columns().to_vec();
        let objective = model.objective_value(&values);
        let bound = match status {
            SolveStatus::Optimal if !is_mip => objective,
            _ if raw_bound.is_finite() => raw_bound.min(objective),
            _ => f64::NEG_INFINITY,
        };
        Ok(MilpSolution { gap: relative_gap(objective, bound), values, objective, bound, status })
    }
}
