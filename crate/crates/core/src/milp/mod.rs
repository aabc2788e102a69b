//! Solver-agnostic MILP container, a HiGHS backend and the lazy
//! separation loop.

mod backend;
mod lazy;
mod lp_format;
mod model;

pub use backend::{relative_gap, HighsBackend, MilpBackend, MilpSolution, SolveOptions, SolveStatus, GAP_EPS};
pub use lazy::{
    separate_all, solve_lazy, LazyConfig, LazySeparator, RoundEvent, RoundRecord, SeparationReport, DEFAULT_MAX_ROUNDS,
    VIOLATION_TOL,
};
pub use lp_format::to_lp_string;
pub use model::{
    ConId, LinearConstraint, MilpModel, RowSense, VarGroup, VarId, VarKind, Variable, FEASIBILITY_TOL, INTEGRALITY_TOL,
};

use crate::error::Result;

/// Solves the continuous relaxation of `model`.
pub fn lp_relax(backend: &dyn MilpBackend, model: &MilpModel, options: &SolveOptions) -> Result<MilpSolution> {
    backend.solve(&model.relaxed(), options, None)
}
