#![allow(dead_code, unused_imports, clippy::needless_range_loop, clippy::type_complexity)]

pub mod graphs;
pub mod instances;
pub mod lp;
pub mod oracle;

use ici_core::formulations::IslandingModel;
use ici_core::milp::{HighsBackend, MilpBackend, MilpSolution, SolveOptions};

pub use instances::{case_from, groups_of, pocket, random_instance, six_bus, ten_bus, weak_chain, Instance};
pub use oracle::PartitionOracle;

/// Options for solves that must close the gap.
pub fn tight_options() -> SolveOptions {
    SolveOptions { time_limit: 60.0, mip_rel_gap: 1e-7, ..SolveOptions::default() }
}

/// Lazy solve of `m` with its full separator set.
pub fn solve_with_separators(
    m: &IslandingModel,
    inst: &Instance,
    start: Option<&[f64]>,
) -> (MilpSolution, ici_core::milp::SeparationReport) {
    let seps = ici_core::separation::SeparatorSet::for_model(m, &inst.case, &inst.groups);
    let cfg = ici_core::milp::LazyConfig { options: tight_options(), ..Default::default() };
    ici_core::milp::solve_lazy(&HighsBackend, &m.model, &seps.as_dyn(), start, &cfg, None).unwrap()
}

pub fn plain_solve(m: &IslandingModel) -> MilpSolution {
    HighsBackend.solve(&m.model, &tight_options(), None).unwrap()
}
