//! Start heuristic: freeze the partial islands the LP relaxation is
//! confident about, solve the reduced reference model, and lift the result
//! into the active model.

use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formulations::{build_benchmark, IslandingModel};
use crate::graph::{connected_components, Graph};
use crate::milp::{
    lp_relax, separate_all, solve_lazy, LazyConfig, MilpBackend, MilpSolution, SolveOptions, FEASIBILITY_TOL,
};
use crate::net::{CoherentGroups, NetworkCase};
use crate::separation::SeparatorSet;
use crate::validate::{certify, island_imbalances, IslandingPlan};

pub const BUDGET_FRACTION: f64 = 0.03;

/// Share of the total time limit granted to the heuristic.
pub fn heuristic_budget(total_limit: f64) -> f64 {
    BUDGET_FRACTION * total_limit
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeuristicConfig {
    /// LP value above which a bus counts as committed to an island.
    pub on_threshold: f64,
    /// Minimum frozen share of buses before the reduced model is solved.
    pub min_coverage: f64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self { on_threshold: 0.9, min_coverage: 0.8 }
    }
}

/// Buses frozen per island.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialIslands {
    pub frozen: Vec<Vec<usize>>,
    pub coverage: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HeuristicReport {
    pub used: bool,
    pub coverage: Option<f64>,
    pub objective: Option<f64>,
    pub elapsed: f64,
    pub outcome: String,
}

/// Partial islands from fractional assignments `lp_x[bus][k]`, or `None`
/// when some LP-closed component holds two roots.
pub fn partial_islands(
    lp_x: &[Vec<f64>],
    case: &NetworkCase,
    groups: &CoherentGroups,
    threshold: f64,
) -> Option<PartialIslands> {
    let n = case.num_buses();
    let on_edges = case
        .branches()
        .iter()
        .filter(|br| (0..groups.len()).any(|k| lp_x[br.from][k] > threshold && lp_x[br.to][k] > threshold));
    let g = Graph::new(n, on_edges.map(|br| (br.from, br.to)));
    let comps = connected_components(&g);
    let mut frozen = vec![Vec::new(); groups.len()];
    for c in 0..comps.count {
        let members: Vec<usize> = comps.members(c).collect();
        let roots: Vec<usize> = groups.roots().iter().copied().filter(|r| members.contains(r)).collect();
        match roots.as_slice() {
            [] => continue,
            [r] => {
                let k = groups.roots().iter().position(|x| x == r).expect("root belongs to a group");
                frozen[k] = members;
            }
            _ => return None,
        }
    }
    let count: usize = frozen.iter().map(Vec::len).sum();
    Some(PartialIslands { frozen, coverage: count as f64 / n as f64 })
}

/// Runs the heuristic from given LP assignments. Returns a valuation of
/// `active.model` that passes the model rows, every separator and `certify`.
#[allow(clippy::too_many_arguments)]
pub fn run_heuristic(
    backend: &dyn MilpBackend,
    lp_x: &[Vec<f64>],
    case: &NetworkCase,
    groups: &CoherentGroups,
    active: &IslandingModel,
    time_budget: f64,
    config: &HeuristicConfig,
    options: &SolveOptions,
) -> Result<(Option<MilpSolution>, HeuristicReport)> {
    let t0 = Instant::now();
    let mut report = HeuristicReport { used: true, ..HeuristicReport::default() };
    let finish = |mut r: HeuristicReport, outcome: &str| {
        r.elapsed = t0.elapsed().as_secs_f64();
        r.outcome = outcome.to_string();
        r
    };

    let Some(partial) = partial_islands(lp_x, case, groups, config.on_threshold) else {
        return Ok((None, finish(report, "two roots share an LP component")));
    };
    report.coverage = Some(partial.coverage);
    if partial.coverage < config.min_coverage {
        return Ok((None, finish(report, "coverage below threshold")));
    }

    let mut reduced = build_benchmark(case, groups, &active.weights, &active.bigm)?;
    let mut island = vec![None; case.num_buses()];
    for (k, buses) in partial.frozen.iter().enumerate() {
        for &i in buses {
            island[i] = Some(k);
            for kk in 0..groups.len() {
                reduced.model.fix(reduced.layout.x[i][kk], if kk == k { 1.0 } else { 0.0 });
            }
        }
    }
    for (e, br) in case.branches().iter().enumerate() {
        if let (Some(a), Some(b)) = (island[br.from], island[br.to]) {
            reduced.model.fix(reduced.layout.y[e], if a == b { 0.0 } else { 1.0 });
        }
    }

    let cfg = LazyConfig { options: options.with_time_limit(time_budget.max(0.05)), ..LazyConfig::default() };
    let sol = match solve_lazy(backend, &reduced.model, &[], None, &cfg, None) {
        Ok((sol, _)) if sol.has_incumbent() => sol,
        Ok((sol, _)) => return Ok((None, finish(report, &format!("reduced model ended {:?}", sol.status)))),
        Err(e) => {
            log::warn!("reduced model failed: {e}");
            return Ok((None, finish(report, "reduced model solve failed")));
        }
    };

    let plan = IslandingPlan::from_solution(&reduced, &sol.values);
    debug_assert!(partial.frozen.iter().enumerate().all(|(k, b)| b.iter().all(|&i| plan.island_of[i] == k)));
    let Some(values) = lift(&plan, &reduced, &sol.values, active, case) else {
        return Ok((None, finish(report, "could not lift solution into the active model")));
    };
    if !active.model.is_feasible(&values, FEASIBILITY_TOL) {
        return Ok((None, finish(report, "lifted solution violates the active model")));
    }
    let seps = SeparatorSet::for_model(active, case, groups);
    if !separate_all(&seps.as_dyn(), &values)?.is_empty() {
        return Ok((None, finish(report, "lifted solution violates a separator")));
    }
    if !certify(&plan, case, groups).passed {
        return Ok((None, finish(report, "lifted solution fails certification")));
    }
    let objective = active.model.objective_value(&values);
    report.objective = Some(objective);
    let out = MilpSolution {
        values,
        objective,
        bound: f64::NEG_INFINITY,
        gap: f64::INFINITY,
        status: crate::milp::SolveStatus::Feasible,
    };
    Ok((Some(out), finish(report, "feasible start found")))
}

/// LP relaxation of `active` followed by [`run_heuristic`], all within
/// `time_budget` seconds.
pub fn heuristic_start(
    backend: &dyn MilpBackend,
    case: &NetworkCase,
    groups: &CoherentGroups,
    active: &IslandingModel,
    time_budget: f64,
    config: &HeuristicConfig,
    options: &SolveOptions,
) -> Result<(Option<MilpSolution>, HeuristicReport)> {
    let t0 = Instant::now();
    let lp = lp_relax(backend, &active.model, &options.with_time_limit(time_budget.max(0.05)))?;
    if !lp.has_incumbent() {
        let report = HeuristicReport {
            used: true,
            elapsed: t0.elapsed().as_secs_f64(),
            outcome: format!("LP relaxation ended {:?}", lp.status),
            ..HeuristicReport::default()
        };
        return Ok((None, report));
    }
    let lp_x: Vec<Vec<f64>> =
        active.layout.x.iter().map(|row| row.iter().map(|v| lp.values[v.index()]).collect()).collect();
    let remaining = time_budget - t0.elapsed().as_secs_f64();
    let (sol, mut report) = run_heuristic(backend, &lp_x, case, groups, active, remaining, config, options)?;
    report.elapsed = t0.elapsed().as_secs_f64();
    Ok((sol, report))
}

/// Maps a reference-model solution onto the variables of `active`.
fn lift(
    plan: &IslandingPlan,
    reduced: &IslandingModel,
    reduced_values: &[f64],
    active: &IslandingModel,
    case: &NetworkCase,
) -> Option<Vec<f64>> {
    let (src, dst) = (&reduced.layout, &active.layout);
    let mut v = vec![0.0; active.model.num_vars()];
    let copy = |v: &mut [f64], from: &[crate::milp::VarId], to: &[crate::milp::VarId]| {
        for (a, b) in from.iter().zip(to) {
            v[b.index()] = reduced_values[a.index()];
        }
    };
    for (a, b) in src.x.iter().zip(&dst.x) {
        copy(&mut v, a, b);
    }
    copy(&mut v, &src.y, &dst.y);
    copy(&mut v, &src.p, &dst.p);
    copy(&mut v, &src.load_shed, &dst.load_shed);
    copy(&mut v, &src.gen_shed, &dst.gen_shed);
    if !dst.phi.is_empty() {
        copy(&mut v, &src.phi, &dst.phi);
    }
    if !dst.commodity.is_empty() {
        copy(&mut v, &src.commodity, &dst.commodity);
    }
    if !dst.imbalance.is_empty() {
        for (k, d) in island_imbalances(plan, case, dst.imbalance.len()).into_iter().enumerate() {
            v[dst.imbalance[k].index()] = d;
        }
    }
    if !dst.arcs.is_empty() {
        // Orient a BFS tree of each island away from its root.
        let n = case.num_buses();
        let closed = case.graph().subgraph(|e| !plan.is_open(e));
        let mut seen = vec![false; n];
        for &r in &active.roots {
            seen[r] = true;
            let mut queue = VecDeque::from([r]);
            while let Some(u) = queue.pop_front() {
                for (w, e) in closed.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        let arc = crate::graph::Arc { edge: e.id, tail: u, head: w };
                        v[dst.arc_var(&arc).index()] = 1.0;
                        queue.push_back(w);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return None;
        }
    }
    active.model.snap_binaries(&mut v);
    Some(v)
}
