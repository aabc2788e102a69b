//! Model-independent certification of islanding plans and the reporting
//! metrics. Nothing here reads model rows: a plan is checked against the
//! case data and DC power-flow physics only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulations::{IslandingModel, ObjectiveWeights};
use crate::graph::{connected_components, fundamental_cycle_basis, min_spanning_forest, EdgeId};
use crate::net::{CoherentGroups, NetworkCase};

/// Absolute tolerance of every certification check, in per unit.
pub const CERT_TOL: f64 = 1e-6;

/// A complete switching and dispatch decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandingPlan {
    /// Island index (0-based, matching the group order) of each bus.
    pub island_of: Vec<usize>,
    /// Opened branch indices, ascending.
    pub open_branches: Vec<EdgeId>,
    pub shed_load: Vec<f64>,
    pub shed_gen: Vec<f64>,
    /// Post-split flow of each branch, from-to positive.
    pub flows: Vec<f64>,
}

impl IslandingPlan {
    /// Reads a plan out of a model valuation.
    pub fn from_solution(m: &IslandingModel, values: &[f64]) -> Self {
        let l = &m.layout;
        let read = |v: &[crate::milp::VarId]| v.iter().map(|id| values[id.index()]).collect::<Vec<f64>>();
        Self {
            island_of: l.island_of(values),
            open_branches: (0..l.y.len()).filter(|&e| l.is_open(values, e)).collect(),
            shed_load: read(&l.load_shed),
            shed_gen: read(&l.gen_shed),
            flows: read(&l.p),
        }
    }

    pub fn is_open(&self, e: EdgeId) -> bool {
        self.open_branches.binary_search(&e).is_ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Plan vectors do not match the case dimensions.
    Shape,
    Islands,
    Balance,
    FlowLimit,
    OpenFlow,
    Kvl,
    ShedBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

fn violation(kind: ViolationKind, magnitude: f64, detail: String) -> Violation {
    Violation { kind, detail, magnitude }
}

/// Checks islands, nodal balance, flow limits, island-wise KVL and shed
/// boxes.
pub fn certify(plan: &IslandingPlan, case: &NetworkCase, groups: &CoherentGroups) -> Certificate {
    let mut out = Vec::new();
    let (n, m, k_count) = (case.num_buses(), case.num_branches(), groups.len());
    let dims = [
        ("island_of", plan.island_of.len(), n),
        ("shed_load", plan.shed_load.len(), n),
        ("shed_gen", plan.shed_gen.len(), n),
        ("flows", plan.flows.len(), m),
    ];
    for (name, got, want) in dims {
        if got != want {
            out.push(violation(ViolationKind::Shape, 0.0, format!("{name} has {got} entries, expected {want}")));
        }
    }
    if let Some(&e) = plan.open_branches.iter().find(|&&e| e >= m) {
        out.push(violation(ViolationKind::Shape, 0.0, format!("open branch {e} does not exist")));
    }
    if !out.is_empty() {
        return Certificate { passed: false, violations: out };
    }
    let branches = case.branches();

    // (a) K connected islands, each holding exactly its group.
    if let Some(i) = (0..n).find(|&i| plan.island_of[i] >= k_count) {
        out.push(violation(ViolationKind::Islands, 0.0, format!("bus {i} assigned to island {}", plan.island_of[i])));
    }
    for (k, members) in groups.groups().iter().enumerate() {
        for &i in members {
            if plan.island_of[i] != k {
                out.push(violation(
                    ViolationKind::Islands,
                    0.0,
                    format!("group {k} member bus {i} lies in island {}", plan.island_of[i]),
                ));
            }
        }
    }
    for (e, br) in branches.iter().enumerate() {
        let split = plan.island_of[br.from] != plan.island_of[br.to];
        if split != plan.is_open(e) {
            let what = if split { "joins two islands but is closed" } else { "is open inside an island" };
            out.push(violation(ViolationKind::Islands, 0.0, format!("branch {e} {what}")));
        }
    }
    let closed = case.graph().subgraph(|e| !plan.is_open(e));
    let comps = connected_components(&closed);
    if comps.count != k_count {
        out.push(violation(
            ViolationKind::Islands,
            comps.count as f64,
            format!("closed network has {} components, expected {k_count}", comps.count),
        ));
    }

    // (b) nodal balance.
    let mut net_out = vec![0.0; n];
    for (e, br) in branches.iter().enumerate() {
        net_out[br.from] += plan.flows[e];
        net_out[br.to] -= plan.flows[e];
    }
    for (i, bus) in case.buses().iter().enumerate() {
        let injection = (bus.gen_pu - plan.shed_gen[i]) - (bus.load_pu - plan.shed_load[i]);
        let residual = net_out[i] - injection;
        if residual.abs() > CERT_TOL {
            out.push(violation(
                ViolationKind::Balance,
                residual.abs(),
                format!("bus {i} balance residual {residual:.3e}"),
            ));
        }
    }

    // (c) flow limits.
    for (e, br) in branches.iter().enumerate() {
        let f = plan.flows[e].abs();
        if plan.is_open(e) {
            if f > CERT_TOL {
                out.push(violation(ViolationKind::OpenFlow, f, format!("open branch {e} carries {f:.3e}")));
            }
        } else if f > br.flow_limit_pu + CERT_TOL {
            out.push(violation(
                ViolationKind::FlowLimit,
                f - br.flow_limit_pu,
                format!("branch {e} flow {f:.6} exceeds limit {:.6}", br.flow_limit_pu),
            ));
        }
    }

    // (d) KVL over a fresh basis of the closed network.
    let forest = min_spanning_forest(&closed, |_| 1u8);
    match fundamental_cycle_basis(&closed, &forest) {
        Ok(basis) => {
            for cycle in &basis.cycles {
                let r = cycle.signed_sum(|e| plan.flows[e] / branches[e].susceptance_pu);
                if r.abs() > CERT_TOL {
                    let ids: Vec<EdgeId> = cycle.edge_ids().collect();
                    out.push(violation(ViolationKind::Kvl, r.abs(), format!("cycle {ids:?} angle sum {r:.3e}")));
                }
            }
        }
        Err(e) => out.push(violation(ViolationKind::Kvl, 0.0, format!("no cycle basis: {e}"))),
    }

    // (e) shed boxes.
    for (i, bus) in case.buses().iter().enumerate() {
        for (name, x, cap) in [("load", plan.shed_load[i], bus.load_pu), ("generation", plan.shed_gen[i], bus.gen_pu)] {
            if x < -CERT_TOL || x > cap + CERT_TOL {
                out.push(violation(
                    ViolationKind::ShedBox,
                    (x - x.clamp(0.0, cap)).abs(),
                    format!("bus {i} sheds {x:.6} {name}, allowed [0, {cap:.6}]"),
                ));
            }
        }
    }

    Certificate { passed: out.is_empty(), violations: out }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IslandingMetrics {
    pub p_ls_total: f64,
    pub p_delta_total: f64,
    pub p_gs_total: f64,
    pub flow_cut_total: f64,
    pub objective: f64,
    pub gap: f64,
    pub wall_time: f64,
}

/// Per-island `|generation - load|` before shedding.
pub fn island_imbalances(plan: &IslandingPlan, case: &NetworkCase, k: usize) -> Vec<f64> {
    let mut net = vec![0.0; k];
    for (i, bus) in case.buses().iter().enumerate() {
        net[plan.island_of[i]] += bus.net_injection();
    }
    net.into_iter().map(f64::abs).collect()
}

/// Reporting totals of a certified plan. `gap` and `wall_time` are copied
/// through from the solve.
pub fn compute_metrics(
    plan: &IslandingPlan,
    case: &NetworkCase,
    groups: &CoherentGroups,
    weights: &ObjectiveWeights,
    gap: f64,
    wall_time: f64,
) -> Result<IslandingMetrics> {
    let cert = certify(plan, case, groups);
    if !cert.passed {
        return Err(Error::Contract(format!(
            "metrics requested for an uncertified plan ({} violations)",
            cert.violations.len()
        )));
    }
    let p_ls_total: f64 = plan.shed_load.iter().sum();
    let p_gs_total: f64 = plan.shed_gen.iter().sum();
    let p_delta_total: f64 = island_imbalances(plan, case, groups.len()).iter().sum();
    let branches = case.branches();
    let flow_cut_total: f64 = plan.open_branches.iter().map(|&e| branches[e].base_flow_pu.abs()).sum();
    let flow_cost: f64 = plan.open_branches.iter().map(|&e| weights.flow_cost(branches[e].base_flow_pu)).sum();
    let objective = weights.alpha * p_delta_total + weights.beta * p_ls_total + weights.gamma * p_gs_total + flow_cost;
    Ok(IslandingMetrics { p_ls_total, p_delta_total, p_gs_total, flow_cut_total, objective, gap, wall_time })
}
