//! Builders translating a case, its coherent groups and objective weights
//! into [`MilpModel`]s.
//!
//! All variants share the assignment, switching, balance, shedding and flow
//! gating blocks. They differ in how connectivity is enforced (commodity
//! flow or directed spanning forest) and how Ohm's law is written (angles
//! with a big-M, or cycle-wise KVL without angles).

mod config;
mod connectivity;
mod kvl;

use std::collections::HashSet;

pub use config::{
    BigMConfig, Connectivity, KvlForm, ModelVariant, ObjectiveRegime, ObjectiveWeights, DEFAULT_SHORT_CYCLE_LEN,
    SHORT_CYCLES_PER_BRANCH,
};
pub use connectivity::{
    cycle_break_row, FAMILY_ARC_BRIDGE, FAMILY_ARC_CYCLE_EDGE, FAMILY_COMMODITY_CAP, FAMILY_COMMODITY_SINK,
    FAMILY_COMMODITY_SOURCE, FAMILY_CYCLE_BREAK, FAMILY_FOREST_SIZE, FAMILY_IN_DEGREE, FAMILY_ROOT_OUT,
};
pub use kvl::{compute_mc, cycle_mc, kvl_rows, triangle_rows, FAMILY_KVL, FAMILY_TRIANGLE};

use crate::error::{Error, Result};
use crate::graph::{
    bridges, fundamental_cycle_basis, min_spanning_forest, short_cycles, Arc, EdgeId, Graph, SignedCycle,
    SpanningForest,
};
use crate::milp::{LinearConstraint, MilpModel, VarGroup, VarId};
use crate::net::{CoherentGroups, NetworkCase};

pub const FAMILY_ASSIGNMENT: &str = "assignment";
pub const FAMILY_SWITCH: &str = "switch";
pub const FAMILY_NO_INTERNAL_SWITCH: &str = "no_internal_switch";
pub const FAMILY_BALANCE: &str = "balance";
pub const FAMILY_FLOW_GATE: &str = "flow_gate";
pub const FAMILY_OHM: &str = "ohm";
pub const FAMILY_IMBALANCE: &str = "imbalance";

/// Where each model symbol lives in the variable vector. Unused symbol
/// families are left empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelLayout {
    /// `x[bus][k]`.
    pub x: Vec<Vec<VarId>>,
    pub y: Vec<VarId>,
    pub p: Vec<VarId>,
    pub load_shed: Vec<VarId>,
    pub gen_shed: Vec<VarId>,
    pub phi: Vec<VarId>,
    pub commodity: Vec<VarId>,
    /// Per branch: `[from -> to, to -> from]`.
    pub arcs: Vec<[VarId; 2]>,
    pub imbalance: Vec<VarId>,
    /// Branch endpoints, for mapping arcs back to variables.
    pub ends: Vec<(usize, usize)>,
}

impl ModelLayout {
    pub fn num_islands(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn arc_var(&self, arc: &Arc) -> VarId {
        let dir = usize::from(self.ends[arc.edge].0 != arc.tail);
        self.arcs[arc.edge][dir]
    }

    /// Arcs whose `z` value is above one half.
    pub fn enabled_arcs(&self, values: &[f64]) -> Vec<Arc> {
        let mut out = Vec::new();
        for (e, (pair, &(u, v))) in self.arcs.iter().zip(&self.ends).enumerate() {
            if values[pair[0].index()] > 0.5 {
                out.push(Arc { edge: e, tail: u, head: v });
            }
            if values[pair[1].index()] > 0.5 {
                out.push(Arc { edge: e, tail: v, head: u });
            }
        }
        out
    }

    /// Island index of each bus, taking the largest `x[bus][k]`.
    pub fn island_of(&self, values: &[f64]) -> Vec<usize> {
        self.x
            .iter()
            .map(|row| {
                (0..row.len()).max_by(|&a, &b| values[row[a].index()].total_cmp(&values[row[b].index()])).unwrap_or(0)
            })
            .collect()
    }

    pub fn is_open(&self, values: &[f64], e: EdgeId) -> bool {
        values[self.y[e].index()] > 0.5
    }
}

/// A built model together with the static data its separators need.
#[derive(Debug, Clone)]
pub struct IslandingModel {
    pub model: MilpModel,
    pub layout: ModelLayout,
    pub variant: ModelVariant,
    pub weights: ObjectiveWeights,
    pub bigm: BigMConfig,
    pub roots: Vec<usize>,
    /// Minimum spanning forest of the intact network (weights `1/b`).
    pub mst: SpanningForest,
    pub bridges: Vec<EdgeId>,
    /// Cycles that carry KVL rows in the initial model.
    pub kvl_cycles: Vec<SignedCycle>,
    /// Pre-enumerated short cycles.
    pub short_cycles: Vec<SignedCycle>,
}

/// Short cycles up to `max_len`, shortened while the count exceeds
/// [`SHORT_CYCLES_PER_BRANCH`] per branch. Triangles are always kept.
fn seeded_short_cycles(graph: &Graph, max_len: usize) -> Result<Vec<SignedCycle>> {
    let budget = SHORT_CYCLES_PER_BRANCH * graph.num_edges();
    let mut kept = short_cycles(graph, 3)?;
    for len in 4..=max_len {
        let next = short_cycles(graph, len)?;
        if next.len() > budget {
            log::info!(
                "seeding cycles up to length {} ({} cycles; {} at length {len})",
                len - 1,
                kept.len(),
                next.len()
            );
            break;
        }
        kept = next;
    }
    Ok(kept)
}

/// Reference model: commodity-flow connectivity and big-M Ohm's law.
pub fn build_benchmark(
    case: &NetworkCase,
    groups: &CoherentGroups,
    weights: &ObjectiveWeights,
    bigm: &BigMConfig,
) -> Result<IslandingModel> {
    build_model(case, groups, weights, bigm, &ModelVariant::benchmark())
}

/// Big-M-free model: spanning-forest connectivity and cycle KVL.
pub fn build_proposed(
    case: &NetworkCase,
    groups: &CoherentGroups,
    weights: &ObjectiveWeights,
    variant: &ModelVariant,
) -> Result<IslandingModel> {
    if variant.connectivity != Connectivity::SpanningForest || variant.kvl != KvlForm::CycleKvl {
        return Err(Error::Config(format!("build_proposed called with variant {}", variant.name())));
    }
    build_model(case, groups, weights, &BigMConfig::default(), variant)
}

/// Builds any connectivity / Ohm's law combination.
pub fn build_model(
    case: &NetworkCase,
    groups: &CoherentGroups,
    weights: &ObjectiveWeights,
    bigm: &BigMConfig,
    variant: &ModelVariant,
) -> Result<IslandingModel> {
    weights.validate()?;
    variant.validate()?;
    if variant.uses_angles() {
        bigm.validate()?;
    }
    let n = case.num_buses();
    let k_count = groups.len();
    if k_count < 2 {
        return Err(Error::Config(format!("need at least two islands, got {k_count}")));
    }
    if let Some(&bad) = groups.groups().iter().flatten().find(|&&b| b >= n) {
        return Err(Error::Validation(format!("group member {bad} is not a bus of the case")));
    }

    let graph = case.graph();
    let mst = min_spanning_forest(&graph, |e| 1.0 / case.branches()[e].susceptance_pu);
    let bridge_list = bridges(&graph);
    let needs_cycles =
        variant.connectivity == Connectivity::SpanningForest || variant.kvl == KvlForm::CycleKvl || variant.triangles;
    let shorts = if needs_cycles { seeded_short_cycles(&graph, variant.short_cycle_len)? } else { Vec::new() };

    let mut model = MilpModel::new();
    let mut layout =
        ModelLayout { ends: case.branches().iter().map(|b| (b.from, b.to)).collect(), ..ModelLayout::default() };

    // Core variables.
    for i in 0..n {
        let row = (0..k_count).map(|k| model.add_binary(format!("x_{i}_{k}"), 0.0, VarGroup::Assignment)).collect();
        layout.x.push(row);
    }
    for (e, br) in case.branches().iter().enumerate() {
        let y = model.add_binary(format!("y_{e}"), weights.flow_cost(br.base_flow_pu), VarGroup::Opening);
        layout.y.push(y);
    }
    for (e, br) in case.branches().iter().enumerate() {
        let lim = br.flow_limit_pu;
        layout.p.push(model.add_continuous(format!("p_{e}"), -lim, lim, 0.0, VarGroup::Flow));
    }
    for (i, bus) in case.buses().iter().enumerate() {
        let ls = model.add_continuous(format!("pls_{i}"), 0.0, bus.load_pu, weights.beta, VarGroup::LoadShed);
        let gs = model.add_continuous(format!("pgs_{i}"), 0.0, bus.gen_pu, weights.gamma, VarGroup::GenShed);
        layout.load_shed.push(ls);
        layout.gen_shed.push(gs);
    }

    // Assignment and group pinning.
    for row in &layout.x {
        let terms = row.iter().map(|&v| (v, 1.0)).collect();
        model.add_constraint(LinearConstraint::eq(FAMILY_ASSIGNMENT, terms, 1.0))?;
    }
    for (k, members) in groups.groups().iter().enumerate() {
        for &i in members {
            model.fix(layout.x[i][k], 1.0);
        }
    }

    // Switching: different islands open the branch, same island keeps it closed.
    for (e, br) in case.branches().iter().enumerate() {
        let y = layout.y[e];
        for k in 0..k_count {
            let (xi, xj) = (layout.x[br.from][k], layout.x[br.to][k]);
            model.add_constraint(LinearConstraint::le(FAMILY_SWITCH, vec![(xi, 1.0), (xj, -1.0), (y, -1.0)], 0.0))?;
            model.add_constraint(LinearConstraint::le(FAMILY_SWITCH, vec![(xj, 1.0), (xi, -1.0), (y, -1.0)], 0.0))?;
            model.add_constraint(LinearConstraint::le(
                FAMILY_NO_INTERNAL_SWITCH,
                vec![(xi, 1.0), (xj, 1.0), (y, 1.0)],
                2.0,
            ))?;
        }
    }

    // Nodal balance: out - in + P_GS - P_LS = P_G - P_L.
    let mut incidence: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); n];
    for (e, br) in case.branches().iter().enumerate() {
        incidence[br.from].push((layout.p[e], 1.0));
        incidence[br.to].push((layout.p[e], -1.0));
    }
    for (i, bus) in case.buses().iter().enumerate() {
        let mut terms = std::mem::take(&mut incidence[i]);
        terms.push((layout.gen_shed[i], 1.0));
        terms.push((layout.load_shed[i], -1.0));
        model.add_constraint(LinearConstraint::eq(FAMILY_BALANCE, terms, bus.gen_pu - bus.load_pu))?;
    }

    // Open branches carry no flow.
    for (e, br) in case.branches().iter().enumerate() {
        let (p, y, lim) = (layout.p[e], layout.y[e], br.flow_limit_pu);
        model.add_constraint(LinearConstraint::le(FAMILY_FLOW_GATE, vec![(p, 1.0), (y, lim)], lim))?;
        model.add_constraint(LinearConstraint::ge(FAMILY_FLOW_GATE, vec![(p, 1.0), (y, -lim)], -lim))?;
    }

    // Ohm's law.
    let mut kvl_cycles = Vec::new();
    match variant.kvl {
        KvlForm::BigMOhm => {
            for i in 0..n {
                let (lo, hi) = if groups.is_root(i) { (0.0, 0.0) } else { (bigm.phi_min, bigm.phi_max) };
                layout.phi.push(model.add_continuous(format!("phi_{i}"), lo, hi, 0.0, VarGroup::Angle));
            }
            for (e, br) in case.branches().iter().enumerate() {
                let b = br.susceptance_pu;
                let terms = |sy: f64| {
                    vec![(layout.p[e], 1.0), (layout.phi[br.from], -b), (layout.phi[br.to], b), (layout.y[e], sy)]
                };
                model.add_constraint(LinearConstraint::le(FAMILY_OHM, terms(-bigm.m_phi), 0.0))?;
                model.add_constraint(LinearConstraint::ge(FAMILY_OHM, terms(bigm.m_phi), 0.0))?;
            }
        }
        KvlForm::CycleKvl => {
            let basis = fundamental_cycle_basis(&graph, &mst)?;
            let mut seen = HashSet::new();
            for c in basis.cycles.into_iter().chain(shorts.iter().cloned()) {
                let c = c.canonical();
                if seen.insert(c.clone()) {
                    for row in kvl_rows(case, &layout, &c)? {
                        model.add_constraint(row)?;
                    }
                    kvl_cycles.push(c);
                }
            }
        }
    }

    if variant.triangles {
        for t in shorts.iter().filter(|c| c.len() == 3) {
            for row in triangle_rows(&layout, t)? {
                model.add_constraint(row)?;
            }
        }
    }

    match variant.connectivity {
        Connectivity::CommodityFlow => {
            let cap = bigm.commodity_cap.unwrap_or(n - 1);
            connectivity::add_commodity_flow(&mut model, &mut layout, case, groups, cap)?;
        }
        Connectivity::SpanningForest => {
            connectivity::add_spanning_forest(&mut model, &mut layout, case, groups, &bridge_list, &shorts)?;
        }
    }

    if weights.alpha > 0.0 {
        add_imbalance_block(&mut model, &mut layout, case, weights.alpha)?;
    }

    Ok(IslandingModel {
        model,
        layout,
        variant: *variant,
        weights: *weights,
        bigm: *bigm,
        roots: groups.roots().to_vec(),
        mst,
        bridges: bridge_list,
        kvl_cycles,
        short_cycles: shorts,
    })
}

/// `P_delta_k >= |sum_i (P_G - P_L) x_ik|` per island, weighted by `alpha`.
fn add_imbalance_block(model: &mut MilpModel, layout: &mut ModelLayout, case: &NetworkCase, alpha: f64) -> Result<()> {
    for k in 0..layout.num_islands() {
        let d = model.add_continuous(format!("pdelta_{k}"), 0.0, f64::INFINITY, alpha, VarGroup::Imbalance);
        layout.imbalance.push(d);
        let mut gen_side = vec![(d, 1.0)];
        let mut load_side = vec![(d, 1.0)];
        for (i, bus) in case.buses().iter().enumerate() {
            let c = bus.net_injection();
            if c != 0.0 {
                gen_side.push((layout.x[i][k], -c));
                load_side.push((layout.x[i][k], c));
            }
        }
        model.add_constraint(LinearConstraint::ge(FAMILY_IMBALANCE, gen_side, 0.0))?;
        model.add_constraint(LinearConstraint::ge(FAMILY_IMBALANCE, load_side, 0.0))?;
    }
    Ok(())
}
