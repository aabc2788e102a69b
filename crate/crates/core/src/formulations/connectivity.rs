use super::ModelLayout;
use crate::error::Result;
use crate::graph::{Arc, EdgeId, SignedCycle};
use crate::milp::{LinearConstraint, MilpModel, VarGroup, VarId};
use crate::net::{CoherentGroups, NetworkCase};

pub const FAMILY_FOREST_SIZE: &str = "forest_size";
pub const FAMILY_ROOT_OUT: &str = "root_out";
pub const FAMILY_IN_DEGREE: &str = "in_degree";
pub const FAMILY_ARC_CYCLE_EDGE: &str = "arc_cycle_edge";
pub const FAMILY_ARC_BRIDGE: &str = "arc_bridge";
pub const FAMILY_CYCLE_BREAK: &str = "cycle_break";
pub const FAMILY_COMMODITY_CAP: &str = "commodity_cap";
pub const FAMILY_COMMODITY_SOURCE: &str = "commodity_source";
pub const FAMILY_COMMODITY_SINK: &str = "commodity_sink";

/// Single shared commodity: each root emits one unit per other bus of its
/// island, every other bus absorbs one, open branches carry none.
pub(crate) fn add_commodity_flow(
    model: &mut MilpModel,
    layout: &mut ModelLayout,
    case: &NetworkCase,
    groups: &CoherentGroups,
    cap: usize,
) -> Result<()> {
    let cap = cap as f64;
    for e in 0..case.num_branches() {
        let f = model.add_continuous(format!("f_{e}"), -cap, cap, 0.0, VarGroup::Commodity);
        layout.commodity.push(f);
        let y = layout.y[e];
        model.add_constraint(LinearConstraint::le(FAMILY_COMMODITY_CAP, vec![(f, 1.0), (y, cap)], cap))?;
        model.add_constraint(LinearConstraint::ge(FAMILY_COMMODITY_CAP, vec![(f, 1.0), (y, -cap)], -cap))?;
    }
    for bus in 0..case.num_buses() {
        let mut terms = net_outflow_terms(case, &layout.commodity, bus);
        match groups.roots().iter().position(|&r| r == bus) {
            Some(k) => {
                // out - in = sum_i x_ik - 1
                terms.extend(layout.x.iter().map(|row| (row[k], -1.0)));
                model.add_constraint(LinearConstraint::eq(FAMILY_COMMODITY_SOURCE, terms, -1.0))?;
            }
            None => {
                model.add_constraint(LinearConstraint::eq(FAMILY_COMMODITY_SINK, terms, -1.0))?;
            }
        }
    }
    Ok(())
}

fn net_outflow_terms(case: &NetworkCase, vars: &[VarId], bus: usize) -> Vec<(VarId, f64)> {
    case.branches()
        .iter()
        .enumerate()
        .filter_map(|(e, br)| {
            if br.from == bus {
                Some((vars[e], 1.0))
            } else if br.to == bus {
                Some((vars[e], -1.0))
            } else {
                None
            }
        })
        .collect()
}

/// Directed spanning forest over `z`: `n - K` arcs, roots without in-arcs,
/// one in-arc at every other bus, arcs only on closed branches.
pub(crate) fn add_spanning_forest(
    model: &mut MilpModel,
    layout: &mut ModelLayout,
    case: &NetworkCase,
    groups: &CoherentGroups,
    bridges: &[EdgeId],
    short_cycles: &[SignedCycle],
) -> Result<()> {
    let n = case.num_buses();
    for (e, br) in case.branches().iter().enumerate() {
        let fwd = model.add_binary(format!("z_{}_{}", br.from, br.to), 0.0, VarGroup::Arc);
        let bwd = model.add_binary(format!("z_{}_{}", br.to, br.from), 0.0, VarGroup::Arc);
        layout.arcs.push([fwd, bwd]);
        let y = layout.y[e];
        let terms = vec![(fwd, 1.0), (bwd, 1.0), (y, 1.0)];
        if bridges.binary_search(&e).is_ok() {
            model.add_constraint(LinearConstraint::eq(FAMILY_ARC_BRIDGE, terms, 1.0))?;
        } else {
            model.add_constraint(LinearConstraint::le(FAMILY_ARC_CYCLE_EDGE, terms, 1.0))?;
        }
    }
    let all: Vec<(VarId, f64)> = layout.arcs.iter().flat_map(|a| [(a[0], 1.0), (a[1], 1.0)]).collect();
    model.add_constraint(LinearConstraint::eq(FAMILY_FOREST_SIZE, all, (n - groups.len()) as f64))?;

    let mut in_arcs: Vec<Vec<VarId>> = vec![Vec::new(); n];
    let mut out_arcs: Vec<Vec<VarId>> = vec![Vec::new(); n];
    for (br, a) in case.branches().iter().zip(&layout.arcs) {
        out_arcs[br.from].push(a[0]);
        in_arcs[br.to].push(a[0]);
        out_arcs[br.to].push(a[1]);
        in_arcs[br.from].push(a[1]);
    }
    for bus in 0..n {
        match groups.roots().iter().position(|&r| r == bus) {
            Some(k) => {
                for &z in &in_arcs[bus] {
                    model.fix(z, 0.0);
                }
                // A singleton group may legitimately end up alone in its island.
                if groups.members(k).len() >= 2 {
                    let terms = out_arcs[bus].iter().map(|&z| (z, 1.0)).collect();
                    model.add_constraint(LinearConstraint::ge(FAMILY_ROOT_OUT, terms, 1.0))?;
                }
            }
            None => {
                let terms = in_arcs[bus].iter().map(|&z| (z, 1.0)).collect();
                model.add_constraint(LinearConstraint::eq(FAMILY_IN_DEGREE, terms, 1.0))?;
            }
        }
    }

    for cycle in short_cycles {
        for orientation in [1i8, -1] {
            let terms =
                cycle.edges.iter().map(|&(e, s)| (layout.arcs[e][usize::from(s * orientation < 0)], 1.0)).collect();
            model.add_constraint(LinearConstraint::le(FAMILY_CYCLE_BREAK, terms, (cycle.len() - 1) as f64))?;
        }
    }
    Ok(())
}

/// Row `sum z(C) <= |C| - 1` for one directed cycle.
pub fn cycle_break_row(layout: &ModelLayout, arcs: &[Arc]) -> LinearConstraint {
    let terms = arcs.iter().map(|a| (layout.arc_var(a), 1.0)).collect();
    LinearConstraint::le(FAMILY_CYCLE_BREAK, terms, (arcs.len() - 1) as f64)
}
