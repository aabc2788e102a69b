//! Lazy row generators for the spanning-forest and cycle-KVL models.
//!
//! All three act on integral incumbents only and are called by
//! [`crate::milp::solve_lazy`] in the order cycle breaking, root cutsets,
//! KVL refresh.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::error::Result;
use crate::formulations::{cycle_break_row, kvl_rows, Connectivity, IslandingModel, KvlForm, ModelLayout};
use crate::graph::{extract_directed_cycles, fundamental_cycle_basis, min_spanning_forest, Arc};
pub use crate::milp::SeparationReport;
use crate::milp::{LazySeparator, LinearConstraint, VIOLATION_TOL};
use crate::net::{CoherentGroups, NetworkCase};

pub const FAMILY_ROOT_CUTSET: &str = "root_cutset";
pub const FAMILY_KVL_REFRESH: &str = "kvl_refresh";

/// Spanning-forest weight of edges that were in the intact-network MST.
const MST_EDGE_WEIGHT: f64 = 1e-6;

/// Breaks directed cycles that make the arc selection more than `K` trees.
#[derive(Debug, Clone)]
pub struct CycleBreaking {
    layout: ModelLayout,
    n: usize,
    roots: Vec<usize>,
}

impl CycleBreaking {
    pub fn new(m: &IslandingModel) -> Self {
        Self { layout: m.layout.clone(), n: m.layout.x.len(), roots: m.roots.clone() }
    }

    pub fn cycle_rows(&self, values: &[f64]) -> Result<Vec<LinearConstraint>> {
        let arcs = self.layout.enabled_arcs(values);
        let cycles = extract_directed_cycles(self.n, &arcs, &self.roots, self.roots.len())?;
        Ok(cycles.iter().map(|c| cycle_break_row(&self.layout, &c.arcs)).collect())
    }
}

impl LazySeparator for CycleBreaking {
    fn family(&self) -> &'static str {
        "cycle_break"
    }

    fn separate(&self, values: &[f64]) -> Result<Vec<Vec<LinearConstraint>>> {
        Ok(self.cycle_rows(values)?.into_iter().map(|r| vec![r]).collect())
    }
}

/// Directed cuts between each root and the unreached members of its group.
#[derive(Debug, Clone)]
pub struct RootCutsets {
    layout: ModelLayout,
    n: usize,
    groups: Vec<Vec<usize>>,
    roots: Vec<usize>,
}

impl RootCutsets {
    pub fn new(m: &IslandingModel, groups: &CoherentGroups) -> Self {
        Self {
            layout: m.layout.clone(),
            n: m.layout.x.len(),
            groups: groups.groups().to_vec(),
            roots: groups.roots().to_vec(),
        }
    }

    pub fn cutset_rows(&self, values: &[f64]) -> Vec<LinearConstraint> {
        let arcs = self.layout.enabled_arcs(values);
        let mut out_adj: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        let mut in_adj: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for a in &arcs {
            out_adj[a.tail].push(a.head);
            in_adj[a.head].push(a.tail);
        }
        let mut seen_sets: HashSet<BTreeSet<usize>> = HashSet::new();
        let mut rows = Vec::new();
        for (members, &root) in self.groups.iter().zip(&self.roots) {
            let reached = reach(root, &out_adj, self.n);
            for &t in members {
                if reached[t] {
                    continue;
                }
                let reaches_t = reach(t, &in_adj, self.n);
                let s: BTreeSet<usize> = (0..self.n).filter(|&v| reaches_t[v]).collect();
                if !seen_sets.insert(s.clone()) {
                    continue;
                }
                let mut terms = Vec::new();
                for (e, &(u, v)) in self.layout.ends.iter().enumerate() {
                    for (tail, head) in [(u, v), (v, u)] {
                        if !s.contains(&tail) && s.contains(&head) {
                            terms.push((self.layout.arc_var(&Arc { edge: e, tail, head }), 1.0));
                        }
                    }
                }
                rows.push(LinearConstraint::ge(FAMILY_ROOT_CUTSET, terms, 1.0));
            }
        }
        rows
    }
}

fn reach(start: usize, adj: &[Vec<usize>], n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

impl LazySeparator for RootCutsets {
    fn family(&self) -> &'static str {
        FAMILY_ROOT_CUTSET
    }

    fn separate(&self, values: &[f64]) -> Result<Vec<Vec<LinearConstraint>>> {
        Ok(self.cutset_rows(values).into_iter().map(|r| vec![r]).collect())
    }
}

/// Re-derives a cycle basis of the closed network for each incumbent and
/// adds KVL rows for every basis cycle whose flows do not sum to zero.
#[derive(Debug, Clone)]
pub struct KvlRefresh {
    case: NetworkCase,
    layout: ModelLayout,
    mst_edges: Vec<usize>,
}

impl KvlRefresh {
    pub fn new(m: &IslandingModel, case: &NetworkCase) -> Self {
        Self { case: case.clone(), layout: m.layout.clone(), mst_edges: m.mst.edges.clone() }
    }

    /// Row pairs for the violated cycles; each pair is `[<=, >=]`.
    pub fn refresh_rows(&self, values: &[f64]) -> Result<Vec<[LinearConstraint; 2]>> {
        let closed = self.case.graph().subgraph(|e| !self.layout.is_open(values, e));
        let forest =
            min_spanning_forest(
                &closed,
                |e| {
                    if self.mst_edges.binary_search(&e).is_ok() {
                        MST_EDGE_WEIGHT
                    } else {
                        1.0
                    }
                },
            );
        let basis = fundamental_cycle_basis(&closed, &forest)?;
        let mut out = Vec::new();
        for cycle in basis.cycles {
            let residual =
                cycle.signed_sum(|e| values[self.layout.p[e].index()] / self.case.branches()[e].susceptance_pu);
            if residual.abs() > VIOLATION_TOL {
                let mut pair = kvl_rows(&self.case, &self.layout, &cycle.canonical())?;
                for row in &mut pair {
                    row.family = FAMILY_KVL_REFRESH.to_string();
                }
                out.push(pair);
            }
        }
        Ok(out)
    }
}

impl LazySeparator for KvlRefresh {
    fn family(&self) -> &'static str {
        FAMILY_KVL_REFRESH
    }

    fn separate(&self, values: &[f64]) -> Result<Vec<Vec<LinearConstraint>>> {
        Ok(self.refresh_rows(values)?.into_iter().map(Vec::from).collect())
    }
}

/// The separators a model needs, in calling order.
pub struct SeparatorSet {
    pub cycle_breaking: Option<CycleBreaking>,
    pub root_cutsets: Option<RootCutsets>,
    pub kvl_refresh: Option<KvlRefresh>,
}

impl SeparatorSet {
    pub fn for_model(m: &IslandingModel, case: &NetworkCase, groups: &CoherentGroups) -> Self {
        let forest = m.variant.connectivity == Connectivity::SpanningForest;
        Self {
            cycle_breaking: forest.then(|| CycleBreaking::new(m)),
            root_cutsets: forest.then(|| RootCutsets::new(m, groups)),
            kvl_refresh: (m.variant.kvl == KvlForm::CycleKvl).then(|| KvlRefresh::new(m, case)),
        }
    }

    pub fn as_dyn(&self) -> Vec<&dyn LazySeparator> {
        let mut out: Vec<&dyn LazySeparator> = Vec::new();
        if let Some(s) = &self.cycle_breaking {
            out.push(s);
        }
        if let Some(s) = &self.root_cutsets {
            out.push(s);
        }
        if let Some(s) = &self.kvl_refresh {
            out.push(s);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::{build_model, BigMConfig, ModelVariant, ObjectiveWeights};
    use crate::net::{Branch, Bus, GroupSpec};

    /// Ring 0-1-2-3-4-5-0 with chord 1-4; roots 0 and 3.
    fn ring_model() -> (NetworkCase, CoherentGroups, IslandingModel) {
        let buses = (0..6).map(|i| Bus { id: i + 1, load_pu: 0.1, gen_pu: 0.1 }).collect();
        let mut branches: Vec<Branch> = (0..6).map(|i| Branch::new(i, (i + 1) % 6, 5.0)).collect();
        branches.push(Branch::new(1, 4, 5.0));
        let case = NetworkCase::new(100.0, buses, branches).unwrap();
        let specs = [GroupSpec { buses: vec![1, 2], root: Some(1) }, GroupSpec { buses: vec![4], root: None }];
        let groups = CoherentGroups::new(&case, &specs).unwrap();
        let m = build_model(
            &case,
            &groups,
            &ObjectiveWeights::load_shed(),
            &BigMConfig::default(),
            &ModelVariant::proposed(),
        )
        .unwrap();
        (case, groups, m)
    }

    fn set_arc(m: &IslandingModel, v: &mut [f64], tail: usize, head: usize) {
        let e = m.layout.ends.iter().position(|&(a, b)| (a, b) == (tail, head) || (a, b) == (head, tail)).unwrap();
        v[m.layout.arc_var(&Arc { edge: e, tail, head }).index()] = 1.0;
    }

    #[test]
    fn clean_forest_triggers_nothing() {
        let (_, groups, m) = ring_model();
        let mut v = vec![0.0; m.model.num_vars()];
        // Trees 0 -> 1 -> 2 and 3 -> 4 -> 5.
        for (t, h) in [(0, 1), (1, 2), (3, 4), (4, 5)] {
            set_arc(&m, &mut v, t, h);
        }
        assert!(CycleBreaking::new(&m).cycle_rows(&v).unwrap().is_empty());
        assert!(RootCutsets::new(&m, &groups).cutset_rows(&v).is_empty());
    }

    /// Roots 0 and 1 hang off a triangle 2-3-4; group of root 0 also holds 3.
    fn triangle_model() -> (NetworkCase, CoherentGroups, IslandingModel) {
        let buses = (0..5).map(|i| Bus { id: i + 1, load_pu: 0.1, gen_pu: 0.1 }).collect();
        let branches = [(0, 2), (1, 4), (2, 3), (3, 4), (2, 4)].iter().map(|&(u, v)| Branch::new(u, v, 4.0)).collect();
        let case = NetworkCase::new(100.0, buses, branches).unwrap();
        let specs = [GroupSpec { buses: vec![1, 4], root: Some(1) }, GroupSpec { buses: vec![2], root: None }];
        let groups = CoherentGroups::new(&case, &specs).unwrap();
        let m = build_model(
            &case,
            &groups,
            &ObjectiveWeights::load_shed(),
            &BigMConfig::default(),
            &ModelVariant::proposed(),
        )
        .unwrap();
        (case, groups, m)
    }

    #[test]
    fn rogue_triangle_is_cut_by_both_families() {
        let (_, groups, m) = triangle_model();
        let mut v = vec![0.0; m.model.num_vars()];
        for (t, h) in [(2, 3), (3, 4), (4, 2)] {
            set_arc(&m, &mut v, t, h);
        }
        let cb = CycleBreaking::new(&m).cycle_rows(&v).unwrap();
        assert_eq!(cb.len(), 1);
        assert_eq!(cb[0].rhs, 2.0);
        assert_eq!(cb[0].terms.len(), 3);
        assert!(cb[0].violation(&v) > 0.5);

        let cuts = RootCutsets::new(&m, &groups).cutset_rows(&v);
        assert_eq!(cuts.len(), 1);
        // Arcs entering {2, 3, 4}: 0 -> 2 and 1 -> 4.
        assert_eq!(cuts[0].terms.len(), 2);
        assert!((cuts[0].violation(&v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kvl_refresh_flags_inconsistent_triangle() {
        let (case, _, m) = triangle_model();
        let refresh = KvlRefresh::new(&m, &case);
        let mut v = vec![0.0; m.model.num_vars()];
        // Open the two radial branches; flows around the triangle 2 -> 3 -> 4 -> 2.
        v[m.layout.y[0].index()] = 1.0;
        v[m.layout.y[1].index()] = 1.0;
        assert!(refresh.refresh_rows(&v).unwrap().is_empty());
        v[m.layout.p[2].index()] = 0.3;
        let rows = refresh.refresh_rows(&v).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].iter().any(|r| r.violation(&v) > 1e-3));
        // Flow 0.2 from bus 2 to bus 4 split evenly over the two paths.
        v[m.layout.p[2].index()] = 0.1;
        v[m.layout.p[3].index()] = 0.1;
        v[m.layout.p[4].index()] = 0.2;
        assert!(refresh.refresh_rows(&v).unwrap().is_empty());
    }
}
