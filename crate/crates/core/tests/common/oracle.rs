//! Exhaustive islanding oracle: every connected, group-respecting partition,
//! each island's shedding problem solved as an angle-based DC LP.

use std::collections::HashMap;

use ici_core::formulations::ObjectiveWeights;
use ici_core::net::{CoherentGroups, NetworkCase};

use super::lp::{DenseLp, LpOutcome, Sense};

#[derive(Debug, Clone)]
pub struct OracleOptimum {
    pub objective: f64,
    pub island_of: Vec<usize>,
    pub partitions: usize,
    /// Sum over islands of `|net injection|` at the optimum.
    pub p_delta: f64,
}

pub struct PartitionOracle<'a> {
    case: &'a NetworkCase,
    groups: &'a CoherentGroups,
    weights: ObjectiveWeights,
    /// Bound on every non-root angle; `None` leaves angles free.
    angle_box: Option<f64>,
    cache: HashMap<Vec<usize>, Option<f64>>,
}

impl<'a> PartitionOracle<'a> {
    pub fn new(case: &'a NetworkCase, groups: &'a CoherentGroups, weights: ObjectiveWeights) -> Self {
        Self { case, groups, weights, angle_box: None, cache: HashMap::new() }
    }

    pub fn with_angle_box(mut self, bound: f64) -> Self {
        self.angle_box = Some(bound);
        self
    }

    /// Every connected partition of the buses into `K` islands with island
    /// `k` containing group `k`.
    pub fn partitions(&self) -> Vec<Vec<usize>> {
        let n = self.case.num_buses();
        let k = self.groups.len();
        let mut fixed = vec![None; n];
        for g in 0..k {
            for &i in self.groups.members(g) {
                fixed[i] = Some(g);
            }
        }
        let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
        let mut label: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
        let mut out = Vec::new();
        let mut digits = vec![0usize; free.len()];
        loop {
            for (d, &i) in digits.iter().zip(&free) {
                label[i] = *d;
            }
            if self.is_connected_partition(&label) {
                out.push(label.clone());
            }
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    return out;
                }
                digits[pos] += 1;
                if digits[pos] < k {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }

    fn is_connected_partition(&self, label: &[usize]) -> bool {
        let n = label.len();
        let mut adj = vec![Vec::new(); n];
        for br in self.case.branches() {
            if label[br.from] == label[br.to] {
                adj[br.from].push(br.to);
                adj[br.to].push(br.from);
            }
        }
        let mut seen = vec![false; n];
        for k in 0..self.groups.len() {
            let r = self.groups.root(k);
            seen[r] = true;
            let mut stack = vec![r];
            while let Some(u) = stack.pop() {
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// Cheapest shedding for one island, `None` when infeasible.
    fn island_cost(&mut self, members: Vec<usize>) -> Option<f64> {
        if let Some(c) = self.cache.get(&members) {
            return *c;
        }
        let root = members.iter().copied().find(|&i| self.groups.is_root(i)).expect("island holds a root");
        let mut lp = DenseLp::default();
        let bound = self.angle_box.unwrap_or(f64::INFINITY);
        let mut theta = HashMap::new();
        for &i in &members {
            if i != root {
                theta.insert(i, lp.add_var(0.0, -bound, bound));
            }
        }
        let buses = self.case.buses();
        let mut shed_ls = HashMap::new();
        let mut shed_gs = HashMap::new();
        for &i in &members {
            if buses[i].load_pu > 0.0 {
                shed_ls.insert(i, lp.add_var(self.weights.beta, 0.0, buses[i].load_pu));
            }
            if buses[i].gen_pu > 0.0 {
                shed_gs.insert(i, lp.add_var(self.weights.gamma, 0.0, buses[i].gen_pu));
            }
        }
        let inside: Vec<bool> = {
            let mut v = vec![false; self.case.num_buses()];
            for &i in &members {
                v[i] = true;
            }
            v
        };
        // Flow from->to is b (theta_from - theta_to).
        let flow_terms = |br: &ici_core::net::Branch| -> Vec<(usize, f64)> {
            let mut t = Vec::new();
            if let Some(&j) = theta.get(&br.from) {
                t.push((j, br.susceptance_pu));
            }
            if let Some(&j) = theta.get(&br.to) {
                t.push((j, -br.susceptance_pu));
            }
            t
        };
        let mut balance: HashMap<usize, Vec<(usize, f64)>> = members.iter().map(|&i| (i, Vec::new())).collect();
        for br in self.case.branches() {
            if inside[br.from] && inside[br.to] {
                let f = flow_terms(br);
                lp.add_row(&f, Sense::Le, br.flow_limit_pu);
                lp.add_row(&f, Sense::Ge, -br.flow_limit_pu);
                balance.get_mut(&br.from).unwrap().extend(f.iter().copied());
                balance.get_mut(&br.to).unwrap().extend(f.iter().map(|&(j, v)| (j, -v)));
            }
        }
        // out-flow + pgs - pls = gen - load
        for &i in &members {
            let mut terms = balance.remove(&i).unwrap();
            if let Some(&j) = shed_gs.get(&i) {
                terms.push((j, 1.0));
            }
            if let Some(&j) = shed_ls.get(&i) {
                terms.push((j, -1.0));
            }
            lp.add_row(&terms, Sense::Eq, buses[i].gen_pu - buses[i].load_pu);
        }
        let cost = match lp.solve() {
            LpOutcome::Optimal { objective, .. } => Some(objective),
            LpOutcome::Infeasible => None,
            LpOutcome::Unbounded => panic!("shedding LP cannot be unbounded"),
        };
        self.cache.insert(members, cost);
        cost
    }

    /// Objective of a labelled partition, `None` if some island is infeasible.
    pub fn partition_cost(&mut self, label: &[usize]) -> Option<(f64, f64)> {
        let k = self.groups.len();
        let mut islands = vec![Vec::new(); k];
        for (i, &l) in label.iter().enumerate() {
            islands[l].push(i);
        }
        let mut total = 0.0;
        let mut p_delta = 0.0;
        for members in islands {
            let net: f64 = members.iter().map(|&i| self.case.buses()[i].net_injection()).sum();
            p_delta += net.abs();
            total += self.island_cost(members)?;
        }
        total += self.weights.alpha * p_delta;
        for br in self.case.branches() {
            if label[br.from] != label[br.to] {
                total += self.weights.mu * br.base_flow_pu.abs();
            }
        }
        Some((total, p_delta))
    }

    pub fn optimum(&mut self) -> Option<OracleOptimum> {
        let parts = self.partitions();
        let count = parts.len();
        let mut best: Option<OracleOptimum> = None;
        for label in parts {
            if let Some((cost, p_delta)) = self.partition_cost(&label) {
                if best.as_ref().is_none_or(|b| cost < b.objective - 1e-12) {
                    best = Some(OracleOptimum { objective: cost, island_of: label, partitions: count, p_delta });
                }
            }
        }
        best
    }
}
