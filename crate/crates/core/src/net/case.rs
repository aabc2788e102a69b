use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// External bus number as it appears in case and group files.
pub type BusId = u32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: BusId,
    /// Pre-split demand in per unit.
    pub load_pu: f64,
    /// Pre-split generation in per unit, summed over in-service units.
    pub gen_pu: f64,
}

impl Bus {
    pub fn net_injection(&self) -> f64 {
        self.gen_pu - self.load_pu
    }
}

/// A switchable transmission element between two buses (internal indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    pub susceptance_pu: f64,
    pub flow_limit_pu: f64,
    /// Pre-split flow from `from` to `to`, filled by the base-case power flow.
    pub base_flow_pu: f64,
}

impl Branch {
    pub fn new(from: usize, to: usize, susceptance_pu: f64) -> Self {
        Self { from, to, susceptance_pu, flow_limit_pu: susceptance_pu * FRAC_PI_4, base_flow_pu: 0.0 }
    }

    /// Largest admissible angle difference across the branch.
    pub fn angle_capacity(&self) -> f64 {
        (self.flow_limit_pu / self.susceptance_pu).abs()
    }

    pub fn other_end(&self, bus: usize) -> usize {
        if bus == self.from {
            self.to
        } else {
            self.from
        }
    }
}

/// Immutable problem instance: a connected DC network in per unit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkCase {
    base_mva: f64,
    buses: Vec<Bus>,
    branches: Vec<Branch>,
    #[serde(skip)]
    index: HashMap<BusId, usize>,
}

impl NetworkCase {
    /// Validates the instance invariants and builds the id index.
    pub fn new(base_mva: f64, buses: Vec<Bus>, branches: Vec<Branch>) -> Result<Self> {
        if !(base_mva > 0.0) {
            return Err(Error::Validation(format!("baseMVA must be positive, got {base_mva}")));
        }
        if buses.len() < 2 {
            return Err(Error::InstanceRejected(format!("need at least 2 buses, got {}", buses.len())));
        }
        if branches.is_empty() {
            return Err(Error::InstanceRejected("case has no in-service branches".into()));
        }
        let mut index = HashMap::with_capacity(buses.len());
        for (i, bus) in buses.iter().enumerate() {
            if index.insert(bus.id, i).is_some() {
                return Err(Error::Validation(format!("duplicate bus id {}", bus.id)));
            }
            if !(bus.load_pu >= 0.0) || !(bus.gen_pu >= 0.0) {
                return Err(Error::Validation(format!("bus {} has negative load or generation", bus.id)));
            }
        }
        let mut pairs = HashMap::with_capacity(branches.len());
        for (e, br) in branches.iter().enumerate() {
            if br.from >= buses.len() || br.to >= buses.len() {
                return Err(Error::Validation(format!("branch {e} references an unknown bus")));
            }
            if br.from == br.to {
                return Err(Error::Validation(format!("branch {e} is a self-loop at bus {}", buses[br.from].id)));
            }
            if !(br.susceptance_pu > 0.0) || !br.susceptance_pu.is_finite() {
                return Err(Error::Unsupported(format!(
                    "branch {e} has non-positive susceptance {}",
                    br.susceptance_pu
                )));
            }
            if !(br.flow_limit_pu > 0.0) {
                return Err(Error::Validation(format!("branch {e} has non-positive flow limit {}", br.flow_limit_pu)));
            }
            let key = (br.from.min(br.to), br.from.max(br.to));
            if pairs.insert(key, e).is_some() {
                return Err(Error::Validation(format!(
                    "parallel branches between buses {} and {} must be merged",
                    buses[key.0].id, buses[key.1].id
                )));
            }
        }
        let case = Self { base_mva, buses, branches, index };
        if !case.is_connected() {
            return Err(Error::InstanceRejected("network graph is not connected".into()));
        }
        Ok(case)
    }

    pub fn base_mva(&self) -> f64 {
        self.base_mva
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn num_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn num_branches(&self) -> usize {
        self.branches.len()
    }

    pub fn bus_index(&self, id: BusId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn total_generation(&self) -> f64 {
        self.buses.iter().map(|b| b.gen_pu).sum()
    }

    pub fn total_load(&self) -> f64 {
        self.buses.iter().map(|b| b.load_pu).sum()
    }

    /// Undirected graph view with branch indices as edge ids.
    pub fn graph(&self) -> crate::graph::Graph {
        crate::graph::Graph::new(self.num_buses(), self.branches.iter().map(|b| (b.from, b.to)))
    }

    pub(crate) fn branches_mut(&mut self) -> &mut [Branch] {
        &mut self.branches
    }

    fn is_connected(&self) -> bool {
        crate::graph::connected_components(&self.graph()).count == 1
    }
}

/// How branch flow limits are assigned.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowLimitRule {
    /// `p_max = b * pi / 4` on every branch.
    AngleQuarterPi,
    /// Explicit limits for the listed branch indices; other branches keep theirs.
    Explicit(Vec<(usize, f64)>),
}

pub fn apply_flow_limits(case: &NetworkCase, rule: &FlowLimitRule) -> Result<NetworkCase> {
    let mut out = case.clone();
    match rule {
        FlowLimitRule::AngleQuarterPi => {
            for br in out.branches_mut() {
                br.flow_limit_pu = br.susceptance_pu * FRAC_PI_4;
            }
        }
        FlowLimitRule::Explicit(limits) => {
            let m = out.num_branches();
            for &(e, limit) in limits {
                if e >= m {
                    return Err(Error::Validation(format!("flow limit for unknown branch {e}")));
                }
                if !(limit > 0.0) || !limit.is_finite() {
                    return Err(Error::Validation(format!(
                        "flow limit of branch {e} must be positive and finite, got {limit}"
                    )));
                }
                out.branches_mut()[e].flow_limit_pu = limit;
            }
        }
    }
    Ok(out)
}
