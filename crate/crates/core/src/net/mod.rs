//! Problem instance: buses, branches, coherent groups, and the base-case
//! DC power flow that supplies pre-split branch flows.

mod case;
mod groups;
mod matpower;
mod powerflow;

pub use case::{apply_flow_limits, Branch, Bus, BusId, FlowLimitRule, NetworkCase};
pub use groups::{load_groups, parse_groups_csv, parse_groups_json, CoherentGroups, GroupSpec, GroupsFile};
pub use matpower::{parse_case, write_case};
pub use powerflow::{base_dc_power_flow, with_base_flows, DcPowerFlow};

/// Reads and parses a MATPOWER case file.
pub fn load_case(path: &std::path::Path) -> crate::Result<NetworkCase> {
    parse_case(&std::fs::read_to_string(path)?)
}
