use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::case::{BusId, NetworkCase};
use crate::error::{Error, Result};

/// Disjoint coherent generator groups, one designated root per group.
///
/// Members and roots are internal bus indices of the case the groups were
/// resolved against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherentGroups {
    groups: Vec<Vec<usize>>,
    roots: Vec<usize>,
}

/// On-disk group description using external bus numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub buses: Vec<BusId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<BusId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupsFile {
    pub groups: Vec<GroupSpec>,
}

impl CoherentGroups {
    /// Resolves external bus numbers against `case` and checks the invariants.
    ///
    /// A group without an explicit root is rooted at its member with the
    /// largest generation (lowest bus index on ties).
    pub fn new(case: &NetworkCase, specs: &[GroupSpec]) -> Result<Self> {
        if specs.len() < 2 {
            return Err(Error::Config(format!("need at least 2 groups, got {}", specs.len())));
        }
        let mut seen = HashSet::new();
        let mut groups = Vec::with_capacity(specs.len());
        let mut roots = Vec::with_capacity(specs.len());
        for (k, spec) in specs.iter().enumerate() {
            if spec.buses.is_empty() {
                return Err(Error::Validation(format!("group {} is empty", k + 1)));
            }
            let mut members = Vec::with_capacity(spec.buses.len());
            for &id in &spec.buses {
                let i = case.bus_index(id).ok_or_else(|| {
                    Error::Validation(format!("group {} member {id} is not a bus of the case", k + 1))
                })?;
                if !seen.insert(i) {
                    return Err(Error::Validation(format!("bus {id} appears in more than one group")));
                }
                members.push(i);
            }
            let root = match spec.root {
                Some(id) => {
                    let r = case
                        .bus_index(id)
                        .ok_or_else(|| Error::Validation(format!("root {id} of group {} is not a bus", k + 1)))?;
                    if !members.contains(&r) {
                        return Err(Error::Validation(format!("root {id} is not a member of group {}", k + 1)));
                    }
                    r
                }
                None => *members
                    .iter()
                    .min_by(|&&a, &&b| {
                        let (ga, gb) = (case.buses()[a].gen_pu, case.buses()[b].gen_pu);
                        gb.total_cmp(&ga).then(a.cmp(&b))
                    })
                    .expect("group is non-empty"),
            };
            groups.push(members);
            roots.push(root);
        }
        Ok(Self { groups, roots })
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn members(&self, k: usize) -> &[usize] {
        &self.groups[k]
    }

    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn root(&self, k: usize) -> usize {
        self.roots[k]
    }

    /// Group index of `bus`, if it belongs to one.
    pub fn group_of(&self, bus: usize) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(&bus))
    }

    pub fn is_root(&self, bus: usize) -> bool {
        self.roots.contains(&bus)
    }

    /// Keeps only the first `k` groups.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k < 2 || k > self.len() {
            return Err(Error::Config(format!("K = {k} must lie in 2..={} (groups available)", self.len())));
        }
        Ok(Self { groups: self.groups[..k].to_vec(), roots: self.roots[..k].to_vec() })
    }

    pub fn to_specs(&self, case: &NetworkCase) -> Vec<GroupSpec> {
        let id = |i: usize| case.buses()[i].id;
        self.groups
            .iter()
            .zip(&self.roots)
            .map(|(g, &r)| GroupSpec { buses: g.iter().map(|&i| id(i)).collect(), root: Some(id(r)) })
            .collect()
    }
}

/// Parses `{"groups": [{"buses": [..], "root": ..}, ..]}`; a bare array of
/// groups is also accepted.
pub fn parse_groups_json(text: &str) -> Result<Vec<GroupSpec>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Doc {
        File(GroupsFile),
        Specs(Vec<GroupSpec>),
        Lists(Vec<Vec<BusId>>),
    }
    Ok(match serde_json::from_str::<Doc>(text)? {
        Doc::File(f) => f.groups,
        Doc::Specs(s) => s,
        Doc::Lists(l) => l.into_iter().map(|buses| GroupSpec { buses, root: None }).collect(),
    })
}

/// Parses CSV rows `group,bus[,root]`, where a truthy `root` column marks the
/// group's root. Groups are ordered by their label.
pub fn parse_groups_csv(text: &str) -> Result<Vec<GroupSpec>> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut by_label: BTreeMap<i64, GroupSpec> = BTreeMap::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let line = row + 2;
        let field = |i: usize| record.get(i).unwrap_or("");
        let label: i64 = field(0)
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("invalid group label '{}'", field(0)) })?;
        let bus: BusId =
            field(1).parse().map_err(|_| Error::Parse { line, message: format!("invalid bus id '{}'", field(1)) })?;
        let is_root = matches!(field(2).to_ascii_lowercase().as_str(), "1" | "true" | "yes" | "root");
        let spec = by_label.entry(label).or_insert_with(|| GroupSpec { buses: vec![], root: None });
        spec.buses.push(bus);
        if is_root {
            if spec.root.is_some() {
                return Err(Error::Parse { line, message: format!("group {label} has two roots") });
            }
            spec.root = Some(bus);
        }
    }
    Ok(by_label.into_values().collect())
}

/// Loads a groups file, choosing the format by extension (`.csv` or JSON).
pub fn load_groups(path: &Path, case: &NetworkCase) -> Result<CoherentGroups> {
    let text = std::fs::read_to_string(path)?;
    let specs = match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("csv") => parse_groups_csv(&text)?,
        _ => parse_groups_json(&text)?,
    };
    CoherentGroups::new(case, &specs)
}
