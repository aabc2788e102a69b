use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integrality tolerance for binary variables.
pub const INTEGRALITY_TOL: f64 = 1e-6;
/// Feasibility tolerance for constraint rows, in per unit.
pub const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConId(pub(crate) usize);

impl ConId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Binary,
    Continuous,
}

/// Which model symbol a variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarGroup {
    /// Bus-to-island assignment `x[i][k]`.
    Assignment,
    /// Branch opening `y[e]`.
    Opening,
    /// Directed arc selection `z[a]`.
    Arc,
    /// Single-commodity connectivity flow `f[e]`.
    Commodity,
    /// Branch power flow `p[e]`.
    Flow,
    /// Bus voltage angle.
    Angle,
    LoadShed,
    GenShed,
    /// Island imbalance epigraph variable.
    Imbalance,
}

impl VarGroup {
    pub const ALL: [VarGroup; 9] = [
        VarGroup::Assignment,
        VarGroup::Opening,
        VarGroup::Arc,
        VarGroup::Commodity,
        VarGroup::Flow,
        VarGroup::Angle,
        VarGroup::LoadShed,
        VarGroup::GenShed,
        VarGroup::Imbalance,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
    pub group: VarGroup,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for RowSense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        })
    }
}

/// A sparse linear row `sum(coef * var) <sense> rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    /// Constraint family label, used for bookkeeping and export.
    pub family: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn new(family: impl Into<String>, terms: Vec<(VarId, f64)>, sense: RowSense, rhs: f64) -> Self {
        Self { family: family.into(), terms, sense, rhs }
    }

    pub fn le(family: impl Into<String>, terms: Vec<(VarId, f64)>, rhs: f64) -> Self {
        Self::new(family, terms, RowSense::Le, rhs)
    }

    pub fn ge(family: impl Into<String>, terms: Vec<(VarId, f64)>, rhs: f64) -> Self {
        Self::new(family, terms, RowSense::Ge, rhs)
    }

    pub fn eq(family: impl Into<String>, terms: Vec<(VarId, f64)>, rhs: f64) -> Self {
        Self::new(family, terms, RowSense::Eq, rhs)
    }

    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }

    /// Amount by which `values` violates the row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.sense {
            RowSense::Le => (lhs - self.rhs).max(0.0),
            RowSense::Ge => (self.rhs - lhs).max(0.0),
            RowSense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Solver-agnostic minimisation MILP.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MilpModel {
    vars: Vec<Variable>,
    cons: Vec<LinearConstraint>,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
        objective: f64,
        group: VarGroup,
    ) -> VarId {
        let (lower, upper) = match kind {
            VarKind::Binary => (lower.max(0.0), upper.min(1.0)),
            VarKind::Continuous => (lower, upper),
        };
        debug_assert!(lower <= upper, "empty domain for variable");
        self.vars.push(Variable { name: name.into(), kind, lower, upper, objective, group });
        VarId(self.vars.len() - 1)
    }

    pub fn add_binary(&mut self, name: impl Into<String>, objective: f64, group: VarGroup) -> VarId {
        self.add_var(name, VarKind::Binary, 0.0, 1.0, objective, group)
    }

    pub fn add_continuous(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        objective: f64,
        group: VarGroup,
    ) -> VarId {
        self.add_var(name, VarKind::Continuous, lower, upper, objective, group)
    }

    /// Adds a row after checking that it only references known variables.
    pub fn add_constraint(&mut self, con: LinearConstraint) -> Result<ConId> {
        if let Some(&(v, _)) = con.terms.iter().find(|(v, _)| v.0 >= self.vars.len()) {
            return Err(Error::Contract(format!("row of family {} references unknown variable {}", con.family, v.0)));
        }
        if !con.rhs.is_finite() || con.terms.iter().any(|(_, c)| !c.is_finite()) {
            return Err(Error::Contract(format!("row of family {} has non-finite data", con.family)));
        }
        self.cons.push(con);
        Ok(ConId(self.cons.len() - 1))
    }

    pub fn set_bounds(&mut self, v: VarId, lower: f64, upper: f64) {
        let var = &mut self.vars[v.0];
        var.lower = lower;
        var.upper = upper;
    }

    /// Fixes `v` to `value` through its bounds.
    pub fn fix(&mut self, v: VarId, value: f64) {
        self.set_bounds(v, value, value);
    }

    pub fn set_objective(&mut self, v: VarId, coef: f64) {
        self.vars[v.0].objective = coef;
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn variable(&self, v: VarId) -> &Variable {
        &self.vars[v.0]
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.cons
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.cons.len()
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn vars_in(&self, group: VarGroup) -> impl Iterator<Item = VarId> + '_ {
        self.vars.iter().enumerate().filter(move |(_, v)| v.group == group).map(|(i, _)| VarId(i))
    }

    pub fn count_in(&self, group: VarGroup) -> usize {
        self.vars_in(group).count()
    }

    pub fn count_family(&self, family: &str) -> usize {
        self.cons.iter().filter(|c| c.family == family).count()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.vars.iter().zip(values).map(|(v, x)| v.objective * x).sum()
    }

    /// Everything `values` violates beyond `tol`: bounds, integrality, rows.
    pub fn violations(&self, values: &[f64], tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        if values.len() != self.vars.len() {
            out.push(format!("valuation has {} entries, model has {} variables", values.len(), self.vars.len()));
            return out;
        }
        for (var, &x) in self.vars.iter().zip(values) {
            if x < var.lower - tol || x > var.upper + tol {
                out.push(format!("{} = {x} outside [{}, {}]", var.name, var.lower, var.upper));
            }
            if var.kind == VarKind::Binary && (x - x.round()).abs() > INTEGRALITY_TOL {
                out.push(format!("{} = {x} is not integral", var.name));
            }
        }
        for (i, con) in self.cons.iter().enumerate() {
            let viol = con.violation(values);
            if viol > tol {
                out.push(format!("row {i} ({}) violated by {viol:.3e}", con.family));
            }
        }
        out
    }

    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        self.violations(values, tol).is_empty()
    }

    /// Continuous relaxation: binaries become `[0, 1]` continuous variables.
    pub fn relaxed(&self) -> Self {
        let mut out = self.clone();
        for v in &mut out.vars {
            v.kind = VarKind::Continuous;
        }
        out
    }

    /// The LP left after fixing every binary to its rounded value in `values`.
    pub fn with_binaries_fixed(&self, values: &[f64]) -> Self {
        let mut out = self.clone();
        for (v, &x) in out.vars.iter_mut().zip(values) {
            if v.kind == VarKind::Binary {
                let r = x.round().clamp(0.0, 1.0);
                v.lower = r;
                v.upper = r;
                v.kind = VarKind::Continuous;
            }
        }
        out
    }

    /// Rounds binaries within the integrality tolerance to exact 0/1.
    pub fn snap_binaries(&self, values: &mut [f64]) {
        for (v, x) in self.vars.iter().zip(values.iter_mut()) {
            if v.kind == VarKind::Binary && (*x - x.round()).abs() <= INTEGRALITY_TOL {
                *x = x.round();
            }
        }
    }
}
