use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MAX_SHORT_CYCLE_LEN;

pub const DEFAULT_SHORT_CYCLE_LEN: usize = 7;

/// Pre-seeded short cycles allowed per branch; longer lengths are dropped
/// until the count fits.
pub const SHORT_CYCLES_PER_BRANCH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveRegime {
    LoadShed,
    Imbalance,
}

impl ObjectiveRegime {
    pub fn weights(self) -> ObjectiveWeights {
        match self {
            ObjectiveRegime::LoadShed => ObjectiveWeights::load_shed(),
            ObjectiveRegime::Imbalance => ObjectiveWeights::imbalance(),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveRegime::LoadShed => "load_shed",
            ObjectiveRegime::Imbalance => "imbalance",
        }
    }
}

impl fmt::Display for ObjectiveRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObjectiveRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "load_shed" | "ls" => Ok(ObjectiveRegime::LoadShed),
            "imbalance" | "imb" => Ok(ObjectiveRegime::Imbalance),
            other => Err(Error::Config(format!("unknown objective regime '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveWeights {
    /// Island imbalance.
    pub alpha: f64,
    /// Load shedding.
    pub beta: f64,
    /// Generation shedding.
    pub gamma: f64,
    /// Flow disruption on opened branches.
    pub mu: f64,
    /// Price opened branches by signed base flow instead of its magnitude.
    #[serde(default)]
    pub signed_flow_cost: bool,
}

impl ObjectiveWeights {
    pub fn new(alpha: f64, beta: f64, gamma: f64, mu: f64) -> Result<Self> {
        let w = Self { alpha, beta, gamma, mu, signed_flow_cost: false };
        w.validate()?;
        Ok(w)
    }

    pub fn load_shed() -> Self {
        Self { alpha: 0.0, beta: 1.0, gamma: 0.01, mu: 0.1, signed_flow_cost: false }
    }

    pub fn imbalance() -> Self {
        Self { alpha: 1.0, beta: 0.01, gamma: 0.01, mu: 0.01, signed_flow_cost: false }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha, self.beta, self.gamma, self.mu];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config(format!("weights must be finite and nonnegative, got {all:?}")));
        }
        if all.iter().all(|&w| w == 0.0) {
            return Err(Error::Config("at least one objective weight must be positive".into()));
        }
        Ok(())
    }

    /// Cost coefficient of opening a branch carrying `base_flow`.
    pub fn flow_cost(&self, base_flow: f64) -> f64 {
        let f = if self.signed_flow_cost { base_flow } else { base_flow.abs() };
        self.mu * f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BigMConfig {
    /// Uniform constant relaxing Ohm's law on open branches.
    pub m_phi: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    /// Commodity flow bound; `None` means `n - 1`.
    #[serde(default)]
    pub commodity_cap: Option<usize>,
}

impl Default for BigMConfig {
    fn default() -> Self {
        Self { m_phi: 2.0 * PI, phi_min: -PI, phi_max: PI, commodity_cap: None }
    }
}

impl BigMConfig {
    pub fn with_m_phi(m_phi: f64) -> Self {
        Self { m_phi, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m_phi > 0.0 && self.m_phi.is_finite()) {
            return Err(Error::Config(format!("m_phi must be positive, got {}", self.m_phi)));
        }
        if !(self.phi_min < 0.0 && 0.0 < self.phi_max) {
            return Err(Error::Config(format!(
                "angle bounds must straddle zero, got [{}, {}]",
                self.phi_min, self.phi_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    CommodityFlow,
    SpanningForest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KvlForm {
    BigMOhm,
    CycleKvl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelVariant {
    pub connectivity: Connectivity,
    pub kvl: KvlForm,
    /// Longest cycle used for pre-seeded KVL and cycle-breaking rows.
    pub short_cycle_len: usize,
    pub triangles: bool,
}

impl ModelVariant {
    pub fn benchmark() -> Self {
        Self {
            connectivity: Connectivity::CommodityFlow,
            kvl: KvlForm::BigMOhm,
            short_cycle_len: DEFAULT_SHORT_CYCLE_LEN,
            triangles: false,
        }
    }

    pub fn proposed() -> Self {
        Self {
            connectivity: Connectivity::SpanningForest,
            kvl: KvlForm::CycleKvl,
            short_cycle_len: DEFAULT_SHORT_CYCLE_LEN,
            triangles: true,
        }
    }

    /// Angle-based Ohm's law with spanning-forest connectivity.
    pub fn hybrid() -> Self {
        Self {
            connectivity: Connectivity::SpanningForest,
            kvl: KvlForm::BigMOhm,
            short_cycle_len: DEFAULT_SHORT_CYCLE_LEN,
            triangles: false,
        }
    }

    pub fn name(&self) -> &'static str {
        match (self.connectivity, self.kvl) {
            (Connectivity::CommodityFlow, KvlForm::BigMOhm) => "benchmark",
            (Connectivity::SpanningForest, KvlForm::CycleKvl) => "proposed",
            (Connectivity::SpanningForest, KvlForm::BigMOhm) => "hybrid",
            (Connectivity::CommodityFlow, KvlForm::CycleKvl) => "flow_cycle_kvl",
        }
    }

    pub fn uses_angles(&self) -> bool {
        self.kvl == KvlForm::BigMOhm
    }

    pub fn validate(&self) -> Result<()> {
        if !(3..=MAX_SHORT_CYCLE_LEN).contains(&self.short_cycle_len) {
            return Err(Error::Config(format!(
                "short cycle length must lie in 3..={MAX_SHORT_CYCLE_LEN}, got {}",
                self.short_cycle_len
            )));
        }
        Ok(())
    }
}

impl FromStr for ModelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "benchmark" => Ok(Self::benchmark()),
            "proposed" => Ok(Self::proposed()),
            "hybrid" => Ok(Self::hybrid()),
            other => Err(Error::Config(format!("unknown variant '{other}'"))),
        }
    }
}
