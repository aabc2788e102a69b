//! End-to-end experiment runs: load, base power flow, build, optional start
//! heuristic, lazy solve, certification and metrics.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulations::{build_model, BigMConfig, ModelVariant, ObjectiveRegime, ObjectiveWeights};
use crate::heuristic::{heuristic_budget, heuristic_start, HeuristicConfig, HeuristicReport};
use crate::milp::{solve_lazy, LazyConfig, MilpBackend, SeparationReport, SolveOptions, SolveStatus};
use crate::net::{load_case, load_groups, with_base_flows, CoherentGroups, NetworkCase};
use crate::separation::SeparatorSet;
use crate::validate::{certify, compute_metrics, Certificate, IslandingMetrics, IslandingPlan};

pub const SMALL_CASE_TIME_LIMIT: f64 = 480.0;
pub const LARGE_CASE_TIME_LIMIT: f64 = 720.0;
pub const LARGE_CASE_BUSES: usize = 500;
/// Gap below which the CSV reports solve time instead of the gap.
pub const REPORT_GAP: f64 = 0.01;

pub fn default_time_limit(num_buses: usize) -> f64 {
    if num_buses < LARGE_CASE_BUSES {
        SMALL_CASE_TIME_LIMIT
    } else {
        LARGE_CASE_TIME_LIMIT
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub case: PathBuf,
    pub groups: PathBuf,
    /// Use only the first `k` groups.
    #[serde(default)]
    pub k: Option<usize>,
    pub variant: ModelVariant,
    pub regime: ObjectiveRegime,
    pub weights: ObjectiveWeights,
    #[serde(default)]
    pub bigm: BigMConfig,
    /// Seconds; `None` picks the size-based default.
    #[serde(default)]
    pub time_limit: Option<f64>,
    pub heuristic: bool,
    #[serde(default)]
    pub heuristic_config: HeuristicConfig,
    /// Single solver thread and fixed seed.
    #[serde(default)]
    pub deterministic: bool,
}

impl RunConfig {
    pub fn new(
        case: impl Into<PathBuf>,
        groups: impl Into<PathBuf>,
        variant: ModelVariant,
        regime: ObjectiveRegime,
    ) -> Self {
        Self {
            case: case.into(),
            groups: groups.into(),
            k: None,
            variant,
            regime,
            weights: regime.weights(),
            bigm: BigMConfig::default(),
            time_limit: None,
            heuristic: true,
            heuristic_config: HeuristicConfig::default(),
            deterministic: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.weights.validate()?;
        self.bigm.validate()?;
        self.variant.validate()?;
        if let Some(t) = self.time_limit {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::Config(format!("time limit must be positive, got {t}")));
            }
        }
        if matches!(self.k, Some(k) if k < 2) {
            return Err(Error::Config("K must be at least 2".into()));
        }
        Ok(())
    }

    fn solve_options(&self, time_limit: f64) -> SolveOptions {
        let mut o = SolveOptions::default().with_time_limit(time_limit);
        if self.deterministic {
            o.threads = Some(1);
        }
        o
    }
}

/// Pipeline stage at which a run failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Load,
    PowerFlow,
    Build,
    Heuristic,
    Solve,
    Certify,
}

#[derive(Debug)]
pub struct RunFailure {
    pub stage: Stage,
    pub error: Error,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} stage failed: {}", self.stage, self.error)
    }
}

impl std::error::Error for RunFailure {}

impl RunFailure {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "stage": self.stage,
            "kind": self.error.kind(),
            "message": self.error.to_string(),
        })
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, RunFailure>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, RunFailure> {
        self.map_err(|error| RunFailure { stage, error })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Optimal,
    Feasible,
    NoSolution,
    Uncertified,
    Error,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Optimal => "optimal",
            RunStatus::Feasible => "feasible",
            RunStatus::NoSolution => "no_solution",
            RunStatus::Uncertified => "uncertified",
            RunStatus::Error => "error",
        }
    }

    pub fn is_certified(self) -> bool {
        matches!(self, RunStatus::Optimal | RunStatus::Feasible)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelStats {
    pub variables: usize,
    pub binaries: usize,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Echo with the effective time limit filled in.
    pub config: RunConfig,
    pub case_name: String,
    pub num_buses: usize,
    pub num_branches: usize,
    pub num_islands: usize,
    pub status: RunStatus,
    pub solver_status: SolveStatus,
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub gap: Option<f64>,
    pub wall_time: f64,
    pub model: ModelStats,
    pub metrics: Option<IslandingMetrics>,
    pub plan: Option<IslandingPlan>,
    pub certificate: Option<Certificate>,
    pub separation: SeparationReport,
    pub heuristic: HeuristicReport,
}

/// One line of the results table, in the column order of the paper's tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub n: Option<usize>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(rename = "UB")]
    pub ub: Option<f64>,
    pub gap_or_time: String,
    #[serde(rename = "P_LS")]
    pub p_ls: Option<f64>,
    #[serde(rename = "P_Delta")]
    pub p_delta: Option<f64>,
    #[serde(rename = "P_GS")]
    pub p_gs: Option<f64>,
    #[serde(rename = "p_Sigma")]
    pub p_sigma: Option<f64>,
    pub variant: String,
    pub regime: String,
    pub status: String,
}

/// Time when the gap closed below [`REPORT_GAP`], the gap otherwise.
pub fn gap_or_time(gap: f64, wall_time: f64) -> String {
    if gap < REPORT_GAP {
        format!("{wall_time:.2}s")
    } else if gap.is_finite() {
        format!("{:.2}%", 100.0 * gap)
    } else {
        "-".into()
    }
}

impl RunRecord {
    pub fn csv_row(&self) -> CsvRow {
        let m = self.metrics.as_ref();
        CsvRow {
            n: Some(self.num_buses),
            k: Some(self.num_islands),
            ub: m.map(|m| m.objective),
            gap_or_time: match m {
                Some(m) => gap_or_time(m.gap, m.wall_time),
                None => "-".into(),
            },
            p_ls: m.map(|m| m.p_ls_total),
            p_delta: m.map(|m| m.p_delta_total),
            p_gs: m.map(|m| m.p_gs_total),
            p_sigma: m.map(|m| m.flow_cut_total),
            variant: self.config.variant.name().into(),
            regime: self.config.regime.as_str().into(),
            status: self.status.as_str().into(),
        }
    }

    /// File stem used for this run's artifacts.
    pub fn stem(&self) -> String {
        run_stem(&self.case_name, &self.config, self.num_islands)
    }
}

fn run_stem(case_name: &str, config: &RunConfig, k: usize) -> String {
    format!("{case_name}_{}_{}_K{k}", config.variant.name(), config.regime.as_str())
}

fn case_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "case".into())
}

/// Deterministic slack for the base power flow: the largest generator,
/// first bus on ties.
pub fn pick_slack(case: &NetworkCase) -> usize {
    let mut best = 0;
    for (i, bus) in case.buses().iter().enumerate() {
        if bus.gen_pu > case.buses()[best].gen_pu {
            best = i;
        }
    }
    best
}

/// Loads the files named in `config` and runs the pipeline on them.
pub fn run(config: &RunConfig, backend: &dyn MilpBackend) -> std::result::Result<RunRecord, RunFailure> {
    config.validate().at(Stage::Config)?;
    let raw = load_case(&config.case).at(Stage::Load)?;
    let case = with_base_flows(&raw, pick_slack(&raw)).at(Stage::PowerFlow)?;
    let groups = load_groups(&config.groups, &case).at(Stage::Load)?;
    run_instance(config, &case_name(&config.case), &case, &groups, backend)
}

/// Runs build, heuristic, solve, certification and metrics on an instance
/// already in memory. `case` must carry base flows.
pub fn run_instance(
    config: &RunConfig,
    case_name: &str,
    case: &NetworkCase,
    groups: &CoherentGroups,
    backend: &dyn MilpBackend,
) -> std::result::Result<RunRecord, RunFailure> {
    let t0 = Instant::now();
    config.validate().at(Stage::Config)?;
    let groups = match config.k {
        Some(k) => groups.truncated(k).at(Stage::Config)?,
        None => groups.clone(),
    };
    let time_limit = config.time_limit.unwrap_or_else(|| default_time_limit(case.num_buses()));
    let mut echo = config.clone();
    echo.time_limit = Some(time_limit);

    let im = build_model(case, &groups, &config.weights, &config.bigm, &config.variant).at(Stage::Build)?;
    let seps = SeparatorSet::for_model(&im, case, &groups);
    let options = config.solve_options(time_limit);
    log::info!(
        "{case_name}: {} model with {} vars, {} rows",
        config.variant.name(),
        im.model.num_vars(),
        im.model.num_constraints()
    );

    let (start, heuristic) = if config.heuristic {
        let budget = heuristic_budget(time_limit);
        heuristic_start(backend, case, &groups, &im, budget, &config.heuristic_config, &options).at(Stage::Heuristic)?
    } else {
        (None, HeuristicReport { outcome: "disabled".into(), ..HeuristicReport::default() })
    };
    log::info!("heuristic: {}", heuristic.outcome);

    let remaining = (time_limit - t0.elapsed().as_secs_f64()).max(0.1);
    let lazy = LazyConfig { options: options.with_time_limit(remaining), ..LazyConfig::default() };
    let (sol, separation) =
        solve_lazy(backend, &im.model, &seps.as_dyn(), start.as_ref().map(|s| s.values.as_slice()), &lazy, None)
            .at(Stage::Solve)?;
    let wall_time = t0.elapsed().as_secs_f64();

    let mut record = RunRecord {
        config: echo,
        case_name: case_name.into(),
        num_buses: case.num_buses(),
        num_branches: case.num_branches(),
        num_islands: groups.len(),
        status: RunStatus::NoSolution,
        solver_status: sol.status,
        objective: None,
        bound: sol.bound.is_finite().then_some(sol.bound),
        gap: None,
        wall_time,
        model: ModelStats {
            variables: im.model.num_vars(),
            binaries: im.model.num_binaries(),
            rows: im.model.num_constraints(),
        },
        metrics: None,
        plan: None,
        certificate: None,
        separation,
        heuristic,
    };
    if !sol.has_incumbent() {
        return Ok(record);
    }
    record.objective = Some(sol.objective);
    record.gap = Some(sol.gap);

    let plan = IslandingPlan::from_solution(&im, &sol.values);
    let cert = certify(&plan, case, &groups);
    if cert.passed {
        let metrics = compute_metrics(&plan, case, &groups, &config.weights, sol.gap, wall_time).at(Stage::Certify)?;
        if (metrics.objective - sol.objective).abs() > 1e-6 * sol.objective.abs().max(1.0) {
            log::warn!("recomputed objective {} differs from solver objective {}", metrics.objective, sol.objective);
        }
        record.metrics = Some(metrics);
        record.status = if sol.status == SolveStatus::Optimal { RunStatus::Optimal } else { RunStatus::Feasible };
    } else {
        log::warn!("solution failed certification with {} violations", cert.violations.len());
        record.status = RunStatus::Uncertified;
    }
    record.plan = Some(plan);
    record.certificate = Some(cert);
    Ok(record)
}

/// Outcome of one sweep entry.
#[derive(Debug)]
pub struct SweepEntry {
    pub config: RunConfig,
    pub result: std::result::Result<RunRecord, RunFailure>,
}

impl SweepEntry {
    pub fn csv_row(&self) -> CsvRow {
        match &self.result {
            Ok(r) => r.csv_row(),
            Err(_) => CsvRow {
                n: None,
                k: self.config.k,
                ub: None,
                gap_or_time: "-".into(),
                p_ls: None,
                p_delta: None,
                p_gs: None,
                p_sigma: None,
                variant: self.config.variant.name().into(),
                regime: self.config.regime.as_str().into(),
                status: RunStatus::Error.as_str().into(),
            },
        }
    }
}

/// Runs every config in order; failures are recorded, not propagated.
pub fn sweep(configs: &[RunConfig], backend: &dyn MilpBackend) -> Result<Vec<SweepEntry>> {
    if configs.is_empty() {
        return Err(Error::Config("sweep needs at least one configuration".into()));
    }
    Ok(configs
        .iter()
        .map(|c| {
            let result = run(c, backend);
            if let Err(e) = &result {
                log::error!("{}: {e}", case_name(&c.case));
            }
            SweepEntry { config: c.clone(), result }
        })
        .collect())
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one JSON per entry (`<stem>.json`, or `<stem>.error.json` on
/// failure) and the aggregate `results.csv` into `dir`.
pub fn write_results(dir: &Path, entries: &[SweepEntry]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (i, e) in entries.iter().enumerate() {
        match &e.result {
            Ok(r) => fs::write(dir.join(format!("{}.json", r.stem())), serde_json::to_string_pretty(r)?)?,
            Err(f) => {
                let k = e.config.k.unwrap_or(0);
                let stem = format!("{}_{i}", run_stem(&case_name(&e.config.case), &e.config, k));
                let body = serde_json::json!({ "config": e.config, "error": f.to_json() });
                fs::write(dir.join(format!("{stem}.error.json")), serde_json::to_string_pretty(&body)?)?;
            }
        }
    }
    let rows: Vec<CsvRow> = entries.iter().map(SweepEntry::csv_row).collect();
    write_csv(&dir.join("results.csv"), &rows)
}
