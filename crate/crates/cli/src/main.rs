//! `ici`: run controlled-islanding models on MATPOWER cases.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ici_core::formulations::{ModelVariant, ObjectiveRegime};
use ici_core::milp::HighsBackend;
use ici_core::pipeline::{sweep, write_results, RunConfig, SweepEntry};

#[derive(Debug, Parser)]
#[command(name = "ici", version, about = "MILP models for DC-OPF controlled islanding")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one configuration.
    Run(RunArgs),
    /// Solve the product of comma-separated K, variant and regime lists,
    /// or the configurations in a JSON file.
    Sweep {
        #[command(flatten)]
        args: RunArgs,
        /// JSON array of run configurations; replaces the flag product.
        #[arg(long)]
        configs: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Debug, Clone, Args)]
struct RunArgs {
    /// MATPOWER case file.
    #[arg(long)]
    case: Option<PathBuf>,
    /// Coherent groups, JSON or CSV.
    #[arg(long)]
    groups: Option<PathBuf>,
    /// benchmark, proposed or hybrid.
    #[arg(long, value_delimiter = ',', default_value = "proposed")]
    variant: Vec<String>,
    /// Number of islands; keeps the first K groups.
    #[arg(long = "K", value_delimiter = ',')]
    k: Vec<usize>,
    /// Weight preset: load_shed or imbalance.
    #[arg(long, value_delimiter = ',', default_value = "load_shed")]
    regime: Vec<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Big-M on angle differences, radians.
    #[arg(long)]
    mphi: Option<f64>,
    /// Seconds; defaults to 480 below 500 buses and 720 otherwise.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, value_enum, default_value = "on")]
    heuristic: Toggle,
    /// Longest cycle seeded into the model up front.
    #[arg(long)]
    short_cycles: Option<usize>,
    /// One solver thread.
    #[arg(long)]
    deterministic: bool,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

impl RunArgs {
    fn configs(&self) -> ici_core::Result<Vec<RunConfig>> {
        let (Some(case), Some(groups)) = (&self.case, &self.groups) else {
            return Err(ici_core::Error::Config("--case and --groups are required".into()));
        };
        let ks: Vec<Option<usize>> =
            if self.k.is_empty() { vec![None] } else { self.k.iter().map(|&k| Some(k)).collect() };
        let mut out = Vec::new();
        for v in &self.variant {
            let mut variant: ModelVariant = v.parse()?;
            if let Some(len) = self.short_cycles {
                variant.short_cycle_len = len;
            }
            for r in &self.regime {
                let regime: ObjectiveRegime = r.parse()?;
                for &k in &ks {
                    let mut c = RunConfig::new(case, groups, variant, regime);
                    c.k = k;
                    let w = &mut c.weights;
                    w.alpha = self.alpha.unwrap_or(w.alpha);
                    w.beta = self.beta.unwrap_or(w.beta);
                    w.gamma = self.gamma.unwrap_or(w.gamma);
                    w.mu = self.mu.unwrap_or(w.mu);
                    if let Some(m) = self.mphi {
                        c.bigm.m_phi = m;
                    }
                    c.time_limit = self.time_limit;
                    c.heuristic = self.heuristic == Toggle::On;
                    c.deterministic = self.deterministic;
                    out.push(c);
                }
            }
        }
        Ok(out)
    }
}

fn error_json(stage: &str, err: &dyn std::fmt::Display, kind: &str) -> String {
    serde_json::json!({ "error": { "stage": stage, "kind": kind, "message": err.to_string() } }).to_string()
}

fn report(entries: &[SweepEntry], out: &std::path::Path) -> ExitCode {
    if let Err(e) = write_results(out, entries) {
        eprintln!("{}", error_json("output", &e, e.kind()));
        return ExitCode::from(2);
    }
    println!("n,K,UB,gap_or_time,P_LS,P_Delta,P_GS,p_Sigma,variant,regime,status");
    for e in entries {
        let r = e.csv_row();
        let f = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_default();
        let u = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        println!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            u(r.n),
            u(r.k),
            f(r.ub),
            r.gap_or_time,
            f(r.p_ls),
            f(r.p_delta),
            f(r.p_gs),
            f(r.p_sigma),
            r.variant,
            r.regime,
            r.status
        );
        if let Err(fail) = &e.result {
            eprintln!("{}", serde_json::json!({ "error": fail.to_json() }));
        }
    }
    let certified = entries.iter().all(|e| e.result.as_ref().is_ok_and(|r| r.status.is_certified()));
    if certified {
        ExitCode::SUCCESS
    } else if entries.iter().any(|e| e.result.is_err()) {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let (args, configs) = match &cli.command {
        Command::Run(args) => (args, args.configs()),
        Command::Sweep { args, configs: Some(path) } => {
            let loaded = std::fs::read_to_string(path)
                .map_err(ici_core::Error::from)
                .and_then(|s| serde_json::from_str::<Vec<RunConfig>>(&s).map_err(ici_core::Error::from));
            (args, loaded)
        }
        Command::Sweep { args, configs: None } => (args, args.configs()),
    };
    let configs = match configs {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}", error_json("config", &e, e.kind()));
            return ExitCode::from(2);
        }
    };
    if matches!(cli.command, Command::Run(_)) && configs.len() != 1 {
        let msg = format!("run takes one configuration, got {}; use sweep", configs.len());
        eprintln!("{}", error_json("config", &msg, "config"));
        return ExitCode::from(2);
    }
    match sweep(&configs, &HighsBackend) {
        Ok(entries) => report(&entries, &args.out),
        Err(e) => {
            eprintln!("{}", error_json("config", &e, e.kind()));
            ExitCode::from(2)
        }
    }
}
