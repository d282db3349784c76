//! Command-line front end for the elastic-pricing engine.
//!
//! Exit codes: 0 on success, 2 for configuration or usage errors, 3 when the
//! numerical machinery fails.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use elastic_pricing::comparison::{standard_inventory_levels, standard_pairs};
use elastic_pricing::format::fixed;
use elastic_pricing::{
    beta_approximation, comparison_table, estimate_revenue, policy_csv, policy_table,
    simulate_path, BetaTable, Error, MarketModel, ModelConfig, NamedDistribution, PricePolicy,
    RevenueEstimate,
};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "elastic-pricing",
    version,
    about = "Optimal pricing under constant demand elasticity"
)]
struct Cli {
    /// Model config JSON: {"epsilon": .., "T": .., "a": .., "q": [..]}
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Demand elasticity; overrides the config value
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Write the result here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, default_value_t = 100_000)]
    trials: u64,

    /// Factor applied to the arrival rate a(t)
    #[arg(long, global = true, default_value_t = 1.0)]
    demand: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Table of beta_n, gamma_n and the large-inventory approximation
    Beta {
        #[arg(long)]
        n_max: usize,
    },
    /// Optimal prices and revenues on an (n, t) grid
    Policy {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<i64>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        t: Vec<f64>,
    },
    /// Relative revenue differences between comparable models
    Compare {
        /// Pairs `q:w` of d<K>, q1, q2, q3; `w` defaults to d1
        #[arg(long, value_delimiter = ',')]
        pairs: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
    },
    /// Monte Carlo estimate of the optimal revenue from time 0
    Simulate {
        #[arg(long)]
        n: i64,
        /// Write the events of the first path as JSON lines
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Print the effective model config
    Config,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_numerical() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

#[derive(Serialize)]
struct SimulationReport {
    #[serde(flatten)]
    estimate: RevenueEstimate,
    analytic: f64,
}

fn load_config(cli: &Cli) -> Result<ModelConfig, Failure> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            ModelConfig::from_json(&text)?
        }
        None => {
            let epsilon = cli
                .epsilon
                .ok_or_else(|| usage("either --config or --epsilon is required"))?;
            ModelConfig::from_json(&format!("{{\"epsilon\": {epsilon}}}"))?
        }
    };
    if let Some(epsilon) = cli.epsilon {
        config.epsilon = epsilon;
    }
    Ok(config)
}

fn load_model(cli: &Cli, config: &ModelConfig) -> Result<MarketModel, Failure> {
    let model = config.to_model()?;
    let arrivals = model.arrivals().scaled(cli.demand)?;
    Ok(model.with_arrivals(arrivals))
}

fn parse_pair(text: &str) -> Result<(NamedDistribution, NamedDistribution), Failure> {
    let (q, w) = text.split_once(':').unwrap_or((text, "d1"));
    Ok((
        NamedDistribution::builtin(q.trim())?,
        NamedDistribution::builtin(w.trim())?,
    ))
}

fn beta_csv(model: &MarketModel, n_max: usize) -> Result<String, Failure> {
    let table = BetaTable::compute(model.epsilon(), model.orders(), n_max)?;
    let mut out = String::from("n,beta,gamma,approx\n");
    for (i, beta) in table.values().iter().enumerate() {
        let n = i + 1;
        out.push_str(&format!(
            "{n},{},{},{}\n",
            fixed(*beta),
            fixed(table.gamma(n)?),
            fixed(beta_approximation(model.epsilon(), model.orders(), n))
        ));
    }
    Ok(out)
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let config = load_config(cli)?;
    match &cli.command {
        Command::Config => Ok(config.to_json() + "\n"),
        Command::Beta { n_max } => beta_csv(&load_model(cli, &config)?, *n_max),
        Command::Policy { n, t } => {
            let model = load_model(cli, &config)?;
            let n_max = n.iter().copied().max().unwrap_or(0).max(0) as usize;
            let policy = PricePolicy::new(model, n_max)?;
            Ok(policy_csv(&policy_table(&policy, n, t)?))
        }
        Command::Compare { pairs, n, t } => {
            let model = load_model(cli, &config)?;
            let pairs = if pairs.is_empty() {
                standard_pairs()
            } else {
                pairs
                    .iter()
                    .map(|p| parse_pair(p))
                    .collect::<Result<_, _>>()?
            };
            let n_values = if n.is_empty() {
                standard_inventory_levels()
            } else {
                n.clone()
            };
            let table = comparison_table(model.epsilon(), model.arrivals(), &pairs, &n_values, *t)?;
            Ok(table.to_csv())
        }
        Command::Simulate { n, dump } => {
            let model = load_model(cli, &config)?;
            if *n < 1 {
                return Err(usage(format!("--n must be at least 1, got {n}")));
            }
            let policy = PricePolicy::new(model, *n as usize)?;
            let estimate = estimate_revenue(&policy, *n, cli.trials, cli.seed)?;
            if let Some(path) = dump {
                write_file(path, &simulate_path(&policy, *n, cli.seed)?.to_jsonl())?;
            }
            let report = SimulationReport {
                estimate,
                analytic: policy.optimal_revenue(*n, 0.0)?,
            };
            Ok(serde_json::to_string_pretty(&report).expect("report serializes") + "\n")
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)
            .map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| match &cli.out {
        Some(path) => write_file(path, &text),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| usage(format!("cannot write output: {e}"))),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
