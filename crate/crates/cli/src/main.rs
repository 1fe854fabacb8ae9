use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use coopsense_core::assign::{
    brute_force_opt_with_cap, compute_mu, greedy_baseline, mgdy_assign, mwm_assign_with,
    random_baseline, MatchingObjective, DEFAULT_BRUTE_FORCE_CAP,
};
use coopsense_core::harness::{emit, run_sweep, SweepKind, SweepSpec};
use coopsense_core::scenario::{self, reduction_instance, GenConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "coopsense", version, about = "Cooperative sensing assignment toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo sweep and write CSV plus SVG plot.
    Sweep {
        /// vary-n, vary-lmax, vary-gamma-range or all.
        #[arg(long, default_value = "all")]
        kind: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// TOML file with sweep fields (kind, grid, runs, base_seed, [base]).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Generate a random scenario file.
    Generate {
        #[arg(long)]
        out: PathBuf,
        /// TOML file with generator fields; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        l_max: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write the Product-Partition instance for a list of positive integers.
    Reduction {
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<u64>,
        #[arg(long, default_value_t = 0.5)]
        theta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every assignment algorithm on a scenario file.
    Solve {
        scenario: PathBuf,
        /// Seed for the randomized baselines.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge weights for the matching phase of MWM.
        #[arg(long, value_enum, default_value_t = Objective::Gain)]
        objective: Objective,
    },
    /// Report U^0, U^*, the channel groups and mu for a scenario file.
    Bound { scenario: PathBuf },
    /// Exhaustive optimum of a small scenario file.
    Oracle {
        scenario: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BRUTE_FORCE_CAP)]
        cap: u128,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Objective {
    /// Gain of one SU over leaving the channel unsensed.
    Gain,
    /// Throughput of one SU on the channel.
    Single,
}

impl From<Objective> for MatchingObjective {
    fn from(o: Objective) -> Self {
        match o {
            Objective::Gain => MatchingObjective::GainOverEmpty,
            Objective::Single => MatchingObjective::SingleThroughput,
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep {
            kind,
            seed,
            runs,
            out,
            config,
        } => {
            let mut specs = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    vec![SweepSpec::from_toml_str(&text)
                        .with_context(|| format!("parsing {}", path.display()))?]
                }
                None if kind == "all" => SweepKind::ALL
                    .into_iter()
                    .map(|k| SweepSpec::figure(k, 1))
                    .collect(),
                None => vec![SweepSpec::figure(kind.parse()?, 1)],
            };
            for spec in &mut specs {
                if let Some(seed) = seed {
                    spec.base_seed = seed;
                }
                if let Some(runs) = runs {
                    spec.runs = runs;
                }
                let rows = run_sweep(spec)?;
                let files = emit(spec.kind, &rows, &out)?;
                println!(
                    "{}: {} rows -> {}, {}",
                    spec.kind,
                    rows.len(),
                    files.csv.display(),
                    files.plot.display()
                );
            }
        }
        Command::Generate {
            out,
            config,
            m,
            n,
            l_max,
            seed,
        } => {
            let mut cfg: GenConfig = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                None => GenConfig::default(),
            };
            cfg.m = m.unwrap_or(cfg.m);
            cfg.n = n.unwrap_or(cfg.n);
            cfg.l_max = l_max.unwrap_or(cfg.l_max);
            cfg.seed = seed.unwrap_or(cfg.seed);
            let s = scenario::generate(&cfg)?;
            scenario::save(&s, &out)?;
            println!("wrote {} (M={}, N={})", out.display(), s.m(), s.n());
        }
        Command::Reduction { a, theta, out } => {
            let inst = reduction_instance(&a, theta)?;
            scenario::save(&inst.scenario, &out)?;
            println!("wrote {} (r={})", out.display(), inst.r);
        }
        Command::Solve {
            scenario: path,
            seed,
            objective,
        } => {
            let s = scenario::load(&path)?;
            let mwm = mwm_assign_with(&s, objective.into())?;
            let (mgdy, _) = mgdy_assign(&s)?;
            let greedy = greedy_baseline(&s, ChaCha8Rng::seed_from_u64(seed))?;
            let random = random_baseline(&s, ChaCha8Rng::seed_from_u64(seed))?;
            let report = serde_json::json!({
                "upper_bound": s.upper_bound(),
                "results": [mwm, mgdy, greedy, random],
            });
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Bound { scenario: path } => {
            let s = scenario::load(&path)?;
            println!("{}", serde_json::to_string_pretty(&compute_mu(&s))?);
        }
        Command::Oracle { scenario: path, cap } => {
            let s = scenario::load(&path)?;
            let opt = brute_force_opt_with_cap(&s, cap)?;
            println!("{}", serde_json::to_string_pretty(&opt)?);
        }
    }
    Ok(())
}
