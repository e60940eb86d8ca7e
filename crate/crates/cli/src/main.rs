use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crossstitch_cli::bands::render_bands;
use crossstitch_cli::presets::load_preset;
use crossstitch_cli::run::{run_scenario, write_atomic};
use crossstitch_cli::validation::{default_jobs, validate, Suite, ValidationContext};
use crossstitch_cli::{CliError, Result, Scenario, ScenarioConfig};

#[derive(Parser)]
#[command(name = "crossstitch", version, about = "Small and giant emitters on a cross-stitch lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory for output tables.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for sweeps (defaults to the available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Accepted for reproducible pipelines; every run is already deterministic.
    #[arg(long, global = true)]
    seedless: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Fast,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario file or preset name and write its tables.
    Run { config: String },
    /// Compare simulations with closed-form predictions.
    Validate {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Restrict to these presets (comma separated); an empty value selects none.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        scenarios: Option<Vec<String>>,
        /// Read presets from this directory instead of the built-in set.
        #[arg(long)]
        preset_dir: Option<PathBuf>,
        /// Shift the intra-cell hopping of every simulation (predictions keep
        /// the nominal value), to confirm the checks are sensitive.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        perturb_intra_hop: f64,
    },
    /// List the built-in presets.
    ListScenarios,
    /// Write the band structure of a scenario's lattice.
    Bands {
        config: String,
        #[arg(long, default_value_t = 256)]
        n_k: usize,
    },
}

/// A preset name or a path to a scenario file.
fn resolve(config: &str) -> Result<ScenarioConfig> {
    match Scenario::parse(config) {
        Some(s) if s != Scenario::Custom => load_preset(s, None),
        _ => ScenarioConfig::load(&PathBuf::from(config)),
    }
}

fn execute(cli: Cli) -> Result<()> {
    let jobs = cli.jobs.unwrap_or_else(default_jobs);
    match cli.command {
        Command::Run { config } => {
            let config = resolve(&config)?;
            let summary = run_scenario(&config, &cli.out, jobs)?;
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            println!(
                "max_norm_drift={:.3e} max_energy_drift={:.3e}",
                summary.max_norm_drift, summary.max_energy_drift
            );
        }
        Command::Validate {
            suite,
            scenarios,
            preset_dir,
            perturb_intra_hop,
        } => {
            let selected = match scenarios {
                None => None,
                Some(names) => {
                    let mut set = BTreeSet::new();
                    for name in names.iter().filter(|n| !n.is_empty()) {
                        match Scenario::parse(name) {
                            Some(s) if s != Scenario::Custom => {
                                set.insert(s);
                            }
                            _ => return Err(CliError::config("--scenarios", format!("unknown preset `{name}`"))),
                        }
                    }
                    Some(set)
                }
            };
            let ctx = ValidationContext::new(preset_dir, jobs, perturb_intra_hop);
            let suite = match suite {
                SuiteArg::All => Suite::All,
                SuiteArg::Fast => Suite::Fast,
            };
            let report = validate(&ctx, suite, selected.as_ref())?;
            print!("{}", report.render());
            if !report.passed() {
                return Err(CliError::ValidationFailed(report.failures()));
            }
        }
        Command::ListScenarios => {
            for s in Scenario::PRESETS {
                let c = load_preset(s, None)?;
                println!("{s}\t{}", c.description);
            }
        }
        Command::Bands { config, n_k } => {
            let config = resolve(&config)?;
            std::fs::create_dir_all(&cli.out).map_err(|e| CliError::io(&cli.out, e))?;
            let path = cli.out.join(format!("{}_bands.csv", config.scenario));
            write_atomic(&path, &render_bands(&config, n_k)?)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
