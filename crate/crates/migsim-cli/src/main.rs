//! Command-line front end for the `migsim` library.
//!
//! Subcommands:
//! - `run` executes a scenario and writes the output bundle (KPI table,
//!   manifest, SINR histogram, site layout, optional per-UE samples).
//! - `validate` parses a config, applies overrides, and reports the digest
//!   without running anything.
//! - `presets list` / `presets show <id>` expose the built-in scenarios.
//!
//! Exit codes: 0 success, 2 validation (bad config, bad override, unknown
//! preset), 3 I/O, 4 internal. Clap usage errors also exit 2.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use migsim::config::{self, ScenarioConfig};
use migsim::report;
use migsim::simulation::run_scenario;
use migsim::Error;

#[derive(Parser)]
#[command(
    name = "migsim",
    version,
    about = "Deterministic link- and system-level simulator for 4G-to-5G migration studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write KPI tables plus a reproducibility manifest.
    Run(RunArgs),
    /// Parse and validate a scenario config, printing its digest.
    Validate(ConfigArgs),
    /// Inspect the built-in scenario presets.
    #[command(subcommand)]
    Presets(PresetsCmd),
}

/// How to obtain and adjust the scenario config. Exactly one of `--config`
/// and `--preset` must be given; overrides apply on top in order, with the
/// dedicated `--seed` / `--drops` flags winning over `--set` entries.
#[derive(Args)]
struct ConfigArgs {
    /// Scenario config file (TOML).
    #[arg(
        long,
        value_name = "PATH",
        required_unless_present = "preset",
        conflicts_with = "preset"
    )]
    config: Option<PathBuf>,

    /// Built-in preset id instead of a config file (see `presets list`).
    #[arg(long, value_name = "ID")]
    preset: Option<String>,

    /// Override a config key (repeatable), e.g. --set drops=500 --set ca.policy=water-filling.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Replace the scenario seed.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Replace the Monte Carlo drop count.
    #[arg(long, value_name = "N")]
    drops: Option<u32>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,

    /// Output directory; defaults to $MIGSIM_OUT, then ./migsim-out.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for the drop loop (0 = one per core).
    #[arg(long, value_name = "N", default_value_t = 0)]
    parallelism: usize,

    /// Also write the per-UE sample table (per_ue.csv).
    #[arg(long)]
    per_ue: bool,
}

#[derive(Subcommand)]
enum PresetsCmd {
    /// List the built-in preset ids.
    List,
    /// Print a preset's config file to stdout.
    Show {
        /// Preset id, case-insensitive.
        id: String,
    },
}

impl ConfigArgs {
    fn load(&self) -> migsim::Result<ScenarioConfig> {
        let text = match (&self.config, &self.preset) {
            (Some(path), None) => {
                std::fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?
            }
            (None, Some(id)) => config::preset_toml(id)?.to_string(),
            // clap enforces exactly one source via required_unless_present +
            // conflicts_with.
            _ => unreachable!("config source arbitration is done by clap"),
        };
        let mut overrides = self.overrides.clone();
        if let Some(seed) = self.seed {
            overrides.push(format!("seed={seed}"));
        }
        if let Some(drops) = self.drops {
            overrides.push(format!("drops={drops}"));
        }
        config::apply_overrides(&text, &overrides)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Validation(_)
        | Error::InvalidArgument(_)
        | Error::PolicyRejected(_)
        | Error::InsufficientSamples { .. } => 2,
        Error::Io { .. } => 3,
        Error::NoCapacity(_) | Error::Internal(_) => 4,
    }
}

fn dispatch(cli: Cli) -> migsim::Result<()> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Validate(args) => {
            let config = args.load()?;
            println!(
                "ok: scenario '{}' valid, digest {}",
                config.scenario_id,
                config.digest()
            );
            Ok(())
        }
        Command::Presets(PresetsCmd::List) => {
            for id in config::PRESET_IDS {
                println!("{id}");
            }
            Ok(())
        }
        Command::Presets(PresetsCmd::Show { id }) => {
            print!("{}", config::preset_toml(&id)?);
            Ok(())
        }
    }
}

fn run(args: RunArgs) -> migsim::Result<()> {
    let started = report::now_unix_ms();
    let config = args.config.load()?;
    let out_dir = args.out.clone().unwrap_or_else(report::default_output_dir);

    let sim = run_scenario(&config, args.parallelism)?;
    let bundle = report::emit_report(&sim, &config, &out_dir, args.per_ue, started)?;

    for row in &sim.report.rows {
        println!(
            "{} = {} {}  (95% CI [{}, {}])",
            row.kpi,
            report::format_sig(row.value, 9),
            row.unit,
            report::format_sig(row.ci95_low, 9),
            report::format_sig(row.ci95_high, 9)
        );
    }
    let mut written = vec![&bundle.kpi_table, &bundle.manifest, &bundle.sinr_histogram, &bundle.layout];
    if let Some(per_ue) = &bundle.per_ue_samples {
        written.push(per_ue);
    }
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}
