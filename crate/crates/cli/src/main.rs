//! `ricsim`: run scenarios, learn priorities, compare run bundles.

mod compare;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ricsim_core::export::{
    run_with_summary, write_bundle, write_file, write_rewards_csv, ExportError, POLICY_JSON, REWARDS_CSV,
};
use ricsim_core::harness::ScenarioEpisodes;
use ricsim_core::mitigate::{arm_label, learn_priorities};
use ricsim_core::scenario::{ConfigError, MitigationMode, ScenarioConfig};
use thiserror::Error;

#[derive(Parser)]
#[command(name = "ricsim", version, about = "Near-RT RIC xApp conflict lab")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario and write its artifact bundle.
    Run(RunArgs),
    /// Learn an xApp priority ordering (needs mitigation.mode = "learn").
    Learn(RunArgs),
    /// Compare the summaries of two run bundles.
    Compare(CompareArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the scenario seed (for `learn`, the exploration seed).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct CompareArgs {
    run_a: PathBuf,
    run_b: PathBuf,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config_invalid: {0}")]
    ConfigInvalid(String),
    #[error("io_error: {0}")]
    Io(String),
    #[error("missing_artifact: {0}")]
    MissingArtifact(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::ConfigInvalid(_) => 2,
            CliError::Io(_) => 3,
            CliError::MissingArtifact(_) => 4,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Io(e.to_string()),
            ConfigError::Invalid(errs) => CliError::ConfigInvalid(format!("\n  {}", errs.join("\n  "))),
            ConfigError::Parse(_) => CliError::ConfigInvalid(e.to_string()),
        }
    }
}

impl From<ExportError> for CliError {
    fn from(e: ExportError) -> Self {
        CliError::Io(e.to_string())
    }
}

fn load(path: &Path) -> Result<ScenarioConfig, CliError> {
    Ok(ScenarioConfig::load(path)?)
}

fn cmd_run(a: &RunArgs) -> Result<(), CliError> {
    let mut cfg = load(&a.config)?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let (run, summary) = run_with_summary(&cfg);
    write_bundle(&a.out, &summary, &run)?;
    if !a.quiet {
        let t = &summary.totals;
        println!(
            "{} seed {}: {} windows, ho {}, pingpong {}, rlf {}, call blocks {}, reward {:.4}",
            summary.scenario, summary.seed, t.windows, t.ho_count, t.pingpong_count, t.rlf_count, t.call_blocks, summary.reward
        );
        for (ty, n) in &summary.conflict_counts {
            println!("  {ty} conflicts: {n}");
        }
        println!("artifacts in {}", a.out.display());
    }
    Ok(())
}

fn cmd_learn(a: &RunArgs) -> Result<(), CliError> {
    let mut cfg = load(&a.config)?;
    if cfg.mitigation.mode != MitigationMode::Learn {
        return Err(CliError::ConfigInvalid("mitigation.mode must be \"learn\"".into()));
    }
    if let Some(s) = a.seed {
        cfg.learning.rng_seed = s;
    }
    let mut runner = ScenarioEpisodes::new(&cfg);
    let outcome = learn_priorities(&cfg.xapps.ids(), &mut runner, &cfg.learning)
        .map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
    std::fs::create_dir_all(&a.out).map_err(|e| CliError::Io(format!("{}: {e}", a.out.display())))?;
    write_file(&a.out.join(POLICY_JSON), |w| outcome.write_policy_json(w))?;
    write_file(&a.out.join(REWARDS_CSV), |w| write_rewards_csv(&outcome.trace, w))?;
    if !a.quiet {
        for ((arm, v), n) in outcome.arms.iter().zip(&outcome.values).zip(&outcome.pulls) {
            println!("{:<24} pulls {n:4} mean reward {v:.4}", arm_label(arm));
        }
        println!("learned ordering: {}", arm_label(outcome.best_ordering()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Learn(a) => cmd_learn(a),
        Cmd::Compare(a) => compare::cmd_compare(&a.run_a, &a.run_b, a.json),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
