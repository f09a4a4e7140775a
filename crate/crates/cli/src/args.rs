use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "stagplan", version, about = "Cooperative formation path planning for UAV teams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan one seed and write paths, cost history, metrics and a manifest.
    Plan(PlanArgs),
    /// Run both planners over a batch of seeds and tabulate the outcome.
    Compare(CompareArgs),
    /// Check a scenario and print every violation.
    Validate(ValidateArgs),
    /// Scenario utilities.
    #[command(subcommand)]
    Scenario(ScenarioCommand),
}

#[derive(Debug, Subcommand)]
pub enum ScenarioCommand {
    /// Print a scenario in file form, or write it with --out.
    Dump(DumpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Game,
    Rigid,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Game => "game",
            Algo::Rigid => "rigid",
        }
    }
}

#[derive(Debug, Args)]
pub struct ScenarioArg {
    /// Scenario file, or builtin:scenario1 / builtin:scenario2.
    #[arg(long, value_name = "PATH|builtin:NAME")]
    pub scenario: String,
}

#[derive(Debug, Args)]
pub struct Budget {
    /// Particles per swarm (default 500).
    #[arg(long)]
    pub particles: Option<usize>,
    /// PSO iterations (default 300).
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Start from 2000 particles and 1500 iterations; --particles and
    /// --iterations still override.
    #[arg(long)]
    pub paper_budget: bool,
    /// Worker threads for candidate evaluation; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    #[arg(long, value_enum, default_value = "game")]
    pub algo: Algo,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub budget: Budget,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    /// A count `n` (seeds 0..n-1) or a comma-separated list such as `3,5,8`
    /// (`7,` names the single seed 7).
    #[arg(long, default_value = "10")]
    pub seeds: String,
    #[command(flatten)]
    pub budget: Budget,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[command(flatten)]
    pub scenario: ScenarioArg,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses the `--seeds` value.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, String> {
    let text = text.trim();
    if text.contains(',') {
        let seeds = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u64>().map_err(|_| format!("bad seed `{s}`")))
            .collect::<Result<Vec<_>, _>>()?;
        if seeds.is_empty() {
            return Err("seed list is empty".into());
        }
        return Ok(seeds);
    }
    match text.parse::<u64>() {
        Ok(0) => Err("seed count must be at least 1".into()),
        Ok(n) => Ok((0..n).collect()),
        Err(_) => Err(format!("`{text}` is neither a seed count nor a comma-separated list")),
    }
}
