use std::fmt::Write as _;
use std::path::Path as FsPath;

use stagplan::planner::{evaluate_plan, plan_game, plan_rigid, PlanResult};
use stagplan::report::{history_csv, metrics_toml, paths_csv, write_atomic};
use stagplan::scenario::{builtin_scenario, load_scenario, scenario_to_string, validate, BuiltinId};
use stagplan::spso::PsoConfig;
use stagplan::{Cost, Scenario};

use crate::args::{parse_seeds, Algo, Budget, CompareArgs, DumpArgs, PlanArgs, ValidateArgs};
use crate::failure::{Failure, VALIDATION};
use crate::manifest::{now, ConfigSnapshot, Manifest};

const BUILTIN_PREFIX: &str = "builtin:";

/// Resolves `--scenario` without validating it.
fn read_scenario(source: &str) -> Result<Scenario, Failure> {
    if let Some(name) = source.strip_prefix(BUILTIN_PREFIX) {
        return Ok(builtin_scenario(name.parse::<BuiltinId>()?));
    }
    if !FsPath::new(source).exists() {
        return Err(Failure::io(source, std::io::ErrorKind::NotFound.into()));
    }
    Ok(load_scenario(source)?)
}

fn config(budget: &Budget, seed: u64) -> Result<PsoConfig, Failure> {
    let base = if budget.paper_budget { PsoConfig::paper_budget() } else { PsoConfig::default() };
    let cfg = PsoConfig {
        n_pop: budget.particles.unwrap_or(base.n_pop),
        max_it: budget.iterations.unwrap_or(base.max_it),
        seed,
        ..base
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Applies `--threads` to the global worker pool.
fn set_threads(threads: Option<usize>) -> Result<(), Failure> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(Failure::config("--threads must be at least 1"));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::config(format!("cannot size the worker pool: {e}")))?;
    Ok(())
}

fn run(algo: Algo, s: &Scenario, cfg: &PsoConfig) -> Result<PlanResult, Failure> {
    Ok(match algo {
        Algo::Game => plan_game(s, cfg)?,
        Algo::Rigid => plan_rigid(s, cfg)?,
    })
}

/// Writes every `(name, contents)` pair into `dir`, each via write-then-rename.
fn write_files(dir: &FsPath, files: &[(String, String)]) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::io(&dir.display().to_string(), e))?;
    for (name, contents) in files {
        let path = dir.join(name);
        write_atomic(&path, contents).map_err(|e| Failure::io(&path.display().to_string(), e))?;
    }
    Ok(())
}

fn log_costs(costs: &[Cost]) -> String {
    costs
        .iter()
        .map(|c| c.value().map_or("inf".to_string(), |v| format!("{:.3}", v.ln())))
        .collect::<Vec<_>>()
        .join("/")
}

fn manifest_text(m: &Manifest) -> Result<String, Failure> {
    toml::to_string(m).map_err(|e| Failure::config(format!("cannot serialize manifest: {e}")))
}

pub fn plan(args: &PlanArgs) -> Result<(), Failure> {
    let started_at = now();
    let cfg = config(&args.budget, args.seed)?;
    set_threads(args.budget.threads)?;
    let s = read_scenario(&args.scenario.scenario)?.validated()?;
    let result = run(args.algo, &s, &cfg)?;
    let metrics = evaluate_plan(&result, &s)?;

    let mut files = vec![
        ("paths.csv".to_string(), paths_csv(&result.best_allocation)),
        ("history.csv".to_string(), history_csv(&result.history)),
        ("metrics.toml".to_string(), metrics_toml(&metrics)),
    ];
    let manifest = Manifest {
        tool: "stagplan",
        version: env!("CARGO_PKG_VERSION"),
        command: format!("plan --algo {}", args.algo.name()),
        scenario: args.scenario.scenario.clone(),
        seeds: vec![args.seed],
        started_at,
        finished_at: now(),
        threads: args.budget.threads,
        parallel_build: cfg!(feature = "parallel"),
        files: files.iter().map(|(n, _)| n.clone()).collect(),
        config: ConfigSnapshot::from(&cfg),
        scenario_text: scenario_to_string(&s),
    };
    files.push(("manifest.toml".to_string(), manifest_text(&manifest)?));
    write_files(&args.out, &files)?;

    println!(
        "{} plan, seed {}: log-costs {} ({}), {:.2} s, written to {}",
        args.algo.name(),
        args.seed,
        log_costs(&result.best_costs.costs),
        if metrics.infeasible { "infeasible" } else { "feasible" },
        result.wall_time,
        args.out.display()
    );
    Ok(())
}

struct Pair {
    seed: u64,
    game: PlanResult,
    rigid: PlanResult,
}

impl Pair {
    fn game_wins(&self) -> bool {
        self.game.best_costs.total() <= self.rigid.best_costs.total()
    }

    fn log_gap(&self) -> Option<f64> {
        let g = self.game.best_costs.total().value()?;
        let r = self.rigid.best_costs.total().value()?;
        Some(g.ln() - r.ln())
    }
}

fn cost_field(c: Cost) -> String {
    c.value().map_or("inf".to_string(), |v| format!("{v}"))
}

fn log_field(c: Cost) -> String {
    c.value().map_or("inf".to_string(), |v| format!("{}", v.ln()))
}

fn compare_table(pairs: &[Pair], n: usize) -> String {
    let mut out = String::from("seed");
    for algo in ["game", "rigid"] {
        write!(out, ",{algo}_feasible,{algo}_total").unwrap();
        for i in 1..=n {
            write!(out, ",{algo}_log_cost_{i}").unwrap();
        }
    }
    out.push_str(",game_wins\n");
    for p in pairs {
        write!(out, "{}", p.seed).unwrap();
        for r in [&p.game, &p.rigid] {
            let costs = &r.best_costs;
            write!(out, ",{},{}", costs.all_finite(), cost_field(costs.total())).unwrap();
            for c in &costs.costs {
                write!(out, ",{}", log_field(*c)).unwrap();
            }
        }
        writeln!(out, ",{}", p.game_wins()).unwrap();
    }
    out
}

/// Mean per-vehicle log-cost over the feasible runs; NaN when there are none.
fn mean_logs(runs: &[&PlanResult], n: usize) -> Vec<f64> {
    let feasible: Vec<_> = runs.iter().filter(|r| r.best_costs.all_finite()).collect();
    (0..n)
        .map(|i| {
            let sum: f64 = feasible.iter().map(|r| r.best_costs.costs[i].raw().ln()).sum();
            sum / feasible.len() as f64
        })
        .collect()
}

fn compare_summary(pairs: &[Pair], n: usize) -> String {
    let wins = pairs.iter().filter(|p| p.game_wins()).count();
    let gaps: Vec<f64> = pairs.iter().filter_map(Pair::log_gap).collect();
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let games: Vec<_> = pairs.iter().map(|p| &p.game).collect();
    let rigids: Vec<_> = pairs.iter().map(|p| &p.rigid).collect();
    let list = |v: Vec<f64>| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");

    let mut out = String::from("[summary]\n");
    writeln!(out, "seeds = {}", pairs.len()).unwrap();
    writeln!(out, "game_wins = {wins}").unwrap();
    writeln!(out, "win_rate = {:?}", wins as f64 / pairs.len() as f64).unwrap();
    writeln!(out, "comparable_pairs = {}", gaps.len()).unwrap();
    writeln!(out, "mean_log_total_gap = {mean_gap:?}").unwrap();
    writeln!(out, "game_feasible = {}", games.iter().filter(|r| r.best_costs.all_finite()).count()).unwrap();
    writeln!(out, "rigid_feasible = {}", rigids.iter().filter(|r| r.best_costs.all_finite()).count()).unwrap();
    writeln!(out, "game_mean_log_costs = [{}]", list(mean_logs(&games, n))).unwrap();
    writeln!(out, "rigid_mean_log_costs = [{}]", list(mean_logs(&rigids, n))).unwrap();
    out.replace("NaN", "nan")
}

pub fn compare(args: &CompareArgs) -> Result<(), Failure> {
    let started_at = now();
    let seeds = parse_seeds(&args.seeds).map_err(Failure::config)?;
    let base = config(&args.budget, 0)?;
    set_threads(args.budget.threads)?;
    let s = read_scenario(&args.scenario.scenario)?.validated()?;

    let mut pairs = Vec::with_capacity(seeds.len());
    for &seed in &seeds {
        let cfg = PsoConfig { seed, ..base.clone() };
        let pair = Pair { seed, game: plan_game(&s, &cfg)?, rigid: plan_rigid(&s, &cfg)? };
        println!(
            "seed {seed}: game {} | rigid {} | game wins: {}",
            log_costs(&pair.game.best_costs.costs),
            log_costs(&pair.rigid.best_costs.costs),
            pair.game_wins()
        );
        pairs.push(pair);
    }

    let n = s.vehicle_count();
    let summary = compare_summary(&pairs, n);
    let mut files = vec![
        ("compare.csv".to_string(), compare_table(&pairs, n)),
        ("summary.toml".to_string(), summary.clone()),
    ];
    let manifest = Manifest {
        tool: "stagplan",
        version: env!("CARGO_PKG_VERSION"),
        command: "compare".to_string(),
        scenario: args.scenario.scenario.clone(),
        seeds,
        started_at,
        finished_at: now(),
        threads: args.budget.threads,
        parallel_build: cfg!(feature = "parallel"),
        files: files.iter().map(|(n, _)| n.clone()).collect(),
        config: ConfigSnapshot::from(&base),
        scenario_text: scenario_to_string(&s),
    };
    files.push(("manifest.toml".to_string(), manifest_text(&manifest)?));
    write_files(&args.out, &files)?;
    print!("{summary}");
    Ok(())
}

pub fn validate_cmd(args: &ValidateArgs) -> Result<(), Failure> {
    let source = &args.scenario.scenario;
    let s = read_scenario(source)?;
    let violations = validate(&s);
    if violations.is_empty() {
        println!("{source}: ok ({} vehicles, {} threats)", s.vehicle_count(), s.threats.len());
        return Ok(());
    }
    Err(Failure {
        code: VALIDATION,
        message: format!(
            "{source}: {} violation(s)\n  {}",
            violations.len(),
            violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n  ")
        ),
    })
}

pub fn dump(args: &DumpArgs) -> Result<(), Failure> {
    let s = read_scenario(&args.scenario.scenario)?;
    let text = scenario_to_string(&s);
    match &args.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Failure::io(&dir.display().to_string(), e))?;
            }
            write_atomic(path, &text).map_err(|e| Failure::io(&path.display().to_string(), e))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
