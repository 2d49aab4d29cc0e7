use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use stackelberg::game::{json, validate_game};
use stackelberg::harness::{
    self, evaluate_vs_worst_case, load_game, solve_report, CampaignConfig, SolveReport, SolverEntry, SolverKind,
};
use stackelberg::leader::LeaderConfig;
use stackelberg::suite::{generate_file, Board, DescriptorFile, Family};
use stackelberg::{HarnessError, LeaderBehaviorStrategy};

#[derive(Parser)]
#[command(name = "stackelberg", version, about = "Strong Stackelberg equilibria of extensive-form games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Materialize a benchmark game from a descriptor.
    Generate(GenerateArgs),
    /// Approximate the equilibrium with O2UCT.
    Solve(SolveArgs),
    /// Solve exactly through the induced normal form.
    Exact {
        game: PathBuf,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a leader strategy against the worst-case follower.
    Eval {
        game: PathBuf,
        /// A leader strategy, or a result file from `solve`/`exact`.
        strategy: PathBuf,
    },
    /// Run a campaign config; writes records.jsonl and summary.csv.
    Campaign {
        config: PathBuf,
        #[arg(short, long, default_value = "campaign-out")]
        out: PathBuf,
    },
    /// Check a game file for structural problems.
    Validate { game: PathBuf },
}

#[derive(Args)]
struct GenerateArgs {
    /// Descriptor file; overrides the layout flags.
    #[arg(long)]
    descriptor: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "wnz")]
    family: FamilyArg,
    #[arg(long, default_value_t = 3)]
    rows: usize,
    #[arg(long, default_value_t = 3)]
    cols: usize,
    #[arg(long, default_value_t = 2)]
    horizon: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    targets: usize,
    /// Forbid the attacker from staying in place.
    #[arg(long)]
    no_wait: bool,
    /// Write the resolved descriptor instead of the game tree.
    #[arg(long)]
    descriptor_only: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FamilyArg {
    Whg,
    Wnz,
    Seg,
}

#[derive(Args)]
struct SolveArgs {
    game: PathBuf,
    #[arg(long, default_value_t = 1000)]
    iterations: u64,
    /// UCT exploration constant.
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "Lmax")]
    l_max: Option<u64>,
    #[arg(long)]
    eps_i: Option<f64>,
    #[arg(long = "Mmax")]
    m_max: Option<u64>,
    #[arg(long)]
    eps_o: Option<f64>,
    #[arg(long)]
    expand_prob: Option<f64>,
    #[arg(long)]
    init_budget: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

impl SolveArgs {
    fn leader(&self) -> LeaderConfig {
        let d = LeaderConfig::default();
        LeaderConfig {
            max_positive_passes: self.l_max.unwrap_or(d.max_positive_passes),
            improvement_eps: self.eps_i.unwrap_or(d.improvement_eps),
            max_feasibility_passes: self.m_max.unwrap_or(d.max_feasibility_passes),
            oracle_eps: self.eps_o.unwrap_or(d.oracle_eps),
            expand_prob: self.expand_prob.unwrap_or(d.expand_prob),
            init_budget: self.init_budget.unwrap_or(d.init_budget),
            ..d
        }
    }
}

fn read(path: &Path) -> Result<String, HarnessError> {
    Ok(std::fs::read_to_string(path)?)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), HarnessError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn limit(secs: Option<f64>) -> Result<Option<Duration>, HarnessError> {
    secs.map(|s| Duration::try_from_secs_f64(s).map_err(|e| HarnessError::Config(format!("time limit: {e}"))))
        .transpose()
}

fn emit_report(report: &SolveReport, out: Option<&Path>) -> Result<(), HarnessError> {
    emit(&serde_json::to_string_pretty(report)?, out)
}

fn generate(args: &GenerateArgs) -> Result<(), HarnessError> {
    let desc = match &args.descriptor {
        Some(p) => serde_json::from_str(&read(p)?)?,
        None => {
            let family = match args.family {
                FamilyArg::Whg => Family::Whg,
                FamilyArg::Wnz => Family::Wnz,
                FamilyArg::Seg => Family::Seg,
            };
            let board = match family {
                Family::Seg => Board::Seg,
                _ => Board::Grid { rows: args.rows, cols: args.cols },
            };
            DescriptorFile {
                family,
                board,
                horizon: args.horizon,
                attacker_can_wait: !args.no_wait,
                seed: args.seed,
                num_targets: args.targets,
                payoffs: None,
            }
        }
    };
    let text = if args.descriptor_only {
        serde_json::to_string_pretty(&desc.resolve()?)?
    } else {
        json::to_string(&generate_file(&desc)?)
    };
    emit(&text, args.out.as_deref())
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Generate(args) => generate(&args)?,
        Command::Solve(args) => {
            let (game, _) = load_game(&read(&args.game)?)?;
            let solver = SolverEntry {
                name: None,
                kind: SolverKind::O2uct { iterations: args.iterations, exploration: args.c, leader: args.leader() },
            };
            let report = solve_report(&game, &solver, args.seed, limit(args.time_limit)?)?;
            emit_report(&report, args.out.as_deref())?;
        }
        Command::Exact { game, time_limit, out } => {
            let (game, _) = load_game(&read(&game)?)?;
            let solver = SolverEntry { name: None, kind: SolverKind::Exact };
            let report = solve_report(&game, &solver, 0, limit(time_limit)?)?;
            emit_report(&report, out.as_deref())?;
        }
        Command::Eval { game, strategy } => {
            let (game, _) = load_game(&read(&game)?)?;
            let value: serde_json::Value = serde_json::from_str(&read(&strategy)?)?;
            let leader: LeaderBehaviorStrategy = match value.get("leader") {
                Some(l) => serde_json::from_value(l.clone())?,
                None => serde_json::from_value(value)?,
            };
            let eval = evaluate_vs_worst_case(&game, &leader)?;
            println!("{}", serde_json::to_string_pretty(&eval)?);
        }
        Command::Campaign { config, out } => {
            let config = CampaignConfig::from_json(&read(&config)?)?;
            let records = harness::run_campaign(&config)?;
            std::fs::create_dir_all(&out)?;
            harness::write_records(&out.join("records.jsonl"), &records)?;
            let summary = harness::summarize(&records, config.time_limit_secs);
            harness::write_summary_csv(&out.join("summary.csv"), &summary)?;
            for row in &summary {
                let payoff = row.mean_payoff.map_or("-".to_string(), |p| format!("{p:.4}"));
                println!(
                    "bucket {:>8} {:<10} payoff {payoff:>8} time {:>8.2}s solved {:.2}",
                    row.bucket, row.solver, row.mean_time_secs, row.solved_fraction
                );
            }
        }
        Command::Validate { game } => {
            let game = json::from_str(&read(&game)?)?;
            let violations = validate_game(&game);
            for v in &violations {
                println!("{v}");
            }
            if !violations.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
            println!("ok: {} nodes, {} infosets", game.num_nodes(), game.num_infosets());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
