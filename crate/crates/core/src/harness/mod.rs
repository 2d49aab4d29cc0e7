//! Experiment harness: worst-case evaluation, node-count buckets and seeded
//! campaigns over generated benchmark games.
//!
//! A campaign expands `games × solvers × trials` into independent jobs, runs
//! them on a bounded worker pool and returns one [`RunRecord`] per job in a
//! fixed order. Records serialize to JSON lines; [`summarize`] groups them by
//! bucket and solver.

use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ExactError, HarnessError, SolveError};
use crate::exact::solve_game;
use crate::game::json::GameFile;
use crate::game::{
    enumerate_follower_pure_strategies, expected_utilities, ExtensiveGame, FollowerPureStrategy,
    LeaderBehaviorStrategy, Payoff, Player, PlayerSequences,
};
use crate::leader::LeaderConfig;
use crate::suite::{generate_file, DescriptorFile};
use crate::uct::{self, SamplerConfig};
use crate::Deadline;

/// Largest follower strategy count [`evaluate_vs_worst_case`] enumerates.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

/// Environment variable holding the campaign worker count.
pub const WORKERS_ENV: &str = "STACKELBERG_WORKERS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub payoff: Payoff,
    pub follower: FollowerPureStrategy,
}

/// Payoffs of `leader` against the follower's worst-case response, with the
/// default oracle tolerance.
pub fn evaluate_vs_worst_case(
    game: &ExtensiveGame,
    leader: &LeaderBehaviorStrategy,
) -> Result<Evaluation, HarnessError> {
    evaluate_with_tolerance(game, leader, crate::follower::DEFAULT_EPS)
}

/// Enumerates every follower strategy. Among those whose follower payoff is
/// within `eps` of the maximum, the one best for the leader is chosen; the
/// first in enumeration order wins exact ties.
pub fn evaluate_with_tolerance(
    game: &ExtensiveGame,
    leader: &LeaderBehaviorStrategy,
    eps: f64,
) -> Result<Evaluation, HarnessError> {
    let count = PlayerSequences::new(game, Player::Follower).count();
    if count > ENUMERATION_GUARD {
        return Err(HarnessError::GuardExceeded(count));
    }
    let mut all = Vec::new();
    for pi in enumerate_follower_pure_strategies(game) {
        let u = expected_utilities(game, leader, &pi)?;
        all.push((pi, u));
    }
    let top = all.iter().map(|(_, u)| u.follower).fold(f64::NEG_INFINITY, f64::max);
    let mut best: Option<(FollowerPureStrategy, Payoff)> = None;
    for (pi, u) in all {
        if u.follower >= top - eps && best.as_ref().is_none_or(|(_, b)| u.leader > b.leader) {
            best = Some((pi, u));
        }
    }
    let (follower, payoff) = best.ok_or_else(|| HarnessError::Config("follower has no strategies".into()))?;
    Ok(Evaluation { payoff, follower })
}

/// `10^round(log10 n)` with halves rounded up; 0 maps to 1.
pub fn bucket(node_count: u64) -> u64 {
    // Bucket 10^k holds n with 10^(2k-1) <= n^2 < 10^(2k+1).
    let sq = u128::from(node_count) * u128::from(node_count);
    let mut k = 0u32;
    while 10u128.checked_pow(2 * k + 1).is_some_and(|p| p <= sq) {
        k += 1;
    }
    10u64.pow(k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Timeout,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub game: DescriptorFile,
    pub solver: String,
    pub trial: usize,
    pub seed: u64,
    /// Leader payoff against the worst-case follower; present iff `status` is ok.
    pub payoff: Option<f64>,
    pub time_secs: f64,
    pub nodes: u64,
    pub bucket: u64,
    pub status: Status,
    /// Why a run did not finish with a payoff.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SolverKind {
    O2uct {
        iterations: u64,
        #[serde(default = "default_exploration")]
        exploration: f64,
        #[serde(default)]
        leader: LeaderConfig,
    },
    Exact,
}

fn default_exploration() -> f64 {
    std::f64::consts::SQRT_2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverEntry {
    /// Identifier written to records; defaults to the solver kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub kind: SolverKind,
}

impl SolverEntry {
    pub fn id(&self) -> String {
        match (&self.name, &self.kind) {
            (Some(n), _) => n.clone(),
            (None, SolverKind::O2uct { .. }) => "o2uct".into(),
            (None, SolverKind::Exact) => "exact".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub games: Vec<DescriptorFile>,
    pub solvers: Vec<SolverEntry>,
    pub trials: usize,
    /// Trial `t` uses seed `seed + t`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit_secs: Option<f64>,
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let config: CampaignConfig = serde_json::from_str(text)?;
        config.check()?;
        Ok(config)
    }

    pub fn check(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be positive".into()));
        }
        if let Some(t) = self.time_limit_secs {
            if !(t.is_finite() && t > 0.0) {
                return Err(HarnessError::Config(format!("bad time limit {t}")));
            }
        }
        for s in &self.solvers {
            if let SolverKind::O2uct { iterations: 0, .. } = s.kind {
                return Err(HarnessError::Config(format!("solver {} needs iterations", s.id())));
            }
        }
        Ok(())
    }

    fn time_limit(&self) -> Option<Duration> {
        self.time_limit_secs.map(Duration::from_secs_f64)
    }
}

/// What a single solver run produced before evaluation.
pub enum SolverOutput {
    Solved {
        leader: LeaderBehaviorStrategy,
        follower: FollowerPureStrategy,
        /// Payoffs against `follower`.
        payoff: Payoff,
    },
    Timeout,
    Infeasible(String),
}

/// Runs one solver on one game under the optional wall-clock limit.
pub fn run_solver(
    game: &ExtensiveGame,
    solver: &SolverKind,
    seed: u64,
    time_limit: Option<Duration>,
) -> Result<SolverOutput, HarnessError> {
    match solver {
        SolverKind::O2uct { iterations, exploration, leader } => {
            let config = SamplerConfig {
                exploration: *exploration,
                iterations: *iterations,
                seed,
                leader: leader.clone(),
                time_limit,
                ..SamplerConfig::default()
            };
            let start = Instant::now();
            match uct::run(game, &config) {
                Ok(r) if r.status == uct::RunStatus::Timeout => Ok(SolverOutput::Timeout),
                Ok(r) => Ok(SolverOutput::Solved { leader: r.leader, follower: r.follower, payoff: r.payoff }),
                Err(SolveError::NoFeasibleProfile) => {
                    let timed_out = time_limit.is_some_and(|t| start.elapsed() >= t);
                    Ok(if timed_out {
                        SolverOutput::Timeout
                    } else {
                        SolverOutput::Infeasible(SolveError::NoFeasibleProfile.to_string())
                    })
                }
                Err(e) => Err(e.into()),
            }
        }
        SolverKind::Exact => match solve_game(game, Deadline::after(time_limit)) {
            Ok(s) => Ok(SolverOutput::Solved { leader: s.leader, follower: s.follower, payoff: s.payoff }),
            Err(ExactError::Deadline) => Ok(SolverOutput::Timeout),
            Err(e) => Err(e.into()),
        },
    }
}

/// Result document shared by the O2UCT and exact solvers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solver: String,
    pub status: Status,
    /// Payoffs against the follower strategy the solver committed to.
    pub payoff: Option<Payoff>,
    /// Payoffs against the worst-case follower.
    pub worst_case: Option<Payoff>,
    pub leader: Option<LeaderBehaviorStrategy>,
    pub follower: Option<FollowerPureStrategy>,
    pub time_secs: f64,
    pub nodes: u64,
    pub bucket: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Runs `solver` and evaluates its strategy against the worst-case follower.
pub fn solve_report(
    game: &ExtensiveGame,
    solver: &SolverEntry,
    seed: u64,
    time_limit: Option<Duration>,
) -> Result<SolveReport, HarnessError> {
    let start = Instant::now();
    let out = run_solver(game, &solver.kind, seed, time_limit)?;
    let time_secs = start.elapsed().as_secs_f64();
    let nodes = game.num_nodes() as u64;
    let mut report = SolveReport {
        solver: solver.id(),
        status: Status::Ok,
        payoff: None,
        worst_case: None,
        leader: None,
        follower: None,
        time_secs,
        nodes,
        bucket: bucket(nodes),
        detail: None,
    };
    match out {
        SolverOutput::Solved { leader, follower, payoff } => {
            report.worst_case = Some(evaluate_vs_worst_case(game, &leader)?.payoff);
            report.payoff = Some(payoff);
            report.leader = Some(leader);
            report.follower = Some(follower);
        }
        SolverOutput::Timeout => report.status = Status::Timeout,
        SolverOutput::Infeasible(why) => {
            report.status = Status::Infeasible;
            report.detail = Some(why);
        }
    }
    Ok(report)
}

/// Reads either a game file or a descriptor file (recognized by its
/// `family` field), returning the descriptor when there is one.
pub fn load_game(text: &str) -> Result<(ExtensiveGame, Option<DescriptorFile>), HarnessError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("family").is_some() {
        let desc: DescriptorFile = serde_json::from_value(value)?;
        Ok((generate_file(&desc)?, Some(desc)))
    } else {
        let file: GameFile = serde_json::from_value(value)?;
        Ok((file.into_game()?, None))
    }
}

struct Job<'a> {
    game: usize,
    solver: &'a SolverEntry,
    trial: usize,
}

fn run_job(
    config: &CampaignConfig,
    games: &[Result<ExtensiveGame, String>],
    job: &Job,
) -> RunRecord {
    let desc = &config.games[job.game];
    let seed = config.seed.wrapping_add(job.trial as u64);
    let mut record = RunRecord {
        game: desc.clone(),
        solver: job.solver.id(),
        trial: job.trial,
        seed,
        payoff: None,
        time_secs: 0.0,
        nodes: 0,
        bucket: 1,
        status: Status::Infeasible,
        detail: None,
    };
    let game = match &games[job.game] {
        Ok(g) => g,
        Err(e) => {
            record.detail = Some(e.clone());
            return record;
        }
    };
    record.nodes = game.num_nodes() as u64;
    record.bucket = bucket(record.nodes);
    let start = Instant::now();
    let outcome = run_solver(game, &job.solver.kind, seed, config.time_limit());
    record.time_secs = start.elapsed().as_secs_f64();
    match outcome.and_then(|out| match out {
        SolverOutput::Solved { leader, .. } => Ok((Status::Ok, Some(evaluate_vs_worst_case(game, &leader)?))),
        SolverOutput::Timeout => Ok((Status::Timeout, None)),
        SolverOutput::Infeasible(why) => {
            record.detail = Some(why);
            Ok((Status::Infeasible, None))
        }
    }) {
        Ok((status, eval)) => {
            record.status = status;
            record.payoff = eval.map(|e| e.payoff.leader);
        }
        Err(e) => record.detail = Some(e.to_string()),
    }
    record
}

/// Worker count from [`WORKERS_ENV`], defaulting to the available cores.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs every `(game, solver, trial)` job; record order is games, then
/// solvers, then trials, whatever the worker count.
pub fn run_campaign(config: &CampaignConfig) -> Result<Vec<RunRecord>, HarnessError> {
    config.check()?;
    let games: Vec<Result<ExtensiveGame, String>> = config
        .games
        .iter()
        .map(|d| generate_file(d).map_err(|e| e.to_string()))
        .collect();
    let mut jobs = Vec::new();
    for game in 0..config.games.len() {
        for solver in &config.solvers {
            for trial in 0..config.trials {
                jobs.push(Job { game, solver, trial });
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    Ok(pool.install(|| jobs.par_iter().map(|j| run_job(config, &games, j)).collect()))
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<(), HarnessError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Ok(serde_json::from_str(l)?))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub bucket: u64,
    pub solver: String,
    /// Mean over runs with a payoff; `None` when there are none.
    pub mean_payoff: Option<f64>,
    /// Timed-out runs count with the time limit instead of their wall time.
    pub mean_time_secs: f64,
    pub solved_fraction: f64,
    pub runs: usize,
}

/// Per `(bucket, solver)` aggregates, sorted by bucket then solver.
pub fn summarize(records: &[RunRecord], time_limit_secs: Option<f64>) -> Vec<SummaryRow> {
    let mut groups: std::collections::BTreeMap<(u64, &str), Vec<&RunRecord>> = Default::default();
    for r in records {
        groups.entry((r.bucket, r.solver.as_str())).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((bucket, solver), runs)| {
            let payoffs: Vec<f64> = runs.iter().filter_map(|r| r.payoff).collect();
            let time = |r: &&RunRecord| match (r.status, time_limit_secs) {
                (Status::Timeout, Some(limit)) => limit,
                _ => r.time_secs,
            };
            let n = runs.len() as f64;
            SummaryRow {
                bucket,
                solver: solver.to_string(),
                mean_payoff: (!payoffs.is_empty()).then(|| payoffs.iter().sum::<f64>() / payoffs.len() as f64),
                mean_time_secs: runs.iter().map(time).sum::<f64>() / n,
                solved_fraction: runs.iter().filter(|r| r.status == Status::Ok).count() as f64 / n,
                runs: runs.len(),
            }
        })
        .collect()
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

fn csv_error(e: csv::Error) -> HarnessError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => HarnessError::Io(io),
        other => HarnessError::Config(format!("csv: {other:?}")),
    }
}
