//! Leader strategies for which a given follower strategy is a best response.
//!
//! Starting from a deterministic path, the oracle alternates two kinds of
//! passes over a [`StrategyTree`]: a feasibility pass whenever the follower
//! oracle finds a strategy beating the requested one by more than `oracle_eps`,
//! and otherwise a positive pass raising the leader's payoff. Every state
//! reached between feasibility passes is a feasible candidate; the best one is
//! returned.

pub mod assess;
pub mod init;
pub mod stop;
pub mod tree;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use stop::{check_stop, StopDecision, StopReason};
pub use tree::{adjust_node, PassKind, StrategyTree, TreeNode};

use crate::error::SolveError;
use crate::follower::{BestResponder, OracleCache};
use crate::game::{ExtensiveGame, FollowerPureStrategy, LeaderBehaviorStrategy, Payoff, Player};
use crate::Deadline;

pub const MAX_POSITIVE_PASSES: u64 = 5000;
pub const IMPROVEMENT_EPS: f64 = 1e-5;
pub const IMPROVEMENT_WINDOW: usize = 500;
pub const MAX_FEASIBILITY_PASSES: u64 = 10_000;
pub const EXPAND_PROB: f64 = 0.3;
pub const INIT_BUDGET: u64 = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LeaderConfig {
    pub max_positive_passes: u64,
    pub improvement_eps: f64,
    pub improvement_window: usize,
    pub max_feasibility_passes: u64,
    pub oracle_eps: f64,
    pub cache_capacity: usize,
    pub expand_prob: f64,
    pub init_budget: u64,
}

impl Default for LeaderConfig {
    fn default() -> Self {
        LeaderConfig {
            max_positive_passes: MAX_POSITIVE_PASSES,
            improvement_eps: IMPROVEMENT_EPS,
            improvement_window: IMPROVEMENT_WINDOW,
            max_feasibility_passes: MAX_FEASIBILITY_PASSES,
            oracle_eps: crate::follower::DEFAULT_EPS,
            cache_capacity: crate::follower::DEFAULT_CAPACITY,
            expand_prob: EXPAND_PROB,
            init_budget: INIT_BUDGET,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassCounts {
    pub positive: u64,
    pub feasibility: u64,
    pub full_best_responses: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeaderSolution {
    /// Snapshot that passed the follower check when stored.
    pub strategy: LeaderBehaviorStrategy,
    /// Payoffs against the requested follower strategy.
    pub payoff: Payoff,
    pub counts: PassCounts,
    pub stop: StopReason,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LeaderOutcome {
    Feasible(LeaderSolution),
    Infeasible { counts: PassCounts, stop: StopReason },
}

impl LeaderOutcome {
    pub fn into_solution(self) -> Option<LeaderSolution> {
        match self {
            LeaderOutcome::Feasible(s) => Some(s),
            LeaderOutcome::Infeasible { .. } => None,
        }
    }

    pub fn solution(&self) -> Option<&LeaderSolution> {
        match self {
            LeaderOutcome::Feasible(s) => Some(s),
            LeaderOutcome::Infeasible { .. } => None,
        }
    }
}

/// Leader oracle bound to one game; reusable across requested strategies.
pub struct LeaderOracle<'g> {
    game: &'g ExtensiveGame,
    config: LeaderConfig,
    responder: BestResponder,
}

impl<'g> LeaderOracle<'g> {
    pub fn new(game: &'g ExtensiveGame, config: LeaderConfig) -> Self {
        LeaderOracle {
            game,
            responder: BestResponder::new(game),
            config,
        }
    }

    pub fn config(&self) -> &LeaderConfig {
        &self.config
    }

    /// Deterministic path against `requested`, as the initial tree.
    pub fn initialize(
        &self,
        requested: &FollowerPureStrategy,
        rng: &mut impl Rng,
    ) -> Result<StrategyTree<'g>, SolveError> {
        let mut tree = StrategyTree::new(self.game, requested.clone(), self.config.expand_prob)?;
        let path = init::initial_path(self.game, requested, self.config.init_budget, rng);
        tree.set_chain(&path);
        Ok(tree)
    }

    pub fn solve(
        &self,
        requested: &FollowerPureStrategy,
        rng: &mut impl Rng,
        deadline: Deadline,
    ) -> Result<LeaderOutcome, SolveError> {
        if !requested.is_restricted_plan(self.game, Player::Follower) {
            return Err(SolveError::Config("requested follower strategy is not a restricted plan".into()));
        }
        let cfg = &self.config;
        let game = self.game;
        let mut tree = self.initialize(requested, rng)?;
        let mut cache = OracleCache::new(cfg.cache_capacity, cfg.oracle_eps);
        let mut best: Option<(LeaderBehaviorStrategy, Payoff)> = None;
        let mut history: Vec<f64> = Vec::new();
        let mut counts = PassCounts::default();
        let mut consecutive = 0u64;
        let mut last_routing: Option<FollowerPureStrategy> = None;
        let stop = loop {
            if deadline.expired() {
                break StopReason::Deadline;
            }
            let u = tree.requested_utilities()?;
            let known = last_routing.as_ref().zip(tree.last_pass_value()).map(|(s, v)| (s, v.follower));
            match cache.better_response_given(game, &self.responder, tree.strategy(), requested, u.follower, known)? {
                Some(better) => {
                    consecutive += 1;
                    if check_stop(counts.positive, consecutive, &history, cfg) == StopDecision::Infeasible {
                        break StopReason::Infeasible;
                    }
                    counts.feasibility += 1;
                    // Nothing on the better strategy's play can change, so
                    // every further pass would be identical.
                    if tree.pass(PassKind::Feasibility, &better, rng)? == 0 {
                        break StopReason::Infeasible;
                    }
                    last_routing = Some(better);
                }
                None => {
                    consecutive = 0;
                    if best.as_ref().is_none_or(|(_, b)| u.leader > b.leader) {
                        best = Some((tree.strategy().clone(), u));
                    }
                    history.push(best.as_ref().map_or(u.leader, |b| b.1.leader));
                    if let StopDecision::Stop(r) = check_stop(counts.positive, 0, &history, cfg) {
                        break r;
                    }
                    counts.positive += 1;
                    if tree.pass(PassKind::Positive, requested, rng)? == 0 {
                        break StopReason::Converged;
                    }
                    last_routing = None;
                }
            }
        };
        counts.full_best_responses = cache.full_computations;
        log::debug!("leader solve stopped ({stop:?}) after {counts:?}");
        Ok(match best {
            Some((strategy, payoff)) => LeaderOutcome::Feasible(LeaderSolution {
                strategy,
                payoff,
                counts,
                stop,
            }),
            None => LeaderOutcome::Infeasible { counts, stop },
        })
    }
}

/// One-shot solve with a fresh oracle.
pub fn solve(
    game: &ExtensiveGame,
    requested: &FollowerPureStrategy,
    config: &LeaderConfig,
    rng: &mut impl Rng,
) -> Result<LeaderOutcome, SolveError> {
    LeaderOracle::new(game, config.clone()).solve(requested, rng, Deadline::none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::follower::best_response_by_enumeration;
    use crate::game::fixtures::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn defaults_are_pinned() {
        let c = LeaderConfig::default();
        assert_eq!(c.max_positive_passes, 5000);
        assert_eq!(c.improvement_eps, 1e-5);
        assert_eq!(c.improvement_window, 500);
        assert_eq!(c.max_feasibility_passes, 10_000);
        assert_eq!(c.cache_capacity, 50);
        assert_eq!(c.oracle_eps, 1e-2);
        assert_eq!(c.expand_prob, 0.3);
    }

    #[test]
    fn no_follower_moves_returns_best_path() {
        let g = one_move(Payoff::new(0.2, 0.0), Payoff::new(0.9, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = solve(&g, &FollowerPureStrategy::new(), &LeaderConfig::default(), &mut rng).unwrap();
        assert_eq!(out.solution().unwrap().payoff.leader, 0.9);
    }

    #[test]
    fn matching_pennies_reaches_game_value() {
        // Zero-sum: leader wins 1 on a match, loses 1 otherwise; value 0.
        let win = Payoff::new(1.0, -1.0);
        let lose = Payoff::new(-1.0, 1.0);
        let g = matrix_game([[win, lose], [lose, win]]);
        let f = g.infoset_of(1).unwrap();
        let requested = FollowerPureStrategy::from_pairs([(f, 0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = solve(&g, &requested, &LeaderConfig::default(), &mut rng).unwrap();
        let s = out.solution().expect("feasible");
        assert!(s.payoff.leader.abs() <= 1e-2 + 1e-3, "payoff {}", s.payoff.leader);
        let (_, br) = best_response_by_enumeration(&g, &s.strategy).unwrap().unwrap();
        assert!(br.follower <= s.payoff.follower + 1e-2);
    }

    #[test]
    fn feasibility_pass_restores_the_requested_response() {
        // Follower prefers column 1 unless the leader mixes in row 1.
        let g = matrix_game([
            [Payoff::new(1.0, 0.0), Payoff::new(0.0, 1.0)],
            [Payoff::new(0.0, 1.0), Payoff::new(0.0, 0.0)],
        ]);
        let f = g.infoset_of(1).unwrap();
        let requested = FollowerPureStrategy::from_pairs([(f, 0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let out = solve(&g, &requested, &LeaderConfig::default(), &mut rng).unwrap();
        let s = out.solution().expect("feasible");
        // Exact SSE value for this column is 0.5 (mix rows evenly).
        assert!((s.payoff.leader - 0.5).abs() < 0.02, "{}", s.payoff.leader);
        assert!(s.counts.feasibility > 0);
    }
}
