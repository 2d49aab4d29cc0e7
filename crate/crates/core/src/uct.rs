//! UCT search over one-player problems, and the sampling loop that drives
//! leader-strategy construction from follower strategies drawn on the
//! auxiliary follower game.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::Duration;

use crate::afg::{path_to_strategy, Afg, AfgState};
use crate::error::SolveError;
use crate::game::{ActionId, ExtensiveGame, FollowerPureStrategy, LeaderBehaviorStrategy, Payoff};
use crate::leader::{LeaderConfig, LeaderOracle};
use crate::Deadline;

/// A deterministic one-player decision problem.
pub trait Problem {
    type State: Clone;

    /// Number of legal actions; zero at terminal states.
    fn num_actions(&self, state: &Self::State) -> usize;

    fn step(&self, state: &Self::State, action: ActionId) -> Self::State;
}

impl Problem for Afg {
    type State = AfgState;

    fn num_actions(&self, state: &AfgState) -> usize {
        Afg::num_actions(self, state).unwrap_or(0)
    }

    fn step(&self, state: &AfgState, action: ActionId) -> AfgState {
        Afg::step(self, state, action).expect("legal action")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UctNode {
    pub visits: u64,
    /// Sum of normalized payoffs in `[0, 1]`.
    pub value_sum: f64,
    /// Child node index per action, `None` until expanded.
    pub children: Vec<Option<usize>>,
}

impl UctNode {
    fn new(num_actions: usize) -> Self {
        UctNode {
            visits: 0,
            value_sum: 0.0,
            children: vec![None; num_actions],
        }
    }

    pub fn mean(&self) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.value_sum / self.visits as f64
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.children.is_empty()
    }
}

/// UCB1 choice among the children of `node`, given the child statistics.
/// Unvisited children come first; ties go to the lowest action.
pub fn select_action(node: &UctNode, nodes: &[UctNode], c: f64) -> Result<ActionId, SolveError> {
    if node.is_terminal() {
        return Err(SolveError::TerminalNode(0));
    }
    let ln_n = (node.visits.max(1) as f64).ln();
    let mut best = (0, f64::NEG_INFINITY);
    for (a, child) in node.children.iter().enumerate() {
        let score = match child.map(|i| &nodes[i]) {
            None => f64::INFINITY,
            Some(ch) if ch.visits == 0 => f64::INFINITY,
            Some(ch) => ch.mean() + c * (ln_n / ch.visits as f64).sqrt(),
        };
        if score > best.1 {
            best = (a, score);
        }
    }
    Ok(best.0)
}

/// Search statistics with payoff normalization to `[0, 1]`.
#[derive(Clone, Debug)]
pub struct SearchTree {
    pub nodes: Vec<UctNode>,
    pub bounds: (f64, f64),
    pub c: f64,
}

impl SearchTree {
    pub fn new<P: Problem>(problem: &P, root: &P::State, bounds: (f64, f64), c: f64) -> Self {
        SearchTree {
            nodes: vec![UctNode::new(problem.num_actions(root))],
            bounds,
            c,
        }
    }

    pub fn root(&self) -> &UctNode {
        &self.nodes[0]
    }

    pub fn normalize(&self, payoff: f64) -> f64 {
        let (lo, hi) = self.bounds;
        ((payoff - lo) / (hi - lo)).clamp(0.0, 1.0)
    }

    /// Selection and one expansion, then uniform random simulation to a
    /// terminal state. Returns the terminal state and the tree path.
    pub fn playout<P: Problem>(
        &mut self,
        problem: &P,
        root: &P::State,
        rng: &mut impl Rng,
    ) -> (P::State, Vec<usize>) {
        let mut state = root.clone();
        let mut node = 0;
        let mut path = vec![0];
        loop {
            if self.nodes[node].is_terminal() {
                return (state, path);
            }
            let a = select_action(&self.nodes[node], &self.nodes, self.c).expect("non-terminal");
            state = problem.step(&state, a);
            match self.nodes[node].children[a] {
                Some(child) => {
                    node = child;
                    path.push(node);
                }
                None => {
                    let child = self.nodes.len();
                    self.nodes.push(UctNode::new(problem.num_actions(&state)));
                    self.nodes[node].children[a] = Some(child);
                    path.push(child);
                    break;
                }
            }
        }
        loop {
            let k = problem.num_actions(&state);
            if k == 0 {
                return (state, path);
            }
            state = problem.step(&state, rng.gen_range(0..k));
        }
    }

    /// Adds the normalized `payoff` to every node on `path`.
    pub fn backpropagate(&mut self, path: &[usize], payoff: f64) {
        let v = self.normalize(payoff);
        self.backpropagate_normalized(path, v);
    }

    pub fn backpropagate_normalized(&mut self, path: &[usize], value: f64) {
        for &i in path {
            self.nodes[i].visits += 1;
            self.nodes[i].value_sum += value;
        }
    }
}

/// Solves the leader's side for one sampled follower strategy.
pub trait LeafSolver {
    /// A feasible leader strategy and its payoffs against `follower`, or
    /// `None` if none was found.
    fn solve_leaf(
        &mut self,
        game: &ExtensiveGame,
        follower: &FollowerPureStrategy,
        rng: &mut ChaCha8Rng,
        deadline: Deadline,
    ) -> Result<Option<(LeaderBehaviorStrategy, Payoff)>, SolveError>;
}

/// The leader oracle, optionally memoizing solutions per follower strategy.
pub struct OracleLeafSolver<'g> {
    oracle: LeaderOracle<'g>,
    memo: Option<HashMap<FollowerPureStrategy, Option<(LeaderBehaviorStrategy, Payoff)>>>,
}

impl<'g> OracleLeafSolver<'g> {
    pub fn new(game: &'g ExtensiveGame, config: LeaderConfig, reuse: bool) -> Self {
        OracleLeafSolver {
            oracle: LeaderOracle::new(game, config),
            memo: reuse.then(HashMap::new),
        }
    }
}

impl LeafSolver for OracleLeafSolver<'_> {
    fn solve_leaf(
        &mut self,
        _game: &ExtensiveGame,
        follower: &FollowerPureStrategy,
        rng: &mut ChaCha8Rng,
        deadline: Deadline,
    ) -> Result<Option<(LeaderBehaviorStrategy, Payoff)>, SolveError> {
        if let Some(hit) = self.memo.as_ref().and_then(|m| m.get(follower)) {
            return Ok(hit.clone());
        }
        let out = self.oracle.solve(follower, rng, deadline)?;
        let result = out.into_solution().map(|s| (s.strategy, s.payoff));
        // A solve cut short by the deadline is not a final answer.
        if let Some(m) = self.memo.as_mut() {
            if !deadline.expired() {
                m.insert(follower.clone(), result.clone());
            }
        }
        Ok(result)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub exploration: f64,
    pub iterations: u64,
    pub seed: u64,
    /// Normalization bounds; defaults to the game's leader utility range.
    pub utility_bounds: Option<(f64, f64)>,
    pub leader: LeaderConfig,
    /// Solve each distinct follower strategy once per run.
    pub reuse_leaf_solutions: bool,
    pub time_limit: Option<Duration>,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            exploration: std::f64::consts::SQRT_2,
            iterations: 1000,
            seed: 0,
            utility_bounds: None,
            leader: LeaderConfig::default(),
            reuse_leaf_solutions: true,
            time_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Completed,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SseResult {
    pub leader: LeaderBehaviorStrategy,
    pub follower: FollowerPureStrategy,
    /// Payoffs of the returned profile.
    pub payoff: Payoff,
    /// Best leader payoff after each playout (`NaN` before the first feasible one).
    pub history: Vec<f64>,
    /// Follower strategy sampled in each playout.
    pub samples: Vec<FollowerPureStrategy>,
    pub iterations: u64,
    pub status: RunStatus,
}

fn bounds(game: &ExtensiveGame, config: &SamplerConfig) -> Result<(f64, f64), SolveError> {
    let (lo, hi) = config.utility_bounds.unwrap_or_else(|| game.leader_utility_bounds());
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(SolveError::Config(format!("bad utility bounds ({lo}, {hi})")));
    }
    Ok(if lo == hi { (lo - 0.5, hi + 0.5) } else { (lo, hi) })
}

/// The sampling loop with the default leader oracle.
pub fn run(game: &ExtensiveGame, config: &SamplerConfig) -> Result<SseResult, SolveError> {
    let mut solver = OracleLeafSolver::new(game, config.leader.clone(), config.reuse_leaf_solutions);
    run_with(game, config, &mut solver)
}

/// The sampling loop: each playout samples a follower strategy from the
/// auxiliary game, solves the leader side for it and backpropagates the
/// normalized leader payoff (zero when no feasible strategy was found).
pub fn run_with(
    game: &ExtensiveGame,
    config: &SamplerConfig,
    solver: &mut impl LeafSolver,
) -> Result<SseResult, SolveError> {
    if config.iterations == 0 {
        return Err(SolveError::ZeroIterations);
    }
    if config.exploration.is_nan() || config.exploration <= 0.0 {
        return Err(SolveError::Config("exploration constant must be positive".into()));
    }
    let bounds = bounds(game, config)?;
    let deadline = Deadline::after(config.time_limit);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let afg = Afg::new(game);
    let root = afg.initial_state();
    let mut tree = SearchTree::new(&afg, &root, bounds, config.exploration);
    let mut best: Option<(LeaderBehaviorStrategy, FollowerPureStrategy, Payoff)> = None;
    let mut history = Vec::new();
    let mut samples = Vec::new();
    let mut status = RunStatus::Completed;
    for _ in 0..config.iterations {
        if deadline.expired() {
            status = RunStatus::Timeout;
            break;
        }
        let (leaf, path) = tree.playout(&afg, &root, &mut rng);
        let follower = path_to_strategy(&leaf)?;
        match solver.solve_leaf(game, &follower, &mut rng, deadline)? {
            Some((strategy, payoff)) => {
                tree.backpropagate(&path, payoff.leader);
                if best.as_ref().is_none_or(|(_, _, b)| payoff.leader > b.leader) {
                    best = Some((strategy, follower.clone(), payoff));
                }
            }
            None => tree.backpropagate_normalized(&path, 0.0),
        }
        history.push(best.as_ref().map_or(f64::NAN, |b| b.2.leader));
        samples.push(follower);
    }
    let (leader, follower, payoff) = best.ok_or(SolveError::NoFeasibleProfile)?;
    Ok(SseResult {
        leader,
        follower,
        payoff,
        iterations: history.len() as u64,
        history,
        samples,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;
    use crate::game::{leader_best_response, Player};

    fn node(visits: u64, value_sum: f64) -> UctNode {
        UctNode {
            visits,
            value_sum,
            children: vec![],
        }
    }

    fn parent(visits: u64, kids: Vec<Option<usize>>) -> UctNode {
        UctNode {
            visits,
            value_sum: 0.0,
            children: kids,
        }
    }

    #[test]
    fn unvisited_child_has_priority() {
        let nodes = vec![node(3, 2.0), node(1, 0.0)];
        let p = parent(4, vec![Some(0), None, Some(1)]);
        assert_eq!(select_action(&p, &nodes, 1.4).unwrap(), 1);
    }

    #[test]
    fn exploitation_dominates_at_equal_visits() {
        let nodes = vec![node(100, 10.0), node(100, 90.0)];
        let p = parent(200, vec![Some(0), Some(1)]);
        assert_eq!(select_action(&p, &nodes, 1.4).unwrap(), 1);
    }

    #[test]
    fn equal_bonus_higher_mean_wins() {
        let nodes = vec![node(1, 1.0), node(1, 0.6)];
        let p = parent(2, vec![Some(0), Some(1)]);
        assert_eq!(select_action(&p, &nodes, 2.0).unwrap(), 0);
        let nodes = vec![node(1, 0.6), node(1, 0.6)];
        assert_eq!(select_action(&p, &nodes, 2.0).unwrap(), 0);
    }

    #[test]
    fn terminal_node_cannot_select() {
        assert!(select_action(&node(1, 0.0), &[], 1.0).is_err());
    }

    #[test]
    fn backpropagation_normalizes_and_clamps() {
        let g = one_move(Payoff::ZERO, Payoff::ZERO);
        let afg = Afg::new(&g);
        let mut t = SearchTree::new(&afg, &afg.initial_state(), (-1.0, 3.0), 1.0);
        t.backpropagate(&[0], 3.0);
        assert_eq!(t.root().value_sum, 1.0);
        t.backpropagate(&[0], -1.0);
        assert_eq!(t.root().value_sum, 1.0);
        t.backpropagate(&[0], 1.0);
        assert_eq!(t.root().value_sum, 1.5);
        t.backpropagate(&[0], 10.0);
        assert_eq!(t.root().value_sum, 2.5);
        assert_eq!(t.root().visits, 4);
    }

    /// Leader best pure response value, a cheap affine-equivariant stand-in.
    struct PureResponse;

    impl LeafSolver for PureResponse {
        fn solve_leaf(
            &mut self,
            game: &ExtensiveGame,
            follower: &FollowerPureStrategy,
            _rng: &mut ChaCha8Rng,
            _deadline: Deadline,
        ) -> Result<Option<(LeaderBehaviorStrategy, Payoff)>, SolveError> {
            let (p, _) = leader_best_response(game, game.root(), follower)?;
            Ok(Some((LeaderBehaviorStrategy::first_action(game), p)))
        }
    }

    #[test]
    fn root_visits_equal_playouts_and_every_leaf_is_tried() {
        let g = matrix_game([[Payoff::new(0.0, 1.0), Payoff::new(1.0, 0.0)]; 2]);
        let cfg = SamplerConfig { iterations: 100, ..Default::default() };
        let r = run_with(&g, &cfg, &mut PureResponse).unwrap();
        assert_eq!(r.iterations, 100);
        let distinct: std::collections::HashSet<_> = r.samples.iter().collect();
        assert_eq!(distinct.len(), 2);
    }

    #[test]
    fn best_payoff_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = crate::suite::random::random_game(&Default::default(), &mut rng);
        let cfg = SamplerConfig { iterations: 200, seed: 3, ..Default::default() };
        let r = run_with(&g, &cfg, &mut PureResponse).unwrap();
        let h: Vec<f64> = r.history.iter().copied().filter(|x| !x.is_nan()).collect();
        assert!(h.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*h.last().unwrap(), r.payoff.leader);
    }

    #[test]
    fn zero_iterations_is_an_error() {
        let g = one_move(Payoff::ZERO, Payoff::ZERO);
        let cfg = SamplerConfig { iterations: 0, ..Default::default() };
        assert_eq!(run(&g, &cfg).unwrap_err(), SolveError::ZeroIterations);
    }

    #[test]
    fn no_follower_moves_means_one_leaf() {
        let g = one_move(Payoff::new(0.2, 0.0), Payoff::new(0.7, 0.0));
        let cfg = SamplerConfig { iterations: 5, ..Default::default() };
        let r = run(&g, &cfg).unwrap();
        assert!(r.samples.iter().all(|s| s.is_empty()));
        assert_eq!(r.payoff.leader, 0.7);
        assert!(g.player_infosets(Player::Follower).next().is_none());
    }
}
