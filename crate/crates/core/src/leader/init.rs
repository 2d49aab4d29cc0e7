//! Initial strategy: one deterministic leader path against the requested
//! follower strategy, found by a short UCT search.

use rand::Rng;

use crate::game::{descend, ActionId, ExtensiveGame, FollowerPureStrategy, Landing, NodeId, Player};
use crate::uct::{Problem, SearchTree};

/// The leader's single-agent problem against a fixed follower strategy.
/// States are leader decision nodes or terminals, with the path so far.
pub struct LeaderPathProblem<'a> {
    pub game: &'a ExtensiveGame,
    pub follower: &'a FollowerPureStrategy,
}

#[derive(Clone, Debug)]
pub struct PathState {
    pub node: NodeId,
    pub path: Vec<(NodeId, ActionId)>,
}

impl LeaderPathProblem<'_> {
    fn land(&self, node: NodeId) -> NodeId {
        match descend(self.game, node, self.follower).expect("follower strategy covers its play") {
            Landing::Leader(s) | Landing::Terminal(s) => s,
        }
    }

    pub fn root(&self) -> PathState {
        PathState {
            node: self.land(self.game.root()),
            path: Vec::new(),
        }
    }
}

impl Problem for LeaderPathProblem<'_> {
    type State = PathState;

    fn num_actions(&self, state: &PathState) -> usize {
        match self.game.owner(state.node) {
            Some(Player::Leader) => self.game.children(state.node).len(),
            _ => 0,
        }
    }

    fn step(&self, state: &PathState, action: ActionId) -> PathState {
        let mut path = state.path.clone();
        path.push((state.node, action));
        PathState {
            node: self.land(self.game.child(state.node, action)),
            path,
        }
    }
}

/// Best leader path seen in `budget` UCT playouts (at least one).
pub fn initial_path(
    game: &ExtensiveGame,
    follower: &FollowerPureStrategy,
    budget: u64,
    rng: &mut impl Rng,
) -> Vec<(NodeId, ActionId)> {
    let problem = LeaderPathProblem { game, follower };
    let root = problem.root();
    if problem.num_actions(&root) == 0 {
        return Vec::new();
    }
    let (lo, hi) = game.leader_utility_bounds();
    let bounds = if lo < hi { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let mut tree = SearchTree::new(&problem, &root, bounds, std::f64::consts::SQRT_2);
    let mut best: Option<(f64, Vec<(NodeId, ActionId)>)> = None;
    for _ in 0..budget.max(1) {
        let (leaf, path) = tree.playout(&problem, &root, rng);
        let u = game.payoff(leaf.node).map_or(f64::NEG_INFINITY, |p| p.leader);
        tree.backpropagate(&path, u);
        if best.as_ref().is_none_or(|(b, _)| u > *b) {
            best = Some((u, leaf.path));
        }
    }
    best.map(|(_, p)| p).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;
    use crate::game::{enumerate_pure_strategies, expected_utilities, LeaderBehaviorStrategy, Payoff};
    use crate::suite::random::{random_game, RandomGameConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_decision_picks_better_action() {
        let g = one_move(Payoff::new(0.0, 0.0), Payoff::new(1.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(initial_path(&g, &FollowerPureStrategy::new(), 10, &mut rng), vec![(0, 1)]);
    }

    #[test]
    fn large_budget_finds_best_pure_response() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = RandomGameConfig { max_depth: 5, ..Default::default() };
        for _ in 0..10 {
            let g = random_game(&cfg, &mut rng);
            let follower = enumerate_pure_strategies(&g, Player::Follower).next().unwrap();
            let best = enumerate_pure_strategies(&g, Player::Leader)
                .map(|l| {
                    let s = LeaderBehaviorStrategy::from_pure(&g, &l);
                    expected_utilities(&g, &s, &follower).unwrap().leader
                })
                .fold(f64::NEG_INFINITY, f64::max);
            let path = initial_path(&g, &follower, 5000, &mut rng);
            let end = path.last().map_or(g.root(), |&(s, a)| g.child(s, a));
            let end = match descend(&g, end, &follower).unwrap() {
                Landing::Terminal(t) => t,
                Landing::Leader(_) => panic!("path stops early"),
            };
            assert_eq!(g.payoff(end).unwrap().leader, best);
        }
    }

    #[test]
    fn no_leader_moves_gives_empty_path() {
        let g = nested_follower();
        let follower = FollowerPureStrategy::from_pairs([(0, 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(initial_path(&g, &follower, 10, &mut rng).is_empty());
    }
}
