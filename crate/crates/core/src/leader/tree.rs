//! The leader's behavior-strategy tree and its adjustment passes.
//!
//! Tree nodes correspond one-to-one to leader information sets: under perfect
//! recall a set's position in the tree is fixed by the leader's own history.
//! Against a pure follower strategy at most one state of a set is consistent,
//! so passes walk game states rather than sets.

use rand::Rng;

use super::assess;
use crate::error::GameError;
use crate::game::{
    descend, leader_best_response, subtree_utilities, ActionId, ExtensiveGame,
    FollowerPureStrategy, InfosetId, Landing, LeaderBehaviorStrategy, NodeId, NodeKind, Payoff, Player,
};

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    /// Tracked moves, in insertion order.
    pub moves: Vec<ActionId>,
    pub prob: Vec<f64>,
    pub mom: Vec<f64>,
    pub w: f64,
}

impl TreeNode {
    pub fn deterministic(action: ActionId) -> Self {
        TreeNode {
            moves: vec![action],
            prob: vec![1.0],
            mom: vec![0.0],
            w: 0.0,
        }
    }

    pub fn add_move(&mut self, action: ActionId) {
        self.moves.push(action);
        self.prob.push(0.0);
        self.mom.push(0.0);
    }

    /// Probability vector over all `num_actions` actions.
    pub fn full_vector(&self, num_actions: usize) -> Vec<f64> {
        let mut v = vec![0.0; num_actions];
        for (&a, &p) in self.moves.iter().zip(&self.prob) {
            v[a] = p;
        }
        v
    }
}

/// Momentum update of one node.
pub fn adjust_node(node: &mut TreeNode, assessment: &[f64]) {
    debug_assert_eq!(assessment.len(), node.prob.len());
    for (m, a) in node.mom.iter_mut().zip(assessment) {
        *m += a;
    }
    node.w += assessment.iter().map(|a| a.abs()).sum::<f64>();
    if node.w > 0.0 {
        for (p, m) in node.prob.iter_mut().zip(&node.mom) {
            *p = (*p + m / node.w).max(0.0);
        }
    }
    let sum: f64 = node.prob.iter().sum();
    if sum > 0.0 {
        node.prob.iter_mut().for_each(|p| *p /= sum);
    } else {
        let u = 1.0 / node.prob.len() as f64;
        node.prob.iter_mut().for_each(|p| *p = u);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PassKind {
    Positive,
    Feasibility,
}

/// Reusable buffers for node adjustment.
#[derive(Clone, Debug, Default)]
struct Scratch {
    values: Vec<Vec<Payoff>>,
    tracked: Vec<Vec<bool>>,
    a: Vec<f64>,
    b: Vec<f64>,
    out: Vec<f64>,
}

/// A landing with what passes need from the game node resolved.
#[derive(Clone, Copy, Debug)]
enum Step {
    Leader(NodeId, InfosetId),
    Terminal(Payoff),
}

impl Step {
    fn of(game: &ExtensiveGame, landing: Landing) -> Step {
        match landing {
            Landing::Leader(s) => Step::Leader(s, game.infoset_of(s).expect("decision state")),
            Landing::Terminal(t) => Step::Terminal(game.payoff(t).unwrap_or_default()),
        }
    }
}

#[derive(Clone, Debug)]
struct Route {
    strategy: FollowerPureStrategy,
    landing: Vec<Option<Vec<Step>>>,
}

/// Routing strategies whose landings are kept.
const ROUTE_CACHE: usize = 8;

#[derive(Clone, Debug)]
pub struct StrategyTree<'g> {
    game: &'g ExtensiveGame,
    requested: FollowerPureStrategy,
    /// Per leader infoset: its state consistent with the requested strategy.
    requested_state: Vec<Option<NodeId>>,
    nodes: Vec<Option<TreeNode>>,
    current: LeaderBehaviorStrategy,
    /// Per leader infoset: value of its requested state against the requested
    /// strategy, cleared whenever a probability below it changes.
    requested_value: Vec<Option<Payoff>>,
    /// Per leader infoset with a requested state: where each action lands
    /// against the requested strategy.
    requested_landing: Vec<Vec<Step>>,
    /// Nearest leader infoset above the requested state.
    requested_parent: Vec<Option<InfosetId>>,
    /// Action landings per routing strategy, filled lazily.
    routes: Vec<Route>,
    active_route: usize,
    last_value: Option<Payoff>,
    scratch: Scratch,
    pub expand_prob: f64,
    /// Infosets in the order their nodes were adjusted, when enabled.
    pub trace: Option<Vec<InfosetId>>,
}

impl<'g> StrategyTree<'g> {
    /// An empty tree; leader sets outside it play their first action.
    pub fn new(
        game: &'g ExtensiveGame,
        requested: FollowerPureStrategy,
        expand_prob: f64,
    ) -> Result<Self, GameError> {
        let mut requested_state = vec![None; game.num_infosets()];
        let mut requested_landing = vec![Vec::new(); game.num_infosets()];
        let mut requested_parent = vec![None; game.num_infosets()];
        let mut stack = vec![(game.root(), None)];
        while let Some((id, parent)) = stack.pop() {
            match &game.node(id).kind {
                NodeKind::Terminal(_) => {}
                NodeKind::Decision { owner: Some(Player::Leader), infoset, children, .. } => {
                    requested_state[*infoset] = Some(id);
                    requested_parent[*infoset] = parent;
                    requested_landing[*infoset] = children
                        .iter()
                        .map(|&c| descend(game, c, &requested).map(|l| Step::of(game, l)))
                        .collect::<Result<_, _>>()?;
                    stack.extend(children.iter().map(|&c| (c, Some(*infoset))));
                }
                NodeKind::Decision { owner: Some(Player::Follower), infoset, children, .. } => {
                    let a = requested
                        .choice(*infoset)
                        .ok_or(GameError::MissingFollowerChoice(*infoset))?;
                    stack.push((children[a], parent));
                }
                NodeKind::Decision { owner: None, .. } => return Err(GameError::Ownerless(id)),
            }
        }
        Ok(StrategyTree {
            game,
            requested,
            requested_state,
            nodes: vec![None; game.num_infosets()],
            current: LeaderBehaviorStrategy::first_action(game),
            requested_value: vec![None; game.num_infosets()],
            requested_landing,
            requested_parent,
            routes: Vec::new(),
            active_route: 0,
            last_value: None,
            scratch: Scratch::default(),
            expand_prob,
            trace: None,
        })
    }

    /// The full behavior strategy the tree represents.
    pub fn strategy(&self) -> &LeaderBehaviorStrategy {
        &self.current
    }

    pub fn node(&self, infoset: InfosetId) -> Option<&TreeNode> {
        self.nodes[infoset].as_ref()
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn requested_state(&self, infoset: InfosetId) -> Option<NodeId> {
        self.requested_state[infoset]
    }

    fn infoset(&self, state: NodeId) -> InfosetId {
        self.game.infoset_of(state).expect("decision state")
    }

    fn install(&mut self, infoset: InfosetId, node: TreeNode) {
        self.nodes[infoset] = Some(node);
        self.sync_probs(infoset);
    }

    /// Copies the node's mixture into the full strategy.
    fn sync_probs(&mut self, infoset: InfosetId) {
        let node = self.nodes[infoset].as_ref().expect("tracked node");
        match self.current.get_mut(infoset) {
            Some(v) => {
                v.iter_mut().for_each(|p| *p = 0.0);
                for (&a, &p) in node.moves.iter().zip(&node.prob) {
                    v[a] = p;
                }
            }
            None => {
                let k = self.game.infoset(infoset).num_actions;
                self.current.set(infoset, node.full_vector(k));
            }
        }
        // Cached values above an already-cleared entry cannot depend on it.
        if self.requested_state[infoset].is_none() {
            return;
        }
        self.requested_value[infoset] = None;
        let mut up = self.requested_parent[infoset];
        while let Some(j) = up {
            if self.requested_value[j].take().is_none() {
                return;
            }
            up = self.requested_parent[j];
        }
    }

    /// Value of `state` against the requested strategy, memoized per leader
    /// infoset along the requested play.
    fn requested_value_at(&mut self, step: Step) -> Result<Payoff, GameError> {
        let i = match step {
            Step::Terminal(p) => return Ok(p),
            Step::Leader(_, i) => i,
        };
        if let Some(v) = self.requested_value[i] {
            return Ok(v);
        }
        let mut total = Payoff::ZERO;
        for a in 0..self.requested_landing[i].len() {
            let p = self.current.get(i).ok_or(GameError::MissingLeaderStrategy(i))?[a];
            if p > 0.0 {
                let v = self.requested_value_at(self.requested_landing[i][a])?;
                total.add_scaled(v, p);
            }
        }
        self.requested_value[i] = Some(total);
        Ok(total)
    }

    /// Expected utilities of the current strategy against the requested one.
    pub fn requested_utilities(&mut self) -> Result<Payoff, GameError> {
        let landing = descend(self.game, self.game.root(), &self.requested)?;
        self.requested_value_at(Step::of(self.game, landing))
    }

    /// Replaces the tree by a deterministic chain of `(state, action)` steps.
    pub fn set_chain(&mut self, path: &[(NodeId, ActionId)]) {
        for &(s, a) in path {
            let i = self.infoset(s);
            self.install(i, TreeNode::deterministic(a));
        }
    }

    fn greedy_action(&self, infoset: InfosetId, state: NodeId, routing: &FollowerPureStrategy) -> Result<ActionId, GameError> {
        if let Some(r) = self.requested_state[infoset] {
            let (_, path) = leader_best_response(self.game, r, &self.requested)?;
            return Ok(path.first().map_or(0, |&(_, a)| a));
        }
        let mut best = (0, f64::INFINITY);
        for (a, &c) in self.game.children(state).iter().enumerate() {
            let v = subtree_utilities(self.game, &self.current, routing, c)?.follower;
            if v < best.1 {
                best = (a, v);
            }
        }
        Ok(best.0)
    }

    /// Adds deterministic nodes from `state` downwards along `routing` until a
    /// tracked set or a terminal is met. Sets reachable against the requested
    /// strategy take the leader's best move against it; others the move
    /// minimizing the routing strategy's follower payoff.
    fn grow(&mut self, mut state: NodeId, routing: &FollowerPureStrategy) -> Result<(), GameError> {
        loop {
            let i = self.infoset(state);
            if self.nodes[i].is_some() {
                return Ok(());
            }
            let a = self.greedy_action(i, state, routing)?;
            self.install(i, TreeNode::deterministic(a));
            match descend(self.game, self.game.child(state, a), routing)? {
                Landing::Leader(s) => state = s,
                Landing::Terminal(_) => return Ok(()),
            }
        }
    }

    /// Assessment of the tracked moves of `infoset` into `scratch.out`, given
    /// the value of every action against `routing` in `value`.
    fn assessment(&mut self, kind: PassKind, infoset: InfosetId, value: &[Payoff]) -> Result<(), GameError> {
        let mut b = std::mem::take(&mut self.scratch.b);
        let mut out = std::mem::take(&mut self.scratch.out);
        let mut req = std::mem::take(&mut self.scratch.a);
        let result = self.assessment_into(kind, infoset, value, &mut req, &mut b, &mut out);
        self.scratch.a = req;
        self.scratch.b = b;
        self.scratch.out = out;
        result
    }

    fn assessment_into(
        &mut self,
        kind: PassKind,
        infoset: InfosetId,
        value: &[Payoff],
        req: &mut Vec<f64>,
        b: &mut Vec<f64>,
        out: &mut Vec<f64>,
    ) -> Result<(), GameError> {
        let node = self.nodes[infoset].as_ref().expect("tracked node");
        b.clear();
        if kind == PassKind::Positive {
            b.extend(node.moves.iter().map(|&a| value[a].leader));
            assess::positive_into(&node.prob, b, out);
            return Ok(());
        }
        b.extend(node.moves.iter().map(|&a| value[a].follower));
        if self.requested_state[infoset].is_none() {
            assess::feasibility_better_only_into(&node.prob, b, out);
            return Ok(());
        }
        req.clear();
        for m in 0..node.moves.len() {
            let a = self.nodes[infoset].as_ref().expect("tracked node").moves[m];
            let v = match self.requested_landing[infoset][a] {
                Step::Terminal(p) => p,
                Step::Leader(_, j) => match self.requested_value[j] {
                    Some(v) => v,
                    None => self.requested_value_at(self.requested_landing[infoset][a])?,
                },
            };
            req.push(v.follower);
        }
        let node = self.nodes[infoset].as_ref().expect("tracked node");
        assess::feasibility_both_into(&node.prob, req, b, out);
        Ok(())
    }

    /// One pass over the tree nodes reachable against `routing` (the better
    /// strategy in feasibility passes, the requested one in positive passes).
    /// Returns the number of nodes adjusted.
    pub fn pass(
        &mut self,
        kind: PassKind,
        routing: &FollowerPureStrategy,
        rng: &mut impl Rng,
    ) -> Result<usize, GameError> {
        self.select_route(routing);
        let (adjusted, value) = match Step::of(self.game, descend(self.game, self.game.root(), routing)?) {
            Step::Leader(s, i) => self.visit(kind, s, i, routing, rng)?,
            Step::Terminal(p) => (0, p),
        };
        self.last_value = Some(value);
        Ok(adjusted)
    }

    /// Utilities against the routing strategy of the last pass, as left by it.
    pub fn last_pass_value(&self) -> Option<Payoff> {
        self.last_value
    }

    fn select_route(&mut self, routing: &FollowerPureStrategy) {
        if let Some(k) = self.routes.iter().position(|r| r.strategy == *routing) {
            self.active_route = k;
            return;
        }
        let route = Route {
            strategy: routing.clone(),
            landing: vec![None; self.game.num_infosets()],
        };
        if self.routes.len() < ROUTE_CACHE {
            self.routes.push(route);
            self.active_route = self.routes.len() - 1;
        } else {
            self.active_route = (self.active_route + 1) % ROUTE_CACHE;
            self.routes[self.active_route] = route;
        }
    }

    /// Caches where each action of `state` (the member of `infoset`
    /// consistent with the active routing strategy) lands.
    fn fill_route(&mut self, infoset: InfosetId, state: NodeId) -> Result<(), GameError> {
        let game = self.game;
        let route = &mut self.routes[self.active_route];
        if route.landing[infoset].is_none() {
            let l = game
                .children(state)
                .iter()
                .map(|&c| descend(game, c, &route.strategy).map(|l| Step::of(game, l)))
                .collect::<Result<Vec<_>, _>>()?;
            route.landing[infoset] = Some(l);
        }
        Ok(())
    }

    /// Adjusts the subtree at `state`, children first. Returns the number of
    /// nodes adjusted and the value of `state` against `routing` afterwards.
    fn visit(
        &mut self,
        kind: PassKind,
        state: NodeId,
        i: InfosetId,
        routing: &FollowerPureStrategy,
        rng: &mut impl Rng,
    ) -> Result<(usize, Payoff), GameError> {
        if self.nodes[i].is_none() {
            self.grow(state, routing)?;
        }
        self.fill_route(i, state)?;
        let mut adjusted = 0;
        let k = self.game.infoset(i).num_actions;
        let mut value = self.scratch.values.pop().unwrap_or_default();
        value.clear();
        value.resize(k, Payoff::ZERO);
        let mut tracked = self.scratch.tracked.pop().unwrap_or_default();
        tracked.clear();
        tracked.resize(k, false);
        for &a in &self.nodes[i].as_ref().expect("grown").moves {
            tracked[a] = true;
        }
        let mut untracked = 0;
        for a in 0..k {
            if !tracked[a] {
                untracked += 1;
                continue;
            }
            let step = self.routes[self.active_route].landing[i].as_ref().expect("filled")[a];
            value[a] = match step {
                Step::Leader(s, j) => {
                    let (n, v) = self.visit(kind, s, j, routing, rng)?;
                    adjusted += n;
                    v
                }
                Step::Terminal(p) => p,
            };
        }
        if untracked > 0 && rng.gen_bool(self.expand_prob) {
            let pick = rng.gen_range(0..untracked);
            let a = (0..k).filter(|&a| !tracked[a]).nth(pick).expect("untracked move");
            self.nodes[i].as_mut().expect("grown").add_move(a);
            let child = self.game.child(state, a);
            if let Landing::Leader(s) = descend(self.game, child, routing)? {
                self.grow(s, routing)?;
            }
            value[a] = subtree_utilities(self.game, &self.current, routing, child)?;
        }
        self.assessment(kind, i, &value)?;
        let node = self.nodes[i].as_mut().expect("grown");
        adjust_node(node, &self.scratch.out);
        let mut total = Payoff::ZERO;
        for (&a, &p) in node.moves.iter().zip(&node.prob) {
            total.add_scaled(value[a], p);
        }
        self.scratch.values.push(value);
        self.scratch.tracked.push(tracked);
        self.sync_probs(i);
        if let Some(t) = self.trace.as_mut() {
            t.push(i);
        }
        Ok((adjusted + 1, total))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;
    use crate::game::{GameBuilder, Payoff};
    use rand::rngs::mock::StepRng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn node(prob: &[f64], mom: &[f64], w: f64) -> TreeNode {
        TreeNode {
            moves: (0..prob.len()).collect(),
            prob: prob.to_vec(),
            mom: mom.to_vec(),
            w,
        }
    }

    #[test]
    fn momentum_worked_example() {
        let mut n = node(&[0.5, 0.5], &[0.0, 0.0], 0.0);
        adjust_node(&mut n, &[0.2, -0.2]);
        assert_eq!(n.mom, vec![0.2, -0.2]);
        assert_eq!(n.w, 0.4);
        assert_eq!(n.prob, vec![1.0, 0.0]);
    }

    #[test]
    fn zero_assessment_reapplies_momentum() {
        let mut n = node(&[0.3, 0.7], &[0.1, -0.05], 0.5);
        adjust_node(&mut n, &[0.0, 0.0]);
        assert_eq!((n.mom.clone(), n.w), (vec![0.1, -0.05], 0.5));
        let pre = [0.3 + 0.1 / 0.5, 0.7 - 0.05 / 0.5];
        let s = pre[0] + pre[1];
        assert_eq!(n.prob, vec![pre[0] / s, pre[1] / s]);
        // Once the momentum has pushed the mixture to a vertex it stays there.
        let mut n = node(&[0.5, 0.5], &[0.0, 0.0], 0.0);
        adjust_node(&mut n, &[0.2, -0.2]);
        let once = n.clone();
        adjust_node(&mut n, &[0.0, 0.0]);
        assert_eq!(n.prob, once.prob);
    }

    #[test]
    fn all_zero_falls_back_to_uniform() {
        let mut n = node(&[1.0, 0.0], &[-2.0, 0.0], 2.0);
        adjust_node(&mut n, &[0.0, 0.0]);
        assert_eq!(n.prob, vec![0.5, 0.5]);
    }

    #[test]
    fn zero_weight_leaves_probabilities() {
        let mut n = node(&[0.25, 0.75], &[0.0, 0.0], 0.0);
        adjust_node(&mut n, &[0.0, 0.0]);
        assert_eq!(n.prob, vec![0.25, 0.75]);
    }

    /// Leader L0 (2 moves) -> leader L1 (2 moves) -> terminals.
    fn two_level() -> ExtensiveGame {
        let mut b: GameBuilder<String> = GameBuilder::new();
        let root = b.decision(Some(Player::Leader), "L0".into(), &labels(2));
        let mut kids = Vec::new();
        for i in 0..2 {
            let l = b.decision(Some(Player::Leader), format!("L1.{i}"), &labels(2));
            let t: Vec<_> = (0..2).map(|j| b.terminal(Payoff::new((i + j) as f64, 0.0))).collect();
            b.set_children(l, t);
            kids.push(l);
        }
        b.set_children(root, kids);
        b.build(root).unwrap()
    }

    #[test]
    fn children_are_adjusted_before_parents() {
        let g = two_level();
        let pi = FollowerPureStrategy::new();
        let mut t = StrategyTree::new(&g, pi.clone(), 0.0).unwrap();
        t.set_chain(&[(0, 0), (1, 0)]);
        t.trace = Some(Vec::new());
        t.pass(PassKind::Positive, &pi, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let l0 = g.infoset_of(0).unwrap();
        let l1 = g.infoset_of(1).unwrap();
        assert_eq!(t.trace.unwrap(), vec![l1, l0]);
    }

    #[test]
    fn forced_expansion_adds_one_move() {
        let g = one_move(Payoff::new(0.0, 0.0), Payoff::new(1.0, 0.0));
        let pi = FollowerPureStrategy::new();
        let mut t = StrategyTree::new(&g, pi.clone(), 0.3).unwrap();
        t.set_chain(&[(0, 0)]);
        // A zero-valued rng draws below every probability.
        let mut rng = StepRng::new(0, 0);
        t.pass(PassKind::Positive, &pi, &mut rng).unwrap();
        let n = t.node(0).unwrap();
        assert_eq!(n.moves, vec![0, 1]);
        assert!((n.prob.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // The new move is worth 1 against 0, so it gains mass at once.
        assert!(n.prob[1] > 0.0);
        // Full node: nothing more to expand.
        t.pass(PassKind::Positive, &pi, &mut rng).unwrap();
        assert_eq!(t.node(0).unwrap().moves.len(), 2);
    }
}
