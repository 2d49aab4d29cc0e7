//! Two-player extensive-form games with imperfect information.
//!
//! An [`ExtensiveGame`] is an immutable, array-backed game tree. Nodes are
//! addressed by dense ids assigned in construction order and information sets
//! by dense ids shared between both players (each set records its owner).
//! Games are built with [`GameBuilder`], loaded from the JSON format in
//! [`json`], or generated by [`crate::suite`].
//!
//! Construction only rejects dangling references. Everything else (tree
//! shape, ownership, perfect recall) is reported by [`validate_game`] so that
//! malformed inputs can be inspected rather than refused.

mod enumerate;
pub mod json;
mod strategy;
mod utility;
mod validate;

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub use enumerate::{
    enumerate_follower_pure_strategies, enumerate_pure_strategies, PlayerSequences,
    PureStrategies,
};
pub use strategy::{FollowerPureStrategy, LeaderBehaviorStrategy, PureStrategy};
pub use utility::{
    conditional_expected_utilities, descend, expected_utilities, leader_best_response,
    subtree_utilities, Landing,
};
pub use validate::{validate_game, Violation};

use crate::error::GameError;

pub type NodeId = usize;
pub type InfosetId = usize;
pub type ActionId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Leader,
    Follower,
}

impl Player {
    pub fn index(self) -> usize {
        match self {
            Player::Leader => 0,
            Player::Follower => 1,
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::Leader => Player::Follower,
            Player::Follower => Player::Leader,
        }
    }
}

/// Terminal utilities for both players.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Payoff {
    pub leader: f64,
    pub follower: f64,
}

impl Payoff {
    pub const ZERO: Payoff = Payoff { leader: 0.0, follower: 0.0 };

    pub fn new(leader: f64, follower: f64) -> Self {
        Payoff { leader, follower }
    }

    pub fn get(&self, player: Player) -> f64 {
        match player {
            Player::Leader => self.leader,
            Player::Follower => self.follower,
        }
    }

    pub fn scaled(self, w: f64) -> Payoff {
        Payoff::new(self.leader * w, self.follower * w)
    }

    pub fn add_scaled(&mut self, other: Payoff, w: f64) {
        self.leader += other.leader * w;
        self.follower += other.follower * w;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    /// `owner` is `None` only for malformed input (e.g. a chance node), which
    /// the validator rejects.
    Decision {
        owner: Option<Player>,
        infoset: InfosetId,
        labels: usize,
        children: Vec<NodeId>,
    },
    Terminal(Payoff),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub parent: Option<NodeId>,
    pub kind: NodeKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Infoset {
    /// Owner of the first member state.
    pub owner: Option<Player>,
    pub num_actions: usize,
    pub states: Vec<NodeId>,
    pub name: String,
}

/// Last own `(infoset, action)` of a player on the path from the root.
pub type Sequence = Option<(InfosetId, ActionId)>;

#[derive(Clone, Debug)]
pub struct ExtensiveGame {
    nodes: Vec<Node>,
    root: NodeId,
    infosets: Vec<Infoset>,
    label_sets: Vec<Vec<String>>,
    /// Per node: last leader and follower sequence strictly above the node.
    prev_seq: Vec<[Sequence; 2]>,
    depth: Vec<u32>,
}

impl ExtensiveGame {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn infosets(&self) -> &[Infoset] {
        &self.infosets
    }

    pub fn infoset(&self, id: InfosetId) -> &Infoset {
        &self.infosets[id]
    }

    pub fn num_infosets(&self) -> usize {
        self.infosets.len()
    }

    pub fn player_infosets(&self, player: Player) -> impl Iterator<Item = InfosetId> + '_ {
        self.infosets
            .iter()
            .enumerate()
            .filter(move |(_, i)| i.owner == Some(player))
            .map(|(id, _)| id)
    }

    pub fn is_terminal(&self, id: NodeId) -> bool {
        matches!(self.nodes[id].kind, NodeKind::Terminal(_))
    }

    pub fn owner(&self, id: NodeId) -> Option<Player> {
        match self.nodes[id].kind {
            NodeKind::Decision { owner, .. } => owner,
            NodeKind::Terminal(_) => None,
        }
    }

    pub fn infoset_of(&self, id: NodeId) -> Option<InfosetId> {
        match self.nodes[id].kind {
            NodeKind::Decision { infoset, .. } => Some(infoset),
            NodeKind::Terminal(_) => None,
        }
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        match &self.nodes[id].kind {
            NodeKind::Decision { children, .. } => children,
            NodeKind::Terminal(_) => &[],
        }
    }

    pub fn child(&self, id: NodeId, action: ActionId) -> NodeId {
        self.children(id)[action]
    }

    pub fn payoff(&self, id: NodeId) -> Option<Payoff> {
        match self.nodes[id].kind {
            NodeKind::Terminal(p) => Some(p),
            NodeKind::Decision { .. } => None,
        }
    }

    pub fn action_labels(&self, id: NodeId) -> &[String] {
        match self.nodes[id].kind {
            NodeKind::Decision { labels, .. } => &self.label_sets[labels],
            NodeKind::Terminal(_) => &[],
        }
    }

    pub fn infoset_action_labels(&self, infoset: InfosetId) -> &[String] {
        self.action_labels(self.infosets[infoset].states[0])
    }

    /// Last own sequence of `player` strictly above `id`.
    pub fn prev_sequence(&self, id: NodeId, player: Player) -> Sequence {
        self.prev_seq[id][player.index()]
    }

    pub fn depth(&self, id: NodeId) -> u32 {
        self.depth[id]
    }

    /// Smallest and largest leader terminal utility.
    pub fn leader_utility_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for n in &self.nodes {
            if let NodeKind::Terminal(p) = n.kind {
                lo = lo.min(p.leader);
                hi = hi.max(p.leader);
            }
        }
        (lo, hi)
    }

    /// Whether every follower choice on the root path of `id` agrees with `follower`.
    pub fn consistent_with(&self, id: NodeId, follower: &PureStrategy) -> bool {
        let mut cur = id;
        while let Some(parent) = self.nodes[cur].parent {
            if let NodeKind::Decision {
                owner: Some(Player::Follower),
                infoset,
                children,
                ..
            } = &self.nodes[parent].kind
            {
                let action = children.iter().position(|&c| c == cur);
                if follower.choice(*infoset) != action {
                    return false;
                }
            }
            cur = parent;
        }
        true
    }

    /// Own `(infoset, action)` history of `player` from the root down to `id`.
    pub fn own_history(&self, id: NodeId, player: Player) -> Vec<(InfosetId, ActionId)> {
        let mut out = Vec::new();
        let mut cur = self.prev_seq[id][player.index()];
        while let Some((infoset, action)) = cur {
            out.push((infoset, action));
            let first = self.infosets[infoset].states[0];
            cur = self.prev_seq[first][player.index()];
        }
        out.reverse();
        out
    }

    /// Applies `f` to every terminal utility.
    pub fn map_payoffs(&self, mut f: impl FnMut(Payoff) -> Payoff) -> ExtensiveGame {
        let mut game = self.clone();
        for n in &mut game.nodes {
            if let NodeKind::Terminal(p) = &mut n.kind {
                *p = f(*p);
            }
        }
        game
    }
}

/// Incremental construction of an [`ExtensiveGame`].
///
/// Nodes are created first and wired with [`GameBuilder::set_children`];
/// information sets are keyed by any hashable value and assigned dense ids in
/// first-use order.
#[derive(Debug, Default)]
pub struct GameBuilder<K = String> {
    nodes: Vec<PendingNode>,
    infoset_keys: HashMap<K, InfosetId>,
    infoset_names: Vec<String>,
    label_sets: Vec<Vec<String>>,
    label_index: HashMap<Vec<String>, usize>,
}

#[derive(Debug)]
enum PendingNode {
    Decision {
        owner: Option<Player>,
        infoset: InfosetId,
        labels: usize,
        children: Vec<NodeId>,
    },
    Terminal(Payoff),
}

impl<K: std::hash::Hash + Eq + std::fmt::Debug> GameBuilder<K> {
    pub fn new() -> Self {
        GameBuilder {
            nodes: Vec::new(),
            infoset_keys: HashMap::new(),
            infoset_names: Vec::new(),
            label_sets: Vec::new(),
            label_index: HashMap::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn intern_labels(&mut self, labels: &[String]) -> usize {
        if let Some(&id) = self.label_index.get(labels) {
            return id;
        }
        let id = self.label_sets.len();
        self.label_sets.push(labels.to_vec());
        self.label_index.insert(labels.to_vec(), id);
        id
    }

    pub fn infoset_id(&mut self, key: K) -> InfosetId {
        let next = self.infoset_names.len();
        let names = &mut self.infoset_names;
        *self.infoset_keys.entry(key).or_insert_with_key(|k| {
            names.push(format!("{k:?}"));
            next
        })
    }

    /// Adds a decision node with children left unset.
    pub fn decision(&mut self, owner: Option<Player>, key: K, labels: &[String]) -> NodeId {
        let infoset = self.infoset_id(key);
        let labels = self.intern_labels(labels);
        self.decision_with_ids(owner, infoset, labels)
    }

    pub fn decision_with_ids(
        &mut self,
        owner: Option<Player>,
        infoset: InfosetId,
        labels: usize,
    ) -> NodeId {
        self.nodes.push(PendingNode::Decision {
            owner,
            infoset,
            labels,
            children: Vec::new(),
        });
        self.nodes.len() - 1
    }

    pub fn terminal(&mut self, payoff: Payoff) -> NodeId {
        self.nodes.push(PendingNode::Terminal(payoff));
        self.nodes.len() - 1
    }

    pub fn set_children(&mut self, node: NodeId, kids: Vec<NodeId>) {
        if let PendingNode::Decision { children, .. } = &mut self.nodes[node] {
            *children = kids;
        }
    }

    pub fn push_child(&mut self, node: NodeId, child: NodeId) {
        if let PendingNode::Decision { children, .. } = &mut self.nodes[node] {
            children.push(child);
        }
    }

    pub fn rename_infoset(&mut self, id: InfosetId, name: String) {
        self.infoset_names[id] = name;
    }

    pub fn build(self, root: NodeId) -> Result<ExtensiveGame, GameError> {
        let n = self.nodes.len();
        if root >= n {
            return Err(GameError::DanglingNode(root));
        }
        let mut nodes: Vec<Node> = Vec::with_capacity(n);
        for pending in self.nodes {
            let kind = match pending {
                PendingNode::Decision {
                    owner,
                    infoset,
                    labels,
                    children,
                } => {
                    if let Some(&bad) = children.iter().find(|&&c| c >= n) {
                        return Err(GameError::DanglingNode(bad));
                    }
                    NodeKind::Decision {
                        owner,
                        infoset,
                        labels,
                        children,
                    }
                }
                PendingNode::Terminal(p) => NodeKind::Terminal(p),
            };
            nodes.push(Node { parent: None, kind });
        }
        // First parent wins; extra parents are reported by the validator.
        for id in 0..n {
            let kids: Vec<NodeId> = nodes[id].children_ids().to_vec();
            for c in kids {
                if nodes[c].parent.is_none() && c != root {
                    nodes[c].parent = Some(id);
                }
            }
        }
        let mut infosets: Vec<Infoset> = self
            .infoset_names
            .into_iter()
            .map(|name| Infoset {
                owner: None,
                num_actions: 0,
                states: Vec::new(),
                name,
            })
            .collect();
        for (id, node) in nodes.iter().enumerate() {
            if let NodeKind::Decision {
                owner,
                infoset,
                children,
                ..
            } = &node.kind
            {
                let set = &mut infosets[*infoset];
                if set.states.is_empty() {
                    set.owner = *owner;
                    set.num_actions = children.len();
                }
                set.states.push(id);
            }
        }
        let mut game = ExtensiveGame {
            nodes,
            root,
            infosets,
            label_sets: self.label_sets,
            prev_seq: vec![[None, None]; n],
            depth: vec![0; n],
        };
        game.compute_sequences();
        Ok(game)
    }
}

impl Node {
    fn children_ids(&self) -> &[NodeId] {
        match &self.kind {
            NodeKind::Decision { children, .. } => children,
            NodeKind::Terminal(_) => &[],
        }
    }
}

impl ExtensiveGame {
    fn compute_sequences(&mut self) {
        let mut visited = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        visited[self.root] = true;
        while let Some(id) = stack.pop() {
            let seq = self.prev_seq[id];
            let depth = self.depth[id];
            if let NodeKind::Decision {
                owner,
                infoset,
                children,
                ..
            } = &self.nodes[id].kind
            {
                for (a, &c) in children.iter().enumerate() {
                    if visited[c] || self.nodes[c].parent != Some(id) {
                        continue;
                    }
                    visited[c] = true;
                    let mut s = seq;
                    if let Some(p) = owner {
                        s[p.index()] = Some((*infoset, a));
                    }
                    self.prev_seq[c] = s;
                    self.depth[c] = depth + 1;
                    stack.push(c);
                }
            }
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("a{i}")).collect()
    }

    /// Leader picks between two terminals.
    pub fn one_move(left: Payoff, right: Payoff) -> ExtensiveGame {
        let mut b = GameBuilder::new();
        let root = b.decision(Some(Player::Leader), "L0".to_string(), &labels(2));
        let l = b.terminal(left);
        let r = b.terminal(right);
        b.set_children(root, vec![l, r]);
        b.build(root).unwrap()
    }

    /// Leader moves first (2 actions, unobserved), follower answers (2 actions).
    /// `u[i][j]` is the payoff for leader action `i` and follower action `j`.
    pub fn matrix_game(u: [[Payoff; 2]; 2]) -> ExtensiveGame {
        let mut b = GameBuilder::new();
        let root = b.decision(Some(Player::Leader), "L".to_string(), &labels(2));
        let mut kids = Vec::new();
        for row in u {
            let f = b.decision(Some(Player::Follower), "F".to_string(), &labels(2));
            let t0 = b.terminal(row[0]);
            let t1 = b.terminal(row[1]);
            b.set_children(f, vec![t0, t1]);
            kids.push(f);
        }
        b.set_children(root, kids);
        b.build(root).unwrap()
    }

    /// Two-level game with a follower decision that is skipped after one of
    /// its own earlier moves: F0 -> {a0: leader L0 -> F1 (2 actions), a1: terminal}.
    pub fn nested_follower() -> ExtensiveGame {
        let mut b = GameBuilder::new();
        let root = b.decision(Some(Player::Follower), "F0".to_string(), &labels(2));
        let l = b.decision(Some(Player::Leader), "L0".to_string(), &labels(2));
        let stop = b.terminal(Payoff::new(0.5, 0.5));
        b.set_children(root, vec![l, stop]);
        let mut kids = Vec::new();
        for i in 0..2 {
            let f = b.decision(Some(Player::Follower), "F1".to_string(), &labels(2));
            let t0 = b.terminal(Payoff::new(i as f64, 1.0 - i as f64));
            let t1 = b.terminal(Payoff::new(1.0 - i as f64, i as f64 * 0.5));
            b.set_children(f, vec![t0, t1]);
            kids.push(f);
        }
        b.set_children(l, kids);
        b.build(root).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn builder_assigns_parents_and_sequences() {
        let g = nested_follower();
        assert_eq!(g.root(), 0);
        assert_eq!(g.node(0).parent, None);
        let f1_states = &g.infoset(g.infoset_of(3).unwrap()).states;
        assert_eq!(f1_states.len(), 2);
        for &s in f1_states {
            assert_eq!(g.prev_sequence(s, Player::Follower), Some((0, 0)));
            assert_eq!(g.own_history(s, Player::Follower), vec![(0, 0)]);
        }
        assert_eq!(g.depth(3), 2);
    }

    #[test]
    fn dangling_child_is_rejected() {
        let mut b: GameBuilder<String> = GameBuilder::new();
        let root = b.decision(Some(Player::Leader), "x".into(), &labels(1));
        b.set_children(root, vec![7]);
        assert!(matches!(b.build(root), Err(GameError::DanglingNode(7))));
    }

    #[test]
    fn utility_bounds_cover_terminals() {
        let g = one_move(Payoff::new(-1.0, 0.0), Payoff::new(2.0, 0.0));
        assert_eq!(g.leader_utility_bounds(), (-1.0, 2.0));
    }
}
