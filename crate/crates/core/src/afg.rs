//! The auxiliary follower game (AFG).
//!
//! A one-player game whose state is a queue of follower information sets still
//! to be decided. Playing an action pops the front set and appends every
//! follower set that the action can lead to directly, for some leader play.
//! Root-to-leaf paths are exactly the follower's restricted pure strategies.

use std::collections::{HashMap, VecDeque};

use crate::error::AfgError;
use crate::game::{ActionId, ExtensiveGame, FollowerPureStrategy, InfosetId, NodeId, NodeKind, Player};

/// Count guard for [`count_leaves`].
pub const COUNT_GUARD: u64 = 10_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AfgState {
    pub queue: VecDeque<InfosetId>,
    pub path: Vec<(InfosetId, ActionId)>,
}

impl AfgState {
    pub fn is_terminal(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn front(&self) -> Option<InfosetId> {
        self.queue.front().copied()
    }
}

/// Successor tables of the auxiliary game of one extensive game.
#[derive(Clone, Debug)]
pub struct Afg {
    initial: Vec<InfosetId>,
    next: HashMap<(InfosetId, ActionId), Vec<InfosetId>>,
    num_actions: HashMap<InfosetId, usize>,
}

/// Follower infosets met first when descending from `start` through leader
/// decisions (all leader branches) and stopping at follower decisions.
fn first_follower_sets(game: &ExtensiveGame, start: NodeId, out: &mut Vec<InfosetId>) {
    let mut stack = vec![start];
    while let Some(id) = stack.pop() {
        match &game.node(id).kind {
            NodeKind::Terminal(_) => {}
            NodeKind::Decision { owner: Some(Player::Follower), infoset, .. } => out.push(*infoset),
            NodeKind::Decision { children, .. } => stack.extend(children.iter().copied()),
        }
    }
}

fn sorted_unique(mut v: Vec<InfosetId>) -> Vec<InfosetId> {
    v.sort_unstable();
    v.dedup();
    v
}

impl Afg {
    pub fn new(game: &ExtensiveGame) -> Self {
        let mut initial = Vec::new();
        first_follower_sets(game, game.root(), &mut initial);
        let mut next = HashMap::new();
        let mut num_actions = HashMap::new();
        for i in game.player_infosets(Player::Follower) {
            let set = game.infoset(i);
            num_actions.insert(i, set.num_actions);
            for a in 0..set.num_actions {
                let mut found = Vec::new();
                for &s in &set.states {
                    first_follower_sets(game, game.child(s, a), &mut found);
                }
                next.insert((i, a), sorted_unique(found));
            }
        }
        Afg {
            initial: sorted_unique(initial),
            next,
            num_actions,
        }
    }

    pub fn initial_state(&self) -> AfgState {
        AfgState {
            queue: self.initial.iter().copied().collect(),
            path: Vec::new(),
        }
    }

    /// Legal action count at the front of the queue, `None` when terminal.
    pub fn num_actions(&self, state: &AfgState) -> Option<usize> {
        state.front().map(|i| self.num_actions[&i])
    }

    /// Follower sets pushed after playing `action` in `infoset`.
    pub fn successors(&self, infoset: InfosetId, action: ActionId) -> &[InfosetId] {
        self.next.get(&(infoset, action)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn step(&self, state: &AfgState, action: ActionId) -> Result<AfgState, AfgError> {
        let mut next = state.clone();
        self.step_in_place(&mut next, action)?;
        Ok(next)
    }

    pub fn step_in_place(&self, state: &mut AfgState, action: ActionId) -> Result<(), AfgError> {
        let infoset = state.front().ok_or(AfgError::Terminal)?;
        if action >= self.num_actions[&infoset] {
            return Err(AfgError::IllegalAction { infoset, action });
        }
        state.queue.pop_front();
        state.path.push((infoset, action));
        for &j in self.successors(infoset, action) {
            if !state.queue.contains(&j) {
                state.queue.push_back(j);
            }
        }
        Ok(())
    }
}

pub fn initial_state(game: &ExtensiveGame) -> AfgState {
    Afg::new(game).initial_state()
}

pub fn step(game: &ExtensiveGame, state: &AfgState, action: ActionId) -> Result<AfgState, AfgError> {
    Afg::new(game).step(state, action)
}

pub fn path_to_strategy(state: &AfgState) -> Result<FollowerPureStrategy, AfgError> {
    if !state.is_terminal() {
        return Err(AfgError::NotTerminal);
    }
    Ok(FollowerPureStrategy::from_pairs(state.path.iter().copied()))
}

/// Visits every leaf of the auxiliary game in depth-first, ascending-action
/// order. Fails once more than `guard` nodes have been visited.
pub fn for_each_leaf(
    afg: &Afg,
    guard: u64,
    mut f: impl FnMut(&AfgState),
) -> Result<u64, AfgError> {
    let mut visited = 0u64;
    let mut stack = vec![afg.initial_state()];
    while let Some(state) = stack.pop() {
        visited += 1;
        if visited > guard {
            return Err(AfgError::GuardExceeded(guard));
        }
        match afg.num_actions(&state) {
            None => f(&state),
            Some(k) => {
                for a in (0..k).rev() {
                    stack.push(afg.step(&state, a)?);
                }
            }
        }
    }
    Ok(visited)
}

pub fn count_leaves(game: &ExtensiveGame) -> Result<u64, AfgError> {
    let mut leaves = 0;
    for_each_leaf(&Afg::new(game), COUNT_GUARD, |_| leaves += 1)?;
    Ok(leaves)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::game::fixtures::*;
    use crate::game::{GameBuilder, Payoff};

    /// The auxiliary-game example: follower set I1 (moves m1, m2); after m1
    /// the leader moves and the follower reaches I2 or I3; I2 has a move to a
    /// terminal `z`.
    pub fn figure_two() -> ExtensiveGame {
        let mut b: GameBuilder<String> = GameBuilder::new();
        let lab = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let root = b.decision(Some(Player::Follower), "I1".into(), &lab(&["m1", "m2"]));
        let l = b.decision(Some(Player::Leader), "L1".into(), &lab(&["l1", "l2"]));
        let z2 = b.terminal(Payoff::new(0.0, 0.0));
        b.set_children(root, vec![l, z2]);
        let i2 = b.decision(Some(Player::Follower), "I2".into(), &lab(&["m3", "m4"]));
        let i3 = b.decision(Some(Player::Follower), "I3".into(), &lab(&["m5", "m6"]));
        b.set_children(l, vec![i2, i3]);
        let z = b.terminal(Payoff::new(1.0, 0.2));
        let l2 = b.decision(Some(Player::Leader), "L2".into(), &lab(&["l3", "l4"]));
        b.set_children(i2, vec![z, l2]);
        let i4 = b.decision(Some(Player::Follower), "I4".into(), &lab(&["m7", "m8"]));
        let z3 = b.terminal(Payoff::new(0.5, 0.5));
        b.set_children(l2, vec![i4, z3]);
        let t: Vec<_> = (0..2).map(|k| b.terminal(Payoff::new(k as f64, 0.1))).collect();
        b.set_children(i4, t);
        let t: Vec<_> = (0..2).map(|k| b.terminal(Payoff::new(0.3, k as f64))).collect();
        b.set_children(i3, t);
        b.build(root).unwrap()
    }

    fn name(g: &ExtensiveGame, q: &VecDeque<InfosetId>) -> Vec<String> {
        q.iter().map(|&i| g.infoset(i).name.trim_matches('"').to_string()).collect()
    }

    #[test]
    fn queue_evolution_matches_figure() {
        let g = figure_two();
        let afg = Afg::new(&g);
        let s0 = afg.initial_state();
        assert_eq!(name(&g, &s0.queue), ["I1"]);
        let s1 = afg.step(&s0, 0).unwrap();
        assert_eq!(name(&g, &s1.queue), ["I2", "I3"]);
        let s2 = afg.step(&s1, 0).unwrap();
        assert_eq!(name(&g, &s2.queue), ["I3"]);
        let leaf = afg.step(&s2, 0).unwrap();
        assert!(leaf.is_terminal());
        let pi = path_to_strategy(&leaf).unwrap();
        assert_eq!(pi.iter().collect::<Vec<_>>(), vec![(0, 0), (2, 0), (3, 0)]);
        assert!(pi.is_restricted_plan(&g, Player::Follower));
    }

    #[test]
    fn errors_on_bad_steps() {
        let g = figure_two();
        let afg = Afg::new(&g);
        let s0 = afg.initial_state();
        assert!(matches!(afg.step(&s0, 5), Err(AfgError::IllegalAction { .. })));
        assert_eq!(path_to_strategy(&s0), Err(AfgError::NotTerminal));
        let done = afg.step(&s0, 1).unwrap();
        assert_eq!(afg.step(&done, 0), Err(AfgError::Terminal));
    }

    #[test]
    fn leaf_counts() {
        // I1: m2 -> 1 leaf; m1 -> I2 (m3: 1, m4: I4 x2) x I3 (2) = 3 * 2.
        assert_eq!(count_leaves(&figure_two()).unwrap(), 7);
        assert_eq!(count_leaves(&one_move(Payoff::ZERO, Payoff::ZERO)).unwrap(), 1);
        assert!(initial_state(&one_move(Payoff::ZERO, Payoff::ZERO)).is_terminal());
        assert_eq!(count_leaves(&nested_follower()).unwrap(), 3);
    }

    #[test]
    fn step_is_deterministic() {
        let g = figure_two();
        let s = initial_state(&g);
        assert_eq!(step(&g, &s, 0).unwrap(), step(&g, &s, 0).unwrap());
    }

    #[test]
    fn guard_stops_traversal() {
        let afg = Afg::new(&figure_two());
        assert_eq!(for_each_leaf(&afg, 3, |_| ()), Err(AfgError::GuardExceeded(3)));
    }
}
