use std::collections::HashMap;

use super::{ActionId, ExtensiveGame, InfosetId, Player, PureStrategy};

/// The forest of a player's own sequences: which of the player's information
/// sets follow directly after each of their `(infoset, action)` pairs.
///
/// Built from the last own sequence above each infoset's states, which perfect
/// recall makes identical across the members of an infoset.
#[derive(Clone, Debug)]
pub struct PlayerSequences {
    pub player: Player,
    pub roots: Vec<InfosetId>,
    next: HashMap<(InfosetId, ActionId), Vec<InfosetId>>,
    num_actions: HashMap<InfosetId, usize>,
}

impl PlayerSequences {
    pub fn new(game: &ExtensiveGame, player: Player) -> Self {
        let mut roots = Vec::new();
        let mut next: HashMap<(InfosetId, ActionId), Vec<InfosetId>> = HashMap::new();
        let mut num_actions = HashMap::new();
        for id in game.player_infosets(player) {
            let set = game.infoset(id);
            num_actions.insert(id, set.num_actions);
            match game.prev_sequence(set.states[0], player) {
                None => roots.push(id),
                Some(seq) => next.entry(seq).or_default().push(id),
            }
        }
        PlayerSequences {
            player,
            roots,
            next,
            num_actions,
        }
    }

    pub fn next(&self, infoset: InfosetId, action: ActionId) -> &[InfosetId] {
        self.next
            .get(&(infoset, action))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn num_actions(&self, infoset: InfosetId) -> usize {
        self.num_actions.get(&infoset).copied().unwrap_or(0)
    }

    /// Number of restricted pure strategies, by the product/sum recursion over
    /// the sequence forest (saturating).
    pub fn count(&self) -> u128 {
        fn count_at(seqs: &PlayerSequences, infoset: InfosetId) -> u128 {
            (0..seqs.num_actions(infoset))
                .map(|a| {
                    seqs.next(infoset, a)
                        .iter()
                        .fold(1u128, |acc, &j| acc.saturating_mul(count_at(seqs, j)))
                })
                .fold(0u128, u128::saturating_add)
        }
        self.roots
            .iter()
            .fold(1u128, |acc, &r| acc.saturating_mul(count_at(self, r)))
    }
}

/// Lazily enumerates restricted pure strategies of one player.
///
/// Each yielded plan is a set of `(infoset, action)` decisions; the iterator
/// advances like an odometer over the most recent decision that still has an
/// untried action and completes the rest of the plan with first actions.
pub struct PureStrategies {
    seqs: PlayerSequences,
    frames: Vec<Frame>,
    started: bool,
    done: bool,
}

struct Frame {
    infoset: InfosetId,
    action: ActionId,
    /// Agenda remaining after this infoset was taken off it.
    pending: Vec<InfosetId>,
}

impl PureStrategies {
    pub fn new(seqs: PlayerSequences) -> Self {
        PureStrategies {
            seqs,
            frames: Vec::new(),
            started: false,
            done: false,
        }
    }

    fn complete(&mut self, mut pending: Vec<InfosetId>) {
        while let Some(infoset) = pending.pop() {
            self.frames.push(Frame {
                infoset,
                action: 0,
                pending: pending.clone(),
            });
            pending.extend(self.seqs.next(infoset, 0).iter().rev());
        }
    }

    fn current(&self) -> PureStrategy {
        PureStrategy::from_pairs(self.frames.iter().map(|f| (f.infoset, f.action)))
    }
}

impl Iterator for PureStrategies {
    type Item = PureStrategy;

    fn next(&mut self) -> Option<PureStrategy> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.seqs.roots.iter().any(|&r| self.seqs.num_actions(r) == 0) {
                self.done = true;
                return None;
            }
            let mut roots = self.seqs.roots.clone();
            roots.reverse();
            self.complete(roots);
            return Some(self.current());
        }
        while let Some(frame) = self.frames.last_mut() {
            if frame.action + 1 < self.seqs.num_actions(frame.infoset) {
                frame.action += 1;
                let mut pending = frame.pending.clone();
                pending.extend(self.seqs.next(frame.infoset, frame.action).iter().rev());
                self.complete(pending);
                return Some(self.current());
            }
            self.frames.pop();
        }
        self.done = true;
        None
    }
}

pub fn enumerate_pure_strategies(game: &ExtensiveGame, player: Player) -> PureStrategies {
    PureStrategies::new(PlayerSequences::new(game, player))
}

pub fn enumerate_follower_pure_strategies(game: &ExtensiveGame) -> PureStrategies {
    enumerate_pure_strategies(game, Player::Follower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;
    use crate::game::{GameBuilder, Payoff};
    use std::collections::HashSet;

    #[test]
    fn single_infoset_with_three_actions() {
        let mut b = GameBuilder::new();
        let root = b.decision(Some(Player::Follower), "F".to_string(), &labels(3));
        let kids = (0..3).map(|_| b.terminal(Payoff::ZERO)).collect();
        b.set_children(root, kids);
        let g = b.build(root).unwrap();
        assert_eq!(enumerate_follower_pure_strategies(&g).count(), 3);
    }

    #[test]
    fn sequential_infosets_multiply() {
        // F0 (2 actions) -> both lead to F1 (2 actions).
        let mut b = GameBuilder::new();
        let root = b.decision(Some(Player::Follower), "F0".to_string(), &labels(2));
        let mut kids = Vec::new();
        for i in 0..2 {
            let f = b.decision(Some(Player::Follower), format!("F1.{i}"), &labels(2));
            let t = (0..2).map(|_| b.terminal(Payoff::ZERO)).collect();
            b.set_children(f, t);
            kids.push(f);
        }
        b.set_children(root, kids);
        let g = b.build(root).unwrap();
        let all: HashSet<_> = enumerate_follower_pure_strategies(&g).collect();
        assert_eq!(all.len(), 4);
        assert_eq!(PlayerSequences::new(&g, Player::Follower).count(), 4);
        for s in &all {
            assert!(s.is_restricted_plan(&g, Player::Follower));
        }
    }

    #[test]
    fn restricted_plans_skip_unreachable_infosets() {
        let g = nested_follower();
        let plans: Vec<_> = enumerate_follower_pure_strategies(&g).collect();
        // a0 then F1 in {0, 1}, or a1 alone.
        assert_eq!(plans.len(), 3);
        assert_eq!(plans.iter().filter(|p| p.len() == 1).count(), 1);
    }

    #[test]
    fn no_follower_moves_yields_the_empty_plan() {
        let g = one_move(Payoff::ZERO, Payoff::ZERO);
        let plans: Vec<_> = enumerate_follower_pure_strategies(&g).collect();
        assert_eq!(plans, vec![PureStrategy::new()]);
    }
}
