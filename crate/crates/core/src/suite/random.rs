//! Random small games with perfect recall, for tests and sanity campaigns.
//!
//! Each decision node gets a random owner. Its information set is keyed by the
//! owner's own `(infoset, action)` history plus a random observation class, so
//! perfect recall holds by construction while states with different opponent
//! histories still share sets.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::game::{ActionId, ExtensiveGame, GameBuilder, InfosetId, NodeId, Payoff, Player};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomGameConfig {
    /// Decision levels below the root; leaves sit at depth `max_depth` at most.
    pub max_depth: usize,
    pub min_actions: usize,
    pub max_actions: usize,
    /// Chance that a non-root node below depth 1 is a terminal.
    pub terminal_prob: f64,
    /// Observation classes per own history; 1 hides the opponent completely.
    pub observations: usize,
    pub zero_sum: bool,
    /// Resample until the game has at most this many nodes.
    pub max_nodes: usize,
}

impl Default for RandomGameConfig {
    fn default() -> Self {
        RandomGameConfig {
            max_depth: 4,
            min_actions: 2,
            max_actions: 3,
            terminal_prob: 0.25,
            observations: 2,
            zero_sum: false,
            max_nodes: 2000,
        }
    }
}

type Key = (Player, Vec<(InfosetId, ActionId)>, usize);

struct Gen<'a, R> {
    cfg: &'a RandomGameConfig,
    rng: &'a mut R,
    b: GameBuilder<Key>,
    actions: HashMap<InfosetId, usize>,
    labels: Vec<Vec<String>>,
}

impl<R: Rng> Gen<'_, R> {
    fn payoff(&mut self) -> Payoff {
        let l = (self.rng.gen_range(-1.0..=1.0f64) * 100.0).round() / 100.0;
        let f = if self.cfg.zero_sum {
            -l
        } else {
            (self.rng.gen_range(-1.0..=1.0f64) * 100.0).round() / 100.0
        };
        Payoff::new(l, f)
    }

    fn node(&mut self, depth: usize, hist: &mut [Vec<(InfosetId, ActionId)>; 2]) -> NodeId {
        let leaf = depth == self.cfg.max_depth
            || (depth > 1 && self.rng.gen_bool(self.cfg.terminal_prob));
        if leaf {
            let p = self.payoff();
            return self.b.terminal(p);
        }
        let owner = if self.rng.gen_bool(0.5) { Player::Leader } else { Player::Follower };
        let obs = self.rng.gen_range(0..self.cfg.observations.max(1));
        let key = (owner, hist[owner.index()].clone(), obs);
        let infoset = self.b.infoset_id(key);
        let k = match self.actions.get(&infoset) {
            Some(&k) => k,
            None => {
                let k = self.rng.gen_range(self.cfg.min_actions..=self.cfg.max_actions);
                self.actions.insert(infoset, k);
                k
            }
        };
        let labels = self.b.intern_labels(&self.labels[k]);
        let id = self.b.decision_with_ids(Some(owner), infoset, labels);
        let mut kids = Vec::with_capacity(k);
        for a in 0..k {
            hist[owner.index()].push((infoset, a));
            kids.push(self.node(depth + 1, hist));
            hist[owner.index()].pop();
        }
        self.b.set_children(id, kids);
        id
    }
}

/// Draws a random game; retries until the node limit is met.
pub fn random_game(cfg: &RandomGameConfig, rng: &mut impl Rng) -> ExtensiveGame {
    assert!(cfg.min_actions >= 1 && cfg.min_actions <= cfg.max_actions);
    let labels: Vec<Vec<String>> = (0..=cfg.max_actions)
        .map(|k| (0..k).map(|a| format!("m{a}")).collect())
        .collect();
    loop {
        let mut gen = Gen {
            cfg,
            rng: &mut *rng,
            b: GameBuilder::new(),
            actions: HashMap::new(),
            labels: labels.clone(),
        };
        let root = gen.node(0, &mut [Vec::new(), Vec::new()]);
        if gen.b.num_nodes() <= cfg.max_nodes {
            return gen.b.build(root).expect("generated ids are dense");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::validate_game;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_games_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..50 {
            let g = random_game(&RandomGameConfig::default(), &mut rng);
            assert!(g.num_nodes() <= 2000);
            assert_eq!(validate_game(&g), vec![]);
        }
    }

    #[test]
    fn zero_sum_flag_negates_payoffs() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = RandomGameConfig { zero_sum: true, ..Default::default() };
        let g = random_game(&cfg, &mut rng);
        for id in 0..g.num_nodes() {
            if let Some(p) = g.payoff(id) {
                assert_eq!(p.leader, -p.follower);
            }
        }
    }
}
