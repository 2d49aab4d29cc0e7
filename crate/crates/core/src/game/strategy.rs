use serde::{Deserialize, Serialize};

use super::{ActionId, ExtensiveGame, InfosetId, Player};

/// Restricted pure strategy: one action per information set reachable given
/// the player's own earlier choices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<(InfosetId, ActionId)>", into = "Vec<(InfosetId, ActionId)>")]
pub struct PureStrategy {
    /// Indexed by infoset; never ends in `None`.
    choices: Vec<Option<ActionId>>,
}

pub type FollowerPureStrategy = PureStrategy;

impl PureStrategy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (InfosetId, ActionId)>) -> Self {
        let mut s = Self::new();
        for (i, a) in pairs {
            s.set(i, a);
        }
        s
    }

    #[inline]
    pub fn choice(&self, infoset: InfosetId) -> Option<ActionId> {
        self.choices.get(infoset).copied().flatten()
    }

    pub fn set(&mut self, infoset: InfosetId, action: ActionId) {
        if infoset >= self.choices.len() {
            self.choices.resize(infoset + 1, None);
        }
        self.choices[infoset] = Some(action);
    }

    pub fn len(&self) -> usize {
        self.choices.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (InfosetId, ActionId)> + '_ {
        self.choices
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.map(|a| (i, a)))
    }

    /// Checks the restricted-plan invariant for `player`: every entry is a
    /// legal action of a `player` infoset, and the domain is exactly the set of
    /// `player` infosets reachable given the plan's own choices.
    pub fn is_restricted_plan(&self, game: &ExtensiveGame, player: Player) -> bool {
        for (infoset, action) in self.iter() {
            let Some(set) = game.infosets().get(infoset) else {
                return false;
            };
            if set.owner != Some(player) || action >= set.num_actions {
                return false;
            }
        }
        // Reachable domain: infosets containing a state whose own-player
        // history is followed by this plan.
        let mut reachable = std::collections::BTreeSet::new();
        for (id, set) in game.infosets().iter().enumerate() {
            if set.owner != Some(player) {
                continue;
            }
            let history = game.own_history(set.states[0], player);
            if history.iter().all(|&(i, a)| self.choice(i) == Some(a)) {
                reachable.insert(id);
            }
        }
        reachable.len() == self.len() && reachable.iter().all(|&i| self.choice(i).is_some())
    }
}

impl From<Vec<(InfosetId, ActionId)>> for PureStrategy {
    fn from(v: Vec<(InfosetId, ActionId)>) -> Self {
        PureStrategy::from_pairs(v)
    }
}

impl From<PureStrategy> for Vec<(InfosetId, ActionId)> {
    fn from(s: PureStrategy) -> Self {
        s.iter().collect()
    }
}

/// Per-infoset action distributions for the leader, indexed by infoset id.
///
/// Entries for follower infosets and unspecified leader infosets are `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LeaderBehaviorStrategy {
    probs: Vec<Option<Vec<f64>>>,
}

impl LeaderBehaviorStrategy {
    /// An empty strategy sized for `game`.
    pub fn empty(game: &ExtensiveGame) -> Self {
        LeaderBehaviorStrategy {
            probs: vec![None; game.num_infosets()],
        }
    }

    /// Every leader infoset plays its first action.
    pub fn first_action(game: &ExtensiveGame) -> Self {
        let mut s = Self::empty(game);
        for i in game.player_infosets(Player::Leader) {
            let mut v = vec![0.0; game.infoset(i).num_actions];
            if let Some(first) = v.first_mut() {
                *first = 1.0;
            }
            s.probs[i] = Some(v);
        }
        s
    }

    pub fn uniform(game: &ExtensiveGame) -> Self {
        let mut s = Self::empty(game);
        for i in game.player_infosets(Player::Leader) {
            let k = game.infoset(i).num_actions;
            s.probs[i] = Some(vec![1.0 / k as f64; k]);
        }
        s
    }

    /// Deterministic strategy from a (possibly partial) pure strategy;
    /// infosets outside its domain play their first action.
    pub fn from_pure(game: &ExtensiveGame, pure: &PureStrategy) -> Self {
        let mut s = Self::first_action(game);
        for (i, a) in pure.iter() {
            if let Some(v) = s.probs.get_mut(i).and_then(|v| v.as_mut()) {
                v.iter_mut().for_each(|p| *p = 0.0);
                v[a] = 1.0;
            }
        }
        s
    }

    #[inline]
    pub fn get(&self, infoset: InfosetId) -> Option<&[f64]> {
        self.probs.get(infoset).and_then(|v| v.as_deref())
    }

    pub fn get_mut(&mut self, infoset: InfosetId) -> Option<&mut [f64]> {
        self.probs.get_mut(infoset).and_then(|v| v.as_deref_mut())
    }

    pub fn set(&mut self, infoset: InfosetId, probs: Vec<f64>) {
        if infoset >= self.probs.len() {
            self.probs.resize(infoset + 1, None);
        }
        self.probs[infoset] = Some(probs);
    }

    pub fn clear(&mut self, infoset: InfosetId) {
        if let Some(v) = self.probs.get_mut(infoset) {
            *v = None;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (InfosetId, &[f64])> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.as_deref().map(|v| (i, v)))
    }

    /// Largest deviation of any vector from a probability distribution.
    pub fn max_distribution_error(&self) -> f64 {
        self.iter()
            .map(|(_, v)| {
                let neg = v.iter().fold(0.0f64, |m, &p| m.max(-p));
                let sum: f64 = v.iter().sum();
                neg.max((sum - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Componentwise interpolation `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        let probs = self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => Some(
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| (1.0 - t) * x + t * y)
                        .collect(),
                ),
                _ => None,
            })
            .collect();
        LeaderBehaviorStrategy { probs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;

    #[test]
    fn pure_strategy_json_is_pair_list() {
        let s = PureStrategy::from_pairs([(3, 1), (0, 2)]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, "[[0,2],[3,1]]");
        let back: PureStrategy = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn restricted_plan_domain_follows_own_choices() {
        let g = nested_follower();
        let f0 = g.infoset_of(0).unwrap();
        let f1 = g.infoset_of(3).unwrap();
        assert!(PureStrategy::from_pairs([(f0, 1)]).is_restricted_plan(&g, Player::Follower));
        assert!(PureStrategy::from_pairs([(f0, 0), (f1, 1)]).is_restricted_plan(&g, Player::Follower));
        // F1 is unreachable after a1, and required after a0.
        assert!(!PureStrategy::from_pairs([(f0, 1), (f1, 0)]).is_restricted_plan(&g, Player::Follower));
        assert!(!PureStrategy::from_pairs([(f0, 0)]).is_restricted_plan(&g, Player::Follower));
        assert!(!PureStrategy::from_pairs([(f0, 5)]).is_restricted_plan(&g, Player::Follower));
    }

    #[test]
    fn behavior_defaults_are_distributions() {
        let g = nested_follower();
        assert_eq!(LeaderBehaviorStrategy::first_action(&g).max_distribution_error(), 0.0);
        assert!(LeaderBehaviorStrategy::uniform(&g).max_distribution_error() < 1e-12);
    }
}
