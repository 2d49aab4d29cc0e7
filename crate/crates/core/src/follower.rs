//! Follower best responses and the use-counted response cache.

use crate::error::GameError;
use crate::game::{
    enumerate_follower_pure_strategies, expected_utilities, ActionId, ExtensiveGame,
    FollowerPureStrategy, InfosetId, LeaderBehaviorStrategy, NodeKind, Payoff, Player,
    PlayerSequences,
};

pub const DEFAULT_CAPACITY: usize = 50;
pub const DEFAULT_EPS: f64 = 1e-2;

/// Exact follower best response by one sweep over the tree.
///
/// The sweep accumulates `leader reach * follower utility` of every terminal on
/// the follower sequence that ends directly above it; sequence values are then
/// resolved bottom-up over the follower's sequence forest, taking the lowest
/// action on ties.
#[derive(Clone, Debug)]
pub struct BestResponder {
    seqs: PlayerSequences,
    /// Follower infosets, successors first.
    order: Vec<InfosetId>,
    /// Offset of each follower infoset's actions in flat per-sequence arrays.
    offset: Vec<usize>,
    width: usize,
}

impl BestResponder {
    pub fn new(game: &ExtensiveGame) -> Self {
        let seqs = PlayerSequences::new(game, Player::Follower);
        // Post-order over the sequence forest: successors before their parent.
        let mut order = Vec::new();
        let mut stack: Vec<(InfosetId, bool)> = seqs.roots.iter().map(|&r| (r, false)).collect();
        while let Some((i, done)) = stack.pop() {
            if done {
                order.push(i);
                continue;
            }
            stack.push((i, true));
            for a in 0..seqs.num_actions(i) {
                stack.extend(seqs.next(i, a).iter().map(|&j| (j, false)));
            }
        }
        let mut offset = vec![usize::MAX; game.num_infosets()];
        let mut width = 0;
        for i in game.player_infosets(Player::Follower) {
            offset[i] = width;
            width += game.infoset(i).num_actions;
        }
        BestResponder {
            seqs,
            order,
            offset,
            width,
        }
    }

    /// A best response to `leader` and its expected follower utility.
    pub fn best_response(
        &self,
        game: &ExtensiveGame,
        leader: &LeaderBehaviorStrategy,
    ) -> Result<(FollowerPureStrategy, f64), GameError> {
        let mut direct = vec![0.0f64; self.width];
        let mut empty = 0.0f64;
        let mut stack = vec![(game.root(), 1.0f64, usize::MAX)];
        while let Some((id, w, seq)) = stack.pop() {
            match &game.node(id).kind {
                NodeKind::Terminal(p) => {
                    if seq == usize::MAX {
                        empty += w * p.follower;
                    } else {
                        direct[seq] += w * p.follower;
                    }
                }
                NodeKind::Decision { owner: Some(Player::Leader), infoset, children, .. } => {
                    let probs = leader
                        .get(*infoset)
                        .ok_or(GameError::MissingLeaderStrategy(*infoset))?;
                    for (&c, &p) in children.iter().zip(probs) {
                        if p > 0.0 {
                            stack.push((c, w * p, seq));
                        }
                    }
                }
                NodeKind::Decision { owner: Some(Player::Follower), infoset, children, .. } => {
                    let base = self.offset[*infoset];
                    for (a, &c) in children.iter().enumerate() {
                        stack.push((c, w, base + a));
                    }
                }
                NodeKind::Decision { owner: None, .. } => return Err(GameError::Ownerless(id)),
            }
        }
        let mut value = direct;
        let mut best = vec![(0usize, 0.0f64); game.num_infosets()];
        for &i in &self.order {
            let base = self.offset[i];
            let k = game.infoset(i).num_actions;
            let mut arg = (0, f64::NEG_INFINITY);
            for a in 0..k {
                let v = value[base + a]
                    + self.seqs.next(i, a).iter().map(|&j| best[j].1).sum::<f64>();
                value[base + a] = v;
                if v > arg.1 {
                    arg = (a, v);
                }
            }
            best[i] = arg;
        }
        let mut total = empty;
        let mut plan = FollowerPureStrategy::new();
        let mut agenda: Vec<InfosetId> = self.seqs.roots.clone();
        for &r in &self.seqs.roots {
            total += best[r].1;
        }
        while let Some(i) = agenda.pop() {
            let a = best[i].0;
            plan.set(i, a);
            agenda.extend_from_slice(self.seqs.next(i, a));
        }
        Ok((plan, total))
    }
}

/// Best response by evaluating every restricted pure strategy; the first
/// maximizer in enumeration order wins. `None` if the follower has no
/// strategies at all, which cannot happen for a valid game.
pub fn best_response_by_enumeration(
    game: &ExtensiveGame,
    leader: &LeaderBehaviorStrategy,
) -> Result<Option<(FollowerPureStrategy, Payoff)>, GameError> {
    let mut best: Option<(FollowerPureStrategy, Payoff)> = None;
    for pi in enumerate_follower_pure_strategies(game) {
        let u = expected_utilities(game, leader, &pi)?;
        if best.as_ref().is_none_or(|(_, b)| u.follower > b.follower) {
            best = Some((pi, u));
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CacheEntry {
    pub uses: u64,
    pub strategy: FollowerPureStrategy,
}

/// Up to `capacity` follower strategies that beat some earlier request, kept
/// in insertion order.
#[derive(Clone, Debug)]
pub struct OracleCache {
    entries: Vec<CacheEntry>,
    capacity: usize,
    eps: f64,
    /// Number of full best-response computations performed.
    pub full_computations: u64,
}

impl Default for OracleCache {
    fn default() -> Self {
        OracleCache::new(DEFAULT_CAPACITY, DEFAULT_EPS)
    }
}

impl OracleCache {
    pub fn new(capacity: usize, eps: f64) -> Self {
        OracleCache {
            entries: Vec::with_capacity(capacity),
            capacity: capacity.max(1),
            eps,
            full_computations: 0,
        }
    }

    pub fn entries(&self) -> &[CacheEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Inserts with use count 1, evicting the least used entry (oldest on
    /// ties) when full. Duplicates are ignored.
    pub fn evict_and_insert(&mut self, strategy: FollowerPureStrategy) {
        if self.entries.iter().any(|e| e.strategy == strategy) {
            log::warn!("strategy already cached");
            return;
        }
        if self.entries.len() >= self.capacity {
            let victim = self
                .entries
                .iter()
                .enumerate()
                .min_by_key(|(i, e)| (e.uses, *i))
                .map(|(i, _)| i)
                .expect("full cache is non-empty");
            self.entries.remove(victim);
        }
        self.entries.push(CacheEntry { uses: 1, strategy });
    }

    /// A follower strategy beating `requested` by more than `eps` against
    /// `leader`, or `None` if no such strategy exists.
    ///
    /// Cached entries are tried first in insertion order; on a miss the full
    /// best response is computed and cached.
    pub fn better_response(
        &mut self,
        game: &ExtensiveGame,
        responder: &BestResponder,
        leader: &LeaderBehaviorStrategy,
        requested: &FollowerPureStrategy,
    ) -> Result<Option<FollowerPureStrategy>, GameError> {
        let value = expected_utilities(game, leader, requested)?.follower;
        self.better_response_given(game, responder, leader, requested, value, None)
    }

    /// As [`OracleCache::better_response`], with the requested strategy's
    /// follower payoff already known, and optionally that of one more
    /// strategy.
    pub fn better_response_given(
        &mut self,
        game: &ExtensiveGame,
        responder: &BestResponder,
        leader: &LeaderBehaviorStrategy,
        requested: &FollowerPureStrategy,
        requested_value: f64,
        known: Option<(&FollowerPureStrategy, f64)>,
    ) -> Result<Option<FollowerPureStrategy>, GameError> {
        let target = requested_value + self.eps;
        for e in &mut self.entries {
            if e.strategy == *requested {
                continue;
            }
            let value = match known {
                Some((s, v)) if *s == e.strategy => v,
                _ => expected_utilities(game, leader, &e.strategy)?.follower,
            };
            if value > target {
                e.uses += 1;
                return Ok(Some(e.strategy.clone()));
            }
        }
        self.full_computations += 1;
        let (best, value) = responder.best_response(game, leader)?;
        let found = value > target && best != *requested;
        if !self.entries.iter().any(|e| e.strategy == best) {
            self.evict_and_insert(best.clone());
        }
        Ok(found.then_some(best))
    }
}

/// The follower choice per infoset, for diagnostics.
pub fn describe(game: &ExtensiveGame, strategy: &FollowerPureStrategy) -> Vec<(String, String)> {
    strategy
        .iter()
        .map(|(i, a): (InfosetId, ActionId)| {
            (game.infoset(i).name.clone(), game.infoset_action_labels(i)[a].clone())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;
    use crate::suite::random::{random_game, RandomGameConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_leader(game: &ExtensiveGame, rng: &mut impl Rng) -> LeaderBehaviorStrategy {
        let mut s = LeaderBehaviorStrategy::empty(game);
        for i in game.player_infosets(Player::Leader) {
            let mut v: Vec<f64> = (0..game.infoset(i).num_actions)
                .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen::<f64>() })
                .collect();
            if v.iter().all(|&p| p == 0.0) {
                v[0] = 1.0;
            }
            let sum: f64 = v.iter().sum();
            s.set(i, v.iter().map(|p| p / sum).collect());
        }
        s
    }

    #[test]
    fn sweep_matches_enumeration_on_random_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let g = random_game(&RandomGameConfig::default(), &mut rng);
            let leader = random_leader(&g, &mut rng);
            let (plan, value) = BestResponder::new(&g).best_response(&g, &leader).unwrap();
            assert!(plan.is_restricted_plan(&g, Player::Follower));
            let direct = expected_utilities(&g, &leader, &plan).unwrap().follower;
            assert!((direct - value).abs() < 1e-12);
            let (_, best) = best_response_by_enumeration(&g, &leader).unwrap().unwrap();
            assert!((best.follower - value).abs() < 1e-12, "{} vs {value}", best.follower);
        }
    }

    fn strat(i: usize) -> FollowerPureStrategy {
        FollowerPureStrategy::from_pairs([(0, i)])
    }

    #[test]
    fn insert_below_capacity_keeps_everything() {
        let mut c = OracleCache::new(3, 0.01);
        c.evict_and_insert(strat(0));
        c.evict_and_insert(strat(1));
        assert_eq!(c.len(), 2);
        c.evict_and_insert(strat(2));
        assert_eq!(c.len(), 3);
        c.evict_and_insert(strat(2));
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn eviction_prefers_least_used_then_oldest() {
        let mut c = OracleCache::new(3, 0.01);
        for i in 0..3 {
            c.evict_and_insert(strat(i));
        }
        c.entries[0].uses = 5;
        c.entries[2].uses = 3;
        c.evict_and_insert(strat(3));
        let kept: Vec<_> = c.entries().iter().map(|e| e.strategy.clone()).collect();
        assert_eq!(kept, vec![strat(0), strat(2), strat(3)]);

        let mut c = OracleCache::new(3, 0.01);
        for i in 0..4 {
            c.evict_and_insert(strat(i));
        }
        let kept: Vec<_> = c.entries().iter().map(|e| e.strategy.clone()).collect();
        assert_eq!(kept, vec![strat(1), strat(2), strat(3)]);
    }

    #[test]
    fn cache_hit_skips_full_computation() {
        // Leader plays row 0; follower column 1 is worth 0.5 more.
        let g = matrix_game([
            [Payoff::new(0.0, 0.0), Payoff::new(0.0, 0.5)],
            [Payoff::new(0.0, 0.0), Payoff::new(0.0, 0.0)],
        ]);
        let f = g.infoset_of(1).unwrap();
        let leader = LeaderBehaviorStrategy::first_action(&g);
        let responder = BestResponder::new(&g);
        let mut c = OracleCache::default();
        let better = FollowerPureStrategy::from_pairs([(f, 1)]);
        c.evict_and_insert(better.clone());
        let requested = FollowerPureStrategy::from_pairs([(f, 0)]);
        let got = c.better_response(&g, &responder, &leader, &requested).unwrap();
        assert_eq!(got, Some(better));
        assert_eq!(c.full_computations, 0);
        assert_eq!(c.entries()[0].uses, 2);
    }

    #[test]
    fn exact_ties_are_not_better() {
        let g = matrix_game([[Payoff::new(0.0, 0.3); 2]; 2]);
        let f = g.infoset_of(1).unwrap();
        let leader = LeaderBehaviorStrategy::uniform(&g);
        let mut c = OracleCache::default();
        let requested = FollowerPureStrategy::from_pairs([(f, 1)]);
        let got = c
            .better_response(&g, &BestResponder::new(&g), &leader, &requested)
            .unwrap();
        assert_eq!(got, None);
        assert_eq!(c.full_computations, 1);
    }
}
