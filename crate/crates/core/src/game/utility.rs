use super::{
    ActionId, ExtensiveGame, InfosetId, LeaderBehaviorStrategy, NodeId, NodeKind, Payoff, Player,
    PureStrategy,
};
use crate::error::GameError;

/// Expected utilities of a leader behavior strategy against a follower pure
/// strategy, by exact traversal of the tree.
pub fn expected_utilities(
    game: &ExtensiveGame,
    leader: &LeaderBehaviorStrategy,
    follower: &PureStrategy,
) -> Result<Payoff, GameError> {
    subtree_utilities(game, leader, follower, game.root())
}

/// Expected utilities of the subtree rooted at `state`.
///
/// Leader branches with probability zero are skipped, so missing strategy
/// entries below them are not errors.
pub fn subtree_utilities(
    game: &ExtensiveGame,
    leader: &LeaderBehaviorStrategy,
    follower: &PureStrategy,
    state: NodeId,
) -> Result<Payoff, GameError> {
    let mut total = Payoff::ZERO;
    let mut stack = vec![(state, 1.0f64)];
    while let Some((id, w)) = stack.pop() {
        match &game.node(id).kind {
            NodeKind::Terminal(p) => total.add_scaled(*p, w),
            NodeKind::Decision {
                owner: Some(Player::Leader),
                infoset,
                children,
                ..
            } => {
                let probs = leader
                    .get(*infoset)
                    .ok_or(GameError::MissingLeaderStrategy(*infoset))?;
                for (&c, &p) in children.iter().zip(probs) {
                    if p > 0.0 {
                        stack.push((c, w * p));
                    }
                }
            }
            NodeKind::Decision {
                owner: Some(Player::Follower),
                infoset,
                children,
                ..
            } => {
                let a = follower
                    .choice(*infoset)
                    .ok_or(GameError::MissingFollowerChoice(*infoset))?;
                let c = *children
                    .get(a)
                    .ok_or(GameError::IllegalAction { infoset: *infoset, action: a })?;
                stack.push((c, w));
            }
            NodeKind::Decision { owner: None, .. } => return Err(GameError::Ownerless(id)),
        }
    }
    Ok(total)
}

/// Where play lands after following a follower strategy from a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Landing {
    Leader(NodeId),
    Terminal(NodeId),
}

/// Follows `follower` through follower decisions until a leader decision or a
/// terminal is reached.
pub fn descend(
    game: &ExtensiveGame,
    mut state: NodeId,
    follower: &PureStrategy,
) -> Result<Landing, GameError> {
    loop {
        match &game.node(state).kind {
            NodeKind::Terminal(_) => return Ok(Landing::Terminal(state)),
            NodeKind::Decision {
                owner: Some(Player::Leader),
                ..
            } => return Ok(Landing::Leader(state)),
            NodeKind::Decision {
                owner: Some(Player::Follower),
                infoset,
                children,
                ..
            } => {
                let a = follower
                    .choice(*infoset)
                    .ok_or(GameError::MissingFollowerChoice(*infoset))?;
                state = *children
                    .get(a)
                    .ok_or(GameError::IllegalAction { infoset: *infoset, action: a })?;
            }
            NodeKind::Decision { owner: None, .. } => return Err(GameError::Ownerless(state)),
        }
    }
}

/// Expected utilities conditional on reaching `infoset` and playing `action`
/// there, with the rest of the leader strategy unchanged.
///
/// The conditioning averages over the member states consistent with
/// `follower`. Under perfect recall all members share the leader's own reach
/// probability, so only follower consistency matters for the weights, and
/// against a pure follower at most one member is consistent. Returns
/// `Ok(None)` when no member state is consistent with `follower`.
pub fn conditional_expected_utilities(
    game: &ExtensiveGame,
    leader: &LeaderBehaviorStrategy,
    follower: &PureStrategy,
    infoset: InfosetId,
    action: ActionId,
) -> Result<Option<Payoff>, GameError> {
    let set = game
        .infosets()
        .get(infoset)
        .ok_or(GameError::UnknownInfoset(infoset))?;
    if set.owner != Some(Player::Leader) {
        return Err(GameError::NotLeaderInfoset(infoset));
    }
    if action >= set.num_actions {
        return Err(GameError::IllegalAction { infoset, action });
    }
    let mut total = Payoff::ZERO;
    let mut count = 0usize;
    for &s in &set.states {
        if game.consistent_with(s, follower) {
            total.add_scaled(subtree_utilities(game, leader, follower, game.child(s, action))?, 1.0);
            count += 1;
        }
    }
    if count == 0 {
        return Ok(None);
    }
    Ok(Some(total.scaled(1.0 / count as f64)))
}

/// Best leader value obtainable from `state` against a fixed follower pure
/// strategy, with the leader decisions along the realized play (lowest action
/// id on ties).
pub fn leader_best_response(
    game: &ExtensiveGame,
    state: NodeId,
    follower: &PureStrategy,
) -> Result<(Payoff, Vec<(NodeId, ActionId)>), GameError> {
    fn value(
        game: &ExtensiveGame,
        state: NodeId,
        follower: &PureStrategy,
    ) -> Result<Payoff, GameError> {
        match descend(game, state, follower)? {
            Landing::Terminal(t) => Ok(game.payoff(t).unwrap_or_default()),
            Landing::Leader(s) => {
                let mut best: Option<Payoff> = None;
                for &c in game.children(s) {
                    let v = value(game, c, follower)?;
                    if best.is_none_or(|b| v.leader > b.leader) {
                        best = Some(v);
                    }
                }
                Ok(best.unwrap_or_default())
            }
        }
    }

    let mut path = Vec::new();
    let mut cur = state;
    loop {
        match descend(game, cur, follower)? {
            Landing::Terminal(t) => return Ok((game.payoff(t).unwrap_or_default(), path)),
            Landing::Leader(s) => {
                let mut best: Option<(ActionId, f64)> = None;
                for (a, &c) in game.children(s).iter().enumerate() {
                    let v = value(game, c, follower)?.leader;
                    if best.is_none_or(|(_, b)| v > b) {
                        best = Some((a, v));
                    }
                }
                let Some((a, _)) = best else {
                    return Err(GameError::Ownerless(s));
                };
                path.push((s, a));
                cur = game.child(s, a);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;

    #[test]
    fn deterministic_path_returns_terminal_utility() {
        let g = one_move(Payoff::new(0.3, 0.7), Payoff::new(0.0, 0.0));
        let leader = LeaderBehaviorStrategy::first_action(&g);
        let eu = expected_utilities(&g, &leader, &PureStrategy::new()).unwrap();
        assert_eq!(eu, Payoff::new(0.3, 0.7));
    }

    #[test]
    fn even_split_averages_terminals() {
        let g = one_move(Payoff::new(0.0, 0.0), Payoff::new(1.0, 0.0));
        let leader = LeaderBehaviorStrategy::uniform(&g);
        let eu = expected_utilities(&g, &leader, &PureStrategy::new()).unwrap();
        assert_eq!(eu.leader, 0.5);
    }

    #[test]
    fn missing_leader_vector_names_infoset() {
        let g = one_move(Payoff::ZERO, Payoff::ZERO);
        let err = expected_utilities(&g, &LeaderBehaviorStrategy::empty(&g), &PureStrategy::new());
        assert_eq!(err, Err(GameError::MissingLeaderStrategy(0)));
    }

    #[test]
    fn forcing_the_played_action_is_idempotent() {
        let g = one_move(Payoff::new(0.3, 0.7), Payoff::new(0.9, 0.1));
        let leader = LeaderBehaviorStrategy::first_action(&g);
        let f = PureStrategy::new();
        let c = conditional_expected_utilities(&g, &leader, &f, 0, 0).unwrap().unwrap();
        assert_eq!(c, expected_utilities(&g, &leader, &f).unwrap());
        let c1 = conditional_expected_utilities(&g, &leader, &f, 0, 1).unwrap().unwrap();
        assert_eq!(c1, Payoff::new(0.9, 0.1));
    }

    #[test]
    fn mixture_of_conditionals_is_unconditional_value() {
        let p = |a: f64, b: f64| Payoff::new(a, b);
        let g = matrix_game([[p(0.1, 0.4), p(0.8, 0.3)], [p(0.5, 0.9), p(0.2, 0.6)]]);
        let mut leader = LeaderBehaviorStrategy::empty(&g);
        let li = g.infoset_of(0).unwrap();
        let fi = g.infoset_of(1).unwrap();
        leader.set(li, vec![0.35, 0.65]);
        for a in 0..2 {
            let f = PureStrategy::from_pairs([(fi, a)]);
            let total = expected_utilities(&g, &leader, &f).unwrap();
            let mut mix = Payoff::ZERO;
            for (i, w) in [0.35, 0.65].into_iter().enumerate() {
                let c = conditional_expected_utilities(&g, &leader, &f, li, i).unwrap().unwrap();
                mix.add_scaled(c, w);
            }
            assert!((mix.leader - total.leader).abs() < 1e-12);
            assert!((mix.follower - total.follower).abs() < 1e-12);
        }
    }

    #[test]
    fn unreachable_infoset_is_reported_as_none() {
        // Leader infoset L0 sits below follower action a0 only.
        let g = nested_follower();
        let l0 = g.infoset_of(1).unwrap();
        let f0 = g.infoset_of(0).unwrap();
        let leader = LeaderBehaviorStrategy::first_action(&g);
        let away = PureStrategy::from_pairs([(f0, 1)]);
        assert_eq!(conditional_expected_utilities(&g, &leader, &away, l0, 0), Ok(None));
        assert_eq!(
            conditional_expected_utilities(&g, &leader, &away, f0, 0),
            Err(GameError::NotLeaderInfoset(f0))
        );
    }

    #[test]
    fn leader_best_response_picks_max_path() {
        let g = one_move(Payoff::new(0.0, 0.0), Payoff::new(1.0, 0.0));
        let (v, path) = leader_best_response(&g, g.root(), &PureStrategy::new()).unwrap();
        assert_eq!(v.leader, 1.0);
        assert_eq!(path, vec![(0, 1)]);
    }
}
