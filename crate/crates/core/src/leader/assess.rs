//! Assessment vectors for strategy-tree nodes.
//!
//! The pure functions take conditional values per tracked move (in the same
//! order as the node's probability vector) and return one entry per move.

use crate::error::GameError;
use crate::game::{
    conditional_expected_utilities, ActionId, ExtensiveGame, FollowerPureStrategy, InfosetId,
    LeaderBehaviorStrategy,
};

fn dot(p: &[f64], v: &[f64]) -> f64 {
    p.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Leader gain of each move over the node's current mixture.
pub fn positive(prob: &[f64], leader_value: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    positive_into(prob, leader_value, &mut out);
    out
}

pub fn positive_into(prob: &[f64], leader_value: &[f64], out: &mut Vec<f64>) {
    let base = dot(prob, leader_value);
    out.clear();
    out.extend(leader_value.iter().map(|v| v - base));
}

/// Node reachable against both follower strategies: how much each move
/// favors the requested strategy over the better one, relative to the mixture.
pub fn feasibility_both(prob: &[f64], requested: &[f64], better: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    feasibility_both_into(prob, requested, better, &mut out);
    out
}

pub fn feasibility_both_into(prob: &[f64], requested: &[f64], better: &[f64], out: &mut Vec<f64>) {
    let base = dot(prob, requested) - dot(prob, better);
    out.clear();
    out.extend(requested.iter().zip(better).map(|(r, b)| (r - b) - base));
}

/// Node reachable only against the better strategy: rewards moves that lower
/// its follower payoff.
pub fn feasibility_better_only(prob: &[f64], better: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    feasibility_better_only_into(prob, better, &mut out);
    out
}

pub fn feasibility_better_only_into(prob: &[f64], better: &[f64], out: &mut Vec<f64>) {
    let base = dot(prob, better);
    out.clear();
    out.extend(better.iter().map(|b| base - b));
}

fn conditional(
    game: &ExtensiveGame,
    leader: &LeaderBehaviorStrategy,
    follower: &FollowerPureStrategy,
    infoset: InfosetId,
    moves: &[ActionId],
) -> Result<Option<Vec<crate::game::Payoff>>, GameError> {
    let mut out = Vec::with_capacity(moves.len());
    for &a in moves {
        match conditional_expected_utilities(game, leader, follower, infoset, a)? {
            Some(u) => out.push(u),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

fn mixture(leader: &LeaderBehaviorStrategy, infoset: InfosetId, moves: &[ActionId]) -> Result<Vec<f64>, GameError> {
    let probs = leader
        .get(infoset)
        .ok_or(GameError::MissingLeaderStrategy(infoset))?;
    Ok(moves.iter().map(|&a| probs[a]).collect())
}

/// Positive assessment of the tracked `moves` of `infoset`; zero when the
/// infoset is unreachable against `requested`.
pub fn assessment_positive(
    game: &ExtensiveGame,
    leader: &LeaderBehaviorStrategy,
    requested: &FollowerPureStrategy,
    infoset: InfosetId,
    moves: &[ActionId],
) -> Result<Vec<f64>, GameError> {
    let Some(values) = conditional(game, leader, requested, infoset, moves)? else {
        return Ok(vec![0.0; moves.len()]);
    };
    let leader_values: Vec<f64> = values.iter().map(|u| u.leader).collect();
    Ok(positive(&mixture(leader, infoset, moves)?, &leader_values))
}

/// Feasibility assessment; zero when the infoset is unreachable against
/// `better`.
pub fn assessment_feasibility(
    game: &ExtensiveGame,
    leader: &LeaderBehaviorStrategy,
    requested: &FollowerPureStrategy,
    better: &FollowerPureStrategy,
    infoset: InfosetId,
    moves: &[ActionId],
) -> Result<Vec<f64>, GameError> {
    let Some(b) = conditional(game, leader, better, infoset, moves)? else {
        return Ok(vec![0.0; moves.len()]);
    };
    let b: Vec<f64> = b.iter().map(|u| u.follower).collect();
    let prob = mixture(leader, infoset, moves)?;
    Ok(match conditional(game, leader, requested, infoset, moves)? {
        Some(r) => {
            let r: Vec<f64> = r.iter().map(|u| u.follower).collect();
            feasibility_both(&prob, &r, &b)
        }
        None => feasibility_better_only(&prob, &b),
    })
}
