//! JSON interchange format for explicit (small) games.
//!
//! ```json
//! {
//!   "root": 0,
//!   "states": [
//!     {"id": 0, "owner": "leader", "infoset": 0,
//!      "actions": [{"label": "l", "next": 1}, {"label": "r", "next": 2}]}
//!   ],
//!   "terminals": [
//!     {"id": 1, "u_leader": 0.3, "u_follower": 0.7},
//!     {"id": 2, "u_leader": 0.0, "u_follower": 1.0}
//!   ]
//! }
//! ```
//!
//! Ids are arbitrary integers. Information set ids share one namespace across
//! both players, so a set mixing owners is representable (and reported by the
//! validator). Any owner other than `leader`/`follower` is kept as ownerless.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use super::{ExtensiveGame, GameBuilder, NodeKind, Payoff, Player};
use crate::error::GameError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameFile {
    pub root: u64,
    pub states: Vec<StateEntry>,
    pub terminals: Vec<TerminalEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateEntry {
    pub id: u64,
    pub owner: String,
    pub infoset: u64,
    pub actions: Vec<ActionEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionEntry {
    pub label: String,
    pub next: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminalEntry {
    pub id: u64,
    #[serde(default = "nan")]
    pub u_leader: f64,
    #[serde(default = "nan")]
    pub u_follower: f64,
}

fn nan() -> f64 {
    f64::NAN
}

fn parse_owner(s: &str) -> Option<Player> {
    match s {
        "leader" => Some(Player::Leader),
        "follower" => Some(Player::Follower),
        _ => None,
    }
}

impl GameFile {
    pub fn into_game(self) -> Result<ExtensiveGame, GameError> {
        enum Entry {
            State(StateEntry),
            Terminal(TerminalEntry),
        }
        let mut entries: Vec<(u64, Entry)> = self
            .states
            .into_iter()
            .map(|s| (s.id, Entry::State(s)))
            .chain(self.terminals.into_iter().map(|t| (t.id, Entry::Terminal(t))))
            .collect();
        entries.sort_by_key(|(id, _)| *id);
        let mut dense = HashMap::new();
        for (i, (id, _)) in entries.iter().enumerate() {
            if dense.insert(*id, i).is_some() {
                return Err(GameError::Format(format!("duplicate id {id}")));
            }
        }
        let lookup = |id: u64| {
            dense
                .get(&id)
                .copied()
                .ok_or_else(|| GameError::Format(format!("unknown id {id}")))
        };

        let mut b: GameBuilder<u64> = GameBuilder::new();
        for (_, entry) in &entries {
            match entry {
                Entry::State(s) => {
                    let labels: Vec<String> = s.actions.iter().map(|a| a.label.clone()).collect();
                    let node = b.decision(parse_owner(&s.owner), s.infoset, &labels);
                    let infoset = b.infoset_id(s.infoset);
                    b.rename_infoset(infoset, s.infoset.to_string());
                    let kids = s
                        .actions
                        .iter()
                        .map(|a| lookup(a.next))
                        .collect::<Result<Vec<_>, _>>()?;
                    b.set_children(node, kids);
                }
                Entry::Terminal(t) => {
                    b.terminal(Payoff::new(t.u_leader, t.u_follower));
                }
            }
        }
        b.build(lookup(self.root)?)
    }

    pub fn from_game(game: &ExtensiveGame) -> GameFile {
        let mut states = Vec::new();
        let mut terminals = Vec::new();
        for (id, node) in game.nodes().iter().enumerate() {
            match &node.kind {
                NodeKind::Decision {
                    owner,
                    infoset,
                    children,
                    ..
                } => states.push(StateEntry {
                    id: id as u64,
                    owner: match owner {
                        Some(Player::Leader) => "leader".into(),
                        Some(Player::Follower) => "follower".into(),
                        None => "none".into(),
                    },
                    infoset: *infoset as u64,
                    actions: children
                        .iter()
                        .zip(game.action_labels(id))
                        .map(|(&c, l)| ActionEntry {
                            label: l.clone(),
                            next: c as u64,
                        })
                        .collect(),
                }),
                NodeKind::Terminal(p) => terminals.push(TerminalEntry {
                    id: id as u64,
                    u_leader: p.leader,
                    u_follower: p.follower,
                }),
            }
        }
        GameFile {
            root: game.root() as u64,
            states,
            terminals,
        }
    }
}

pub fn from_str(text: &str) -> Result<ExtensiveGame, GameError> {
    let file: GameFile =
        serde_json::from_str(text).map_err(|e| GameError::Format(e.to_string()))?;
    file.into_game()
}

pub fn to_string(game: &ExtensiveGame) -> String {
    serde_json::to_string(&GameFile::from_game(game)).expect("game serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::validate_game;

    const ONE_MOVE: &str = r#"{
        "root": 10,
        "states": [{"id": 10, "owner": "leader", "infoset": 4,
                    "actions": [{"label": "l", "next": 11}, {"label": "r", "next": 12}]}],
        "terminals": [{"id": 11, "u_leader": 0.3, "u_follower": 0.7},
                      {"id": 12, "u_leader": 0.0, "u_follower": 1.0}]
    }"#;

    #[test]
    fn parses_and_densifies_ids() {
        let g = from_str(ONE_MOVE).unwrap();
        assert_eq!(g.root(), 0);
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.infoset(0).name, "4");
        assert_eq!(g.action_labels(0), ["l", "r"]);
        assert_eq!(g.payoff(1), Some(Payoff::new(0.3, 0.7)));
        assert!(validate_game(&g).is_empty());
    }

    #[test]
    fn writer_output_reloads_to_same_game() {
        let g = from_str(ONE_MOVE).unwrap();
        let again = from_str(&to_string(&g)).unwrap();
        assert_eq!(again.nodes(), g.nodes());
    }

    #[test]
    fn unknown_targets_and_chance_owners() {
        let bad = ONE_MOVE.replace("\"next\": 12", "\"next\": 99");
        assert!(matches!(from_str(&bad), Err(GameError::Format(_))));
        let chance = ONE_MOVE.replace("leader", "chance");
        let g = from_str(&chance).unwrap();
        assert!(!validate_game(&g).is_empty());
    }
}
