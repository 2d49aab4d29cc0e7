use std::fmt;

use super::{ActionId, ExtensiveGame, InfosetId, NodeId, NodeKind, Player};

/// A breach of one of the structural invariants of an [`ExtensiveGame`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    RootHasParent,
    MultipleParents(NodeId),
    Unreachable(NodeId),
    NoOwner(NodeId),
    NoActions(NodeId),
    MixedOwnership(InfosetId),
    ActionSetMismatch(InfosetId),
    PerfectRecall(InfosetId),
    BadUtility(NodeId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RootHasParent => write!(f, "root has a parent"),
            Violation::MultipleParents(n) => write!(f, "state {n} has multiple parents"),
            Violation::Unreachable(n) => write!(f, "state {n} unreachable from root"),
            Violation::NoOwner(n) => write!(f, "state {n} has no owner"),
            Violation::NoActions(n) => write!(f, "state {n} has no actions"),
            Violation::MixedOwnership(i) => write!(f, "mixed ownership in infoset {i}"),
            Violation::ActionSetMismatch(i) => write!(f, "action sets differ in infoset {i}"),
            Violation::PerfectRecall(i) => write!(f, "perfect recall violated in infoset {i}"),
            Violation::BadUtility(n) => write!(f, "terminal {n} lacks finite utilities"),
        }
    }
}

/// Own `(infoset, action)` history of `player` above `id`, read off the
/// actual parent chain.
fn walked_history(game: &ExtensiveGame, id: NodeId, player: Player) -> Vec<(InfosetId, ActionId)> {
    let mut out = Vec::new();
    let mut cur = id;
    let mut steps = 0usize;
    while let Some(parent) = game.node(cur).parent {
        if let NodeKind::Decision {
            owner: Some(p),
            infoset,
            children,
            ..
        } = &game.node(parent).kind
        {
            if *p == player {
                let a = children.iter().position(|&c| c == cur).unwrap_or(usize::MAX);
                out.push((*infoset, a));
            }
        }
        cur = parent;
        steps += 1;
        if steps > game.num_nodes() {
            break;
        }
    }
    out.reverse();
    out
}

/// Lists every invariant violation; an empty list means the game is a
/// well-formed two-player tree with perfect recall.
pub fn validate_game(game: &ExtensiveGame) -> Vec<Violation> {
    let n = game.num_nodes();
    let mut out = Vec::new();
    let mut parent_count = vec![0usize; n];
    for node in game.nodes() {
        if let NodeKind::Decision { children, .. } = &node.kind {
            for &c in children {
                parent_count[c] += 1;
            }
        }
    }
    if parent_count[game.root()] > 0 {
        out.push(Violation::RootHasParent);
    }
    for (id, &count) in parent_count.iter().enumerate() {
        if count > 1 {
            out.push(Violation::MultipleParents(id));
        }
    }

    let mut seen = vec![false; n];
    let mut stack = vec![game.root()];
    seen[game.root()] = true;
    while let Some(id) = stack.pop() {
        for &c in game.children(id) {
            if !seen[c] {
                seen[c] = true;
                stack.push(c);
            }
        }
    }
    for (id, &ok) in seen.iter().enumerate() {
        if !ok {
            out.push(Violation::Unreachable(id));
        }
    }

    for (id, node) in game.nodes().iter().enumerate() {
        match &node.kind {
            NodeKind::Decision {
                owner, children, ..
            } => {
                if owner.is_none() {
                    out.push(Violation::NoOwner(id));
                }
                if children.is_empty() {
                    out.push(Violation::NoActions(id));
                }
            }
            NodeKind::Terminal(p) => {
                if !p.leader.is_finite() || !p.follower.is_finite() {
                    out.push(Violation::BadUtility(id));
                }
            }
        }
    }

    let structural_ok = out.is_empty();
    for (id, set) in game.infosets().iter().enumerate() {
        let first = set.states[0];
        let labels = game.action_labels(first);
        if set.states.iter().any(|&s| game.owner(s) != set.owner) {
            out.push(Violation::MixedOwnership(id));
            continue;
        }
        if set.states.iter().any(|&s| {
            game.children(s).len() != set.num_actions || game.action_labels(s) != labels
        }) {
            out.push(Violation::ActionSetMismatch(id));
        }
        if !structural_ok {
            continue;
        }
        if let Some(owner) = set.owner {
            let h = walked_history(game, first, owner);
            if set.states[1..]
                .iter()
                .any(|&s| walked_history(game, s, owner) != h)
            {
                out.push(Violation::PerfectRecall(id));
            }
        }
    }
    out
}
