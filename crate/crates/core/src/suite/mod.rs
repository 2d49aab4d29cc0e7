//! Benchmark interception games on graphs.
//!
//! A defender (leader) and an attacker (follower) move on a graph for at most
//! `horizon` rounds. In each round the defender moves first and the attacker
//! second, but neither observes the other's moves: information sets are keyed
//! by the mover's own position history, which keeps the game simultaneous in
//! information and gives both players perfect recall. After both moves the
//! round resolves:
//!
//! * interception if both stand on one vertex, or if they swapped positions
//!   along an edge (catch payoffs of the attacker's new vertex);
//! * otherwise a successful attack if the attacker stands on a target;
//! * otherwise a timeout with payoff `(0, 0)` once `horizon` rounds elapsed.
//!
//! The defender may always stay; the attacker may stay only when
//! `attacker_can_wait` is set. Grid games use 4-neighborhood grids for both
//! players. Search games use the directed [`graph::seg_graph`] for the
//! attacker and its undirected version for the defender.

pub mod graph;
pub mod payoffs;
pub mod random;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::DescriptorError;
use crate::game::{ExtensiveGame, GameBuilder, NodeId, Payoff, Player};
use graph::{Graph, Vertex};
use payoffs::PayoffTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Warehouse games: near zero-sum payoffs.
    Whg,
    /// Modified warehouse games: diverse general-sum payoffs.
    Wnz,
    /// Search games on the fixed directed graph.
    Seg,
}

/// Fully resolved description of one interception game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphGameDescriptor {
    pub family: Family,
    /// Graph the attacker moves on.
    pub graph: Graph,
    pub defender_start: Vertex,
    pub attacker_start: Vertex,
    pub targets: Vec<Vertex>,
    pub horizon: usize,
    pub attacker_can_wait: bool,
    pub payoffs: PayoffTable,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Board {
    Grid { rows: usize, cols: usize },
    Seg,
}

fn default_targets() -> usize {
    3
}

fn default_wait() -> bool {
    true
}

/// Compact, seed-driven descriptor as stored in descriptor files.
///
/// Unset layout fields are drawn from `seed` (grids) or fixed (search graph);
/// an absent payoff table is sampled from the family's distributions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescriptorFile {
    pub family: Family,
    pub board: Board,
    pub horizon: usize,
    #[serde(default = "default_wait")]
    pub attacker_can_wait: bool,
    pub seed: u64,
    #[serde(default = "default_targets")]
    pub num_targets: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoffs: Option<PayoffTable>,
}

impl DescriptorFile {
    pub fn grid(family: Family, rows: usize, cols: usize, horizon: usize, seed: u64) -> Self {
        DescriptorFile {
            family,
            board: Board::Grid { rows, cols },
            horizon,
            attacker_can_wait: true,
            seed,
            num_targets: 3,
            payoffs: None,
        }
    }

    pub fn seg(horizon: usize, attacker_can_wait: bool, seed: u64) -> Self {
        DescriptorFile {
            family: Family::Seg,
            board: Board::Seg,
            horizon,
            attacker_can_wait,
            seed,
            num_targets: 3,
            payoffs: None,
        }
    }

    pub fn resolve(&self) -> Result<GraphGameDescriptor, DescriptorError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let (graph, defender_start, attacker_start, targets) = match self.board {
            Board::Grid { rows, cols } => {
                let g = graph::grid(rows, cols);
                if g.len() < self.num_targets + 2 {
                    return Err(DescriptorError::field(
                        "board",
                        format!("{rows}x{cols} grid cannot hold two starts and {} targets", self.num_targets),
                    ));
                }
                let mut order: Vec<Vertex> = (0..g.len()).collect();
                order.shuffle(&mut rng);
                let mut targets = order[2..2 + self.num_targets].to_vec();
                targets.sort_unstable();
                (g, order[1], order[0], targets)
            }
            Board::Seg => {
                let g = graph::seg_graph();
                let v = |n: &str| g.vertex(n).expect("search graph vertex");
                let targets = graph::SEG_TARGETS.iter().map(|t| v(t)).collect();
                let (d, a) = (v(graph::SEG_DEFENDER_START), v(graph::SEG_ENTRY));
                (g, d, a, targets)
            }
        };
        let payoffs = match &self.payoffs {
            Some(p) => p.clone(),
            None => payoffs::sample_payoffs(self.family, graph.len(), &targets, &mut rng),
        };
        let desc = GraphGameDescriptor {
            family: self.family,
            graph,
            defender_start,
            attacker_start,
            targets,
            horizon: self.horizon,
            attacker_can_wait: self.attacker_can_wait,
            payoffs,
            seed: self.seed,
        };
        desc.check()?;
        Ok(desc)
    }
}

impl GraphGameDescriptor {
    pub fn check(&self) -> Result<(), DescriptorError> {
        let n = self.graph.len();
        if self.graph.out.len() != n || self.graph.out.iter().flatten().any(|&w| w >= n) {
            return Err(DescriptorError::field("graph", "arc endpoint out of range"));
        }
        if self.horizon < 1 {
            return Err(DescriptorError::field("horizon", "must be at least 1"));
        }
        if self.defender_start >= n {
            return Err(DescriptorError::field("defender_start", "not a vertex"));
        }
        if self.attacker_start >= n {
            return Err(DescriptorError::field("attacker_start", "not a vertex"));
        }
        if self.defender_start == self.attacker_start {
            return Err(DescriptorError::field("attacker_start", "coincides with defender_start"));
        }
        for (i, &t) in self.targets.iter().enumerate() {
            if t >= n {
                return Err(DescriptorError::field("targets", format!("{t} is not a vertex")));
            }
            if t == self.defender_start || t == self.attacker_start {
                return Err(DescriptorError::field("targets", format!("{t} coincides with a start")));
            }
            if self.targets[..i].contains(&t) {
                return Err(DescriptorError::field("targets", format!("{t} listed twice")));
            }
        }
        if !self.attacker_can_wait {
            if let Some(v) = (0..n).find(|&v| self.graph.out_degree(v) == 0 && !self.targets.contains(&v)) {
                return Err(DescriptorError::field(
                    "graph",
                    format!("attacker would be stuck at non-target vertex {v}"),
                ));
            }
        }
        self.payoffs.check(self.family, n, &self.targets)
    }
}

type InfosetKey = (Player, Vec<u16>);

struct Generator<'d> {
    desc: &'d GraphGameDescriptor,
    defender_graph: Graph,
    builder: GameBuilder<InfosetKey>,
}

impl Generator<'_> {
    fn defender_moves(&self, at: Vertex) -> Vec<Vertex> {
        std::iter::once(at)
            .chain(self.defender_graph.out[at].iter().copied())
            .collect()
    }

    fn attacker_moves(&self, at: Vertex) -> Vec<Vertex> {
        let stay = self.desc.attacker_can_wait.then_some(at);
        stay.into_iter()
            .chain(self.desc.graph.out[at].iter().copied())
            .collect()
    }

    fn labels(&self, moves: &[Vertex]) -> Vec<String> {
        moves.iter().map(|&v| self.desc.graph.names[v].clone()).collect()
    }

    fn infoset_name(&self, player: Player, history: &[u16]) -> String {
        let tag = match player {
            Player::Leader => "D",
            Player::Follower => "A",
        };
        let path: Vec<&str> = history
            .iter()
            .map(|&v| self.desc.graph.names[v as usize].as_str())
            .collect();
        format!("{tag}[{}]", path.join(" "))
    }

    fn decision(&mut self, player: Player, history: &[u16], moves: &[Vertex]) -> NodeId {
        let before = self.builder.num_nodes();
        let labels = self.labels(moves);
        let key = (player, history.to_vec());
        let id = self.builder.decision(Some(player), key, &labels);
        debug_assert_eq!(id, before);
        let infoset = self.builder.infoset_id((player, history.to_vec()));
        let name = self.infoset_name(player, history);
        self.builder.rename_infoset(infoset, name);
        id
    }

    /// Builds the subtree where the defender is about to move in `round`.
    fn round(&mut self, round: usize, d: Vertex, a: Vertex, dh: &mut Vec<u16>, ah: &mut Vec<u16>) -> NodeId {
        let d_moves = self.defender_moves(d);
        let node = self.decision(Player::Leader, dh, &d_moves);
        let mut kids = Vec::with_capacity(d_moves.len());
        for &d2 in &d_moves {
            dh.push(d2 as u16);
            let a_moves = self.attacker_moves(a);
            let f = self.decision(Player::Follower, ah, &a_moves);
            let mut fkids = Vec::with_capacity(a_moves.len());
            for &a2 in &a_moves {
                ah.push(a2 as u16);
                let child = self.resolve(round, d, a, d2, a2, dh, ah);
                ah.pop();
                fkids.push(child);
            }
            self.builder.set_children(f, fkids);
            dh.pop();
            kids.push(f);
        }
        self.builder.set_children(node, kids);
        node
    }

    #[allow(clippy::too_many_arguments)]
    fn resolve(
        &mut self,
        round: usize,
        d: Vertex,
        a: Vertex,
        d2: Vertex,
        a2: Vertex,
        dh: &mut Vec<u16>,
        ah: &mut Vec<u16>,
    ) -> NodeId {
        let p = &self.desc.payoffs;
        if d2 == a2 || (d2 == a && a2 == d) {
            return self.builder.terminal(p.interception(a2));
        }
        if let Some(u) = p.attack(a2) {
            return self.builder.terminal(u);
        }
        if round + 1 == self.desc.horizon {
            return self.builder.terminal(p.timeout);
        }
        self.round(round + 1, d2, a2, dh, ah)
    }
}

/// Materializes the extensive-form game of a descriptor.
pub fn generate(desc: &GraphGameDescriptor) -> Result<ExtensiveGame, DescriptorError> {
    desc.check()?;
    let mut gen = Generator {
        desc,
        defender_graph: desc.graph.undirected(),
        builder: GameBuilder::new(),
    };
    let root = gen.round(0, desc.defender_start, desc.attacker_start, &mut Vec::new(), &mut Vec::new());
    Ok(gen.builder.build(root)?)
}

/// Convenience: resolve a descriptor file and generate its game.
pub fn generate_file(file: &DescriptorFile) -> Result<ExtensiveGame, DescriptorError> {
    generate(&file.resolve()?)
}

pub fn timeout_payoff() -> Payoff {
    Payoff::ZERO
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{json, validate_game, NodeKind};
    use payoffs::{CatchPayoff, PayoffTable};

    fn line_descriptor() -> GraphGameDescriptor {
        let mut g = Graph::new(vec!["p".into(), "q".into()]);
        g.add_edge(0, 1);
        GraphGameDescriptor {
            family: Family::Whg,
            graph: g,
            defender_start: 0,
            attacker_start: 1,
            targets: vec![],
            horizon: 1,
            attacker_can_wait: false,
            payoffs: PayoffTable {
                catch: vec![
                    CatchPayoff { attacker_caught_penalty: -0.5, defender_catch_reward: 0.5 },
                    CatchPayoff { attacker_caught_penalty: -0.25, defender_catch_reward: 0.25 },
                ],
                attack: vec![None, None],
                timeout: Payoff::ZERO,
            },
            seed: 0,
        }
    }

    #[test]
    fn forced_collision_on_a_line() {
        let desc = line_descriptor();
        let g = generate(&desc).unwrap();
        assert!(validate_game(&g).is_empty());
        let terminals: Vec<Payoff> = g.nodes().iter().filter_map(|n| match n.kind {
            NodeKind::Terminal(p) => Some(p),
            _ => None,
        }).collect();
        // Defender stays (attacker walks in) or swaps with the attacker.
        assert_eq!(terminals, vec![Payoff::new(0.5, -0.5); 2]);
    }

    #[test]
    fn seg_interceptions_carry_fixed_catch_payoffs() {
        let g = generate_file(&DescriptorFile::seg(4, true, 1)).unwrap();
        let desc = DescriptorFile::seg(4, true, 1).resolve().unwrap();
        let targets: Vec<f64> = desc
            .targets
            .iter()
            .map(|&t| desc.payoffs.attack(t).unwrap().follower)
            .collect();
        for n in g.nodes() {
            if let NodeKind::Terminal(p) = n.kind {
                let attack = targets.contains(&p.follower) && p.leader == -1.0;
                let timeout = p == Payoff::ZERO;
                assert!(attack || timeout || p == Payoff::new(1.0, -1.0), "{p:?}");
            }
        }
        assert!(g.nodes().iter().any(|n| n.kind == NodeKind::Terminal(Payoff::new(1.0, -1.0))));
    }

    /// Independent count of tree nodes: enumerate joint move sequences.
    fn brute_force_nodes(desc: &GraphGameDescriptor) -> usize {
        let dg = desc.graph.undirected();
        fn rec(desc: &GraphGameDescriptor, dg: &Graph, round: usize, d: usize, a: usize) -> usize {
            let mut total = 1; // defender node
            let mut d_moves = vec![d];
            d_moves.extend(&dg.out[d]);
            for &d2 in &d_moves {
                total += 1; // attacker node
                let mut a_moves: Vec<usize> = if desc.attacker_can_wait { vec![a] } else { vec![] };
                a_moves.extend(&desc.graph.out[a]);
                for &a2 in &a_moves {
                    let caught = d2 == a2 || (d2 == a && a2 == d);
                    if caught || desc.targets.contains(&a2) || round + 1 == desc.horizon {
                        total += 1;
                    } else {
                        total += rec(desc, dg, round + 1, d2, a2);
                    }
                }
            }
            total
        }
        rec(desc, &dg, 0, desc.defender_start, desc.attacker_start)
    }

    #[test]
    fn wnz_node_count_matches_brute_force() {
        let desc = DescriptorFile::grid(Family::Wnz, 4, 4, 3, 7).resolve().unwrap();
        let g = generate(&desc).unwrap();
        assert_eq!(g.num_nodes(), brute_force_nodes(&desc));
        assert!(validate_game(&g).is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        let f = DescriptorFile::grid(Family::Whg, 3, 3, 2, 42);
        let a = json::to_string(&generate_file(&f).unwrap());
        let b = json::to_string(&generate_file(&f).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn descriptor_errors_name_the_field() {
        let mut desc = line_descriptor();
        desc.horizon = 0;
        assert!(matches!(generate(&desc), Err(DescriptorError::Field { field: "horizon", .. })));
        let mut desc = line_descriptor();
        desc.attacker_start = 0;
        assert!(matches!(generate(&desc), Err(DescriptorError::Field { field: "attacker_start", .. })));
        let mut desc = line_descriptor();
        desc.targets = vec![1];
        assert!(matches!(generate(&desc), Err(DescriptorError::Field { field: "targets", .. })));
    }

    #[test]
    fn descriptor_file_json_shape() {
        let text = r#"{"family":"wnz","board":{"grid":{"rows":4,"cols":4}},"horizon":3,"seed":7}"#;
        let f: DescriptorFile = serde_json::from_str(text).unwrap();
        assert_eq!(f, DescriptorFile::grid(Family::Wnz, 4, 4, 3, 7));
        let seg: DescriptorFile =
            serde_json::from_str(r#"{"family":"seg","board":"seg","horizon":4,"seed":1}"#).unwrap();
        assert_eq!(seg.board, Board::Seg);
    }
}
