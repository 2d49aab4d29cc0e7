//! The momentum node update, then the leader oracle building a commitment
//! that makes a dominated-looking follower reply a best response.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stackelberg::game::{GameBuilder, PureStrategy};
use stackelberg::leader::{adjust_node, LeaderConfig, LeaderOracle, TreeNode};
use stackelberg::{Deadline, Payoff, Player};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut node = TreeNode { moves: vec![0, 1, 2], prob: vec![0.2, 0.5, 0.3], mom: vec![0.0; 3], w: 0.0 };
    for assessment in [[0.3, -0.1, -0.2], [0.1, 0.0, -0.1], [0.0, 0.0, 0.0]] {
        adjust_node(&mut node, &assessment);
        println!("as {assessment:?} -> prob {:.3?} mom {:.2?} w {:.2}", node.prob, node.mom, node.w);
    }

    // Leader picks a row unobserved; follower picks a column.
    let labels = |n: usize| (0..n).map(|k| format!("a{k}")).collect::<Vec<_>>();
    let u = [[(2.0, 1.0), (4.0, 0.0)], [(1.0, 0.0), (3.0, 2.0)]];
    let mut b: GameBuilder<String> = GameBuilder::new();
    let root = b.decision(Some(Player::Leader), "row".into(), &labels(2));
    let mut rows = Vec::new();
    for row in u {
        let f = b.decision(Some(Player::Follower), "col".into(), &labels(2));
        let kids = row.iter().map(|&(l, f)| b.terminal(Payoff::new(l, f))).collect();
        b.set_children(f, kids);
        rows.push(f);
    }
    b.set_children(root, rows);
    let game = b.build(root)?;

    let oracle = LeaderOracle::new(&game, LeaderConfig::default());
    let requested = PureStrategy::from_pairs([(1, 1)]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    match oracle.solve(&requested, &mut rng, Deadline::none())?.into_solution() {
        Some(s) => println!(
            "commitment {:.3?}: leader {:.4}, follower {:.4} ({:?}, stopped by {:?})",
            s.strategy.get(0).unwrap_or_default(),
            s.payoff.leader,
            s.payoff.follower,
            s.counts,
            s.stop
        ),
        None => println!("no leader strategy makes column 1 a best response"),
    }
    Ok(())
}
