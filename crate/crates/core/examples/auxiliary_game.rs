//! Walks the auxiliary follower game of a tiny game: each step pops the front
//! information set and queues the follower sets the move can lead to.

use stackelberg::afg::{for_each_leaf, path_to_strategy, Afg, COUNT_GUARD};
use stackelberg::game::{enumerate_follower_pure_strategies, GameBuilder};
use stackelberg::{Payoff, Player};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let labels = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let mut b: GameBuilder<String> = GameBuilder::new();
    let root = b.decision(Some(Player::Follower), "I1".into(), &labels(&["m1", "m2"]));
    let leader = b.decision(Some(Player::Leader), "L".into(), &labels(&["l1", "l2"]));
    let quit = b.terminal(Payoff::new(0.0, 0.0));
    b.set_children(root, vec![leader, quit]);
    let i2 = b.decision(Some(Player::Follower), "I2".into(), &labels(&["m3", "m4"]));
    let i3 = b.decision(Some(Player::Follower), "I3".into(), &labels(&["m5", "m6"]));
    b.set_children(leader, vec![i2, i3]);
    for (set, base) in [(i2, 1.0), (i3, -1.0)] {
        let kids = (0..2).map(|k| b.terminal(Payoff::new(base, k as f64))).collect();
        b.set_children(set, kids);
    }
    let game = b.build(root)?;
    let name = |i: usize| game.infoset(i).name.clone();

    let afg = Afg::new(&game);
    let mut state = afg.initial_state();
    println!("queue {:?}", state.queue.iter().map(|&i| name(i)).collect::<Vec<_>>());
    while let Some(i) = state.front() {
        state = afg.step(&state, 0)?;
        println!("play {} first move -> queue {:?}", name(i), state.queue.iter().map(|&i| name(i)).collect::<Vec<_>>());
    }

    let mut leaves = Vec::new();
    for_each_leaf(&afg, COUNT_GUARD, |s| leaves.push(path_to_strategy(s).expect("terminal")))?;
    println!("{} leaves:", leaves.len());
    for pi in &leaves {
        let moves: Vec<String> = pi.iter().map(|(i, a)| game.infoset_action_labels(i)[a].clone()).collect();
        println!("  {}", moves.join(" "));
    }
    assert_eq!(leaves.len(), enumerate_follower_pure_strategies(&game).count());
    Ok(())
}
