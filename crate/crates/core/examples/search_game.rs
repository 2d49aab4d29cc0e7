//! Search game on the fixed directed graph: auxiliary-game size and an
//! O2UCT run.
//!
//! cargo run --release --example search_game -- [horizon] [iterations]

use std::time::Instant;

use stackelberg::afg::count_leaves;
use stackelberg::follower::describe;
use stackelberg::suite::{generate_file, DescriptorFile};
use stackelberg::uct::{run, SamplerConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let horizon = args.next().map_or(Ok(3), |a| a.parse())?;
    let iterations = args.next().map_or(Ok(100), |a| a.parse())?;
    let game = generate_file(&DescriptorFile::seg(horizon, true, 1))?;
    println!("T={horizon}: {} nodes, {} follower plans", game.num_nodes(), count_leaves(&game)?);

    let start = Instant::now();
    let result = run(&game, &SamplerConfig { iterations, ..Default::default() })?;
    let distinct: std::collections::HashSet<_> = result.samples.iter().collect();
    println!(
        "leader {:.4}, follower {:.4} after {} playouts over {} distinct plans in {:.1}s",
        result.payoff.leader,
        result.payoff.follower,
        result.iterations,
        distinct.len(),
        start.elapsed().as_secs_f64()
    );
    for (infoset, action) in describe(&game, &result.follower) {
        println!("  attacker at {infoset}: {action}");
    }
    Ok(())
}
