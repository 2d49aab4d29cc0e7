//! Approximate equilibrium of a modified warehouse game and its gap to the
//! exact value.
//!
//! cargo run --release --example warehouse_sse -- [rows] [cols] [horizon] [seed]

use stackelberg::exact::solve_game;
use stackelberg::harness::evaluate_vs_worst_case;
use stackelberg::suite::{generate_file, DescriptorFile, Family};
use stackelberg::uct::{run, SamplerConfig};
use stackelberg::Deadline;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let get = |i: usize, d: u64| args.get(i).copied().unwrap_or(d);
    let desc = DescriptorFile::grid(Family::Wnz, get(0, 3) as usize, get(1, 3) as usize, get(2, 3) as usize, get(3, 1));
    let game = generate_file(&desc)?;
    println!("{} nodes, {} infosets", game.num_nodes(), game.num_infosets());

    let config = SamplerConfig { iterations: 300, seed: 0, ..Default::default() };
    let result = run(&game, &config)?;
    let worst = evaluate_vs_worst_case(&game, &result.leader)?;
    println!(
        "O2UCT: leader {:.4} vs committed follower, {:.4} vs worst case ({} playouts)",
        result.payoff.leader, worst.payoff.leader, result.iterations
    );
    let first = result.history.iter().position(|v| !v.is_nan()).unwrap_or(0);
    println!("first feasible profile after {} playouts", first + 1);

    let exact = solve_game(&game, Deadline::none())?;
    println!(
        "exact: leader {:.4} ({} leader plans x {} follower plans, {} LPs)",
        exact.payoff.leader, exact.rows, exact.cols, exact.lps_solved
    );
    Ok(())
}
