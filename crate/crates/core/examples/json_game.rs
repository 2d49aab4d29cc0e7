//! A game written as JSON: parse, validate, solve and write it back.

use stackelberg::exact::solve_game;
use stackelberg::game::{json, validate_game};
use stackelberg::uct::{run, SamplerConfig};
use stackelberg::Deadline;

const GAME: &str = r#"{
  "root": 0,
  "states": [
    {"id": 0, "owner": "leader", "infoset": 0,
     "actions": [{"label": "guard", "next": 1}, {"label": "patrol", "next": 2}]},
    {"id": 1, "owner": "follower", "infoset": 1,
     "actions": [{"label": "attack", "next": 10}, {"label": "wait", "next": 11}]},
    {"id": 2, "owner": "follower", "infoset": 1,
     "actions": [{"label": "attack", "next": 12}, {"label": "wait", "next": 13}]}
  ],
  "terminals": [
    {"id": 10, "u_leader": 1.0, "u_follower": -1.0},
    {"id": 11, "u_leader": 0.0, "u_follower": 0.0},
    {"id": 12, "u_leader": -1.0, "u_follower": 1.0},
    {"id": 13, "u_leader": 0.5, "u_follower": 0.0}
  ]
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let game = json::from_str(GAME)?;
    let violations = validate_game(&game);
    println!("{} nodes, {} violations", game.num_nodes(), violations.len());

    let approx = run(&game, &SamplerConfig { iterations: 50, ..Default::default() })?;
    let exact = solve_game(&game, Deadline::none())?;
    println!("O2UCT leader {:.4}, exact leader {:.4}", approx.payoff.leader, exact.payoff.leader);
    println!("commitment {:?}", approx.leader.get(0));

    let round_trip = json::from_str(&json::to_string(&game))?;
    println!("round trip keeps {} nodes", round_trip.num_nodes());
    Ok(())
}
