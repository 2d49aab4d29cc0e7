//! A small seeded campaign: records as JSON lines plus a per-bucket summary.
//!
//! cargo run --release --example campaign -- [output-dir]

use std::path::PathBuf;

use stackelberg::harness::{self, CampaignConfig};

const CONFIG: &str = r#"{
  "games": [
    {"family": "wnz", "board": {"grid": {"rows": 3, "cols": 3}}, "horizon": 2, "seed": 1},
    {"family": "wnz", "board": {"grid": {"rows": 3, "cols": 3}}, "horizon": 3, "seed": 2},
    {"family": "whg", "board": {"grid": {"rows": 4, "cols": 4}}, "horizon": 2, "seed": 3}
  ],
  "solvers": [
    {"kind": "o2uct", "iterations": 100},
    {"kind": "exact"}
  ],
  "trials": 3,
  "seed": 7,
  "time_limit_secs": 60
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("stackelberg-campaign"), PathBuf::from);
    let config = CampaignConfig::from_json(CONFIG)?;
    println!("{} workers", harness::worker_count());
    let records = harness::run_campaign(&config)?;
    std::fs::create_dir_all(&out)?;
    harness::write_records(&out.join("records.jsonl"), &records)?;
    let summary = harness::summarize(&records, config.time_limit_secs);
    harness::write_summary_csv(&out.join("summary.csv"), &summary)?;
    for row in &summary {
        println!(
            "bucket {:>6} {:<6} mean payoff {:>8.4} mean time {:.3}s solved {:.0}%",
            row.bucket,
            row.solver,
            row.mean_payoff.unwrap_or(f64::NAN),
            row.mean_time_secs,
            100.0 * row.solved_fraction
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}
