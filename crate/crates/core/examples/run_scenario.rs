//! Runs a bundled figure scenario at a reduced budget and writes its CSV,
//! metadata and SVG plot.
//!
//! `cargo run --example run_scenario -- fig3 /tmp/anlab-out`

use std::path::PathBuf;

use anlab::experiments::{bundled, run_and_save, RunOptions};

fn main() -> anlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "fig2".into());
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("anlab-example"));
    let scenario = bundled(&name).ok_or_else(|| anlab::Error::Scenario(format!("no bundled scenario {name}")))?;
    let opts = RunOptions {
        trials: Some(20_000),
        h_realizations: Some(50),
        ..RunOptions::default()
    };
    let result = run_and_save(&scenario, &opts, &out, true)?;
    println!("{} rows -> {}", result.table.rows.len(), result.csv.display());
    for row in result.table.rows.iter().take(6) {
        println!(
            "  {}={} mu_E={} {} {} outage {:.4}",
            row.sweep_variable, row.sweep_value, row.mu_e_db, row.allocation, row.evaluator, row.outage
        );
    }
    Ok(())
}
