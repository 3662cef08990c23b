//! The subcommand pipeline as a library: build a run configuration, run
//! cohomology, lift and dims, and print the versioned JSON reports.
//!
//! ```bash
//! cargo run --example cli_pipeline
//! ```

use jetforms::config::RunConfig;
use jetforms::pipeline::{cmd_cohomology, cmd_dims, cmd_lift};

fn main() -> jetforms::Result<()> {
    let mut cfg = RunConfig::default();
    cfg.algebra.n = 3;
    let text = cfg.to_json();
    assert_eq!(RunConfig::from_json(&text)?, cfg);

    let h = cmd_cohomology(&cfg)?;
    println!("cohomology: dimH1 = {}, status {}", h.value["dimH1"], h.value["status"]);
    let l = cmd_lift(&cfg)?;
    println!("lift: {} generators, status {}", l.value["lattice"]["generators"].as_array().map_or(0, Vec::len), l.value["status"]);
    let d = cmd_dims(&cfg, 12, None)?;
    println!("dims k=12: {}", serde_json::json!({"deg": d.value["deg"], "dimM": d.value["dimM"], "dimS": d.value["dimS"]}));
    println!("schema_version {}", d.value["schema_version"]);
    Ok(())
}
