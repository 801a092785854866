//! The whole pipeline offline: synthetic corpus, extraction, paraphrasing,
//! calibration, probing, evaluation, baselines and the report, against the
//! simulated model. Run it twice and the second run is served from cache.
//!
//!     cargo run --release --example simulated_audit [out_dir]

use std::path::PathBuf;

use decop::pipeline::{cmd_simulate, RunConfig, SimulateArgs};

fn main() -> anyhow::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("decop-simulated-audit"));
    let mut cfg =
        RunConfig::load(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/demo.toml"))?;
    cfg.cache_dir = out.join("cache");
    let status = cmd_simulate(
        &cfg,
        &SimulateArgs {
            out_dir: out.clone(),
            baselines: true,
        },
    )?;
    print!(
        "{}",
        std::fs::read_to_string(out.join("report/report.txt"))?
    );
    println!(
        "\n{} provider calls, {} cache hits; outputs under {}",
        status.provider_calls,
        status.cache_hits,
        out.display()
    );
    Ok(())
}
