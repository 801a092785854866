//! Turn per-document scores into a verdict: bootstrap AUC, the separating
//! threshold and a Welch t-test between the groups.
//!
//!     cargo run --example bootstrap_stats

use decop::stats::{best_threshold, bootstrap_evaluate, roc_auc, welch_t_test, BootstrapConfig};
use decop::{Direction, GroupScores};

fn main() -> anyhow::Result<()> {
    let suspect = [0.91, 0.72, 0.88, 0.64, 0.95, 0.58, 0.81, 0.77];
    let clean = [0.31, 0.22, 0.48, 0.27, 0.35, 0.61, 0.25, 0.30];

    println!("auc {:.3}", roc_auc(&suspect, &clean)?);
    let (theta, bal) = best_threshold(&suspect, &clean)?;
    println!("threshold {theta:.3} (balanced accuracy {bal:.3})");
    let t = welch_t_test(&suspect, &clean)?;
    println!("welch t {:.3}, df {:.2}, p {:.2e}", t.t, t.df, t.p_value);

    let named = |prefix: &str, v: &[f64]| -> Vec<(String, f64)> {
        v.iter()
            .enumerate()
            .map(|(i, s)| (format!("{prefix}{i}"), *s))
            .collect()
    };
    let groups = GroupScores::new(
        named("s", &suspect),
        named("c", &clean),
        Direction::HigherIsMember,
    )?;
    let eval = bootstrap_evaluate(
        &groups,
        &BootstrapConfig {
            iterations: 100,
            seed: 1,
            ..Default::default()
        },
    )?;
    println!("\n{}", serde_json::to_string_pretty(&eval)?);
    Ok(())
}
