//! Estimate a per-label calibration vector on clean documents and use it to
//! strip a model's position bias.
//!
//!     cargo run --example calibrate

use std::sync::Arc;

use decop::calibration::{
    adjusted_means, check_calibration, compute_calibration, CalibrationOptions,
};
use decop::probe::{score_document, ProbeOptions};
use decop::providers::{SimulatedModel, SimulatedModelConfig};
use decop::synth::{synthetic_docs, synthetic_items};
use decop::{Client, Group, LengthSetting};

fn main() -> anyhow::Result<()> {
    let bias = [0.4, 0.3, 0.2, 0.1];
    let calib: Vec<_> = synthetic_docs("calib", Group::Clean, 10)
        .iter()
        .map(|d| {
            (
                d.doc_id.clone(),
                synthetic_items(d, 5, LengthSetting::Short64, 2),
            )
        })
        .collect();
    let target = synthetic_docs("book", Group::Suspect, 1).remove(0);
    let target_items = synthetic_items(&target, 10, LengthSetting::Short64, 2);

    let mut config = SimulatedModelConfig::new(bias, 2)?.with_memorization(&target.doc_id, 0.3);
    for (id, _) in &calib {
        config = config.with_memorization(id, 0.0);
    }
    let mut model = SimulatedModel::new("sim", config)?;
    for (_, items) in &calib {
        model.learn_items(items);
    }
    model.learn_items(&target_items);
    let client = Client::new(Arc::new(model));

    let run = compute_calibration(&client, &calib, &CalibrationOptions::default())?;
    println!("delta = {:?}", run.vector.delta);
    let raw: Vec<[f64; 4]> = run.doc_means.iter().map(|(_, m)| *m).collect();
    let check = check_calibration(&adjusted_means(&raw, &run.vector));
    println!(
        "well calibrated on {:.0}% of calibration documents",
        100.0 * check.proportion
    );

    let opts = ProbeOptions::default();
    let (plain, _) = score_document(&client, &target_items, None, &opts)?;
    let (calibrated, _) = score_document(&client, &target_items, Some(&run.vector), &opts)?;
    println!(
        "{}: accuracy {:.3} from text answers, {:.3} calibrated",
        target.doc_id, plain.accuracy, calibrated.accuracy
    );

    let path = std::env::temp_dir().join("decop-example-calibration.json");
    run.vector.save(&path)?;
    println!("saved to {}", path.display());
    Ok(())
}
