use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    best_threshold, mean, roc_auc, std_dev, welch_t_test, Direction, GroupScores, StatsError,
};

pub const DEFAULT_ITERATIONS: usize = 10;

/// What the group t-test is run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TTestMode {
    /// Every distinct document drawn in any iteration, once each.
    #[default]
    TrackedDocuments,
    /// Every resampled score of every iteration, duplicates included.
    Pooled,
    /// The per-iteration group means.
    IterationMeans,
}

impl TTestMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TTestMode::TrackedDocuments => "tracked_documents",
            TTestMode::Pooled => "pooled",
            TTestMode::IterationMeans => "iteration_means",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapConfig {
    pub iterations: usize,
    pub seed: u64,
    pub ttest: TTestMode,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            iterations: DEFAULT_ITERATIONS,
            seed: 0,
            ttest: TTestMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResult {
    pub auc_mean: f64,
    pub auc_std: f64,
    pub suspect_acc_mean: f64,
    pub suspect_acc_std: f64,
    pub clean_acc_mean: f64,
    pub clean_acc_std: f64,
    /// Mean separation threshold, on the original score scale.
    pub threshold_mean: f64,
    pub balanced_accuracy_mean: f64,
    /// `None` when a group has fewer than two documents to test.
    pub p_value: Option<f64>,
    pub t_statistic: Option<f64>,
    pub degenerate_variance: bool,
    pub ttest_mode: TTestMode,
    pub iterations: usize,
    pub seed: u64,
    pub direction: Direction,
    pub n_suspect: usize,
    pub n_clean: usize,
}

fn resample(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

/// Resamples both groups with replacement `iterations` times, scoring AUC and
/// the best threshold on each resample, then runs a Welch t-test between the
/// groups as selected by `config.ttest`.
///
/// Iteration `i` draws from a ChaCha stream `i` under the master seed, so the
/// result is a pure function of the groups and the configuration.
pub fn bootstrap_evaluate(
    groups: &GroupScores,
    config: &BootstrapConfig,
) -> Result<EvaluationResult, StatsError> {
    groups.validate()?;
    if config.iterations == 0 {
        return Err(StatsError::NoIterations);
    }
    let dir = groups.direction;
    let s: Vec<f64> = groups.suspect.iter().map(|(_, v)| *v).collect();
    let c: Vec<f64> = groups.clean.iter().map(|(_, v)| *v).collect();

    let mut aucs = Vec::with_capacity(config.iterations);
    let mut thetas = Vec::with_capacity(config.iterations);
    let mut bal = Vec::with_capacity(config.iterations);
    let mut s_means = Vec::with_capacity(config.iterations);
    let mut c_means = Vec::with_capacity(config.iterations);
    let mut s_pool = Vec::new();
    let mut c_pool = Vec::new();
    let mut s_seen = BTreeSet::new();
    let mut c_seen = BTreeSet::new();

    for i in 0..config.iterations {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(i as u64);
        let si = resample(&mut rng, s.len());
        let ci = resample(&mut rng, c.len());
        let rs: Vec<f64> = si.iter().map(|&k| s[k]).collect();
        let rc: Vec<f64> = ci.iter().map(|&k| c[k]).collect();
        let os: Vec<f64> = rs.iter().map(|&x| dir.orient(x)).collect();
        let oc: Vec<f64> = rc.iter().map(|&x| dir.orient(x)).collect();
        aucs.push(roc_auc(&os, &oc)?);
        let (theta, acc) = best_threshold(&os, &oc)?;
        thetas.push(dir.orient(theta));
        bal.push(acc);
        s_means.push(mean(&rs));
        c_means.push(mean(&rc));
        s_seen.extend(si);
        c_seen.extend(ci);
        s_pool.extend(rs);
        c_pool.extend(rc);
    }

    let (a, b) = match config.ttest {
        TTestMode::TrackedDocuments => (
            s_seen.iter().map(|&k| s[k]).collect(),
            c_seen.iter().map(|&k| c[k]).collect(),
        ),
        TTestMode::Pooled => (s_pool, c_pool),
        TTestMode::IterationMeans => (s_means.clone(), c_means.clone()),
    };
    let test = match welch_t_test(&a, &b) {
        Ok(t) => Some(t),
        Err(StatsError::TooFewSamples(..)) => None,
        Err(e) => return Err(e),
    };

    Ok(EvaluationResult {
        auc_mean: mean(&aucs),
        auc_std: std_dev(&aucs),
        suspect_acc_mean: mean(&s_means),
        suspect_acc_std: std_dev(&s_means),
        clean_acc_mean: mean(&c_means),
        clean_acc_std: std_dev(&c_means),
        threshold_mean: mean(&thetas),
        balanced_accuracy_mean: mean(&bal),
        p_value: test.map(|t| t.p_value),
        t_statistic: test.map(|t| t.t),
        degenerate_variance: test.is_some_and(|t| t.degenerate),
        ttest_mode: config.ttest,
        iterations: config.iterations,
        seed: config.seed,
        direction: dir,
        n_suspect: s.len(),
        n_clean: c.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(prefix: &str, scores: &[f64]) -> Vec<(String, f64)> {
        scores
            .iter()
            .enumerate()
            .map(|(i, &s)| (format!("{prefix}{i}"), s))
            .collect()
    }

    #[test]
    fn perfect_separation() {
        let g = GroupScores::new(
            group("s", &[1.0; 5]),
            group("c", &[0.0; 5]),
            Direction::HigherIsMember,
        )
        .unwrap();
        let r = bootstrap_evaluate(&g, &BootstrapConfig::default()).unwrap();
        assert_eq!(r.auc_mean, 1.0);
        assert_eq!(r.auc_std, 0.0);
        assert_eq!(r.p_value, Some(0.0));
        assert!(r.degenerate_variance);
    }

    #[test]
    fn lower_is_member_flips_orientation() {
        let g = GroupScores::new(
            group("s", &[1.0, 2.0]),
            group("c", &[5.0, 6.0]),
            Direction::LowerIsMember,
        )
        .unwrap();
        let r = bootstrap_evaluate(&g, &BootstrapConfig::default()).unwrap();
        assert_eq!(r.auc_mean, 1.0);
        assert!(r.threshold_mean > 0.0);
    }

    #[test]
    fn deterministic_in_seed() {
        let g = GroupScores::new(
            group("s", &[0.3, 0.6, 0.5, 0.9]),
            group("c", &[0.2, 0.4, 0.35, 0.6]),
            Direction::HigherIsMember,
        )
        .unwrap();
        let cfg = BootstrapConfig {
            seed: 11,
            ..Default::default()
        };
        assert_eq!(
            bootstrap_evaluate(&g, &cfg).unwrap(),
            bootstrap_evaluate(&g, &cfg).unwrap()
        );
    }

    #[test]
    fn single_documents_skip_the_test() {
        let g = GroupScores::new(
            group("s", &[0.9]),
            group("c", &[0.2]),
            Direction::HigherIsMember,
        )
        .unwrap();
        let r = bootstrap_evaluate(&g, &BootstrapConfig::default()).unwrap();
        assert_eq!(r.auc_mean, 1.0);
        assert_eq!(r.p_value, None);
    }
}
