use super::StatsError;

fn check(pos: &[f64], neg: &[f64]) -> Result<(), StatsError> {
    if pos.is_empty() {
        return Err(StatsError::EmptyGroup("positive"));
    }
    if neg.is_empty() {
        return Err(StatsError::EmptyGroup("negative"));
    }
    Ok(())
}

/// Mann-Whitney AUC: the share of (pos, neg) pairs where pos scores higher,
/// ties counting one half.
pub fn roc_auc(pos: &[f64], neg: &[f64]) -> Result<f64, StatsError> {
    check(pos, neg)?;
    let mut wins = 0.0;
    for &p in pos {
        for &n in neg {
            wins += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    Ok(wins / (pos.len() * neg.len()) as f64)
}

fn balanced_accuracy(pos: &[f64], neg: &[f64], theta: f64) -> f64 {
    let tp = pos.iter().filter(|&&p| p > theta).count() as f64 / pos.len() as f64;
    let tn = neg.iter().filter(|&&n| n <= theta).count() as f64 / neg.len() as f64;
    (tp + tn) / 2.0
}

/// Threshold maximizing balanced accuracy, a document counting as positive
/// when its score exceeds it. Candidates are the midpoints between adjacent
/// distinct scores plus the largest score (everything negative, 0.5); ties
/// go to the smallest threshold.
pub fn best_threshold(pos: &[f64], neg: &[f64]) -> Result<(f64, f64), StatsError> {
    check(pos, neg)?;
    let mut all: Vec<f64> = pos.iter().chain(neg).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    let top = *all.last().expect("non-empty");
    let candidates = all
        .windows(2)
        .map(|w| (w[0] + w[1]) / 2.0)
        .chain(std::iter::once(top));
    let mut best = (top, f64::NEG_INFINITY);
    for theta in candidates {
        let acc = balanced_accuracy(pos, neg, theta);
        if acc > best.1 {
            best = (theta, acc);
        }
    }
    Ok(best)
}
