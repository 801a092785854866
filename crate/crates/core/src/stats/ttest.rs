use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{mean, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
    /// Both samples constant: p is 1 for equal means and 0 otherwise.
    pub degenerate: bool,
}

fn sample_var(xs: &[f64], m: f64) -> f64 {
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Two-sided Welch t-test with Welch-Satterthwaite degrees of freedom.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::TooFewSamples(a.len(), b.len()));
    }
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (
        sample_var(a, ma) / a.len() as f64,
        sample_var(b, mb) / b.len() as f64,
    );
    let se2 = va + vb;
    if se2 == 0.0 {
        let equal = ma == mb;
        return Ok(TTestResult {
            t: if equal {
                0.0
            } else {
                f64::INFINITY.copysign(ma - mb)
            },
            df: (a.len() + b.len() - 2) as f64,
            p_value: if equal { 1.0 } else { 0.0 },
            degenerate: true,
        });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (va * va / (a.len() - 1) as f64 + vb * vb / (b.len() - 1) as f64);
    let dist = StudentsT::new(0.0, 1.0, df).expect("df is positive");
    let p_value = (2.0 * dist.cdf(-t.abs())).min(1.0);
    Ok(TTestResult {
        t,
        df,
        p_value,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let r = welch_t_test(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert!(!r.degenerate);
        let r = welch_t_test(&[0.0; 4], &[1.0; 4]).unwrap();
        assert_eq!(r.p_value, 0.0);
        assert!(r.degenerate);
        let r = welch_t_test(&[0.5; 3], &[0.5; 3]).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert!(welch_t_test(&[1.0], &[1.0, 2.0]).is_err());
    }
}
