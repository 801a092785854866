use std::io::Write;

use flate2::write::ZlibEncoder;
use flate2::Compression;

use super::BaselineError;
use crate::providers::TokenLogprob;

/// Compression level used for the zlib entropy; recorded in reports.
pub const ZLIB_LEVEL: u32 = 6;
pub const DEFAULT_MIN_K_PERCENT: f64 = 20.0;

/// `exp(-mean logprob)`.
pub fn perplexity(tokens: &[TokenLogprob]) -> Result<f64, BaselineError> {
    if tokens.is_empty() {
        return Err(BaselineError::EmptySequence);
    }
    let mean = tokens.iter().map(|t| t.logprob).sum::<f64>() / tokens.len() as f64;
    Ok((-mean).exp())
}

/// Length in bytes of the zlib stream for `text` at [`ZLIB_LEVEL`].
pub fn zlib_compressed_len(text: &str) -> usize {
    let mut enc = ZlibEncoder::new(Vec::new(), Compression::new(ZLIB_LEVEL));
    enc.write_all(text.as_bytes()).expect("writing to memory");
    enc.finish().expect("writing to memory").len()
}

/// `ln(ppl)` over the zlib entropy of the text in bits.
pub fn zlib_score(text: &str, ppl: f64) -> f64 {
    ppl.ln() / (8.0 * zlib_compressed_len(text) as f64)
}

/// `ln(ppl_lowercased) / ln(ppl_original)`.
pub fn lowercase_score(ppl_original: f64, ppl_lowercased: f64) -> Result<f64, BaselineError> {
    let denom = ppl_original.ln();
    if denom == 0.0 {
        return Err(BaselineError::DegenerateLogRatio);
    }
    Ok(ppl_lowercased.ln() / denom)
}

/// Mean of the `ceil(n * k / 100)` smallest logprobs.
pub fn min_k_prob(tokens: &[TokenLogprob], k_percent: f64) -> Result<f64, BaselineError> {
    if tokens.is_empty() {
        return Err(BaselineError::EmptySequence);
    }
    if !(k_percent > 0.0 && k_percent <= 100.0) {
        return Err(BaselineError::InvalidParameter(format!(
            "k = {k_percent} outside (0, 100]"
        )));
    }
    let mut lps: Vec<f64> = tokens.iter().map(|t| t.logprob).collect();
    lps.sort_by(f64::total_cmp);
    let take = ((lps.len() as f64 * k_percent / 100.0).ceil() as usize).clamp(1, lps.len());
    Ok(lps[..take].iter().sum::<f64>() / take as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, LN_2};

    fn toks(lps: &[f64]) -> Vec<TokenLogprob> {
        lps.iter()
            .map(|&logprob| TokenLogprob {
                token: "t".into(),
                logprob,
            })
            .collect()
    }

    #[test]
    fn perplexity_examples() {
        assert!((perplexity(&toks(&[-LN_2, -LN_2])).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(perplexity(&toks(&[0.0, 0.0])).unwrap(), 1.0);
        assert!((perplexity(&toks(&[-1.0, -2.0, -3.0])).unwrap() - E * E).abs() < 1e-12);
        assert!(matches!(perplexity(&[]), Err(BaselineError::EmptySequence)));
    }

    #[test]
    fn zlib_examples() {
        assert_eq!(zlib_score("anything at all", 1.0), 0.0);
        let a = zlib_score("some text", E);
        assert!((zlib_score("some text", E * E) - 2.0 * a).abs() < 1e-15);
    }

    #[test]
    fn lowercase_examples() {
        assert_eq!(lowercase_score(3.0, 3.0).unwrap(), 1.0);
        assert!((lowercase_score(E, E * E).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(
            lowercase_score(1.0, 2.0),
            Err(BaselineError::DegenerateLogRatio)
        ));
    }

    #[test]
    fn min_k_examples() {
        assert_eq!(
            min_k_prob(&toks(&[-5.0, -1.0, -1.0, -1.0]), 25.0).unwrap(),
            -5.0
        );
        assert_eq!(min_k_prob(&toks(&[-2.0, -4.0]), 100.0).unwrap(), -3.0);
        assert!(min_k_prob(&toks(&[-2.0]), 0.0).is_err());
    }
}
