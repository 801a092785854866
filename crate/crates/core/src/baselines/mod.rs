//! Comparison methods: token-probability scores and black-box probes.

mod cloze;
mod fuzzy;
mod prefix;
mod scores;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cloze::{
    build_cloze_prompt, cloze_matches, mask_passage, name_cloze, parse_cloze_prompt, MaskedPassage,
    MASK,
};
pub use fuzzy::token_sort_ratio;
pub use prefix::{prefix_matches, prefix_probe, split_prefix, PrefixSplit, MATCH_THRESHOLD};
pub use scores::{
    lowercase_score, min_k_prob, perplexity, zlib_compressed_len, zlib_score,
    DEFAULT_MIN_K_PERCENT, ZLIB_LEVEL,
};

use crate::paraphrase::McqaItem;
use crate::pool::map_ordered;
use crate::providers::{Client, ProviderError};
use crate::stats::Direction;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("empty token sequence")]
    EmptySequence,
    #[error("log ratio undefined: original perplexity is 1")]
    DegenerateLogRatio,
    #[error("passage has {words} words; {needed} needed")]
    PassageTooShort { words: usize, needed: usize },
    #[error("passage has no maskable word")]
    Unmaskable,
    #[error("{0}")]
    InvalidParameter(String),
    #[error("no outcomes for {0}")]
    NoOutcomes(String),
    #[error("non-finite {method} value for {doc_id}")]
    NonFinite {
        method: BaselineMethod,
        doc_id: String,
    },
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    Perplexity,
    Zlib,
    Lowercase,
    MinK,
    Prefix32,
    Prefix50,
    NameCloze,
}

impl BaselineMethod {
    pub const ALL: [BaselineMethod; 7] = [
        BaselineMethod::Perplexity,
        BaselineMethod::Zlib,
        BaselineMethod::Lowercase,
        BaselineMethod::MinK,
        BaselineMethod::Prefix32,
        BaselineMethod::Prefix50,
        BaselineMethod::NameCloze,
    ];

    /// Low perplexity and zlib ratio indicate membership; the others point up.
    pub fn direction(self) -> Direction {
        match self {
            BaselineMethod::Perplexity | BaselineMethod::Zlib => Direction::LowerIsMember,
            _ => Direction::HigherIsMember,
        }
    }

    /// Whether the method needs per-token logprobs (as opposed to chat).
    pub fn needs_token_logprobs(self) -> bool {
        matches!(
            self,
            BaselineMethod::Perplexity
                | BaselineMethod::Zlib
                | BaselineMethod::Lowercase
                | BaselineMethod::MinK
        )
    }

    pub fn is_boolean(self) -> bool {
        !self.needs_token_logprobs()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BaselineMethod::Perplexity => "perplexity",
            BaselineMethod::Zlib => "zlib",
            BaselineMethod::Lowercase => "lowercase",
            BaselineMethod::MinK => "min_k",
            BaselineMethod::Prefix32 => "prefix32",
            BaselineMethod::Prefix50 => "prefix50",
            BaselineMethod::NameCloze => "name_cloze",
        }
    }
}

impl fmt::Display for BaselineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaselineMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaselineMethod::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown baseline method {s:?}"))
    }
}

/// One method's value for one passage; boolean probes record 1.0 or 0.0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineOutcome {
    pub doc_id: String,
    pub passage_id: String,
    pub method: BaselineMethod,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineScore {
    pub doc_id: String,
    pub method: BaselineMethod,
    pub value: f64,
    pub direction: Direction,
}

/// Mean of the per-passage values; for boolean probes, the fraction true.
pub fn baseline_document_score(
    method: BaselineMethod,
    doc_id: &str,
    values: &[f64],
) -> Result<BaselineScore, BaselineError> {
    if values.is_empty() {
        return Err(BaselineError::NoOutcomes(format!("{doc_id}/{method}")));
    }
    let value = values.iter().sum::<f64>() / values.len() as f64;
    if !value.is_finite() {
        return Err(BaselineError::NonFinite {
            method,
            doc_id: doc_id.to_string(),
        });
    }
    Ok(BaselineScore {
        doc_id: doc_id.to_string(),
        method,
        value,
        direction: method.direction(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineParams {
    pub k_percent: f64,
    pub workers: usize,
}

impl Default for BaselineParams {
    fn default() -> Self {
        BaselineParams {
            k_percent: DEFAULT_MIN_K_PERCENT,
            workers: 4,
        }
    }
}

/// Values of `methods` for one passage text. A method that does not apply
/// to this passage (too short to split, nothing to mask) yields `None`.
pub fn score_passage(
    client: &Client,
    text: &str,
    methods: &[BaselineMethod],
    params: &BaselineParams,
) -> Result<Vec<(BaselineMethod, Option<f64>)>, BaselineError> {
    let mut out = Vec::with_capacity(methods.len());
    let mut tokens = None;
    let mut ppl = None;
    for &method in methods {
        if method.needs_token_logprobs() && tokens.is_none() {
            let t = client.token_logprobs(text)?;
            ppl = Some(perplexity(&t)?);
            tokens = Some(t);
        }
        let flag = |b: bool| f64::from(u8::from(b));
        let value = match method {
            BaselineMethod::Perplexity => Ok(ppl.expect("computed above")),
            BaselineMethod::Zlib => Ok(zlib_score(text, ppl.expect("computed above"))),
            BaselineMethod::Lowercase => perplexity(&client.token_logprobs(&text.to_lowercase())?)
                .and_then(|lower| lowercase_score(ppl.expect("computed above"), lower)),
            BaselineMethod::MinK => {
                min_k_prob(tokens.as_deref().expect("computed above"), params.k_percent)
            }
            BaselineMethod::Prefix32 => prefix_probe(client, text, 32).map(flag),
            BaselineMethod::Prefix50 => prefix_probe(client, text, 50).map(flag),
            BaselineMethod::NameCloze => name_cloze(client, text).map(flag),
        };
        match value {
            Ok(v) => out.push((method, Some(v))),
            Err(e @ (BaselineError::PassageTooShort { .. } | BaselineError::Unmaskable)) => {
                log::debug!("{method} skipped: {e}");
                out.push((method, None));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Per-passage outcomes for one document's items, in item order. Fails if
/// some method applies to none of the passages.
pub fn run_document(
    client: &Client,
    items: &[McqaItem],
    methods: &[BaselineMethod],
    params: &BaselineParams,
) -> Result<Vec<BaselineOutcome>, BaselineError> {
    let results = map_ordered(items, params.workers, |item| {
        score_passage(client, item.original(), methods, params)
    });
    let mut out = Vec::new();
    for (item, r) in items.iter().zip(results) {
        for (method, value) in r? {
            if let Some(value) = value {
                out.push(BaselineOutcome {
                    doc_id: item.meta.doc_id.clone(),
                    passage_id: item.meta.passage_id.clone(),
                    method,
                    value,
                });
            }
        }
    }
    if let Some(doc) = items.first() {
        if let Some(m) = methods
            .iter()
            .find(|m| !out.iter().any(|o| o.method == **m))
        {
            return Err(BaselineError::NoOutcomes(format!(
                "{}/{m}: no passage qualifies",
                doc.meta.doc_id
            )));
        }
    }
    Ok(out)
}

/// Collapses per-passage outcomes into one score per (document, method).
pub fn aggregate_outcomes(
    outcomes: &[BaselineOutcome],
) -> Result<Vec<BaselineScore>, BaselineError> {
    let mut grouped: std::collections::BTreeMap<(BaselineMethod, &str), Vec<f64>> =
        Default::default();
    for o in outcomes {
        grouped
            .entry((o.method, o.doc_id.as_str()))
            .or_default()
            .push(o.value);
    }
    grouped
        .into_iter()
        .map(|((method, doc), values)| baseline_document_score(method, doc, &values))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn document_score_examples() {
        let s =
            baseline_document_score(BaselineMethod::Prefix32, "d", &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.value, 0.25);
        assert_eq!(s.direction, Direction::HigherIsMember);
        let s = baseline_document_score(BaselineMethod::Perplexity, "d", &[2.0, 4.0]).unwrap();
        assert_eq!(s.value, 3.0);
        assert_eq!(s.direction, Direction::LowerIsMember);
        assert_eq!(
            baseline_document_score(BaselineMethod::NameCloze, "d", &[0.0, 0.0])
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn method_names_round_trip() {
        for m in BaselineMethod::ALL {
            assert_eq!(m.as_str().parse::<BaselineMethod>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
        }
    }
}
