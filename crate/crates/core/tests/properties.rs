use decop::baselines::{min_k_prob, perplexity, token_sort_ratio};
use decop::calibration::argmax;
use decop::probe::{parse_answer, Answer};
use decop::providers::TokenLogprob;
use decop::stats::{best_threshold, roc_auc};
use decop::Label;
use proptest::prelude::*;

fn tokens(lps: &[f64]) -> Vec<TokenLogprob> {
    lps.iter()
        .map(|&logprob| TokenLogprob {
            token: "w".into(),
            logprob,
        })
        .collect()
}

proptest! {
    #[test]
    fn auc_is_a_probability_and_flips_with_the_groups(
        pos in prop::collection::vec(0u8..20, 1..30),
        neg in prop::collection::vec(0u8..20, 1..30),
    ) {
        let pos: Vec<f64> = pos.into_iter().map(f64::from).collect();
        let neg: Vec<f64> = neg.into_iter().map(f64::from).collect();
        let a = roc_auc(&pos, &neg).unwrap();
        let b = roc_auc(&neg, &pos).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn balanced_accuracy_never_drops_below_half(
        pos in prop::collection::vec(-5.0f64..5.0, 1..30),
        neg in prop::collection::vec(-5.0f64..5.0, 1..30),
    ) {
        let (_, acc) = best_threshold(&pos, &neg).unwrap();
        prop_assert!((0.5..=1.0).contains(&acc));
    }

    #[test]
    fn token_sort_ratio_ignores_word_order_and_case(words in prop::collection::vec("[a-zA-Z]{1,6}", 1..8)) {
        let a = words.join(" ");
        let mut rev = words.clone();
        rev.reverse();
        let b = rev.join(" ").to_uppercase();
        prop_assert_eq!(token_sort_ratio(&a, &b), 100.0);
    }

    #[test]
    fn token_sort_ratio_is_symmetric_and_bounded(a in "[a-z ]{0,20}", b in "[a-z ]{0,20}") {
        let r = token_sort_ratio(&a, &b);
        prop_assert!((0.0..=100.0).contains(&r));
        prop_assert_eq!(r, token_sort_ratio(&b, &a));
    }

    #[test]
    fn min_k_lies_between_the_minimum_and_the_mean(lps in prop::collection::vec(-20.0f64..0.0, 1..50), k in 1.0f64..100.0) {
        let t = tokens(&lps);
        let v = min_k_prob(&t, k).unwrap();
        let min = lps.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = lps.iter().sum::<f64>() / lps.len() as f64;
        prop_assert!(v >= min - 1e-12 && v <= mean + 1e-12);
    }

    #[test]
    fn perplexity_is_at_least_one(lps in prop::collection::vec(-20.0f64..0.0, 1..50)) {
        prop_assert!(perplexity(&tokens(&lps)).unwrap() >= 1.0);
    }

    #[test]
    fn argmax_prefers_the_earliest_maximum(v in prop::array::uniform4(0u8..3)) {
        let v = v.map(f64::from);
        let got = argmax(&v);
        let max = v.iter().copied().fold(f64::MIN, f64::max);
        let first = v.iter().position(|x| *x == max).unwrap();
        prop_assert_eq!(got, Label::ALL[first]);
    }

    #[test]
    fn a_bare_label_always_parses(i in 0usize..4, pad in "[ \n]{0,3}") {
        let label = Label::ALL[i];
        prop_assert_eq!(parse_answer(&format!("{pad}{label}{pad}")), Answer::Label(label));
    }
}
