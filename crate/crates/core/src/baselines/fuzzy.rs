fn normalize(s: &str) -> Vec<char> {
    let lower = s.to_lowercase();
    let mut tokens: Vec<&str> = lower.split_whitespace().collect();
    tokens.sort_unstable();
    tokens.join(" ").chars().collect()
}

fn lcs_len(a: &[char], b: &[char]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for &ca in a {
        let mut diag = 0;
        for (j, &cb) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if ca == cb { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// Order-invariant similarity in `[0, 100]`: lowercase, sort the whitespace
/// tokens, rejoin, then `100 * (La + Lb - D) / (La + Lb)` with `D` the
/// insert/delete edit distance (a substitution costs 2).
pub fn token_sort_ratio(a: &str, b: &str) -> f64 {
    let a = normalize(a);
    let b = normalize(b);
    let total = a.len() + b.len();
    if total == 0 {
        return 100.0;
    }
    // Indel distance is La + Lb - 2 * LCS.
    100.0 * (2 * lcs_len(&a, &b)) as f64 / total as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_reference_values() {
        let cases = [
            ("abcd", "abce", 75.0),
            ("hello world", "world hello", 100.0),
            ("abc", "abc", 100.0),
            ("The cat sat on the mat", "the mat sat on the cat", 100.0),
            ("kitten", "sitting", 61.53846153846154),
            ("", "abc", 0.0),
            ("", "", 100.0),
            ("a b c", "c b a d", 83.33333333333334),
            (
                "Memorized suffix text here",
                "completely different words",
                30.76923076923077,
            ),
        ];
        for (a, b, want) in cases {
            assert!((token_sort_ratio(a, b) - want).abs() < 1e-9, "{a:?} {b:?}");
        }
    }
}
