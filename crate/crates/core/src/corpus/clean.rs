use std::sync::LazyLock;

use regex::Regex;

use super::schema::TAG;
use super::CorpusError;

static SCRIPT_STYLE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?is)<(script|style)\b[^>]*>.*?</(script|style)\s*>").unwrap());
static COMMENT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?s)<!--.*?-->").unwrap());
static BLOCK_TAG: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)<\s*/?\s*(br|p|div|h[1-6]|li|tr|blockquote|section|article)\b[^<>]*>").unwrap()
});
static ENTITY: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"&(#[0-9]{1,7}|#[xX][0-9a-fA-F]{1,6}|[a-zA-Z]{2,8});").unwrap());
static PARAGRAPH_BREAK: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\n[ \t]*\n\s*").unwrap());

/// Strips markup and normalizes whitespace.
///
/// Block-level tags and blank lines become paragraph breaks, which survive as
/// a single `\n`. Every other whitespace run collapses to one space, and
/// control characters are dropped.
pub fn clean_text(raw: &str) -> Result<String, CorpusError> {
    let text = raw.replace("\r\n", "\n").replace('\r', "\n");
    let text = SCRIPT_STYLE.replace_all(&text, "");
    let text = COMMENT.replace_all(&text, "");
    let text = BLOCK_TAG.replace_all(&text, "\n\n");
    let text = TAG.replace_all(&text, "");
    let text = decode_entities(&text);
    // Entities such as &lt;b&gt; decode into fresh tags.
    let text = TAG.replace_all(&text, "");

    let text: String = text
        .chars()
        .filter_map(|c| match c {
            '\n' => Some('\n'),
            '\t' | '\u{a0}' => Some(' '),
            '\u{200b}' | '\u{200c}' | '\u{200d}' | '\u{feff}' | '\u{ad}' => None,
            c if c.is_control() => None,
            c => Some(c),
        })
        .collect();

    let paragraphs: Vec<String> = PARAGRAPH_BREAK
        .split(&text)
        .map(|p| p.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|p| !p.is_empty())
        .collect();
    if paragraphs.is_empty() {
        return Err(CorpusError::EmptyAfterCleaning);
    }
    Ok(paragraphs.join("\n"))
}

fn decode_entities(text: &str) -> String {
    ENTITY
        .replace_all(text, |caps: &regex::Captures| {
            let body = &caps[1];
            let decoded =
                if let Some(hex) = body.strip_prefix("#x").or_else(|| body.strip_prefix("#X")) {
                    u32::from_str_radix(hex, 16).ok().and_then(char::from_u32)
                } else if let Some(dec) = body.strip_prefix('#') {
                    dec.parse().ok().and_then(char::from_u32)
                } else {
                    match body {
                        "amp" => Some('&'),
                        "lt" => Some('<'),
                        "gt" => Some('>'),
                        "quot" => Some('"'),
                        "apos" => Some('\''),
                        "nbsp" => Some(' '),
                        "mdash" => Some('\u{2014}'),
                        "ndash" => Some('\u{2013}'),
                        "hellip" => Some('\u{2026}'),
                        "lsquo" => Some('\u{2018}'),
                        "rsquo" => Some('\u{2019}'),
                        "ldquo" => Some('\u{201c}'),
                        "rdquo" => Some('\u{201d}'),
                        _ => None,
                    }
                };
            decoded.map_or_else(|| caps[0].to_string(), String::from)
        })
        .into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_inline_tags() {
        assert_eq!(clean_text("Hello <b>world</b>.").unwrap(), "Hello world.");
    }

    #[test]
    fn collapses_whitespace() {
        assert_eq!(clean_text("A  B\t C").unwrap(), "A B C");
    }

    #[test]
    fn keeps_paragraph_breaks_as_single_newline() {
        let raw = "First line\nwraps here.\n\n\n  Second paragraph.<p>Third.";
        assert_eq!(
            clean_text(raw).unwrap(),
            "First line wraps here.\nSecond paragraph.\nThird."
        );
    }

    #[test]
    fn removes_control_characters_and_entities() {
        assert_eq!(clean_text("a\u{7}b &amp; c&#33;").unwrap(), "ab & c!");
        assert_eq!(clean_text("x &lt;i&gt;y&lt;/i&gt;").unwrap(), "x y");
        assert_eq!(
            clean_text("keep &bogus; as is").unwrap(),
            "keep &bogus; as is"
        );
    }

    #[test]
    fn empty_after_cleaning() {
        assert!(matches!(
            clean_text("<div> <br/> </div>\u{1}"),
            Err(CorpusError::EmptyAfterCleaning)
        ));
    }
}
