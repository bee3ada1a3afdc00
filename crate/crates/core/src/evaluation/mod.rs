//! Response checking: did the model pick the correct option number?

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

/// Recorded in certificates so results name the checker that judged them.
pub const CHECKER_VERSION: &str = "1";

pub const ACCEPT_TABLE: &str = include_str!("../../fixtures/checker/accept.tsv");
pub const REJECT_TABLE: &str = include_str!("../../fixtures/checker/reject.tsv");

/// Outcome of checking one response.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub correct: bool,
    /// Text from the anchor through the option number, lowercased.
    pub matched_span: Option<String>,
    pub chosen_option: Option<usize>,
}

fn anchor() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\bcorrect[\s_]*answer\b").unwrap())
}

fn number() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // Tolerates markdown emphasis, `:`/`=`/`-`/`is` separators, an
    // "option"/"choice" word, `#`, and one opening bracket of any kind.
    RE.get_or_init(|| Regex::new(r"^[\s*_]*(?:[:=\-]|is)?[\s*_]*(?:option|choice)?[\s#]*[(\[{<]?\s*(\d{1,6})").unwrap())
}

/// Checks `answer` against the 1-based `correct_index`.
///
/// Only the first "correct answer" in the (lowercased) response counts; the
/// option number must follow it after tolerated formatting. Text after the
/// number is ignored.
pub fn check_response(answer: &str, correct_index: usize) -> Verdict {
    let lower = answer.to_lowercase();
    let none = Verdict { correct: false, matched_span: None, chosen_option: None };
    let Some(anchor) = anchor().find(&lower) else {
        return none;
    };
    let rest = &lower[anchor.end()..];
    let Some(caps) = number().captures(rest) else {
        return none;
    };
    let digits = caps.get(1).unwrap();
    let chosen = digits.as_str().parse::<usize>().ok();
    Verdict {
        correct: chosen == Some(correct_index),
        matched_span: Some(lower[anchor.start()..anchor.end() + digits.end()].to_owned()),
        chosen_option: chosen,
    }
}

/// Parses a checker fixture table: `index<TAB>response` per line, `#`
/// comments, and `\n` escapes in responses.
pub fn parse_table(table: &str) -> Vec<(usize, String)> {
    table
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let (idx, resp) = l.split_once('\t').unwrap_or((l, ""));
            (idx.trim().parse().expect("fixture index"), resp.replace("\\n", "\n"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let v = check_response("correct answer: 2. entity_C, because it is", 2);
        assert!(v.correct);
        assert_eq!(v.matched_span.as_deref(), Some("correct answer: 2"));
        assert!(check_response("Correct Answer:  (2) entity_C", 2).correct);
        let v = check_response("correct answer: 3. x", 2);
        assert!(!v.correct);
        assert_eq!(v.chosen_option, Some(3));
    }

    #[test]
    fn fixture_tables() {
        let accept = parse_table(ACCEPT_TABLE);
        let reject = parse_table(REJECT_TABLE);
        assert!(accept.len() >= 20 && reject.len() >= 10);
        for (i, r) in &accept {
            assert!(check_response(r, *i).correct, "should accept {r:?} for {i}");
        }
        for (i, r) in &reject {
            assert!(!check_response(r, *i).correct, "should reject {r:?} for {i}");
        }
    }

    proptest! {
        #[test]
        fn compliant_variants_accepted(
            i in 1usize..=99,
            lead in "(|Sure. |\\*\\*)",
            sep in "(:|: |:  | : |:\\n|=)",
            open in "(|\\(|\\[)",
            tail in "(\\. x|\\) x|, because y|)",
            upper in any::<bool>(),
        ) {
            let close = match open.as_str() { "(" => ")", "[" => "]", _ => "" };
            let head = if upper { "Correct Answer" } else { "correct answer" };
            let r = format!("{lead}{head}{sep}{open}{i}{close}{tail}");
            prop_assert!(check_response(&r, i).correct, "{:?}", r);
        }

        #[test]
        fn no_digit_after_anchor_rejects(prefix in "[0-9a-z ]{0,10}", suffix in "[a-z .:()]{0,20}", i in 1usize..50) {
            let r = format!("{prefix} correct answer{suffix}");
            prop_assert!(!check_response(&r, i).correct);
        }

        #[test]
        fn deterministic(r in "\\PC{0,40}", i in 1usize..10) {
            prop_assert_eq!(check_response(&r, i), check_response(&r, i));
        }
    }
}
