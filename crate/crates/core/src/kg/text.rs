//! ASCII folding and rule-based sentence splitting.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Folds text to ASCII: compatibility decomposition, combining marks
/// removed, common punctuation and ligatures mapped, everything else
/// dropped.
pub fn normalize_ascii(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.nfkd() {
        if ch.is_ascii() {
            out.push(ch);
        } else if is_combining_mark(ch) {
            continue;
        } else if let Some(mapped) = fold_char(ch) {
            out.push_str(mapped);
        } else if ch.is_whitespace() {
            out.push(' ');
        }
    }
    out
}

fn fold_char(ch: char) -> Option<&'static str> {
    Some(match ch {
        '\u{2010}' | '\u{2011}' | '\u{2012}' | '\u{2013}' | '\u{2014}' | '\u{2015}' | '\u{2212}' | '\u{2043}'
        | '\u{FE58}' => "-",
        '\u{2018}' | '\u{2019}' | '\u{201A}' | '\u{201B}' | '\u{2032}' | '\u{02BC}' => "'",
        '\u{201C}' | '\u{201D}' | '\u{201E}' | '\u{201F}' | '\u{2033}' | '\u{00AB}' | '\u{00BB}' => "\"",
        '\u{2026}' => "...",
        '\u{2022}' | '\u{00B7}' => "*",
        '\u{00D7}' => "x",
        'ß' => "ss",
        'æ' => "ae",
        'Æ' => "AE",
        'œ' => "oe",
        'Œ' => "OE",
        'ø' => "o",
        'Ø' => "O",
        'đ' => "d",
        'Đ' => "D",
        'ł' => "l",
        'Ł' => "L",
        'þ' => "th",
        'Þ' => "Th",
        'ð' => "d",
        'Ð' => "D",
        'ı' => "i",
        _ => return None,
    })
}

/// Lowercased words that end with a period without ending a sentence.
const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "ft", "vs", "etc", "inc", "ltd", "co", "corp", "bros",
    "no", "vol", "gen", "col", "lt", "sgt", "capt", "gov", "rev", "hon", "fr", "pres", "sen", "rep", "jan", "feb",
    "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "e.g", "i.e", "u.s", "u.k", "approx", "est",
    "ca",
];

/// Splits ASCII text into sentences.
///
/// A sentence ends at `.`, `!` or `?` (plus any closing quotes or brackets)
/// when the next non-space character is an uppercase letter, optionally
/// behind an opening quote or bracket. A period after a listed abbreviation
/// does not end a sentence; single-letter initials are not special-cased, so
/// "A is B. C is D." splits in two. Whitespace runs
/// inside a sentence collapse to one space.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if matches!(ch, '.' | '!' | '?') {
            let mut end = i + 1;
            while end < chars.len() && matches!(chars[end], '.' | '!' | '?' | '"' | '\'' | ')' | ']') {
                end += 1;
            }
            if ends_sentence(&chars, start, i, end) {
                push_sentence(&mut sentences, &chars[start..end]);
                start = end;
            }
            i = end;
        } else {
            i += 1;
        }
    }
    push_sentence(&mut sentences, &chars[start..]);
    sentences
}

fn ends_sentence(chars: &[char], start: usize, term: usize, end: usize) -> bool {
    // Must be followed by whitespace then a capital.
    let mut j = end;
    if j >= chars.len() || !chars[j].is_whitespace() {
        return false;
    }
    while j < chars.len() && chars[j].is_whitespace() {
        j += 1;
    }
    if j < chars.len() && matches!(chars[j], '"' | '\'' | '(' | '[') {
        j += 1;
    }
    if j >= chars.len() || !chars[j].is_uppercase() {
        return false;
    }
    if chars[term] != '.' {
        return true;
    }
    let mut w = term;
    while w > start && !chars[w - 1].is_whitespace() && chars[w - 1] != '(' {
        w -= 1;
    }
    let word: String = chars[w..term].iter().collect::<String>().to_lowercase();
    !ABBREVIATIONS.contains(&word.as_str())
}

fn push_sentence(out: &mut Vec<String>, chars: &[char]) {
    let s: String = chars.iter().collect();
    let collapsed = s.split_whitespace().collect::<Vec<_>>().join(" ");
    if !collapsed.is_empty() {
        out.push(collapsed);
    }
}

/// Case-insensitive search for `needle` in `haystack` where a match may not
/// extend an alphanumeric run on either side. `haystack_lower` must be the
/// ASCII-lowercased haystack and `needle_lower` the lowercased needle.
pub fn contains_on_word_boundary(haystack_lower: &str, needle_lower: &str) -> bool {
    if needle_lower.is_empty() {
        return false;
    }
    let hay = haystack_lower.as_bytes();
    let needle = needle_lower.as_bytes();
    let first_alnum = needle[0].is_ascii_alphanumeric();
    let last_alnum = needle[needle.len() - 1].is_ascii_alphanumeric();
    let mut from = 0;
    while let Some(pos) = haystack_lower[from..].find(needle_lower) {
        let at = from + pos;
        let end = at + needle.len();
        let left_ok = !first_alnum || at == 0 || !hay[at - 1].is_ascii_alphanumeric();
        let right_ok = !last_alnum || end == hay.len() || !hay[end].is_ascii_alphanumeric();
        if left_ok && right_ok {
            return true;
        }
        from = at + haystack_lower[at..].chars().next().map_or(1, char::len_utf8);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ascii_folding_examples() {
        assert_eq!(normalize_ascii("café"), "cafe");
        assert_eq!(normalize_ascii("hello"), "hello");
        assert_eq!(normalize_ascii("naïve—test"), "naive-test");
        assert_eq!(normalize_ascii("“Straße” … ﬁn"), "\"Strasse\" ... fin");
        assert_eq!(normalize_ascii("Łódź 北京"), "Lodz ");
    }

    #[test]
    fn sentence_examples() {
        assert_eq!(split_sentences("A is B. C is D."), vec!["A is B.", "C is D."]);
        assert_eq!(
            split_sentences("Dr. Smith died in 1999. He was 80."),
            vec!["Dr. Smith died in 1999.", "He was 80."]
        );
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("   \n ").is_empty());
        assert_eq!(
            split_sentences("Written by Mr. Adams. Really? Yes!  It  is."),
            vec!["Written by Mr. Adams.", "Really?", "Yes!", "It is."]
        );
        assert_eq!(split_sentences("Pi is 3.14 exactly. ok."), vec!["Pi is 3.14 exactly. ok."]);
        assert_eq!(split_sentences("He said \"Go.\" Then left."), vec!["He said \"Go.\"", "Then left."]);
    }

    #[test]
    fn word_boundary_matching() {
        assert!(contains_on_word_boundary("it stars y.", "y"));
        assert!(!contains_on_word_boundary("yearly report", "y"));
        assert!(contains_on_word_boundary("made by warner bros. in 2005", "warner bros."));
        assert!(contains_on_word_boundary("yy y", "y"));
        assert!(!contains_on_word_boundary("anything", ""));
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent_and_ascii(s in "\\PC{0,40}") {
            let once = normalize_ascii(&s);
            prop_assert!(once.is_ascii());
            prop_assert_eq!(normalize_ascii(&once), once);
        }

        #[test]
        fn split_preserves_content(s in "[A-Za-z0-9 .!?\"]{0,80}") {
            let parts = split_sentences(&s);
            prop_assert!(parts.iter().all(|p| !p.is_empty()));
            let joined: String = parts.concat().chars().filter(|c| !c.is_whitespace()).collect();
            let original: String = s.chars().filter(|c| !c.is_whitespace()).collect();
            prop_assert_eq!(joined, original);
        }
    }
}
