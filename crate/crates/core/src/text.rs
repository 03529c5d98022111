//! Shared text primitives: tokenizer, sentence splitter, syllable estimate.
//!
//! Every analyzer tokenizes through this module so that token counts agree
//! across tone, writing quality and retrieval.

/// Tokens ending in a period that never close a sentence.
const ABBREVIATIONS: &[&str] =
    &["mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "vs.", "u.s.", "u.k.", "e.g.", "i.e."];

/// Words in original case: maximal runs of Unicode alphanumerics.
pub fn raw_tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty())
}

/// Lowercased word tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    raw_tokens(text).map(str::to_lowercase).collect()
}

/// Splits on `.`, `!` or `?` (runs allowed) when followed by whitespace and
/// then an uppercase letter or digit. A lone period after a listed
/// abbreviation does not split.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (_, c) = chars[i];
        if !is_terminal(c) {
            i += 1;
            continue;
        }
        let run_start = i;
        while i < chars.len() && is_terminal(chars[i].1) {
            i += 1;
        }
        let run_end = i;
        let mut j = run_end;
        while j < chars.len() && chars[j].1.is_whitespace() {
            j += 1;
        }
        if j == run_end || j == chars.len() {
            continue;
        }
        let next = chars[j].1;
        if !(next.is_uppercase() || next.is_ascii_digit()) {
            continue;
        }
        let byte_end = chars.get(run_end).map_or(text.len(), |(b, _)| *b);
        if run_end - run_start == 1 && chars[run_start].1 == '.' {
            let word_start = text[..byte_end].rfind(char::is_whitespace).map_or(0, |p| p + 1);
            let word = text[word_start.max(start)..byte_end].to_lowercase();
            if ABBREVIATIONS.contains(&word.as_str()) {
                continue;
            }
        }
        push_trimmed(&mut sentences, &text[start..byte_end]);
        start = chars[j].0;
        i = j;
    }
    push_trimmed(&mut sentences, &text[start..]);
    sentences
}

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_string());
    }
}

/// Vowel-group syllable estimate, at least one per word.
pub fn syllables(word: &str) -> usize {
    let mut groups = 0;
    let mut in_group = false;
    for c in word.chars().flat_map(char::to_lowercase) {
        let vowel = matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
        if vowel && !in_group {
            groups += 1;
        }
        in_group = vowel;
    }
    groups.max(1)
}

/// Title joined to body as one analyzable text.
pub fn join_title_body(title: Option<&str>, body: Option<&str>) -> String {
    match (title.map(str::trim), body.map(str::trim)) {
        (Some(t), Some(b)) if !t.is_empty() && !b.is_empty() => {
            if t.ends_with(['.', '!', '?']) {
                format!("{t} {b}")
            } else {
                format!("{t}. {b}")
            }
        }
        (Some(t), _) if !t.is_empty() => t.to_string(),
        (_, Some(b)) => b.to_string(),
        _ => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_lowercases_and_splits_on_non_alphanumerics() {
        assert_eq!(tokenize("Hello, WORLD! don't 2021"), ["hello", "world", "don", "t", "2021"]);
        assert!(tokenize("  ... ").is_empty());
        assert_eq!(tokenize("Café naïve"), ["café", "naïve"]);
    }

    #[test]
    fn sentences_split_on_terminal_before_uppercase() {
        let s = split_sentences("The vote passed. Turnout was 62 percent! Was it fair? 3 judges said yes.");
        assert_eq!(s.len(), 4);
        assert_eq!(s[1], "Turnout was 62 percent!");
    }

    #[test]
    fn abbreviations_do_not_split() {
        let s = split_sentences("Dr. Smith met Mr. Jones in the U.S. Capitol. They talked.");
        assert_eq!(s, ["Dr. Smith met Mr. Jones in the U.S. Capitol.", "They talked."]);
        let s = split_sentences("It rose, e.g. Oil did. Prices fell.");
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn lowercase_continuation_and_runs() {
        assert_eq!(split_sentences("Values like 3.5 or v. low remain. Next").len(), 2);
        assert_eq!(split_sentences("BREAKING!!! They lie?! Yes.").len(), 3);
        assert!(split_sentences("").is_empty());
        assert_eq!(split_sentences("no terminal punctuation"), ["no terminal punctuation"]);
    }

    #[test]
    fn syllable_estimate() {
        assert_eq!(syllables("cat"), 1);
        assert_eq!(syllables("reading"), 2);
        assert_eq!(syllables("government"), 3);
        assert_eq!(syllables("2021"), 1);
        assert_eq!(syllables("rhythm"), 1);
    }

    #[test]
    fn title_body_join() {
        assert_eq!(join_title_body(Some("Hi"), Some("There.")), "Hi. There.");
        assert_eq!(join_title_body(Some("Hi?"), Some("There.")), "Hi? There.");
        assert_eq!(join_title_body(None, Some("x")), "x");
        assert_eq!(join_title_body(None, None), "");
    }
}
