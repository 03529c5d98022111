//! Writing quality score (WQS).
//!
//! ```text
//! wqs = 100 · (1 − min(1, 0.5·min(1, density/0.05) + 0.3·mechanics + 0.2·readability))
//! ```
//!
//! where `density` is low-quality term hits per token, `mechanics` combines
//! shouting capitals and repeated terminal punctuation, and `readability`
//! is the Flesch–Kincaid grade's distance from the accepted band, over 6.
//! All weights are configurable.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::model::{AnalysisResult, Criterion};
use crate::text::{raw_tokens, split_sentences, syllables, tokenize};

/// Curated low-quality terms and phrases, stored as token sequences.
#[derive(Debug, Clone, Default)]
pub struct TermList {
    /// Phrases grouped by their first token, longest first.
    by_first: BTreeMap<String, Vec<(Vec<String>, String)>>,
    len: usize,
}

impl TermList {
    /// One term or phrase per line; `#` starts a comment.
    pub fn parse(text: &str) -> Self {
        let mut list = TermList::default();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                list.insert(line);
            }
        }
        list
    }

    pub fn insert(&mut self, phrase: &str) {
        let tokens = tokenize(phrase);
        let Some(first) = tokens.first().cloned() else { return };
        let bucket = self.by_first.entry(first).or_default();
        if !bucket.iter().any(|(t, _)| *t == tokens) {
            bucket.push((tokens, phrase.trim().to_lowercase()));
            bucket.sort_by_key(|(p, _)| std::cmp::Reverse(p.len()));
            self.len += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Left-to-right scan taking the longest phrase at each position;
    /// matches never overlap.
    pub fn find_matches(&self, tokens: &[String]) -> Vec<String> {
        self.spans(tokens).into_iter().map(|(_, _, p)| p.to_string()).collect()
    }

    /// `(start, token length, phrase)` of each match of [`Self::find_matches`].
    pub fn spans(&self, tokens: &[String]) -> Vec<(usize, usize, &str)> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let hit =
                self.by_first.get(&tokens[i]).and_then(|cands| cands.iter().find(|(p, _)| tokens[i..].starts_with(p)));
            match hit {
                Some((p, phrase)) => {
                    out.push((i, p.len(), phrase.as_str()));
                    i += p.len();
                }
                None => i += 1,
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WqsConfig {
    pub threshold: f64,
    pub min_tokens: usize,
    pub grade_band: [f64; 2],
    pub density_scale: f64,
    pub weight_terms: f64,
    pub weight_mechanics: f64,
    pub weight_readability: f64,
}

impl Default for WqsConfig {
    fn default() -> Self {
        WqsConfig {
            threshold: 50.0,
            min_tokens: 30,
            grade_band: [6.0, 16.0],
            density_scale: 0.05,
            weight_terms: 0.5,
            weight_mechanics: 0.3,
            weight_readability: 0.2,
        }
    }
}

impl WqsConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=100.0).contains(&self.threshold) {
            return Err(format!("writing_quality.threshold must lie in [0, 100], got {}", self.threshold));
        }
        if self.grade_band[0] > self.grade_band[1] {
            return Err("writing_quality.grade_band must be ordered [low, high]".into());
        }
        if self.density_scale.is_nan() || self.density_scale <= 0.0 {
            return Err("writing_quality.density_scale must be > 0".into());
        }
        for w in [self.weight_terms, self.weight_mechanics, self.weight_readability] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err("writing_quality weights must be >= 0".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WqsBreakdown {
    pub token_count: usize,
    pub sentence_count: usize,
    pub matched_terms: Vec<String>,
    pub lowq_density: f64,
    pub caps_ratio: f64,
    pub bang_ratio: f64,
    pub mechanics_penalty: f64,
    pub fk_grade: f64,
    pub readability_penalty: f64,
    pub wqs: f64,
}

/// Flesch–Kincaid grade level.
pub fn flesch_kincaid_grade(words: usize, sentences: usize, syllable_count: usize) -> f64 {
    if words == 0 || sentences == 0 {
        return 0.0;
    }
    0.39 * (words as f64 / sentences as f64) + 11.8 * (syllable_count as f64 / words as f64) - 15.59
}

/// Runs of two or more terminal `!`/`?` characters (`!!`, `??`, `!?`, ...).
fn repeated_terminal_runs(text: &str) -> usize {
    let mut runs = 0;
    let mut len = 0;
    for c in text.chars().chain(std::iter::once(' ')) {
        if matches!(c, '!' | '?') {
            len += 1;
        } else {
            if len >= 2 {
                runs += 1;
            }
            len = 0;
        }
    }
    runs
}

fn is_shouting(token: &str) -> bool {
    token.chars().count() >= 3 && token.chars().any(char::is_uppercase) && !token.chars().any(char::is_lowercase)
}

/// Terms are matched within sentences. Mechanics and readability are
/// measured on the remaining words, so adding a listed phrase as its own
/// sentence moves only the density term.
pub fn compute_wqs(text: &str, terms: &TermList, config: &WqsConfig) -> WqsBreakdown {
    let mut token_count = 0;
    let mut matched_terms = Vec::new();
    let mut carrier: Vec<String> = Vec::new();
    let mut carrier_sentences = 0;
    for sentence in split_sentences(text) {
        let raw: Vec<&str> = raw_tokens(&sentence).collect();
        let tokens: Vec<String> = raw.iter().map(|t| t.to_lowercase()).collect();
        let mut covered = vec![false; raw.len()];
        for (start, len, phrase) in terms.spans(&tokens) {
            covered[start..start + len].iter_mut().for_each(|c| *c = true);
            matched_terms.push(phrase.to_string());
        }
        let before = carrier.len();
        carrier.extend(raw.iter().zip(&covered).filter(|(_, c)| !**c).map(|(t, _)| t.to_string()));
        if carrier.len() > before {
            carrier_sentences += 1;
        }
        token_count += raw.len();
    }
    let sentence_count = carrier_sentences.max(1);

    let lowq_density = if token_count == 0 { 0.0 } else { matched_terms.len() as f64 / token_count as f64 };
    let caps_ratio = if carrier.is_empty() {
        0.0
    } else {
        carrier.iter().filter(|t| is_shouting(t)).count() as f64 / carrier.len() as f64
    };
    let bang_ratio = repeated_terminal_runs(text) as f64 / sentence_count as f64;
    let mechanics_penalty = (2.0 * caps_ratio + 3.0 * bang_ratio).min(1.0);

    let syllable_count: usize = carrier.iter().map(|t| syllables(&t.to_lowercase())).sum();
    let fk_grade = flesch_kincaid_grade(carrier.len(), sentence_count, syllable_count);
    let [lo, hi] = config.grade_band;
    let readability_penalty = if carrier.is_empty() {
        0.0
    } else {
        let distance = if fk_grade < lo {
            lo - fk_grade
        } else if fk_grade > hi {
            fk_grade - hi
        } else {
            0.0
        };
        (distance / 6.0).min(1.0)
    };

    let density_scaled = (lowq_density / config.density_scale).min(1.0);
    let penalty = config.weight_terms * density_scaled
        + config.weight_mechanics * mechanics_penalty
        + config.weight_readability * readability_penalty;
    let wqs = 100.0 * (1.0 - penalty.min(1.0));

    WqsBreakdown {
        token_count,
        sentence_count,
        matched_terms,
        lowq_density,
        caps_ratio,
        bang_ratio,
        mechanics_penalty,
        fk_grade,
        readability_penalty,
        wqs,
    }
}

pub fn assess(breakdown: &WqsBreakdown, config: &WqsConfig) -> AnalysisResult {
    if breakdown.token_count < config.min_tokens {
        return AnalysisResult::unavailable(
            Criterion::WritingQuality,
            format!(
                "The text has {} words; at least {} are needed to rate its writing quality.",
                breakdown.token_count, config.min_tokens
            ),
        );
    }
    let score = if breakdown.wqs < config.threshold && config.threshold > 0.0 {
        (config.threshold - breakdown.wqs) / config.threshold
    } else {
        0.0
    };
    let explanation = if score > 0.0 {
        format!(
            "Writing quality score {:.0} is below {:.0}. Low writing quality is often a sign of amateur or \
             unprofessional news production rather than paid professional journalism.",
            breakdown.wqs, config.threshold
        )
    } else {
        format!(
            "Writing quality score {:.0} meets the professional standard of {:.0}.",
            breakdown.wqs, config.threshold
        )
    };
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for t in &breakdown.matched_terms {
        *counts.entry(t).or_default() += 1;
    }
    let mut top: Vec<(&str, usize)> = counts.into_iter().collect();
    top.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    top.truncate(10);
    let evidence = vec![
        json!({
            "wqs": breakdown.wqs,
            "lowq_density": breakdown.lowq_density,
            "mechanics_penalty": breakdown.mechanics_penalty,
            "readability_penalty": breakdown.readability_penalty,
            "fk_grade": breakdown.fk_grade,
        }),
        json!({ "top_terms": top.iter().map(|(t, n)| json!({"term": t, "count": n})).collect::<Vec<_>>() }),
    ];
    AnalysisResult::graded(Criterion::WritingQuality, score, explanation)
        .with_evidence(evidence)
        .with_measure("wqs", breakdown.wqs)
        .with_measure("threshold", config.threshold)
        .with_measure("lowQualityDensity", breakdown.lowq_density)
        .with_measure("mechanicsPenalty", breakdown.mechanics_penalty)
        .with_measure("readabilityPenalty", breakdown.readability_penalty)
        .with_measure("fkGrade", breakdown.fk_grade)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Status;
    use proptest::prelude::*;

    fn terms() -> TermList {
        TermList::parse("# test list\nshocking\nthey don't want you to know\nwake up\nsheeple\n")
    }

    #[test]
    fn longest_phrase_first_without_overlap() {
        let mut list = TermList::parse("wake\nwake up\nup");
        list.insert("wake up");
        assert_eq!(list.len(), 3);
        let toks = tokenize("wake up up wake");
        assert_eq!(list.find_matches(&toks), ["wake up", "up", "wake"]);
    }

    #[test]
    fn fk_grade_formula() {
        let g = flesch_kincaid_grade(100, 5, 150);
        assert!((g - (0.39 * 20.0 + 11.8 * 1.5 - 15.59)).abs() < 1e-12);
    }

    #[test]
    fn shouting_headline_saturates_mechanics() {
        let b = compute_wqs("BREAKING!!! THEY don't WANT you to KNOW THIS!!!", &terms(), &WqsConfig::default());
        assert_eq!(b.mechanics_penalty, 1.0);
        assert_eq!(b.matched_terms, ["they don't want you to know"]);
        assert!(b.wqs < 50.0);
    }

    #[test]
    fn repeated_punctuation_runs() {
        assert_eq!(repeated_terminal_runs("a!! b?? c!? d! e?"), 3);
        assert_eq!(repeated_terminal_runs("none."), 0);
    }

    #[test]
    fn assess_boundaries() {
        let cfg = WqsConfig::default();
        let mut b = compute_wqs(&vec!["word"; 40].join(" "), &terms(), &cfg);
        b.wqs = 50.0;
        assert_eq!(assess(&b, &cfg).status, Status::Pass);
        b.wqs = 25.0;
        let r = assess(&b, &cfg);
        assert_eq!(r.status, Status::Caution);
        assert!((r.score - 0.5).abs() < 1e-12);
        let short = compute_wqs(&["word"; 10].join(" "), &terms(), &cfg);
        assert_eq!(assess(&short, &cfg).status, Status::Unavailable);
    }

    proptest! {
        #[test]
        fn wqs_bounded(text in "[A-Za-z!?. ]{0,200}") {
            let b = compute_wqs(&text, &terms(), &WqsConfig::default());
            prop_assert!((0.0..=100.0).contains(&b.wqs));
        }
    }
}
