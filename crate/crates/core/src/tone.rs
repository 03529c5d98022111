//! Lexicon-based emotion scoring with threshold-deviation caution.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::model::{AnalysisResult, Criterion};
use crate::text::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emotion {
    Fear,
    Anger,
    Sadness,
    Doubt,
    Joy,
}

impl Emotion {
    pub const ALL: [Emotion; 5] = [Emotion::Fear, Emotion::Anger, Emotion::Sadness, Emotion::Doubt, Emotion::Joy];
    pub const NEGATIVE: [Emotion; 4] = [Emotion::Fear, Emotion::Anger, Emotion::Sadness, Emotion::Doubt];

    pub fn as_str(self) -> &'static str {
        match self {
            Emotion::Fear => "fear",
            Emotion::Anger => "anger",
            Emotion::Sadness => "sadness",
            Emotion::Doubt => "doubt",
            Emotion::Joy => "joy",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Emotion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Emotion::ALL.into_iter().find(|e| e.as_str() == s).ok_or_else(|| format!("unknown emotion `{s}`"))
    }
}

#[derive(Debug, thiserror::Error)]
#[error("emotion lexicon line {line}: {reason}")]
pub struct EmotionLexiconError {
    pub line: usize,
    pub reason: String,
}

/// Term → (emotion, weight) entries; one term may carry several emotions.
#[derive(Debug, Clone, Default)]
pub struct EmotionLexicon {
    entries: HashMap<String, Vec<(Emotion, f64)>>,
}

impl EmotionLexicon {
    /// Parses `term<TAB>emotion<TAB>weight` lines; `#` starts a comment.
    pub fn parse(tsv: &str) -> Result<Self, EmotionLexiconError> {
        let mut lex = EmotionLexicon::default();
        for (n, line) in tsv.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let err = |reason: String| EmotionLexiconError { line: n + 1, reason };
            let cols: Vec<&str> = line.split('\t').collect();
            let [term, emotion, weight] = cols[..] else {
                return Err(err("expected term<TAB>emotion<TAB>weight".into()));
            };
            let emotion: Emotion = emotion.trim().parse().map_err(err)?;
            let weight: f64 = weight.trim().parse().map_err(|_| err(format!("bad weight `{weight}`")))?;
            if !(weight >= 0.0 && weight.is_finite()) {
                return Err(err(format!("weight must be >= 0, got {weight}")));
            }
            lex.insert(term.trim(), emotion, weight);
        }
        Ok(lex)
    }

    pub fn insert(&mut self, term: &str, emotion: Emotion, weight: f64) {
        self.entries.entry(term.to_lowercase()).or_default().push((emotion, weight));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionProfile {
    /// Matched weight per 100 tokens.
    pub scores: BTreeMap<Emotion, f64>,
    pub token_count: usize,
    /// Lexicon terms found, with occurrence counts.
    pub matched_terms: BTreeMap<String, usize>,
}

pub fn score_emotions(text: &str, lexicon: &EmotionLexicon) -> EmotionProfile {
    let tokens = tokenize(text);
    let mut sums: BTreeMap<Emotion, f64> = Emotion::ALL.into_iter().map(|e| (e, 0.0)).collect();
    let mut matched_terms: BTreeMap<String, usize> = BTreeMap::new();
    for token in &tokens {
        if lexicon.entries.contains_key(token) {
            *matched_terms.entry(token.clone()).or_insert(0) += 1;
        }
    }
    // Summed per term in sorted order, so repeating the text scales every
    // partial sum by the same factor and the per-100 score is unchanged.
    for (term, count) in &matched_terms {
        for (emotion, weight) in &lexicon.entries[term] {
            *sums.get_mut(emotion).expect("all emotions seeded") += *count as f64 * weight;
        }
    }
    let token_count = tokens.len();
    let scores = sums
        .into_iter()
        .map(|(e, s)| (e, if token_count == 0 { 0.0 } else { 100.0 * s / token_count as f64 }))
        .collect();
    EmotionProfile { scores, token_count, matched_terms }
}

/// Per-emotion thresholds in per-100-token units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmotionThresholds {
    pub fear: f64,
    pub anger: f64,
    pub sadness: f64,
    pub doubt: f64,
    pub joy: f64,
}

impl Default for EmotionThresholds {
    fn default() -> Self {
        EmotionThresholds { fear: 1.5, anger: 1.5, sadness: 1.5, doubt: 2.0, joy: 0.5 }
    }
}

impl EmotionThresholds {
    pub fn get(&self, e: Emotion) -> f64 {
        match e {
            Emotion::Fear => self.fear,
            Emotion::Anger => self.anger,
            Emotion::Sadness => self.sadness,
            Emotion::Doubt => self.doubt,
            Emotion::Joy => self.joy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToneThresholds {
    pub thresholds: EmotionThresholds,
    pub min_tokens: usize,
}

impl Default for ToneThresholds {
    fn default() -> Self {
        ToneThresholds { thresholds: EmotionThresholds::default(), min_tokens: 20 }
    }
}

impl ToneThresholds {
    pub fn validate(&self) -> Result<(), String> {
        for e in Emotion::ALL {
            let t = self.thresholds.get(e);
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("tone threshold for {e} must be > 0, got {t}"));
            }
        }
        Ok(())
    }
}

/// Caution deviation per emotion.
///
/// Negative emotions deviate upward, `(score − θ)/θ`. Joy deviates downward,
/// `(θ − score)/θ`, and only counts once some negative emotion exceeds half
/// of its threshold.
pub fn deviations(profile: &EmotionProfile, thresholds: &ToneThresholds) -> BTreeMap<Emotion, f64> {
    let t = &thresholds.thresholds;
    let score = |e: Emotion| profile.scores.get(&e).copied().unwrap_or(0.0);
    let mut out = BTreeMap::new();
    let mut elevated = false;
    for e in Emotion::NEGATIVE {
        let theta = t.get(e);
        out.insert(e, ((score(e) - theta) / theta).max(0.0));
        elevated |= score(e) > theta / 2.0;
    }
    let joy_dev = if elevated { ((t.joy - score(Emotion::Joy)) / t.joy).max(0.0) } else { 0.0 };
    out.insert(Emotion::Joy, joy_dev);
    out
}

pub fn assess(profile: &EmotionProfile, thresholds: &ToneThresholds) -> AnalysisResult {
    if profile.token_count < thresholds.min_tokens {
        return AnalysisResult::unavailable(
            Criterion::Tone,
            format!(
                "The text has {} words; at least {} are needed to judge its tone.",
                profile.token_count, thresholds.min_tokens
            ),
        );
    }
    let devs = deviations(profile, thresholds);
    let score = devs.values().copied().fold(0.0, f64::max).min(1.0);
    let flagged: Vec<&str> = devs.iter().filter(|(_, d)| **d > 0.0).map(|(e, _)| e.as_str()).collect();
    let explanation = if flagged.is_empty() {
        "The language is within the expected emotional range for news reporting.".to_string()
    } else {
        format!("Emotionally charged language detected: {}.", flagged.join(", "))
    };
    let evidence = Emotion::ALL
        .iter()
        .map(|e| {
            json!({
                "emotion": e.as_str(),
                "score": profile.scores.get(e).copied().unwrap_or(0.0),
                "threshold": thresholds.thresholds.get(*e),
                "deviation": devs[e],
            })
        })
        .chain(std::iter::once(json!({ "matched_terms": profile.matched_terms })))
        .collect();
    let mut result = AnalysisResult::graded(Criterion::Tone, score, explanation)
        .with_evidence(evidence)
        .with_measure("tokenCount", profile.token_count as f64);
    for e in Emotion::ALL {
        result = result.with_measure(&format!("{}Score", e.as_str()), profile.scores[&e]);
    }
    result
}
