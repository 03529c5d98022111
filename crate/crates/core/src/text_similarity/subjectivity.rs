use std::collections::HashMap;

use crate::text::tokenize;

#[derive(Debug, thiserror::Error)]
#[error("subjectivity lexicon line {line}: {reason}")]
pub struct LexiconParseError {
    pub line: usize,
    pub reason: String,
}

/// Term → subjectivity weight in `[0, 1]`, loaded from `term<TAB>weight`.
#[derive(Debug, Clone, Default)]
pub struct SubjectivityLexicon {
    weights: HashMap<String, f64>,
}

impl SubjectivityLexicon {
    pub fn parse(tsv: &str) -> Result<Self, LexiconParseError> {
        let mut weights = HashMap::new();
        for (n, line) in tsv.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: &str| LexiconParseError { line: n + 1, reason: reason.to_string() };
            let (term, weight) = line.split_once('\t').ok_or_else(|| err("expected term<TAB>weight"))?;
            let weight: f64 = weight.trim().parse().map_err(|_| err("weight is not a number"))?;
            if !(0.0..=1.0).contains(&weight) {
                return Err(err("weight outside [0, 1]"));
            }
            weights.insert(term.trim().to_lowercase(), weight);
        }
        Ok(SubjectivityLexicon { weights })
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        SubjectivityLexicon { weights: pairs.into_iter().map(|(t, w)| (t.to_lowercase(), w)).collect() }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Mean weight over every token occurrence found in the lexicon; 0 when
    /// nothing matches.
    pub fn score(&self, sentence: &str) -> f64 {
        let (sum, hits) = tokenize(sentence)
            .iter()
            .filter_map(|t| self.weights.get(t))
            .fold((0.0, 0usize), |(s, n), w| (s + w, n + 1));
        if hits == 0 {
            0.0
        } else {
            sum / hits as f64
        }
    }
}
