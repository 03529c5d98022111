use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::par::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
    pub top_k: usize,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75, top_k: 10 }
    }
}

impl Bm25Params {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.k1 > 0.0 && self.k1.is_finite()) {
            return Err(format!("k1 must be > 0, got {}", self.k1));
        }
        if !(0.0..=1.0).contains(&self.b) {
            return Err(format!("b must lie in [0, 1], got {}", self.b));
        }
        if self.top_k == 0 {
            return Err("top_k must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct DocStats {
    doc_id: String,
    tf: HashMap<String, u32>,
    len: u32,
}

/// In-memory BM25 index over pre-tokenized documents.
#[derive(Debug, Clone, Default)]
pub struct Bm25Index {
    docs: Vec<DocStats>,
    df: HashMap<String, u32>,
    total_len: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexStats {
    pub documents: usize,
    pub vocabulary: usize,
    pub total_tokens: u64,
}

impl Bm25Index {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, doc_id: &str, tokens: &[String]) {
        let mut tf: HashMap<String, u32> = HashMap::new();
        for t in tokens {
            *tf.entry(t.clone()).or_default() += 1;
        }
        for term in tf.keys() {
            *self.df.entry(term.clone()).or_default() += 1;
        }
        self.total_len += tokens.len() as u64;
        self.docs.push(DocStats { doc_id: doc_id.to_string(), tf, len: tokens.len() as u32 });
    }

    pub fn stats(&self) -> IndexStats {
        IndexStats { documents: self.docs.len(), vocabulary: self.df.len(), total_tokens: self.total_len }
    }

    pub fn contains_term(&self, term: &str) -> bool {
        self.df.contains_key(term)
    }

    /// `ln(1 + (N − df + 0.5) / (df + 0.5))`.
    fn idf(&self, df: u32) -> f64 {
        let n = self.docs.len() as f64;
        let df = df as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    /// Scores every document containing at least one query term; the query
    /// is treated as a set of distinct terms. Ranked by descending score,
    /// ties by ascending doc id, truncated to `top_k`.
    pub fn search(&self, query: &[String], params: &Bm25Params, exec: Execution) -> Vec<(String, f64)> {
        if self.docs.is_empty() {
            return Vec::new();
        }
        let terms: Vec<(&str, f64)> = query
            .iter()
            .map(String::as_str)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .filter_map(|t| self.df.get(t).map(|&df| (t, self.idf(df))))
            .collect();
        if terms.is_empty() {
            return Vec::new();
        }
        let avgdl = self.total_len as f64 / self.docs.len() as f64;
        let Bm25Params { k1, b, top_k } = *params;
        let mut scored: Vec<(String, f64)> = exec.filter_map(&self.docs, |doc| {
            let mut score = 0.0;
            let mut hit = false;
            let norm = k1 * (1.0 - b + b * doc.len as f64 / avgdl);
            for (term, idf) in &terms {
                if let Some(&tf) = doc.tf.get(*term) {
                    let tf = tf as f64;
                    score += idf * (tf * (k1 + 1.0)) / (tf + norm);
                    hit = true;
                }
            }
            hit.then(|| (doc.doc_id.clone(), score))
        });
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(top_k);
        scored
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    #[test]
    fn empty_index_and_oov_queries_return_nothing() {
        let mut index = Bm25Index::new();
        assert!(index.search(&tokenize("apple"), &Bm25Params::default(), Execution::Sequential).is_empty());
        index.add("d1", &tokenize("apple banana"));
        assert!(index.search(&tokenize("zebra quokka"), &Bm25Params::default(), Execution::Sequential).is_empty());
    }

    #[test]
    fn two_document_hand_evaluation() {
        let mut index = Bm25Index::new();
        index.add("d1", &tokenize("apple banana"));
        index.add("d2", &tokenize("apple apple cherry"));
        let hits = index.search(&tokenize("apple"), &Bm25Params::default(), Execution::Sequential);
        // N = 2, df = 2: idf = ln(1 + 0.5/2.5) = ln 1.2; avgdl = 2.5.
        let idf = 1.2f64.ln();
        let d1 = idf * (1.0 * 2.2) / (1.0 + 1.2 * (0.25 + 0.75 * 2.0 / 2.5));
        let d2 = idf * (2.0 * 2.2) / (2.0 + 1.2 * (0.25 + 0.75 * 3.0 / 2.5));
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].0, "d2");
        assert!((hits[0].1 - d2).abs() < 1e-12);
        assert!((hits[1].1 - d1).abs() < 1e-12);
    }

    #[test]
    fn ties_break_by_doc_id_and_top_k_truncates() {
        let mut index = Bm25Index::new();
        for id in ["c", "a", "b"] {
            index.add(id, &tokenize("same words here"));
        }
        let params = Bm25Params { top_k: 2, ..Default::default() };
        let hits = index.search(&tokenize("words"), &params, Execution::Parallel);
        assert_eq!(hits.iter().map(|h| h.0.as_str()).collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn params_validation() {
        assert!(Bm25Params::default().validate().is_ok());
        assert!(Bm25Params { k1: 0.0, ..Default::default() }.validate().is_err());
        assert!(Bm25Params { b: 1.5, ..Default::default() }.validate().is_err());
    }
}
