//! Fact verification against a corpus of trusted articles.
//!
//! Articles are retrieved with BM25 over their title and first ten
//! sentences only. Low-subjectivity sentences of the query become facts;
//! a fact is verified when some fact of a retrieved article (taken from the
//! full body) has embedding cosine at least `tau_sim`.

mod bm25;
mod embed;
mod subjectivity;

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use serde_json::json;

pub use bm25::{Bm25Index, Bm25Params, IndexStats};
pub use embed::{cosine, Embedder, TrigramEmbedder};
pub use subjectivity::{LexiconParseError, SubjectivityLexicon};

use crate::model::{AnalysisResult, Criterion, Status};
use crate::par::Execution;
use crate::text::{split_sentences, tokenize};

/// Number of leading body sentences that enter the retrieval index.
pub const LEAD_SENTENCES: usize = 10;

#[derive(Debug, thiserror::Error)]
pub enum TextIndexError {
    #[error("article `{0}` has an empty body")]
    EmptyBody(String),
    #[error("article `{0}` is already indexed with different content")]
    Conflict(String),
    #[error("corpus i/o error at {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("corpus file {path} is not a valid article: {source}")]
    Parse { path: String, source: serde_json::Error },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleInput {
    pub doc_id: String,
    pub title: String,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactSentence {
    pub text: String,
    pub subjectivity: f64,
    #[serde(skip)]
    pub embedding: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrustedArticle {
    pub doc_id: String,
    pub title: String,
    pub lead: Vec<String>,
    pub full_facts: Vec<FactSentence>,
    #[serde(skip)]
    body: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FactThresholds {
    pub tau_subj: f64,
    pub tau_sim: f64,
    pub tau_ratio: f64,
    pub min_facts: usize,
}

impl Default for FactThresholds {
    fn default() -> Self {
        FactThresholds { tau_subj: 0.3, tau_sim: 0.75, tau_ratio: 0.5, min_facts: 3 }
    }
}

impl FactThresholds {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("tau_subj", self.tau_subj), ("tau_sim", self.tau_sim)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if !(self.tau_ratio > 0.0 && self.tau_ratio <= 1.0) {
            return Err(format!("tau_ratio must lie in (0, 1], got {}", self.tau_ratio));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactMatch {
    pub query_fact: String,
    pub best_match: Option<String>,
    pub best_doc: Option<String>,
    pub cosine: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityVerdict {
    pub total_facts: usize,
    pub verified_facts: usize,
    pub ratio: f64,
    pub matches: Vec<FactMatch>,
    pub retrieved: Vec<(String, f64)>,
    pub status: Status,
    pub score: f64,
}

#[derive(Default)]
struct Corpus {
    bm25: Bm25Index,
    articles: Vec<TrustedArticle>,
    by_id: HashMap<String, usize>,
}

pub struct TextSimilarity {
    corpus: RwLock<Corpus>,
    embedder: Arc<dyn Embedder>,
    lexicon: SubjectivityLexicon,
    pub params: Bm25Params,
    pub thresholds: FactThresholds,
    pub exec: Execution,
}

impl TextSimilarity {
    pub fn new(lexicon: SubjectivityLexicon, params: Bm25Params, thresholds: FactThresholds) -> Self {
        Self::with_embedder(Arc::new(TrigramEmbedder::default()), lexicon, params, thresholds)
    }

    pub fn with_embedder(
        embedder: Arc<dyn Embedder>,
        lexicon: SubjectivityLexicon,
        params: Bm25Params,
        thresholds: FactThresholds,
    ) -> Self {
        TextSimilarity {
            corpus: RwLock::new(Corpus::default()),
            embedder,
            lexicon,
            params,
            thresholds,
            exec: Execution::default(),
        }
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn subjectivity(&self) -> &SubjectivityLexicon {
        &self.lexicon
    }

    /// Sentences with subjectivity at most `tau_subj`, embedded.
    pub fn extract_facts(&self, text: &str, tau_subj: f64) -> Vec<FactSentence> {
        split_sentences(text)
            .into_iter()
            .filter(|s| !tokenize(s).is_empty())
            .filter_map(|s| {
                let subjectivity = self.lexicon.score(&s);
                (subjectivity <= tau_subj).then(|| FactSentence {
                    embedding: self.embedder.embed(&s),
                    text: s,
                    subjectivity,
                })
            })
            .collect()
    }

    fn prepare(&self, input: &ArticleInput) -> Result<(TrustedArticle, Vec<String>), TextIndexError> {
        if input.body.trim().is_empty() {
            return Err(TextIndexError::EmptyBody(input.doc_id.clone()));
        }
        let lead: Vec<String> = split_sentences(&input.body).into_iter().take(LEAD_SENTENCES).collect();
        let mut tokens = tokenize(&input.title);
        for s in &lead {
            tokens.extend(tokenize(s));
        }
        let article = TrustedArticle {
            doc_id: input.doc_id.clone(),
            title: input.title.clone(),
            lead,
            full_facts: self.extract_facts(&input.body, self.thresholds.tau_subj),
            body: input.body.clone(),
        };
        Ok((article, tokens))
    }

    pub fn index_article(&self, input: &ArticleInput) -> Result<TrustedArticle, TextIndexError> {
        Ok(self.index_articles(std::slice::from_ref(input))?.remove(0))
    }

    /// Indexes a batch. Sentence splitting and fact embedding run under the
    /// configured execution mode; the index itself is updated under one
    /// write lock. Already-indexed identical articles are returned as-is.
    pub fn index_articles(&self, inputs: &[ArticleInput]) -> Result<Vec<TrustedArticle>, TextIndexError> {
        let prepared = self.exec.map(inputs, |input| self.prepare(input));
        let mut corpus = self.corpus.write().expect("corpus lock poisoned");
        let mut out = Vec::with_capacity(inputs.len());
        for (input, prepared) in inputs.iter().zip(prepared) {
            if let Some(&idx) = corpus.by_id.get(&input.doc_id) {
                let existing = &corpus.articles[idx];
                if existing.title != input.title || existing.body != input.body {
                    return Err(TextIndexError::Conflict(input.doc_id.clone()));
                }
                out.push(existing.clone());
                continue;
            }
            let (article, tokens) = prepared?;
            corpus.bm25.add(&article.doc_id, &tokens);
            let idx = corpus.articles.len();
            corpus.by_id.insert(article.doc_id.clone(), idx);
            corpus.articles.push(article.clone());
            out.push(article);
        }
        Ok(out)
    }

    /// Loads every `*.json` article in `dir` (sorted by file name).
    pub fn load_corpus_dir(&self, dir: &Path) -> Result<usize, TextIndexError> {
        let io_err = |path: &Path, source| TextIndexError::Io { path: path.display().to_string(), source };
        let mut paths: Vec<_> = fs::read_dir(dir)
            .map_err(|e| io_err(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        let mut inputs = Vec::with_capacity(paths.len());
        for path in &paths {
            let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            let article: ArticleInput = serde_json::from_str(&text)
                .map_err(|source| TextIndexError::Parse { path: path.display().to_string(), source })?;
            inputs.push(article);
        }
        Ok(self.index_articles(&inputs)?.len())
    }

    pub fn stats(&self) -> IndexStats {
        self.corpus.read().expect("corpus lock poisoned").bm25.stats()
    }

    pub fn article(&self, doc_id: &str) -> Option<TrustedArticle> {
        let corpus = self.corpus.read().expect("corpus lock poisoned");
        corpus.by_id.get(doc_id).map(|&i| corpus.articles[i].clone())
    }

    pub fn search(&self, query_text: &str, params: &Bm25Params) -> Vec<(String, f64)> {
        let corpus = self.corpus.read().expect("corpus lock poisoned");
        corpus.bm25.search(&tokenize(query_text), params, self.exec)
    }

    /// Retrieval query for an article: its title plus leading sentences.
    fn retrieval_query(title: &str, body: &str) -> String {
        let mut q = title.to_string();
        for s in split_sentences(body).into_iter().take(LEAD_SENTENCES) {
            q.push(' ');
            q.push_str(&s);
        }
        q
    }

    pub fn verify(&self, title: &str, body: &str) -> SimilarityVerdict {
        self.verify_with(title, body, &self.params, &self.thresholds)
    }

    pub fn verify_with(
        &self,
        title: &str,
        body: &str,
        params: &Bm25Params,
        thresholds: &FactThresholds,
    ) -> SimilarityVerdict {
        let corpus = self.corpus.read().expect("corpus lock poisoned");
        let retrieved = corpus.bm25.search(&tokenize(&Self::retrieval_query(title, body)), params, self.exec);
        let facts = self.extract_facts(body, thresholds.tau_subj);
        let candidates: Vec<(&str, &FactSentence)> = retrieved
            .iter()
            .flat_map(|(doc_id, _)| {
                let article = &corpus.articles[corpus.by_id[doc_id]];
                article.full_facts.iter().map(move |f| (article.doc_id.as_str(), f))
            })
            .collect();

        let matches: Vec<FactMatch> = self.exec.map(&facts, |fact| {
            let mut best: Option<(&str, &FactSentence, f64)> = None;
            for (doc, cand) in &candidates {
                let c = cosine(&fact.embedding, &cand.embedding);
                if best.is_none_or(|(_, _, b)| c > b) {
                    best = Some((doc, cand, c));
                }
            }
            FactMatch {
                query_fact: fact.text.clone(),
                best_match: best.map(|(_, f, _)| f.text.clone()),
                best_doc: best.map(|(d, _, _)| d.to_string()),
                cosine: best.map_or(0.0, |(_, _, c)| c),
            }
        });

        let total_facts = facts.len();
        let verified_facts =
            matches.iter().filter(|m| m.best_match.is_some() && m.cosine >= thresholds.tau_sim).count();
        let ratio = if total_facts > 0 { verified_facts as f64 / total_facts as f64 } else { 0.0 };
        let (status, score) = if retrieved.is_empty() || total_facts < thresholds.min_facts {
            (Status::Unavailable, 0.0)
        } else if ratio < thresholds.tau_ratio {
            (Status::Caution, (thresholds.tau_ratio - ratio) / thresholds.tau_ratio)
        } else {
            (Status::Pass, 0.0)
        };
        SimilarityVerdict { total_facts, verified_facts, ratio, matches, retrieved, status, score }
    }

    pub fn to_result(&self, verdict: &SimilarityVerdict) -> AnalysisResult {
        let t = &self.thresholds;
        let explanation = match verdict.status {
            Status::Unavailable if verdict.retrieved.is_empty() => {
                "No similar trusted articles were found to check the facts against.".to_string()
            }
            Status::Unavailable => format!(
                "Only {} factual sentences were found; at least {} are needed to compare against trusted sources.",
                verdict.total_facts, t.min_facts
            ),
            Status::Caution => format!(
                "Only {} of {} factual statements could be matched in trusted articles.",
                verdict.verified_facts, verdict.total_facts
            ),
            Status::Pass => format!(
                "{} of {} factual statements were matched in trusted articles.",
                verdict.verified_facts, verdict.total_facts
            ),
        };
        let mut result = match verdict.status {
            Status::Unavailable => AnalysisResult::unavailable(Criterion::TextSimilarity, explanation),
            _ => AnalysisResult::graded(Criterion::TextSimilarity, verdict.score, explanation),
        };
        let evidence = verdict
            .matches
            .iter()
            .map(|m| {
                json!({
                    "fact": m.query_fact,
                    "best_match": m.best_match,
                    "doc_id": m.best_doc,
                    "cosine": m.cosine,
                    "verified": m.best_match.is_some() && m.cosine >= t.tau_sim,
                })
            })
            .collect();
        result = result
            .with_evidence(evidence)
            .with_measure("verifiedFactRatio", verdict.ratio)
            .with_measure("totalFacts", verdict.total_facts as f64)
            .with_measure("verifiedFacts", verdict.verified_facts as f64)
            .with_measure("retrievedArticles", verdict.retrieved.len() as f64)
            .with_measure("threshold", t.tau_ratio);
        result
    }
}
