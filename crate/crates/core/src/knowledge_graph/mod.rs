//! Triple store holding analysis bundles as a browsable graph.

mod mapping;
mod store;
mod term;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

pub use mapping::*;
pub use store::{GraphStore, Pattern, Transaction, TripleStore};
pub use term::{Datatype, Term, Triple, AGENT, BIB, PREFIXES, PROV_DATA, PROV_OBS, RDF, RDF_TYPE, XSD};

use crate::model::{
    AnalysisBundle, AnalysisResult, AssetId, Criterion, EngagementScore, LedgerReceipt, Status, TopicAssignment,
    VerificationRecord,
};
use crate::Digest;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph log i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("graph log line {line}: {message}")]
    Log { line: usize, message: String },
    #[error("rejected bundle: {0}")]
    InvalidBundle(String),
}

/// Counts for one `store_bundle` call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoreOutcome {
    /// Triples the bundle maps to.
    pub emitted: usize,
    pub inserted: usize,
    pub retracted: usize,
}

#[derive(Debug, Default)]
pub struct KnowledgeGraph {
    graph: GraphStore,
}

impl KnowledgeGraph {
    pub fn in_memory() -> Self {
        KnowledgeGraph { graph: GraphStore::in_memory() }
    }

    /// Opens (or creates) `graph.nt` under `dir`.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, GraphError> {
        std::fs::create_dir_all(dir.as_ref())?;
        Ok(KnowledgeGraph { graph: GraphStore::open(dir.as_ref().join("graph.nt"))? })
    }

    pub fn graph(&self) -> &GraphStore {
        &self.graph
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Writes a bundle, replacing everything previously stored for its asset.
    pub fn store_bundle(&self, bundle: &AnalysisBundle) -> Result<StoreOutcome, GraphError> {
        bundle.validate().map_err(GraphError::InvalidBundle)?;
        let triples = mapping::bundle_triples(bundle);
        let retract = self.graph.read(|s| owned_triples(s, &bundle.asset_id));
        let (retracted, inserted) = self.graph.commit(&Transaction { retract, assert: triples.clone() })?;
        Ok(StoreOutcome { emitted: triples.len(), inserted, retracted })
    }

    /// Triples matching `pat`, ordered by (s, p, o).
    pub fn matching(&self, pat: &Pattern) -> Vec<Triple> {
        let mut out = self.graph.matching(pat);
        out.sort();
        out
    }

    /// Asset ids of every stored asset, in IRI order.
    pub fn asset_ids(&self) -> Vec<AssetId> {
        self.graph.read(|s| s.subjects(RDF_TYPE, &Term::iri(ASSET_CLASS)).iter().filter_map(asset_id_of).collect())
    }

    pub fn get_verification(&self, id: &AssetId) -> Option<VerificationRecord> {
        self.graph.read(|s| read_record(s, id))
    }
}

pub fn asset_id_of(t: &Term) -> Option<AssetId> {
    t.as_iri()?.strip_prefix("prov-data:asset/")?.parse().ok()
}

/// Triples owned by one asset: its node, fragments, observations, and the
/// topic link pointing at it.
fn owned_triples(s: &TripleStore, id: &AssetId) -> Vec<Triple> {
    let a = asset_iri(id);
    let mut subjects = BTreeSet::new();
    for t in s.matching(&Pattern::sp(a.clone(), HAS_FRAGMENT)) {
        subjects.insert(t.object);
    }
    for o in s.subjects(HAS_ASSET, &a) {
        subjects.insert(o);
    }
    subjects.insert(a.clone());
    let mut out: Vec<Triple> = subjects.into_iter().flat_map(|sub| s.matching(&Pattern::subject(sub))).collect();
    out.extend(s.matching(&Pattern::po(HAS_ARTICLE, a)));
    out
}

fn literal<'a>(s: &'a TripleStore, sub: &Term, p: &str) -> Option<&'a str> {
    s.object(sub, p).map(Term::lexical)
}

fn read_record(s: &TripleStore, id: &AssetId) -> Option<VerificationRecord> {
    let a = asset_iri(id);
    if !s.contains(&Triple::new(a.clone(), RDF_TYPE, Term::iri(ASSET_CLASS))) {
        return None;
    }
    let int = |p: &str| s.object(&a, p).and_then(Term::as_i64).unwrap_or(0);
    let digest = |p: &str| literal(s, &a, p).and_then(|v| v.parse::<Digest>().ok()).unwrap_or(Digest::ZERO);
    let publisher =
        s.object(&a, PUBLISHER).and_then(|agent| literal(s, agent, AGENT_NAME)).unwrap_or_default().to_string();
    let topic = s.object(&a, IN_TOPIC).map(|t| read_topic(s, t)).unwrap_or_default();

    let mut results = BTreeMap::new();
    for o in s.subjects(HAS_ASSET, &a) {
        if let Some(r) = read_observation(s, &o) {
            results.insert(r.criterion, r);
        }
    }
    Some(VerificationRecord {
        asset_id: *id,
        url: literal(s, &a, URL).unwrap_or_default().to_string(),
        title: literal(s, &a, TITLE).map(str::to_string),
        publisher,
        topic,
        ledger_receipt: LedgerReceipt {
            asset_id: *id,
            block_index: int(BLOCK_INDEX) as u64,
            block_hash: digest(BLOCK_HASH),
            content_digest: digest(CONTENT_DIGEST),
        },
        engagement: EngagementScore {
            likes: int(LIKES) as u64,
            shares: int(SHARES) as u64,
            comments: int(COMMENTS) as u64,
            score: s.object(&a, ENGAGEMENT_SCORE).and_then(Term::as_f64).unwrap_or(0.0),
        },
        results,
    })
}

fn read_topic(s: &TripleStore, topic: &Term) -> TopicAssignment {
    let label = |t: &Term| literal(s, t, LABEL).unwrap_or_default().to_string();
    let category = s.subjects(HAS_TOPIC, topic).into_iter().next();
    let concept = category.as_ref().and_then(|k| s.subjects(HAS_CATEGORY, k).into_iter().next());
    TopicAssignment {
        concept: concept.as_ref().map(label).unwrap_or_default(),
        category: category.as_ref().map(label).unwrap_or_default(),
        topic: label(topic),
    }
}

fn read_observation(s: &TripleStore, o: &Term) -> Option<AnalysisResult> {
    let crit = s.object(o, HAS_CRITERION)?.as_iri()?.strip_prefix("prov-obs:criterion/")?;
    let criterion: Criterion = crit.parse().ok()?;
    let status: Status = literal(s, o, HAS_STATUS)?.parse().ok()?;
    let score = s.object(o, HAS_SCORE)?.as_f64()?;
    let evidence = literal(s, o, EVIDENCE).and_then(|e| serde_json::from_str(e).ok()).unwrap_or_default();
    let mut measures = BTreeMap::new();
    for t in s.matching(&Pattern::subject(o.clone())) {
        let p = t.predicate.lexical();
        if OBSERVATION_FIXED.contains(&p) {
            continue;
        }
        if let (Some(name), Some(v)) = (p.strip_prefix(PROV_OBS), t.object.as_f64()) {
            measures.insert(name.to_string(), v);
        }
    }
    Some(AnalysisResult {
        criterion,
        status,
        score,
        evidence,
        measures,
        explanation: literal(s, o, EXPLANATION).unwrap_or_default().to_string(),
    })
}
