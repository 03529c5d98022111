//! Asset workflow: fingerprint, fan out to analyzers, combine, store.

mod analyzers;
pub mod hooks;

use std::collections::HashMap;
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use chrono::Utc;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

pub use analyzers::{ImageAnalyzer, TextSimilarityAnalyzer, ToneAnalyzer, VideoAnalyzer, WritingQualityAnalyzer};

use crate::knowledge_graph::{GraphError, KnowledgeGraph};
use crate::ledger::{Ledger, LedgerError};
use crate::model::{AnalysisBundle, AnalysisResult, Asset, AssetId, Criterion, FragmentKind};
use crate::Digest;

pub const DEFAULT_ANALYZER_TIMEOUT: Duration = Duration::from_secs(30);
pub const ANALYZER_ERROR: &str = "analyzer error";

/// What an analyzer sees of an asset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzerInput {
    pub asset_id: AssetId,
    #[serde(default)]
    pub title: Option<String>,
    #[serde(default)]
    pub summary: Option<String>,
    #[serde(default)]
    pub body: Option<String>,
    #[serde(default)]
    pub images: Vec<Digest>,
    #[serde(default)]
    pub videos: Vec<Digest>,
}

impl AnalyzerInput {
    pub fn from_asset(asset: &Asset) -> Self {
        let text = |k| asset.text_of(k).map(str::to_string);
        let blobs = |k| asset.media(k).filter_map(|f| f.blob_digest().copied()).collect();
        AnalyzerInput {
            asset_id: asset.asset_id,
            title: text(FragmentKind::Title),
            summary: text(FragmentKind::Summary),
            body: text(FragmentKind::Body),
            images: blobs(FragmentKind::Image),
            videos: blobs(FragmentKind::Video),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{0}")]
pub struct AnalyzerError(pub String);

impl AnalyzerError {
    pub fn new(msg: impl Into<String>) -> Self {
        AnalyzerError(msg.into())
    }
}

/// One analysis service. Returns a result for each criterion it covers.
pub trait Analyzer: Send + Sync {
    fn name(&self) -> &str;
    fn criteria(&self) -> &[Criterion];
    fn analyze(&self, input: &AnalyzerInput) -> Result<Vec<AnalysisResult>, AnalyzerError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkflowStatus {
    Pending,
    Analyzing,
    Stored,
    Unknown,
}

#[derive(Debug, Error)]
pub enum WorkflowError {
    #[error("ledger registration failed: {0}")]
    Ledger(#[from] LedgerError),
    #[error("knowledge graph write failed: {0}")]
    Graph(#[from] GraphError),
}

/// Dispatches assets through the verification layer.
pub struct WorkflowHandler {
    ledger: Arc<Ledger>,
    graph: Arc<KnowledgeGraph>,
    analyzers: Vec<Arc<dyn Analyzer>>,
    timeout: Duration,
    status: Mutex<HashMap<AssetId, WorkflowStatus>>,
    locks: Mutex<HashMap<AssetId, Arc<Mutex<()>>>>,
}

impl WorkflowHandler {
    pub fn new(ledger: Arc<Ledger>, graph: Arc<KnowledgeGraph>, analyzers: Vec<Arc<dyn Analyzer>>) -> Self {
        WorkflowHandler {
            ledger,
            graph,
            analyzers,
            timeout: DEFAULT_ANALYZER_TIMEOUT,
            status: Mutex::new(HashMap::new()),
            locks: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn ledger(&self) -> &Arc<Ledger> {
        &self.ledger
    }

    pub fn graph(&self) -> &Arc<KnowledgeGraph> {
        &self.graph
    }

    pub fn analyzers(&self) -> &[Arc<dyn Analyzer>] {
        &self.analyzers
    }

    pub fn analyzer(&self, name: &str) -> Option<&Arc<dyn Analyzer>> {
        self.analyzers.iter().find(|a| a.name() == name)
    }

    pub fn status(&self, id: &AssetId) -> WorkflowStatus {
        self.status.lock().expect("status lock poisoned").get(id).copied().unwrap_or(WorkflowStatus::Unknown)
    }

    fn set_status(&self, id: AssetId, s: WorkflowStatus) -> WorkflowStatus {
        let mut map = self.status.lock().expect("status lock poisoned");
        map.insert(id, s).unwrap_or(WorkflowStatus::Unknown)
    }

    fn restore_status(&self, id: AssetId, previous: WorkflowStatus) {
        let mut map = self.status.lock().expect("status lock poisoned");
        if previous == WorkflowStatus::Unknown {
            map.remove(&id);
        } else {
            map.insert(id, previous);
        }
    }

    fn asset_lock(&self, id: AssetId) -> Arc<Mutex<()>> {
        self.locks.lock().expect("lock table poisoned").entry(id).or_default().clone()
    }

    /// Runs one asset end to end. The ledger receipt comes first; a ledger
    /// failure aborts, analyzer failures only degrade their criteria.
    pub fn submit(&self, asset: &Asset) -> Result<AnalysisBundle, WorkflowError> {
        let lock = self.asset_lock(asset.asset_id);
        let _guard = lock.lock().expect("asset lock poisoned");
        let previous = self.set_status(asset.asset_id, WorkflowStatus::Pending);

        let receipt = match self.ledger.fingerprint(asset) {
            Ok(r) => r,
            Err(e) => {
                self.restore_status(asset.asset_id, previous);
                return Err(e.into());
            }
        };
        self.set_status(asset.asset_id, WorkflowStatus::Analyzing);

        let results = self.dispatch(&AnalyzerInput::from_asset(asset));
        let bundle = AnalysisBundle {
            asset_id: asset.asset_id,
            asset: asset.meta(),
            ledger_receipt: receipt,
            results,
            engagement: asset.engagement,
            completed_at: Utc::now(),
        };
        if let Err(e) = self.graph.store_bundle(&bundle) {
            self.restore_status(asset.asset_id, previous);
            return Err(e.into());
        }
        self.set_status(asset.asset_id, WorkflowStatus::Stored);
        Ok(bundle)
    }

    /// Concurrent fan-out with a shared deadline. Every criterion gets a
    /// result: missing, failed, late, or malformed answers become unavailable.
    pub fn dispatch(&self, input: &AnalyzerInput) -> std::collections::BTreeMap<Criterion, AnalysisResult> {
        let input = Arc::new(input.clone());
        let (tx, rx) = mpsc::channel();
        for (i, analyzer) in self.analyzers.iter().enumerate() {
            let (tx, analyzer, input) = (tx.clone(), Arc::clone(analyzer), Arc::clone(&input));
            thread::Builder::new()
                .name(format!("analyzer-{}", analyzer.name()))
                .spawn(move || {
                    let _ = tx.send((i, analyzer.analyze(&input)));
                })
                .expect("spawn analyzer thread");
        }
        drop(tx);

        let mut outcomes: Vec<Option<Result<Vec<AnalysisResult>, AnalyzerError>>> =
            (0..self.analyzers.len()).map(|_| None).collect();
        let deadline = Instant::now() + self.timeout;
        let mut pending = self.analyzers.len();
        while pending > 0 {
            let left = deadline.saturating_duration_since(Instant::now());
            match rx.recv_timeout(left) {
                Ok((i, r)) => {
                    outcomes[i] = Some(r);
                    pending -= 1;
                }
                Err(_) => break,
            }
        }

        let mut results = std::collections::BTreeMap::new();
        for (analyzer, outcome) in self.analyzers.iter().zip(outcomes) {
            let covered = analyzer.criteria();
            let failure = match outcome {
                None => Some(format!("{} timed out after {:?}", analyzer.name(), self.timeout)),
                Some(Err(e)) => Some(format!("{}: {e}", analyzer.name())),
                Some(Ok(rs)) => {
                    let bad = rs.iter().find(|r| !covered.contains(&r.criterion) || !r.is_consistent());
                    let missing = covered.iter().find(|c| !rs.iter().any(|r| r.criterion == **c));
                    match (bad, missing) {
                        (Some(r), _) => Some(format!("{} returned an invalid {} result", analyzer.name(), r.criterion)),
                        (None, Some(c)) => Some(format!("{} returned no {c} result", analyzer.name())),
                        (None, None) => {
                            for r in rs {
                                results.insert(r.criterion, r);
                            }
                            None
                        }
                    }
                }
            };
            if let Some(msg) = failure {
                log::warn!("asset {}: {msg}", input.asset_id);
                for c in covered {
                    results.insert(
                        *c,
                        AnalysisResult::unavailable(*c, ANALYZER_ERROR).with_evidence(vec![json!({ "error": msg })]),
                    );
                }
            }
        }
        for c in Criterion::ALL {
            results
                .entry(c)
                .or_insert_with(|| AnalysisResult::unavailable(c, "No analyzer is configured for this criterion."));
        }
        results
    }
}
