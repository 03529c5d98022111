//! Wires every component from a [`Config`].

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use thiserror::Error;

use crate::companion::{CompanionError, UserStore};
use crate::config::Config;
use crate::ingestion::{AssetBuilder, Ingestor};
use crate::knowledge_graph::{GraphError, KnowledgeGraph};
use crate::ledger::{Ledger, LedgerError};
use crate::media::{MediaError, MediaIndex};
use crate::query::QueryService;
use crate::resources::{ResourceError, Resources};
use crate::text_similarity::{TextIndexError, TextSimilarity};
use crate::workflow::{
    Analyzer, ImageAnalyzer, TextSimilarityAnalyzer, ToneAnalyzer, VideoAnalyzer, WorkflowHandler,
    WritingQualityAnalyzer,
};

#[derive(Debug, Error)]
pub enum PlatformError {
    #[error("ledger: {0}")]
    Ledger(#[from] LedgerError),
    #[error("knowledge graph: {0}")]
    Graph(#[from] GraphError),
    #[error("media index: {0}")]
    Media(#[from] MediaError),
    #[error("trusted corpus: {0}")]
    Corpus(#[from] TextIndexError),
    #[error("resources: {0}")]
    Resources(#[from] ResourceError),
    #[error("users: {0}")]
    Users(#[from] CompanionError),
}

pub struct Platform {
    pub config: Config,
    pub resources: Resources,
    pub ledger: Arc<Ledger>,
    pub graph: Arc<KnowledgeGraph>,
    pub media: Arc<MediaIndex>,
    pub text: Arc<TextSimilarity>,
    /// In-process analyzers, also exposed over HTTP.
    pub local_analyzers: Vec<Arc<dyn Analyzer>>,
    pub workflow: Arc<WorkflowHandler>,
    pub ingestor: Arc<Ingestor>,
    pub query: QueryService,
    pub users: Arc<UserStore>,
}

impl Platform {
    pub fn open(config: Config) -> Result<Self, PlatformError> {
        Self::open_with(config, |local| local.to_vec())
    }

    /// `dispatch` picks the analyzers the workflow calls, given the local ones.
    pub fn open_with(
        config: Config,
        dispatch: impl FnOnce(&[Arc<dyn Analyzer>]) -> Vec<Arc<dyn Analyzer>>,
    ) -> Result<Self, PlatformError> {
        let dir = &config.data_dir;
        let resources = Resources::load(config.resources.dir.as_deref())?;
        let ledger = Arc::new(Ledger::open(dir.join("ledger"))?);
        let graph = Arc::new(KnowledgeGraph::open(dir.join("graph"))?);
        let media = Arc::new(MediaIndex::open(dir.join("media"))?);
        let text = Arc::new(TextSimilarity::new(
            resources.subjectivity.clone(),
            config.text_similarity.bm25(),
            config.text_similarity.thresholds(),
        ));
        if let Some(corpus) = &config.text_similarity.corpus_dir {
            let n = text.load_corpus_dir(corpus)?;
            log::info!("indexed {n} trusted articles from {}", corpus.display());
        }

        let blobs = ledger.blobs().clone();
        let local: Vec<Arc<dyn Analyzer>> = vec![
            Arc::new(TextSimilarityAnalyzer::new(Arc::clone(&text))),
            Arc::new(ToneAnalyzer::new(Arc::new(resources.emotions.clone()), config.tone)),
            Arc::new(WritingQualityAnalyzer::new(Arc::new(resources.terms.clone()), config.writing_quality)),
            Arc::new(ImageAnalyzer::new(Arc::clone(&media), blobs.clone(), config.media)),
            Arc::new(VideoAnalyzer::new(Arc::clone(&media), blobs.clone(), config.media)),
        ];
        let workflow = Arc::new(
            WorkflowHandler::new(Arc::clone(&ledger), Arc::clone(&graph), dispatch(&local))
                .with_timeout(Duration::from_secs(config.workflow.analyzer_timeout_secs)),
        );
        let media_root = config
            .ingestion
            .fixture
            .as_ref()
            .and_then(|f| f.parent().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        let ingestor = Arc::new(Ingestor::new(AssetBuilder::new(blobs, media_root), workflow.clone()));
        let users = Arc::new(UserStore::open(dir.join("users.json"))?);
        Ok(Platform {
            query: QueryService::new(Arc::clone(&graph)),
            config,
            resources,
            ledger,
            graph,
            media,
            text,
            local_analyzers: local,
            workflow,
            ingestor,
            users,
        })
    }

    pub fn local_analyzer(&self, name: &str) -> Option<&Arc<dyn Analyzer>> {
        self.local_analyzers.iter().find(|a| a.name() == name)
    }
}
