//! Subcommands of the `provenance` binary.

use std::future::Future;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand};
use provenance_core::config::{Config, ConfigError, DispatchMode};
use provenance_core::ingestion::{spawn_scheduler, FixtureMonitor, IngestError, MonitorQuery, RawFeedItem};
use provenance_core::ledger::{verify_chain_file, LedgerError};
use provenance_core::pipeline::{render_table, run_pipeline, PipelineError};
use provenance_core::platform::{Platform, PlatformError};
use provenance_core::resources::Resources;
use provenance_core::text_similarity::{ArticleInput, TextIndexError, TextSimilarity};
use provenance_core::{Criterion, Source, Status};
use serde_json::json;
use thiserror::Error;
use tokio::net::TcpListener;

use crate::api::router;
use crate::http_analyzer::HttpAnalyzer;

#[derive(Debug, Parser)]
#[command(
    name = "provenance",
    version,
    about = "Asset verification platform: ledger, analyzers, knowledge graph, query and companion services"
)]
pub struct Cli {
    /// TOML config file; `PROV_*` environment variables override its keys
    /// (`__` separates nesting, e.g. PROV_SERVER__PORT).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Data directory holding ledger/, graph/, media/ and users.json [default: data]
    #[arg(long, global = true, value_name = "PATH")]
    pub data_dir: Option<PathBuf>,
    /// HTTP port for `serve` [default: 8420]
    #[arg(long, global = true, value_name = "N")]
    pub port: Option<u16>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP server (and the feed poller when ingestion.fixture is set).
    Serve,
    /// Poll a feed file once and register the matching items.
    Ingest {
        #[arg(long, value_name = "PATH")]
        fixture: PathBuf,
        /// Comma-separated keywords; empty matches everything.
        #[arg(long, value_delimiter = ',', value_name = "K1,K2")]
        keywords: Vec<String>,
        /// Maximum number of items [default: 100]
        #[arg(long, default_value_t = 100)]
        limit: usize,
        /// Trusted corpus directory indexed before analysis.
        #[arg(long, value_name = "DIR")]
        corpus: Option<PathBuf>,
    },
    /// Register one item from a JSON file as a trusted analyst.
    Register {
        #[arg(value_name = "JSON_FILE")]
        file: PathBuf,
    },
    /// Check a text against the trusted corpus and print the verdict.
    Analyze {
        /// Plain text, or JSON with `title` and `body`.
        #[arg(long, value_name = "FILE")]
        text: PathBuf,
        #[arg(long, value_name = "DIR")]
        corpus: Option<PathBuf>,
    },
    /// Index a corpus, ingest a feed file, analyze everything, print the report.
    RunPipeline {
        #[arg(long, value_name = "PATH")]
        fixture: PathBuf,
        #[arg(long, value_name = "DIR")]
        corpus: Option<PathBuf>,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Verify the ledger hash chain.
    VerifyChain,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Platform(#[from] PlatformError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Corpus(#[from] TextIndexError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: std::io::Error },
    #[error("{0}")]
    Runtime(String),
    #[error("ledger chain verification failed at block {0}")]
    ChainInvalid(u64),
}

impl Cli {
    /// Effective configuration: file, then environment, then flags.
    pub fn config(&self) -> Result<Config, ConfigError> {
        let mut config = Config::load(self.config.as_deref(), std::env::vars())?;
        if let Some(d) = &self.data_dir {
            config.data_dir = d.clone();
        }
        if let Some(p) = self.port {
            config.server.port = p;
        }
        config.validate()?;
        Ok(config)
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = cli.config()?;
    match cli.command {
        Command::Serve => serve(config),
        Command::Ingest { fixture, keywords, limit, corpus } => {
            let platform = open_platform(config)?;
            if let Some(dir) = corpus {
                platform.text.load_corpus_dir(&dir)?;
            }
            let monitor = FixtureMonitor::new(&fixture);
            let items = monitor.poll(&MonitorQuery { keywords, limit, ..MonitorQuery::default() })?;
            let builder = platform.ingestor.builder().with_media_root(monitor.media_root());
            for item in &items {
                let reg = platform.ingestor.register_with(&builder, item, Source::Monitor)?;
                print_registration(&platform, &reg.asset.url, reg.asset.asset_id, reg.created);
            }
            Ok(())
        }
        Command::Register { file } => {
            let platform = open_platform(config)?;
            let item: RawFeedItem = read_json(&file)?;
            let root = file.parent().map(Path::to_path_buf).unwrap_or_default();
            let builder = platform.ingestor.builder().with_media_root(root);
            let reg = platform.ingestor.register_with(&builder, &item, Source::TrustedAnalyst)?;
            print_registration(&platform, &reg.asset.url, reg.asset.asset_id, reg.created);
            Ok(())
        }
        Command::Analyze { text, corpus } => {
            let resources =
                Resources::load(config.resources.dir.as_deref()).map_err(|e| CliError::Runtime(e.to_string()))?;
            let engine = TextSimilarity::new(
                resources.subjectivity,
                config.text_similarity.bm25(),
                config.text_similarity.thresholds(),
            );
            for dir in config.text_similarity.corpus_dir.iter().chain(corpus.as_ref()) {
                engine.load_corpus_dir(dir)?;
            }
            let raw = std::fs::read_to_string(&text).map_err(|e| input_error(&text, e))?;
            let article = serde_json::from_str::<ArticleInput>(&raw)
                .or_else(|_| {
                    serde_json::from_str::<serde_json::Value>(&raw).map(|v| ArticleInput {
                        doc_id: String::new(),
                        title: v["title"].as_str().unwrap_or_default().to_string(),
                        body: v["body"].as_str().unwrap_or_default().to_string(),
                    })
                })
                .unwrap_or(ArticleInput { doc_id: String::new(), title: String::new(), body: raw });
            let verdict = engine.verify(&article.title, &article.body);
            println!("{}", serde_json::to_string_pretty(&verdict).expect("verdict serializes"));
            Ok(())
        }
        Command::RunPipeline { fixture, corpus, json } => {
            let platform = open_platform(config)?;
            let report = run_pipeline(&platform, &fixture, corpus.as_deref())?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            } else {
                print!("{}", render_table(&report));
            }
            Ok(())
        }
        Command::VerifyChain => {
            let path = config.data_dir.join("ledger").join("chain.jsonl");
            let outcome = verify_chain_file(&path)?;
            println!("{}", json!({ "chain": path, "ok": outcome.ok, "first_bad_index": outcome.first_bad_index }));
            match outcome.first_bad_index {
                Some(i) => Err(CliError::ChainInvalid(i)),
                None => Ok(()),
            }
        }
    }
}

fn input_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input { path: path.display().to_string(), message: e.to_string() }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let bytes = std::fs::read(path).map_err(|e| input_error(path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| input_error(path, e))
}

fn print_registration(platform: &Platform, url: &str, id: provenance_core::AssetId, created: bool) {
    let cautions: Vec<Criterion> = platform
        .graph
        .get_verification(&id)
        .map(|r| r.results.iter().filter(|(_, res)| res.status == Status::Caution).map(|(c, _)| *c).collect())
        .unwrap_or_default();
    println!("{}", json!({ "url": url, "asset_id": id, "created": created, "cautions": cautions }));
}

/// Opens the platform, proxying analyzers over HTTP when configured.
pub fn open_platform(config: Config) -> Result<Platform, PlatformError> {
    if config.workflow.dispatch_mode == DispatchMode::Http {
        let base = config
            .workflow
            .analyzer_url
            .clone()
            .unwrap_or_else(|| format!("http://{}:{}", config.server.bind, config.server.port));
        let timeout = Duration::from_secs(config.workflow.analyzer_timeout_secs);
        return Platform::open_with(config, |local| HttpAnalyzer::mirror(&base, local, timeout));
    }
    Platform::open(config)
}

/// Serves until `shutdown` resolves, then stops the poller. Ledger and graph
/// writes are synced as they happen, so nothing is pending afterwards.
pub async fn serve_with(
    platform: Arc<Platform>,
    listener: TcpListener,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let scheduler = platform.config.ingestion.fixture.clone().map(|fixture| {
        let ing = &platform.config.ingestion;
        spawn_scheduler(
            FixtureMonitor::new(fixture),
            Arc::clone(&platform.ingestor),
            MonitorQuery { keywords: ing.keywords.clone(), limit: ing.limit, ..MonitorQuery::default() },
            Duration::from_secs(ing.poll_interval_secs),
        )
    });
    let result = axum::serve(listener, router(Arc::clone(&platform))).with_graceful_shutdown(shutdown).await;
    if let Some(s) = scheduler {
        tokio::task::spawn_blocking(move || s.stop()).await.ok();
    }
    result
}

fn serve(config: Config) -> Result<(), CliError> {
    let addr = format!("{}:{}", config.server.bind, config.server.port);
    let platform = Arc::new(open_platform(config)?);
    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    rt.block_on(async move {
        let listener =
            TcpListener::bind(&addr).await.map_err(|source| CliError::Bind { addr: addr.clone(), source })?;
        log::info!("listening on http://{addr}");
        serve_with(platform, listener, shutdown_signal()).await.map_err(|e| CliError::Runtime(e.to_string()))?;
        log::info!("shut down cleanly");
        Ok(())
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
