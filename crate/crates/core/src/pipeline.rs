//! Batch run: index a corpus, ingest a feed file, analyze everything.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingestion::{FixtureMonitor, IngestError};
use crate::model::{AssetId, Criterion, Source, Status};
use crate::platform::Platform;
use crate::text_similarity::TextIndexError;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("trusted corpus: {0}")]
    Corpus(#[from] TextIndexError),
    #[error("{0}")]
    Source(IngestError),
    #[error("item {url}: {source}")]
    Item { url: String, source: IngestError },
    #[error("asset {0} missing from the knowledge graph after analysis")]
    Missing(AssetId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub asset_id: AssetId,
    pub url: String,
    pub title: Option<String>,
    pub statuses: BTreeMap<Criterion, Status>,
    pub scores: BTreeMap<Criterion, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    /// One row per feed item, in processing order.
    pub rows: Vec<ReportRow>,
    pub distinct_assets: usize,
    pub corpus_documents: usize,
    /// Cautions per criterion over distinct assets.
    pub caution_counts: BTreeMap<Criterion, usize>,
}

/// Processes the feed oldest first so earlier media becomes the reference
/// for later reuse.
pub fn run_pipeline(
    platform: &Platform,
    fixture: &Path,
    corpus: Option<&Path>,
) -> Result<PipelineReport, PipelineError> {
    let corpus_documents = match corpus {
        Some(dir) => platform.text.load_corpus_dir(dir)?,
        None => 0,
    };
    let monitor = FixtureMonitor::new(fixture);
    let mut items = monitor.load().map_err(PipelineError::Source)?;
    items.sort_by(|a, b| a.published_at.cmp(&b.published_at).then_with(|| a.url.cmp(&b.url)));

    let builder = platform.ingestor.builder().with_media_root(monitor.media_root());
    let mut ids = Vec::with_capacity(items.len());
    for item in &items {
        let reg = platform
            .ingestor
            .register_with(&builder, item, Source::Monitor)
            .map_err(|source| PipelineError::Item { url: item.url.clone(), source })?;
        ids.push(reg.asset.asset_id);
    }

    let mut rows = Vec::with_capacity(ids.len());
    for id in &ids {
        let record = platform.graph.get_verification(id).ok_or(PipelineError::Missing(*id))?;
        rows.push(ReportRow {
            asset_id: *id,
            url: record.url.clone(),
            title: record.title.clone(),
            statuses: record.results.iter().map(|(c, r)| (*c, r.status)).collect(),
            scores: record.results.iter().map(|(c, r)| (*c, r.score)).collect(),
        });
    }
    let distinct: BTreeSet<AssetId> = ids.iter().copied().collect();
    let mut caution_counts: BTreeMap<Criterion, usize> = Criterion::ALL.into_iter().map(|c| (c, 0)).collect();
    let mut seen = BTreeSet::new();
    for row in &rows {
        if seen.insert(row.asset_id) {
            for (c, s) in &row.statuses {
                if *s == Status::Caution {
                    *caution_counts.entry(*c).or_default() += 1;
                }
            }
        }
    }
    Ok(PipelineReport { rows, distinct_assets: distinct.len(), corpus_documents, caution_counts })
}

fn cell(status: Status, score: f64) -> String {
    match status {
        Status::Pass => "pass".into(),
        Status::Caution => format!("CAUTION {score:.2}"),
        Status::Unavailable => "-".into(),
    }
}

/// Fixed-width text table with a totals line.
pub fn render_table(report: &PipelineReport) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<44}", "asset");
    for c in Criterion::ALL {
        let _ = write!(out, " {:>18}", c.as_str());
    }
    out.push('\n');
    for row in &report.rows {
        let mut label = row.title.clone().unwrap_or_else(|| row.url.clone());
        if label.chars().count() > 43 {
            label = label.chars().take(42).collect::<String>() + "~";
        }
        let _ = write!(out, "{label:<44}");
        for c in Criterion::ALL {
            let s = row.statuses.get(&c).copied().unwrap_or(Status::Unavailable);
            let _ = write!(out, " {:>18}", cell(s, row.scores.get(&c).copied().unwrap_or(0.0)));
        }
        out.push('\n');
    }
    let _ = write!(out, "{:<44}", format!("cautions ({} assets)", report.distinct_assets));
    for c in Criterion::ALL {
        let _ = write!(out, " {:>18}", report.caution_counts.get(&c).copied().unwrap_or(0));
    }
    out.push('\n');
    out
}
