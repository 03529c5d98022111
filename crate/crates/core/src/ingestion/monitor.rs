use std::fs;
use std::path::{Path, PathBuf};
use std::sync::mpsc::{self, RecvTimeoutError};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{IngestError, Ingestor, RawFeedItem};
use crate::model::Source;

pub const DEFAULT_POLL_INTERVAL: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonitorQuery {
    pub keywords: Vec<String>,
    pub since: DateTime<Utc>,
    pub limit: usize,
}

impl Default for MonitorQuery {
    fn default() -> Self {
        MonitorQuery { keywords: Vec::new(), since: DateTime::UNIX_EPOCH, limit: 100 }
    }
}

/// Monitor backed by a newline-delimited JSON feed file.
#[derive(Debug, Clone)]
pub struct FixtureMonitor {
    path: PathBuf,
}

impl FixtureMonitor {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        FixtureMonitor { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Directory that relative media references in the feed resolve against.
    pub fn media_root(&self) -> PathBuf {
        self.path.parent().map(Path::to_path_buf).unwrap_or_default()
    }

    /// Every item in file order.
    pub fn load(&self) -> Result<Vec<RawFeedItem>, IngestError> {
        let text =
            fs::read_to_string(&self.path).map_err(|e| IngestError::Source(format!("{}: {e}", self.path.display())))?;
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l)
                    .map_err(|e| IngestError::Source(format!("{} line {}: {e}", self.path.display(), i + 1)))
            })
            .collect()
    }

    /// Items matching any keyword (case-insensitive, title or body) published
    /// at or after `since`, newest first, at most `limit`.
    pub fn poll(&self, query: &MonitorQuery) -> Result<Vec<RawFeedItem>, IngestError> {
        if query.limit == 0 {
            return Err(IngestError::Validation("limit must be at least 1".into()));
        }
        let keywords: Vec<String> =
            query.keywords.iter().map(|k| k.trim().to_lowercase()).filter(|k| !k.is_empty()).collect();
        let mut items: Vec<RawFeedItem> = self
            .load()?
            .into_iter()
            .filter(|it| it.published_at >= query.since)
            .filter(|it| {
                if keywords.is_empty() {
                    return true;
                }
                let (title, body) = (it.title.to_lowercase(), it.body.to_lowercase());
                keywords.iter().any(|k| title.contains(k) || body.contains(k))
            })
            .collect();
        items.sort_by(|a, b| b.published_at.cmp(&a.published_at).then_with(|| a.url.cmp(&b.url)));
        items.truncate(query.limit);
        Ok(items)
    }
}

pub struct SchedulerHandle {
    stop: mpsc::Sender<()>,
    thread: JoinHandle<()>,
}

impl SchedulerHandle {
    pub fn stop(self) {
        let _ = self.stop.send(());
        let _ = self.thread.join();
    }
}

/// Polls `monitor` every `interval` and registers the hits. The first poll
/// runs immediately.
pub fn spawn_scheduler(
    monitor: FixtureMonitor,
    ingestor: Arc<Ingestor>,
    query: MonitorQuery,
    interval: Duration,
) -> SchedulerHandle {
    let (stop, rx) = mpsc::channel::<()>();
    let thread = thread::Builder::new()
        .name("monitor-poller".into())
        .spawn(move || {
            let builder = ingestor.builder().with_media_root(monitor.media_root());
            loop {
                match monitor.poll(&query) {
                    Ok(items) => {
                        for item in items {
                            if let Err(e) = ingestor.register_with(&builder, &item, Source::Monitor) {
                                log::warn!("monitor item {}: {e}", item.url);
                            }
                        }
                    }
                    Err(e) => log::warn!("monitor poll failed: {e}"),
                }
                match rx.recv_timeout(interval) {
                    Err(RecvTimeoutError::Timeout) => continue,
                    _ => break,
                }
            }
        })
        .expect("spawn monitor thread");
    SchedulerHandle { stop, thread }
}
