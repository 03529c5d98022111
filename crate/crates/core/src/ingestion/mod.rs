//! Asset discovery and registration.

mod monitor;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::{Position, Url};

pub use monitor::{spawn_scheduler, FixtureMonitor, MonitorQuery, SchedulerHandle, DEFAULT_POLL_INTERVAL};

use crate::ledger::BlobStore;
use crate::media::{decode_pnm, MediaError, VideoManifest, PNM_MEDIA_TYPE, VIDEO_MANIFEST_MEDIA_TYPE};
use crate::model::{
    AnalysisBundle, Asset, AssetId, EngagementScore, Fragment, FragmentKind, Payload, Source, TopicAssignment,
};
use crate::workflow::{WorkflowError, WorkflowHandler};
use crate::Digest;

/// One monitor hit or registration request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFeedItem {
    pub url: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub summary: String,
    #[serde(default)]
    pub body: String,
    #[serde(default)]
    pub image_refs: Vec<String>,
    #[serde(default)]
    pub video_refs: Vec<String>,
    #[serde(default)]
    pub publisher: String,
    pub published_at: DateTime<Utc>,
    #[serde(default)]
    pub likes: u64,
    #[serde(default)]
    pub shares: u64,
    #[serde(default)]
    pub comments: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<TopicAssignment>,
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("invalid url `{url}`: {reason}")]
    InvalidUrl { url: String, reason: String },
    #[error("invalid item: {0}")]
    Validation(String),
    #[error("feed source: {0}")]
    Source(String),
    #[error("media `{path}`: {source}")]
    Media { path: String, source: MediaError },
    #[error("blob store: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Submit(#[from] WorkflowError),
}

/// Lowercase scheme and host, no fragment, no trailing slash.
pub fn canonicalize_url(raw: &str) -> Result<String, IngestError> {
    let invalid = |reason: &str| IngestError::InvalidUrl { url: raw.to_string(), reason: reason.to_string() };
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(invalid("empty"));
    }
    let url = Url::parse(trimmed).map_err(|e| invalid(&e.to_string()))?;
    if url.host_str().is_none_or(str::is_empty) {
        return Err(invalid("missing host"));
    }
    let mut out = url[..Position::BeforePath].to_string();
    out.push_str(url.path().trim_end_matches('/'));
    if let Some(q) = url.query() {
        out.push('?');
        out.push_str(q);
    }
    Ok(out)
}

pub fn asset_id_for_url(raw: &str) -> Result<AssetId, IngestError> {
    Ok(Digest::of(canonicalize_url(raw)?.as_bytes()))
}

/// Digest over an asset's fragments, used to tell re-submissions from
/// updates. Media fragments contribute their blob digests.
pub fn content_key(asset: &Asset) -> Digest {
    let mut fragments: Vec<&Fragment> = asset.fragments.iter().collect();
    fragments.sort_by(|a, b| (a.kind, &a.fragment_id).cmp(&(b.kind, &b.fragment_id)));
    let mut buf = Vec::new();
    for f in fragments {
        buf.extend_from_slice(f.kind.as_str().as_bytes());
        buf.push(0x1f);
        buf.extend_from_slice(f.fragment_id.as_bytes());
        buf.push(0x1f);
        let payload: &[u8] = match &f.payload {
            Payload::Text { text } => text.as_bytes(),
            Payload::Blob { digest, .. } => digest.as_bytes(),
        };
        buf.extend_from_slice(&(payload.len() as u64).to_be_bytes());
        buf.extend_from_slice(payload);
    }
    Digest::of(&buf)
}

/// Turns feed items into assets, storing media in a blob store.
#[derive(Debug, Clone)]
pub struct AssetBuilder {
    blobs: BlobStore,
    media_root: PathBuf,
}

impl AssetBuilder {
    /// Relative media references resolve against `media_root`.
    pub fn new(blobs: BlobStore, media_root: impl Into<PathBuf>) -> Self {
        AssetBuilder { blobs, media_root: media_root.into() }
    }

    pub fn with_media_root(&self, media_root: impl Into<PathBuf>) -> Self {
        AssetBuilder { blobs: self.blobs.clone(), media_root: media_root.into() }
    }

    pub fn blobs(&self) -> &BlobStore {
        &self.blobs
    }

    pub fn build(&self, item: &RawFeedItem, source: Source) -> Result<Asset, IngestError> {
        let canonical = canonicalize_url(&item.url)?;
        let mut fragments = Vec::new();
        for (kind, text) in [
            (FragmentKind::Title, &item.title),
            (FragmentKind::Summary, &item.summary),
            (FragmentKind::Body, &item.body),
        ] {
            if !text.trim().is_empty() {
                fragments.push(Fragment {
                    fragment_id: kind.as_str().to_string(),
                    kind,
                    payload: Payload::Text { text: text.clone() },
                });
            }
        }
        for (i, r) in item.image_refs.iter().enumerate() {
            let digest = self.put_image(r)?;
            fragments.push(Fragment {
                fragment_id: format!("image-{i}"),
                kind: FragmentKind::Image,
                payload: Payload::Blob { digest, media_type: PNM_MEDIA_TYPE.into() },
            });
        }
        for (i, r) in item.video_refs.iter().enumerate() {
            let digest = self.put_video(r)?;
            fragments.push(Fragment {
                fragment_id: format!("video-{i}"),
                kind: FragmentKind::Video,
                payload: Payload::Blob { digest, media_type: VIDEO_MANIFEST_MEDIA_TYPE.into() },
            });
        }
        if fragments.is_empty() {
            return Err(IngestError::Validation("item has no content".into()));
        }
        Ok(Asset {
            asset_id: Digest::of(canonical.as_bytes()),
            url: canonical,
            source,
            publisher: item.publisher.trim().to_string(),
            published_at: item.published_at,
            fragments,
            engagement: EngagementScore::new(item.likes, item.shares, item.comments),
            ingested_at: Utc::now(),
            topic: item.topic.clone(),
        })
    }

    fn resolve(&self, reference: &str) -> Result<PathBuf, IngestError> {
        if reference.contains("://") {
            return Err(IngestError::Validation(format!("remote media `{reference}` is not supported")));
        }
        let p = Path::new(reference);
        Ok(if p.is_absolute() { p.to_path_buf() } else { self.media_root.join(p) })
    }

    fn read_frame(&self, path: &Path) -> Result<Vec<u8>, IngestError> {
        let shown = path.display().to_string();
        let bytes = fs::read(path).map_err(|e| IngestError::Media { path: shown.clone(), source: e.into() })?;
        decode_pnm(&bytes).map_err(|e| IngestError::Media { path: shown, source: e })?;
        Ok(bytes)
    }

    fn put_image(&self, reference: &str) -> Result<Digest, IngestError> {
        let path = self.resolve(reference)?;
        Ok(self.blobs.put(&self.read_frame(&path)?)?)
    }

    /// A video reference names a directory of frame files, taken in
    /// file-name order.
    fn put_video(&self, reference: &str) -> Result<Digest, IngestError> {
        let dir = self.resolve(reference)?;
        let media_err = |source: MediaError| IngestError::Media { path: dir.display().to_string(), source };
        let mut frames: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(|e| media_err(e.into()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| matches!(x.to_str(), Some("pgm" | "ppm" | "pnm"))))
            .collect();
        frames.sort();
        if frames.is_empty() {
            return Err(media_err(MediaError::Empty));
        }
        let digests = frames
            .iter()
            .map(|p| Ok(self.blobs.put(&self.read_frame(p)?)?))
            .collect::<Result<Vec<_>, IngestError>>()?;
        Ok(self.blobs.put(&VideoManifest { frames: digests }.to_bytes())?)
    }
}

/// Destination for registered assets.
pub trait AssetSink: Send + Sync {
    fn submit(&self, asset: &Asset) -> Result<AnalysisBundle, WorkflowError>;
}

impl AssetSink for WorkflowHandler {
    fn submit(&self, asset: &Asset) -> Result<AnalysisBundle, WorkflowError> {
        WorkflowHandler::submit(self, asset)
    }
}

#[derive(Debug, Clone)]
pub struct Registration {
    pub asset: Asset,
    /// False when the item was already registered with identical content.
    pub created: bool,
    pub bundle: Option<AnalysisBundle>,
}

struct Registered {
    key: Digest,
    asset: Asset,
}

/// Registers assets exactly once per (asset id, content) and forwards them.
pub struct Ingestor {
    builder: AssetBuilder,
    sink: Arc<dyn AssetSink>,
    registry: Mutex<HashMap<AssetId, Registered>>,
}

impl Ingestor {
    pub fn new(builder: AssetBuilder, sink: Arc<dyn AssetSink>) -> Self {
        Ingestor { builder, sink, registry: Mutex::new(HashMap::new()) }
    }

    pub fn builder(&self) -> &AssetBuilder {
        &self.builder
    }

    pub fn register(&self, item: &RawFeedItem, source: Source) -> Result<Registration, IngestError> {
        self.register_with(&self.builder, item, source)
    }

    /// Like [`register`](Self::register) with media resolved by `builder`.
    pub fn register_with(
        &self,
        builder: &AssetBuilder,
        item: &RawFeedItem,
        source: Source,
    ) -> Result<Registration, IngestError> {
        let asset = builder.build(item, source)?;
        let key = content_key(&asset);
        {
            let mut reg = self.registry.lock().expect("registry poisoned");
            if let Some(existing) = reg.get(&asset.asset_id) {
                if existing.key == key {
                    return Ok(Registration { asset: existing.asset.clone(), created: false, bundle: None });
                }
            }
            reg.insert(asset.asset_id, Registered { key, asset: asset.clone() });
        }
        match self.sink.submit(&asset) {
            Ok(bundle) => Ok(Registration { asset, created: true, bundle: Some(bundle) }),
            Err(e) => {
                let mut reg = self.registry.lock().expect("registry poisoned");
                if reg.get(&asset.asset_id).is_some_and(|r| r.key == key) {
                    reg.remove(&asset.asset_id);
                }
                Err(e.into())
            }
        }
    }

    pub fn registered(&self, id: &AssetId) -> Option<Asset> {
        self.registry.lock().expect("registry poisoned").get(id).map(|r| r.asset.clone())
    }

    pub fn len(&self) -> usize {
        self.registry.lock().expect("registry poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalization_rules() {
        let a = canonicalize_url("HTTPS://Example.com/a#sec").unwrap();
        assert_eq!(a, "https://example.com/a");
        assert_eq!(canonicalize_url("https://example.com/a/").unwrap(), a);
        assert_eq!(canonicalize_url("https://example.com/").unwrap(), "https://example.com");
        assert_eq!(canonicalize_url("https://example.com/x/?q=1#f").unwrap(), "https://example.com/x?q=1");
        assert_eq!(canonicalize_url("http://Example.com:8080/P").unwrap(), "http://example.com:8080/P");
        assert_eq!(
            asset_id_for_url("HTTPS://Example.com/a#sec").unwrap(),
            asset_id_for_url("https://example.com/a").unwrap()
        );
        for bad in ["", "not a url", "mailto:x@y.z", "/relative/path"] {
            assert!(matches!(canonicalize_url(bad), Err(IngestError::InvalidUrl { .. })), "{bad}");
        }
    }

    fn item() -> RawFeedItem {
        RawFeedItem {
            url: "https://example.com/story".into(),
            title: "Title".into(),
            summary: "".into(),
            body: "Body text.".into(),
            image_refs: vec![],
            video_refs: vec![],
            publisher: "Example News".into(),
            published_at: "2024-03-01T10:00:00Z".parse().unwrap(),
            likes: 10,
            shares: 5,
            comments: 0,
            topic: None,
        }
    }

    #[test]
    fn fragments_follow_non_empty_fields() {
        let dir = tempfile::tempdir().unwrap();
        let builder = AssetBuilder::new(BlobStore::open(dir.path().join("blobs")).unwrap(), dir.path());
        let asset = builder.build(&item(), Source::Monitor).unwrap();
        let kinds: Vec<_> = asset.fragments.iter().map(|f| f.kind).collect();
        assert_eq!(kinds, [FragmentKind::Title, FragmentKind::Body]);
        assert!((asset.engagement.score - 21f64.ln()).abs() < 1e-12);

        let mut zero = item();
        (zero.likes, zero.shares) = (0, 0);
        assert_eq!(builder.build(&zero, Source::Monitor).unwrap().engagement.score, 0.0);

        let mut remote = item();
        remote.image_refs = vec!["https://cdn.example.com/a.png".into()];
        assert!(matches!(builder.build(&remote, Source::Monitor), Err(IngestError::Validation(_))));

        let mut empty = item();
        (empty.title, empty.body) = (" ".into(), String::new());
        assert!(builder.build(&empty, Source::Monitor).is_err());
    }

    #[test]
    fn json_counts_must_be_non_negative() {
        let line = r#"{"url":"https://a.com/x","published_at":"2024-01-01T00:00:00Z","likes":-1}"#;
        assert!(serde_json::from_str::<RawFeedItem>(line).is_err());
        let extra = r#"{"url":"https://a.com/x","published_at":"2024-01-01T00:00:00Z","bogus":1}"#;
        assert!(serde_json::from_str::<RawFeedItem>(extra).is_err());
    }
}
