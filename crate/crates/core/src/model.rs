//! Types shared across the verification layer.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::digest::Digest;

/// One of the seven verification dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    TextSimilarity,
    Tone,
    WritingQuality,
    ImageReuse,
    ImageManipulation,
    VideoReuse,
    VideoManipulation,
}

impl Criterion {
    pub const ALL: [Criterion; 7] = [
        Criterion::TextSimilarity,
        Criterion::Tone,
        Criterion::WritingQuality,
        Criterion::ImageReuse,
        Criterion::ImageManipulation,
        Criterion::VideoReuse,
        Criterion::VideoManipulation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::TextSimilarity => "text_similarity",
            Criterion::Tone => "tone",
            Criterion::WritingQuality => "writing_quality",
            Criterion::ImageReuse => "image_reuse",
            Criterion::ImageManipulation => "image_manipulation",
            Criterion::VideoReuse => "video_reuse",
            Criterion::VideoManipulation => "video_manipulation",
        }
    }

    /// Human label used on icons.
    pub fn label(self) -> &'static str {
        match self {
            Criterion::TextSimilarity => "Text Similarity",
            Criterion::Tone => "Tone",
            Criterion::WritingQuality => "Writing Quality",
            Criterion::ImageReuse => "Image Reuse",
            Criterion::ImageManipulation => "Image Manipulation",
            Criterion::VideoReuse => "Video Reuse",
            Criterion::VideoManipulation => "Video Manipulation",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown criterion `{0}`")]
pub struct UnknownCriterion(pub String);

impl FromStr for Criterion {
    type Err = UnknownCriterion;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Criterion::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| UnknownCriterion(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Caution,
    Unavailable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Caution => "caution",
            Status::Unavailable => "unavailable",
        }
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pass" => Ok(Status::Pass),
            "caution" => Ok(Status::Caution),
            "unavailable" => Ok(Status::Unavailable),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

/// One criterion's verdict.
///
/// `score` is the caution intensity in `[0, 1]`; it is positive only for
/// `Status::Caution`. `measures` carries the criterion-specific numbers
/// (ratios, probabilities, thresholds) that the knowledge graph stores as
/// observation measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub criterion: Criterion,
    pub status: Status,
    pub score: f64,
    #[serde(default)]
    pub evidence: Vec<serde_json::Value>,
    #[serde(default)]
    pub measures: BTreeMap<String, f64>,
    pub explanation: String,
}

impl AnalysisResult {
    pub fn unavailable(criterion: Criterion, explanation: impl Into<String>) -> Self {
        AnalysisResult {
            criterion,
            status: Status::Unavailable,
            score: 0.0,
            evidence: Vec::new(),
            measures: BTreeMap::new(),
            explanation: explanation.into(),
        }
    }

    /// Builds a pass/caution result from a caution score; any positive
    /// score becomes `Caution`, clamped into `[0, 1]`.
    pub fn graded(criterion: Criterion, score: f64, explanation: impl Into<String>) -> Self {
        let score = if score.is_finite() { score.clamp(0.0, 1.0) } else { 0.0 };
        AnalysisResult {
            criterion,
            status: if score > 0.0 { Status::Caution } else { Status::Pass },
            score,
            evidence: Vec::new(),
            measures: BTreeMap::new(),
            explanation: explanation.into(),
        }
    }

    pub fn with_evidence(mut self, evidence: Vec<serde_json::Value>) -> Self {
        self.evidence = evidence;
        self
    }

    pub fn with_measure(mut self, name: &str, value: f64) -> Self {
        self.measures.insert(name.to_string(), value);
        self
    }

    /// Checks the status/score coupling invariant.
    pub fn is_consistent(&self) -> bool {
        let in_range = self.score.is_finite() && (0.0..=1.0).contains(&self.score);
        in_range
            && match self.status {
                Status::Caution => self.score > 0.0,
                Status::Pass | Status::Unavailable => self.score == 0.0,
            }
    }
}

/// Where an asset entered the platform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Monitor,
    TrustedAnalyst,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Monitor => "monitor",
            Source::TrustedAnalyst => "trusted_analyst",
        }
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "monitor" => Ok(Source::Monitor),
            "trusted_analyst" => Ok(Source::TrustedAnalyst),
            other => Err(format!("unknown source `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FragmentKind {
    Title,
    Summary,
    Body,
    Image,
    Video,
}

impl FragmentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FragmentKind::Title => "title",
            FragmentKind::Summary => "summary",
            FragmentKind::Body => "body",
            FragmentKind::Image => "image",
            FragmentKind::Video => "video",
        }
    }

    pub fn is_media(self) -> bool {
        matches!(self, FragmentKind::Image | FragmentKind::Video)
    }
}

impl FromStr for FragmentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "title" => Ok(FragmentKind::Title),
            "summary" => Ok(FragmentKind::Summary),
            "body" => Ok(FragmentKind::Body),
            "image" => Ok(FragmentKind::Image),
            "video" => Ok(FragmentKind::Video),
            other => Err(format!("unknown fragment kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    Text {
        text: String,
    },
    /// Content-addressed blob. Images are stored as their PNM bytes, videos
    /// as a JSON manifest listing per-frame blob digests.
    Blob {
        digest: Digest,
        media_type: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fragment {
    pub fragment_id: String,
    pub kind: FragmentKind,
    pub payload: Payload,
}

impl Fragment {
    pub fn text(&self) -> Option<&str> {
        match &self.payload {
            Payload::Text { text } => Some(text),
            Payload::Blob { .. } => None,
        }
    }

    pub fn blob_digest(&self) -> Option<&Digest> {
        match &self.payload {
            Payload::Blob { digest, .. } => Some(digest),
            Payload::Text { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngagementScore {
    pub likes: u64,
    pub shares: u64,
    pub comments: u64,
    pub score: f64,
}

impl EngagementScore {
    /// `ln(1 + likes + 2·shares + comments)`.
    pub fn new(likes: u64, shares: u64, comments: u64) -> Self {
        let weighted = likes as f64 + 2.0 * shares as f64 + comments as f64;
        EngagementScore { likes, shares, comments, score: weighted.ln_1p() }
    }
}

/// Concept → category → topic placement of an article.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TopicAssignment {
    pub concept: String,
    pub category: String,
    pub topic: String,
}

impl Default for TopicAssignment {
    fn default() -> Self {
        TopicAssignment { concept: "general".into(), category: "uncategorized".into(), topic: "uncategorized".into() }
    }
}

/// Identifier of an asset: SHA-256 hex digest of its canonical URL.
pub type AssetId = Digest;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Asset {
    pub asset_id: AssetId,
    pub url: String,
    pub source: Source,
    pub publisher: String,
    pub published_at: DateTime<Utc>,
    pub fragments: Vec<Fragment>,
    pub engagement: EngagementScore,
    pub ingested_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topic: Option<TopicAssignment>,
}

impl Asset {
    pub fn fragment(&self, kind: FragmentKind) -> Option<&Fragment> {
        self.fragments.iter().find(|f| f.kind == kind)
    }

    pub fn text_of(&self, kind: FragmentKind) -> Option<&str> {
        self.fragment(kind).and_then(Fragment::text)
    }

    pub fn media(&self, kind: FragmentKind) -> impl Iterator<Item = &Fragment> {
        self.fragments.iter().filter(move |f| f.kind == kind)
    }

    pub fn meta(&self) -> AssetMeta {
        AssetMeta {
            url: self.url.clone(),
            title: self.text_of(FragmentKind::Title).map(str::to_string),
            publisher: self.publisher.clone(),
            published_at: self.published_at,
            source: self.source,
            fragments: self
                .fragments
                .iter()
                .map(|f| FragmentRef {
                    fragment_id: f.fragment_id.clone(),
                    kind: f.kind,
                    blob: f.blob_digest().cloned(),
                })
                .collect(),
            topic: self.topic.clone().unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentRef {
    pub fragment_id: String,
    pub kind: FragmentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blob: Option<Digest>,
}

/// Bibliographic summary of an asset carried alongside its analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetMeta {
    pub url: String,
    pub title: Option<String>,
    pub publisher: String,
    pub published_at: DateTime<Utc>,
    pub source: Source,
    pub fragments: Vec<FragmentRef>,
    pub topic: TopicAssignment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerReceipt {
    pub asset_id: AssetId,
    pub block_index: u64,
    pub block_hash: Digest,
    pub content_digest: Digest,
}

/// Combined output of one workflow submission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisBundle {
    pub asset_id: AssetId,
    pub asset: AssetMeta,
    pub ledger_receipt: LedgerReceipt,
    pub results: BTreeMap<Criterion, AnalysisResult>,
    pub engagement: EngagementScore,
    pub completed_at: DateTime<Utc>,
}

impl AnalysisBundle {
    /// All seven criteria present, keyed consistently, each result valid.
    pub fn validate(&self) -> Result<(), String> {
        if self.results.len() != Criterion::ALL.len() {
            return Err(format!("bundle has {} criteria, expected 7", self.results.len()));
        }
        for criterion in Criterion::ALL {
            let result = self.results.get(&criterion).ok_or_else(|| format!("missing criterion {criterion}"))?;
            if result.criterion != criterion {
                return Err(format!("result keyed {criterion} reports {}", result.criterion));
            }
            if !result.is_consistent() {
                return Err(format!("inconsistent status/score for {criterion}"));
            }
            if result.measures.values().any(|v| !v.is_finite()) {
                return Err(format!("non-finite measure for {criterion}"));
            }
        }
        if self.ledger_receipt.asset_id != self.asset_id {
            return Err("ledger receipt belongs to another asset".into());
        }
        Ok(())
    }
}

/// An asset's stored verification state as read back from the graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub asset_id: AssetId,
    pub url: String,
    pub title: Option<String>,
    pub publisher: String,
    pub topic: TopicAssignment,
    pub ledger_receipt: LedgerReceipt,
    pub engagement: EngagementScore,
    pub results: BTreeMap<Criterion, AnalysisResult>,
}
