//! Image/video reverse search and manipulation localization.
//!
//! Media are compared through 64-bit difference hashes, validated by
//! thumbnail cross-correlation, and diffed block-wise against the
//! registered original. Videos are handled as sampled keyframe sequences.

mod hash;
mod index;
mod raster;

use serde::{Deserialize, Serialize};
use serde_json::json;

pub use hash::{ncc, PerceptualHash};
pub use index::{
    block_regions, manipulated_blocks, manipulation_probability, FrameSignature, ManipulationParams,
    ManipulationReport, MediaIndex, Region, ReverseSearchResult, SearchMatch, SearchParams, BLOCK, BLOCK_COUNT,
    DIFF_SIZE, GRID, THUMB_SIZE,
};
pub use raster::{decode_pnm, luma, resample, GrayImage};

use crate::digest::Digest;
use crate::ledger::BlobStore;
use crate::model::{AnalysisResult, Criterion};

pub const PNM_MEDIA_TYPE: &str = "image/x-portable-anymap";
pub const VIDEO_MANIFEST_MEDIA_TYPE: &str = "application/x-provenance-video+json";

#[derive(Debug, thiserror::Error)]
pub enum MediaError {
    #[error("unsupported media format: {0}")]
    UnsupportedFormat(String),
    #[error("could not decode media: {0}")]
    Decode(String),
    #[error("media i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("media index error: {0}")]
    Index(String),
    #[error("media asset has no frames")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediaKind {
    Image,
    Video,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MediaAsset {
    pub media_id: Digest,
    pub kind: MediaKind,
    pub frames: Vec<GrayImage>,
}

impl MediaAsset {
    /// An image identified by the digest of its PGM encoding.
    pub fn image(frame: GrayImage) -> Self {
        MediaAsset { media_id: Digest::of(&frame.to_pgm()), kind: MediaKind::Image, frames: vec![frame] }
    }

    /// A video identified by the digest over its frames' PGM encodings.
    pub fn video(frames: Vec<GrayImage>) -> Self {
        let manifest = VideoManifest { frames: frames.iter().map(|f| Digest::of(&f.to_pgm())).collect() };
        MediaAsset { media_id: Digest::of(&manifest.to_bytes()), kind: MediaKind::Video, frames }
    }

    pub fn validate(&self) -> Result<(), MediaError> {
        if self.frames.is_empty() {
            return Err(MediaError::Empty);
        }
        Ok(())
    }
}

/// Blob layout of a video: the ordered digests of its frame blobs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoManifest {
    pub frames: Vec<Digest>,
}

impl VideoManifest {
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("manifest serializes")
    }
}

/// Keyframe stride: `configured` when non-zero, else `ceil(n / 5)`, never
/// below one.
pub fn keyframe_stride(frame_count: usize, configured: usize) -> usize {
    if configured > 0 {
        configured
    } else {
        frame_count.div_ceil(5).max(1)
    }
}

pub fn sample_keyframes<T: Clone>(frames: &[T], configured_stride: usize) -> Vec<T> {
    let stride = keyframe_stride(frames.len(), configured_stride);
    frames.iter().step_by(stride).cloned().collect()
}

pub fn load_image(blobs: &BlobStore, digest: &Digest) -> Result<MediaAsset, MediaError> {
    let frame = decode_pnm(&blobs.get(digest)?)?;
    Ok(MediaAsset { media_id: *digest, kind: MediaKind::Image, frames: vec![frame] })
}

pub fn load_video(blobs: &BlobStore, digest: &Digest, stride: usize) -> Result<MediaAsset, MediaError> {
    let manifest: VideoManifest =
        serde_json::from_slice(&blobs.get(digest)?).map_err(|e| MediaError::Decode(e.to_string()))?;
    if manifest.frames.is_empty() {
        return Err(MediaError::Empty);
    }
    let frames = sample_keyframes(&manifest.frames, stride)
        .iter()
        .map(|d| blobs.get(d).map_err(MediaError::from).and_then(|b| decode_pnm(&b)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MediaAsset { media_id: *digest, kind: MediaKind::Video, frames })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MediaConfig {
    pub delta_max: u32,
    pub delta_match: u32,
    pub block_threshold: f64,
    /// 0 selects `ceil(frames / 5)`.
    pub keyframe_stride: usize,
    pub probability_k: f64,
    pub ncc_threshold: f64,
    pub top_n: usize,
}

impl Default for MediaConfig {
    fn default() -> Self {
        MediaConfig {
            delta_max: 16,
            delta_match: 10,
            block_threshold: 25.0,
            keyframe_stride: 0,
            probability_k: 8.0,
            ncc_threshold: 0.9,
            top_n: 10,
        }
    }
}

impl MediaConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.delta_max > 64 || self.delta_match > 64 {
            return Err("media distances must lie in [0, 64]".into());
        }
        if !(self.block_threshold >= 0.0 && self.block_threshold <= 255.0) {
            return Err("media.block_threshold must lie in [0, 255]".into());
        }
        if self.probability_k.is_nan() || self.probability_k <= 0.0 {
            return Err("media.probability_k must be > 0".into());
        }
        if !(0.0..=1.0).contains(&self.ncc_threshold) {
            return Err("media.ncc_threshold must lie in [0, 1]".into());
        }
        if self.top_n == 0 {
            return Err("media.top_n must be >= 1".into());
        }
        Ok(())
    }

    pub fn search_params(&self) -> SearchParams {
        SearchParams { n: self.top_n, delta_max: self.delta_max, ncc_threshold: self.ncc_threshold }
    }

    pub fn manipulation_params(&self) -> ManipulationParams {
        ManipulationParams {
            delta_match: self.delta_match,
            block_threshold: self.block_threshold,
            probability_k: self.probability_k,
            ncc_threshold: self.ncc_threshold,
        }
    }
}

/// Analysis of one media item of an asset.
#[derive(Debug, Clone, PartialEq)]
pub struct MediaFinding {
    pub media_id: Digest,
    pub search: ReverseSearchResult,
    pub manipulation: ManipulationReport,
}

/// Searches and diffs `query` against media registered by other assets.
pub fn analyze_media(index: &MediaIndex, query: &MediaAsset, owner: &str, config: &MediaConfig) -> MediaFinding {
    MediaFinding {
        media_id: query.media_id,
        search: index.reverse_search_excluding(query, &config.search_params(), Some(owner)),
        manipulation: index.detect_manipulation_excluding(query, &config.manipulation_params(), Some(owner)),
    }
}

fn reuse_criterion(kind: MediaKind) -> Criterion {
    match kind {
        MediaKind::Image => Criterion::ImageReuse,
        MediaKind::Video => Criterion::VideoReuse,
    }
}

fn manipulation_criterion(kind: MediaKind) -> Criterion {
    match kind {
        MediaKind::Image => Criterion::ImageManipulation,
        MediaKind::Video => Criterion::VideoManipulation,
    }
}

/// Reuse verdict: caution when some item geometrically matches media
/// registered elsewhere, scored `1 − d/(delta_max + 1)` for the closest such
/// match.
pub fn assess_reuse(kind: MediaKind, findings: &[MediaFinding], config: &MediaConfig) -> AnalysisResult {
    let criterion = reuse_criterion(kind);
    let noun = if kind == MediaKind::Image { "image" } else { "video" };
    if findings.is_empty() {
        return AnalysisResult::unavailable(criterion, format!("No {noun} to check."));
    }
    let best = findings
        .iter()
        .flat_map(|f| f.search.matches.iter().filter(|m| m.geometric_valid))
        .map(|m| m.hamming_distance)
        .min();
    let score = best.map_or(0.0, |d| 1.0 - d as f64 / (config.delta_max as f64 + 1.0));
    let explanation = match best {
        Some(d) => format!(
            "This {noun} closely matches previously published material (hash distance {d}); it may be reused out of context."
        ),
        None => format!("No earlier copies of this {noun} were found."),
    };
    let evidence = findings.iter().map(|f| json!({ "media_id": f.media_id, "matches": f.search.matches })).collect();
    let match_count: usize = findings.iter().map(|f| f.search.matches.len()).sum();
    let mut result = AnalysisResult::graded(criterion, score, explanation)
        .with_evidence(evidence)
        .with_measure("matchCount", match_count as f64)
        .with_measure("threshold", config.delta_max as f64);
    if let Some(d) = best {
        result = result.with_measure("nearestDistance", d as f64);
    }
    result
}

/// Manipulation verdict: caution scored by the highest manipulation
/// probability among items with a matched original.
pub fn assess_manipulation(kind: MediaKind, findings: &[MediaFinding], config: &MediaConfig) -> AnalysisResult {
    let criterion = manipulation_criterion(kind);
    let noun = if kind == MediaKind::Image { "image" } else { "video" };
    if findings.is_empty() {
        return AnalysisResult::unavailable(criterion, format!("No {noun} to check."));
    }
    let worst = findings
        .iter()
        .max_by(|a, b| a.manipulation.probability.total_cmp(&b.manipulation.probability))
        .expect("non-empty findings");
    let report = &worst.manipulation;
    let explanation = if report.probability > 0.0 {
        format!(
            "Parts of this {noun} differ from a registered original ({:.1}% of the area); it may have been edited.",
            100.0 * report.manipulated_area_fraction
        )
    } else if findings.iter().any(|f| f.manipulation.matched_original.is_some()) {
        format!("This {noun} is identical to its registered original.")
    } else {
        format!("No registered original was found to compare this {noun} against.")
    };
    let evidence = findings.iter().map(|f| json!({ "media_id": f.media_id, "report": f.manipulation })).collect();
    AnalysisResult::graded(criterion, report.probability, explanation)
        .with_evidence(evidence)
        .with_measure("manipulationProbability", report.probability)
        .with_measure("manipulatedAreaFraction", report.manipulated_area_fraction)
        .with_measure("polygonArea", report.polygon_area() as f64)
        .with_measure("regionCount", report.regions.len() as f64)
        .with_measure("threshold", config.block_threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stride_defaults() {
        assert_eq!(keyframe_stride(10, 0), 2);
        assert_eq!(keyframe_stride(11, 0), 3);
        assert_eq!(keyframe_stride(1, 0), 1);
        assert_eq!(keyframe_stride(0, 0), 1);
        assert_eq!(keyframe_stride(10, 4), 4);
        assert_eq!(sample_keyframes(&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9], 0), [0, 2, 4, 6, 8]);
        assert_eq!(sample_keyframes(&[7], 0), [7]);
    }

    #[test]
    fn blob_round_trip_for_image_and_video() {
        let dir = tempfile::tempdir().unwrap();
        let blobs = BlobStore::open(dir.path()).unwrap();
        let frames: Vec<GrayImage> = (0..4).map(|i| GrayImage::from_fn(16, 12, |x, y| (x * i + y) as u8)).collect();
        let d = blobs.put(&frames[0].to_pgm()).unwrap();
        let img = load_image(&blobs, &d).unwrap();
        assert_eq!(img, MediaAsset::image(frames[0].clone()));

        let manifest = VideoManifest { frames: frames.iter().map(|f| blobs.put(&f.to_pgm()).unwrap()).collect() };
        let vd = blobs.put(&manifest.to_bytes()).unwrap();
        let video = load_video(&blobs, &vd, 0).unwrap();
        assert_eq!(video.media_id, MediaAsset::video(frames.clone()).media_id);
        assert_eq!(video.frames.len(), 4);
        assert_eq!(load_video(&blobs, &vd, 3).unwrap().frames.len(), 2);
    }

    #[test]
    fn no_media_is_unavailable() {
        let cfg = MediaConfig::default();
        assert_eq!(assess_reuse(MediaKind::Video, &[], &cfg).criterion, Criterion::VideoReuse);
        assert_eq!(assess_manipulation(MediaKind::Image, &[], &cfg).status, crate::model::Status::Unavailable);
    }
}
