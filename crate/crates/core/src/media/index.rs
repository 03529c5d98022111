use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use serde::{Deserialize, Serialize};

use super::hash::{ncc, PerceptualHash};
use super::raster::{resample, GrayImage};
use super::{MediaAsset, MediaError, MediaKind};
use crate::digest::Digest;
use crate::par::Execution;

pub const THUMB_SIZE: u32 = 64;
pub const DIFF_SIZE: u32 = 256;
pub const BLOCK: u32 = 8;
pub const GRID: u32 = DIFF_SIZE / BLOCK;
pub const BLOCK_COUNT: usize = (GRID * GRID) as usize;

/// Per-frame data derived from a raster.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSignature {
    pub hash: PerceptualHash,
    pub thumb: Vec<u8>,
    pub normalized: Vec<u8>,
    pub width: u32,
    pub height: u32,
}

impl FrameSignature {
    pub fn of(img: &GrayImage) -> Self {
        FrameSignature {
            hash: PerceptualHash::of(img),
            thumb: resample(img, THUMB_SIZE, THUMB_SIZE).pixels,
            normalized: resample(img, DIFF_SIZE, DIFF_SIZE).pixels,
            width: img.width,
            height: img.height,
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    kind: MediaKind,
    owners: BTreeSet<String>,
    frames: Vec<FrameSignature>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum LogLine {
    Register { media_id: Digest, kind: MediaKind, owner: Option<String>, frames: Vec<StoredFrame> },
    Owner { media_id: Digest, owner: String },
}

#[derive(Debug, Serialize, Deserialize)]
struct StoredFrame {
    hash: PerceptualHash,
    width: u32,
    height: u32,
    thumb: String,
    normalized: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchMatch {
    pub media_id: Digest,
    pub hamming_distance: u32,
    pub geometric_valid: bool,
    #[serde(skip)]
    query_frame: usize,
    #[serde(skip)]
    matched_frame: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ReverseSearchResult {
    pub matches: Vec<SearchMatch>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

impl Region {
    pub fn area(&self) -> u64 {
        self.width as u64 * self.height as u64
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        x >= self.x && y >= self.y && x < self.x + self.width && y < self.y + self.height
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManipulationReport {
    pub matched_original: Option<Digest>,
    pub probability: f64,
    pub regions: Vec<Region>,
    pub manipulated_area_fraction: f64,
    /// Query frame the report was computed on.
    pub frame_index: usize,
}

impl ManipulationReport {
    fn none() -> Self {
        ManipulationReport {
            matched_original: None,
            probability: 0.0,
            regions: Vec::new(),
            manipulated_area_fraction: 0.0,
            frame_index: 0,
        }
    }

    pub fn polygon_area(&self) -> u64 {
        self.regions.iter().map(Region::area).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchParams {
    pub n: usize,
    pub delta_max: u32,
    pub ncc_threshold: f64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams { n: 10, delta_max: 16, ncc_threshold: 0.9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManipulationParams {
    pub delta_match: u32,
    pub block_threshold: f64,
    pub probability_k: f64,
    pub ncc_threshold: f64,
}

impl Default for ManipulationParams {
    fn default() -> Self {
        ManipulationParams { delta_match: 10, block_threshold: 25.0, probability_k: 8.0, ncc_threshold: 0.9 }
    }
}

/// `1 − exp(−k·f)`.
pub fn manipulation_probability(area_fraction: f64, k: f64) -> f64 {
    1.0 - (-k * area_fraction).exp()
}

/// Perceptual-hash index of registered media with thumbnails kept for
/// geometric validation and block diffing.
pub struct MediaIndex {
    entries: RwLock<BTreeMap<Digest, Entry>>,
    log_path: Option<PathBuf>,
    pub exec: Execution,
}

impl MediaIndex {
    pub fn in_memory() -> Self {
        MediaIndex { entries: RwLock::new(BTreeMap::new()), log_path: None, exec: Execution::default() }
    }

    /// Opens an index persisted as a JSON-lines log in `dir`.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, MediaError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let log_path = dir.join("media_index.jsonl");
        let mut entries = BTreeMap::new();
        match fs::read_to_string(&log_path) {
            Ok(text) => {
                for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                    let parsed: LogLine =
                        serde_json::from_str(line).map_err(|e| MediaError::Index(format!("line {}: {e}", n + 1)))?;
                    apply(&mut entries, parsed)?;
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e.into()),
        }
        Ok(MediaIndex { entries: RwLock::new(entries), log_path: Some(log_path), exec: Execution::default() })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    /// Number of indexed frame hashes.
    pub fn len(&self) -> usize {
        self.entries.read().expect("media index lock poisoned").values().map(|e| e.frames.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn media_count(&self) -> usize {
        self.entries.read().expect("media index lock poisoned").len()
    }

    pub fn kind(&self, media_id: &Digest) -> Option<MediaKind> {
        self.entries.read().expect("media index lock poisoned").get(media_id).map(|e| e.kind)
    }

    pub fn hashes(&self, media_id: &Digest) -> Option<Vec<PerceptualHash>> {
        let entries = self.entries.read().expect("media index lock poisoned");
        entries.get(media_id).map(|e| e.frames.iter().map(|f| f.hash).collect())
    }

    pub fn register_media(&self, asset: &MediaAsset) -> Result<(), MediaError> {
        self.register_owned(asset, None)
    }

    /// Registers a media asset on behalf of `owner` (an asset id).
    /// Re-registering a media id only records the additional owner.
    pub fn register_owned(&self, asset: &MediaAsset, owner: Option<&str>) -> Result<(), MediaError> {
        asset.validate()?;
        let mut entries = self.entries.write().expect("media index lock poisoned");
        if let Some(existing) = entries.get_mut(&asset.media_id) {
            if let Some(owner) = owner {
                if existing.owners.insert(owner.to_string()) {
                    self.append(&LogLine::Owner { media_id: asset.media_id, owner: owner.to_string() })?;
                }
            }
            return Ok(());
        }
        let frames: Vec<FrameSignature> = self.exec.map(&asset.frames, FrameSignature::of);
        let line = LogLine::Register {
            media_id: asset.media_id,
            kind: asset.kind,
            owner: owner.map(str::to_string),
            frames: frames
                .iter()
                .map(|f| StoredFrame {
                    hash: f.hash,
                    width: f.width,
                    height: f.height,
                    thumb: B64.encode(&f.thumb),
                    normalized: B64.encode(&f.normalized),
                })
                .collect(),
        };
        self.append(&line)?;
        entries.insert(
            asset.media_id,
            Entry { kind: asset.kind, owners: owner.map(str::to_string).into_iter().collect(), frames },
        );
        Ok(())
    }

    fn append(&self, line: &LogLine) -> Result<(), MediaError> {
        if let Some(path) = &self.log_path {
            let mut file = OpenOptions::new().create(true).append(true).open(path)?;
            let mut text = serde_json::to_string(line).map_err(|e| MediaError::Index(e.to_string()))?;
            text.push('\n');
            file.write_all(text.as_bytes())?;
        }
        Ok(())
    }

    pub fn reverse_search(&self, query: &MediaAsset, params: &SearchParams) -> ReverseSearchResult {
        let signatures: Vec<FrameSignature> = query.frames.iter().map(FrameSignature::of).collect();
        self.search_signatures(&signatures, params, None)
    }

    /// Reverse search ignoring media whose only owner is `owner`.
    pub fn reverse_search_excluding(
        &self,
        query: &MediaAsset,
        params: &SearchParams,
        owner: Option<&str>,
    ) -> ReverseSearchResult {
        let signatures: Vec<FrameSignature> = query.frames.iter().map(FrameSignature::of).collect();
        self.search_signatures(&signatures, params, owner)
    }

    fn search_signatures(
        &self,
        query: &[FrameSignature],
        params: &SearchParams,
        owner: Option<&str>,
    ) -> ReverseSearchResult {
        let entries = self.entries.read().expect("media index lock poisoned");
        let candidates: Vec<(&Digest, &Entry)> = entries
            .iter()
            .filter(|(_, e)| match owner {
                Some(o) => !(e.owners.len() == 1 && e.owners.contains(o)),
                None => true,
            })
            .collect();
        let mut matches: Vec<SearchMatch> = self.exec.filter_map(&candidates, |(id, entry)| {
            // Minimum distance over all (query frame, entry frame) pairs.
            let mut best: Option<(u32, usize, usize)> = None;
            for (qi, q) in query.iter().enumerate() {
                for (ei, f) in entry.frames.iter().enumerate() {
                    let d = q.hash.distance(f.hash);
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, qi, ei));
                    }
                }
            }
            let (distance, qi, ei) = best?;
            (distance <= params.delta_max).then(|| SearchMatch {
                media_id: **id,
                hamming_distance: distance,
                geometric_valid: ncc(&query[qi].thumb, &entry.frames[ei].thumb) >= params.ncc_threshold,
                query_frame: qi,
                matched_frame: ei,
            })
        });
        matches.sort_by(|a, b| a.hamming_distance.cmp(&b.hamming_distance).then(a.media_id.cmp(&b.media_id)));
        matches.truncate(params.n);
        ReverseSearchResult { matches }
    }

    pub fn detect_manipulation(&self, query: &MediaAsset, params: &ManipulationParams) -> ManipulationReport {
        self.detect_manipulation_excluding(query, params, None)
    }

    /// Selects the closest geometrically valid match within `delta_match`
    /// as the original and localizes differing 8×8 blocks on a 256×256 grid.
    /// For multi-frame queries the frame with the largest manipulated area
    /// is reported.
    pub fn detect_manipulation_excluding(
        &self,
        query: &MediaAsset,
        params: &ManipulationParams,
        owner: Option<&str>,
    ) -> ManipulationReport {
        let signatures: Vec<FrameSignature> = query.frames.iter().map(FrameSignature::of).collect();
        let search = SearchParams { n: usize::MAX, delta_max: params.delta_match, ncc_threshold: params.ncc_threshold };
        let result = self.search_signatures(&signatures, &search, owner);
        let Some(original) = result.matches.iter().find(|m| m.geometric_valid) else {
            return ManipulationReport::none();
        };
        let entries = self.entries.read().expect("media index lock poisoned");
        let entry = &entries[&original.media_id];

        let mut best: Option<ManipulationReport> = None;
        for (qi, q) in signatures.iter().enumerate() {
            let reference =
                entry.frames.iter().min_by_key(|f| q.hash.distance(f.hash)).expect("registered media have frames");
            let blocks = manipulated_blocks(&q.normalized, &reference.normalized, params.block_threshold, self.exec);
            let count = blocks.iter().filter(|b| **b).count();
            let fraction = count as f64 / BLOCK_COUNT as f64;
            let report = ManipulationReport {
                matched_original: Some(original.media_id),
                probability: if count == 0 { 0.0 } else { manipulation_probability(fraction, params.probability_k) },
                regions: block_regions(&blocks, q.width, q.height),
                manipulated_area_fraction: fraction,
                frame_index: qi,
            };
            if best.as_ref().is_none_or(|b| report.manipulated_area_fraction > b.manipulated_area_fraction) {
                best = Some(report);
            }
        }
        best.unwrap_or_else(ManipulationReport::none)
    }
}

fn apply(entries: &mut BTreeMap<Digest, Entry>, line: LogLine) -> Result<(), MediaError> {
    match line {
        LogLine::Register { media_id, kind, owner, frames } => {
            let decode = |s: &str, len: usize| -> Result<Vec<u8>, MediaError> {
                let v = B64.decode(s).map_err(|e| MediaError::Index(e.to_string()))?;
                if v.len() != len {
                    return Err(MediaError::Index(format!("stored raster for {media_id} has the wrong size")));
                }
                Ok(v)
            };
            let frames = frames
                .into_iter()
                .map(|f| {
                    Ok(FrameSignature {
                        hash: f.hash,
                        thumb: decode(&f.thumb, (THUMB_SIZE * THUMB_SIZE) as usize)?,
                        normalized: decode(&f.normalized, (DIFF_SIZE * DIFF_SIZE) as usize)?,
                        width: f.width,
                        height: f.height,
                    })
                })
                .collect::<Result<Vec<_>, MediaError>>()?;
            entries.entry(media_id).or_insert(Entry { kind, owners: owner.into_iter().collect(), frames });
        }
        LogLine::Owner { media_id, owner } => {
            if let Some(e) = entries.get_mut(&media_id) {
                e.owners.insert(owner);
            }
        }
    }
    Ok(())
}

/// Flags each 8×8 block of two 256×256 rasters whose mean absolute
/// difference exceeds `threshold`. Row-major over the 32×32 grid.
pub fn manipulated_blocks(a: &[u8], b: &[u8], threshold: f64, exec: Execution) -> Vec<bool> {
    exec.map_range(BLOCK_COUNT, |i| {
        let (bx, by) = (i as u32 % GRID, i as u32 / GRID);
        let mut sum = 0u32;
        for y in by * BLOCK..(by + 1) * BLOCK {
            for x in bx * BLOCK..(bx + 1) * BLOCK {
                let p = (y * DIFF_SIZE + x) as usize;
                sum += a[p].abs_diff(b[p]) as u32;
            }
        }
        sum as f64 / (BLOCK * BLOCK) as f64 > threshold
    })
}

/// Bounding rectangles of 4-connected flagged-block components, scaled to
/// a `width`×`height` image and sorted by position.
pub fn block_regions(blocks: &[bool], width: u32, height: u32) -> Vec<Region> {
    let mut seen = vec![false; blocks.len()];
    let mut regions = Vec::new();
    for start in 0..blocks.len() {
        if !blocks[start] || seen[start] {
            continue;
        }
        let (mut x0, mut y0, mut x1, mut y1) = (GRID, GRID, 0, 0);
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            let (bx, by) = (i as u32 % GRID, i as u32 / GRID);
            x0 = x0.min(bx);
            y0 = y0.min(by);
            x1 = x1.max(bx);
            y1 = y1.max(by);
            let mut visit = |nx: u32, ny: u32| {
                let j = (ny * GRID + nx) as usize;
                if blocks[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if bx > 0 {
                visit(bx - 1, by);
            }
            if bx + 1 < GRID {
                visit(bx + 1, by);
            }
            if by > 0 {
                visit(bx, by - 1);
            }
            if by + 1 < GRID {
                visit(bx, by + 1);
            }
        }
        let scale_lo = |b: u32, len: u32| (b as u64 * BLOCK as u64 * len as u64 / DIFF_SIZE as u64) as u32;
        let scale_hi = |b: u32, len: u32| {
            (((b as u64 + 1) * BLOCK as u64 * len as u64).div_ceil(DIFF_SIZE as u64) as u32).min(len)
        };
        let (px0, py0) = (scale_lo(x0, width), scale_lo(y0, height));
        let (px1, py1) = (scale_hi(x1, width), scale_hi(y1, height));
        regions.push(Region { x: px0, y: py0, width: px1 - px0, height: py1 - py0 });
    }
    regions.sort_by_key(|r| (r.y, r.x));
    regions
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(w: u32, h: u32, seed: u32) -> GrayImage {
        GrayImage::from_fn(w, h, |x, y| {
            let v = ((x * 3 + seed) as f64 / 9.0).sin() * 60.0 + ((y * 2 + seed) as f64 / 13.0).cos() * 50.0;
            (120.0 + v) as u8
        })
    }

    fn image(img: GrayImage) -> MediaAsset {
        MediaAsset::image(img)
    }

    #[test]
    fn register_is_idempotent_and_fans_out_frames() {
        let index = MediaIndex::in_memory();
        let a = image(textured(64, 48, 1));
        index.register_media(&a).unwrap();
        index.register_media(&a).unwrap();
        assert_eq!(index.len(), 1);
        let video = MediaAsset::video(vec![textured(40, 30, 2), textured(40, 30, 5), textured(40, 30, 9)]);
        index.register_media(&video).unwrap();
        assert_eq!(index.len(), 4);
        assert_eq!(index.media_count(), 2);
    }

    #[test]
    fn self_match_and_brightness_shift() {
        let index = MediaIndex::in_memory();
        let base = textured(100, 80, 3);
        index.register_media(&image(base.clone())).unwrap();
        index.register_media(&image(textured(100, 80, 40))).unwrap();
        let r = index.reverse_search(&image(base.clone()), &SearchParams::default());
        assert_eq!(r.matches[0].hamming_distance, 0);
        assert!(r.matches[0].geometric_valid);
        assert_eq!(r.matches[0].media_id, image(base.clone()).media_id);

        let brighter = GrayImage::from_fn(100, 80, |x, y| base.get(x, y) + 10);
        let r = index.reverse_search(&image(brighter), &SearchParams::default());
        assert_eq!(r.matches[0].hamming_distance, 0);
        assert!(r.matches[0].geometric_valid);
    }

    #[test]
    fn results_sorted_and_truncated() {
        let index = MediaIndex::in_memory();
        for seed in 0..6 {
            index.register_media(&image(textured(80, 60, seed))).unwrap();
        }
        let params = SearchParams { n: 3, delta_max: 64, ..Default::default() };
        let r = index.reverse_search(&image(textured(80, 60, 2)), &params);
        assert_eq!(r.matches.len(), 3);
        assert!(r
            .matches
            .windows(2)
            .all(|w| (w[0].hamming_distance, w[0].media_id) <= (w[1].hamming_distance, w[1].media_id)));
        assert!(MediaIndex::in_memory().reverse_search(&image(textured(8, 8, 0)), &params).matches.is_empty());
    }

    #[test]
    fn identical_copy_has_zero_probability() {
        let index = MediaIndex::in_memory();
        let base = textured(256, 256, 7);
        index.register_media(&image(base.clone())).unwrap();
        let r = index.detect_manipulation(&image(base), &ManipulationParams::default());
        assert!(r.matched_original.is_some());
        assert_eq!(r.probability, 0.0);
        assert!(r.regions.is_empty());
    }

    #[test]
    fn owner_exclusion_skips_own_media() {
        let index = MediaIndex::in_memory();
        let a = image(textured(64, 64, 1));
        index.register_owned(&a, Some("asset-a")).unwrap();
        let params = SearchParams::default();
        assert!(index.reverse_search_excluding(&a, &params, Some("asset-a")).matches.is_empty());
        assert_eq!(index.reverse_search_excluding(&a, &params, Some("asset-b")).matches.len(), 1);
        index.register_owned(&a, Some("asset-b")).unwrap();
        assert_eq!(index.reverse_search_excluding(&a, &params, Some("asset-a")).matches.len(), 1);
    }

    #[test]
    fn persisted_index_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let a = image(textured(50, 40, 4));
        {
            let index = MediaIndex::open(dir.path()).unwrap();
            index.register_owned(&a, Some("x")).unwrap();
            index.register_owned(&a, Some("y")).unwrap();
        }
        let index = MediaIndex::open(dir.path()).unwrap();
        assert_eq!(index.len(), 1);
        assert_eq!(index.hashes(&a.media_id).unwrap()[0], PerceptualHash::of(&a.frames[0]));
        assert_eq!(index.reverse_search_excluding(&a, &SearchParams::default(), Some("x")).matches.len(), 1);
    }

    #[test]
    fn regions_cover_components() {
        let mut blocks = vec![false; BLOCK_COUNT];
        for by in 4..12 {
            for bx in 8..16 {
                blocks[(by * GRID + bx) as usize] = true;
            }
        }
        blocks[(30 * GRID + 30) as usize] = true;
        let regions = block_regions(&blocks, 256, 256);
        assert_eq!(
            regions,
            [Region { x: 64, y: 32, width: 64, height: 64 }, Region { x: 240, y: 240, width: 8, height: 8 }]
        );
        let scaled = block_regions(&blocks, 128, 100);
        assert_eq!(scaled[0], Region { x: 32, y: 12, width: 32, height: 26 });
    }
}
