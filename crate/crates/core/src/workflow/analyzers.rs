use std::sync::Arc;

use super::{Analyzer, AnalyzerError, AnalyzerInput};
use crate::ledger::BlobStore;
use crate::media::{self, MediaAsset, MediaConfig, MediaIndex, MediaKind};
use crate::model::{AnalysisResult, Criterion};
use crate::text::join_title_body;
use crate::text_similarity::TextSimilarity;
use crate::tone::{self, EmotionLexicon, ToneThresholds};
use crate::writing_quality::{self, TermList, WqsConfig};

pub struct TextSimilarityAnalyzer {
    engine: Arc<TextSimilarity>,
}

impl TextSimilarityAnalyzer {
    pub fn new(engine: Arc<TextSimilarity>) -> Self {
        TextSimilarityAnalyzer { engine }
    }
}

impl Analyzer for TextSimilarityAnalyzer {
    fn name(&self) -> &str {
        "text_similarity"
    }

    fn criteria(&self) -> &[Criterion] {
        &[Criterion::TextSimilarity]
    }

    fn analyze(&self, input: &AnalyzerInput) -> Result<Vec<AnalysisResult>, AnalyzerError> {
        let result = match input.body.as_deref() {
            None => AnalysisResult::unavailable(Criterion::TextSimilarity, "No article text to check."),
            Some(body) => {
                let verdict = self.engine.verify(input.title.as_deref().unwrap_or(""), body);
                self.engine.to_result(&verdict)
            }
        };
        Ok(vec![result])
    }
}

/// Title and body joined as one passage; `None` when both are absent.
fn article_text(input: &AnalyzerInput) -> Option<String> {
    if input.title.is_none() && input.body.is_none() {
        return None;
    }
    Some(join_title_body(input.title.as_deref(), input.body.as_deref()))
}

pub struct ToneAnalyzer {
    lexicon: Arc<EmotionLexicon>,
    thresholds: ToneThresholds,
}

impl ToneAnalyzer {
    pub fn new(lexicon: Arc<EmotionLexicon>, thresholds: ToneThresholds) -> Self {
        ToneAnalyzer { lexicon, thresholds }
    }
}

impl Analyzer for ToneAnalyzer {
    fn name(&self) -> &str {
        "tone"
    }

    fn criteria(&self) -> &[Criterion] {
        &[Criterion::Tone]
    }

    fn analyze(&self, input: &AnalyzerInput) -> Result<Vec<AnalysisResult>, AnalyzerError> {
        let result = match article_text(input) {
            None => AnalysisResult::unavailable(Criterion::Tone, "No article text to check."),
            Some(text) => tone::assess(&tone::score_emotions(&text, &self.lexicon), &self.thresholds),
        };
        Ok(vec![result])
    }
}

pub struct WritingQualityAnalyzer {
    terms: Arc<TermList>,
    config: WqsConfig,
}

impl WritingQualityAnalyzer {
    pub fn new(terms: Arc<TermList>, config: WqsConfig) -> Self {
        WritingQualityAnalyzer { terms, config }
    }
}

impl Analyzer for WritingQualityAnalyzer {
    fn name(&self) -> &str {
        "writing_quality"
    }

    fn criteria(&self) -> &[Criterion] {
        &[Criterion::WritingQuality]
    }

    fn analyze(&self, input: &AnalyzerInput) -> Result<Vec<AnalysisResult>, AnalyzerError> {
        let result = match article_text(input) {
            None => AnalysisResult::unavailable(Criterion::WritingQuality, "No article text to check."),
            Some(text) => {
                writing_quality::assess(&writing_quality::compute_wqs(&text, &self.terms, &self.config), &self.config)
            }
        };
        Ok(vec![result])
    }
}

/// Shared body of the image and video analyzers: search and diff each item
/// against other assets' media, then register it under this asset.
fn analyze_kind(
    kind: MediaKind,
    items: Vec<MediaAsset>,
    owner: &str,
    index: &MediaIndex,
    config: &MediaConfig,
) -> Result<Vec<AnalysisResult>, AnalyzerError> {
    let findings: Vec<_> = items.iter().map(|m| media::analyze_media(index, m, owner, config)).collect();
    for m in &items {
        index.register_owned(m, Some(owner)).map_err(|e| AnalyzerError::new(e.to_string()))?;
    }
    Ok(vec![media::assess_reuse(kind, &findings, config), media::assess_manipulation(kind, &findings, config)])
}

pub struct ImageAnalyzer {
    index: Arc<MediaIndex>,
    blobs: BlobStore,
    config: MediaConfig,
}

impl ImageAnalyzer {
    pub fn new(index: Arc<MediaIndex>, blobs: BlobStore, config: MediaConfig) -> Self {
        ImageAnalyzer { index, blobs, config }
    }
}

impl Analyzer for ImageAnalyzer {
    fn name(&self) -> &str {
        "image"
    }

    fn criteria(&self) -> &[Criterion] {
        &[Criterion::ImageReuse, Criterion::ImageManipulation]
    }

    fn analyze(&self, input: &AnalyzerInput) -> Result<Vec<AnalysisResult>, AnalyzerError> {
        let items = input
            .images
            .iter()
            .map(|d| media::load_image(&self.blobs, d))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| AnalyzerError::new(e.to_string()))?;
        analyze_kind(MediaKind::Image, items, &input.asset_id.to_hex(), &self.index, &self.config)
    }
}

pub struct VideoAnalyzer {
    index: Arc<MediaIndex>,
    blobs: BlobStore,
    config: MediaConfig,
}

impl VideoAnalyzer {
    pub fn new(index: Arc<MediaIndex>, blobs: BlobStore, config: MediaConfig) -> Self {
        VideoAnalyzer { index, blobs, config }
    }
}

impl Analyzer for VideoAnalyzer {
    fn name(&self) -> &str {
        "video"
    }

    fn criteria(&self) -> &[Criterion] {
        &[Criterion::VideoReuse, Criterion::VideoManipulation]
    }

    fn analyze(&self, input: &AnalyzerInput) -> Result<Vec<AnalysisResult>, AnalyzerError> {
        let items = input
            .videos
            .iter()
            .map(|d| media::load_video(&self.blobs, d, self.config.keyframe_stride))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| AnalyzerError::new(e.to_string()))?;
        analyze_kind(MediaKind::Video, items, &input.asset_id.to_hex(), &self.index, &self.config)
    }
}
