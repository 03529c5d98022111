//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use chrono::{DateTime, TimeZone, Utc};
use provenance_core::companion::{Level, Sensitivity, UserModel, WarningPref};
use provenance_core::media::GrayImage;
use provenance_core::{
    AnalysisBundle, AnalysisResult, AssetMeta, Criterion, Digest, EngagementScore, FragmentKind, FragmentRef,
    LedgerReceipt, Source, Status, TopicAssignment, VerificationRecord,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

// ------------------------------------------------------------------ BM25

/// Direct evaluation of the BM25 sum for every document, no index.
pub fn bm25_brute_force(docs: &[(String, Vec<String>)], query: &[String], k1: f64, b: f64) -> Vec<(String, f64)> {
    let n = docs.len() as f64;
    let avgdl = docs.iter().map(|(_, t)| t.len()).sum::<usize>() as f64 / n;
    let terms: BTreeSet<&String> = query.iter().collect();
    let mut out = Vec::new();
    for (id, toks) in docs {
        let mut score = 0.0;
        let mut hit = false;
        for t in &terms {
            let tf = toks.iter().filter(|x| x == t).count() as f64;
            if tf == 0.0 {
                continue;
            }
            hit = true;
            let df = docs.iter().filter(|(_, d)| d.contains(t)).count() as f64;
            let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * toks.len() as f64 / avgdl));
        }
        if hit {
            out.push((id.clone(), score));
        }
    }
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    out
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

// ------------------------------------------------------------------ text

pub fn cosine_oracle(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf29ce484222325u64, |h, b| (h ^ *b as u64).wrapping_mul(0x100000001b3))
}

/// Hashed trigram vector: lowercase words joined by single spaces, padded,
/// each character trigram counted in bucket `fnv1a(utf8) mod dim`. Not
/// normalized; the cosine oracle takes care of that.
pub fn trigram_vector(text: &str, dim: usize) -> Vec<f64> {
    let words: Vec<String> =
        text.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).map(str::to_lowercase).collect();
    let padded: Vec<char> = format!(" {} ", words.join(" ")).chars().collect();
    let mut v = vec![0.0; dim];
    for w in padded.windows(3) {
        let s: String = w.iter().collect();
        v[(fnv1a64(s.as_bytes()) % dim as u64) as usize] += 1.0;
    }
    v
}

// ------------------------------------------------------------------ images

/// Smooth random texture: a sum of Gaussian bumps over a gradient.
pub fn texture(seed: u64, w: u32, h: u32) -> GrayImage {
    let mut r = rng(seed);
    let bumps: Vec<(f64, f64, f64, f64)> = (0..24)
        .map(|_| {
            (
                r.gen_range(0.0..w as f64),
                r.gen_range(0.0..h as f64),
                r.gen_range(w as f64 / 20.0..w as f64 / 6.0),
                r.gen_range(-110.0..110.0),
            )
        })
        .collect();
    let base = r.gen_range(80.0..170.0);
    GrayImage::from_fn(w, h, |x, y| {
        let mut v = base;
        for (cx, cy, rad, amp) in &bumps {
            let d2 = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)) / (rad * rad);
            v += amp * (-d2).exp();
        }
        v.round().clamp(0.0, 255.0) as u8
    })
}

/// Copies a `size`-square block of `img` from `(sx, sy)` over `(dx, dy)`.
pub fn copy_move(img: &GrayImage, sx: u32, sy: u32, dx: u32, dy: u32, size: u32) -> GrayImage {
    let mut out = img.clone();
    for y in 0..size {
        for x in 0..size {
            out.set(dx + x, dy + y, img.get(sx + x, sy + y));
        }
    }
    out
}

// ------------------------------------------------------------------ bundles

pub fn ts(secs: i64) -> DateTime<Utc> {
    Utc.timestamp_opt(secs, 0).single().unwrap()
}

const WORDS: [&str; 8] = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel"];

fn random_result<R: Rng>(r: &mut R, c: Criterion) -> AnalysisResult {
    let status = *[Status::Pass, Status::Caution, Status::Unavailable].choose(r).unwrap();
    let mut res = match status {
        Status::Unavailable => AnalysisResult::unavailable(c, "not available"),
        Status::Pass => AnalysisResult::graded(c, 0.0, "fine"),
        Status::Caution => AnalysisResult::graded(c, r.gen_range(1e-9..=1.0), "caution \"quoted\"\nline"),
    };
    for i in 0..r.gen_range(0..4) {
        let v: f64 = r.gen_range(-1e6..1e6);
        res = res.with_measure(&format!("measure{i}"), v);
    }
    if r.gen_bool(0.5) {
        res = res.with_evidence(vec![serde_json::json!({"k": r.gen::<f64>(), "s": "e\u{e9}\t"})]);
    }
    res
}

/// A valid bundle with random fragments, publisher, topic and results.
pub fn random_bundle<R: Rng>(r: &mut R, i: usize) -> AnalysisBundle {
    let id = Digest::of(format!("asset-{i}-{}", r.gen::<u64>()).as_bytes());
    let mut fragments = vec![FragmentRef { fragment_id: "title".into(), kind: FragmentKind::Title, blob: None }];
    if r.gen_bool(0.5) {
        fragments.push(FragmentRef { fragment_id: "body".into(), kind: FragmentKind::Body, blob: None });
    }
    for j in 0..r.gen_range(0..3) {
        let kind = if r.gen_bool(0.5) { FragmentKind::Image } else { FragmentKind::Video };
        fragments.push(FragmentRef {
            fragment_id: format!("{}-{j}", kind.as_str()),
            kind,
            blob: Some(Digest::of(&[i as u8, j as u8])),
        });
    }
    let title = r.gen_bool(0.8).then(|| format!("Title {i} {}", WORDS.choose(r).unwrap()));
    let publisher = if r.gen_bool(0.8) { format!("Outlet {}", WORDS[..3].choose(r).unwrap()) } else { String::new() };
    let topic = TopicAssignment {
        concept: WORDS[..2].choose(r).unwrap().to_string(),
        category: WORDS[2..4].choose(r).unwrap().to_string(),
        topic: WORDS[4..].choose(r).unwrap().to_string(),
    };
    let results = Criterion::ALL.into_iter().map(|c| (c, random_result(r, c))).collect();
    AnalysisBundle {
        asset_id: id,
        asset: AssetMeta {
            url: format!("https://example.org/a/{i}"),
            title,
            publisher,
            published_at: ts(1_700_000_000 + i as i64 * 3600),
            source: if r.gen_bool(0.5) { Source::Monitor } else { Source::TrustedAnalyst },
            fragments,
            topic,
        },
        ledger_receipt: LedgerReceipt {
            asset_id: id,
            block_index: i as u64,
            block_hash: Digest::of(format!("block{i}").as_bytes()),
            content_digest: Digest::of(format!("content{i}").as_bytes()),
        },
        results,
        engagement: EngagementScore::new(r.gen_range(0..10_000), r.gen_range(0..1000), r.gen_range(0..500)),
        completed_at: ts(1_700_100_000 + i as i64),
    }
}

/// Triple count per the mapping table, for a set of bundles with distinct
/// asset ids. Criterion nodes, agents and topic-path nodes are shared.
///
/// | node            | triples                                                   |
/// |-----------------|-----------------------------------------------------------|
/// | asset           | type, url, issued, source, digest, index, hash, likes,    |
/// |                 | shares, comments, engagement, completedAt, inTopic (13)   |
/// |                 | + title if present + publisher if non-empty               |
/// |                 | + one hasFragment per fragment                            |
/// | fragment        | type, kind (2) + blobDigest for media                     |
/// | agent           | type, name (2), once per publisher                        |
/// | concept         | type, label (2), once                                     |
/// | category        | type, label, concept hasCategory (3), once                |
/// | topic           | type, label, category hasTopic (3), once                  |
/// | topic→asset     | hasArticle (1) per asset                                  |
/// | criterion       | type, label (2), once per criterion                       |
/// | observation     | type, asset, criterion, status, score, explanation,       |
/// |                 | evidence (7) + one per measure                            |
pub fn mapping_oracle_count(bundles: &[AnalysisBundle]) -> usize {
    let mut total = 0;
    let mut agents = BTreeSet::new();
    let mut concepts = BTreeSet::new();
    let mut categories = BTreeSet::new();
    let mut topics = BTreeSet::new();
    let mut criteria = BTreeSet::new();
    for b in bundles {
        let m = &b.asset;
        total += 13 + usize::from(m.title.is_some()) + usize::from(!m.publisher.is_empty());
        for f in &m.fragments {
            total += 1 + 2 + usize::from(matches!(f.kind, FragmentKind::Image | FragmentKind::Video));
        }
        if !m.publisher.is_empty() {
            agents.insert(m.publisher.clone());
        }
        let t = &m.topic;
        concepts.insert(t.concept.clone());
        categories.insert((t.concept.clone(), t.category.clone()));
        topics.insert((t.concept.clone(), t.category.clone(), t.topic.clone()));
        total += 1;
        for (c, r) in &b.results {
            criteria.insert(*c);
            total += 7 + r.measures.len();
        }
    }
    total + 2 * agents.len() + 2 * concepts.len() + 3 * categories.len() + 3 * topics.len() + 2 * criteria.len()
}

// ------------------------------------------------------------------ companion

pub fn random_record<R: Rng>(r: &mut R, i: usize) -> VerificationRecord {
    let b = random_bundle(r, i);
    let mut results: BTreeMap<Criterion, AnalysisResult> = b.results;
    // Scores near the low-sensitivity floor exercise the boundary.
    for res in results.values_mut() {
        if res.status == Status::Caution && r.gen_bool(0.3) {
            res.score = *[0.25, 0.2499999, 0.2500001, 1.0].choose(r).unwrap();
        }
    }
    VerificationRecord {
        asset_id: b.asset_id,
        url: b.asset.url,
        title: b.asset.title,
        publisher: b.asset.publisher,
        topic: b.asset.topic,
        ledger_receipt: b.ledger_receipt,
        engagement: b.engagement,
        results,
    }
}

pub fn random_user<R: Rng>(r: &mut R, i: usize) -> UserModel {
    let levels = Level::ALL;
    let sens = [Sensitivity::Low, Sensitivity::Normal, Sensitivity::High];
    let mut u = UserModel::default_for(&format!("user-{i}"));
    u.digital_literacy = *levels.choose(r).unwrap();
    if r.gen_bool(0.5) {
        u.domain_knowledge.insert(WORDS[4..].choose(r).unwrap().to_string(), *levels.choose(r).unwrap());
    }
    for c in Criterion::ALL {
        u.warning_prefs.insert(c, WarningPref { enabled: r.gen_bool(0.7), sensitivity: *sens.choose(r).unwrap() });
    }
    u
}
