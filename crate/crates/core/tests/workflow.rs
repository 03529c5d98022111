use std::sync::Arc;
use std::thread;

use provenance_core::config::Config;
use provenance_core::ingestion::{asset_id_for_url, RawFeedItem};
use provenance_core::platform::Platform;
use provenance_core::workflow::hooks::{FailingAnalyzer, Gate, PausingAnalyzer};
use provenance_core::workflow::{Analyzer, WorkflowStatus};
use provenance_core::{Criterion, Source, Status};
use serde_json::json;

fn item(url: &str) -> RawFeedItem {
    serde_json::from_value(json!({
        "url": url,
        "title": "Council approves new cycle lanes",
        "body": "The city council approved four new cycle lanes on Tuesday. \
                 Work on the first lane starts in March. The lanes will cost 2 million euros.",
        "publisher": "Test Gazette",
        "published_at": "2026-09-01T08:00:00Z",
    }))
    .unwrap()
}

fn config(dir: &tempfile::TempDir) -> Config {
    Config { data_dir: dir.path().to_path_buf(), ..Config::default() }
}

#[test]
fn failing_analyzer_degrades_only_its_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let p = Platform::open_with(config(&dir), |local| {
        local
            .iter()
            .map(|a| -> Arc<dyn Analyzer> {
                if a.criteria().contains(&Criterion::Tone) {
                    Arc::new(FailingAnalyzer::new(a.name(), a.criteria()))
                } else {
                    Arc::clone(a)
                }
            })
            .collect()
    })
    .unwrap();
    let reg = p.ingestor.register(&item("https://gazette.example/lanes"), Source::Monitor).unwrap();
    let bundle = reg.bundle.unwrap();
    assert_eq!(bundle.results.len(), 7);
    assert_eq!(bundle.results[&Criterion::Tone].status, Status::Unavailable);
    assert_ne!(bundle.results[&Criterion::WritingQuality].status, Status::Unavailable);
    assert_eq!(p.workflow.status(&reg.asset.asset_id), WorkflowStatus::Stored);
    assert!(p.graph.get_verification(&reg.asset.asset_id).is_some());
}

#[test]
fn status_is_analyzing_while_analyzers_run() {
    let dir = tempfile::tempdir().unwrap();
    let gate = Gate::new();
    let g = gate.clone();
    let p = Arc::new(
        Platform::open_with(config(&dir), move |local| {
            local
                .iter()
                .map(|a| -> Arc<dyn Analyzer> { Arc::new(PausingAnalyzer::new(Arc::clone(a), g.clone())) })
                .collect()
        })
        .unwrap(),
    );
    let url = "https://gazette.example/paused";
    let id = asset_id_for_url(url).unwrap();
    assert_eq!(p.workflow.status(&id), WorkflowStatus::Unknown);

    let worker = {
        let p = Arc::clone(&p);
        thread::spawn(move || p.ingestor.register(&item(url), Source::Monitor).unwrap())
    };
    gate.wait_entered(p.local_analyzers.len());
    assert_eq!(p.workflow.status(&id), WorkflowStatus::Analyzing);
    assert!(p.graph.get_verification(&id).is_none());
    // The ledger receipt is written before analysis starts.
    assert_eq!(p.ledger.len(), 1);

    gate.open();
    worker.join().unwrap();
    assert_eq!(p.workflow.status(&id), WorkflowStatus::Stored);
    assert!(p.graph.get_verification(&id).is_some());
}

#[test]
fn text_only_asset_without_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let p = Platform::open(config(&dir)).unwrap();
    let reg = p.ingestor.register(&item("https://gazette.example/text-only"), Source::Monitor).unwrap();
    let results = reg.bundle.unwrap().results;
    let unavailable: Vec<Criterion> =
        results.iter().filter(|(_, r)| r.status == Status::Unavailable).map(|(c, _)| *c).collect();
    // No trusted corpus is loaded either, so text similarity has nothing to compare against.
    assert_eq!(
        unavailable,
        [
            Criterion::TextSimilarity,
            Criterion::ImageReuse,
            Criterion::ImageManipulation,
            Criterion::VideoReuse,
            Criterion::VideoManipulation
        ]
    );
}

#[test]
fn identical_resubmission_is_not_reanalyzed() {
    let dir = tempfile::tempdir().unwrap();
    let p = Platform::open(config(&dir)).unwrap();
    let it = item("https://gazette.example/once");
    assert!(p.ingestor.register(&it, Source::Monitor).unwrap().created);
    let again = p.ingestor.register(&it, Source::Monitor).unwrap();
    assert!(!again.created && again.bundle.is_none());
    assert_eq!(p.ledger.len(), 1);

    let mut changed = it.clone();
    changed.body.push_str(" A public consultation opens next week.");
    assert!(p.ingestor.register(&changed, Source::Monitor).unwrap().created);
    assert_eq!(p.ledger.len(), 2);
}
