mod common;

use std::fs;

use chrono::{TimeZone, Utc};
use common::fixtures;
use provenance_core::config::Config;
use provenance_core::ingestion::{FixtureMonitor, MonitorQuery};
use provenance_core::pipeline::{render_table, run_pipeline, PipelineError};
use provenance_core::platform::Platform;
use provenance_core::{Criterion, Status};

fn platform(dir: &tempfile::TempDir) -> Platform {
    Platform::open(Config { data_dir: dir.path().to_path_buf(), ..Config::default() }).unwrap()
}

#[test]
fn demo_feed_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let p = platform(&dir);
    let demo = fixtures().join("demo");
    let report = run_pipeline(&p, &demo.join("feed.jsonl"), Some(&demo.join("corpus"))).unwrap();
    assert_eq!(report.rows.len(), 20);
    assert_eq!(report.distinct_assets, 20);
    assert_eq!(p.ledger.len(), 20);
    assert!(p.ledger.verify_chain().unwrap().ok);

    let bridge = report.rows.iter().find(|r| r.url.contains("harbour-bridge-reopens")).unwrap();
    assert_eq!(bridge.statuses.len(), 7);
    assert!(bridge.statuses.values().all(|s| *s == Status::Pass), "{:?}", bridge.statuses);

    let summary = p.query.caution_summary();
    for row in &summary {
        assert_eq!(report.caution_counts[&row.criterion], row.caution, "{}", row.criterion);
    }
    // Every criterion is exercised by at least one caution in the demo feed.
    assert!(Criterion::ALL.iter().all(|c| report.caution_counts[c] > 0), "{:?}", report.caution_counts);

    let table = render_table(&report);
    assert_eq!(table.lines().count(), 22);
    assert!(table.contains("CAUTION"));
}

#[test]
fn rerun_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let p = platform(&dir);
    let demo = fixtures().join("demo");
    let first = run_pipeline(&p, &demo.join("feed.jsonl"), Some(&demo.join("corpus"))).unwrap();
    let second = run_pipeline(&p, &demo.join("feed.jsonl"), None).unwrap();
    assert_eq!(first.rows, second.rows);
    assert_eq!(p.ledger.len(), 20);
}

#[test]
fn empty_feed_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_pipeline(&platform(&dir), &fixtures().join("demo/empty.jsonl"), None).unwrap();
    assert!(report.rows.is_empty());
    assert_eq!(report.distinct_assets, 0);
    assert!(report.caution_counts.values().all(|n| *n == 0));
}

#[test]
fn unreadable_or_malformed_feed_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = platform(&dir);
    let missing = run_pipeline(&p, &dir.path().join("nope.jsonl"), None);
    assert!(matches!(missing, Err(PipelineError::Source(_))));

    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"url\": \"https://x.example/a\"}\n").unwrap();
    assert!(matches!(run_pipeline(&p, &bad, None), Err(PipelineError::Source(_))));
}

#[test]
fn keyword_poll_is_newest_first() {
    let monitor = FixtureMonitor::new(fixtures().join("demo/feed.jsonl"));
    let hits = monitor.poll(&MonitorQuery { keywords: vec!["Vaccine".into()], ..MonitorQuery::default() }).unwrap();
    assert_eq!(hits.len(), 3);
    assert!(hits.windows(2).all(|w| w[0].published_at >= w[1].published_at));

    let since = Utc.with_ymd_and_hms(2026, 9, 6, 0, 0, 0).unwrap();
    let recent = monitor.poll(&MonitorQuery { since, limit: 4, ..MonitorQuery::default() }).unwrap();
    assert_eq!(recent.len(), 4);
    assert!(recent.iter().all(|i| i.published_at >= since));
    assert!(monitor.poll(&MonitorQuery { limit: 0, ..MonitorQuery::default() }).is_err());
}
