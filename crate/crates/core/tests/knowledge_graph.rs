mod common;

use common::{mapping_oracle_count, random_bundle, rng};
use proptest::prelude::*;
use provenance_core::knowledge_graph::{GraphError, KnowledgeGraph};
use provenance_core::{AnalysisResult, Criterion, Status};

#[test]
fn single_bundle_matches_mapping_count() {
    let kg = KnowledgeGraph::in_memory();
    let b = random_bundle(&mut rng(1), 0);
    let out = kg.store_bundle(&b).unwrap();
    assert_eq!(out.emitted, mapping_oracle_count(std::slice::from_ref(&b)));
    assert_eq!(out.inserted, out.emitted);
    assert_eq!(out.retracted, 0);
    assert_eq!(kg.len(), out.emitted);
    assert_eq!(kg.asset_ids(), vec![b.asset_id]);
}

#[test]
fn restore_replaces_owned_triples() {
    let kg = KnowledgeGraph::in_memory();
    let mut b = random_bundle(&mut rng(2), 0);
    kg.store_bundle(&b).unwrap();
    let again = kg.store_bundle(&b).unwrap();
    assert_eq!(kg.len(), mapping_oracle_count(std::slice::from_ref(&b)));
    assert_eq!(again.inserted, again.retracted);

    b.results.insert(
        Criterion::Tone,
        AnalysisResult::graded(Criterion::Tone, 0.8, "Emotionally charged language detected: anger."),
    );
    kg.store_bundle(&b).unwrap();
    let rec = kg.get_verification(&b.asset_id).unwrap();
    assert_eq!(rec.results[&Criterion::Tone].status, Status::Caution);
    assert_eq!(rec.results, b.results);
    assert_eq!(kg.len(), mapping_oracle_count(std::slice::from_ref(&b)));
}

#[test]
fn incomplete_bundle_is_rejected_without_writes() {
    let kg = KnowledgeGraph::in_memory();
    let mut b = random_bundle(&mut rng(3), 0);
    b.results.remove(&Criterion::VideoReuse);
    assert!(matches!(kg.store_bundle(&b), Err(GraphError::InvalidBundle(_))));
    assert_eq!(kg.len(), 0);
    assert!(kg.get_verification(&b.asset_id).is_none());
}

#[test]
fn graph_survives_reopen() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = rng(4);
    let bundles: Vec<_> = (0..5).map(|i| random_bundle(&mut r, i)).collect();
    {
        let kg = KnowledgeGraph::open(dir.path()).unwrap();
        for b in &bundles {
            kg.store_bundle(b).unwrap();
        }
        // Replacing one bundle must also survive the log replay.
        kg.store_bundle(&bundles[2]).unwrap();
    }
    let kg = KnowledgeGraph::open(dir.path()).unwrap();
    assert_eq!(kg.len(), mapping_oracle_count(&bundles));
    for b in &bundles {
        assert_eq!(kg.get_verification(&b.asset_id).unwrap().results, b.results);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn round_trip_is_lossless(seed in any::<u64>(), n in 1usize..6) {
        let kg = KnowledgeGraph::in_memory();
        let mut r = rng(seed);
        let bundles: Vec<_> = (0..n).map(|i| random_bundle(&mut r, i)).collect();
        for b in &bundles {
            kg.store_bundle(b).unwrap();
        }
        prop_assert_eq!(kg.len(), mapping_oracle_count(&bundles));
        for b in &bundles {
            let rec = kg.get_verification(&b.asset_id).unwrap();
            prop_assert_eq!(&rec.results, &b.results);
            prop_assert_eq!(&rec.ledger_receipt, &b.ledger_receipt);
            prop_assert_eq!(&rec.topic, &b.asset.topic);
        }
    }
}
