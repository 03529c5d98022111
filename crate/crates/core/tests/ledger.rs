mod common;

use std::fs;

use common::ts;
use provenance_core::ledger::{Ledger, LedgerError};
use provenance_core::{Asset, Digest, EngagementScore, Fragment, FragmentKind, Payload, Source};

fn asset(i: u32, text: &str) -> Asset {
    let url = format!("https://ledger.example/{i}");
    Asset {
        asset_id: Digest::of(url.as_bytes()),
        url,
        source: Source::Monitor,
        publisher: "Ledger Test".into(),
        published_at: ts(1_750_000_000),
        fragments: vec![Fragment {
            fragment_id: "body".into(),
            kind: FragmentKind::Body,
            payload: Payload::Text { text: text.into() },
        }],
        engagement: EngagementScore::new(1, 2, 3),
        ingested_at: ts(1_750_000_100),
        topic: None,
    }
}

fn ledger_with(n: u32) -> (tempfile::TempDir, Ledger) {
    let dir = tempfile::tempdir().unwrap();
    let ledger = Ledger::open(dir.path()).unwrap();
    for i in 0..n {
        ledger.fingerprint(&asset(i, &format!("body {i}"))).unwrap();
    }
    (dir, ledger)
}

#[test]
fn chain_links_and_reopens() {
    let (dir, ledger) = ledger_with(6);
    let blocks = ledger.blocks();
    assert_eq!(blocks[0].prev_hash, Digest::ZERO);
    assert!(blocks.windows(2).all(|w| w[1].prev_hash == w[0].block_hash));
    drop(ledger);
    let reopened = Ledger::open(dir.path()).unwrap();
    assert_eq!(reopened.blocks(), blocks);
    assert!(reopened.verify_chain().unwrap().ok);
}

#[test]
fn identical_content_is_registered_once() {
    let (_dir, ledger) = ledger_with(0);
    let a = ledger.fingerprint(&asset(1, "same")).unwrap();
    let b = ledger.fingerprint(&asset(1, "same")).unwrap();
    assert_eq!(a, b);
    assert_eq!(ledger.len(), 1);
    assert_eq!(ledger.lookup(&a.content_digest), Some(a));
    let c = ledger.fingerprint(&asset(1, "changed")).unwrap();
    assert_eq!(c.block_index, 1);
}

#[test]
fn bit_flip_in_content_digest_is_located() {
    let (dir, ledger) = ledger_with(8);
    let path = ledger.chain_path().to_path_buf();
    let mut bytes = fs::read(&path).unwrap();
    let line_start = bytes.split(|b| *b == b'\n').take(4).map(|l| l.len() + 1).sum::<usize>();
    let line = std::str::from_utf8(&bytes[line_start..]).unwrap();
    let at = line_start + line.find("\"content_digest\":\"").unwrap() + 20;
    bytes[at] ^= 0x01;
    fs::write(&path, &bytes).unwrap();

    let outcome = ledger.verify_chain().unwrap();
    assert!(!outcome.ok);
    assert_eq!(outcome.first_bad_index, Some(4));
    drop(ledger);
    assert!(matches!(Ledger::open(dir.path()), Err(LedgerError::Corrupt { first_bad_index: 4 })));
}

#[test]
fn truncated_and_reordered_chains_fail() {
    let (_dir, ledger) = ledger_with(5);
    let bytes = fs::read(ledger.chain_path()).unwrap();
    let mut lines: Vec<&[u8]> = bytes.split(|b| *b == b'\n').filter(|l| !l.is_empty()).collect();

    let partial = &bytes[..bytes.len() - 10];
    assert_eq!(provenance_core::ledger::verify_bytes(partial).first_bad_index, Some(4));

    lines.swap(1, 2);
    let swapped = [lines.join(&b'\n'), vec![b'\n']].concat();
    assert_eq!(provenance_core::ledger::verify_bytes(&swapped).first_bad_index, Some(1));

    lines.remove(0);
    let headless = [lines.join(&b'\n'), vec![b'\n']].concat();
    assert_eq!(provenance_core::ledger::verify_bytes(&headless).first_bad_index, Some(0));
}
