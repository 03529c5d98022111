//! Asset fingerprinter and registry.
//!
//! Payloads live in a content-addressed [`BlobStore`]; the append-only
//! chain file holds only digests. Appends are serialized behind one write
//! lock, lookups and verification read committed state.

mod blob;
mod chain;

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use chrono::{SecondsFormat, Utc};

pub use blob::BlobStore;
pub use chain::{verify_bytes, LedgerBlock, VerificationOutcome};

use crate::digest::Digest;
use crate::model::{Asset, LedgerReceipt, Payload};

#[derive(Debug, thiserror::Error)]
pub enum LedgerError {
    #[error("ledger i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("ledger chain is corrupt at block {first_bad_index}")]
    Corrupt { first_bad_index: u64 },
    #[error("blob {0} referenced by the asset is missing from the blob store")]
    MissingBlob(Digest),
}

struct ChainState {
    blocks: Vec<LedgerBlock>,
    by_digest: HashMap<Digest, LedgerReceipt>,
}

pub struct Ledger {
    chain_path: PathBuf,
    blobs: BlobStore,
    state: RwLock<ChainState>,
}

impl Ledger {
    /// Opens (or creates) a ledger rooted at `dir`. The existing chain must
    /// verify; a corrupt chain refuses to open.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, LedgerError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let chain_path = dir.join("chain.jsonl");
        let blobs = BlobStore::open(dir.join("blobs"))?;
        let bytes = match fs::read(&chain_path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        let outcome = verify_bytes(&bytes);
        if let Some(first_bad_index) = outcome.first_bad_index {
            return Err(LedgerError::Corrupt { first_bad_index });
        }
        let mut state = ChainState { blocks: Vec::new(), by_digest: HashMap::new() };
        for line in bytes.split(|b| *b == b'\n').filter(|l| !l.is_empty()) {
            let block: LedgerBlock = serde_json::from_slice(line).map_err(io::Error::other)?;
            state.by_digest.entry(block.content_digest).or_insert_with(|| receipt_for(&block));
            state.blocks.push(block);
        }
        Ok(Ledger { chain_path, blobs, state: RwLock::new(state) })
    }

    pub fn blobs(&self) -> &BlobStore {
        &self.blobs
    }

    pub fn chain_path(&self) -> &Path {
        &self.chain_path
    }

    /// Canonical serialization of an asset: its id, then fragments sorted by
    /// kind and fragment id, each as `kind 0x1f id 0x1f len(u64 BE) payload`.
    /// Media payloads contribute their raw blob bytes.
    pub fn canonical_bytes(&self, asset: &Asset) -> Result<Vec<u8>, LedgerError> {
        let mut fragments: Vec<_> = asset.fragments.iter().collect();
        fragments.sort_by(|a, b| (a.kind, &a.fragment_id).cmp(&(b.kind, &b.fragment_id)));
        let mut out = Vec::new();
        out.extend_from_slice(b"asset\x1f");
        out.extend_from_slice(asset.asset_id.to_hex().as_bytes());
        out.push(0x1e);
        for fragment in fragments {
            let payload = match &fragment.payload {
                Payload::Text { text } => text.as_bytes().to_vec(),
                Payload::Blob { digest, .. } => match self.blobs.get(digest) {
                    Ok(bytes) => bytes,
                    Err(e) if e.kind() == io::ErrorKind::NotFound => {
                        return Err(LedgerError::MissingBlob(*digest));
                    }
                    Err(e) => return Err(e.into()),
                },
            };
            out.extend_from_slice(fragment.kind.as_str().as_bytes());
            out.push(0x1f);
            out.extend_from_slice(fragment.fragment_id.as_bytes());
            out.push(0x1f);
            out.extend_from_slice(&(payload.len() as u64).to_be_bytes());
            out.extend_from_slice(&payload);
        }
        Ok(out)
    }

    pub fn content_digest(&self, asset: &Asset) -> Result<Digest, LedgerError> {
        Ok(Digest::of(&self.canonical_bytes(asset)?))
    }

    /// Registers an asset's digest on the chain. Identical content returns
    /// the original receipt without appending.
    pub fn fingerprint(&self, asset: &Asset) -> Result<LedgerReceipt, LedgerError> {
        let content_digest = self.content_digest(asset)?;
        let mut state = self.state.write().expect("ledger lock poisoned");
        if let Some(existing) = state.by_digest.get(&content_digest) {
            return Ok(existing.clone());
        }
        let index = state.blocks.len() as u64;
        let prev = state.blocks.last().map_or(Digest::ZERO, |b| b.block_hash);
        let timestamp = Utc::now().to_rfc3339_opts(SecondsFormat::Micros, true);
        let block = LedgerBlock::new(index, prev, asset.asset_id, content_digest, timestamp);

        let mut file = OpenOptions::new().create(true).append(true).open(&self.chain_path)?;
        file.write_all((block.to_line() + "\n").as_bytes())?;
        file.sync_data()?;

        let receipt = receipt_for(&block);
        state.by_digest.insert(content_digest, receipt.clone());
        state.blocks.push(block);
        Ok(receipt)
    }

    /// Re-reads the chain file from disk and verifies every block and link.
    pub fn verify_chain(&self) -> Result<VerificationOutcome, LedgerError> {
        verify_chain_file(&self.chain_path)
    }

    pub fn lookup(&self, content_digest: &Digest) -> Option<LedgerReceipt> {
        self.state.read().expect("ledger lock poisoned").by_digest.get(content_digest).cloned()
    }

    pub fn len(&self) -> usize {
        self.state.read().expect("ledger lock poisoned").blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn blocks(&self) -> Vec<LedgerBlock> {
        self.state.read().expect("ledger lock poisoned").blocks.clone()
    }
}

/// Verifies a chain file; a missing file is an empty chain.
pub fn verify_chain_file(path: &Path) -> Result<VerificationOutcome, LedgerError> {
    match fs::read(path) {
        Ok(bytes) => Ok(verify_bytes(&bytes)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(VerificationOutcome::OK),
        Err(e) => Err(e.into()),
    }
}

fn receipt_for(block: &LedgerBlock) -> LedgerReceipt {
    LedgerReceipt {
        asset_id: block.asset_id,
        block_index: block.index,
        block_hash: block.block_hash,
        content_digest: block.content_digest,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EngagementScore, Fragment, FragmentKind, Source};

    fn asset(url: &str, body: &str) -> Asset {
        Asset {
            asset_id: Digest::of(url.as_bytes()),
            url: url.into(),
            source: Source::Monitor,
            publisher: "Example News".into(),
            published_at: Utc::now(),
            fragments: vec![Fragment {
                fragment_id: "body".into(),
                kind: FragmentKind::Body,
                payload: Payload::Text { text: body.into() },
            }],
            engagement: EngagementScore::new(0, 0, 0),
            ingested_at: Utc::now(),
            topic: None,
        }
    }

    #[test]
    fn genesis_then_idempotent_fingerprint() {
        let dir = tempfile::tempdir().unwrap();
        let ledger = Ledger::open(dir.path()).unwrap();
        let a = asset("https://example.com/a", "Body text.");
        let r1 = ledger.fingerprint(&a).unwrap();
        assert_eq!(r1.block_index, 0);
        assert_eq!(ledger.blocks()[0].prev_hash.to_hex(), "0".repeat(64));
        let r2 = ledger.fingerprint(&a).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(ledger.len(), 1);
        assert_eq!(ledger.lookup(&r1.content_digest), Some(r1.clone()));
        assert_eq!(ledger.lookup(&Digest::of(b"random")), None);
    }

    #[test]
    fn one_character_changes_digest() {
        let dir = tempfile::tempdir().unwrap();
        let ledger = Ledger::open(dir.path()).unwrap();
        let a = ledger.content_digest(&asset("https://example.com/a", "Body text.")).unwrap();
        let b = ledger.content_digest(&asset("https://example.com/a", "Body text!")).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn fragment_order_does_not_change_digest() {
        let dir = tempfile::tempdir().unwrap();
        let ledger = Ledger::open(dir.path()).unwrap();
        let mut a = asset("https://example.com/a", "Body.");
        a.fragments.push(Fragment {
            fragment_id: "title".into(),
            kind: FragmentKind::Title,
            payload: Payload::Text { text: "Title".into() },
        });
        let d1 = ledger.content_digest(&a).unwrap();
        a.fragments.reverse();
        assert_eq!(ledger.content_digest(&a).unwrap(), d1);
    }

    #[test]
    fn reopen_preserves_chain_and_rejects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        {
            let ledger = Ledger::open(dir.path()).unwrap();
            for i in 0..10 {
                ledger.fingerprint(&asset(&format!("https://example.com/{i}"), "x")).unwrap();
            }
            assert!(ledger.verify_chain().unwrap().ok);
        }
        let ledger = Ledger::open(dir.path()).unwrap();
        assert_eq!(ledger.len(), 10);
        let path = ledger.chain_path().to_path_buf();
        drop(ledger);

        let text = fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        let mut block: LedgerBlock = serde_json::from_str(&lines[4]).unwrap();
        let mut raw = *block.content_digest.as_bytes();
        raw[0] ^= 0x80;
        block.content_digest = Digest::from_bytes(raw);
        lines[4] = block.to_line();
        fs::write(&path, lines.join("\n") + "\n").unwrap();

        let outcome = verify_chain_file(&path).unwrap();
        assert_eq!(outcome.first_bad_index, Some(4));
        assert!(matches!(Ledger::open(dir.path()), Err(LedgerError::Corrupt { first_bad_index: 4 })));
    }

    #[test]
    fn missing_blob_is_a_ledger_error() {
        let dir = tempfile::tempdir().unwrap();
        let ledger = Ledger::open(dir.path()).unwrap();
        let mut a = asset("https://example.com/m", "x");
        a.fragments.push(Fragment {
            fragment_id: "image-0".into(),
            kind: FragmentKind::Image,
            payload: Payload::Blob { digest: Digest::of(b"nope"), media_type: "image/x-portable-anymap".into() },
        });
        assert!(matches!(ledger.fingerprint(&a), Err(LedgerError::MissingBlob(_))));
        assert!(ledger.is_empty());
    }
}
