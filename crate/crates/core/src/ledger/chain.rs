//! Hash-chain blocks and their verification.
//!
//! ```text
//! block_hash = SHA-256("{index}\n{prev_hash}\n{asset_id}\n{content_digest}\n{timestamp}")
//! ```
//!
//! Every field enters the preimage exactly as it is persisted, so a change
//! to any stored byte either breaks parsing or changes the recomputed hash.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::digest::Digest;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerBlock {
    pub index: u64,
    pub prev_hash: Digest,
    pub asset_id: Digest,
    pub content_digest: Digest,
    /// RFC 3339 UTC timestamp, hashed verbatim.
    pub timestamp: String,
    pub block_hash: Digest,
}

impl LedgerBlock {
    pub fn new(index: u64, prev_hash: Digest, asset_id: Digest, content_digest: Digest, timestamp: String) -> Self {
        let block_hash = Digest::of(
            preimage(index, &prev_hash.to_hex(), &asset_id.to_hex(), &content_digest.to_hex(), &timestamp).as_bytes(),
        );
        LedgerBlock { index, prev_hash, asset_id, content_digest, timestamp, block_hash }
    }

    pub fn recompute_hash(&self) -> Digest {
        Digest::of(
            preimage(
                self.index,
                &self.prev_hash.to_hex(),
                &self.asset_id.to_hex(),
                &self.content_digest.to_hex(),
                &self.timestamp,
            )
            .as_bytes(),
        )
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("block serializes")
    }
}

fn preimage(index: u64, prev: &str, asset: &str, content: &str, timestamp: &str) -> String {
    format!("{index}\n{prev}\n{asset}\n{content}\n{timestamp}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationOutcome {
    pub ok: bool,
    pub first_bad_index: Option<u64>,
}

impl VerificationOutcome {
    pub const OK: VerificationOutcome = VerificationOutcome { ok: true, first_bad_index: None };

    fn bad(index: usize) -> Self {
        VerificationOutcome { ok: false, first_bad_index: Some(index as u64) }
    }
}

/// Borrowed view of a stored line. Verification works on the persisted
/// strings directly so no field is normalized before it is hashed.
struct RawBlock<'a> {
    index: u64,
    prev_hash: &'a str,
    asset_id: &'a str,
    content_digest: &'a str,
    timestamp: &'a str,
    block_hash: &'a str,
}

impl<'a> RawBlock<'a> {
    /// Parses a line in the exact layout `LedgerBlock::to_line` writes:
    /// fields in declaration order, no whitespace, no escapes. Anything else
    /// (reordered keys, padding, a non-canonical number) is rejected.
    fn parse(line: &'a [u8]) -> Option<Self> {
        let mut rest = line.strip_prefix(b"{\"index\":")?;
        let digits = rest.iter().take_while(|b| b.is_ascii_digit()).count();
        if digits == 0 || (digits > 1 && rest[0] == b'0') {
            return None;
        }
        let index = std::str::from_utf8(&rest[..digits]).ok()?.parse().ok()?;
        rest = &rest[digits..];
        let mut field = |key: &[u8]| -> Option<&'a str> {
            let after = rest.strip_prefix(b",\"")?.strip_prefix(key)?.strip_prefix(b"\":\"")?;
            let len = after.iter().position(|b| *b == b'"')?;
            let value = &after[..len];
            if value.iter().any(|b| *b == b'\\' || *b < 0x20) {
                return None;
            }
            rest = &after[len + 1..];
            std::str::from_utf8(value).ok()
        };
        let block = RawBlock {
            index,
            prev_hash: field(b"prev_hash")?,
            asset_id: field(b"asset_id")?,
            content_digest: field(b"content_digest")?,
            timestamp: field(b"timestamp")?,
            block_hash: field(b"block_hash")?,
        };
        (rest == b"}").then_some(block)
    }
}

fn canonical_hex(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

/// Verifies a serialized chain (newline-delimited JSON blocks).
///
/// A line that fails to parse, carries the wrong index, links to the wrong
/// predecessor, or whose hash does not recompute is reported as the first
/// bad index. An empty chain verifies.
pub fn verify_bytes(bytes: &[u8]) -> VerificationOutcome {
    let mut prev = Digest::ZERO.to_hex();
    let mut pre = String::with_capacity(320);
    let mut hex = [0u8; 64];
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    if body.is_empty() {
        return VerificationOutcome::OK;
    }
    for (position, line) in body.split(|b| *b == b'\n').enumerate() {
        let Some(block) = RawBlock::parse(line) else {
            return VerificationOutcome::bad(position);
        };
        let digests = [block.prev_hash, block.asset_id, block.content_digest, block.block_hash];
        if block.index != position as u64 || block.prev_hash != prev || !digests.iter().all(|d| canonical_hex(d)) {
            return VerificationOutcome::bad(position);
        }
        pre.clear();
        let _ = write!(
            pre,
            "{}\n{}\n{}\n{}\n{}",
            block.index, block.prev_hash, block.asset_id, block.content_digest, block.timestamp
        );
        let recomputed = Digest::of(pre.as_bytes());
        hex::encode_to_slice(recomputed.as_bytes(), &mut hex).expect("64 hex digits");
        if hex[..] != *block.block_hash.as_bytes() || chrono::DateTime::parse_from_rfc3339(block.timestamp).is_err() {
            return VerificationOutcome::bad(position);
        }
        prev.clear();
        prev.push_str(block.block_hash);
    }
    VerificationOutcome::OK
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: u64) -> Vec<LedgerBlock> {
        let mut blocks: Vec<LedgerBlock> = Vec::new();
        for i in 0..n {
            let prev = blocks.last().map_or(Digest::ZERO, |b| b.block_hash);
            blocks.push(LedgerBlock::new(
                i,
                prev,
                Digest::of(format!("asset{i}").as_bytes()),
                Digest::of(format!("content{i}").as_bytes()),
                "2024-01-01T00:00:00.000000Z".into(),
            ));
        }
        blocks
    }

    fn serialize(blocks: &[LedgerBlock]) -> Vec<u8> {
        blocks.iter().map(|b| b.to_line() + "\n").collect::<String>().into_bytes()
    }

    #[test]
    fn untouched_and_empty_chains_verify() {
        assert_eq!(verify_bytes(&serialize(&chain(10))), VerificationOutcome::OK);
        assert_eq!(verify_bytes(b""), VerificationOutcome::OK);
    }

    #[test]
    fn genesis_links_to_zero_hash() {
        let blocks = chain(2);
        assert_eq!(blocks[0].prev_hash.to_hex(), "0".repeat(64));
        assert_eq!(blocks[1].prev_hash, blocks[0].block_hash);
    }

    #[test]
    fn flipped_content_digest_bit_is_located() {
        let mut blocks = chain(10);
        let mut raw = *blocks[4].content_digest.as_bytes();
        raw[7] ^= 0x01;
        blocks[4].content_digest = Digest::from_bytes(raw);
        let outcome = verify_bytes(&serialize(&blocks));
        assert_eq!(outcome, VerificationOutcome { ok: false, first_bad_index: Some(4) });
    }

    #[test]
    fn dropped_block_breaks_the_link() {
        let mut blocks = chain(6);
        blocks.remove(3);
        assert_eq!(verify_bytes(&serialize(&blocks)).first_bad_index, Some(3));
    }

    #[test]
    fn reformatted_line_is_rejected() {
        let blocks = chain(1);
        let pretty = serde_json::to_string_pretty(&blocks[0]).unwrap().replace('\n', " ");
        assert_eq!(verify_bytes(pretty.as_bytes()).first_bad_index, Some(0));
    }

    #[test]
    fn only_the_written_layout_parses() {
        let line = chain(1)[0].to_line();
        assert!(RawBlock::parse(line.as_bytes()).is_some());
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        let mut reordered = serde_json::Map::new();
        for k in ["block_hash", "index", "prev_hash", "asset_id", "content_digest", "timestamp"] {
            reordered.insert(k.into(), v[k].clone());
        }
        let reordered = serde_json::to_string(&reordered).unwrap();
        for bad in
            [reordered, line.replace("\"index\":0", "\"index\":00"), line.replace("T00", "\\u0054\\u0030\\u0030")]
        {
            assert!(RawBlock::parse(bad.as_bytes()).is_none(), "{bad}");
        }
    }
}
