use crate::text::raw_tokens;

/// Sentence embedding backend. Implementations return unit vectors.
pub trait Embedder: Send + Sync {
    fn dim(&self) -> usize;
    fn embed(&self, text: &str) -> Vec<f64>;
}

/// Hashed character-trigram embedding.
///
/// Text is lowercased, reduced to its word tokens joined by single spaces
/// and padded with one space on each side; every character trigram is
/// hashed (FNV-1a) into one of `dim` buckets, and the count vector is
/// L2-normalized.
#[derive(Debug, Clone, Copy)]
pub struct TrigramEmbedder {
    dim: usize,
}

impl TrigramEmbedder {
    pub const DEFAULT_DIM: usize = 256;

    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        TrigramEmbedder { dim }
    }
}

impl Default for TrigramEmbedder {
    fn default() -> Self {
        TrigramEmbedder::new(Self::DEFAULT_DIM)
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

impl Embedder for TrigramEmbedder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Vec<f64> {
        let normalized: Vec<char> =
            format!(" {} ", raw_tokens(text).map(str::to_lowercase).collect::<Vec<_>>().join(" ")).chars().collect();
        let mut v = vec![0.0; self.dim];
        let mut buf = [0u8; 12];
        for w in normalized.windows(3) {
            let mut len = 0;
            for c in w {
                len += c.encode_utf8(&mut buf[len..]).len();
            }
            v[(fnv1a(&buf[..len]) % self.dim as u64) as usize] += 1.0;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            v[0] = 1.0;
        } else {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }
}

/// Cosine similarity, clamped to `[-1, 1]`; zero vectors give 0.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_norm_and_determinism() {
        let e = TrigramEmbedder::default();
        for text in ["The council approved the budget.", "x", "", "!!!"] {
            let v = e.embed(text);
            assert_eq!(v.len(), 256);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-9, "{text}: {norm}");
            assert_eq!(v, e.embed(text));
        }
    }

    #[test]
    fn punctuation_and_case_do_not_matter() {
        let e = TrigramEmbedder::default();
        let a = e.embed("Rates rose 5%.");
        let b = e.embed("rates ROSE 5");
        assert!((cosine(&a, &b) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unrelated_sentences_score_low() {
        let e = TrigramEmbedder::default();
        let a = e.embed("The central bank raised interest rates by a quarter point on Tuesday.");
        let b = e.embed("Volunteers planted four thousand oak saplings along the river bank.");
        assert!(cosine(&a, &b) < 0.75);
    }

    proptest! {
        #[test]
        fn cosine_bounds_and_symmetry(a in "[a-z ]{1,40}", b in "[a-z ]{1,40}") {
            let e = TrigramEmbedder::default();
            let (u, v) = (e.embed(&a), e.embed(&b));
            let c = cosine(&u, &v);
            prop_assert!((-1.0..=1.0).contains(&c));
            prop_assert_eq!(c, cosine(&v, &u));
            prop_assert!((cosine(&u, &u) - 1.0).abs() < 1e-12);
        }
    }
}
