use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::raster::{box_sums, GrayImage};

/// 64-bit difference hash over a 9×8 box-filtered grayscale image.
///
/// Bit `8·row + col` (most significant first) is set when cell `col` is
/// brighter than cell `col + 1`. Cell means are compared exactly through
/// cross-multiplied integer sums, so a uniform brightness offset never
/// changes the hash.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PerceptualHash(pub u64);

impl PerceptualHash {
    pub fn of(img: &GrayImage) -> Self {
        let cells = box_sums(img, 9, 8);
        let mut bits = 0u64;
        for row in 0..8 {
            for col in 0..8 {
                let (sl, cl) = cells[row * 9 + col];
                let (sr, cr) = cells[row * 9 + col + 1];
                bits <<= 1;
                if sl * cr > sr * cl {
                    bits |= 1;
                }
            }
        }
        PerceptualHash(bits)
    }

    pub fn distance(self, other: PerceptualHash) -> u32 {
        (self.0 ^ other.0).count_ones()
    }
}

impl fmt::Debug for PerceptualHash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PerceptualHash({:016x})", self.0)
    }
}

impl Serialize for PerceptualHash {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{:016x}", self.0))
    }
}

impl<'de> Deserialize<'de> for PerceptualHash {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        u64::from_str_radix(&s, 16).map(PerceptualHash).map_err(serde::de::Error::custom)
    }
}

/// Normalized cross-correlation of two equally sized rasters. Two flat
/// images correlate fully when their levels agree within one unit.
pub fn ncc(a: &[u8], b: &[u8]) -> f64 {
    assert_eq!(a.len(), b.len(), "ncc needs equally sized inputs");
    let n = a.len() as f64;
    let ma = a.iter().map(|&v| v as f64).sum::<f64>() / n;
    let mb = b.iter().map(|&v| v as f64).sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x as f64 - ma, y as f64 - mb);
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    match (va == 0.0, vb == 0.0) {
        (true, true) => {
            if (ma - mb).abs() <= 1.0 {
                1.0
            } else {
                0.0
            }
        }
        (true, false) | (false, true) => 0.0,
        _ => (cov / (va.sqrt() * vb.sqrt())).clamp(-1.0, 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_image_hashes_to_zero() {
        assert_eq!(PerceptualHash::of(&GrayImage::filled(100, 100, 128)).0, 0);
    }

    #[test]
    fn brightness_offset_is_invisible() {
        let img = GrayImage::from_fn(120, 90, |x, y| ((x * 7 + y * 3) % 200) as u8);
        let brighter = GrayImage::from_fn(120, 90, |x, y| img.get(x, y) + 10);
        assert_eq!(PerceptualHash::of(&img), PerceptualHash::of(&brighter));
        assert_ne!(PerceptualHash::of(&img).0, 0);
    }

    #[test]
    fn horizontal_ramp_sets_expected_bits() {
        let falling = GrayImage::from_fn(90, 80, |x, _| 250 - (x as u8 * 2));
        assert_eq!(PerceptualHash::of(&falling).0, u64::MAX);
        let rising = GrayImage::from_fn(90, 80, |x, _| x as u8 * 2);
        assert_eq!(PerceptualHash::of(&rising).0, 0);
    }

    #[test]
    fn ncc_cases() {
        let a: Vec<u8> = (0..64).collect();
        assert!((ncc(&a, &a) - 1.0).abs() < 1e-12);
        let inv: Vec<u8> = a.iter().map(|v| 63 - v).collect();
        assert!((ncc(&a, &inv) + 1.0).abs() < 1e-12);
        assert_eq!(ncc(&[5; 8], &[5; 8]), 1.0);
        assert_eq!(ncc(&[5; 8], &a[..8]), 0.0);
    }

    proptest! {
        #[test]
        fn hamming_is_a_metric(a: u64, b: u64, c: u64) {
            let (a, b, c) = (PerceptualHash(a), PerceptualHash(b), PerceptualHash(c));
            prop_assert_eq!(a.distance(a), 0);
            prop_assert_eq!(a.distance(b), b.distance(a));
            prop_assert!(a.distance(c) <= a.distance(b) + b.distance(c));
            prop_assert!(a.distance(b) <= 64);
        }
    }
}
