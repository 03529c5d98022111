use image::{DynamicImage, ImageFormat};

use super::MediaError;

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: u32,
    pub height: u32,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Self {
        assert_eq!(pixels.len(), width as usize * height as usize, "pixel buffer size mismatch");
        GrayImage { width, height, pixels }
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        GrayImage::new(width, height, vec![value; width as usize * height as usize])
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        GrayImage { width, height, pixels }
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        self.pixels[y as usize * self.width as usize + x as usize] = v;
    }

    /// Binary PGM (P5) encoding.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Integer luma, `(299 R + 587 G + 114 B + 500) / 1000`.
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

/// Decodes plain or binary PGM/PPM (P2, P3, P5, P6) with 8-bit samples.
/// Colour images are converted to grayscale.
pub fn decode_pnm(bytes: &[u8]) -> Result<GrayImage, MediaError> {
    let magic = bytes.get(..2).unwrap_or_default();
    if !matches!(magic, b"P2" | b"P3" | b"P5" | b"P6") {
        return Err(MediaError::UnsupportedFormat("expected a P2/P3/P5/P6 PNM file".into()));
    }
    let img =
        image::load_from_memory_with_format(bytes, ImageFormat::Pnm).map_err(|e| MediaError::Decode(e.to_string()))?;
    let (width, height) = (img.width(), img.height());
    if width == 0 || height == 0 {
        return Err(MediaError::Decode("image has no pixels".into()));
    }
    let pixels = match img {
        DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        DynamicImage::ImageRgb8(buf) => buf.pixels().map(|p| luma(p[0], p[1], p[2])).collect(),
        other => {
            return Err(MediaError::UnsupportedFormat(format!("unsupported sample layout {:?}", other.color())));
        }
    };
    Ok(GrayImage::new(width, height, pixels))
}

/// Source span `[start, end)` for output cell `i` of `out` cells over `len`
/// input samples; never empty.
fn span(i: u32, out: u32, len: u32) -> (u32, u32) {
    let start = (i as u64 * len as u64 / out as u64) as u32;
    let end = ((i as u64 + 1) * len as u64 / out as u64) as u32;
    (start.min(len - 1), end.max(start + 1).min(len))
}

/// Per-cell pixel sums and counts of a box-filter resample.
pub fn box_sums(img: &GrayImage, out_w: u32, out_h: u32) -> Vec<(u64, u64)> {
    let mut cells = Vec::with_capacity(out_w as usize * out_h as usize);
    for oy in 0..out_h {
        let (y0, y1) = span(oy, out_h, img.height);
        for ox in 0..out_w {
            let (x0, x1) = span(ox, out_w, img.width);
            let mut sum = 0u64;
            for y in y0..y1 {
                let row = y as usize * img.width as usize;
                sum += img.pixels[row + x0 as usize..row + x1 as usize].iter().map(|&p| p as u64).sum::<u64>();
            }
            cells.push((sum, ((x1 - x0) * (y1 - y0)) as u64));
        }
    }
    cells
}

/// Box-filter resample with rounded cell means.
pub fn resample(img: &GrayImage, out_w: u32, out_h: u32) -> GrayImage {
    let pixels =
        box_sums(img, out_w, out_h).into_iter().map(|(sum, count)| ((sum + count / 2) / count) as u8).collect();
    GrayImage::new(out_w, out_h, pixels)
}
