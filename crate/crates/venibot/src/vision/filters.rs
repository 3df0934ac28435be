//! Separable Gaussian blur, disk-element morphology, linear stretch,
//! thresholding.

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, GrayImage};

/// Normalized 1-D Gaussian taps for radius `ceil(3*sigma)`.
fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    for v in &mut k {
        *v /= sum;
    }
    k
}

/// Separable Gaussian blur with border replication.
///
/// The kernel radius is `ceil(3*sigma)` and the taps are normalized, so the
/// total mass of interior-supported inputs is preserved. Output is clamped
/// into `[0, 1]`.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> Result<GrayImage> {
    if !(sigma > 0.0) {
        return Err(Error::parameter("gaussian sigma must be > 0"));
    }
    let k = gaussian_kernel(sigma);
    let radius = (k.len() / 2) as isize;
    let (w, h) = (img.width(), img.height());

    // Horizontal pass.
    let mut tmp = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, &kv) in k.iter().enumerate() {
                let sx = x as isize + i as isize - radius;
                acc += kv * img.get_replicate(sx, y as isize);
            }
            tmp[y * w + x] = acc;
        }
    }
    // Vertical pass.
    let mut out = vec![0.0f64; w * h];
    let get_tmp = |x: isize, y: isize| -> f64 {
        let xc = x.clamp(0, w as isize - 1) as usize;
        let yc = y.clamp(0, h as isize - 1) as usize;
        tmp[yc * w + xc]
    };
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, &kv) in k.iter().enumerate() {
                let sy = y as isize + i as isize - radius;
                acc += kv * get_tmp(x as isize, sy);
            }
            // Convex combination of in-range values; the clamp only sheds
            // last-ulp rounding excursions.
            out[y * w + x] = acc.clamp(0.0, 1.0);
        }
    }
    Ok(GrayImage::from_vec(w, h, out).unwrap_or_else(|_| unreachable!()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphOp {
    Erode,
    Dilate,
}

/// Disk structuring element offsets of the given radius.
fn disk_offsets(radius: usize) -> Vec<(isize, isize)> {
    let r = radius as isize;
    let r2 = (radius * radius) as isize;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r2 {
                out.push((dx, dy));
            }
        }
    }
    out
}

/// Grayscale min/max filter with a disk structuring element. Radius 0 is the
/// identity. Out-of-bounds pixels read as 0, so erosion clears a border ring.
pub fn morph_gray(img: &GrayImage, op: MorphOp, radius: usize) -> GrayImage {
    if radius == 0 {
        return img.clone();
    }
    let offsets = disk_offsets(radius);
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0.0f64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = match op {
                MorphOp::Erode => f64::INFINITY,
                MorphOp::Dilate => f64::NEG_INFINITY,
            };
            for &(dx, dy) in &offsets {
                let nx = x as isize + dx;
                let ny = y as isize + dy;
                let v = if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    0.0
                } else {
                    img.get(nx as usize, ny as usize)
                };
                acc = match op {
                    MorphOp::Erode => acc.min(v),
                    MorphOp::Dilate => acc.max(v),
                };
            }
            out[y * w + x] = acc;
        }
    }
    GrayImage::from_vec(w, h, out).unwrap_or_else(|_| unreachable!())
}

/// Morphology on masks: treated as `{0, 1}` images, out-of-bounds false.
pub fn morph_mask(mask: &BinaryMask, op: MorphOp, radius: usize) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let offsets = disk_offsets(radius);
    let (w, h) = (mask.width(), mask.height());
    let mut out = BinaryMask::empty(w, h).unwrap_or_else(|_| unreachable!());
    for y in 0..h {
        for x in 0..w {
            let mut all_true = true;
            let mut any_true = false;
            for &(dx, dy) in &offsets {
                let nx = x as isize + dx;
                let ny = y as isize + dy;
                let v = nx >= 0
                    && ny >= 0
                    && nx < w as isize
                    && ny < h as isize
                    && mask.get(nx as usize, ny as usize);
                all_true &= v;
                any_true |= v;
            }
            let v = match op {
                MorphOp::Erode => all_true,
                MorphOp::Dilate => any_true,
            };
            out.set(x, y, v);
        }
    }
    out
}

/// Linear min→0, max→1 stretch; a constant image maps to all zeros.
pub fn histogram_normalize(img: &GrayImage) -> GrayImage {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in img.data() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi - lo <= 0.0 {
        return GrayImage::filled(img.width(), img.height(), 0.0)
            .unwrap_or_else(|_| unreachable!());
    }
    let span = hi - lo;
    img.map_clamped(|v| (v - lo) / span)
}

/// `bit = intensity >= threshold`. Callers normally pass thresholds in
/// `(0, 1)`; out-of-range thresholds simply saturate to all-true/all-false.
pub fn binarize(img: &GrayImage, threshold: f64) -> BinaryMask {
    let bits = img.data().iter().map(|&v| v >= threshold).collect();
    BinaryMask::from_bits(img.width(), img.height(), bits).unwrap_or_else(|_| unreachable!())
}
