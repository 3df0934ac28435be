//! Multiscale Hessian tubularity response for dark vessels on a bright
//! background.
//!
//! Per scale: Gaussian smoothing, scale-normalized second derivatives,
//! eigenvalue analysis, and the blobness/structureness weighting. The final
//! map is the maximum over scales rescaled into `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::GrayImage;
use crate::vision::filters::gaussian_blur;

/// Which intensity polarity counts as vessel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VesselPolarity {
    /// Vessels darker than background (projected NIR veins).
    #[default]
    Dark,
    /// Vessels brighter than background.
    Bright,
}

/// How the structureness scale `c` is chosen per scale level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum StructurenessMode {
    /// Half the maximum Hessian Frobenius norm at the scale.
    #[default]
    HalfMaxFrobenius,
    /// Fixed user-supplied value.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VesselnessParams {
    /// Gaussian scales in pixels; must be non-empty.
    pub scales: Vec<f64>,
    /// Blobness sensitivity.
    pub beta: f64,
    pub c_mode: StructurenessMode,
    pub polarity: VesselPolarity,
}

impl Default for VesselnessParams {
    fn default() -> Self {
        Self {
            scales: vec![2.0, 3.0, 4.0],
            beta: 0.5,
            c_mode: StructurenessMode::HalfMaxFrobenius,
            polarity: VesselPolarity::Dark,
        }
    }
}

struct HessianField {
    xx: Vec<f64>,
    yy: Vec<f64>,
    xy: Vec<f64>,
}

/// Scale-normalized Hessian of the sigma-smoothed image, central
/// differences with border replication, multiplied by `sigma^2`.
fn hessian_at_scale(img: &GrayImage, sigma: f64) -> Result<HessianField> {
    let smoothed = gaussian_blur(img, sigma)?;
    let (w, h) = (img.width(), img.height());
    let norm = sigma * sigma;
    let mut field = HessianField {
        xx: vec![0.0; w * h],
        yy: vec![0.0; w * h],
        xy: vec![0.0; w * h],
    };
    for y in 0..h as isize {
        for x in 0..w as isize {
            let i = y as usize * w + x as usize;
            let c = smoothed.get_replicate(x, y);
            field.xx[i] = norm
                * (smoothed.get_replicate(x + 1, y) - 2.0 * c + smoothed.get_replicate(x - 1, y));
            field.yy[i] = norm
                * (smoothed.get_replicate(x, y + 1) - 2.0 * c + smoothed.get_replicate(x, y - 1));
            field.xy[i] = norm
                * (smoothed.get_replicate(x + 1, y + 1) - smoothed.get_replicate(x + 1, y - 1)
                    - smoothed.get_replicate(x - 1, y + 1)
                    + smoothed.get_replicate(x - 1, y - 1))
                / 4.0;
        }
    }
    Ok(field)
}

/// Multiscale tubularity response rescaled into `[0, 1]`.
pub fn hessian_vesselness(img: &GrayImage, params: &VesselnessParams) -> Result<GrayImage> {
    if params.scales.is_empty() {
        return Err(Error::parameter("vesselness scale list is empty"));
    }
    if params.scales.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::parameter("vesselness scales must be > 0"));
    }
    if !(params.beta > 0.0) {
        return Err(Error::parameter("vesselness beta must be > 0"));
    }
    let (w, h) = (img.width(), img.height());
    let n = w * h;
    let mut best = vec![0.0f64; n];
    let two_beta2 = 2.0 * params.beta * params.beta;

    for &sigma in &params.scales {
        let field = hessian_at_scale(img, sigma)?;

        // Eigenvalues ordered by magnitude; structureness = Frobenius norm.
        let mut lam1 = vec![0.0f64; n];
        let mut lam2 = vec![0.0f64; n];
        let mut strct = vec![0.0f64; n];
        let mut max_s = 0.0f64;
        for i in 0..n {
            let (xx, yy, xy) = (field.xx[i], field.yy[i], field.xy[i]);
            let half_trace = 0.5 * (xx + yy);
            let disc = (0.5 * (xx - yy)).hypot(xy);
            let (a, b) = (half_trace + disc, half_trace - disc);
            let (l1, l2) = if a.abs() <= b.abs() { (a, b) } else { (b, a) };
            lam1[i] = l1;
            lam2[i] = l2;
            let s = (l1 * l1 + l2 * l2).sqrt();
            strct[i] = s;
            max_s = max_s.max(s);
        }
        if max_s == 0.0 {
            continue;
        }
        let c = match params.c_mode {
            StructurenessMode::HalfMaxFrobenius => 0.5 * max_s,
            StructurenessMode::Fixed(v) => v,
        };
        if !(c > 0.0) {
            return Err(Error::parameter("structureness scale must be > 0"));
        }
        let two_c2 = 2.0 * c * c;

        for i in 0..n {
            let l2 = match params.polarity {
                VesselPolarity::Dark => lam2[i],
                VesselPolarity::Bright => -lam2[i],
            };
            if l2 <= 0.0 {
                continue;
            }
            let rb = lam1[i] / lam2[i];
            let s = strct[i];
            let v = (-(rb * rb) / two_beta2).exp() * (1.0 - (-(s * s) / two_c2).exp());
            if v > best[i] {
                best[i] = v;
            }
        }
    }

    let max_v = best.iter().cloned().fold(0.0f64, f64::max);
    if max_v > 0.0 {
        for v in &mut best {
            *v /= max_v;
        }
    }
    GrayImage::from_vec(w, h, best)
}
