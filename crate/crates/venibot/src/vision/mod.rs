//! Classical vein labeling: filtering primitives plus the fixed pipeline
//! that turns a raw NIR image into a vein segmentation mask.

mod filters;
mod vesselness;

pub use filters::{binarize, gaussian_blur, histogram_normalize, morph_gray, morph_mask, MorphOp};
pub use vesselness::{hessian_vesselness, StructurenessMode, VesselPolarity, VesselnessParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{connected_components, BinaryMask, GrayImage};

/// Frozen parameter set for the labeling pipeline.
///
/// One default set, calibrated once on the synthetic corpus and kept under
/// version control; there is no per-image tuning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabelPipelineParams {
    pub gaussian_sigma: f64,
    pub erode_radius: usize,
    pub dilate_radius: usize,
    pub brightness_gain: f64,
    pub vesselness: VesselnessParams,
    /// Threshold on the rescaled vesselness map, in (0, 1).
    pub binarize_threshold: f64,
    /// Components below this pixel count are dropped as salt noise.
    pub min_component_area: usize,
}

impl Default for LabelPipelineParams {
    fn default() -> Self {
        Self {
            gaussian_sigma: 1.2,
            erode_radius: 1,
            dilate_radius: 1,
            brightness_gain: 1.0,
            vesselness: VesselnessParams::default(),
            binarize_threshold: 0.12,
            min_component_area: 30,
        }
    }
}

impl LabelPipelineParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gaussian_sigma > 0.0) {
            return Err(Error::parameter("gaussian_sigma must be > 0"));
        }
        if !(self.binarize_threshold > 0.0 && self.binarize_threshold < 1.0) {
            return Err(Error::parameter("binarize_threshold must be in (0,1)"));
        }
        if self.vesselness.scales.is_empty() || self.vesselness.scales.iter().any(|&s| !(s > 0.0))
        {
            return Err(Error::parameter("vesselness scales must be positive and non-empty"));
        }
        if !(self.brightness_gain > 0.0) {
            return Err(Error::parameter("brightness_gain must be > 0"));
        }
        Ok(())
    }
}

/// Full classical labeling chain:
/// blur → open (erode+dilate) → brightness gain → histogram normalize →
/// vesselness → binarize → drop small components.
pub fn label_vein(img: &GrayImage, params: &LabelPipelineParams) -> Result<BinaryMask> {
    params.validate()?;
    let mut work = gaussian_blur(img, params.gaussian_sigma)?;
    if params.erode_radius > 0 {
        work = morph_gray(&work, MorphOp::Erode, params.erode_radius);
    }
    if params.dilate_radius > 0 {
        work = morph_gray(&work, MorphOp::Dilate, params.dilate_radius);
    }
    if params.brightness_gain != 1.0 {
        let g = params.brightness_gain;
        work = work.map_clamped(|v| v * g);
    }
    let work = histogram_normalize(&work);
    let response = hessian_vesselness(&work, &params.vesselness)?;
    let raw = binarize(&response, params.binarize_threshold);
    Ok(drop_small_components(&raw, params.min_component_area))
}

/// Removes connected components below `min_area` pixels.
pub fn drop_small_components(mask: &BinaryMask, min_area: usize) -> BinaryMask {
    if min_area <= 1 {
        return mask.clone();
    }
    let comps = connected_components(mask);
    let keep: Vec<bool> = comps.stats().iter().map(|s| s.area >= min_area).collect();
    let bits = comps
        .labels()
        .iter()
        .map(|&l| l != 0 && keep[l as usize - 1])
        .collect();
    BinaryMask::from_bits(mask.width(), mask.height(), bits).unwrap_or_else(|_| unreachable!())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_black_image_labels_empty() {
        let img = GrayImage::filled(64, 48, 0.0).unwrap();
        let mask = label_vein(&img, &LabelPipelineParams::default()).unwrap();
        assert!(mask.is_empty());
    }

    #[test]
    fn labeling_is_deterministic() {
        // A fixed dark stripe; two runs must agree bit for bit.
        let mut img = GrayImage::filled(64, 48, 0.75).unwrap();
        for y in 20..26 {
            for x in 4..60 {
                img.set(x, y, 0.3);
            }
        }
        let p = LabelPipelineParams::default();
        let a = label_vein(&img, &p).unwrap();
        let b = label_vein(&img, &p).unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty());
    }

    #[test]
    fn invalid_params_are_rejected() {
        let img = GrayImage::filled(8, 8, 0.5).unwrap();
        let mut p = LabelPipelineParams::default();
        p.binarize_threshold = 1.0;
        assert!(label_vein(&img, &p).is_err());
        let mut p = LabelPipelineParams::default();
        p.gaussian_sigma = 0.0;
        assert!(label_vein(&img, &p).is_err());
    }

    #[test]
    fn small_components_are_dropped() {
        let mut m = BinaryMask::empty(20, 20).unwrap();
        // 4-pixel speck and a 7x7 block.
        m.set(1, 1, true);
        m.set(2, 1, true);
        m.set(1, 2, true);
        m.set(2, 2, true);
        for y in 10..17 {
            for x in 10..17 {
                m.set(x, y, true);
            }
        }
        let out = drop_small_components(&m, 30);
        assert_eq!(out.count(), 49);
    }
}
