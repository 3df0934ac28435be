//! Puncture-site geometry: skeletonization, suitability analysis, erasure,
//! and signed-angle extraction from vein masks.

mod ellipse;
mod segments;
mod skeleton;

pub use ellipse::{
    continuous_angle, continuous_angle_deg, fit_component_angle, gamma_vertical, wrap_axis_deg,
    EllipseFit, PunctureTarget,
};
pub use segments::{
    analyze_segments, distance_transform, erase_unsuitable, SegmentAnalysis, SegmentStats,
    SuitabilityRules,
};
pub use skeleton::{skeletonize, Skeleton};

use crate::raster::{connected_components, BinaryMask, ComponentSet};

/// Result of the full target-extraction chain.
#[derive(Debug, Clone)]
pub struct TargetExtraction {
    pub targets: Vec<PunctureTarget>,
    /// Components of the erased (suitable-only) mask; target component ids
    /// index into this set.
    pub components: ComponentSet,
    /// The erased mask itself.
    pub suitable: BinaryMask,
    /// Components skipped because their fit failed (too small or isotropic).
    pub skipped: usize,
}

/// Full chain: skeletonize → analyze → erase → components → fit → angle.
///
/// Components whose fit fails are skipped and counted, not fatal.
pub fn extract_targets(mask: &BinaryMask, rules: &SuitabilityRules) -> TargetExtraction {
    let skel = skeletonize(mask);
    let analysis = analyze_segments(mask, &skel, rules.edge_margin_px);
    let suitable = erase_unsuitable(mask, &analysis, rules);
    let components = connected_components(&suitable);

    let mut targets = Vec::new();
    let mut skipped = 0usize;
    for stat in components.stats() {
        match fit_component_angle(&components, stat.id)
            .and_then(|fit| continuous_angle(&fit, &components, stat.id))
        {
            Ok(t) => targets.push(t),
            Err(e) => {
                skipped += 1;
                log::warn!("skipping component {}: {e}", stat.id);
            }
        }
    }
    TargetExtraction { targets, components, suitable, skipped }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_mask_yields_no_targets() {
        let m = BinaryMask::empty(64, 64).unwrap();
        let out = extract_targets(&m, &SuitabilityRules::default());
        assert!(out.targets.is_empty());
        assert_eq!(out.skipped, 0);
    }

    #[test]
    fn single_straight_vein_yields_one_target() {
        let mut m = BinaryMask::empty(120, 60).unwrap();
        for y in 27..33 {
            for x in 20..100 {
                m.set(x, y, true);
            }
        }
        let out = extract_targets(&m, &SuitabilityRules::default());
        assert_eq!(out.targets.len(), 1, "targets: {:?}", out.targets);
        let t = &out.targets[0];
        assert!(t.phi.abs() <= 1.0, "phi {}", t.phi);
        assert!(t.theta <= 1.0);
    }

    #[test]
    fn flip_equivariance_of_phi() {
        // Diagonal bar; horizontal flip negates phi, vertical flip negates
        // phi, 180-degree rotation preserves it.
        let (w, h) = (128, 96);
        let mut m = BinaryMask::empty(w, h).unwrap();
        let (cx, cy) = (64.0, 48.0);
        let ang = (20.0f64).to_radians();
        for y in 0..h {
            for x in 0..w {
                let dx = x as f64 - cx;
                let dy = y as f64 - cy;
                let u = dx * ang.cos() - dy * ang.sin();
                let v = dx * ang.sin() + dy * ang.cos();
                if u.abs() <= 38.0 && v.abs() <= 3.0 {
                    m.set(x, y, true);
                }
            }
        }
        let rules = SuitabilityRules::default();
        let base = extract_targets(&m, &rules);
        assert_eq!(base.targets.len(), 1);
        let phi = base.targets[0].phi;

        let mut hf = BinaryMask::empty(w, h).unwrap();
        let mut vf = BinaryMask::empty(w, h).unwrap();
        let mut rr = BinaryMask::empty(w, h).unwrap();
        for y in 0..h {
            for x in 0..w {
                if m.get(x, y) {
                    hf.set(w - 1 - x, y, true);
                    vf.set(x, h - 1 - y, true);
                    rr.set(w - 1 - x, h - 1 - y, true);
                }
            }
        }
        let phi_h = extract_targets(&hf, &rules).targets[0].phi;
        let phi_v = extract_targets(&vf, &rules).targets[0].phi;
        let phi_r = extract_targets(&rr, &rules).targets[0].phi;
        let axis_diff = |a: f64, b: f64| {
            let d = (a - b).abs() % 180.0;
            d.min(180.0 - d)
        };
        assert!(axis_diff(phi_h, -phi) <= 2.0, "hflip {phi_h} vs {}", -phi);
        assert!(axis_diff(phi_v, -phi) <= 2.0, "vflip {phi_v} vs {}", -phi);
        assert!(axis_diff(phi_r, phi) <= 2.0, "rot180 {phi_r} vs {phi}");
    }

    #[test]
    fn theta_phi_invariants_hold() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        for _ in 0..25 {
            let (w, h) = (128, 96);
            let mut m = BinaryMask::empty(w, h).unwrap();
            let ang: f64 = rng.gen_range(-89.0..=90.0);
            let (cx, cy) = (64.0, 48.0);
            let r = ang.to_radians();
            for y in 0..h {
                for x in 0..w {
                    let dx = x as f64 - cx;
                    let dy = y as f64 - cy;
                    // Screen-rise ang: direction (cos, -sin) in y-down coords.
                    let u = dx * r.cos() - dy * r.sin();
                    let v = dx * r.sin() + dy * r.cos();
                    if u.abs() <= 30.0 && v.abs() <= 3.0 {
                        m.set(x, y, true);
                    }
                }
            }
            for t in extract_targets(&m, &SuitabilityRules::default()).targets {
                assert!((0.0..=90.0).contains(&t.theta));
                assert!(t.phi > -90.0 && t.phi <= 90.0);
                assert_eq!(t.phi.abs(), t.theta);
            }
        }
    }
}
