//! Principal-axis fitting of mask components and the continuous signed
//! puncture angle.
//!
//! Angle conventions, fixed once for the whole crate:
//!
//! * `gamma` (stored on [`EllipseFit`]): orientation of the major axis from
//!   second central moments, degrees in `[0, 180)`, measured from the +x
//!   axis toward +y in image coordinates (y grows down). A horizontal bar
//!   has `gamma = 0`, a vertical bar `gamma = 90`.
//! * The continuous-angle mapping `theta = |gamma_v - 90|` operates on the
//!   vertical-referenced orientation `gamma_v = (gamma + 90) mod 180` used
//!   by the ellipse-fit routine it mirrors; the composition makes `theta`
//!   the acute angle between the axis and the horizontal, in `[0, 90]`.
//! * `phi` is `theta` signed by the endpoint rule: positive when the axis
//!   rises left to right on screen (the endpoint with larger x has smaller
//!   y), negative when it falls, `+theta` on ties. Range `(-90, +90]`.
//!
//! Downstream consumers (labels, training targets, the gantry planner) use
//! only `phi`, which is convention-independent.

use crate::error::{Error, Result};
use crate::raster::ComponentSet;

/// Principal-axis fit of a component.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipseFit {
    /// Intensity centroid (x, y), px.
    pub center: (f64, f64),
    /// Major half-axis, px.
    pub a: f64,
    /// Minor half-axis, px.
    pub b: f64,
    /// Major-axis orientation, degrees in [0, 180), from +x toward +y.
    pub gamma: f64,
}

/// A suitable puncture site: component centroid plus signed angle.
#[derive(Debug, Clone, PartialEq)]
pub struct PunctureTarget {
    /// Component id in the originating `ComponentSet`.
    pub component: u32,
    /// Component centroid (x, y), px.
    pub centroid: (f64, f64),
    /// Continuous angle, degrees in [0, 90].
    pub theta: f64,
    /// Signed angle, degrees in (-90, +90].
    pub phi: f64,
    pub fit: EllipseFit,
}

/// Vertical-referenced orientation: the convention of the mirrored
/// ellipse-fit routine, where 0 means a vertical major axis.
pub fn gamma_vertical(gamma: f64) -> f64 {
    (gamma + 90.0).rem_euclid(180.0)
}

/// The continuous-angle mapping: folds a vertical-referenced orientation in
/// `[0, 180)` onto `[0, 90]`, removing the 0/180 seam.
pub fn continuous_angle_deg(gamma_v: f64) -> f64 {
    (gamma_v - 90.0).abs()
}

/// Wraps an undirected-axis angle into `(-90, +90]`.
pub fn wrap_axis_deg(phi: f64) -> f64 {
    let mut v = phi.rem_euclid(180.0);
    if v > 90.0 {
        v -= 180.0;
    }
    if v == -90.0 {
        v = 90.0;
    }
    v
}

/// Fits the principal axis of one component from second central moments.
///
/// Fails on components below 5 px and on near-isotropic components
/// (`a ≈ b` within 1%), whose orientation is undefined.
pub fn fit_component_angle(components: &ComponentSet, id: u32) -> Result<EllipseFit> {
    let stats = components
        .stats_of(id)
        .ok_or_else(|| Error::Fit(format!("no component with id {id}")))?;
    if stats.area < 5 {
        return Err(Error::Fit(format!(
            "component {id} has {} px; need at least 5",
            stats.area
        )));
    }
    let (cx, cy) = stats.centroid;
    let (mut mu20, mut mu02, mut mu11) = (0.0f64, 0.0f64, 0.0f64);
    let w = components.width();
    for (i, &l) in components.labels().iter().enumerate() {
        if l != id {
            continue;
        }
        let x = (i % w) as f64 - cx;
        let y = (i / w) as f64 - cy;
        mu20 += x * x;
        mu02 += y * y;
        mu11 += x * y;
    }
    let n = stats.area as f64;
    mu20 /= n;
    mu02 /= n;
    mu11 /= n;

    let half_trace = 0.5 * (mu20 + mu02);
    let disc = (0.5 * (mu20 - mu02)).hypot(mu11);
    let lam_max = half_trace + disc;
    let lam_min = (half_trace - disc).max(0.0);
    let a = 2.0 * lam_max.sqrt();
    let b = 2.0 * lam_min.sqrt();
    if a <= 0.0 || (a - b) / a < 0.01 {
        return Err(Error::DegenerateOrientation(format!(
            "component {id}: a = {a:.3}, b = {b:.3}"
        )));
    }
    let mut gamma = 0.5 * (2.0 * mu11).atan2(mu20 - mu02).to_degrees();
    if gamma < 0.0 {
        gamma += 180.0;
    }
    if gamma >= 180.0 {
        gamma -= 180.0;
    }
    Ok(EllipseFit { center: (cx, cy), a, b, gamma })
}

/// Applies the continuous-angle mapping and the endpoint sign rule to a
/// fitted component.
pub fn continuous_angle(
    fit: &EllipseFit,
    components: &ComponentSet,
    id: u32,
) -> Result<PunctureTarget> {
    let stats = components
        .stats_of(id)
        .ok_or_else(|| Error::Fit(format!("no component with id {id}")))?;
    let theta = continuous_angle_deg(gamma_vertical(fit.gamma));

    // Major-axis extreme points of the component: min/max projection onto
    // the axis direction. Row-major scan with strict updates keeps ties
    // deterministic.
    let dir = (fit.gamma.to_radians().cos(), fit.gamma.to_radians().sin());
    let w = components.width();
    let mut lo: Option<(f64, usize, usize)> = None;
    let mut hi: Option<(f64, usize, usize)> = None;
    for (i, &l) in components.labels().iter().enumerate() {
        if l != id {
            continue;
        }
        let (x, y) = (i % w, i / w);
        let proj = x as f64 * dir.0 + y as f64 * dir.1;
        if lo.map_or(true, |(p, _, _)| proj < p) {
            lo = Some((proj, x, y));
        }
        if hi.map_or(true, |(p, _, _)| proj > p) {
            hi = Some((proj, x, y));
        }
    }
    let (_, ax, ay) = hi.ok_or_else(|| Error::Fit("empty component".into()))?;
    let (_, bx, by) = lo.ok_or_else(|| Error::Fit("empty component".into()))?;

    // Endpoint with the larger x decides the sign; x-ties mean a vertical
    // axis, which maps to +theta (= +90).
    let (px, py, qy) = if ax > bx {
        (ax, ay, by)
    } else if bx > ax {
        (bx, by, ay)
    } else {
        (ax, ay, ay)
    };
    let _ = px;
    let phi = if py < qy {
        theta
    } else if py > qy {
        -theta
    } else {
        theta
    };
    // -0 never escapes: theta = 0 gives phi = +0.
    let phi = if phi == 0.0 { 0.0 } else { phi };

    Ok(PunctureTarget {
        component: id,
        centroid: stats.centroid,
        theta,
        phi,
        fit: fit.clone(),
    })
}
