//! Skeleton branch decomposition, per-branch statistics, and erasure of
//! unsuitable vein sections.

use serde::{Deserialize, Serialize};

use crate::geometry::skeleton::Skeleton;
use crate::raster::BinaryMask;

/// Thresholds deciding which vein sections are suitable for puncture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuitabilityRules {
    /// Minimum branch arc length after junction trimming, px.
    pub min_length_px: f64,
    /// Maximum mean absolute tangent change, degrees per px.
    pub max_mean_turning_deg_per_px: f64,
    /// Minimum clearance between the vein boundary and the image border, px.
    pub edge_margin_px: f64,
    /// Minimum mean vein diameter along the branch, px.
    pub min_diameter_px: f64,
}

impl Default for SuitabilityRules {
    fn default() -> Self {
        Self {
            min_length_px: 40.0,
            max_mean_turning_deg_per_px: 1.5,
            edge_margin_px: 8.0,
            min_diameter_px: 4.0,
        }
    }
}

/// Per-branch statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentStats {
    pub id: u32,
    /// Chain-code arc length, px.
    pub arc_length_px: f64,
    /// Twice the mean distance-transform radius along the branch, px.
    pub mean_diameter_px: f64,
    /// Mean |Δ tangent angle| per px over a 7-px smoothing window.
    pub mean_turning_deg_per_px: f64,
    /// Branch meets a junction (degree >= 3) node at either end.
    pub has_bifurcation: bool,
    /// Vein boundary comes within the edge margin of the image border.
    pub touches_edge: bool,
}

/// Branch decomposition of a skeleton, with everything `erase_unsuitable`
/// needs: ordered chains, junction pixels, and the mask distance transform.
#[derive(Debug, Clone)]
pub struct SegmentAnalysis {
    stats: Vec<SegmentStats>,
    chains: Vec<Vec<(usize, usize)>>,
    junctions: Vec<(usize, usize)>,
    /// Euclidean distance to the nearest background (or out-of-image) pixel.
    radius: Vec<f64>,
    width: usize,
    height: usize,
}

impl SegmentAnalysis {
    pub fn stats(&self) -> &[SegmentStats] {
        &self.stats
    }

    pub fn chains(&self) -> &[Vec<(usize, usize)>] {
        &self.chains
    }

    pub fn junctions(&self) -> &[(usize, usize)] {
        &self.junctions
    }

    pub fn radius_at(&self, x: usize, y: usize) -> f64 {
        self.radius[y * self.width + x]
    }
}

/// Exact Euclidean distance transform (Felzenszwalb–Huttenlocher), distance
/// to the nearest false pixel; out-of-image counts as false.
pub fn distance_transform(mask: &BinaryMask) -> Vec<f64> {
    let (w, h) = (mask.width(), mask.height());
    const INF: f64 = 1e18;

    fn dt_1d(f: &[f64], out: &mut Vec<f64>) {
        let n = f.len();
        out.clear();
        out.resize(n, 0.0);
        let mut v = vec![0usize; n];
        let mut z = vec![0.0f64; n + 1];
        let mut k = 0usize;
        z[0] = -INF;
        z[1] = INF;
        for q in 1..n {
            loop {
                let s = ((f[q] + (q * q) as f64) - (f[v[k]] + (v[k] * v[k]) as f64))
                    / (2.0 * q as f64 - 2.0 * v[k] as f64);
                if s <= z[k] {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                } else {
                    k += 1;
                    v[k] = q;
                    z[k] = s;
                    z[k + 1] = INF;
                    break;
                }
            }
        }
        k = 0;
        for q in 0..n {
            while z[k + 1] < q as f64 {
                k += 1;
            }
            let d = q as f64 - v[k] as f64;
            out[q] = d * d + f[v[k]];
        }
    }

    let mut grid = vec![0.0f64; w * h];
    for i in 0..w * h {
        grid[i] = if mask.bits()[i] { INF } else { 0.0 };
    }
    // Columns.
    let mut col = vec![0.0f64; h];
    let mut buf = Vec::with_capacity(h.max(w));
    for x in 0..w {
        for y in 0..h {
            col[y] = grid[y * w + x];
        }
        dt_1d(&col, &mut buf);
        for y in 0..h {
            grid[y * w + x] = buf[y];
        }
    }
    // Rows.
    let mut row = vec![0.0f64; w];
    for y in 0..h {
        row.copy_from_slice(&grid[y * w..(y + 1) * w]);
        dt_1d(&row, &mut buf);
        for x in 0..w {
            grid[y * w + x] = buf[x];
        }
    }
    // Cap by the in-image distance to the border (virtual background ring).
    let mut out = grid;
    for y in 0..h {
        for x in 0..w {
            let border = (x + 1).min(y + 1).min(w - x).min(h - y) as f64;
            let d = out[y * w + x].sqrt().min(border);
            out[y * w + x] = d;
        }
    }
    out
}

fn wrap_angle_180(a: f64) -> f64 {
    let mut v = a % 360.0;
    if v > 180.0 {
        v -= 360.0;
    }
    if v < -180.0 {
        v += 360.0;
    }
    v
}

/// Splits the skeleton at junction (degree >= 3) pixels into branches and
/// computes per-branch statistics against the source mask.
pub fn analyze_segments(mask: &BinaryMask, skel: &Skeleton, edge_margin: f64) -> SegmentAnalysis {
    let (w, h) = (mask.width(), mask.height());
    let radius = distance_transform(mask);

    let mut junctions = Vec::new();
    let mut is_junction = vec![false; w * h];
    for (&(x, y), &d) in skel.pixels().iter().zip(skel.degrees()) {
        if d >= 3 {
            junctions.push((x, y));
            is_junction[y * w + x] = true;
        }
    }

    // Branch pixels = skeleton minus junctions; branches are the connected
    // chains among them.
    let mut visited = vec![false; w * h];
    let mut chains: Vec<Vec<(usize, usize)>> = Vec::new();

    let neighbors = |x: usize, y: usize| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for dy in -1isize..=1 {
            for dx in -1isize..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let nx = x as isize + dx;
                let ny = y as isize + dy;
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                if skel.contains(nx, ny) && !is_junction[ny * w + nx] {
                    out.push((nx, ny));
                }
            }
        }
        out
    };

    for &(sx, sy) in skel.pixels() {
        if is_junction[sy * w + sx] || visited[sy * w + sx] {
            continue;
        }
        // Collect this chain component.
        let mut comp = Vec::new();
        let mut stack = vec![(sx, sy)];
        visited[sy * w + sx] = true;
        while let Some((x, y)) = stack.pop() {
            comp.push((x, y));
            for (nx, ny) in neighbors(x, y) {
                if !visited[ny * w + nx] {
                    visited[ny * w + nx] = true;
                    stack.push((nx, ny));
                }
            }
        }
        // Order it: walk from an endpoint (a pixel with <= 1 in-chain
        // neighbor); a cycle has none, so start anywhere.
        let start = comp
            .iter()
            .find(|&&(x, y)| neighbors(x, y).len() <= 1)
            .copied()
            .unwrap_or(comp[0]);
        let mut in_chain = vec![false; w * h];
        for &(x, y) in &comp {
            in_chain[y * w + x] = true;
        }
        let mut ordered = vec![start];
        in_chain[start.1 * w + start.0] = false;
        loop {
            let (x, y) = *ordered.last().unwrap();
            let next = neighbors(x, y).into_iter().find(|&(nx, ny)| in_chain[ny * w + nx]);
            match next {
                Some(p) => {
                    in_chain[p.1 * w + p.0] = false;
                    ordered.push(p);
                }
                None => break,
            }
        }
        chains.push(ordered);
    }

    // Deterministic branch order: by first pixel row-major.
    chains.sort_by_key(|c| (c[0].1, c[0].0));

    let mut stats = Vec::new();
    for (bi, chain) in chains.iter().enumerate() {
        let mut arc = 0.0;
        for win in chain.windows(2) {
            let dx = win[1].0 as f64 - win[0].0 as f64;
            let dy = win[1].1 as f64 - win[0].1 as f64;
            arc += dx.hypot(dy);
        }
        let mean_diameter = if chain.is_empty() {
            0.0
        } else {
            2.0 * chain.iter().map(|&(x, y)| radius[y * w + x]).sum::<f64>() / chain.len() as f64
        };

        // Tangents over a 7-px window, then mean |Δ angle| per px of arc.
        let mut turning_sum = 0.0;
        if chain.len() >= 3 && arc > 0.0 {
            let tangent = |i: usize| -> f64 {
                let a = chain[i.saturating_sub(3)];
                let b = chain[(i + 3).min(chain.len() - 1)];
                (b.1 as f64 - a.1 as f64).atan2(b.0 as f64 - a.0 as f64).to_degrees()
            };
            for i in 0..chain.len() - 1 {
                turning_sum += wrap_angle_180(tangent(i + 1) - tangent(i)).abs();
            }
        }
        let mean_turning = if arc > 0.0 { turning_sum / arc } else { 0.0 };

        // Junction adjacency at either chain end.
        let end_adjacent_to_junction = |&(x, y): &(usize, usize)| -> bool {
            junctions.iter().any(|&(jx, jy)| {
                (jx as isize - x as isize).abs() <= 1 && (jy as isize - y as isize).abs() <= 1
            })
        };
        let has_bifurcation = !chain.is_empty()
            && (end_adjacent_to_junction(chain.first().unwrap())
                || end_adjacent_to_junction(chain.last().unwrap()));

        let touches_edge = chain.iter().any(|&(x, y)| {
            let border = x.min(y).min(w - 1 - x).min(h - 1 - y) as f64;
            border - radius[y * w + x] < edge_margin
        });

        stats.push(SegmentStats {
            id: bi as u32 + 1,
            arc_length_px: arc,
            mean_diameter_px: mean_diameter,
            mean_turning_deg_per_px: mean_turning,
            has_bifurcation,
            touches_edge,
        });
    }

    SegmentAnalysis { stats, chains, junctions, radius, width: w, height: h }
}

/// Keeps only mask pixels that belong to suitable branches.
///
/// Pixels within one local diameter of a junction node are always erased;
/// a branch qualifies when its remaining (junction-trimmed) span is long,
/// straight and wide enough and stays clear of the image border.
pub fn erase_unsuitable(
    mask: &BinaryMask,
    analysis: &SegmentAnalysis,
    rules: &SuitabilityRules,
) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let mut out = BinaryMask::empty(w, h).unwrap_or_else(|_| unreachable!());
    if analysis.chains.is_empty() {
        return out;
    }

    // Euclidean exclusion balls around junction pixels, radius = local
    // diameter (2 * distance-transform radius), at least 2 px.
    let junction_zone: Vec<((usize, usize), f64)> = analysis
        .junctions
        .iter()
        .map(|&(x, y)| ((x, y), (2.0 * analysis.radius[y * analysis.width + x]).max(2.0)))
        .collect();
    let near_junction = |x: usize, y: usize| -> bool {
        junction_zone.iter().any(|&((jx, jy), r)| {
            let dx = x as f64 - jx as f64;
            let dy = y as f64 - jy as f64;
            dx * dx + dy * dy <= r * r
        })
    };

    // Decide branch suitability on junction-trimmed chains.
    let mut kept_chain_pixels: Vec<(usize, usize)> = Vec::new();
    let mut kept = vec![false; analysis.chains.len()];
    for (bi, chain) in analysis.chains.iter().enumerate() {
        let stat = &analysis.stats[bi];
        let trimmed: Vec<(usize, usize)> =
            chain.iter().copied().filter(|&(x, y)| !near_junction(x, y)).collect();
        let mut trimmed_arc = 0.0;
        for win in trimmed.windows(2) {
            let dx = win[1].0 as f64 - win[0].0 as f64;
            let dy = win[1].1 as f64 - win[0].1 as f64;
            // Gaps introduced by trimming do not contribute length.
            let step = dx.hypot(dy);
            if step < 2.0 {
                trimmed_arc += step;
            }
        }
        let ok = trimmed_arc >= rules.min_length_px
            && stat.mean_turning_deg_per_px <= rules.max_mean_turning_deg_per_px
            && stat.mean_diameter_px >= rules.min_diameter_px
            && !stat.touches_edge;
        kept[bi] = ok;
        if ok {
            kept_chain_pixels.extend(trimmed.iter().copied());
        }
    }

    if kept_chain_pixels.is_empty() {
        return out;
    }

    // Assign every mask pixel to the nearest kept/unkept skeleton pixel by
    // multi-source BFS; a pixel survives when its nearest skeleton source is
    // a kept, junction-trimmed chain pixel.
    let mut source: Vec<i8> = vec![-1; w * h]; // -1 unseen, 1 kept, 0 erased
    let mut queue = std::collections::VecDeque::new();
    for (bi, chain) in analysis.chains.iter().enumerate() {
        for &(x, y) in chain {
            let keep_px = kept[bi] && !near_junction(x, y);
            let i = y * w + x;
            if source[i] == -1 {
                source[i] = keep_px as i8;
                queue.push_back((x, y));
            }
        }
    }
    for &(x, y) in &analysis.junctions {
        let i = y * w + x;
        if source[i] == -1 {
            source[i] = 0;
            queue.push_back((x, y));
        }
    }
    while let Some((x, y)) = queue.pop_front() {
        let v = source[y * w + x];
        for dy in -1isize..=1 {
            for dx in -1isize..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let nx = x as isize + dx;
                let ny = y as isize + dy;
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let (nx, ny) = (nx as usize, ny as usize);
                if mask.get(nx, ny) && source[ny * w + nx] == -1 {
                    source[ny * w + nx] = v;
                    queue.push_back((nx, ny));
                }
            }
        }
    }

    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) && source[y * w + x] == 1 && !near_junction(x, y) {
                out.set(x, y, true);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::skeleton::skeletonize;

    fn straight_bar(w: usize, h: usize, y0: usize, width: usize, x0: usize, x1: usize) -> BinaryMask {
        let mut m = BinaryMask::empty(w, h).unwrap();
        for y in y0..y0 + width {
            for x in x0..=x1 {
                m.set(x, y, true);
            }
        }
        m
    }

    #[test]
    fn straight_branch_statistics() {
        // 60 px long, 6 px wide horizontal bar, well inside the canvas.
        let m = straight_bar(100, 40, 17, 6, 20, 79);
        let sk = skeletonize(&m);
        let analysis = analyze_segments(&m, &sk, 8.0);
        assert_eq!(analysis.stats().len(), 1);
        let s = &analysis.stats()[0];
        assert!((s.arc_length_px - 60.0).abs() <= 4.0, "len {}", s.arc_length_px);
        assert!((s.mean_diameter_px - 6.0).abs() <= 1.0, "diam {}", s.mean_diameter_px);
        assert!(s.mean_turning_deg_per_px < 0.3, "turn {}", s.mean_turning_deg_per_px);
        assert!(!s.has_bifurcation);
        assert!(!s.touches_edge);
    }

    #[test]
    fn y_shape_flags_all_branches() {
        let mut m = BinaryMask::empty(81, 81).unwrap();
        let mut stamp_line = |x0: f64, y0: f64, x1: f64, y1: f64| {
            let n = 200;
            for i in 0..=n {
                let t = i as f64 / n as f64;
                let cx = x0 + (x1 - x0) * t;
                let cy = y0 + (y1 - y0) * t;
                for dy in -2i64..=2 {
                    for dx in -2i64..=2 {
                        if dx * dx + dy * dy <= 4 {
                            let px = cx.round() as i64 + dx;
                            let py = cy.round() as i64 + dy;
                            if px >= 0 && py >= 0 && px < 81 && py < 81 {
                                m.set(px as usize, py as usize, true);
                            }
                        }
                    }
                }
            }
        };
        stamp_line(40.0, 70.0, 40.0, 40.0);
        stamp_line(40.0, 40.0, 20.0, 12.0);
        stamp_line(40.0, 40.0, 60.0, 12.0);
        let sk = skeletonize(&m);
        let analysis = analyze_segments(&m, &sk, 4.0);
        let big: Vec<_> =
            analysis.stats().iter().filter(|s| s.arc_length_px > 10.0).collect();
        assert!(big.len() >= 3, "branches: {:?}", analysis.stats());
        assert!(big.iter().all(|s| s.has_bifurcation));
    }

    #[test]
    fn bar_near_border_touches_edge() {
        let m = straight_bar(100, 30, 2, 5, 10, 90);
        let sk = skeletonize(&m);
        let analysis = analyze_segments(&m, &sk, 8.0);
        assert!(analysis.stats().iter().any(|s| s.touches_edge));
    }

    #[test]
    fn erase_keeps_clean_straight_vein() {
        let m = straight_bar(120, 40, 17, 6, 15, 104);
        let sk = skeletonize(&m);
        let analysis = analyze_segments(&m, &sk, 8.0);
        let out = erase_unsuitable(&m, &analysis, &SuitabilityRules::default());
        assert!(out.is_subset_of(&m));
        // Most of the bar survives.
        assert!(out.count() as f64 >= 0.8 * m.count() as f64,
            "kept {} of {}", out.count(), m.count());
    }

    #[test]
    fn erase_drops_short_branches() {
        let m = straight_bar(60, 40, 17, 6, 20, 39); // 20 px long < 40 min
        let sk = skeletonize(&m);
        let analysis = analyze_segments(&m, &sk, 8.0);
        let out = erase_unsuitable(&m, &analysis, &SuitabilityRules::default());
        assert!(out.is_empty());
    }

    #[test]
    fn erase_output_is_subset_of_input() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..10 {
            let mut m = BinaryMask::empty(60, 60).unwrap();
            for _ in 0..rng.gen_range(1..5) {
                let x0 = rng.gen_range(0..50);
                let y0 = rng.gen_range(0..50);
                for dy in 0..rng.gen_range(2..10) {
                    for dx in 0..rng.gen_range(5..10) {
                        if x0 + dx < 60 && y0 + dy < 60 {
                            m.set(x0 + dx, y0 + dy, true);
                        }
                    }
                }
            }
            let sk = skeletonize(&m);
            let analysis = analyze_segments(&m, &sk, 8.0);
            let out = erase_unsuitable(&m, &analysis, &SuitabilityRules::default());
            assert!(out.is_subset_of(&m));
        }
    }

    #[test]
    fn distance_transform_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let (w, h) = (17, 13);
        let bits: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(0.6)).collect();
        let m = BinaryMask::from_bits(w, h, bits).unwrap();
        let dt = distance_transform(&m);
        for y in 0..h {
            for x in 0..w {
                let mut best = (x + 1).min(y + 1).min(w - x).min(h - y) as f64;
                for yy in 0..h {
                    for xx in 0..w {
                        if !m.get(xx, yy) {
                            let d = ((x as f64 - xx as f64).powi(2)
                                + (y as f64 - yy as f64).powi(2))
                            .sqrt();
                            best = best.min(d);
                        }
                    }
                }
                if !m.get(x, y) {
                    best = 0.0;
                }
                assert!((dt[y * w + x] - best).abs() < 1e-9, "({x},{y})");
            }
        }
    }
}
