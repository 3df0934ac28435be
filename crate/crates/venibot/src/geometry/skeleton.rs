//! Iterative thinning to a 1-px-wide 8-connected skeleton.

use crate::raster::BinaryMask;

/// Skeleton pixel set with per-pixel neighbor degree (count of 8-neighbors
/// that are also skeleton pixels).
#[derive(Debug, Clone)]
pub struct Skeleton {
    width: usize,
    height: usize,
    mask: BinaryMask,
    pixels: Vec<(usize, usize)>,
    degrees: Vec<u8>,
}

impl Skeleton {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major ordered skeleton pixels.
    pub fn pixels(&self) -> &[(usize, usize)] {
        &self.pixels
    }

    /// Degrees parallel to `pixels()`.
    pub fn degrees(&self) -> &[u8] {
        &self.degrees
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.mask.get(x, y)
    }

    pub fn mask(&self) -> &BinaryMask {
        &self.mask
    }

    pub fn degree_at(&self, x: usize, y: usize) -> u8 {
        neighbor_degree(&self.mask, x, y)
    }
}

fn neighbor_degree(mask: &BinaryMask, x: usize, y: usize) -> u8 {
    let (w, h) = (mask.width() as isize, mask.height() as isize);
    let mut deg = 0;
    for dy in -1isize..=1 {
        for dx in -1isize..=1 {
            if dx == 0 && dy == 0 {
                continue;
            }
            let nx = x as isize + dx;
            let ny = y as isize + dy;
            if nx >= 0 && ny >= 0 && nx < w && ny < h && mask.get(nx as usize, ny as usize) {
                deg += 1;
            }
        }
    }
    deg
}

/// Zhang–Suen thinning. Repeatedly strips deletable boundary pixels in two
/// sub-iterations until the image is stable; connectivity of each component
/// is preserved.
pub fn skeletonize(mask: &BinaryMask) -> Skeleton {
    let (w, h) = (mask.width(), mask.height());
    let mut cur = mask.clone();
    let mut to_delete: Vec<(usize, usize)> = Vec::new();

    // Neighbors in the circular order p2..p9: N, NE, E, SE, S, SW, W, NW.
    const RING: [(isize, isize); 8] =
        [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

    let neighbor = |m: &BinaryMask, x: usize, y: usize, i: usize| -> bool {
        let (dx, dy) = RING[i];
        let nx = x as isize + dx;
        let ny = y as isize + dy;
        nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h && m.get(nx as usize, ny as usize)
    };

    loop {
        let mut changed = false;
        for pass in 0..2 {
            to_delete.clear();
            for y in 0..h {
                for x in 0..w {
                    if !cur.get(x, y) {
                        continue;
                    }
                    let p: Vec<bool> = (0..8).map(|i| neighbor(&cur, x, y, i)).collect();
                    let b: u32 = p.iter().map(|&v| v as u32).sum();
                    if !(2..=6).contains(&b) {
                        continue;
                    }
                    let a = (0..8)
                        .filter(|&i| !p[i] && p[(i + 1) % 8])
                        .count();
                    if a != 1 {
                        continue;
                    }
                    // p2=p[0], p4=p[2], p6=p[4], p8=p[6].
                    let cond = if pass == 0 {
                        (!p[0] || !p[2] || !p[4]) && (!p[2] || !p[4] || !p[6])
                    } else {
                        (!p[0] || !p[2] || !p[6]) && (!p[0] || !p[4] || !p[6])
                    };
                    if cond {
                        to_delete.push((x, y));
                    }
                }
            }
            for &(x, y) in &to_delete {
                cur.set(x, y, false);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut pixels = Vec::new();
    let mut degrees = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if cur.get(x, y) {
                pixels.push((x, y));
                degrees.push(neighbor_degree(&cur, x, y));
            }
        }
    }
    Skeleton { width: w, height: h, mask: cur, pixels, degrees }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bar(w: usize, h: usize, x0: usize, y0: usize, x1: usize, y1: usize) -> BinaryMask {
        let mut m = BinaryMask::empty(w, h).unwrap();
        for y in y0..=y1 {
            for x in x0..=x1 {
                m.set(x, y, true);
            }
        }
        m
    }

    #[test]
    fn horizontal_bar_thins_to_one_pixel_path() {
        let m = bar(26, 9, 3, 3, 22, 5);
        let sk = skeletonize(&m);
        // Every skeleton pixel must lie inside the source mask.
        assert!(sk.pixels().iter().all(|&(x, y)| m.get(x, y)));
        // 1-px wide: each column in the covered span holds at most one pixel.
        let mut per_col = std::collections::BTreeMap::new();
        for &(x, _) in sk.pixels() {
            *per_col.entry(x).or_insert(0) += 1;
        }
        assert!(per_col.values().all(|&c| c == 1), "{per_col:?}");
        // Interior pixels have degree 2 (a simple path).
        let interior: Vec<u8> = sk
            .pixels()
            .iter()
            .zip(sk.degrees())
            .filter(|((x, _), _)| *x > 5 && *x < 20)
            .map(|(_, &d)| d)
            .collect();
        assert!(!interior.is_empty());
        assert!(interior.iter().all(|&d| d == 2), "{interior:?}");
    }

    #[test]
    fn empty_mask_has_empty_skeleton() {
        let m = BinaryMask::empty(10, 10).unwrap();
        assert!(skeletonize(&m).pixels().is_empty());
    }

    #[test]
    fn plus_sign_has_a_junction_cluster() {
        let mut m = bar(21, 21, 2, 9, 18, 11);
        for y in 2..19 {
            for x in 9..12 {
                m.set(x, y, true);
            }
        }
        let sk = skeletonize(&m);
        let juncs: Vec<_> = sk
            .pixels()
            .iter()
            .zip(sk.degrees())
            .filter(|(_, &d)| d >= 3)
            .map(|(&p, _)| p)
            .collect();
        assert!(!juncs.is_empty());
        // All junction pixels sit in one 3x3 neighborhood cluster.
        let (cx, cy) = juncs[0];
        assert!(juncs.iter().all(|&(x, y)| {
            (x as isize - cx as isize).abs() <= 2 && (y as isize - cy as isize).abs() <= 2
        }));
    }

    #[test]
    fn connectivity_is_preserved() {
        use crate::raster::connected_components;
        let mut m = bar(40, 20, 2, 4, 35, 8);
        for y in 12..16 {
            for x in 5..30 {
                m.set(x, y, true);
            }
        }
        let before = connected_components(&m).len();
        let sk = skeletonize(&m);
        let after = connected_components(sk.mask()).len();
        assert_eq!(before, after);
    }
}
