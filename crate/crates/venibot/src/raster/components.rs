//! 8-connected component labeling with per-component statistics.

use super::BinaryMask;

/// Per-component area, bounding box and centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentStats {
    /// Component id, 1-based; 0 is background.
    pub id: u32,
    /// Pixel count.
    pub area: usize,
    /// Inclusive bounding box (x0, y0, x1, y1).
    pub bbox: (usize, usize, usize, usize),
    /// Mean pixel position (x, y).
    pub centroid: (f64, f64),
}

/// Label map plus per-id stats. Ids are contiguous `1..=K`.
#[derive(Debug, Clone)]
pub struct ComponentSet {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    stats: Vec<ComponentStats>,
}

impl ComponentSet {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Number of components K.
    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    /// Per-pixel component id, 0 for background.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn stats(&self) -> &[ComponentStats] {
        &self.stats
    }

    pub fn stats_of(&self, id: u32) -> Option<&ComponentStats> {
        if id == 0 {
            return None;
        }
        self.stats.get(id as usize - 1)
    }

    /// Extracts one component as a standalone mask.
    pub fn component_mask(&self, id: u32) -> BinaryMask {
        let bits = self.labels.iter().map(|&l| l == id).collect();
        BinaryMask::from_bits(self.width, self.height, bits).expect("label map is well-formed")
    }
}

/// Labels 8-connected foreground regions. Scan order is row-major, so
/// labeling is deterministic: components are numbered by first-encountered
/// pixel.
pub fn connected_components(mask: &BinaryMask) -> ComponentSet {
    let (w, h) = (mask.width(), mask.height());
    let mut labels = vec![0u32; w * h];
    let mut stats: Vec<ComponentStats> = Vec::new();
    let mut stack: Vec<(usize, usize)> = Vec::new();

    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) || labels[y * w + x] != 0 {
                continue;
            }
            let id = stats.len() as u32 + 1;
            let mut area = 0usize;
            let mut bbox = (x, y, x, y);
            let mut sum = (0.0f64, 0.0f64);
            stack.push((x, y));
            labels[y * w + x] = id;
            while let Some((cx, cy)) = stack.pop() {
                area += 1;
                bbox.0 = bbox.0.min(cx);
                bbox.1 = bbox.1.min(cy);
                bbox.2 = bbox.2.max(cx);
                bbox.3 = bbox.3.max(cy);
                sum.0 += cx as f64;
                sum.1 += cy as f64;
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let nx = cx as i64 + dx;
                        let ny = cy as i64 + dy;
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if mask.get(nx, ny) && labels[ny * w + nx] == 0 {
                            labels[ny * w + nx] = id;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            stats.push(ComponentStats {
                id,
                area,
                bbox,
                centroid: (sum.0 / area as f64, sum.1 / area as f64),
            });
        }
    }

    ComponentSet { width: w, height: h, labels, stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::BinaryMask;

    fn mask_from_str(rows: &[&str]) -> BinaryMask {
        let h = rows.len();
        let w = rows[0].len();
        let bits = rows
            .iter()
            .flat_map(|r| r.chars().map(|c| c == '#'))
            .collect();
        BinaryMask::from_bits(w, h, bits).unwrap()
    }

    #[test]
    fn two_disjoint_squares() {
        let m = mask_from_str(&[
            "###....###",
            "###....###",
            "###....###",
        ]);
        let cs = connected_components(&m);
        assert_eq!(cs.len(), 2);
        assert_eq!(cs.stats()[0].area, 9);
        assert_eq!(cs.stats()[1].area, 9);
    }

    #[test]
    fn empty_mask_has_no_components() {
        let m = BinaryMask::empty(5, 5).unwrap();
        assert_eq!(connected_components(&m).len(), 0);
    }

    #[test]
    fn l_shape_is_one_component() {
        // Flood-fill oracle: everything reachable through 8-neighbors is one
        // region, including the diagonal elbow.
        let m = mask_from_str(&[
            "#....",
            "#....",
            "#....",
            ".####",
        ]);
        let cs = connected_components(&m);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs.stats()[0].area, 7);
        let s = &cs.stats()[0];
        assert!(s.centroid.0 >= s.bbox.0 as f64 && s.centroid.0 <= s.bbox.2 as f64);
        assert!(s.centroid.1 >= s.bbox.1 as f64 && s.centroid.1 <= s.bbox.3 as f64);
    }

    #[test]
    fn centroid_inside_bbox_and_area_matches() {
        let m = mask_from_str(&["##", ".#"]);
        let cs = connected_components(&m);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs.stats()[0].area, 3);
        assert_eq!(cs.stats()[0].bbox, (0, 0, 1, 1));
    }
}
