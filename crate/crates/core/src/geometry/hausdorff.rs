use std::collections::HashMap;

use super::PointCloud;
use crate::error::{Error, Result};

/// Below this many distance evaluations the brute-force scan is used.
const GRID_THRESHOLD: usize = 1 << 16;

#[inline]
fn dist_sq(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}

fn check(a: &PointCloud, b: &PointCloud) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud);
    }
    Ok(())
}

/// `sup_{x∈A} inf_{y∈B} |x - y|` by direct scan.
pub fn one_sided_hausdorff_brute(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    check(a, b)?;
    let mut worst: f64 = 0.0;
    for p in a.points() {
        let best = b
            .points()
            .iter()
            .map(|q| dist_sq(p, q))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    Ok(worst.sqrt())
}

struct Buckets {
    origin: [f64; 2],
    cell: f64,
    extent: [i64; 2],
    cells: HashMap<[i64; 2], Vec<usize>>,
}

impl Buckets {
    fn new(cloud: &PointCloud) -> Self {
        let pts = cloud.points();
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in pts {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let per_axis = (pts.len() as f64).powf(1.0 / cloud.dim() as f64).ceil().max(1.0);
        let cell = if span > 0.0 { span / per_axis } else { 1.0 };
        let mut b = Buckets {
            origin: lo,
            cell,
            extent: [0, 0],
            cells: HashMap::new(),
        };
        for (i, p) in pts.iter().enumerate() {
            let c = b.index(p);
            b.extent[0] = b.extent[0].max(c[0]);
            b.extent[1] = b.extent[1].max(c[1]);
            b.cells.entry(c).or_default().push(i);
        }
        b
    }

    fn index(&self, p: &[f64; 2]) -> [i64; 2] {
        [
            ((p[0] - self.origin[0]) / self.cell).floor() as i64,
            ((p[1] - self.origin[1]) / self.cell).floor() as i64,
        ]
    }

    /// Minimal squared distance from `p` to the bucketed cloud.
    fn nearest_sq(&self, p: &[f64; 2], pts: &[[f64; 2]]) -> f64 {
        let c = self.index(p);
        let max_ring = (c[0].abs())
            .max((c[0] - self.extent[0]).abs())
            .max(c[1].abs())
            .max((c[1] - self.extent[1]).abs());
        let mut best = f64::INFINITY;
        for ring in 0..=max_ring {
            for (i, j) in ring_cells(ring) {
                if let Some(ix) = self.cells.get(&[c[0] + i, c[1] + j]) {
                    for &k in ix {
                        best = best.min(dist_sq(p, &pts[k]));
                    }
                }
            }
            // cells at Chebyshev ring > `ring` are at least `ring` cells away
            let bound = ring as f64 * self.cell;
            if best <= bound * bound {
                break;
            }
        }
        best
    }
}

fn ring_cells(r: i64) -> Vec<(i64, i64)> {
    if r == 0 {
        return vec![(0, 0)];
    }
    let mut v = Vec::with_capacity(8 * r as usize);
    for i in -r..=r {
        v.push((i, -r));
        v.push((i, r));
    }
    for j in -r + 1..r {
        v.push((-r, j));
        v.push((r, j));
    }
    v
}

/// Same value as [`one_sided_hausdorff_brute`], using grid buckets over `B`.
/// The candidate distances are the same floating-point numbers, so the
/// minimum and maximum agree exactly.
pub fn one_sided_hausdorff_grid(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    check(a, b)?;
    let buckets = Buckets::new(b);
    let mut worst: f64 = 0.0;
    for p in a.points() {
        worst = worst.max(buckets.nearest_sq(p, b.points()));
    }
    Ok(worst.sqrt())
}

/// `ρ_H(A, B)`; picks the bucketed scan for large inputs.
pub fn one_sided_hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.len().saturating_mul(b.len()) > GRID_THRESHOLD {
        one_sided_hausdorff_grid(a, b)
    } else {
        one_sided_hausdorff_brute(a, b)
    }
}

pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    Ok(one_sided_hausdorff(a, b)?.max(one_sided_hausdorff(b, a)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_points() {
        let a = PointCloud::from_line([0.0]).unwrap();
        let b = PointCloud::from_line([1.0]).unwrap();
        assert_eq!(one_sided_hausdorff(&a, &b).unwrap(), 1.0);
        assert_eq!(one_sided_hausdorff(&b, &a).unwrap(), 1.0);
        assert_eq!(hausdorff_distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn asymmetry() {
        let grid = PointCloud::grid(1, 1001, 0.0, 1.0).unwrap();
        let origin = PointCloud::from_line([0.0]).unwrap();
        assert_eq!(one_sided_hausdorff(&origin, &grid).unwrap(), 0.0);
        assert_eq!(one_sided_hausdorff(&grid, &origin).unwrap(), 1.0);
        assert_eq!(one_sided_hausdorff_grid(&grid, &origin).unwrap(), 1.0);
    }

    #[test]
    fn empty_is_error() {
        let e = PointCloud::new(1, vec![]).unwrap();
        let a = PointCloud::from_line([0.0]).unwrap();
        assert_eq!(one_sided_hausdorff(&e, &a), Err(Error::EmptyCloud));
    }

    #[test]
    fn query_far_outside_grid() {
        let b = PointCloud::grid(2, 20, 0.0, 1.0).unwrap();
        let a = PointCloud::new(2, vec![[5.0, -3.0], [0.5, 0.5]]).unwrap();
        assert_eq!(
            one_sided_hausdorff_grid(&a, &b).unwrap(),
            one_sided_hausdorff_brute(&a, &b).unwrap()
        );
    }
}
