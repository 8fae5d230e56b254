use crate::error::{Error, Result};
use crate::symbolic::Word;

/// Finite set of points in the line or the plane. Line points keep a zero
/// second coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    points: Vec<[f64; 2]>,
    labels: Option<Vec<Word>>,
    resolution: Option<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, points: Vec<[f64; 2]>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::Invalid("non-finite point".into()));
        }
        let points = if dim == 1 {
            points.into_iter().map(|p| [p[0], 0.0]).collect()
        } else {
            points
        };
        Ok(PointCloud {
            dim,
            points,
            labels: None,
            resolution: None,
        })
    }

    pub fn from_line(xs: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::new(1, xs.into_iter().map(|x| [x, 0.0]).collect())
    }

    /// `n` evenly spaced points on `[lo, hi]` (per axis in the plane).
    pub fn grid(dim: usize, n: usize, lo: f64, hi: f64) -> Result<Self> {
        let n = n.max(1);
        let step = if n == 1 { 0.0 } else { (hi - lo) / (n - 1) as f64 };
        let axis: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        let pts = if dim == 1 {
            axis.iter().map(|&x| [x, 0.0]).collect()
        } else {
            let mut v = Vec::with_capacity(n * n);
            for &x in &axis {
                for &y in &axis {
                    v.push([x, y]);
                }
            }
            v
        };
        let mut c = Self::new(dim, pts)?;
        c.resolution = Some(step);
        Ok(c)
    }

    pub fn with_labels(mut self, labels: Vec<Word>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(Error::Invalid(format!(
                "{} labels for {} points",
                labels.len(),
                self.points.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_resolution(mut self, resolution: f64) -> Self {
        self.resolution = Some(resolution);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[Word]> {
        self.labels.as_deref()
    }

    /// Maximum distance from any point of the sampled set to the cloud, when known.
    pub fn resolution(&self) -> Option<f64> {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points (and labels) satisfying `keep`, resolution unchanged.
    pub fn filter(&self, mut keep: impl FnMut(&[f64; 2]) -> bool) -> PointCloud {
        let mut points = Vec::new();
        let mut labels = self.labels.as_ref().map(|_| Vec::new());
        for (i, p) in self.points.iter().enumerate() {
            if keep(p) {
                points.push(*p);
                if let (Some(out), Some(src)) = (labels.as_mut(), self.labels.as_ref()) {
                    out.push(src[i].clone());
                }
            }
        }
        PointCloud {
            dim: self.dim,
            points,
            labels,
            resolution: self.resolution,
        }
    }

    /// Applies `f` to every point, keeping labels.
    pub fn map_points(&self, f: impl Fn([f64; 2]) -> [f64; 2]) -> PointCloud {
        PointCloud {
            dim: self.dim,
            points: self
                .points
                .iter()
                .map(|&p| {
                    let q = f(p);
                    if self.dim == 1 {
                        [q[0], 0.0]
                    } else {
                        q
                    }
                })
                .collect(),
            labels: self.labels.clone(),
            resolution: self.resolution,
        }
    }
}

/// Dimension of the affine hull of `cloud`: rank of `{p - p0}` under full
/// pivoting, treating pivots at most `tol` as zero.
pub fn affine_hull_dimension(cloud: &PointCloud, tol: f64) -> Result<usize> {
    let pts = cloud.points();
    let p0 = *pts.first().ok_or(Error::EmptyCloud)?;
    let d = cloud.dim();
    let mut rows: Vec<[f64; 2]> = pts[1..]
        .iter()
        .map(|p| [p[0] - p0[0], p[1] - p0[1]])
        .collect();
    let mut cols: Vec<usize> = (0..d).collect();
    let mut rank = 0;
    while rank < d && rank < rows.len() {
        let mut best = (0.0, rank, 0);
        for (r, row) in rows.iter().enumerate().skip(rank) {
            for (ci, &c) in cols.iter().enumerate() {
                if row[c].abs() > best.0 {
                    best = (row[c].abs(), r, ci);
                }
            }
        }
        if best.0 <= tol {
            break;
        }
        rows.swap(rank, best.1);
        let pc = cols.remove(best.2);
        let pivot = rows[rank];
        for row in rows.iter_mut().skip(rank + 1) {
            let f = row[pc] / pivot[pc];
            for c in 0..d {
                row[c] -= f * pivot[c];
            }
        }
        rank += 1;
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collinear_points_have_rank_one() {
        let c = PointCloud::new(2, vec![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).unwrap();
        assert_eq!(affine_hull_dimension(&c, 1e-9).unwrap(), 1);
        let t = PointCloud::new(2, vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert_eq!(affine_hull_dimension(&t, 1e-9).unwrap(), 2);
        let p = PointCloud::new(2, vec![[0.3, 0.3]]).unwrap();
        assert_eq!(affine_hull_dimension(&p, 1e-9).unwrap(), 0);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(PointCloud::new(1, vec![[f64::NAN, 0.0]]).is_err());
    }

    #[test]
    fn grid_spacing() {
        let g = PointCloud::grid(1, 1001, 0.0, 1.0).unwrap();
        assert_eq!(g.len(), 1001);
        assert_eq!(g.points()[1000][0], 1.0);
        assert!((g.resolution().unwrap() - 1e-3).abs() < 1e-15);
    }
}
