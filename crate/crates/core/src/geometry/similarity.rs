use std::fmt;

use super::orthogonal::Orthogonal;
use crate::error::{Error, Result};
use crate::scalar::{Backend, KeyAtom, Scalar};

/// `S(x) = c·O·x + b` on the line or in the plane.
#[derive(Clone, Debug)]
pub struct Similarity {
    ratio: Scalar,
    orthogonal: Orthogonal,
    translation: Vec<Scalar>,
}

/// Canonical identity of a similarity, used for deduplication.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MapKey {
    ratio: KeyAtom,
    reflect: bool,
    degrees: KeyAtom,
    translation: Vec<KeyAtom>,
}

/// Plain double-precision copy of a similarity for bulk point evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineF64 {
    pub dim: usize,
    pub m: [[f64; 2]; 2],
    pub b: [f64; 2],
}

impl AffineF64 {
    #[inline]
    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        if self.dim == 1 {
            [self.m[0][0] * x[0] + self.b[0], 0.0]
        } else {
            [
                self.m[0][0] * x[0] + self.m[0][1] * x[1] + self.b[0],
                self.m[1][0] * x[0] + self.m[1][1] * x[1] + self.b[1],
            ]
        }
    }
}

impl Similarity {
    pub fn new(ratio: Scalar, orthogonal: Orthogonal, translation: Vec<Scalar>) -> Result<Self> {
        let dim = orthogonal.dim();
        if dim != 1 && dim != 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if translation.len() != dim {
            return Err(Error::DimensionMismatch(dim, translation.len()));
        }
        if !orthogonal.has_matrix() {
            return Err(Error::InexactTrig(orthogonal.degrees().to_string()));
        }
        let b = ratio.backend();
        for v in std::iter::once(orthogonal.degrees()).chain(translation.iter()) {
            if v.backend() != b {
                return Err(Error::BackendMismatch(b, v.backend()));
            }
        }
        if !ratio.is_positive() {
            return Err(Error::OutOfRange {
                name: "ratio",
                value: ratio.to_string(),
                range: "(0, inf)",
            });
        }
        Ok(Similarity {
            ratio,
            orthogonal,
            translation,
        })
    }

    /// `x ↦ c·(±x) + t`.
    pub fn line(ratio: Scalar, reflect: bool, t: Scalar) -> Result<Self> {
        let b = ratio.backend();
        Self::new(ratio, Orthogonal::line(reflect, b), vec![t])
    }

    /// `x ↦ c·R(degrees)·F^reflect·x + t`.
    pub fn plane(ratio: Scalar, degrees: Scalar, reflect: bool, t: [Scalar; 2]) -> Result<Self> {
        let [t0, t1] = t;
        Self::new(ratio, Orthogonal::plane(degrees, reflect)?, vec![t0, t1])
    }

    pub fn identity(dim: usize, b: Backend) -> Self {
        Similarity {
            ratio: Scalar::one(b),
            orthogonal: Orthogonal::identity(dim, b),
            translation: vec![Scalar::zero(b); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.orthogonal.dim()
    }

    pub fn backend(&self) -> Backend {
        self.ratio.backend()
    }

    pub fn ratio(&self) -> &Scalar {
        &self.ratio
    }

    pub fn orthogonal(&self) -> &Orthogonal {
        &self.orthogonal
    }

    pub fn translation(&self) -> &[Scalar] {
        &self.translation
    }

    pub fn apply(&self, x: &[Scalar]) -> Vec<Scalar> {
        self.orthogonal
            .apply(x)
            .into_iter()
            .zip(&self.translation)
            .map(|(v, t)| &self.ratio * &v + t)
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Similarity) -> Result<Similarity> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        if self.backend() != other.backend() {
            return Err(Error::BackendMismatch(self.backend(), other.backend()));
        }
        let ratio = &self.ratio * &other.ratio;
        let orthogonal = self.orthogonal.compose(&other.orthogonal)?;
        let translation = self.apply(&other.translation);
        Ok(Similarity {
            ratio,
            orthogonal,
            translation,
        })
    }

    pub fn inverse(&self) -> Similarity {
        let ratio = self.ratio.recip().expect("positive ratio");
        let orthogonal = self.orthogonal.inverse();
        let translation = orthogonal
            .apply(&self.translation)
            .into_iter()
            .map(|v| -(&ratio * &v))
            .collect();
        Similarity {
            ratio,
            orthogonal,
            translation,
        }
    }

    /// The unique `p` with `S(p) = p`, i.e. `(I - cO)⁻¹ b`.
    pub fn fixed_point(&self) -> Result<Vec<Scalar>> {
        let b = self.backend();
        let one = Scalar::one(b);
        if self.ratio >= one {
            return Err(Error::NonContracting(self.ratio.to_string()));
        }
        let m = self.orthogonal.matrix()?;
        let t = &self.translation;
        if self.dim() == 1 {
            let a = &one - &(&self.ratio * &m[0][0]);
            return Ok(vec![t[0].checked_div(&a)?]);
        }
        let a00 = &one - &(&self.ratio * &m[0][0]);
        let a01 = -(&self.ratio * &m[0][1]);
        let a10 = -(&self.ratio * &m[1][0]);
        let a11 = &one - &(&self.ratio * &m[1][1]);
        let det = &a00 * &a11 - &a01 * &a10;
        let x = (&a11 * &t[0] - &a01 * &t[1]).checked_div(&det)?;
        let y = (&a00 * &t[1] - &a10 * &t[0]).checked_div(&det)?;
        Ok(vec![x, y])
    }

    fn corners(&self) -> Vec<Vec<Scalar>> {
        let b = self.backend();
        let (z, o) = (Scalar::zero(b), Scalar::one(b));
        if self.dim() == 1 {
            vec![vec![z], vec![o]]
        } else {
            vec![
                vec![z.clone(), z.clone()],
                vec![o.clone(), z.clone()],
                vec![z, o.clone()],
                vec![o.clone(), o],
            ]
        }
    }

    /// `sup ‖S(x) - x‖²` over `[0,1]^d`, attained at a corner.
    pub fn identity_distance_sq(&self) -> Scalar {
        let mut best = Scalar::zero(self.backend());
        for x in self.corners() {
            let sx = self.apply(&x);
            let mut acc = Scalar::zero(self.backend());
            for (a, b) in sx.iter().zip(&x) {
                let d = a - b;
                acc = &acc + &(&d * &d);
            }
            if acc > best {
                best = acc;
            }
        }
        best
    }

    /// `sup ‖S(x) - x‖` over `[0,1]^d`. Exact in 1D on the exact backend; in
    /// the plane the exact backend may need a rational square-root
    /// approximation.
    pub fn identity_distance(&self) -> Scalar {
        if self.dim() == 1 {
            let b = self.backend();
            let mut best = Scalar::zero(b);
            for x in self.corners() {
                let d = (&self.apply(&x)[0] - &x[0]).abs();
                if d > best {
                    best = d;
                }
            }
            return best;
        }
        self.identity_distance_sq().sqrt().expect("nonnegative")
    }

    pub fn is_identity(&self) -> bool {
        self.key() == Similarity::identity(self.dim(), self.backend()).key()
    }

    /// Bounding box `(lo, hi)` of `S([0,1]^d)`.
    pub fn cube_image_bbox(&self) -> (Vec<Scalar>, Vec<Scalar>) {
        let mut lo: Option<Vec<Scalar>> = None;
        let mut hi: Option<Vec<Scalar>> = None;
        for x in self.corners() {
            let y = self.apply(&x);
            match (&mut lo, &mut hi) {
                (Some(l), Some(h)) => {
                    for k in 0..y.len() {
                        if y[k] < l[k] {
                            l[k] = y[k].clone();
                        }
                        if y[k] > h[k] {
                            h[k] = y[k].clone();
                        }
                    }
                }
                _ => {
                    lo = Some(y.clone());
                    hi = Some(y);
                }
            }
        }
        (lo.expect("corners"), hi.expect("corners"))
    }

    /// Squared Euclidean distance between `S([0,1]^d)`'s bounding box and
    /// `[0,1]^d`.
    pub fn cube_gap_sq(&self) -> Scalar {
        let b = self.backend();
        let (lo, hi) = self.cube_image_bbox();
        let (zero, one) = (Scalar::zero(b), Scalar::one(b));
        let mut acc = Scalar::zero(b);
        for k in 0..lo.len() {
            let gap = if lo[k] > one {
                &lo[k] - &one
            } else if hi[k] < zero {
                -&hi[k]
            } else {
                continue;
            };
            acc = &acc + &(&gap * &gap);
        }
        acc
    }

    /// True when every corner image lies in `[0,1]^d` within `tol`.
    pub fn maps_cube_into_cube(&self, tol: &Scalar) -> bool {
        let b = self.backend();
        let lo = -tol;
        let hi = &Scalar::one(b) + tol;
        let (l, h) = self.cube_image_bbox();
        l.iter().all(|v| *v >= lo) && h.iter().all(|v| *v <= hi)
    }

    pub fn key(&self) -> MapKey {
        let (reflect, degrees) = self.orthogonal.key();
        MapKey {
            ratio: self.ratio.key(),
            reflect,
            degrees,
            translation: self.translation.iter().map(Scalar::key).collect(),
        }
    }

    /// Largest parameter difference against `other` (angles compared on the
    /// circle); `None` when the reflection flags differ.
    pub fn parameter_distance(&self, other: &Similarity) -> Option<Scalar> {
        if self.orthogonal.reflect() != other.orthogonal.reflect() {
            return None;
        }
        let b = self.backend();
        let mut worst = (&self.ratio - &other.ratio).abs();
        let d = (self.orthogonal.degrees() - other.orthogonal.degrees()).abs();
        let wrapped = &Scalar::from_i64(360, b) - &d;
        let d = d.min(wrapped);
        worst = worst.max(d);
        for (x, y) in self.translation.iter().zip(&other.translation) {
            worst = worst.max((x - y).abs());
        }
        Some(worst)
    }

    pub fn to_affine_f64(&self) -> AffineF64 {
        let c = self.ratio.to_f64();
        let o = self.orthogonal.matrix_f64();
        let mut b = [0.0; 2];
        for (k, t) in self.translation.iter().enumerate() {
            b[k] = t.to_f64();
        }
        AffineF64 {
            dim: self.dim(),
            m: [[c * o[0][0], c * o[0][1]], [c * o[1][0], c * o[1][1]]],
            b,
        }
    }

    /// Re-expresses every parameter in another backend.
    pub fn convert(&self, b: Backend) -> Result<Similarity> {
        let ratio = self.ratio.convert(b);
        let t: Vec<Scalar> = self.translation.iter().map(|v| v.convert(b)).collect();
        let o = if self.dim() == 1 {
            Orthogonal::line(self.orthogonal.reflect(), b)
        } else {
            Orthogonal::plane(self.orthogonal.degrees().convert(b), self.orthogonal.reflect())?
        };
        Similarity::new(ratio, o, t)
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim() == 1 {
            let sign = if self.orthogonal.reflect() { "-" } else { "" };
            return write!(f, "x -> {sign}{}*x + {}", self.ratio, self.translation[0]);
        }
        write!(
            f,
            "x -> {}*{}*x + ({}, {})",
            self.ratio, self.orthogonal, self.translation[0], self.translation[1]
        )
    }
}
