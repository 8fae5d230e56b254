use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Backend, KeyAtom, Scalar};

/// Orthogonal part of a similarity.
///
/// In the line it is `x ↦ ±x`. In the plane it is `R(θ)·F^r` with `R(θ)` the
/// rotation by `θ` degrees and `F = diag(1, -1)`. Angles are kept in `[0, 360)`.
///
/// On the exact backend any rational angle is a valid group element, but only
/// multiples of 90° have a matrix; the others serve group computations only.
#[derive(Clone, Debug)]
pub struct Orthogonal {
    dim: usize,
    degrees: Scalar,
    reflect: bool,
    trig: Option<(Scalar, Scalar)>,
}

impl Orthogonal {
    pub fn identity(dim: usize, b: Backend) -> Self {
        Orthogonal {
            dim,
            degrees: Scalar::zero(b),
            reflect: false,
            trig: Some((Scalar::one(b), Scalar::zero(b))),
        }
    }

    /// `x ↦ -x` when `reflect`, otherwise the identity.
    pub fn line(reflect: bool, b: Backend) -> Self {
        Orthogonal {
            reflect,
            ..Self::identity(1, b)
        }
    }

    pub fn plane(degrees: Scalar, reflect: bool) -> Result<Self> {
        let degrees = normalize_degrees(&degrees)?;
        let trig = trig_of(&degrees)?;
        Ok(Orthogonal {
            dim: 2,
            degrees,
            reflect,
            trig,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> Backend {
        self.degrees.backend()
    }

    pub fn degrees(&self) -> &Scalar {
        &self.degrees
    }

    pub fn reflect(&self) -> bool {
        self.reflect
    }

    /// Determinant sign.
    pub fn det(&self) -> i32 {
        if self.reflect {
            -1
        } else {
            1
        }
    }

    pub fn compose(&self, other: &Orthogonal) -> Result<Orthogonal> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        if self.backend() != other.backend() {
            return Err(Error::BackendMismatch(self.backend(), other.backend()));
        }
        if self.dim == 1 {
            return Ok(Orthogonal::line(self.reflect ^ other.reflect, self.backend()));
        }
        // F·R(θ) = R(-θ)·F
        let theta2 = if self.reflect {
            -&other.degrees
        } else {
            other.degrees.clone()
        };
        let degrees = normalize_degrees(&(&self.degrees + &theta2))?;
        let trig = match (&self.trig, &other.trig) {
            (Some((c1, s1)), Some((c2, s2))) if !is_right_angle(&degrees)? => {
                let s2 = if self.reflect { -s2 } else { s2.clone() };
                Some((c1 * c2 - s1 * &s2, s1 * c2 + c1 * &s2))
            }
            _ => trig_of(&degrees)?,
        };
        Ok(Orthogonal {
            dim: 2,
            degrees,
            reflect: self.reflect ^ other.reflect,
            trig,
        })
    }

    /// Reflections are involutions; rotations invert their angle.
    pub fn inverse(&self) -> Orthogonal {
        if self.dim == 1 || self.reflect {
            return self.clone();
        }
        let degrees = normalize_degrees(&-&self.degrees).expect("same backend");
        Orthogonal {
            dim: 2,
            degrees,
            reflect: false,
            trig: self.trig.as_ref().map(|(c, s)| (c.clone(), -s)),
        }
    }

    pub fn is_identity(&self) -> bool {
        !self.reflect && self.degrees.key() == Scalar::zero(self.backend()).key()
    }

    pub fn has_matrix(&self) -> bool {
        self.trig.is_some()
    }

    /// Matrix entries, row major; 1D uses only `[0][0]`.
    pub fn matrix(&self) -> Result<[[Scalar; 2]; 2]> {
        let b = self.backend();
        if self.dim == 1 {
            let s = if self.reflect { -1 } else { 1 };
            return Ok([
                [Scalar::from_i64(s, b), Scalar::zero(b)],
                [Scalar::zero(b), Scalar::zero(b)],
            ]);
        }
        let (cos, sin) = self
            .trig
            .as_ref()
            .ok_or_else(|| Error::InexactTrig(self.degrees.to_string()))?;
        let (m01, m11) = if self.reflect {
            (sin.clone(), -cos)
        } else {
            (-sin, cos.clone())
        };
        Ok([[cos.clone(), m01], [sin.clone(), m11]])
    }

    /// Panics for exact angles without a matrix; similarities never hold those.
    pub(crate) fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        if self.dim == 1 {
            return vec![if self.reflect { -&v[0] } else { v[0].clone() }];
        }
        let m = self.matrix().expect("orthogonal part with a matrix");
        vec![
            &m[0][0] * &v[0] + &m[0][1] * &v[1],
            &m[1][0] * &v[0] + &m[1][1] * &v[1],
        ]
    }

    pub fn matrix_f64(&self) -> [[f64; 2]; 2] {
        let m = self.matrix().expect("orthogonal part with a matrix");
        [
            [m[0][0].to_f64(), m[0][1].to_f64()],
            [m[1][0].to_f64(), m[1][1].to_f64()],
        ]
    }

    pub(crate) fn key(&self) -> (bool, KeyAtom) {
        (self.reflect, self.degrees.key())
    }
}

/// Angle reduced into `[0, 360)`; float values within the key grid of 360
/// fold to 0.
fn normalize_degrees(d: &Scalar) -> Result<Scalar> {
    let b = d.backend();
    let full = Scalar::from_i64(360, b);
    let r = d.rem_euclid(&full)?;
    if !b.is_exact() && (&full - &r).key() == Scalar::zero(b).key() {
        return Ok(Scalar::zero(b));
    }
    Ok(r)
}

fn is_right_angle(degrees: &Scalar) -> Result<bool> {
    Ok(degrees
        .checked_div(&Scalar::from_i64(90, degrees.backend()))?
        .is_integer())
}

/// Exact at multiples of 90°; `None` for other angles on the exact backend.
fn trig_of(degrees: &Scalar) -> Result<Option<(Scalar, Scalar)>> {
    match degrees.cos_sin_degrees() {
        Ok(t) => Ok(Some(t)),
        Err(Error::InexactTrig(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

impl fmt::Display for Orthogonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim == 1 {
            return write!(f, "{}", if self.reflect { "-1" } else { "+1" });
        }
        write!(f, "R({}°)", self.degrees)?;
        if self.reflect {
            write!(f, "·F")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(v: i64, b: Backend) -> Scalar {
        Scalar::from_i64(v, b)
    }

    #[test]
    fn rotations_add() {
        let b = Backend::Exact;
        let r90 = Orthogonal::plane(deg(90, b), false).unwrap();
        let r270 = Orthogonal::plane(deg(270, b), false).unwrap();
        assert!(r90.compose(&r270).unwrap().is_identity());
    }

    #[test]
    fn reflection_conjugates_rotation() {
        let b = Backend::Double;
        let f = Orthogonal::plane(deg(0, b), true).unwrap();
        let r = Orthogonal::plane(deg(30, b), false).unwrap();
        // F·R(30)·F = R(-30)
        let c = f.compose(&r).unwrap().compose(&f).unwrap();
        assert!(!c.reflect());
        assert!((c.degrees().to_f64() - 330.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_is_identity_on_compose() {
        for b in [Backend::Exact, Backend::Double, Backend::default()] {
            for (a, refl) in [(90, false), (180, true), (270, true), (0, true)] {
                let o = Orthogonal::plane(deg(a, b), refl).unwrap();
                assert!(o.inverse().compose(&o).unwrap().is_identity());
                assert_eq!(o.inverse().reflect(), refl);
            }
        }
        let b = Backend::Double;
        let o = Orthogonal::plane(Scalar::Double(37.5), true).unwrap();
        let id = o.inverse().compose(&o).unwrap();
        let m = id.matrix_f64();
        assert!((m[0][0] - 1.0).abs() < 1e-12 && m[1][0].abs() < 1e-12);
        assert_eq!(o.inverse().degrees().to_f64(), 37.5);
        let _ = b;
    }

    #[test]
    fn matrix_matches_rf() {
        let o = Orthogonal::plane(Scalar::Double(30.0), true).unwrap();
        let m = o.matrix_f64();
        let (c, s) = (30f64.to_radians().cos(), 30f64.to_radians().sin());
        assert!((m[0][0] - c).abs() < 1e-15 && (m[0][1] - s).abs() < 1e-15);
        assert!((m[1][0] - s).abs() < 1e-15 && (m[1][1] + c).abs() < 1e-15);
    }

    #[test]
    fn line_signs() {
        let b = Backend::Exact;
        let n = Orthogonal::line(true, b);
        assert!(n.compose(&n).unwrap().is_identity());
        assert_eq!(n.apply(&[Scalar::one(b)])[0], Scalar::from_i64(-1, b));
    }
}
