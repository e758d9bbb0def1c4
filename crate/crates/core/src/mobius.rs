//! Integer Möbius matrices `[[a, b], [c, d]]` acting by `z ↦ (a z + b) / (c z + d)`.
//!
//! Both continued-fraction evaluation and IFS branch composition are products of
//! the digit matrices `[[0, 1], [1, c]]`, which act as `z ↦ 1 / (z + c)`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gaussian::{CommonDenominator, GaussianInt, GaussianRational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MobiusMatrix {
    pub a: GaussianInt,
    pub b: GaussianInt,
    pub c: GaussianInt,
    pub d: GaussianInt,
}

impl MobiusMatrix {
    pub fn identity() -> Self {
        MobiusMatrix {
            a: GaussianInt::new(1, 0),
            b: GaussianInt::zero(),
            c: GaussianInt::zero(),
            d: GaussianInt::new(1, 0),
        }
    }

    /// `[[0, 1], [1, digit]]`, the map `z ↦ 1 / (z + digit)`.
    pub fn digit(digit: &GaussianInt) -> Self {
        MobiusMatrix {
            a: GaussianInt::zero(),
            b: GaussianInt::new(1, 0),
            c: GaussianInt::new(1, 0),
            d: digit.clone(),
        }
    }

    /// Matrix product; as maps, `self ∘ rhs`.
    pub fn compose(&self, rhs: &MobiusMatrix) -> MobiusMatrix {
        MobiusMatrix {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }

    pub fn det(&self) -> GaussianInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// The adjugate, which acts as the inverse map.
    pub fn adjugate(&self) -> MobiusMatrix {
        MobiusMatrix {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    fn denominator_at(&self, z: &GaussianRational) -> GaussianRational {
        &GaussianRational::from(&self.c) * z + GaussianRational::from(&self.d)
    }

    pub fn apply_exact(&self, z: &GaussianRational) -> Result<GaussianRational> {
        self.apply_common(&CommonDenominator::from_rational(z))
            .map(|w| w.to_rational())
            .ok_or_else(|| Error::DivisionByZero(format!("pole of the map at {z}")))
    }

    pub(crate) fn apply_common(&self, z: &CommonDenominator) -> Option<CommonDenominator> {
        let n = GaussianInt {
            re: z.re.clone(),
            im: z.im.clone(),
        };
        let q = GaussianInt {
            re: z.den.clone(),
            im: 0.into(),
        };
        let num = &self.a * &n + &self.b * &q;
        let den = &self.c * &n + &self.d * &q;
        (!den.is_zero()).then(|| CommonDenominator::from_quotient(&num, &den))
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        let (a, b, c, d) = self.to_complex();
        (a * z + b) / (c * z + d)
    }

    /// `|det| / |c z + d|²` as an exact rational. The determinant of every
    /// product of digit matrices is `±1`, so this is the derivative modulus
    /// itself, not its square.
    pub fn derivative_modulus_exact(&self, z: &GaussianRational) -> Result<BigRational> {
        let den = self.denominator_at(z).norm_sq();
        if den.is_zero() {
            return Err(Error::DivisionByZero(format!("pole of the map at {z}")));
        }
        let det = self.det().norm_sq();
        if det.is_one() {
            Ok(den.recip())
        } else {
            // |det| is irrational in general; only unimodular products are exact.
            Err(Error::Domain(format!(
                "determinant with |det|^2 = {det} is not unimodular"
            )))
        }
    }

    pub fn derivative_modulus(&self, z: Complex64) -> f64 {
        let (a, b, c, d) = self.to_complex();
        (a * d - b * c).norm() / (c * z + d).norm_sqr()
    }

    pub fn to_complex(&self) -> (Complex64, Complex64, Complex64, Complex64) {
        (
            self.a.to_complex(),
            self.b.to_complex(),
            self.c.to_complex(),
            self.d.to_complex(),
        )
    }

    /// The pole `-d / c`, if the map is not affine.
    pub fn pole(&self) -> Option<GaussianRational> {
        if self.c.is_zero() {
            return None;
        }
        let d = GaussianRational::from(&self.d);
        let c = GaussianRational::from(&self.c);
        Some(-(d / c))
    }

    pub fn is_identity(&self) -> bool {
        *self == MobiusMatrix::identity()
    }
}

impl Default for MobiusMatrix {
    fn default() -> Self {
        MobiusMatrix::identity()
    }
}

pub(crate) fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// Squared distance from `p` to the closed box `[-1/2, 1/2]²`.
pub fn dist_sq_to_closed_box(p: &GaussianRational) -> BigRational {
    let h = half();
    let gap = |v: &BigRational| {
        let excess = num_traits::Signed::abs(v) - &h;
        if excess > BigRational::zero() {
            excess
        } else {
            BigRational::zero()
        }
    };
    let gx = gap(&p.re);
    let gy = gap(&p.im);
    &gx * &gx + &gy * &gy
}

/// Largest squared distance from `p` to a point of `[-1/2, 1/2]²` (attained at a corner).
pub fn max_dist_sq_to_closed_box(p: &GaussianRational) -> BigRational {
    let h = half();
    let far = |v: &BigRational| num_traits::Signed::abs(v) + &h;
    let fx = far(&p.re);
    let fy = far(&p.im);
    &fx * &fx + &fy * &fy
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_matrix_is_reciprocal_shift() {
        let m = MobiusMatrix::digit(&GaussianInt::new(2, 2));
        let v = m.apply_exact(&GaussianRational::zero()).unwrap();
        assert_eq!(v, GaussianRational::from_ratios(1, 4, -1, 4));
        assert_eq!(m.det(), GaussianInt::new(-1, 0));
    }

    #[test]
    fn adjugate_inverts() {
        let m = MobiusMatrix::digit(&GaussianInt::new(3, 1))
            .compose(&MobiusMatrix::digit(&GaussianInt::new(-2, 2)));
        let z = GaussianRational::from_ratios(1, 7, -2, 9);
        let w = m.apply_exact(&z).unwrap();
        assert_eq!(m.adjugate().apply_exact(&w).unwrap(), z);
    }

    #[test]
    fn box_distances() {
        let p = GaussianRational::from_ratios(-2, 1, -2, 1);
        assert_eq!(dist_sq_to_closed_box(&p), BigRational::new(9.into(), 2.into()));
        assert_eq!(
            max_dist_sq_to_closed_box(&p),
            BigRational::new(25.into(), 2.into())
        );
        let inside = GaussianRational::from_ratios(1, 5, 0, 1);
        assert!(dist_sq_to_closed_box(&inside).is_zero());
    }
}
