//! Exact arithmetic over the Gaussian integers `ℤ[i]` and the Gaussian field ℚ(i).
//!
//! [`GaussianInt`] and [`GaussianRational`] are arbitrary precision and always
//! canonical (rationals are reduced with positive denominators), so structural
//! equality is numeric equality. [`LatticePoint`] is the small fixed-width
//! counterpart used by enumeration-heavy code.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Gaussian integer `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussianInt {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        GaussianInt::new(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sq(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        GaussianInt {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// Narrow to a [`LatticePoint`] when both coordinates fit in `i64`.
    pub fn to_lattice(&self) -> Option<LatticePoint> {
        Some(LatticePoint::new(self.re.to_i64()?, self.im.to_i64()?))
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

impl From<LatticePoint> for GaussianInt {
    fn from(p: LatticePoint) -> Self {
        GaussianInt::new(p.re, p.im)
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_complex(f, &self.re, &self.im, |v| v.to_string())
    }
}

fn fmt_complex<T: Zero + Signed + One + PartialEq>(
    f: &mut fmt::Formatter<'_>,
    re: &T,
    im: &T,
    show: impl Fn(&T) -> String,
) -> fmt::Result {
    if im.is_zero() {
        return write!(f, "{}", show(re));
    }
    let mag = im.abs();
    let im_part = if mag.is_one() {
        "i".to_string()
    } else {
        format!("{}i", show(&mag))
    };
    match (re.is_zero(), im.is_negative()) {
        (true, false) => write!(f, "{im_part}"),
        (true, true) => write!(f, "-{im_part}"),
        (false, false) => write!(f, "{}+{im_part}", show(re)),
        (false, true) => write!(f, "{}-{im_part}", show(re)),
    }
}

macro_rules! forward_binop {
    ($ty:ident, $trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl $trait<&$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl $trait<$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(GaussianInt, Add, add, |a, b| GaussianInt {
    re: &a.re + &b.re,
    im: &a.im + &b.im,
});
forward_binop!(GaussianInt, Sub, sub, |a, b| GaussianInt {
    re: &a.re - &b.re,
    im: &a.im - &b.im,
});
forward_binop!(GaussianInt, Mul, mul, |a, b| GaussianInt {
    re: &a.re * &b.re - &a.im * &b.im,
    im: &a.re * &b.im + &a.im * &b.re,
});

impl Neg for GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        GaussianInt {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &GaussianInt {
    type Output = GaussianInt;
    fn neg(self) -> GaussianInt {
        -(self.clone())
    }
}

/// An exact element `re + im·i` of ℚ(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    /// `(re_num/re_den) + (im_num/im_den)·i`. Panics on a zero denominator.
    pub fn from_ratios(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        GaussianRational {
            re: BigRational::new(re_num.into(), re_den.into()),
            im: BigRational::new(im_num.into(), im_den.into()),
        }
    }

    pub fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("reciprocal of 0".into()));
        }
        let n = self.norm_sq();
        Ok(GaussianRational {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }

    /// `num / den` for Gaussian integers.
    pub fn from_quotient(num: &GaussianInt, den: &GaussianInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero(format!("{num} / 0")));
        }
        Ok(CommonDenominator::from_quotient(num, den).to_rational())
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.recip()?)
    }

    /// Membership in the half-open box `U = [-1/2, 1/2) × [-1/2, 1/2)`.
    pub fn in_unit_box(&self) -> bool {
        let half = BigRational::new(1.into(), 2.into());
        let inside = |v: &BigRational| *v >= -half.clone() && *v < half;
        inside(&self.re) && inside(&self.im)
    }

    /// Membership in the closed box `[-1/2, 1/2]²`.
    pub fn in_closed_unit_box(&self) -> bool {
        let half = BigRational::new(1.into(), 2.into());
        self.re.abs() <= half && self.im.abs() <= half
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// The exact binary value of a finite `f64` pair.
    pub fn from_complex(z: Complex64) -> Option<Self> {
        Some(GaussianRational {
            re: BigRational::from_float(z.re)?,
            im: BigRational::from_float(z.im)?,
        })
    }
}

impl From<&GaussianInt> for GaussianRational {
    fn from(z: &GaussianInt) -> Self {
        GaussianRational {
            re: BigRational::from_integer(z.re.clone()),
            im: BigRational::from_integer(z.im.clone()),
        }
    }
}

impl From<GaussianInt> for GaussianRational {
    fn from(z: GaussianInt) -> Self {
        GaussianRational::from(&z)
    }
}

forward_binop!(GaussianRational, Add, add, |a, b| GaussianRational {
    re: &a.re + &b.re,
    im: &a.im + &b.im,
});
forward_binop!(GaussianRational, Sub, sub, |a, b| GaussianRational {
    re: &a.re - &b.re,
    im: &a.im - &b.im,
});
forward_binop!(GaussianRational, Mul, mul, |a, b| GaussianRational {
    re: &a.re * &b.re - &a.im * &b.im,
    im: &a.re * &b.im + &a.im * &b.re,
});
// Panics on division by zero, like the scalar rationals do.
forward_binop!(GaussianRational, Div, div, |a, b| a
    .checked_div(b)
    .expect("division by zero Gaussian rational"));

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -(self.clone())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_complex(f, &self.re, &self.im, |v| v.to_string())
    }
}

/// `(re + im·i) / den` with `den > 0` and `gcd(re, im, den) = 1`.
///
/// One gcd per operation instead of one per coordinate; the expansion loop
/// runs in this form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct CommonDenominator {
    pub re: BigInt,
    pub im: BigInt,
    pub den: BigInt,
}

impl CommonDenominator {
    pub fn new(re: BigInt, im: BigInt, den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        let mut v = CommonDenominator { re, im, den };
        if v.den.is_negative() {
            v.re = -v.re;
            v.im = -v.im;
            v.den = -v.den;
        }
        v.reduce();
        v
    }

    fn reduce(&mut self) {
        let g = self.re.gcd(&self.im).gcd(&self.den);
        if !g.is_zero() && !g.is_one() {
            self.re /= &g;
            self.im /= &g;
            self.den /= &g;
        }
    }

    pub fn from_rational(z: &GaussianRational) -> Self {
        let den = z.re.denom().lcm(z.im.denom());
        let re = z.re.numer() * (&den / z.re.denom());
        let im = z.im.numer() * (&den / z.im.denom());
        CommonDenominator { re, im, den }
    }

    /// `num / den` for Gaussian integers, `den != 0`.
    pub fn from_quotient(num: &GaussianInt, den: &GaussianInt) -> Self {
        let prod = num * &den.conj();
        CommonDenominator::new(prod.re, prod.im, den.norm_sq())
    }

    pub fn to_rational(&self) -> GaussianRational {
        GaussianRational {
            re: BigRational::new(self.re.clone(), self.den.clone()),
            im: BigRational::new(self.im.clone(), self.den.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `(⌊1/z⌉, 1/z - ⌊1/z⌉)` for `z != 0`.
    pub fn hurwitz_step(&self) -> (GaussianInt, CommonDenominator) {
        let n = &self.re * &self.re + &self.im * &self.im;
        let inv = CommonDenominator::new(&self.den * &self.re, -(&self.den * &self.im), n);
        let two_den = &inv.den * 2;
        let round = |v: &BigInt| -> BigInt { (v * BigInt::from(2) + &inv.den).div_floor(&two_den) };
        let digit = GaussianInt {
            re: round(&inv.re),
            im: round(&inv.im),
        };
        // Subtracting an integer multiple of the denominator keeps the gcd at 1.
        let next = CommonDenominator {
            re: &inv.re - &digit.re * &inv.den,
            im: &inv.im - &digit.im * &inv.den,
            den: inv.den,
        };
        (digit, next)
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Accepts `p/q+r/s i`, `p/q-r/s i`, `p/q`, `r/s i`, with optional spaces.
impl FromStr for GaussianRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty input".into()));
        }
        let Some(body) = compact.strip_suffix('i') else {
            return Ok(GaussianRational::new(
                parse_rational(&compact)?,
                BigRational::zero(),
            ));
        };
        // The imaginary part starts at the last sign that is not leading.
        let split = body
            .char_indices()
            .rfind(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i);
        let (re_str, im_str) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im_str = match im_str {
            "" | "+" => "1",
            "-" => "-1",
            other => other.strip_prefix('+').unwrap_or(other),
        };
        Ok(GaussianRational::new(
            parse_rational(re_str)?,
            parse_rational(im_str)?,
        ))
    }
}

fn floor_half_shift(x: &BigRational) -> BigInt {
    (x + BigRational::new(1.into(), 2.into())).floor().to_integer()
}

/// `⌊re + 1/2⌋ + ⌊im + 1/2⌋·i`, one of the nearest Gaussian integers to `z`.
/// Half-integer ties round up.
pub fn nearest_round(z: &GaussianRational) -> GaussianInt {
    GaussianInt {
        re: floor_half_shift(&z.re),
        im: floor_half_shift(&z.im),
    }
}

/// `#(ℤ[i] ∩ [-n, n]²)` by direct enumeration.
pub fn count_in_square(n: u64) -> u64 {
    let n = n as i64;
    let mut count = 0u64;
    for _x in -n..=n {
        for _y in -n..=n {
            count += 1;
        }
    }
    count
}

/// A Gaussian integer with machine-word coordinates.
///
/// Ordered lexicographically by `(re, im)`; use [`LatticePoint::norm_order`]
/// for the norm-first order used by enumeration.
///
/// Serializes as the pair `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct LatticePoint {
    pub re: i64,
    pub im: i64,
}

impl From<[i64; 2]> for LatticePoint {
    fn from([re, im]: [i64; 2]) -> Self {
        LatticePoint { re, im }
    }
}

impl From<LatticePoint> for [i64; 2] {
    fn from(p: LatticePoint) -> Self {
        [p.re, p.im]
    }
}

impl LatticePoint {
    pub const fn new(re: i64, im: i64) -> Self {
        LatticePoint { re, im }
    }

    pub fn norm_sq(&self) -> u64 {
        (self.re * self.re + self.im * self.im) as u64
    }

    pub fn modulus(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re as f64, self.im as f64)
    }

    /// Norm first, then `(re, im)`.
    pub fn norm_order(&self, other: &Self) -> Ordering {
        self.norm_sq()
            .cmp(&other.norm_sq())
            .then_with(|| (self.re, self.im).cmp(&(other.re, other.im)))
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_complex(f, &BigInt::from(self.re), &BigInt::from(self.im), |v| {
            v.to_string()
        })
    }
}

/// Lazy enumeration of `ℤ[i]` in nondecreasing norm, ties by `(re, im)`.
///
/// Points are produced in norm bands whose width grows with the norm, so the
/// iterator is unbounded and uses memory proportional to one band.
#[derive(Debug, Clone)]
pub struct NormOrderedLattice {
    band_lo: u64,
    buffer: Vec<LatticePoint>,
    pos: usize,
}

impl NormOrderedLattice {
    /// Starts at the smallest norm `>= min_norm_sq`.
    pub fn starting_at(min_norm_sq: u64) -> Self {
        NormOrderedLattice {
            band_lo: min_norm_sq,
            buffer: Vec::new(),
            pos: 0,
        }
    }

    fn fill_band(&mut self) {
        let lo = self.band_lo;
        let hi = lo + (lo / 16).max(64);
        self.buffer.clear();
        self.pos = 0;
        let r = (hi - 1).sqrt() as i64;
        for x in -r..=r {
            let x2 = (x * x) as u64;
            if x2 >= hi {
                continue;
            }
            let y_max = (hi - 1 - x2).sqrt() as i64;
            let y_min = if lo > x2 { ceil_sqrt(lo - x2) as i64 } else { 0 };
            for y in y_min..=y_max {
                self.buffer.push(LatticePoint::new(x, y));
                if y != 0 {
                    self.buffer.push(LatticePoint::new(x, -y));
                }
            }
        }
        self.buffer.sort_unstable_by(LatticePoint::norm_order);
        self.band_lo = hi;
    }
}

impl Iterator for NormOrderedLattice {
    type Item = LatticePoint;

    fn next(&mut self) -> Option<LatticePoint> {
        while self.pos >= self.buffer.len() {
            self.fill_band();
        }
        let p = self.buffer[self.pos];
        self.pos += 1;
        Some(p)
    }
}

pub(crate) fn ceil_sqrt(v: u64) -> u64 {
    let r = v.sqrt();
    if r * r == v {
        r
    } else {
        r + 1
    }
}

/// The first `limit` lattice points in norm order, as machine-word points.
pub fn lattice_by_norm(include_zero: bool, limit: usize) -> Vec<LatticePoint> {
    NormOrderedLattice::starting_at(u64::from(!include_zero))
        .take(limit)
        .collect()
}

/// The first `limit` Gaussian integers sorted by norm, ties by `(re, im)`.
pub fn enumerate_by_norm(include_zero: bool, limit: usize) -> Vec<GaussianInt> {
    lattice_by_norm(include_zero, limit)
        .into_iter()
        .map(GaussianInt::from)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn nearest_round_examples() {
        assert_eq!(nearest_round(&GaussianRational::zero()), GaussianInt::zero());
        let half = GaussianRational::new(q(1, 2), q(1, 2));
        assert_eq!(nearest_round(&half), GaussianInt::new(1, 1));
        let z = GaussianRational::new(q(-3, 10), q(17, 10));
        assert_eq!(nearest_round(&z), GaussianInt::new(0, 2));
    }

    #[test]
    fn nearest_round_negative_ties_round_up() {
        let z = GaussianRational::new(q(-1, 2), q(-3, 2));
        assert_eq!(nearest_round(&z), GaussianInt::new(0, -1));
    }

    #[test]
    fn count_in_square_examples() {
        assert_eq!(count_in_square(0), 1);
        assert_eq!(count_in_square(3), 49);
        assert_eq!(count_in_square(50), 10201);
    }

    #[test]
    fn enumerate_by_norm_examples() {
        assert_eq!(enumerate_by_norm(true, 1), vec![GaussianInt::zero()]);
        let first = lattice_by_norm(true, 30);
        assert_eq!(first.iter().filter(|p| p.norm_sq() <= 2).count(), 9);
        let units = enumerate_by_norm(false, 4);
        assert_eq!(
            units,
            vec![
                GaussianInt::new(-1, 0),
                GaussianInt::new(0, -1),
                GaussianInt::new(0, 1),
                GaussianInt::new(1, 0),
            ]
        );
    }

    #[test]
    fn lazy_enumeration_crosses_band_boundaries() {
        // Brute force over a square large enough to hold every point of norm <= 400.
        let mut all: Vec<LatticePoint> = (-20..=20)
            .flat_map(|x| (-20..=20).map(move |y| LatticePoint::new(x, y)))
            .filter(|p| p.norm_sq() <= 400)
            .collect();
        all.sort_by(LatticePoint::norm_order);
        let lazy = lattice_by_norm(true, all.len());
        assert_eq!(lazy, all);
    }

    #[test]
    fn starting_at_skips_small_norms() {
        let mut it = NormOrderedLattice::starting_at(8);
        assert_eq!(it.next(), Some(LatticePoint::new(-2, -2)));
        assert!(it.take(500).all(|p| p.norm_sq() >= 8));
    }

    #[test]
    fn unit_box_is_half_open() {
        let lo = GaussianRational::new(q(-1, 2), q(-1, 2));
        assert!(lo.in_unit_box());
        let hi = GaussianRational::new(q(1, 2), q(0, 1));
        assert!(!hi.in_unit_box());
        assert!(hi.in_closed_unit_box());
    }

    #[test]
    fn parse_forms() {
        let z: GaussianRational = "2/5+0/1 i".parse().unwrap();
        assert_eq!(z, GaussianRational::from_ratios(2, 5, 0, 1));
        let z: GaussianRational = "-1/2-1/2i".parse().unwrap();
        assert_eq!(z, GaussianRational::from_ratios(-1, 2, -1, 2));
        let z: GaussianRational = "-3/4 i".parse().unwrap();
        assert_eq!(z, GaussianRational::from_ratios(0, 1, -3, 4));
        let z: GaussianRational = "1/3".parse().unwrap();
        assert_eq!(z, GaussianRational::from_ratios(1, 3, 0, 1));
        let z: GaussianRational = "1/4 - i".parse().unwrap();
        assert_eq!(z, GaussianRational::from_ratios(1, 4, -1, 1));
        assert!("1/0".parse::<GaussianRational>().is_err());
        assert!("abc".parse::<GaussianRational>().is_err());
        assert!("".parse::<GaussianRational>().is_err());
    }

    #[test]
    fn display_round_trips_through_parse() {
        for z in [
            GaussianRational::from_ratios(1, 4, -1, 4),
            GaussianRational::from_ratios(0, 1, 3, 7),
            GaussianRational::from_ratios(-2, 5, 0, 1),
            GaussianRational::from_ratios(0, 1, -1, 1),
        ] {
            let back: GaussianRational = z.to_string().parse().unwrap();
            assert_eq!(back, z);
        }
        assert_eq!(GaussianInt::new(-1, -1).to_string(), "-1-i");
        assert_eq!(GaussianInt::new(2, 2).to_string(), "2+2i");
    }

    #[test]
    fn field_ops() {
        let a = GaussianRational::from_ratios(1, 4, -1, 4);
        let inv = a.recip().unwrap();
        assert_eq!(inv, GaussianRational::from_ratios(2, 1, 2, 1));
        assert_eq!(&a * &inv, GaussianRational::from_ratios(1, 1, 0, 1));
        assert!(GaussianRational::zero().recip().is_err());
        let g = GaussianInt::new(2, 3) * GaussianInt::new(1, -1);
        assert_eq!(g, GaussianInt::new(5, 1));
        assert_eq!(g.norm_sq(), BigInt::from(26));
    }
}
