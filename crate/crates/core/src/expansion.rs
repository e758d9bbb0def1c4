//! Hurwitz continued fraction expansion.
//!
//! The Hurwitz map on the half-open box `U` is `H(z) = 1/z - ⌊1/z⌉`, where `⌊·⌉`
//! is [`crate::gaussian::nearest_round`]. Iterating it produces the digits `c₁, c₂, …` with
//! `z = 1/(c₁ + 1/(c₂ + ⋯))`. Gaussian rationals have finite expansions.

use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gaussian::{CommonDenominator, GaussianInt, GaussianRational, LatticePoint};
use crate::mobius::MobiusMatrix;

pub const DEFAULT_MAX_DIGITS: usize = 4096;

/// The sixteen digits of norm 2, 4 and 5, whose 1-cylinders are clipped by the
/// boundary of `U`.
pub const EXCEPTIONAL_DIGITS: [(i64, i64); 16] = [
    (-1, -1),
    (-1, -2),
    (0, -2),
    (1, -2),
    (1, -1),
    (2, -1),
    (2, 0),
    (2, 1),
    (1, 1),
    (1, 2),
    (0, 2),
    (-1, 2),
    (-1, 1),
    (-2, 1),
    (-2, 0),
    (-2, -1),
];

/// A digit of the expansion: a Gaussian integer of norm at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HurwitzDigit(GaussianInt);

impl HurwitzDigit {
    pub fn new(value: GaussianInt) -> Result<Self> {
        if value.norm_sq() < 2.into() {
            return Err(Error::Domain(format!(
                "{value} has norm < 2 and is not a Hurwitz digit"
            )));
        }
        Ok(HurwitzDigit(value))
    }

    pub fn from_pair(re: i64, im: i64) -> Result<Self> {
        HurwitzDigit::new(GaussianInt::new(re, im))
    }

    pub fn value(&self) -> &GaussianInt {
        &self.0
    }

    pub fn class(&self) -> DigitClass {
        classify_digit(&self.0)
    }
}

impl fmt::Display for HurwitzDigit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for HurwitzDigit {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let p = self
            .0
            .to_lattice()
            .ok_or_else(|| serde::ser::Error::custom("digit does not fit in i64"))?;
        [p.re, p.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for HurwitzDigit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [re, im] = <[i64; 2]>::deserialize(d)?;
        HurwitzDigit::from_pair(re, im).map_err(serde::de::Error::custom)
    }
}

/// A finite string of digits; serializes as `[[re, im], …]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DigitWord(Vec<HurwitzDigit>);

impl DigitWord {
    pub fn new(digits: Vec<HurwitzDigit>) -> Self {
        DigitWord(digits)
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self> {
        pairs
            .iter()
            .map(|&(re, im)| HurwitzDigit::from_pair(re, im))
            .collect::<Result<Vec<_>>>()
            .map(DigitWord)
    }

    pub fn digits(&self) -> &[HurwitzDigit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, d: HurwitzDigit) {
        self.0.push(d);
    }

    pub fn iter(&self) -> impl Iterator<Item = &HurwitzDigit> {
        self.0.iter()
    }

    pub fn to_lattice(&self) -> Option<Vec<LatticePoint>> {
        self.0.iter().map(|d| d.0.to_lattice()).collect()
    }

    /// `φ_{c₁} ∘ ⋯ ∘ φ_{cₙ}` as a matrix product.
    pub fn continuant(&self) -> MobiusMatrix {
        self.0.iter().fold(MobiusMatrix::identity(), |m, d| {
            m.compose(&MobiusMatrix::digit(&d.0))
        })
    }
}

impl fmt::Display for DigitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionResult {
    pub digits: DigitWord,
    /// The remainder reached 0.
    pub terminated: bool,
    /// `Hⁿ(z)` after the last emitted digit.
    pub remainder: GaussianRational,
}

fn require_in_box(z: &GaussianRational) -> Result<()> {
    if z.in_unit_box() {
        return Ok(());
    }
    let half = BigRational::new(1.into(), 2.into());
    let inside = |v: &BigRational| -&half <= *v && *v < half;
    let (name, v) = if inside(&z.re) { ("im", &z.im) } else { ("re", &z.re) };
    Err(Error::Domain(format!(
        "{z} is not in U = [-1/2, 1/2)^2: {name} = {v} is outside [-1/2, 1/2)"
    )))
}

/// One application of the Hurwitz map: `(⌊1/z⌉, 1/z - ⌊1/z⌉)`.
pub fn hurwitz_step(z: &GaussianRational) -> Result<(HurwitzDigit, GaussianRational)> {
    require_in_box(z)?;
    if z.is_zero() {
        return Err(Error::Domain("the Hurwitz map is undefined at 0".into()));
    }
    let (digit, next) = CommonDenominator::from_rational(z).hurwitz_step();
    Ok((HurwitzDigit::new(digit)?, next.to_rational()))
}

/// Iterates [`hurwitz_step`] until the remainder vanishes or `max_digits` digits
/// have been produced.
pub fn expand(z: &GaussianRational, max_digits: usize) -> Result<ExpansionResult> {
    require_in_box(z)?;
    let (digits, rem) = expand_common(CommonDenominator::from_rational(z), max_digits)?;
    Ok(ExpansionResult {
        terminated: rem.is_zero(),
        digits,
        remainder: rem.to_rational(),
    })
}

/// The expansion loop on an input already known to lie in `U`.
pub(crate) fn expand_common(
    mut rem: CommonDenominator,
    max_digits: usize,
) -> Result<(DigitWord, CommonDenominator)> {
    let mut digits = DigitWord::default();
    while !rem.is_zero() && digits.len() < max_digits {
        let (d, next) = rem.hurwitz_step();
        digits.push(HurwitzDigit::new(d)?);
        rem = next;
    }
    Ok((digits, rem))
}

/// Exact value of the finite continued fraction `1/(c₁ + 1/(c₂ + ⋯ + 1/cₙ))`.
///
/// Suffix continuants are accumulated right to left; a zero lower-right entry
/// means some tail `c_k + t_{k+1}` vanished.
pub fn evaluate(w: &DigitWord) -> Result<GaussianRational> {
    let mut m = MobiusMatrix::identity();
    for (k, d) in w.digits().iter().enumerate().rev() {
        m = MobiusMatrix::digit(d.value()).compose(&m);
        if m.d.is_zero() {
            return Err(Error::DivisionByZero(format!(
                "tail at position {} cancels digit {d}",
                k + 1
            )));
        }
    }
    if w.is_empty() {
        return Ok(GaussianRational::zero());
    }
    GaussianRational::from(&m.b).checked_div(&GaussianRational::from(&m.d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DigitClass {
    /// Norm below 2; never produced by the expansion.
    Invalid,
    /// Norm 2, 4 or 5.
    Exceptional,
    /// Norm at least 8; these index the branches of the IFS.
    Regular,
}

pub fn classify_digit(d: &GaussianInt) -> DigitClass {
    let n = d.norm_sq();
    if n < 2.into() {
        DigitClass::Invalid
    } else if n < 8.into() {
        DigitClass::Exceptional
    } else {
        DigitClass::Regular
    }
}

/// The exceptional digits found by classifying every point of `[-3, 3]²`.
pub fn exceptional_digits() -> Vec<LatticePoint> {
    (-3..=3)
        .flat_map(|x| (-3..=3).map(move |y| LatticePoint::new(x, y)))
        .filter(|p| classify_digit(&GaussianInt::from(*p)) == DigitClass::Exceptional)
        .collect()
}

/// Whether the expansion of `z` begins with `w`. Every digit of `w` must be regular.
pub fn cylinder_check(w: &DigitWord, z: &GaussianRational) -> Result<bool> {
    if let Some(d) = w.iter().find(|d| d.class() != DigitClass::Regular) {
        return Err(Error::Domain(format!("{d} is not a regular digit")));
    }
    let exp = expand(z, w.len())?;
    Ok(exp.digits.digits() == w.digits())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxStatus {
    Terminated,
    /// A rounding decision was not stable under the accumulated error radius.
    PrecisionExhausted,
    MaxDigits,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxExpansion {
    pub digits: Vec<LatticePoint>,
    pub status: ApproxStatus,
    pub remainder: Complex64,
    /// Error radius of `remainder` after the last step.
    pub error_radius: f64,
}

fn stable_floor(x: f64, radius: f64) -> Option<f64> {
    let lo = (x - radius + 0.5).floor();
    let hi = (x + radius + 0.5).floor();
    (lo == hi).then_some(lo)
}

/// Expansion of an approximately known point (e.g. an irrational given to
/// double precision) whose true value lies within `error_radius` of `z`.
///
/// A digit is emitted only when both coordinate roundings are identical for
/// every point of the error disc; otherwise the expansion stops with
/// [`ApproxStatus::PrecisionExhausted`].
pub fn expand_approx(z: Complex64, error_radius: f64, max_digits: usize) -> Result<ApproxExpansion> {
    if !(error_radius >= 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidArgument("non-finite input or radius".into()));
    }
    if !(-0.5..0.5).contains(&z.re) || !(-0.5..0.5).contains(&z.im) {
        return Err(Error::Domain(format!("{z} is not in U")));
    }
    let mut digits = Vec::new();
    let mut rem = z;
    let mut radius = error_radius;
    loop {
        if rem.re == 0.0 && rem.im == 0.0 && radius == 0.0 {
            return Ok(ApproxExpansion {
                digits,
                status: ApproxStatus::Terminated,
                remainder: rem,
                error_radius: radius,
            });
        }
        if digits.len() >= max_digits {
            break;
        }
        let m = rem.norm();
        if m <= radius {
            return Ok(ApproxExpansion {
                digits,
                status: ApproxStatus::PrecisionExhausted,
                remainder: rem,
                error_radius: radius,
            });
        }
        let inv = rem.inv();
        // Perturbation of 1/z plus a few ulps of rounding in the division.
        let inv_radius = radius / (m * (m - radius)) + 4.0 * f64::EPSILON * inv.norm();
        let (Some(re), Some(im)) = (
            stable_floor(inv.re, inv_radius),
            stable_floor(inv.im, inv_radius),
        ) else {
            return Ok(ApproxExpansion {
                digits,
                status: ApproxStatus::PrecisionExhausted,
                remainder: rem,
                error_radius: radius,
            });
        };
        digits.push(LatticePoint::new(re as i64, im as i64));
        rem = inv - Complex64::new(re, im);
        radius = inv_radius + f64::EPSILON * inv.norm();
    }
    Ok(ApproxExpansion {
        digits,
        status: ApproxStatus::MaxDigits,
        remainder: rem,
        error_radius: radius,
    })
}
