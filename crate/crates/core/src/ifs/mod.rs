//! The conformal iterated function system of inverse Hurwitz branches.
//!
//! For `(k, ℓ)` with `k² + ℓ² ≥ 8` the branch `φ_{k,ℓ}(z) = 1/(z + k + ℓi)` maps
//! the closed unit box `[-1/2, 1/2]²` onto the closure of the 1-cylinder
//! `U_{k,ℓ}`. Compositions are integer Möbius matrices with determinant `±1`, so
//! `|Dφ_w(z)| = 1/|cz + d|²` exactly and all box extrema follow from the pole
//! `-d/c`: the supremum is at the box point nearest the pole, the infimum at the
//! farthest corner.

mod checks;
mod distortion;

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expansion::{DigitWord, HurwitzDigit};
use crate::gaussian::{GaussianInt, GaussianRational, LatticePoint, NormOrderedLattice};
use crate::mobius::{dist_sq_to_closed_box, max_dist_sq_to_closed_box, MobiusMatrix};

pub use checks::{
    ball_inclusion_check, contraction_tail_check, cylinder_identity_check, decay_grid_check,
    nesting_check, verify_separation, BallInclusion,
};
pub use distortion::{
    distortion_estimate, monte_carlo_diameter, single_branch_distortion_sup,
    uniform_distortion_bound, uniform_distortion_bound_min_modulus, word_diameter_bounds,
    DiameterBounds, DistortionEstimate,
};

/// `√2/2`, the circumradius of the unit box about 0.
pub const HALF_DIAGONAL: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// The map `φ_{k,ℓ}(z) = 1/(z + k + ℓi)` for `(k, ℓ) ∈ D₂`. Serializes as `[k, ℓ]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MobiusBranch {
    pub k: i64,
    pub l: i64,
}

impl MobiusBranch {
    pub fn new(k: i64, l: i64) -> Result<Self> {
        if k * k + l * l < 8 {
            return Err(Error::Domain(format!(
                "branch ({k},{l}) has norm < 8 and is not in D2"
            )));
        }
        Ok(MobiusBranch { k, l })
    }

    pub fn norm_sq(&self) -> u64 {
        (self.k * self.k + self.l * self.l) as u64
    }

    pub fn modulus(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn lattice(&self) -> LatticePoint {
        LatticePoint::new(self.k, self.l)
    }

    pub fn gaussian(&self) -> GaussianInt {
        GaussianInt::new(self.k, self.l)
    }

    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.k as f64, self.l as f64)
    }

    pub fn matrix(&self) -> MobiusMatrix {
        MobiusMatrix::digit(&self.gaussian())
    }

    pub fn apply_exact(&self, z: &GaussianRational) -> Result<GaussianRational> {
        self.matrix().apply_exact(z)
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (z + self.complex()).inv()
    }

    pub fn derivative_modulus_exact(&self, z: &GaussianRational) -> Result<BigRational> {
        self.matrix().derivative_modulus_exact(z)
    }

    pub fn derivative_modulus(&self, z: Complex64) -> f64 {
        1.0 / (z + self.complex()).norm_sqr()
    }

    /// `max |Dφ|` over the closed unit box, attained at the box point nearest `-(k + ℓi)`.
    pub fn sup_derivative_exact(&self) -> BigRational {
        dist_sq_to_closed_box(&GaussianRational::from(&-self.gaussian())).recip()
    }

    /// `max |Dφ| / min |Dφ|` over the closed unit box.
    pub fn distortion_exact(&self) -> BigRational {
        let p = GaussianRational::from(&-self.gaussian());
        max_dist_sq_to_closed_box(&p) / dist_sq_to_closed_box(&p)
    }
}

impl fmt::Display for MobiusBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

impl Serialize for MobiusBranch {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.k, self.l].serialize(s)
    }
}

impl<'de> Deserialize<'de> for MobiusBranch {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [k, l] = <[i64; 2]>::deserialize(d)?;
        MobiusBranch::new(k, l).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<LatticePoint> for MobiusBranch {
    type Error = Error;
    fn try_from(p: LatticePoint) -> Result<Self> {
        MobiusBranch::new(p.re, p.im)
    }
}

/// All branches with `8 ≤ k² + ℓ² ≤ max_norm_sq`, in norm order.
pub fn branches_up_to(max_norm_sq: u64) -> Vec<MobiusBranch> {
    NormOrderedLattice::starting_at(8)
        .take_while(|p| p.norm_sq() <= max_norm_sq)
        .map(|p| MobiusBranch { k: p.re, l: p.im })
        .collect()
}

/// `φ_{w₁} ∘ ⋯ ∘ φ_{wₙ}` together with its word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchComposition {
    pub matrix: MobiusMatrix,
    pub word: DigitWord,
}

impl BranchComposition {
    pub fn identity() -> Self {
        BranchComposition {
            matrix: MobiusMatrix::identity(),
            word: DigitWord::default(),
        }
    }

    pub fn from_branches(branches: &[MobiusBranch]) -> Self {
        let word = DigitWord::new(
            branches
                .iter()
                .map(|b| HurwitzDigit::new(b.gaussian()).expect("D2 branches are digits"))
                .collect(),
        );
        BranchComposition {
            matrix: word.continuant(),
            word,
        }
    }

    /// Every digit of the word must lie in `D₂`.
    pub fn from_word(word: DigitWord) -> Result<Self> {
        for d in word.iter() {
            let p = d
                .value()
                .to_lattice()
                .ok_or_else(|| Error::Domain(format!("digit {d} is out of range")))?;
            MobiusBranch::try_from(p)?;
        }
        Ok(BranchComposition {
            matrix: word.continuant(),
            word,
        })
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self> {
        BranchComposition::from_word(DigitWord::from_pairs(pairs)?)
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn apply_exact(&self, z: &GaussianRational) -> Result<GaussianRational> {
        self.matrix.apply_exact(z)
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.matrix.apply(z)
    }

    pub fn derivative_modulus_exact(&self, z: &GaussianRational) -> Result<BigRational> {
        self.matrix.derivative_modulus_exact(z)
    }

    pub fn derivative_modulus(&self, z: Complex64) -> f64 {
        self.matrix.derivative_modulus(z)
    }

    /// `(min, max)` of `|cz + d|²` over the closed unit box, exactly.
    fn denominator_range_exact(&self) -> Result<(BigRational, BigRational)> {
        let m = &self.matrix;
        match m.pole() {
            None => {
                let v = BigRational::from_integer(m.d.norm_sq());
                Ok((v.clone(), v))
            }
            Some(p) => {
                let c2 = BigRational::from_integer(m.c.norm_sq());
                let lo = dist_sq_to_closed_box(&p) * &c2;
                if lo.is_zero() {
                    return Err(Error::Domain(format!("pole {p} lies in the closed box")));
                }
                Ok((lo, max_dist_sq_to_closed_box(&p) * c2))
            }
        }
    }

    /// `‖Dφ_w‖` on the closed unit box.
    pub fn sup_derivative_exact(&self) -> Result<BigRational> {
        Ok(self.denominator_range_exact()?.0.recip())
    }

    pub fn inf_derivative_exact(&self) -> Result<BigRational> {
        Ok(self.denominator_range_exact()?.1.recip())
    }

    /// `sup |Dφ_w| / inf |Dφ_w|` over the closed unit box.
    pub fn distortion_exact(&self) -> Result<BigRational> {
        let (lo, hi) = self.denominator_range_exact()?;
        Ok(hi / lo)
    }

    pub fn box_bounds(&self) -> WordBounds {
        let (_, _, c, d) = self.matrix.to_complex();
        WordBounds::from_cd(c, d)
    }
}

/// Derivative extrema of one composition over the closed unit box, in floating point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WordBounds {
    pub sup: f64,
    pub inf: f64,
    /// `|Dφ_w(0)|`.
    pub at_zero: f64,
}

impl WordBounds {
    /// From the bottom row `(c, d)` of a unimodular matrix.
    pub fn from_cd(c: Complex64, d: Complex64) -> Self {
        let at_zero = 1.0 / d.norm_sqr();
        let c2 = c.norm_sqr();
        if c2 == 0.0 {
            return WordBounds {
                sup: at_zero,
                inf: at_zero,
                at_zero,
            };
        }
        let p = -d / c;
        WordBounds {
            sup: 1.0 / (c2 * box_dist_sq(p)),
            inf: 1.0 / (c2 * box_max_dist_sq(p)),
            at_zero,
        }
    }

    pub fn distortion(&self) -> f64 {
        self.sup / self.inf
    }
}

pub(crate) fn box_dist_sq(p: Complex64) -> f64 {
    let gx = (p.re.abs() - 0.5).max(0.0);
    let gy = (p.im.abs() - 0.5).max(0.0);
    gx * gx + gy * gy
}

pub(crate) fn box_max_dist_sq(p: Complex64) -> f64 {
    let fx = p.re.abs() + 0.5;
    let fy = p.im.abs() + 0.5;
    fx * fx + fy * fy
}

/// Structural constants of the system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IfsMetadata {
    /// Every single branch satisfies `sup |Dφ| ≤ γ`.
    pub contraction_gamma: f64,
    pub contraction_m: u32,
    /// Padding of the extended domain `U(r₀)`.
    pub domain_pad_r0: f64,
    /// Base point `ζ` with `B_δ(ζ)` inside the closed box.
    pub base_point_zeta: (f64, f64),
    pub inner_radius_delta: f64,
}

impl IfsMetadata {
    pub fn standard() -> Self {
        IfsMetadata {
            contraction_gamma: 2.0 / 3.0,
            contraction_m: 1,
            domain_pad_r0: 0.25,
            base_point_zeta: (0.0, 0.0),
            inner_radius_delta: 0.5,
        }
    }

    pub fn r0_exact() -> BigRational {
        BigRational::new(1.into(), 4.into())
    }

    pub fn delta_exact() -> BigRational {
        BigRational::new(1.into(), 2.into())
    }
}

/// `C₁/|i|² ≤ |Dφ_i(z)| ≤ C₂/|i|²` on the closed box for every `i ∈ D₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecayConstants {
    pub c1: BigRational,
    pub c2: BigRational,
}

impl DecayConstants {
    pub fn c1_f64(&self) -> f64 {
        ratio_to_f64(&self.c1)
    }
    pub fn c2_f64(&self) -> f64 {
        ratio_to_f64(&self.c2)
    }
}

/// For `|i| ≥ √8` and `|z| ≤ √2/2`, `|z + i| / |i| ∈ [1 - 1/4, 1 + 1/4]`, so
/// `|i|²|Dφ_i(z)| ∈ [(4/5)², (4/3)²]`.
pub fn two_decaying_constants() -> DecayConstants {
    DecayConstants {
        c1: BigRational::new(16.into(), 25.into()),
        c2: BigRational::new(16.into(), 9.into()),
    }
}

/// Largest single-branch derivative over the closed box and all of `D₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionBound {
    pub sup: BigRational,
    pub maximizers: Vec<MobiusBranch>,
    /// Branches with norm up to this value were evaluated exactly.
    pub exact_norm_limit: u64,
    /// Bound on `sup |Dφ_i|` for every branch beyond `exact_norm_limit`.
    pub tail_bound: BigRational,
}

impl ContractionBound {
    pub fn sup_f64(&self) -> f64 {
        ratio_to_f64(&self.sup)
    }
}

/// Exact corner analysis for norms up to 64, plus the bound
/// `sup |Dφ_i| ≤ 1/(|i| - √2/2)² ≤ 1/(8 - 3/4)²` for `|i|² > 64`.
pub fn contraction_bound() -> ContractionBound {
    const LIMIT: u64 = 64;
    let mut best = BigRational::zero();
    let mut maximizers = Vec::new();
    for b in branches_up_to(LIMIT) {
        let s = b.sup_derivative_exact();
        if s > best {
            best = s.clone();
            maximizers.clear();
        }
        if s == best {
            maximizers.push(b);
        }
    }
    let tail_bound = BigRational::new(16.into(), 841.into());
    debug_assert!(tail_bound < best);
    ContractionBound {
        sup: best,
        maximizers,
        exact_norm_limit: LIMIT,
        tail_bound,
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Very large numerators: divide after scaling both parts down.
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900);
        let n: BigInt = r.numer() >> shift;
        let d: BigInt = r.denom() >> shift;
        n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
    })
}
