//! Norm cutoff for the upper dimension bound:
//! the least `N` with `(K₀K₂C₂/K₁)^{(τ+ε)/2} Σ_{i∈S, |i|≥N} |i|^{-(τ+ε)} ≤ 1`.
//!
//! The tail sum is enumerated exactly for `|i| < 512` and bounded by integrals
//! beyond. Write `M(r) = #{R ≤ |i| ≤ r}`, `h = √2/2` and `a = τ + ε > 2`. The
//! unit squares centred at lattice points tile the plane, so
//! `π(r-h)² - π(R+h)² ≤ M(r) ≤ π(r+h)² - π(R-h)²`. Summation by parts then gives
//!
//! ```text
//! Σ_{|i|≥R} |i|^{-a} ≤ 2π [R^{2-a}/(a-2) + h(2a-1) R^{1-a}/(a-1)]
//! Σ_{|i|≥R} |i|^{-a} ≥ 2π [L^{2-a}/(a-2) - h L^{1-a}/(a-1)],   L = R + 2h.
//! ```
//!
//! The upper bound holds for every subset of `ℤ[i]`. The lower bound only holds
//! when `S` contains every lattice point beyond some norm.

use serde::Serialize;

use crate::dimension::DigitSet;
use crate::error::{Error, Result};
use crate::ifs::{two_decaying_constants, uniform_distortion_bound_min_modulus, HALF_DIAGONAL};

/// Moduli below this are summed exactly.
pub const ENUMERATION_RADIUS: u64 = 512;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdConstants {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub c2: f64,
}

impl ThresholdConstants {
    /// Constants for alphabets in `D₂`: `K₀` is the uniform distortion bound for
    /// letters of modulus `≥ √8`, `K₁ = 2δ/(3K₀)` with `δ = 1/2`, `K₂ = √2·K₀`,
    /// and `C₂ = 16/9`.
    pub fn standard() -> Self {
        let k0 = uniform_distortion_bound_min_modulus(8f64.sqrt()).expect("√8 > 2");
        ThresholdConstants {
            k0,
            k1: 1.0 / (3.0 * k0),
            k2: std::f64::consts::SQRT_2 * k0,
            c2: two_decaying_constants().c2_f64(),
        }
    }

    /// `K₀K₂C₂/K₁`.
    pub fn base(&self) -> f64 {
        self.k0 * self.k2 * self.c2 / self.k1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdResult {
    /// The cutoff `N` (a modulus).
    pub n: u64,
    /// `(K₀K₂C₂/K₁)^{(τ+ε)/2}`.
    pub factor: f64,
    /// Upper evaluation of the inequality's left side at `N` (≤ 1).
    pub value_at_n: f64,
    /// Upper evaluation at `N - 1` (> 1), if `N` is above the search start.
    pub value_before: Option<f64>,
    /// Lower evaluation at `N - 1`, when a two-sided tail bound exists.
    pub value_before_lower: Option<f64>,
    /// True when the tail was summed exactly (no integral bound used).
    pub exact: bool,
}

/// `2π [R^{2-a}/(a-2) + h(2a-1) R^{1-a}/(a-1)]`.
pub fn lattice_tail_upper(r: f64, a: f64) -> f64 {
    let h = HALF_DIAGONAL;
    2.0 * std::f64::consts::PI
        * (r.powf(2.0 - a) / (a - 2.0) + h * (2.0 * a - 1.0) * r.powf(1.0 - a) / (a - 1.0))
}

/// `2π [L^{2-a}/(a-2) - h L^{1-a}/(a-1)]` with `L = R + 2h`, floored at 0.
pub fn lattice_tail_lower(r: f64, a: f64) -> f64 {
    let h = HALF_DIAGONAL;
    let l = r + 2.0 * h;
    (2.0 * std::f64::consts::PI * (l.powf(2.0 - a) / (a - 2.0) - h * l.powf(1.0 - a) / (a - 1.0)))
        .max(0.0)
}

/// Tail sums `Σ_{i∈S, |i|≥N} |i|^{-a}`, two-sided where possible.
struct Tail {
    a: f64,
    /// Distinct enumerated norms, ascending, with suffix sums of the weights.
    norms: Vec<u64>,
    suffix: Vec<f64>,
    /// Set has members beyond the enumeration radius.
    infinite: bool,
    full_tail: bool,
}

impl Tail {
    fn new(s: &DigitSet, a: f64) -> Result<Self> {
        let infinite = !s.is_finite();
        let limit = ENUMERATION_RADIUS * ENUMERATION_RADIUS;
        let members: Vec<u64> = if infinite {
            s.iter().map(|p| p.norm_sq()).take_while(|&n| n < limit).collect()
        } else {
            s.members()?.into_iter().map(|p| p.norm_sq()).collect()
        };
        if members.contains(&0) {
            return Err(Error::Domain("0 in S: |0|^{-a} is undefined".into()));
        }
        let mut norms: Vec<u64> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for n in members {
            let w = (n as f64).powf(-a / 2.0);
            if norms.last() == Some(&n) {
                *weights.last_mut().expect("nonempty") += w;
            } else {
                norms.push(n);
                weights.push(w);
            }
        }
        let mut suffix = vec![0.0; weights.len() + 1];
        for k in (0..weights.len()).rev() {
            suffix[k] = suffix[k + 1] + weights[k];
        }
        Ok(Tail {
            a,
            norms,
            suffix,
            infinite,
            full_tail: s.full_tail_from().is_some_and(|m| m <= limit),
        })
    }

    fn enumerated(&self, n: u64) -> f64 {
        let k = self.norms.partition_point(|&v| v < n.saturating_mul(n));
        self.suffix[k]
    }

    fn upper(&self, n: u64) -> f64 {
        if !self.infinite {
            return self.enumerated(n);
        }
        if n >= ENUMERATION_RADIUS {
            lattice_tail_upper(n as f64, self.a)
        } else {
            self.enumerated(n) + lattice_tail_upper(ENUMERATION_RADIUS as f64, self.a)
        }
    }

    fn lower(&self, n: u64) -> Option<f64> {
        if !self.infinite {
            return Some(self.enumerated(n));
        }
        if !self.full_tail {
            return None;
        }
        Some(if n >= ENUMERATION_RADIUS {
            lattice_tail_lower(n as f64, self.a)
        } else {
            self.enumerated(n) + lattice_tail_lower(ENUMERATION_RADIUS as f64, self.a)
        })
    }
}

/// Least integer cutoff `N ≥ ⌊min|S|⌋` at which the upper evaluation of the
/// inequality is `≤ 1`.
pub fn upper_threshold(
    s: &DigitSet,
    tau: f64,
    eps: f64,
    constants: &ThresholdConstants,
) -> Result<ThresholdResult> {
    if !(eps > 0.0) {
        return Err(Error::NonConvergent(format!("ε = {eps} must be positive")));
    }
    let a = tau + eps;
    if !s.is_finite() && !(a > 2.0) {
        return Err(Error::NonConvergent(format!(
            "τ + ε = {a} <= 2: the tail sum over an infinite lattice set cannot be bounded"
        )));
    }
    let base = constants.base();
    if !(base > 0.0) || !base.is_finite() {
        return Err(Error::InvalidArgument(format!("constant ratio {base} must be positive")));
    }
    let min_norm = s
        .min_norm_sq()
        .ok_or_else(|| Error::InvalidArgument("S is empty".into()))?;
    let log_factor = 0.5 * a * base.ln();
    let tail = Tail::new(s, a)?;
    let value = |n: u64| (log_factor + tail.upper(n).ln()).exp();
    let start = (min_norm as f64).sqrt().floor() as u64;
    let ok = |n: u64| value(n) <= 1.0;

    let n = if ok(start) {
        start
    } else {
        let mut lo = start;
        let mut hi = start.max(1);
        while !ok(hi) {
            lo = hi;
            hi = hi.checked_mul(2).filter(|&h| h < 1 << 62).ok_or_else(|| {
                Error::NonConvergent("no cutoff below 2^62 satisfies the inequality".into())
            })?;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let before = (n > start).then(|| n - 1);
    Ok(ThresholdResult {
        n,
        factor: log_factor.exp(),
        value_at_n: value(n),
        value_before: before.map(value),
        value_before_lower: before
            .and_then(|b| tail.lower(b))
            .map(|t| (log_factor + t.ln()).exp()),
        exact: !tail.infinite,
    })
}
