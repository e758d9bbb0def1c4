//! Distortion constants and cylinder diameters.
//!
//! Two kinds of distortion bound are provided. [`distortion_estimate`] samples
//! word compositions on a grid and is a lower estimate of the true constant.
//! [`uniform_distortion_bound`] is rigorous for words of every length. The pole
//! of `φ_{c₁⋯cₙ}` satisfies `pₙ = 1/pₙ₋₁ - cₙ` with `p₁ = -c₁`. If every letter
//! has modulus at least `m > 2`, the disc `|p| ≥ ρ` with `ρ = (m + √(m² - 4))/2`
//! is invariant. So `pₙ` lies within `1/ρ` of `-cₙ`, and `|z - pₙ|` over the
//! box stays in `|cₙ| ∓ (1/ρ + √2/2)`.

use num_complex::Complex64;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{branches_up_to, BranchComposition, MobiusBranch, HALF_DIAGONAL};
use crate::error::{Error, Result};
use crate::sampling;

/// Rigorous bound on `sup |Dφ_w| / inf |Dφ_w|` over the closed box, valid for
/// every nonempty word over `alphabet`.
pub fn uniform_distortion_bound(alphabet: &[MobiusBranch]) -> Result<f64> {
    let m = alphabet
        .iter()
        .map(MobiusBranch::modulus)
        .fold(f64::INFINITY, f64::min);
    if !m.is_finite() {
        return Err(Error::InvalidArgument("empty alphabet".into()));
    }
    uniform_distortion_bound_min_modulus(m)
}

/// [`uniform_distortion_bound`] for any alphabet whose letters all have modulus
/// at least `m`.
pub fn uniform_distortion_bound_min_modulus(m: f64) -> Result<f64> {
    if !(m > 2.0) {
        return Err(Error::Domain(format!("minimum letter modulus {m} must exceed 2")));
    }
    let rho = (m + (m * m - 4.0).sqrt()) / 2.0;
    let a = 1.0 / rho + HALF_DIAGONAL;
    if m <= a {
        return Err(Error::Domain(format!(
            "letters of modulus {m} are too close to the box for a uniform bound"
        )));
    }
    Ok(((m + a) / (m - a)).powi(2))
}

/// Sampled distortion of compositions, reported alongside exact and rigorous values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionEstimate {
    /// Largest grid ratio `|Dφ_w(z₁)| / |Dφ_w(z₂)|` seen over all sampled words.
    /// Not rigorous: the grid may miss the true extremes.
    pub sampled: f64,
    pub max_word_len: usize,
    pub words: u64,
    pub grid_points: usize,
    /// Exact `max_{i ∈ D₂} sup|Dφ_i| / inf|Dφ_i|`.
    pub single_branch_exact: String,
    pub single_branch_exact_f64: f64,
    /// [`uniform_distortion_bound`] for the sampled alphabet.
    pub uniform_bound: f64,
}

/// Exact largest single-branch distortion over all of `D₂`: evaluated for norms
/// up to 64; beyond that `((|i| + √2/2)/(|i| - √2/2))² ≤ (35/29)²`, far below.
pub fn single_branch_distortion_sup() -> BigRational {
    branches_up_to(64)
        .iter()
        .map(MobiusBranch::distortion_exact)
        .max()
        .expect("D2 is nonempty")
}

fn grid(density: usize) -> Vec<Complex64> {
    let g = density.max(2);
    let step = 1.0 / (g - 1) as f64;
    (0..g)
        .flat_map(|i| (0..g).map(move |j| Complex64::new(i as f64 * step - 0.5, j as f64 * step - 0.5)))
        .collect()
}

/// Bottom rows `(c, d)` of every composition of length `1..=max_len`.
fn word_rows(alphabet: &[MobiusBranch], max_len: usize) -> Vec<(Complex64, Complex64)> {
    let mut all = Vec::new();
    let mut layer = vec![(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))];
    for _ in 0..max_len {
        let next: Vec<_> = layer
            .iter()
            .flat_map(|&(c, d)| alphabet.iter().map(move |b| (d, c + d * b.complex())))
            .collect();
        all.extend_from_slice(&next);
        layer = next;
    }
    all
}

/// Maximum over words of length `≤ max_word_len` over `alphabet` (default: all
/// branches with norm at most 10) and over pairs of points of a
/// `grid_density × grid_density` grid (corners included) of the derivative ratio.
pub fn distortion_estimate(
    max_word_len: usize,
    grid_density: usize,
    alphabet: Option<&[MobiusBranch]>,
) -> Result<DistortionEstimate> {
    let default_alphabet;
    let alphabet = match alphabet {
        Some(a) => a,
        None => {
            default_alphabet = branches_up_to(10);
            &default_alphabet
        }
    };
    let uniform_bound = uniform_distortion_bound(alphabet)?;
    let points = grid(grid_density);
    let rows = word_rows(alphabet, max_word_len);
    let sampled = rows
        .par_iter()
        .map(|&(c, d)| {
            let (lo, hi) = points.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &z| {
                let v = (c * z + d).norm_sqr();
                (lo.min(v), hi.max(v))
            });
            hi / lo
        })
        .reduce(|| 1.0, f64::max);
    let exact = single_branch_distortion_sup();
    Ok(DistortionEstimate {
        sampled,
        max_word_len,
        words: rows.len() as u64,
        grid_points: points.len(),
        single_branch_exact_f64: super::ratio_to_f64(&exact),
        single_branch_exact: exact.to_string(),
        uniform_bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterBounds {
    pub lower: f64,
    pub upper: f64,
    /// `|Dφ_w(ζ)|` at `ζ = 0`.
    pub derivative_at_zeta: f64,
    pub k1: f64,
    pub k2: f64,
}

/// `[K₁|Dφ_w(0)|, K₂|Dφ_w(0)|]` with `K₁ = 2δ/(3K₀)`, `K₂ = √2·K₀` and `δ = 1/2`.
pub fn word_diameter_bounds(w: &BranchComposition, k0: f64) -> Result<DiameterBounds> {
    if w.is_empty() {
        return Err(Error::InvalidArgument("diameter bounds need a nonempty word".into()));
    }
    if !(k0 >= 1.0) {
        return Err(Error::InvalidArgument(format!("distortion constant {k0} < 1")));
    }
    let delta = 0.5;
    let k1 = 2.0 * delta / (3.0 * k0);
    let k2 = std::f64::consts::SQRT_2 * k0;
    let d0 = w.derivative_modulus(Complex64::new(0.0, 0.0));
    Ok(DiameterBounds {
        lower: k1 * d0,
        upper: k2 * d0,
        derivative_at_zeta: d0,
        k1,
        k2,
    })
}

/// Largest pairwise distance among images of sampled box points: the four
/// corners, `samples` random points on each edge and `samples` interior points.
pub fn monte_carlo_diameter(w: &BranchComposition, samples: usize, seed: u64) -> f64 {
    let mut rng = sampling::rng(seed);
    let mut pts = vec![
        Complex64::new(-0.5, -0.5),
        Complex64::new(-0.5, 0.5),
        Complex64::new(0.5, -0.5),
        Complex64::new(0.5, 0.5),
    ];
    for _ in 0..samples {
        let t = rng.random::<f64>() - 0.5;
        pts.push(Complex64::new(t, -0.5));
        pts.push(Complex64::new(t, 0.5));
        pts.push(Complex64::new(-0.5, t));
        pts.push(Complex64::new(0.5, t));
        pts.push(sampling::random_point_in_box(&mut rng));
    }
    let img: Vec<Complex64> = pts.iter().map(|&z| w.apply(z)).collect();
    img.par_iter()
        .enumerate()
        .map(|(i, a)| img[i + 1..].iter().map(|b| (a - b).norm()).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_bound_dominates_exact_single_branch_and_pairs() {
        let a = branches_up_to(10);
        let k = uniform_distortion_bound(&a).unwrap();
        assert!(k >= 25.0 / 9.0);
        for b1 in &a {
            for b2 in &a {
                let w = BranchComposition::from_branches(&[*b1, *b2]);
                assert!(w.box_bounds().distortion() <= k);
            }
        }
    }

    #[test]
    fn estimate_examples() {
        let e0 = distortion_estimate(0, 8, None).unwrap();
        assert_eq!(e0.sampled, 1.0);
        let one = [MobiusBranch::new(2, 2).unwrap()];
        let e1 = distortion_estimate(1, 2, Some(&one)).unwrap();
        assert!((e1.sampled - 25.0 / 9.0).abs() < 1e-12);
        let e3 = distortion_estimate(3, 16, None).unwrap();
        assert!(e3.sampled.is_finite() && e3.sampled >= 25.0 / 9.0);
        assert!(e3.sampled <= e3.uniform_bound);
        assert_eq!(e3.single_branch_exact, "25/9");
    }

    #[test]
    fn diameter_examples() {
        let w = BranchComposition::from_pairs(&[(2, 2)]).unwrap();
        let k0 = distortion_estimate(3, 16, None).unwrap().sampled;
        let b = word_diameter_bounds(&w, k0).unwrap();
        assert_eq!(b.derivative_at_zeta, 0.125);
        let mc = monte_carlo_diameter(&w, 500, 1);
        assert!(b.lower <= mc && mc <= b.upper, "{b:?} {mc}");
        assert!(b.lower <= b.upper);
    }
}
