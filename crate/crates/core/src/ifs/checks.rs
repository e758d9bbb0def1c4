//! Sampled and exact verifications of the IFS axioms: open set condition,
//! nesting, cylinder identity, decay constants and ball inclusion.

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{branches_up_to, contraction_bound, BranchComposition, MobiusBranch, HALF_DIAGONAL};
use crate::check::CheckReport;
use crate::error::{Error, Result};
use crate::expansion::{expand, expand_approx, ApproxStatus};
use crate::gaussian::{GaussianRational, LatticePoint};
use crate::sampling;

/// Samples `samples` exact points of `U`, spread evenly over `branches`, maps each
/// through its branch and confirms (a) the first Hurwitz digit of the image is
/// the branch index and (b) no other listed branch claims the image.
pub fn verify_separation(branches: &[MobiusBranch], samples: usize, seed: u64) -> Result<CheckReport> {
    const NAME: &str = "separation";
    if branches.is_empty() {
        return Err(Error::InvalidArgument("branch list is empty".into()));
    }
    let per_branch = samples.div_ceil(branches.len());
    let outcomes: Vec<Result<(), String>> = branches
        .par_iter()
        .enumerate()
        .map(|(bi, b)| {
            let mut rng = sampling::substream(seed, bi as u64);
            for _ in 0..per_branch {
                let u = sampling::random_rational_in_box(&mut rng, 10_000);
                let w = b.apply_exact(&u).map_err(|e| e.to_string())?;
                let first = expand(&w, 1).map_err(|e| e.to_string())?;
                let got = first.digits.to_lattice().and_then(|v| v.first().copied());
                if got != Some(b.lattice()) {
                    return Err(format!("image {w} of {u} under {b} has first digit {got:?}"));
                }
                let inv = w.recip().map_err(|e| e.to_string())?;
                for other in branches.iter().filter(|o| *o != b) {
                    let back = &inv - &GaussianRational::from(&other.gaussian());
                    if back.in_unit_box() {
                        return Err(format!("point {w} lies in the images of {b} and {other}"));
                    }
                }
            }
            Ok(())
        })
        .collect();
    Ok(CheckReport::from_outcome(
        NAME,
        outcomes.into_iter().collect::<Result<(), String>>(),
    ))
}

fn edge_points(n: i64, half_width: &BigRational) -> Vec<GaussianRational> {
    let mut pts = Vec::new();
    let w = half_width.clone();
    for j in 0..=n {
        let t = -&w + &w * BigRational::new((2 * j).into(), n.into());
        pts.push(GaussianRational::new(t.clone(), -&w));
        pts.push(GaussianRational::new(t.clone(), w.clone()));
        pts.push(GaussianRational::new(-&w, t.clone()));
        pts.push(GaussianRational::new(w.clone(), t));
    }
    pts
}

fn in_closed_square(z: &GaussianRational, half: &BigRational) -> bool {
    use num_traits::Signed;
    z.re.abs() <= *half && z.im.abs() <= *half
}

fn in_open_square(z: &GaussianRational, half: &BigRational) -> bool {
    use num_traits::Signed;
    z.re.abs() < *half && z.im.abs() < *half
}

/// Exact boundary-sample checks, for every branch with norm at most 64:
/// `φ_{k,ℓ}(Ū) ⊂ Ū`, and `φ̃_{k,ℓ}(U(r)) ⊂ U(r)` for `r = r₀ = 1/4` and
/// `r = r₀/2`, where `U(r)` is the open box of half-width `1/2 + r`. Larger
/// branches map `U(r₀)` into the disc of radius `1/(8 - 3√2/4) < 1/6`.
pub fn nesting_check(edge_samples: i64) -> CheckReport {
    const NAME: &str = "nesting";
    let half = BigRational::new(1.into(), 2.into());
    let pads = [
        BigRational::new(3.into(), 4.into()),
        BigRational::new(5.into(), 8.into()),
    ];
    let closed_pts = edge_points(edge_samples, &half);
    let padded: Vec<_> = pads.iter().map(|p| (p.clone(), edge_points(edge_samples, p))).collect();
    let outcome = branches_up_to(64).par_iter().try_for_each(|b| -> Result<(), String> {
        for z in &closed_pts {
            let w = b.apply_exact(z).map_err(|e| e.to_string())?;
            if !in_closed_square(&w, &half) {
                return Err(format!("{b} maps box point {z} to {w}"));
            }
        }
        for (hw, pts) in &padded {
            for z in pts {
                let w = b.apply_exact(z).map_err(|e| e.to_string())?;
                if !in_open_square(&w, hw) {
                    return Err(format!("{b} maps {z} outside the padded box of half-width {hw}"));
                }
            }
        }
        Ok(())
    });
    CheckReport::from_outcome(NAME, outcome)
}

/// Exact grid check of `C₁ ≤ |i|²|Dφ_i(z)| ≤ C₂` for every branch with norm at
/// most `max_norm_sq` and `grid × grid` points of the closed box. With
/// `z = (x + yi)/D` on the grid, the test is `16·X ≤ 25·N·D²` and
/// `9·N·D² ≤ 16·X` where `X = |Dz + D·i|²`, all in `i128`.
pub fn decay_grid_check(max_norm_sq: u64, grid: usize) -> CheckReport {
    const NAME: &str = "decay_constants";
    let g = grid.max(2) as i128;
    let den = 2 * (g - 1);
    let outcome = branches_up_to(max_norm_sq).par_iter().try_for_each(|b| -> Result<(), String> {
        let n = b.norm_sq() as i128;
        for a in 0..g {
            for c in 0..g {
                let x = 2 * a - (g - 1) + den * b.k as i128;
                let y = 2 * c - (g - 1) + den * b.l as i128;
                let big_x = x * x + y * y;
                let nd2 = n * den * den;
                if 16 * big_x > 25 * nd2 || 9 * nd2 > 16 * big_x {
                    return Err(format!(
                        "branch {b} at z = ({}, {})/{den}",
                        2 * a - (g - 1),
                        2 * c - (g - 1)
                    ));
                }
            }
        }
        Ok(())
    });
    CheckReport::from_outcome(NAME, outcome)
}

/// The single-branch supremum `sup_Ū |Dφ_i|` never exceeds the envelope
/// `1/(|i| - √2/2)²`, which is decreasing in `|i|` and already below `2/9` at
/// `|i|² = 9`; so the global supremum is attained on the norm-8 shell. Checked
/// for norms up to `max_norm_sq`, together with the exact value `2/9`.
pub fn contraction_tail_check(max_norm_sq: u64) -> CheckReport {
    const NAME: &str = "contraction_tail";
    let bound = contraction_bound();
    let envelope = |n: u64| 1.0 / ((n as f64).sqrt() - HALF_DIAGONAL).powi(2);
    let two_ninths = 2.0 / 9.0;
    let mut outcome = Ok(());
    if bound.sup != BigRational::new(2.into(), 9.into()) {
        outcome = Err(format!("exact supremum is {} instead of 2/9", bound.sup));
    } else if envelope(9) >= two_ninths {
        outcome = Err("envelope at norm 9 is not below 2/9".into());
    } else {
        let mut last = f64::INFINITY;
        for b in branches_up_to(max_norm_sq) {
            let s = super::ratio_to_f64(&b.sup_derivative_exact());
            let e = envelope(b.norm_sq());
            if s > e * (1.0 + 1e-12) {
                outcome = Err(format!("branch {b}: sup {s} exceeds envelope {e}"));
                break;
            }
            if e > last {
                outcome = Err(format!("envelope increases at {b}"));
                break;
            }
            last = e;
            if b.norm_sq() > 8 && s >= two_ninths {
                outcome = Err(format!("branch {b} of norm > 8 reaches 2/9"));
                break;
            }
        }
    }
    CheckReport::from_outcome(NAME, outcome)
}

/// For every word of length `1..=max_len` over branches with norm at most
/// `max_norm_sq`, and `points_per_word` seeded points `u ∈ U`, the expansion of
/// `φ_w(u)` starts with `w`. Digits come from the error-guarded floating
/// expansion; any point where the guard stops early is redone exactly.
pub fn cylinder_identity_check(
    max_norm_sq: u64,
    max_len: usize,
    points_per_word: usize,
    seed: u64,
) -> CheckReport {
    const NAME: &str = "cylinder_identity";
    let alphabet = branches_up_to(max_norm_sq);
    let mut words: Vec<Vec<MobiusBranch>> = vec![vec![]];
    let mut all = Vec::new();
    for _ in 0..max_len {
        words = words
            .iter()
            .flat_map(|w| {
                alphabet.iter().map(move |b| {
                    let mut v = w.clone();
                    v.push(*b);
                    v
                })
            })
            .collect();
        all.extend(words.iter().cloned());
    }
    let outcome = all.par_iter().enumerate().try_for_each(|(wi, w)| -> Result<(), String> {
        let comp = BranchComposition::from_branches(w);
        let want: Vec<LatticePoint> = w.iter().map(MobiusBranch::lattice).collect();
        let mut rng = sampling::substream(seed, wi as u64);
        for _ in 0..points_per_word {
            let u = sampling::random_point_in_box(&mut rng);
            let z = comp.apply(u);
            let fast = expand_approx(z, 1e-13, w.len());
            let digits = match fast {
                Ok(e) if e.digits.len() == w.len() || e.status == ApproxStatus::Terminated => e.digits,
                _ => {
                    let ue = GaussianRational::from_complex(u).ok_or("non-finite sample")?;
                    let ze = comp.apply_exact(&ue).map_err(|e| e.to_string())?;
                    let e = expand(&ze, w.len()).map_err(|e| e.to_string())?;
                    e.digits.to_lattice().ok_or("digit overflow")?
                }
            };
            if digits != want {
                return Err(format!("u = {u}: word {want:?} gives digits {digits:?}"));
            }
        }
        Ok(())
    });
    CheckReport::from_outcome(NAME, outcome)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallInclusion {
    /// `δ|Dφ_w(z)|/(3K)`.
    pub radius: f64,
    pub passed: bool,
    pub witness: Option<String>,
}

/// Samples the circle of radius `δ|Dφ_w(z)|/(3K)` about `φ_w(z)` and confirms that
/// the inverse map sends every sample into `B_δ(z)`.
pub fn ball_inclusion_check(
    w: &BranchComposition,
    z: Complex64,
    delta: f64,
    k: f64,
    samples: usize,
) -> Result<BallInclusion> {
    if !(delta >= 0.0) || !(k >= 1.0) {
        return Err(Error::InvalidArgument(format!("need delta >= 0 and K >= 1, got {delta}, {k}")));
    }
    if let Some(p) = w.matrix.pole() {
        if (p.to_complex() - z).norm() <= delta {
            return Err(Error::Domain(format!("pole {p} lies in the ball B_{delta}({z})")));
        }
    }
    let radius = delta * w.derivative_modulus(z) / (3.0 * k);
    let centre = w.apply(z);
    let inv = w.matrix.adjugate();
    for j in 0..samples {
        if radius == 0.0 {
            break;
        }
        let theta = std::f64::consts::TAU * j as f64 / samples as f64;
        let y = centre + Complex64::from_polar(radius, theta);
        let x = inv.apply(y);
        if (x - z).norm() >= delta {
            return Ok(BallInclusion {
                radius,
                passed: false,
                witness: Some(format!("boundary sample {y} pulls back to {x}")),
            });
        }
    }
    Ok(BallInclusion {
        radius,
        passed: true,
        witness: None,
    })
}
