//! Finite-horizon estimates of the convergence exponent
//! `τ = limsup log n / log x_n` of a nondecreasing sequence `x_n → ∞`.
//!
//! The bare ratio `log n / log x_n` converges slowly. For the lattice moduli
//! `x_n ≈ √(n/π)` it is still about `2/(1 - log π / log n) ≈ 2.18` at
//! `n = 10⁶`. Constant factors cancel in the anchored ratio
//! `log(n/n₀) / log(x_n/x_{n₀})`, with `n₀ = horizon/100`. The estimate is its
//! maximum over the last decade `[horizon/10, horizon]`. The bare ratio and the
//! full trajectory are reported next to it.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::lattice_by_norm;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauPoint {
    pub n: usize,
    pub x_n: f64,
    /// `log n / log x_n`, when `x_n > 1`.
    pub ratio: Option<f64>,
    /// `log(n/n₀) / log(x_n/x_{n₀})`, inside the window when `x_n > x_{n₀}`.
    pub anchored: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauEstimate {
    /// Max of the anchored ratio over the window.
    pub estimate: f64,
    /// Max of `log n / log x_n` over the window.
    pub raw_estimate: f64,
    pub horizon: usize,
    pub anchor: usize,
    pub window: (usize, usize),
    /// Index where the anchored maximum is attained.
    pub argmax: usize,
    /// Log-spaced samples over `[1, horizon]`.
    pub trajectory: Vec<TauPoint>,
}

/// Estimates `τ` from the first `horizon` terms of `norms` (`x_1, x_2, …`).
pub fn tau_exponent(norms: impl IntoIterator<Item = f64>, horizon: usize) -> Result<TauEstimate> {
    if horizon < 1000 {
        return Err(Error::InvalidArgument(format!("horizon {horizon} < 1000")));
    }
    let x: Vec<f64> = norms.into_iter().take(horizon).collect();
    if x.len() < horizon {
        return Err(Error::InvalidArgument(format!(
            "sequence ended after {} terms, before the horizon {horizon}",
            x.len()
        )));
    }
    if let Some(i) = x.windows(2).position(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidArgument(format!(
            "sequence is not nondecreasing at n = {}",
            i + 2
        )));
    }
    if x[horizon - 1] <= 1.0 {
        return Err(Error::Domain(format!(
            "all norms are <= 1 up to n = {horizon}; log x_n is degenerate"
        )));
    }
    let anchor = horizon / 100;
    let x0 = x[anchor - 1];
    if !(x0 > 0.0) {
        return Err(Error::Domain(format!("x_{anchor} = {x0} is not positive")));
    }
    let window = (horizon / 10, horizon);
    let ratio = |n: usize| {
        let xn = x[n - 1];
        (xn > 1.0).then(|| (n as f64).ln() / xn.ln())
    };
    let anchored = |n: usize| {
        let xn = x[n - 1];
        (n >= window.0 && xn > x0).then(|| (n as f64 / anchor as f64).ln() / (xn / x0).ln())
    };
    let mut estimate = f64::NEG_INFINITY;
    let mut argmax = 0;
    let mut raw_estimate = f64::NEG_INFINITY;
    for n in window.0..=window.1 {
        if let Some(a) = anchored(n) {
            if a > estimate {
                estimate = a;
                argmax = n;
            }
        }
        if let Some(r) = ratio(n) {
            raw_estimate = raw_estimate.max(r);
        }
    }
    if argmax == 0 {
        return Err(Error::Domain(format!(
            "x_n never exceeds x_{anchor} = {x0} in the window; the sequence does not grow"
        )));
    }
    let mut samples: Vec<usize> = (0..)
        .map(|k| 10f64.powf(k as f64 / 50.0).round() as usize)
        .take_while(|&n| n <= horizon)
        .chain([anchor, window.0, argmax, horizon])
        .collect();
    samples.sort_unstable();
    samples.dedup();
    let trajectory = samples
        .into_iter()
        .map(|n| TauPoint {
            n,
            x_n: x[n - 1],
            ratio: ratio(n),
            anchored: anchored(n),
        })
        .collect();
    Ok(TauEstimate {
        estimate,
        raw_estimate,
        horizon,
        anchor,
        window,
        argmax,
        trajectory,
    })
}

/// `|i|` for the first `horizon` Gaussian integers in norm order.
pub fn lattice_moduli(include_zero: bool, horizon: usize) -> Vec<f64> {
    lattice_by_norm(include_zero, horizon)
        .into_iter()
        .map(|p| p.modulus())
        .collect()
}

/// Trajectory as CSV with header `n,x_n,ratio,anchored` (empty cells when undefined).
pub fn tau_trajectory_csv(est: &TauEstimate) -> String {
    let cell = |v: Option<f64>| v.map(|v| format!("{v}")).unwrap_or_default();
    let mut out = String::from("n,x_n,ratio,anchored\n");
    for p in &est.trajectory {
        let _ = writeln!(out, "{},{},{},{}", p.n, p.x_n, cell(p.ratio), cell(p.anchored));
    }
    out
}
