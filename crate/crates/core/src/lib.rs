//! Hurwitz complex continued fractions, the conformal iterated function system
//! generated by their inverse branches, and numerical dimension estimates for
//! sets of points with restricted digits.
//!
//! Module map:
//!
//! * [`gaussian`]: exact arithmetic in `ℤ[i]` and ℚ(i), nearest-integer rounding,
//!   norm-ordered lattice enumeration.
//! * [`expansion`]: the Hurwitz map, digit expansion and evaluation, digit classes.
//! * [`ifs`]: the branches `φ_{k,ℓ}(z) = 1/(z + k + ℓi)` on the closed unit box,
//!   their compositions, derivative and distortion bounds, and sampled checks.
//! * [`dimension`]: partition functions, pressure and Bowen dimension, convergence
//!   exponents, covering thresholds and non-autonomous block schedules.
//! * [`report`]: run configuration, SVG tessellation and the verification suites
//!   behind the `hurwitz` binary.
//! * [`mobius`]: 2×2 Gaussian-integer matrices acting as Möbius maps.
//! * [`check`]: named pass/fail reports with witnesses.
//! * [`sampling`]: seeded random streams and sample generators.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod dimension;
pub mod error;
pub mod expansion;
pub mod gaussian;
pub mod ifs;
pub mod mobius;
pub mod report;
pub mod sampling;

pub use error::{Error, Result};
