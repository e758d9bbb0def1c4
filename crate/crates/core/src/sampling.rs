//! Seeded samplers. Every randomized routine takes an explicit seed and draws
//! from its own ChaCha8 stream, so results never depend on thread scheduling.

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gaussian::{CommonDenominator, GaussianInt, GaussianRational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`, for parallel work items.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// A Gaussian rational `p/q ∈ U` with `1 ≤ |q|² ≤ max_den_norm`: a random
/// numerator over a random denominator, reduced into `U` by subtracting the
/// nearest Gaussian integer.
pub fn random_rational_in_box<R: Rng>(rng: &mut R, max_den_norm: u64) -> GaussianRational {
    let bound = (max_den_norm as f64).sqrt().floor() as i64;
    let q = loop {
        let q = (rng.random_range(-bound..=bound), rng.random_range(-bound..=bound));
        let n = (q.0 * q.0 + q.1 * q.1) as u64;
        if n >= 1 && n <= max_den_norm {
            break q;
        }
    };
    let span = 4 * bound.max(1);
    let p = GaussianInt::new(rng.random_range(-span..=span), rng.random_range(-span..=span));
    let z = CommonDenominator::from_quotient(&p, &GaussianInt::new(q.0, q.1));
    let (re, im) = (reduce(&z.re, &z.den), reduce(&z.im, &z.den));
    CommonDenominator::new(re, im, z.den).to_rational()
}

/// `v - den·⌊v/den + 1/2⌋`, the representative of `v/den` in `[-1/2, 1/2)`.
fn reduce(v: &BigInt, den: &BigInt) -> BigInt {
    use num_integer::Integer;
    let two = BigInt::from(2);
    let r = (v * &two + den).div_floor(&(den * &two));
    v - r * den
}

/// A uniform point of `[-1/2, 1/2)²`.
pub fn random_point_in_box<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

/// A uniform point of `[-1/2 + m, 1/2 - m]²`, bounded away from the box edges.
pub fn random_point_inside<R: Rng>(rng: &mut R, margin: f64) -> Complex64 {
    let w = 1.0 - 2.0 * margin;
    Complex64::new(
        rng.random::<f64>() * w - 0.5 + margin,
        rng.random::<f64>() * w - 0.5 + margin,
    )
}
