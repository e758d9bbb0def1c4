//! Bundled verification suites. Each returns one [`CheckReport`] per property.

use std::str::FromStr;

use num_rational::BigRational;
use serde::Serialize;

use crate::check::CheckReport;
use crate::dimension::{
    bowen_dimension, build_schedule, partition_sum, subexp_check, validate_schedule,
    verify_lower_bound_chain, DigitSet, GrowthFunction, PartitionOptions, PressureMode,
};
use crate::error::{Error, Result};
use crate::expansion::{classify_digit, evaluate, expand, exceptional_digits, DigitClass, EXCEPTIONAL_DIGITS};
use crate::gaussian::{count_in_square, lattice_by_norm, GaussianInt, LatticePoint};
use crate::ifs::{
    branches_up_to, contraction_bound, contraction_tail_check, cylinder_identity_check,
    decay_grid_check, distortion_estimate, nesting_check, single_branch_distortion_sup,
    two_decaying_constants, verify_separation, MobiusBranch,
};
use crate::report::RunConfig;
use crate::sampling;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Arith,
    Expansion,
    Ifs,
    Pressure,
    Schedule,
    All,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "arith" => Suite::Arith,
            "expansion" => Suite::Expansion,
            "ifs" => Suite::Ifs,
            "pressure" => Suite::Pressure,
            "schedule" => Suite::Schedule,
            "all" => Suite::All,
            _ => return Err(Error::Parse(format!("unknown suite {s:?}"))),
        })
    }
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    match suite {
        Suite::Arith => Ok(arith()),
        Suite::Expansion => Ok(expansion(cfg)),
        Suite::Ifs => ifs(cfg),
        Suite::Pressure => pressure(cfg),
        Suite::Schedule => schedule(cfg),
        Suite::All => {
            let mut out = arith();
            out.extend(expansion(cfg));
            out.extend(ifs(cfg)?);
            out.extend(pressure(cfg)?);
            out.extend(schedule(cfg)?);
            Ok(out)
        }
    }
}

fn check(name: &str, ok: bool, witness: impl FnOnce() -> String) -> CheckReport {
    if ok {
        CheckReport::pass(name)
    } else {
        CheckReport::fail(name, witness())
    }
}

fn arith() -> Vec<CheckReport> {
    let bad_count = (0..=50u64).find(|&n| count_in_square(n) != (2 * n + 1).pow(2));
    let mut ex = exceptional_digits();
    ex.sort();
    let mut listed: Vec<LatticePoint> = EXCEPTIONAL_DIGITS.iter().map(|&(a, b)| LatticePoint::new(a, b)).collect();
    listed.sort();
    let pts = lattice_by_norm(true, 10_000);
    let unsorted = pts.windows(2).position(|w| w[1].norm_sq() < w[0].norm_sq());
    let recip = pts.iter().skip(1).take(2000).find(|p| {
        let g = GaussianInt::from(**p);
        let z = crate::gaussian::GaussianRational::from(&g);
        z.recip().and_then(|r| r.recip()).ok() != Some(z)
    });
    vec![
        check("arith.count_in_square", bad_count.is_none(), || {
            format!("N = {}", bad_count.unwrap_or_default())
        }),
        check("arith.exceptional_set", ex == listed && ex.len() == 16, || format!("{ex:?}")),
        check("arith.norm_order", unsorted.is_none(), || format!("index {unsorted:?}")),
        check("arith.reciprocal_roundtrip", recip.is_none(), || format!("{recip:?}")),
    ]
}

fn expansion(cfg: &RunConfig) -> Vec<CheckReport> {
    let mut rng = sampling::rng(cfg.seed);
    let mut roundtrip = Ok(());
    let mut digits_ok = Ok(());
    for _ in 0..200 {
        let z = sampling::random_rational_in_box(&mut rng, 10_000);
        match expand(&z, cfg.max_digits) {
            Ok(e) if e.terminated => {
                if evaluate(&e.digits).ok().as_ref() != Some(&z) {
                    roundtrip = Err(format!("evaluate(expand({z})) != {z}"));
                }
                if let Some(d) = e.digits.iter().find(|d| classify_digit(d.value()) == DigitClass::Invalid) {
                    digits_ok = Err(format!("digit {d} in the expansion of {z}"));
                }
            }
            Ok(_) => roundtrip = Err(format!("{z} did not terminate within {} digits", cfg.max_digits)),
            Err(e) => roundtrip = Err(format!("{z}: {e}")),
        }
    }
    vec![
        CheckReport::from_outcome("expansion.roundtrip", roundtrip),
        CheckReport::from_outcome("expansion.digit_norms", digits_ok),
        cylinder_identity_check(32, 3, 8, cfg.seed),
    ]
}

fn ifs(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let cb = contraction_bound();
    let two_ninths = BigRational::new(2.into(), 9.into());
    let two_thirds = BigRational::new(2.into(), 3.into());
    let exact = single_branch_distortion_sup();
    let sampled = distortion_estimate(2, 9, None)?;
    let dc = two_decaying_constants();
    Ok(vec![
        check("ifs.contraction_sup", cb.sup == two_ninths && cb.sup < two_thirds, || {
            format!("sup = {}", cb.sup)
        }),
        contraction_tail_check(4096),
        decay_grid_check(64, 32),
        check(
            "ifs.decay_constants_values",
            dc.c1 == BigRational::new(16.into(), 25.into()) && dc.c2 == BigRational::new(16.into(), 9.into()),
            || format!("C1 = {}, C2 = {}", dc.c1, dc.c2),
        ),
        nesting_check(16),
        verify_separation(&branches_up_to(32), 2000, cfg.seed)?,
        check(
            "ifs.single_branch_distortion",
            exact == BigRational::new(25.into(), 9.into()),
            || format!("{exact}"),
        ),
        check(
            "ifs.sampled_distortion",
            sampled.sampled.is_finite() && sampled.sampled >= 25.0 / 9.0 - cfg.float_tol,
            || format!("{}", sampled.sampled),
        ),
    ])
}

fn pressure(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let alphabet: Vec<MobiusBranch> = [(2, 2), (-2, -2), (3, 0), (0, 3)]
        .iter()
        .map(|&(k, l)| MobiusBranch::new(k, l))
        .collect::<Result<_>>()?;
    let opts = PartitionOptions {
        max_words: cfg.max_words,
        ..PartitionOptions::default()
    };
    let mut submult = Ok(());
    for s in [0.3, 0.7, 1.0] {
        let log_z: Vec<f64> = (1..=6)
            .map(|n| partition_sum(&alphabet, n, s, PressureMode::SupNorm, &opts).map(|e| n as f64 * e.log_zn_over_n))
            .collect::<Result<_>>()?;
        for m in 1..6 {
            for n in 1..=6 - m {
                if log_z[m + n - 1] > log_z[m - 1] + log_z[n - 1] + 1e-12 {
                    submult = Err(format!("s = {s}: Z_{} > Z_{m} Z_{n}", m + n));
                }
            }
        }
    }
    let single = bowen_dimension(&alphabet[..1], cfg.bisection_tol, 12)?;
    let nested: Vec<_> = [2, 3, 4]
        .iter()
        .map(|&k| bowen_dimension(&alphabet[..k], cfg.bisection_tol, 12))
        .collect::<Result<_>>()?;
    let monotone = nested.windows(2).all(|w| w[0].s_low <= w[1].s_high);
    let signs = nested
        .iter()
        .all(|r| r.s_low <= r.s_high && r.bracket_at_low.1 >= 0.0 && r.bracket_at_high.0 <= 0.0);
    Ok(vec![
        CheckReport::from_outcome("pressure.submultiplicativity", submult),
        check(
            "pressure.single_branch_zero",
            single.s_low == 0.0 && single.s_high <= cfg.bisection_tol,
            || format!("[{}, {}]", single.s_low, single.s_high),
        ),
        check("pressure.bowen_sign_invariants", signs, || format!("{nested:?}")),
        check("pressure.nested_monotone", monotone, || {
            nested.iter().map(|r| format!("[{}, {}]", r.s_low, r.s_high)).collect::<Vec<_>>().join(" ")
        }),
    ])
}

fn schedule(cfg: &RunConfig) -> Result<Vec<CheckReport>> {
    let s = DigitSet::d2();
    let f = GrowthFunction::parse("n + 3")?;
    let sched = build_schedule(&s, &f, 2.0, 0.5, cfg.horizon, cfg.ratio_tol)?;
    let mut out = validate_schedule(&sched, &s, &f);
    let sub = subexp_check(&sched);
    out.push(check("schedule.subexp_final_window", sub.passed, || {
        format!("max {} >= {}", sub.final_window_max, sub.ratio_tol)
    }));
    let chain = verify_lower_bound_chain(&sched, 0.5, 0.1, cfg.horizon, &two_decaying_constants().c1);
    out.push(match chain {
        Ok(c) => check("schedule.lower_bound_chain", c.positive, || format!("{c:?}")),
        Err(e) => CheckReport::fail("schedule.lower_bound_chain", e.to_string()),
    });
    Ok(out)
}
