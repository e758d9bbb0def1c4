//! Property-based invariants.

use proptest::prelude::*;

use hurwitz::dimension::{
    build_schedule, partition_sum, tau_exponent, validate_schedule, DigitSet, GrowthFunction,
    PartitionOptions, PressureMode,
};
use hurwitz::expansion::{evaluate, expand};
use hurwitz::gaussian::{lattice_by_norm, GaussianRational};
use hurwitz::ifs::{BranchComposition, MobiusBranch};

/// A Gaussian rational in `U` with denominator at most `den`.
fn point_in_box() -> impl Strategy<Value = GaussianRational> {
    (1i64..=2000).prop_flat_map(|den| {
        let half = den / 2;
        let lo = -half;
        // x/den ∈ [-1/2, 1/2) ⇔ -den ≤ 2x < den.
        let hi = if den % 2 == 0 { half - 1 } else { half };
        ((lo..=hi), (lo..=hi), Just(den))
            .prop_map(|(a, b, d)| GaussianRational::from_ratios(a, d, b, d))
    })
}

fn regular_digit() -> impl Strategy<Value = (i64, i64)> {
    ((-7i64..=7), (-7i64..=7)).prop_filter("norm² ≥ 8", |(a, b)| a * a + b * b >= 8)
}

fn alphabet(max_len: usize) -> impl Strategy<Value = Vec<MobiusBranch>> {
    prop::collection::btree_set(regular_digit(), 1..=max_len)
        .prop_map(|s| s.into_iter().map(|(a, b)| MobiusBranch::new(a, b).unwrap()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn expand_then_evaluate_is_identity(z in point_in_box()) {
        prop_assert!(z.in_unit_box());
        let e = expand(&z, 10_000).unwrap();
        prop_assert!(e.terminated);
        prop_assert_eq!(evaluate(&e.digits).unwrap(), z);
        for d in e.digits.iter() {
            let p = d.value().to_lattice().unwrap();
            prop_assert!(p.norm_sq() >= 2);
        }
    }

    #[test]
    fn branch_images_expand_with_their_word(
        word in prop::collection::vec(regular_digit(), 1..4),
        z in point_in_box(),
    ) {
        let w = BranchComposition::from_pairs(&word).unwrap();
        let image = w.apply_exact(&z).unwrap();
        let e = expand(&image, 10_000).unwrap();
        let got: Vec<(i64, i64)> = e.digits.to_lattice().unwrap().iter().map(|p| (p.re, p.im)).collect();
        prop_assert!(got.len() >= word.len());
        prop_assert_eq!(&got[..word.len()], &word[..]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partition_sums_are_submultiplicative(a in alphabet(4), s in 0.0f64..2.0) {
        let opts = PartitionOptions::default();
        let log_z: Vec<f64> = (1..=4)
            .map(|n| n as f64 * partition_sum(&a, n, s, PressureMode::SupNorm, &opts).unwrap().log_zn_over_n)
            .collect();
        for m in 1..4 {
            for n in 1..=4 - m {
                prop_assert!(log_z[m + n - 1] <= log_z[m - 1] + log_z[n - 1] + 1e-12);
            }
        }
    }

    #[test]
    fn upper_bracket_decreases_in_s(a in alphabet(5), s1 in 0.0f64..2.0, ds in 0.001f64..1.0, n in 1usize..=4) {
        let opts = PartitionOptions::default();
        let s2 = s1 + ds;
        for mode in [PressureMode::SupNorm, PressureMode::BasePoint] {
            let p1 = partition_sum(&a, n, s1, mode, &opts).unwrap();
            let p2 = partition_sum(&a, n, s2, mode, &opts).unwrap();
            prop_assert!(p2.upper_bracket <= p1.upper_bracket + 1e-12, "{:?}: {} > {}", mode, p2.upper_bracket, p1.upper_bracket);
            prop_assert!(p1.lower_bracket <= p1.upper_bracket);
        }
    }

    #[test]
    fn tau_ignores_tie_order(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let h = 20_000;
        let pts = lattice_by_norm(false, h + 64);
        let mut shuffled = pts.clone();
        let mut rng = hurwitz::sampling::rng(seed);
        let mut start = 0;
        while start < shuffled.len() {
            let n = shuffled[start].norm_sq();
            let end = start + shuffled[start..].iter().take_while(|p| p.norm_sq() == n).count();
            shuffled[start..end].shuffle(&mut rng);
            start = end;
        }
        let a = tau_exponent(pts.iter().map(|p| p.modulus()), h).unwrap().estimate;
        let b = tau_exponent(shuffled.iter().map(|p| p.modulus()), h).unwrap().estimate;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn built_schedules_pass_the_validator(
        eps in 0.1f64..1.5,
        shift in 3u32..12,
        slope in 1u32..4,
        horizon in 100u64..1500,
        ratio_tol in 0.1f64..1.0,
    ) {
        let s = DigitSet::d2();
        let f = GrowthFunction::parse(&format!("{slope}*n + {shift}")).unwrap();
        let sched = build_schedule(&s, &f, 2.0, eps, horizon, ratio_tol).unwrap();
        prop_assert!(!sched.truncated);
        for r in validate_schedule(&sched, &s, &f) {
            prop_assert!(r.passed(), "{:?}", r);
        }
    }
}
