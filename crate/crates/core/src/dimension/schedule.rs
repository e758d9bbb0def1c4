//! Non-autonomous schedules: anchors `z_m`, digit blocks `S_m` and block
//! lengths `t_m` extracted from an infinite digit set `S`, together with the
//! explicit lower bound on the partition function they yield.
//!
//! Construction (greedy and minimal):
//!
//! * `|z₁| = min |S|`, and `z_{m+1}` is the first element of the first shell
//!   after the one where `Σ_{|z_m| ≤ |i|} |i|^{-(τ-ε)}` reaches 1.
//! * `S₁` is the shell `|i| = |z₁|`. For `m ≥ 2`, `S_m = {|z_m| ≤ |i| < |z_{m+1}|}`.
//! * `t_m` is the least positive length such that block `m+1` starts where `f`
//!   stays at or above `|z_{m+2}|` up to the horizon, and
//!   `log #S_{m+1} / (T_m + 1) ≤ ratio_tol / (m+1)` with `T_m = t₁ + … + t_m`.
//!   The ratio profile `1/m` makes both block ratios tend to 0.
//!
//! Shells are sets of equal squared norm. All norms in this module are
//! squared norms `|i|²` unless stated otherwise.

use std::fmt::Write as _;

use num_rational::BigRational;
use serde::Serialize;

use crate::check::CheckReport;
use crate::dimension::{DigitSet, GrowthFunction};
use crate::error::{Error, Result};
use crate::gaussian::LatticePoint;
use crate::ifs::ratio_to_f64;

/// Relative slack when comparing `f(n)` against an anchor modulus.
const F_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScheduleBlock {
    /// `S_m = {i ∈ S : norm_lo ≤ |i|² < norm_hi}`.
    pub norm_lo: u64,
    pub norm_hi: u64,
    /// `#S_m`.
    pub count: u64,
    /// `t_m`.
    pub t: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonAutSchedule {
    /// `z₁, …, z_{M+1}` for `M` blocks.
    pub anchors: Vec<LatticePoint>,
    pub blocks: Vec<ScheduleBlock>,
    pub horizon: u64,
    pub epsilon: f64,
    pub tau: f64,
    pub ratio_tol: f64,
    pub growth: GrowthFunction,
    /// The last block was stretched to the horizon because `f` never cleared
    /// the next anchor.
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    #[serde(skip)]
    digits: DigitSet,
}

impl NonAutSchedule {
    pub fn digit_set(&self) -> &DigitSet {
        &self.digits
    }

    /// `T_m = t₁ + … + t_m` for `m = 0..=M`.
    pub fn cumulative_lengths(&self) -> Vec<u64> {
        let mut out = vec![0];
        for b in &self.blocks {
            out.push(out.last().expect("nonempty") + b.t);
        }
        out
    }

    /// 1-based index of the block containing position `n`.
    pub fn block_of(&self, n: u64) -> Option<usize> {
        let cum = self.cumulative_lengths();
        (n >= 1 && n <= *cum.last().expect("nonempty")).then(|| cum.partition_point(|&t| t < n))
    }

    /// `Σ_{i ∈ S_m} |i|^{-x}` for the 1-based block index `m`.
    pub fn block_power_sum(&self, m: usize, x: f64) -> f64 {
        let b = &self.blocks[m - 1];
        self.digits
            .iter_from(b.norm_lo)
            .take_while(|p| p.norm_sq() < b.norm_hi)
            .map(|p| (p.norm_sq() as f64).powf(-x / 2.0))
            .sum()
    }
}

#[derive(Clone, Copy, Debug)]
struct Shell {
    norm: u64,
    count: u64,
    first: LatticePoint,
}

/// Lazy shells of `S` plus the greedily chosen anchors (as shell indices).
struct Anchors<'a> {
    points: std::iter::Peekable<Box<dyn Iterator<Item = LatticePoint> + 'a>>,
    shells: Vec<Shell>,
    anchors: Vec<usize>,
    exponent: f64,
}

impl<'a> Anchors<'a> {
    fn new(s: &'a DigitSet, exponent: f64) -> Result<Self> {
        let mut a = Anchors {
            points: s.iter().peekable(),
            shells: Vec::new(),
            anchors: Vec::new(),
            exponent,
        };
        if !a.shell_exists(0) {
            return Err(Error::InvalidArgument("digit set is empty".into()));
        }
        a.anchors.push(0);
        Ok(a)
    }

    fn shell_exists(&mut self, k: usize) -> bool {
        while self.shells.len() <= k {
            let Some(first) = self.points.next() else {
                return false;
            };
            let norm = first.norm_sq();
            let mut count = 1;
            while self.points.peek().is_some_and(|p| p.norm_sq() == norm) {
                self.points.next();
                count += 1;
            }
            self.shells.push(Shell { norm, count, first });
        }
        true
    }

    fn weight(&self, k: usize) -> f64 {
        let s = &self.shells[k];
        s.count as f64 * (s.norm as f64).powf(-self.exponent / 2.0)
    }

    /// Makes `z_1..=z_k` available.
    fn ensure(&mut self, k: usize) -> Result<()> {
        while self.anchors.len() < k {
            let mut j = *self.anchors.last().expect("nonempty");
            let mut sum = 0.0;
            while sum < 1.0 {
                if !self.shell_exists(j) {
                    return Err(Error::InvalidArgument(
                        "digit set ran out before the block sum reached 1".into(),
                    ));
                }
                sum += self.weight(j);
                j += 1;
            }
            if !self.shell_exists(j) {
                return Err(Error::InvalidArgument("digit set ran out of shells".into()));
            }
            self.anchors.push(j);
        }
        Ok(())
    }

    fn modulus(&self, m: usize) -> f64 {
        (self.shells[self.anchors[m - 1]].norm as f64).sqrt()
    }

    /// Block `m` (1-based) as `(norm_lo, norm_hi, count)`.
    fn block(&self, m: usize) -> (u64, u64, u64) {
        let a = self.anchors[m - 1];
        if m == 1 {
            let s = &self.shells[a];
            return (s.norm, s.norm + 1, s.count);
        }
        let b = self.anchors[m];
        let count = self.shells[a..b].iter().map(|s| s.count).sum();
        (self.shells[a].norm, self.shells[b].norm, count)
    }
}

/// Builds the schedule up to `horizon` positions.
pub fn build_schedule(
    s: &DigitSet,
    f: &GrowthFunction,
    tau: f64,
    eps: f64,
    horizon: u64,
    ratio_tol: f64,
) -> Result<NonAutSchedule> {
    if s.is_finite() {
        return Err(Error::InvalidArgument(format!("digit set {} is finite", s.label())));
    }
    if !(eps > 0.0 && eps < tau) {
        return Err(Error::InvalidArgument(format!("need 0 < ε < τ, got ε = {eps}, τ = {tau}")));
    }
    if horizon == 0 || !(ratio_tol > 0.0) {
        return Err(Error::InvalidArgument("need horizon >= 1 and ratio_tol > 0".into()));
    }
    let mut anchors = Anchors::new(s, tau - eps)?;
    let z1 = anchors.modulus(1);
    let values = f.values(horizon);
    if let Some(n) = values.iter().position(|&v| !(v >= z1 * (1.0 - F_SLACK))) {
        return Err(Error::InvalidArgument(format!(
            "f({}) = {} is below min|S| = {z1}",
            n + 1,
            values[n]
        )));
    }
    // suffix_min[k] = min f(k+1..=horizon)
    let mut suffix_min = values.clone();
    for k in (0..suffix_min.len().saturating_sub(1)).rev() {
        suffix_min[k] = suffix_min[k].min(suffix_min[k + 1]);
    }
    let need = |r: f64| {
        let k = suffix_min.partition_point(|&v| v < r * (1.0 - F_SLACK));
        (k < suffix_min.len()).then_some(k as u64 + 1)
    };

    let mut warnings: Vec<String> = f.divergence_warning(horizon).into_iter().collect();
    let mut blocks = Vec::new();
    let mut truncated = false;
    let mut done = 0u64;
    for m in 1.. {
        anchors.ensure(m + 2)?;
        let (norm_lo, norm_hi, count) = anchors.block(m);
        let next_count = anchors.block(m + 1).2;
        let ratio_start = ((next_count as f64).ln() * (m + 1) as f64 / ratio_tol).ceil() as u64;
        let remaining = horizon - done;
        let t = match need(anchors.modulus(m + 2)) {
            None => {
                truncated = true;
                warnings.push(format!(
                    "f does not stay above |z_{}| = {} before the horizon; block {m} extended to the horizon",
                    m + 2,
                    anchors.modulus(m + 2)
                ));
                remaining
            }
            Some(start) => 1u64
                .max(start.saturating_sub(1 + done))
                .max(ratio_start.saturating_sub(1 + done))
                .min(remaining),
        };
        blocks.push(ScheduleBlock {
            norm_lo,
            norm_hi,
            count,
            t,
        });
        done += t;
        if done >= horizon {
            break;
        }
    }
    let points = anchors.anchors[..=blocks.len()]
        .iter()
        .map(|&k| anchors.shells[k].first)
        .collect();
    Ok(NonAutSchedule {
        anchors: points,
        blocks,
        horizon,
        epsilon: eps,
        tau,
        ratio_tol,
        growth: f.clone(),
        truncated,
        warning: (!warnings.is_empty()).then(|| warnings.join("; ")),
        digits: s.clone(),
    })
}

/// Re-derives every schedule property from a brute-force enumeration of the
/// square `[-R, R]²` through `S`'s membership test.
pub fn validate_schedule(sched: &NonAutSchedule, s: &DigitSet, f: &GrowthFunction) -> Vec<CheckReport> {
    let max_norm = sched.anchors.iter().map(LatticePoint::norm_sq).max().unwrap_or(0);
    let r = (max_norm as f64).sqrt().ceil() as i64 + 1;
    let mut norms: Vec<u64> = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            let p = LatticePoint::new(x, y);
            if s.contains(p) {
                norms.push(p.norm_sq());
            }
        }
    }
    norms.sort_unstable();
    let count_in = |lo: u64, hi: u64| (norms.partition_point(|&n| n < hi) - norms.partition_point(|&n| n < lo)) as u64;
    let power_sum = |lo: u64, hi: u64, x: f64| -> f64 {
        norms
            .iter()
            .filter(|&&n| n >= lo && n < hi)
            .map(|&n| (n as f64).powf(-x / 2.0))
            .sum()
    };
    let e = sched.tau - sched.epsilon;
    let z: Vec<u64> = sched.anchors.iter().map(LatticePoint::norm_sq).collect();
    let mut out = Vec::new();

    out.push(CheckReport::from_outcome("schedule.first_anchor", {
        if !sched.anchors.iter().all(|&p| s.contains(p)) {
            Err("an anchor is not in S".to_string())
        } else if norms.first() != Some(&z[0]) {
            Err(format!("|z_1|^2 = {} but min over S is {:?}", z[0], norms.first()))
        } else if let Some(w) = z.windows(2).position(|w| w[1] <= w[0]) {
            Err(format!("|z_{}| >= |z_{}|", w + 1, w + 2))
        } else {
            Ok(())
        }
    }));

    out.push(CheckReport::from_outcome("schedule.block_sums", {
        (0..sched.blocks.len())
            .map(|k| (k + 1, power_sum(z[k], z[k + 1], e)))
            .find(|&(_, v)| v < 1.0)
            .map_or(Ok(()), |(m, v)| Err(format!("block {m}: sum |i|^-(τ-ε) = {v} < 1")))
    }));

    out.push(CheckReport::from_outcome("schedule.block_sets", {
        let mut res = Ok(());
        for (k, b) in sched.blocks.iter().enumerate() {
            let (lo, hi) = if k == 0 { (z[0], z[0] + 1) } else { (z[k], z[k + 1]) };
            let count = count_in(lo, hi);
            if (b.norm_lo, b.norm_hi, b.count) != (lo, hi, count) {
                res = Err(format!(
                    "block {}: recorded [{}, {}) #{} but expected [{lo}, {hi}) #{count}",
                    k + 1,
                    b.norm_lo,
                    b.norm_hi,
                    b.count
                ));
                break;
            }
        }
        res
    }));

    out.push(CheckReport::from_outcome("schedule.growth_domination", {
        let mut res = Ok(());
        let mut start = 1u64;
        'blocks: for (k, b) in sched.blocks.iter().enumerate() {
            let bound = if k == 0 { z[0] } else { z[k + 1] };
            let r = (bound as f64).sqrt();
            for n in start..start + b.t {
                if f.eval(n) < r * (1.0 - F_SLACK) {
                    res = Err(format!("block {}: f({n}) = {} < {r}", k + 1, f.eval(n)));
                    break 'blocks;
                }
            }
            start += b.t;
        }
        if res.is_ok() && start - 1 != sched.horizon {
            res = Err(format!("block lengths sum to {} not {}", start - 1, sched.horizon));
        }
        res
    }));

    out.push(CheckReport::from_outcome("schedule.subexponential", {
        let mut res = Ok(());
        for (k, b) in sched.blocks.iter().enumerate().skip(1) {
            let m = (k + 1) as f64;
            let before: u64 = sched.blocks[..k].iter().map(|b| b.t).sum();
            let ratio = (count_in(b.norm_lo, b.norm_hi) as f64).ln() / (before + 1) as f64;
            if ratio > sched.ratio_tol / m {
                res = Err(format!("block {}: log #S_m / (T_(m-1) + 1) = {ratio}", k + 1));
                break;
            }
        }
        res
    }));
    out
}

/// Explicit lower bound on the partition function of the schedule's
/// non-autonomous system at `s = (τ-ε)/(2+δ)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundChain {
    pub s: f64,
    pub delta: f64,
    /// Least block index `N` with `C₁|i|^{-2} ≥ |i|^{-2-δ}` for `|i| ≥ |z_{N+1}|`.
    pub big_n: usize,
    /// `T_N = t₁ + … + t_N`.
    pub t_n: u64,
    pub n: u64,
    /// Log of `C₁^{s T_N} |z₁|^{-2s t₁} Π_{m=2}^{N} (Σ_{S_m} |i|^{-2s})^{t_m}`,
    /// truncated to the first `n` positions when `n < T_N`.
    pub log_value: f64,
    pub value: f64,
    /// The same product with `C₁^{N s}` in place of `C₁^{s T_N}`.
    pub log_value_per_block: f64,
    /// `n ≥ T_N`: the bound covers position `n` and does not depend on it.
    pub n_independent: bool,
    /// Every block after `N` has `Σ_{S_m} |i|^{-(2+δ)s} ≥ 1`.
    pub post_factors_ok: bool,
    /// Smallest post-`N` block factor.
    pub min_post_factor: Option<f64>,
    /// The bound is an `n`-independent positive constant, so the lower pressure
    /// at `s` is nonnegative.
    pub positive: bool,
}

pub fn verify_lower_bound_chain(
    sched: &NonAutSchedule,
    eps: f64,
    delta: f64,
    n: u64,
    c1: &BigRational,
) -> Result<LowerBoundChain> {
    if n == 0 || n > sched.horizon {
        return Err(Error::InvalidArgument(format!(
            "n = {n} outside [1, {}]",
            sched.horizon
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("δ = {delta} must be positive")));
    }
    let c1 = ratio_to_f64(c1);
    if !(c1 > 0.0) {
        return Err(Error::InvalidArgument("C₁ must be positive".into()));
    }
    let s = (sched.tau - eps) / (2.0 + delta);
    let moduli: Vec<f64> = sched.anchors.iter().map(|p| p.modulus()).collect();
    let big_n = (1..=sched.blocks.len())
        .find(|&m| delta * moduli[m].ln() >= -c1.ln())
        .ok_or_else(|| {
            Error::NonConvergent(format!(
                "no anchor reaches |i|^δ >= 1/C₁ = {} within the schedule",
                1.0 / c1
            ))
        })?;
    let cum = sched.cumulative_lengths();
    let t_n = cum[big_n];
    let covered = n.min(t_n);
    let mut log_value = s * covered as f64 * c1.ln();
    let mut log_value_per_block = s * big_n as f64 * c1.ln();
    for m in 1..=big_n {
        let start = cum[m - 1];
        let len = covered.saturating_sub(start).min(sched.blocks[m - 1].t);
        let factor = if m == 1 {
            -2.0 * s * moduli[0].ln()
        } else {
            sched.block_power_sum(m, 2.0 * s).ln()
        };
        log_value += len as f64 * factor;
        log_value_per_block += sched.blocks[m - 1].t as f64 * factor;
    }
    let post: Vec<f64> = (big_n + 1..=sched.blocks.len())
        .map(|m| sched.block_power_sum(m, (2.0 + delta) * s))
        .collect();
    let post_factors_ok = post.iter().all(|&v| v >= 1.0);
    let n_independent = n >= t_n;
    Ok(LowerBoundChain {
        s,
        delta,
        big_n,
        t_n,
        n,
        log_value,
        value: log_value.exp(),
        log_value_per_block,
        n_independent,
        post_factors_ok,
        min_post_factor: post.iter().copied().reduce(f64::min),
        positive: n_independent && post_factors_ok && log_value.is_finite(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubexpReport {
    /// `(n, log #I^{(n)} / n)` for `n = 1..=horizon`.
    pub trajectory: Vec<(u64, f64)>,
    pub final_window: (u64, u64),
    pub final_window_max: f64,
    pub ratio_tol: f64,
    pub passed: bool,
}

impl SubexpReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,ratio\n");
        for (n, r) in &self.trajectory {
            let _ = writeln!(out, "{n},{r}");
        }
        out
    }
}

/// `log #I^{(n)} / n` along the schedule. The check passes when the maximum
/// over `[0.9·horizon, horizon]` is below `ratio_tol`.
pub fn subexp_check(sched: &NonAutSchedule) -> SubexpReport {
    let mut trajectory = Vec::with_capacity(sched.horizon as usize);
    let mut n = 0u64;
    for b in &sched.blocks {
        let lc = (b.count as f64).ln();
        for _ in 0..b.t {
            n += 1;
            trajectory.push((n, lc / n as f64));
        }
    }
    let lo = (sched.horizon * 9 / 10).max(1);
    let final_window_max = trajectory
        .iter()
        .filter(|(k, _)| *k >= lo)
        .map(|&(_, r)| r)
        .fold(f64::NEG_INFINITY, f64::max);
    SubexpReport {
        trajectory,
        final_window: (lo, sched.horizon),
        final_window_max,
        ratio_tol: sched.ratio_tol,
        passed: final_window_max < sched.ratio_tol,
    }
}
