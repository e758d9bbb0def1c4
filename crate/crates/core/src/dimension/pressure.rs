//! Partition functions `Z_n(s) = Σ_{|ω|=n} ‖Dφ_ω‖^s`, pressure brackets and the
//! Bowen dimension by bisection.
//!
//! For a word `ω` only the bottom row `(c, d)` of its matrix matters. Appending a
//! letter `x` maps it to `(d, c + d·x)`, and the box extrema of `|Dφ_ω|` follow
//! from the pole `-d/c` (see [`crate::ifs::WordBounds`]).
//!
//! Brackets. Sup-norms are submultiplicative, so the pressure satisfies
//! `P(s) ≤ log Z_n(s)/n` for every `n`. Conversely,
//! `Z_{m+n} ≥ K₀^{-s} Z_m Z_n` with the rigorous uniform distortion bound `K₀`
//! of [`crate::ifs::uniform_distortion_bound`], which gives
//! `P(s) ≥ (log Z_n(s) - s log K₀)/n`. In base-point mode `|Dφ_ω(0)|` stands
//! in for the sup-norm. It is within a factor `K₀` of it, so the upper bracket
//! widens by `s log K₀ / n` as well.

use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{uniform_distortion_bound, MobiusBranch, WordBounds};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureMode {
    /// `‖Dφ_ω‖` over the closed box, exact up to rounding.
    SupNorm,
    /// `|Dφ_ω(0)|`.
    BasePoint,
}

impl FromStr for PressureMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sup_norm" | "sup" => Ok(PressureMode::SupNorm),
            "base_point" | "base" => Ok(PressureMode::BasePoint),
            _ => Err(Error::Parse(format!("unknown pressure mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionOptions {
    /// Maximum number of words evaluated before giving up.
    pub max_words: u64,
    /// Relative pruning tolerance; 0 disables pruning. A subtree at depth `j`
    /// whose total mass bound `sup|Dφ_u|^s · Z_1^{n-j}` is below
    /// `prune_tol · Ẑ / (n |A|^j)` is dropped, where `Ẑ = (Σ_c inf|Dφ_c|^s)ⁿ ≤ Z_n`.
    /// At most `|A|^j` subtrees exist at depth `j`, so the dropped mass is at most
    /// `prune_tol · Z_n`. It is added to the upper bracket.
    pub prune_tol: f64,
    /// Distortion constant for the brackets; defaults to the uniform bound.
    pub k0: Option<f64>,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions {
            max_words: 1 << 24,
            prune_tol: 0.0,
            k0: None,
        }
    }
}

/// Serializes as `{s, n, logZ_over_n, lo, hi}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureEstimate {
    pub s: f64,
    pub n: usize,
    #[serde(rename = "logZ_over_n")]
    pub log_zn_over_n: f64,
    #[serde(rename = "lo")]
    pub lower_bracket: f64,
    #[serde(rename = "hi")]
    pub upper_bracket: f64,
    #[serde(skip)]
    pub mode: PressureMode,
    #[serde(skip)]
    pub words_evaluated: u64,
    /// Upper bound on the pruned mass, relative to the evaluated sum.
    #[serde(skip)]
    pub pruned_fraction: f64,
    #[serde(skip)]
    pub k0: f64,
}

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
struct Sum {
    s: f64,
    c: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    fn merge(&mut self, o: Sum) {
        self.add(o.s);
        self.add(o.c);
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

struct Ctx<'a> {
    letters: &'a [Complex64],
    n: usize,
    s: f64,
    mode: PressureMode,
    /// Log pruning budget at depth 0; `-∞` disables pruning.
    log_theta: f64,
    log_alphabet: f64,
    /// `log Σ_c sup|Dφ_c|^s`.
    log_z1: f64,
    shift: f64,
    budget: u64,
}

#[derive(Default)]
struct Acc {
    kept: Sum,
    dropped: Sum,
    truncated: Sum,
    leaves: u64,
    exhausted: bool,
}

fn dfs(ctx: &Ctx<'_>, c: Complex64, d: Complex64, depth: usize, acc: &mut Acc) {
    let b = WordBounds::from_cd(c, d);
    if depth == ctx.n {
        let v = match ctx.mode {
            PressureMode::SupNorm => b.sup,
            PressureMode::BasePoint => b.at_zero,
        };
        acc.kept.add((ctx.s * v.ln() - ctx.shift).exp());
        acc.leaves += 1;
        return;
    }
    let log_sup = ctx.s * b.sup.ln();
    let rest = (ctx.n - depth) as f64;
    let subtree_mass = || (log_sup + rest * ctx.log_z1 - ctx.shift).exp();
    if log_sup + rest * ctx.log_z1 < ctx.log_theta - depth as f64 * ctx.log_alphabet {
        acc.dropped.add(subtree_mass());
        return;
    }
    if acc.leaves >= ctx.budget {
        acc.truncated.add(subtree_mass());
        acc.exhausted = true;
        return;
    }
    for &x in ctx.letters {
        dfs(ctx, d, c + d * x, depth + 1, acc);
    }
}

/// `Z_n(s)` over `alphabet` with its pressure bracket.
pub fn partition_sum(
    alphabet: &[MobiusBranch],
    n: usize,
    s: f64,
    mode: PressureMode,
    opts: &PartitionOptions,
) -> Result<PressureEstimate> {
    if alphabet.is_empty() {
        return Err(Error::InvalidArgument("alphabet is empty".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("word length must be positive".into()));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("exponent s = {s} must be >= 0")));
    }
    let k0 = match opts.k0 {
        Some(k) if k >= 1.0 => k,
        Some(k) => return Err(Error::InvalidArgument(format!("distortion constant {k} < 1"))),
        None => uniform_distortion_bound(alphabet)?,
    };
    let letters: Vec<Complex64> = alphabet.iter().map(MobiusBranch::complex).collect();
    let singles: Vec<WordBounds> = letters
        .iter()
        .map(|&x| WordBounds::from_cd(Complex64::new(1.0, 0.0), x))
        .collect();
    let log_m = singles.iter().map(|b| s * b.sup.ln()).fold(f64::NEG_INFINITY, f64::max);
    let log_z1 = log_sum_exp(singles.iter().map(|b| s * b.sup.ln()));
    let log_inf1 = log_sum_exp(singles.iter().map(|b| s * b.inf.ln()));
    let nf = n as f64;
    let log_theta = if opts.prune_tol > 0.0 {
        opts.prune_tol.ln() + nf * log_inf1 - nf.ln()
    } else {
        f64::NEG_INFINITY
    };
    let ctx = Ctx {
        letters: &letters,
        n,
        s,
        mode,
        log_theta,
        log_alphabet: (letters.len() as f64).ln(),
        log_z1,
        shift: nf * log_m,
        budget: opts.max_words.div_ceil(letters.len() as u64).max(1),
    };
    let parts: Vec<Acc> = letters
        .par_iter()
        .map(|&x| {
            let mut acc = Acc::default();
            dfs(&ctx, Complex64::new(1.0, 0.0), x, 1, &mut acc);
            acc
        })
        .collect();
    let mut total = Acc::default();
    for p in parts {
        total.kept.merge(p.kept);
        total.dropped.merge(p.dropped);
        total.truncated.merge(p.truncated);
        total.leaves += p.leaves;
        total.exhausted |= p.exhausted;
    }
    let scale = ctx.shift.exp();
    if total.exhausted {
        return Err(Error::BudgetExceeded {
            budget: opts.max_words,
            partial_sum: total.kept.value() * scale,
            truncation_bound: (total.dropped.value() + total.truncated.value()) * scale,
        });
    }
    let kept = total.kept.value();
    let dropped = total.dropped.value();
    let log_z = ctx.shift + kept.ln();
    let log_k = k0.ln();
    let mut hi = (ctx.shift + (kept + dropped).ln()) / nf;
    if mode == PressureMode::BasePoint {
        hi += s * log_k / nf;
    }
    Ok(PressureEstimate {
        s,
        n,
        log_zn_over_n: log_z / nf,
        lower_bracket: log_z / nf - s * log_k / nf,
        upper_bracket: hi,
        mode,
        words_evaluated: total.leaves,
        pruned_fraction: dropped / kept,
        k0,
    })
}

fn log_sum_exp(it: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = it.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + it.map(|v| (v - m).exp()).sum::<f64>().ln()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BowenOptions {
    pub tol: f64,
    pub n_max: usize,
    /// Word lengths are capped so that `|A|ⁿ` stays within this many words.
    pub max_words: u64,
    pub max_iterations: u32,
    pub mode: PressureMode,
    pub k0: Option<f64>,
}

impl Default for BowenOptions {
    fn default() -> Self {
        BowenOptions {
            tol: 1e-3,
            n_max: 12,
            max_words: 1 << 22,
            max_iterations: 200,
            mode: PressureMode::SupNorm,
            k0: None,
        }
    }
}

/// Serializes as `{s_low, s_high, n_used, iterations, converged}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BowenDimResult {
    pub s_low: f64,
    pub s_high: f64,
    pub n_used: usize,
    pub iterations: u32,
    /// `s_high - s_low ≤ tol`. When false the bracket is the certified
    /// uncertainty interval at `n_used`, which the distortion correction keeps
    /// wider than `tol`.
    pub converged: bool,
    /// Best `(lo, hi)` pressure bracket over `n ≤ n_used` at `s_low` and `s_high`.
    #[serde(skip)]
    pub bracket_at_low: (f64, f64),
    #[serde(skip)]
    pub bracket_at_high: (f64, f64),
    #[serde(skip)]
    pub k0: f64,
}

/// `log sup|Dφ_ω|` (or `log |Dφ_ω(0)|`) for every word of each length `1..=n`.
struct WordLogs {
    per_len: Vec<Vec<f64>>,
}

impl WordLogs {
    fn build(alphabet: &[MobiusBranch], n_max: usize, max_words: u64, mode: PressureMode) -> Self {
        let letters: Vec<Complex64> = alphabet.iter().map(MobiusBranch::complex).collect();
        let mut rows = vec![(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))];
        let mut per_len = Vec::new();
        for _ in 0..n_max {
            if (rows.len() as u64).saturating_mul(letters.len() as u64) > max_words {
                break;
            }
            rows = rows
                .par_iter()
                .flat_map_iter(|&(c, d)| letters.iter().map(move |&x| (d, c + d * x)))
                .collect();
            per_len.push(
                rows.par_iter()
                    .map(|&(c, d)| {
                        let b = WordBounds::from_cd(c, d);
                        match mode {
                            PressureMode::SupNorm => b.sup.ln(),
                            PressureMode::BasePoint => b.at_zero.ln(),
                        }
                    })
                    .collect(),
            );
        }
        WordLogs { per_len }
    }

    /// `log Z_n(s)` with fixed-size chunks summed in order.
    fn log_z(&self, n: usize, s: f64) -> f64 {
        let v = &self.per_len[n - 1];
        let m = s * v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let chunks: Vec<Sum> = v
            .par_chunks(1 << 14)
            .map(|ch| {
                let mut acc = Sum::default();
                for &x in ch {
                    acc.add((s * x - m).exp());
                }
                acc
            })
            .collect();
        let mut total = Sum::default();
        for c in chunks {
            total.merge(c);
        }
        m + total.value().ln()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sign {
    Positive,
    Negative,
    Unknown,
}

struct Bracketer {
    logs: WordLogs,
    log_k: f64,
    mode: PressureMode,
}

impl Bracketer {
    fn n_used(&self) -> usize {
        self.logs.per_len.len()
    }

    /// Tightest `(lo, hi)` over all available lengths.
    fn bracket(&self, s: f64) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for n in 1..=self.n_used() {
            let nf = n as f64;
            let lz = self.logs.log_z(n, s) / nf;
            let corr = s * self.log_k / nf;
            lo = lo.max(lz - corr);
            hi = hi.min(match self.mode {
                PressureMode::SupNorm => lz,
                PressureMode::BasePoint => lz + corr,
            });
        }
        (lo, hi)
    }

    fn sign(&self, s: f64) -> (Sign, (f64, f64)) {
        const MARGIN: f64 = 1e-12;
        let (lo, hi) = self.bracket(s);
        let sign = if hi < -MARGIN {
            Sign::Negative
        } else if lo > MARGIN {
            Sign::Positive
        } else {
            Sign::Unknown
        };
        (sign, (lo, hi))
    }
}

/// Bowen dimension with default options apart from `tol` and `n_max`.
pub fn bowen_dimension(alphabet: &[MobiusBranch], tol: f64, n_max: usize) -> Result<BowenDimResult> {
    bowen_dimension_with(
        alphabet,
        &BowenOptions {
            tol,
            n_max,
            ..BowenOptions::default()
        },
    )
}

/// Bisection for the zero of the pressure on `[0, 2]`.
///
/// At each midpoint the sign of `P(s)` is certified if some word length
/// `n ≤ n_used` gives `hi < 0` or `lo > 0`. If a midpoint cannot be certified,
/// the two edges of the uncertain zone are bisected separately. Then
/// `[s_low, s_high]` is the interval between the largest certified-positive
/// and the smallest certified-negative exponent found.
pub fn bowen_dimension_with(alphabet: &[MobiusBranch], opts: &BowenOptions) -> Result<BowenDimResult> {
    if alphabet.is_empty() {
        return Err(Error::InvalidArgument("alphabet is empty".into()));
    }
    if !(opts.tol > 0.0) || opts.n_max == 0 {
        return Err(Error::InvalidArgument("need tol > 0 and n_max >= 1".into()));
    }
    let k0 = match opts.k0 {
        Some(k) => k,
        None => uniform_distortion_bound(alphabet)?,
    };
    let logs = WordLogs::build(alphabet, opts.n_max, opts.max_words, opts.mode);
    if logs.per_len.is_empty() {
        return Err(Error::BudgetExceeded {
            budget: opts.max_words,
            partial_sum: 0.0,
            truncation_bound: f64::INFINITY,
        });
    }
    let br = Bracketer {
        logs,
        log_k: k0.ln(),
        mode: opts.mode,
    };
    let mut visited: Vec<(f64, f64)> = Vec::new();
    let mut iterations = 0u32;
    let mut probe = |s: f64, iterations: &mut u32| {
        *iterations += 1;
        let (sign, b) = br.sign(s);
        visited.push((s, 0.5 * (b.0 + b.1)));
        (sign, b)
    };

    let (mut a, mut b) = (0.0_f64, 2.0_f64);
    let mut at_a = br.bracket(a);
    let mut at_b = probe(b, &mut iterations).1;
    let mut stuck = None;
    while b - a > opts.tol && iterations < opts.max_iterations {
        let mid = 0.5 * (a + b);
        match probe(mid, &mut iterations) {
            (Sign::Negative, br_) => (b, at_b) = (mid, br_),
            (Sign::Positive, br_) => (a, at_a) = (mid, br_),
            (Sign::Unknown, _) => {
                stuck = Some(mid);
                break;
            }
        }
    }
    if let Some(mid) = stuck {
        let (mut la, mut lb) = (a, mid);
        while lb - la > opts.tol / 2.0 && iterations < opts.max_iterations {
            let m = 0.5 * (la + lb);
            match probe(m, &mut iterations) {
                (Sign::Positive, br_) => (la, at_a) = (m, br_),
                _ => lb = m,
            }
        }
        let (mut ha, mut hb) = (mid, b);
        while hb - ha > opts.tol / 2.0 && iterations < opts.max_iterations {
            let m = 0.5 * (ha + hb);
            match probe(m, &mut iterations) {
                (Sign::Negative, br_) => (hb, at_b) = (m, br_),
                _ => ha = m,
            }
        }
        a = la;
        b = hb;
    }
    visited.sort_by(|x, y| x.0.total_cmp(&y.0));
    if let Some(w) = visited.windows(2).find(|w| w[1].1 > w[0].1 + 1e-12) {
        return Err(Error::NonConvergent(format!(
            "pressure bracket midpoint increases between s = {} and s = {}",
            w[0].0, w[1].0
        )));
    }
    Ok(BowenDimResult {
        s_low: a,
        s_high: b,
        n_used: br.n_used(),
        iterations,
        converged: b - a <= opts.tol,
        bracket_at_low: at_a,
        bracket_at_high: at_b,
        k0,
    })
}
