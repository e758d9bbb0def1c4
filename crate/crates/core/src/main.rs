use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use hurwitz::check::CheckReport;
use hurwitz::dimension::{
    bowen_dimension_with, build_schedule, partition_sum, subexp_check, tau_exponent,
    tau_trajectory_csv, validate_schedule, BowenOptions, DigitSet, GrowthFunction,
    PartitionOptions, PressureMode,
};
use hurwitz::expansion::{classify_digit, evaluate, expand, expand_approx, DigitWord};
use hurwitz::gaussian::{GaussianInt, GaussianRational};
use hurwitz::ifs::MobiusBranch;
use hurwitz::report::{render_svg, run_suite, to_csv, to_json, OutputFormat, RunConfig, Suite, TessellationSpec};
use hurwitz::Error;

/// Hurwitz complex continued fractions and dimension estimates.
#[derive(Parser, Debug)]
#[command(name = "hurwitz", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Flat `key = value` run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// json or csv.
    #[arg(long, global = true, default_value = "json")]
    format: OutputFormat,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hurwitz expansion of an exact rational point of U, e.g. "2/5+0/1 i".
    Expand {
        z: String,
        /// Maximum number of digits (default from the config).
        #[arg(long)]
        max: Option<usize>,
        /// Expand the double-precision value with the config's error radius.
        #[arg(long)]
        float: bool,
    },
    /// Exact value of a finite digit word, e.g. "3,0;-2,0".
    Eval { digits: String },
    /// Class of a Gaussian integer "re,im": invalid, exceptional or regular.
    Classify { digit: String },
    /// SVG of the first-level cylinders.
    Tessellate {
        #[arg(long, default_value_t = 25)]
        norm_sq_max: u64,
        #[arg(long)]
        no_exceptional: bool,
        #[arg(long, default_value_t = 0.001)]
        stroke_width: f64,
        #[arg(long, default_value_t = 800)]
        size_px: u32,
    },
    /// Convergence exponent of the moduli of a digit set in norm order.
    Tau {
        /// Digit set: all, nonzero, d2, norm>=N, annulus:LO:HI or a list.
        #[arg(long, default_value = "all")]
        set: String,
        /// Number of terms (default from the config).
        #[arg(long)]
        horizon: Option<usize>,
        /// Also write the trajectory CSV here.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Partition function Z_n(s) with pressure bracket.
    Pressure {
        /// Finite alphabet inside D2, or a file containing one.
        #[arg(long)]
        alphabet: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value = "sup_norm")]
        mode: PressureMode,
        #[arg(long, default_value_t = 0.0)]
        prune_tol: f64,
    },
    /// Bowen dimension bracket of a finite alphabet.
    Dim {
        #[arg(long)]
        alphabet: String,
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, default_value = "sup_norm")]
        mode: PressureMode,
    },
    /// Non-autonomous schedule for an infinite digit set and growth function.
    Schedule {
        #[arg(long, default_value = "d2")]
        set: String,
        #[arg(long, default_value = "n + 3")]
        growth: String,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 2.0)]
        tau: f64,
        /// Number of positions (default from the config).
        #[arg(long)]
        horizon: Option<u64>,
        /// Also write the subexponential-ratio trajectory CSV here.
        #[arg(long)]
        subexp: Option<PathBuf>,
    },
    /// Run a verification suite: arith, expansion, ifs, pressure, schedule or all.
    Verify { suite: Suite },
}

enum Failure {
    Lib(Error),
    Checks(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::BudgetExceeded { .. } => 3,
                _ => 2,
            })
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    match cli.command {
        Command::Expand { z, max, float } => cmd_expand(g, &cfg, &z, max.unwrap_or(cfg.max_digits), float),
        Command::Eval { digits } => {
            let w = parse_word(&digits)?;
            let v = evaluate(&w)?;
            let c = v.to_complex();
            emit(
                g,
                &json!({"digits": w.to_lattice(), "value": v.to_string(), "value_f64": [c.re, c.im]}),
            )
        }
        Command::Classify { digit } => {
            let d = parse_point(&digit)?;
            emit(
                g,
                &json!({"digit": [d.0, d.1], "norm_sq": d.0 * d.0 + d.1 * d.1, "class": classify_digit(&GaussianInt::new(d.0, d.1))}),
            )
        }
        Command::Tessellate {
            norm_sq_max,
            no_exceptional,
            stroke_width,
            size_px,
        } => {
            let spec = TessellationSpec {
                norm_sq_max,
                include_exceptional: !no_exceptional,
                stroke_width,
                size_px,
            };
            write_out(g.out.as_deref(), &render_svg(&spec)?)
        }
        Command::Tau { set, horizon, trajectory } => {
            let s: DigitSet = set.parse()?;
            let h = horizon.unwrap_or(cfg.horizon as usize);
            let est = tau_exponent(s.iter().map(|p| p.modulus()), h)?;
            let csv = tau_trajectory_csv(&est);
            if let Some(p) = trajectory {
                write_out(Some(&p), &csv)?;
            }
            match g.format {
                OutputFormat::Csv => write_out(g.out.as_deref(), &csv),
                OutputFormat::Json => emit(
                    g,
                    &json!({
                        "set": s.label(),
                        "estimate": est.estimate,
                        "raw_estimate": est.raw_estimate,
                        "horizon": est.horizon,
                        "anchor": est.anchor,
                        "window": est.window,
                        "argmax": est.argmax,
                    }),
                ),
            }
        }
        Command::Pressure {
            alphabet,
            n,
            s,
            mode,
            prune_tol,
        } => {
            let a = parse_alphabet(&alphabet)?;
            let opts = PartitionOptions {
                max_words: cfg.max_words,
                prune_tol,
                k0: None,
            };
            emit(g, &partition_sum(&a, n, s, mode, &opts)?)
        }
        Command::Dim { alphabet, n_max, mode } => {
            let a = parse_alphabet(&alphabet)?;
            let opts = BowenOptions {
                tol: cfg.bisection_tol,
                n_max,
                max_words: cfg.max_words.min(1 << 22),
                mode,
                ..BowenOptions::default()
            };
            emit(g, &bowen_dimension_with(&a, &opts)?)
        }
        Command::Schedule {
            set,
            growth,
            epsilon,
            tau,
            horizon,
            subexp,
        } => {
            let s: DigitSet = set.parse()?;
            let f = GrowthFunction::parse(&growth)?;
            let sched = build_schedule(&s, &f, tau, epsilon, horizon.unwrap_or(cfg.horizon), cfg.ratio_tol)?;
            if let Some(w) = &sched.warning {
                eprintln!("warning: {w}");
            }
            let sub = subexp_check(&sched);
            if let Some(p) = subexp {
                write_out(Some(&p), &sub.to_csv())?;
            }
            emit(g, &sched)?;
            let failed: Vec<CheckReport> = validate_schedule(&sched, &s, &f)
                .into_iter()
                .filter(|r| !r.passed())
                .collect();
            if !failed.is_empty() {
                return Err(Failure::Checks(serde_json::to_string(&failed).expect("serializes")));
            }
            Ok(())
        }
        Command::Verify { suite } => {
            let reports = run_suite(suite, &cfg)?;
            emit(g, &reports)?;
            let failed = reports.iter().filter(|r| !r.passed()).count();
            if failed > 0 {
                return Err(Failure::Checks(format!("{failed} of {} checks failed", reports.len())));
            }
            Ok(())
        }
    }
}

fn cmd_expand(g: &Global, cfg: &RunConfig, z: &str, max: usize, float: bool) -> CliResult<()> {
    let z: GaussianRational = z.parse()?;
    if float {
        let approx = expand_approx(z.to_complex(), cfg.float_error_radius(), max)?;
        return emit(g, &json!({"input": z.to_string(), "mode": "float", "expansion": approx}));
    }
    let e = expand(&z, max)?;
    let roundtrip = !e.terminated || evaluate(&e.digits)? == z;
    emit(
        g,
        &json!({
            "input": z.to_string(),
            "digits": e.digits.to_lattice(),
            "terminated": e.terminated,
            "roundtrip": roundtrip,
            "remainder": e.remainder.to_string(),
        }),
    )?;
    if !roundtrip {
        return Err(Failure::Checks(format!("evaluate(expand({z})) differs from the input")));
    }
    Ok(())
}

fn parse_point(s: &str) -> CliResult<(i64, i64)> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected 're,im', got {s:?}")))?;
    let p = |v: &str| {
        v.trim()
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("bad integer {v:?}")))
    };
    Ok((p(a)?, p(b)?))
}

fn parse_word(s: &str) -> CliResult<DigitWord> {
    let pairs: Vec<(i64, i64)> = if s.trim().starts_with('[') {
        let v: Vec<[i64; 2]> = serde_json::from_str(s).map_err(|e| Error::Parse(format!("digits JSON: {e}")))?;
        v.into_iter().map(|[a, b]| (a, b)).collect()
    } else {
        s.split(';')
            .filter(|t| !t.trim().is_empty())
            .map(parse_point)
            .collect::<CliResult<_>>()?
    };
    Ok(DigitWord::from_pairs(&pairs)?)
}

/// An alphabet given inline or as a path to a file holding the same syntax.
fn parse_alphabet(arg: &str) -> CliResult<Vec<MobiusBranch>> {
    let path = Path::new(arg);
    let text = if path.is_file() {
        std::fs::read_to_string(path).map_err(Error::from)?
    } else {
        arg.to_string()
    };
    let set: DigitSet = text.trim().parse()?;
    Ok(set.to_alphabet()?)
}

fn emit<T: Serialize>(g: &Global, value: &T) -> CliResult<()> {
    let text = match g.format {
        OutputFormat::Json => to_json(value),
        OutputFormat::Csv => to_csv(value),
    };
    write_out(g.out.as_deref(), &text)
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(Error::from)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(Error::from)?;
        }
    }
    Ok(())
}
