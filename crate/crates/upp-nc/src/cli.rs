//! The `upp` command-line front end.
//!
//! Every command reads curves as JSON files and writes JSON (default) or CSV to
//! standard output. Exit codes: 0 ok, 2 parse error, 3 precondition violation,
//! 4 invariant violation.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{Signed, Zero};

use crate::composition::{compose_with, ComposeMode, ComposeReport};
use crate::curve::{Curve, Element};
use crate::error::{Error, Result};
use crate::ncops::{convolve_with_rate_latency, horizontal_deviation, iwrr_gamma, IwrrConfig};
use crate::numeric::{format_rational, parse_rational, ExtendedValue, Rational};
use crate::pseudoinverse::{lower_pseudo_inverse, upper_pseudo_inverse};

#[derive(Parser, Debug)]
#[command(name = "upp", version, about = "Exact operations on ultimately pseudo-periodic curves")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    pub output: Output,
    /// Seed for commands that draw random inputs.
    #[arg(long, default_value_t = 1, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Value of a curve at one time.
    Eval {
        curve: PathBuf,
        #[arg(allow_hyphen_values = true)]
        time: String,
    },
    /// Lower pseudo-inverse.
    Lpi { curve: PathBuf },
    /// Upper pseudo-inverse.
    Upi { curve: PathBuf },
    /// Composition `f ∘ g`.
    Compose {
        f: PathBuf,
        g: PathBuf,
        #[command(flatten)]
        mode: ModeFlags,
        /// Print the chosen path and cut sizes on standard error.
        #[arg(long)]
        explain: bool,
    },
    /// Convolution with the rate-latency curve `β_{R,θ}`.
    ConvolveRl {
        curve: PathBuf,
        #[arg(long)]
        rate: String,
        #[arg(long, default_value = "0")]
        latency: String,
    },
    /// Horizontal deviation between an arrival and a service curve.
    Hdev { alpha: PathBuf, beta: PathBuf },
    /// IWRR per-flow strict service curve.
    Iwrr {
        config: PathBuf,
        #[arg(long)]
        force_general: bool,
    },
    /// Validate a curve file.
    Check { curve: PathBuf },
    /// Smallest equivalent representation.
    Minimize { curve: PathBuf },
    /// CSV rows `t,value,leftLimit,rightLimit` on a regular grid.
    Sample {
        curve: PathBuf,
        #[arg(long, default_value = "0")]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        step: String,
    },
    /// Times specialized against forced-general composition for an IWRR config.
    Bench {
        config: PathBuf,
        #[arg(long, default_value_t = 15)]
        repetitions: usize,
    },
    /// Brute-force reference values.
    #[cfg(feature = "testing")]
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Args, Debug, Clone, Copy)]
#[group(multiple = false)]
pub struct ModeFlags {
    #[arg(long)]
    force_general: bool,
    #[arg(long)]
    force_specialized: bool,
}

impl ModeFlags {
    fn mode(self) -> ComposeMode {
        if self.force_general {
            ComposeMode::ForceGeneral
        } else if self.force_specialized {
            ComposeMode::ForceSpecialized
        } else {
            ComposeMode::Auto
        }
    }
}

#[cfg(feature = "testing")]
#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// `inf{x | f(x) >= y}` by scanning.
    Lpi { curve: PathBuf, y: String },
    /// `sup{x | f(x) <= y}` by scanning.
    Upi { curve: PathBuf, y: String },
    /// `f(g(t))`.
    Compose { f: PathBuf, g: PathBuf, t: String },
    /// A random non-decreasing curve drawn with `--seed`.
    Random {
        #[arg(long, value_enum, default_value_t = RandomKind::Upp)]
        kind: RandomKind,
    },
}

#[cfg(feature = "testing")]
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RandomKind {
    Upp,
    Ua,
    Uc,
    Wui,
}

/// Runs the CLI on the process arguments and returns the exit code.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI on `args`, writing to `out` and `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Curve> {
    Curve::from_json(&read(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        Error::Invariant(m) => Error::Invariant(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn number(s: &str) -> Result<Rational> {
    parse_rational(s)
}

fn io(e: std::io::Error) -> Error {
    Error::Precondition(format!("write failed: {e}"))
}

/// Curve as CSV: a `T,d,c` header row, then one row per element.
pub fn curve_csv(c: &Curve) -> String {
    let mut s = String::from("T,d,c\n");
    let _ = writeln!(
        s,
        "{},{},{}",
        format_rational(c.pseudo_period_start()),
        format_rational(c.pseudo_period_length()),
        format_rational(c.pseudo_period_height())
    );
    s.push_str("kind,start,end,rightLimitAtStart,leftLimitAtEnd\n");
    for e in c.sequence().elements() {
        let _ = match e {
            Element::Point(p) => {
                let t = format_rational(&p.time);
                writeln!(s, "point,{t},{t},{},{}", p.value, p.value)
            }
            Element::Segment(g) => writeln!(
                s,
                "segment,{},{},{},{}",
                format_rational(&g.start),
                format_rational(&g.end),
                g.right_limit_at_start,
                g.left_limit_at_end
            ),
        };
    }
    s
}

fn emit_curve(c: &Curve, fmt: Output, out: &mut dyn Write) -> Result<()> {
    match fmt {
        Output::Json => writeln!(out, "{}", c.to_json()),
        Output::Csv => write!(out, "{}", curve_csv(c)),
    }
    .map_err(io)
}

fn emit_value(v: &ExtendedValue, fmt: Output, out: &mut dyn Write) -> Result<()> {
    match fmt {
        Output::Json => writeln!(out, "\"{v}\""),
        Output::Csv => writeln!(out, "{v}"),
    }
    .map_err(io)
}

fn explain(report: &ComposeReport, err: &mut dyn Write) -> Result<()> {
    writeln!(err, "{report}").map_err(io)
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let fmt = cli.output;
    match &cli.command {
        Command::Eval { curve, time } => {
            let c = load(curve)?;
            emit_value(&c.value_at(&number(time)?)?, fmt, out)
        }
        Command::Lpi { curve } => emit_curve(&lower_pseudo_inverse(&load(curve)?)?, fmt, out),
        Command::Upi { curve } => emit_curve(&upper_pseudo_inverse(&load(curve)?)?, fmt, out),
        Command::Compose { f, g, mode, explain: show } => {
            let (h, report) = compose_with(&load(f)?, &load(g)?, mode.mode())?;
            if *show {
                explain(&report, err)?;
            }
            emit_curve(&h, fmt, out)
        }
        Command::ConvolveRl { curve, rate, latency } => {
            let v = convolve_with_rate_latency(&load(curve)?, &number(rate)?, &number(latency)?)?;
            emit_curve(&v, fmt, out)
        }
        Command::Hdev { alpha, beta } => emit_value(&horizontal_deviation(&load(alpha)?, &load(beta)?)?, fmt, out),
        Command::Iwrr { config, force_general } => {
            let cfg = IwrrConfig::from_json(&read(config)?)?;
            let mode = if *force_general { ComposeMode::ForceGeneral } else { ComposeMode::Auto };
            let start = Instant::now();
            let gamma = iwrr_gamma(&cfg)?;
            let built = start.elapsed();
            let (h, report) = compose_with(&gamma, &cfg.aggregate, mode)?;
            let total = start.elapsed();
            writeln!(err, "{report}\ngamma: {built:.3?}, total: {total:.3?}").map_err(io)?;
            emit_curve(&h, fmt, out)
        }
        Command::Check { curve } => check(&load(curve)?, fmt, out),
        Command::Minimize { curve } => emit_curve(&load(curve)?.minimize(), fmt, out),
        Command::Sample { curve, from, to, step } => sample(&load(curve)?, &number(from)?, &number(to)?, &number(step)?, out),
        Command::Bench { config, repetitions } => bench(&IwrrConfig::from_json(&read(config)?)?, *repetitions, fmt, out),
        #[cfg(feature = "testing")]
        Command::Oracle(cmd) => oracle(cmd, cli.seed, fmt, out),
    }
}

/// Re-checks the UPP property on one period past `T` and reports the shape.
fn check(c: &Curve, fmt: Output, out: &mut dyn Write) -> Result<()> {
    let (t, d, h) = (c.pseudo_period_start(), c.pseudo_period_length(), c.pseudo_period_height());
    let window = c.cut(t, &(t + d), false)?;
    let mut probes: Vec<Rational> = window.point_times().cloned().collect();
    let two = Rational::from_integer(2.into());
    for e in window.elements() {
        if let Element::Segment(s) = e {
            probes.push((&s.start + &s.end) / &two);
        }
    }
    for x in &probes {
        for k in 1..=3 {
            let k = Rational::from_integer(k.into());
            let want = c.value_at(x)?.add_rational(&(&k * h));
            let got = c.value_at(&(x + &k * d))?;
            if got != want {
                return Err(Error::Invariant(format!(
                    "value {got} at {} differs from {want} expected from t = {}",
                    format_rational(&(x + &k * d)),
                    format_rational(x)
                )));
            }
        }
    }
    let cls = c.classify();
    let shape = if cls.is_wui {
        "wUI"
    } else if cls.is_uc {
        "UC"
    } else if cls.ua.is_some() {
        "UA"
    } else {
        "UPP"
    };
    match fmt {
        Output::Json => {
            let v = serde_json::json!({
                "valid": true,
                "elements": c.sequence().len(),
                "shape": shape,
                "nonDecreasing": cls.is_non_decreasing,
                "leftContinuous": cls.is_left_continuous,
                "rightContinuous": cls.is_right_continuous,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"))
        }
        Output::Csv => writeln!(out, "valid,elements,shape\ntrue,{},{shape}", c.sequence().len()),
    }
    .map_err(io)
}

fn sample(c: &Curve, from: &Rational, to: &Rational, step: &Rational, out: &mut dyn Write) -> Result<()> {
    if !step.is_positive() {
        return Err(Error::Precondition(format!("step {} must be positive", format_rational(step))));
    }
    if from.is_negative() || from > to {
        return Err(Error::Precondition("need 0 <= from <= to".into()));
    }
    let mut s = String::from("t,value,leftLimit,rightLimit\n");
    let mut t = from.clone();
    while &t <= to {
        let left = if t.is_zero() { String::new() } else { c.left_limit_at(&t)?.to_string() };
        let _ = writeln!(s, "{},{},{left},{}", format_rational(&t), c.value_at(&t)?, c.right_limit_at(&t)?);
        t += step;
    }
    out.write_all(s.as_bytes()).map_err(io)
}

/// Nearest-rank percentile of sorted durations.
pub fn percentile(sorted: &[Duration], p: f64) -> Duration {
    let rank = ((p / 100.0) * sorted.len() as f64).ceil().max(1.0) as usize;
    sorted[rank.min(sorted.len()) - 1]
}

/// Timing quartiles of one composition mode.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub label: &'static str,
    pub p25: Duration,
    pub p50: Duration,
    pub p75: Duration,
}

/// Outcome of [`run_bench`].
#[derive(Clone, Debug)]
pub struct BenchResult {
    pub general: BenchRow,
    pub specialized: BenchRow,
    pub equivalent: bool,
}

impl BenchResult {
    pub fn median_ratio(&self) -> f64 {
        self.general.p50.as_secs_f64() / self.specialized.p50.as_secs_f64()
    }
}

fn time_mode(f: &Curve, g: &Curve, mode: ComposeMode, reps: usize) -> Result<(Vec<Duration>, Curve)> {
    let mut times = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps {
        let start = Instant::now();
        let (h, _) = compose_with(f, g, mode)?;
        times.push(start.elapsed());
        last = Some(h);
    }
    times.sort();
    Ok((times, last.expect("at least one repetition")))
}

/// Composes `γ_i ∘ β` `reps` times in each mode on the same inputs.
pub fn run_bench(cfg: &IwrrConfig, reps: usize) -> Result<BenchResult> {
    if reps == 0 {
        return Err(Error::Precondition("need at least one repetition".into()));
    }
    let gamma = iwrr_gamma(cfg)?;
    let (tg, hg) = time_mode(&gamma, &cfg.aggregate, ComposeMode::ForceGeneral, reps)?;
    let (ts, hs) = time_mode(&gamma, &cfg.aggregate, ComposeMode::ForceSpecialized, reps)?;
    let row = |label, t: &[Duration]| BenchRow { label, p25: percentile(t, 25.0), p50: percentile(t, 50.0), p75: percentile(t, 75.0) };
    Ok(BenchResult { general: row("general", &tg), specialized: row("specialized", &ts), equivalent: hg.equivalent(&hs) })
}

fn ms(d: Duration) -> String {
    format!("{:.3}", d.as_secs_f64() * 1e3)
}

fn bench(cfg: &IwrrConfig, reps: usize, fmt: Output, out: &mut dyn Write) -> Result<()> {
    let r = run_bench(cfg, reps)?;
    match fmt {
        Output::Json => {
            let row = |b: &BenchRow| serde_json::json!({"p25Ms": ms(b.p25), "p50Ms": ms(b.p50), "p75Ms": ms(b.p75)});
            let v = serde_json::json!({
                "repetitions": reps,
                "general": row(&r.general),
                "specialized": row(&r.specialized),
                "medianRatio": format!("{:.1}", r.median_ratio()),
                "equivalent": r.equivalent,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"))
        }
        Output::Csv => {
            let mut s = String::from("percentile,general_ms,specialized_ms\n");
            for (p, a, b) in [
                ("25", r.general.p25, r.specialized.p25),
                ("50", r.general.p50, r.specialized.p50),
                ("75", r.general.p75, r.specialized.p75),
            ] {
                let _ = writeln!(s, "{p},{},{}", ms(a), ms(b));
            }
            write!(out, "{s}")
        }
    }
    .map_err(io)?;
    if !r.equivalent {
        return Err(Error::Invariant("general and specialized results differ".into()));
    }
    Ok(())
}

#[cfg(feature = "testing")]
fn oracle(cmd: &OracleCommand, seed: u64, fmt: Output, out: &mut dyn Write) -> Result<()> {
    use crate::oracle::{oracle_compose, oracle_lpi_unbounded, oracle_upi_unbounded, random_curve, CurveKind, GeneratorConfig};
    use rand::SeedableRng;

    match cmd {
        OracleCommand::Lpi { curve, y } => emit_value(&oracle_lpi_unbounded(&load(curve)?, &number(y)?), fmt, out),
        OracleCommand::Upi { curve, y } => emit_value(&oracle_upi_unbounded(&load(curve)?, &number(y)?), fmt, out),
        OracleCommand::Compose { f, g, t } => emit_value(&oracle_compose(&load(f)?, &load(g)?, &number(t)?), fmt, out),
        OracleCommand::Random { kind } => {
            let kind = match kind {
                RandomKind::Upp => CurveKind::Upp,
                RandomKind::Ua => CurveKind::UltimatelyAffine,
                RandomKind::Uc => CurveKind::UltimatelyConstant,
                RandomKind::Wui => CurveKind::WeaklyUltimatelyInfinite,
            };
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            emit_curve(&random_curve(&mut rng, kind, &GeneratorConfig::default()), fmt, out)
        }
    }
}
