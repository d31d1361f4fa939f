//! Command-line front end: configuration files, subcommands and CSV output.

pub mod config;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

use subfpt::cox_renewal::{ruin_sweep, write_ruin_csv, RiskModel};
use subfpt::fractional::{
    sn_stable_series_density, tail_asymptote, truncated_mean_asymptote, write_density_csv, BaseMellin,
    BrownianPassage, DensityPoint, FractionalProblem, SnStableExit, StableParams,
};
use subfpt::models::ProblemTriple;
use subfpt::montecarlo::{default_workers, estimate_lt, parallel_map, run_ensemble, SamplerKind, THREADS_ENV};
use subfpt::sampler::{
    compose, fpt_direct, fpt_dual, fpt_reduced, invert_path, simulate_levy, simulate_subordinator, write_samples_csv,
    PathRecord, RngStream,
};
use subfpt::special::MellinLine;
use subfpt::spectrally_negative::{fpt_laplace_exponent, fpt_laplace_transform, scale_functions};
use subfpt::wiener_hopf::{composite_rhs, composite_rhs_q0};

use config::{GridSpec, LevySpec, RunConfig, SubSpec};

/// Exit status for invalid input.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status for numerical non-convergence or a failed self-test.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "subfpt", version, about = "First passage of time-changed Lévy processes over a moving boundary")]
pub struct Cli {
    /// Base seed of all random streams.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads for Monte Carlo ensembles.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub workers: Option<usize>,
    /// Monte Carlo sample count.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// First-passage batches (`time,overshoot,finite,censored`) or one set of paths (`t,value,kind`).
    Simulate {
        config: PathBuf,
        /// Write one path of Sub, X, ℓ and X∘ℓ instead of a passage batch.
        #[arg(long)]
        paths: bool,
    },
    /// Laplace exponent and transform of the passage time (`q,exponent,transform,mcEstimate,mcStdError,censoredFraction`).
    FptLt { config: PathBuf },
    /// Both sides of the Wiener-Hopf identity over exponential levels (`q,p,v,rhs,mcEstimate,mcStdError,zScore`).
    WhCheck { config: PathBuf },
    /// Scale functions on a grid (`x,W,Z,errW`).
    ScaleFn { config: PathBuf },
    /// Passage-time density under a stable time change (`t,f,errEstimate`).
    Density {
        config: PathBuf,
        /// Write `t,survival,tailAsymptote,truncatedMeanAsymptote` instead of the density.
        #[arg(long)]
        tail: bool,
    },
    /// Ruin probabilities over a capital grid (`a,ruinProb`).
    Ruin { config: PathBuf },
    /// Run the invariant suite.
    Selftest,
}

/// A configuration or usage problem (exit status 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ValidationError(pub String);

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    ValidationError(msg.into()).into()
}

/// Exit status for an error raised by a command.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<subfpt::Error>() {
            return if err.is_numerical() { EXIT_NUMERICAL } else { EXIT_VALIDATION };
        }
        if cause.downcast_ref::<SelftestFailed>().is_some() {
            return EXIT_NUMERICAL;
        }
    }
    EXIT_VALIDATION
}

#[derive(Debug, thiserror::Error)]
#[error("{0} self-test check(s) failed")]
struct SelftestFailed(usize);

/// Parses `argv`, runs the command and returns the exit status.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

struct Loaded {
    cfg: RunConfig,
    hash: String,
}

fn load(path: &PathBuf) -> anyhow::Result<Loaded> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let cfg = RunConfig::parse(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let hash = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    Ok(Loaded { cfg, hash })
}

fn output(cli: &Cli) -> anyhow::Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).map_err(|e| invalid(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

/// Writes the reproducibility comment, then the CSV body produced by `body`.
fn emit<F>(cli: &Cli, hash: &str, body: F) -> anyhow::Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> subfpt::Result<()>,
{
    let mut buf = Vec::new();
    writeln!(buf, "# config_sha256={hash} seed={}", cli.seed)?;
    body(&mut buf)?;
    let mut out = output(cli)?;
    out.write_all(&buf)?;
    out.flush()?;
    Ok(())
}

fn workers(cli: &Cli) -> usize {
    cli.workers.filter(|&w| w > 0).unwrap_or_else(default_workers)
}

fn sampler_kind(cfg: &RunConfig) -> anyhow::Result<SamplerKind> {
    cfg.sampler.method.parse::<SamplerKind>().map_err(|e| invalid(e.to_string()))
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Simulate { config, paths } => simulate(cli, config, *paths),
        Command::FptLt { config } => fpt_lt(cli, config),
        Command::WhCheck { config } => wh_check(cli, config),
        Command::ScaleFn { config } => scale_fn(cli, config),
        Command::Density { config, tail } => density(cli, config, *tail),
        Command::Ruin { config } => ruin(cli, config),
        Command::Selftest => selftest(cli),
    }
}

fn simulate(cli: &Cli, path: &PathBuf, paths: bool) -> anyhow::Result<()> {
    let Loaded { cfg, hash } = load(path)?;
    let problem = cfg.problem()?;
    if paths {
        let mut rng = RngStream::new(cli.seed, 0);
        let s = &cfg.sampler;
        let sub = simulate_subordinator(&problem.time_change, s.horizon, s.step, &mut rng)?;
        let levy = simulate_levy(&problem.x_process, s.horizon, s.step, &mut rng)?;
        let ell = invert_path(&sub, s.phys_step.unwrap_or(s.step))?;
        let xl = compose(&levy, &ell)?;
        return emit(cli, &hash, |buf| write_paths(&[&sub, &levy, &ell, &xl], buf));
    }
    let n = cli.n.unwrap_or(1000);
    let batch = run_ensemble(&problem, sampler_kind(&cfg)?, &cfg.sampler.config(), n, workers(cli), cli.seed)?;
    emit(cli, &hash, |buf| write_samples_csv(&batch, buf))
}

fn write_paths(paths: &[&PathRecord], buf: &mut Vec<u8>) -> subfpt::Result<()> {
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(["t", "value", "kind"])?;
    for p in paths {
        let kind = p.kind.to_string();
        for (t, v) in p.times.iter().zip(&p.values) {
            w.write_record([t.to_string(), v.to_string(), kind.clone()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fpt_lt(cli: &Cli, path: &PathBuf) -> anyhow::Result<()> {
    let Loaded { cfg, hash } = load(path)?;
    let problem = cfg.problem()?;
    let qs = if cfg.q.is_empty() { vec![1.0] } else { cfg.q.clone() };
    let batch = match cli.n {
        Some(n) if n > 0 => {
            Some(run_ensemble(&problem, sampler_kind(&cfg)?, &cfg.sampler.config(), n, workers(cli), cli.seed)?)
        }
        _ => None,
    };
    let mut rows = Vec::new();
    for &q in &qs {
        let exponent = fpt_laplace_exponent(&problem, q)?;
        let transform = fpt_laplace_transform(&problem, q)?;
        let mc = batch.as_ref().map(|b| estimate_lt(b, q, 0.0)).transpose()?;
        rows.push([
            q.to_string(),
            exponent.to_string(),
            transform.to_string(),
            fmt_opt(mc.map(|e| e.value)),
            fmt_opt(mc.map(|e| e.std_error)),
            fmt_opt(mc.map(|e| e.censored_fraction)),
        ]);
    }
    emit(cli, &hash, |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["q", "exponent", "transform", "mcEstimate", "mcStdError", "censoredFraction"])?;
        for r in &rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    })
}

/// Passage samples over independent `Exp(p)` levels above the start.
pub fn exponential_level_batch(
    problem: &ProblemTriple<f64>,
    kind: SamplerKind,
    cfg: &subfpt::sampler::SamplerConfig,
    p: f64,
    n: usize,
    workers: usize,
    seed: u64,
) -> subfpt::Result<Vec<subfpt::sampler::FptSample>> {
    parallel_map(n, workers, seed, |_, rng| {
        let a = rng.exp1() / p;
        let pr = problem.with_level(problem.start + a);
        match kind {
            SamplerKind::Direct => fpt_direct(&pr, cfg, rng),
            SamplerKind::Reduced => fpt_reduced(&pr, cfg, rng),
            SamplerKind::Dual => fpt_dual(&pr, cfg, rng),
        }
    })
}

fn wh_check(cli: &Cli, path: &PathBuf) -> anyhow::Result<()> {
    let Loaded { cfg, hash } = load(path)?;
    let problem = cfg.problem()?;
    if cfg.triples.is_empty() {
        bail!(invalid("wh-check needs a nonempty \"triples\" list of [q, p, v]"));
    }
    let kind = sampler_kind(&cfg)?;
    let mut rows = Vec::new();
    for (i, &[q, p, v]) in cfg.triples.iter().enumerate() {
        let rhs = if q == 0.0 { composite_rhs_q0(&problem, p, v)? } else { composite_rhs(&problem, q, p, v)? };
        let mc = match cli.n {
            Some(n) if n > 0 => {
                let seed = cli.seed.wrapping_add(i as u64);
                let b = exponential_level_batch(&problem, kind, &cfg.sampler.config(), p, n, workers(cli), seed)?;
                Some(estimate_lt(&b, q, v)?)
            }
            _ => None,
        };
        let z = mc.map(|e| (e.value - rhs) / e.std_error.max(f64::MIN_POSITIVE));
        rows.push([
            q.to_string(),
            p.to_string(),
            v.to_string(),
            rhs.to_string(),
            fmt_opt(mc.map(|e| e.value)),
            fmt_opt(mc.map(|e| e.std_error)),
            fmt_opt(z),
        ]);
    }
    emit(cli, &hash, |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["q", "p", "v", "rhs", "mcEstimate", "mcStdError", "zScore"])?;
        for r in &rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    })
}

fn scale_fn(cli: &Cli, path: &PathBuf) -> anyhow::Result<()> {
    let Loaded { cfg, hash } = load(path)?;
    let problem = cfg.problem()?;
    let q = cfg.q.first().copied().unwrap_or(0.0);
    let grid = cfg.grid_or(GridSpec::Range { from: 0.0, to: 2.0, count: 21 });
    let table = scale_functions(&problem, q, &grid)?;
    emit(cli, &hash, |buf| table.write_csv(buf))
}

enum DensityBase {
    Brownian(BrownianPassage<f64>),
    Stable(StableParams<f64>),
    SnSeries { index: f64, x: f64, exit: SnStableExit<f64> },
}

fn density_base(cfg: &RunConfig) -> anyhow::Result<(f64, DensityBase)> {
    let alpha = match cfg.time_change {
        SubSpec::Stable { alpha, drift } => {
            if drift != 0.0 {
                bail!(invalid("density needs a driftless stable time change"));
            }
            alpha
        }
        _ => bail!(invalid("density needs a driftless stable time change")),
    };
    if !matches!(cfg.boundary, SubSpec::Zero) && !matches!(cfg.boundary, SubSpec::Drift { delta } if delta == 0.0) {
        bail!(invalid("density needs a zero boundary"));
    }
    let x = cfg.level - cfg.start;
    if !(x > 0.0) {
        bail!(invalid("density needs level > start"));
    }
    let base = match cfg.x_process {
        LevySpec::Bm { sigma2, drift } => DensityBase::Brownian(BrownianPassage::new(drift, sigma2, x)?),
        LevySpec::Stable { index, rho } => {
            // passage of X above x is the exit of x - X below 0, whose positivity is 1 - ρ
            let dual_rho = 1.0 - rho;
            let sn = index > 1.0 && (dual_rho - 1.0 / index).abs() < 1e-12;
            if sn && cfg.density.method != "mellin" {
                DensityBase::SnSeries { index, x, exit: SnStableExit::new(index, x)? }
            } else {
                DensityBase::Stable(StableParams::new(index, dual_rho, x)?)
            }
        }
        _ => bail!(invalid("density supports x_process kinds bm and stable")),
    };
    if cfg.density.method == "series" && !matches!(base, DensityBase::SnSeries { .. }) {
        bail!(invalid("the series method needs a spectrally positive stable X (ρ = 1 - 1/index)"));
    }
    Ok((alpha, base))
}

fn density_points<B: BaseMellin<f64>>(
    fp: &FractionalProblem<f64, B>,
    ts: &[f64],
    n: u32,
    line: &MellinLine<f64>,
) -> subfpt::Result<Vec<DensityPoint>> {
    fp.density_grid(ts, n, line)
}

fn default_abscissa(lo: f64, hi: f64, negative: bool) -> f64 {
    let lo = lo.max(-1.0);
    let hi = if negative { hi.min(0.0) } else { hi };
    0.5 * (lo + hi)
}

fn density(cli: &Cli, path: &PathBuf, tail: bool) -> anyhow::Result<()> {
    let Loaded { cfg, hash } = load(path)?;
    let (alpha, base) = density_base(&cfg)?;
    let ts = cfg.grid_or(GridSpec::Range { from: 0.1, to: 5.0, count: 50 });
    if ts.iter().any(|&t| !(t > 0.0)) {
        bail!(invalid("density grid must be positive"));
    }
    let d = &cfg.density;
    let line_for = |lo: f64, hi: f64, negative: bool| -> subfpt::Result<MellinLine<f64>> {
        MellinLine::new(d.abscissa.unwrap_or_else(|| default_abscissa(lo, hi, negative)), d.half_width, d.nodes)
    };
    if tail {
        let (survival, mean) = match &base {
            DensityBase::Brownian(b) => survival_rows(&FractionalProblem::new(alpha, *b)?, &ts, &line_for)?,
            DensityBase::Stable(s) => survival_rows(&FractionalProblem::new(alpha, *s)?, &ts, &line_for)?,
            DensityBase::SnSeries { exit, .. } => survival_rows(&FractionalProblem::new(alpha, *exit)?, &ts, &line_for)?,
        };
        return emit(cli, &hash, |buf| {
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(["t", "survival", "errEstimate", "tailAsymptote", "truncatedMeanAsymptote"])?;
            for (&t, &(s, e)) in ts.iter().zip(&survival) {
                let ta = mean.map(|m| tail_asymptote(m, alpha, t)).transpose()?;
                let tm = mean.map(|m| truncated_mean_asymptote(m, alpha, t)).transpose()?;
                w.write_record([t.to_string(), s.to_string(), e.to_string(), fmt_opt(ta), fmt_opt(tm)])?;
            }
            w.flush()?;
            Ok(())
        });
    }
    let n = d.derivative;
    let points = match &base {
        DensityBase::Brownian(b) => {
            let fp = FractionalProblem::new(alpha, *b)?;
            let (lo, hi) = fp.strip();
            density_points(&fp, &ts, n, &line_for(lo, hi, false)?)?
        }
        DensityBase::Stable(s) => {
            let fp = FractionalProblem::new(alpha, *s)?;
            let (lo, hi) = fp.strip();
            density_points(&fp, &ts, n, &line_for(lo, hi, false)?)?
        }
        DensityBase::SnSeries { index, x, exit } => {
            let fp = FractionalProblem::new(alpha, *exit)?;
            let (lo, hi) = fp.strip();
            let line = line_for(lo, hi, false)?;
            // T̂ from x equals x^{index/α} times T̂ from 1 in law
            let c = x.powf(-index / alpha);
            let mut pts = Vec::with_capacity(ts.len());
            for &t in &ts {
                let m = fp.density(t, n, &line)?;
                let pick = if n == 0 && d.method != "mellin" {
                    match sn_stable_series_density(*index, alpha, t * c, 400) {
                        Ok(s) if s.value.is_finite() && s.abs_error * c < m.abs_error || d.method == "series" => {
                            Some((s.value * c, s.abs_error * c))
                        }
                        _ => None,
                    }
                } else {
                    None
                };
                let (f, err) = pick.unwrap_or((m.value, m.abs_error));
                pts.push(DensityPoint { t, f, err });
            }
            pts
        }
    };
    emit(cli, &hash, |buf| write_density_csv(&points, buf))
}

type SurvivalRows = (Vec<(f64, f64)>, Option<f64>);

fn survival_rows<B: BaseMellin<f64>, L>(fp: &FractionalProblem<f64, B>, ts: &[f64], line_for: &L) -> anyhow::Result<SurvivalRows>
where
    L: Fn(f64, f64, bool) -> subfpt::Result<MellinLine<f64>>,
{
    let (lo, hi) = fp.strip();
    let line = line_for(lo, hi, true)?;
    if !(line.abscissa < 0.0) {
        bail!(invalid("survival needs a negative contour abscissa"));
    }
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let s = fp.survival(t, &line)?;
        rows.push((s.value, s.abs_error));
    }
    Ok((rows, fp.base.mean()))
}

fn risk_model(cfg: &RunConfig) -> anyhow::Result<RiskModel<f64>> {
    let (lambda, p) = match cfg.x_process {
        LevySpec::Claims { lambda, p } => (lambda, p),
        _ => bail!(invalid("ruin needs x_process of kind \"claims\"")),
    };
    Ok(RiskModel::new(lambda, p, cfg.time_change.model()?, cfg.boundary.model()?)?)
}

fn ruin(cli: &Cli, path: &PathBuf) -> anyhow::Result<()> {
    let Loaded { cfg, hash } = load(path)?;
    let model = risk_model(&cfg)?;
    let grid = cfg.grid_or(GridSpec::Range { from: 0.0, to: 5.0, count: 11 });
    let rows = ruin_sweep(&model, &grid)?;
    emit(cli, &hash, |buf| write_ruin_csv(&rows, buf))
}

fn selftest(cli: &Cli) -> anyhow::Result<()> {
    let checks = subfpt::selftest::run(cli.seed, workers(cli));
    let mut out = output(cli)?;
    let mut failed = 0;
    for c in &checks {
        if !c.passed {
            failed += 1;
        }
        writeln!(out, "{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail)
            .context("writing self-test report")?;
    }
    out.flush()?;
    if failed > 0 {
        return Err(anyhow!(SelftestFailed(failed)));
    }
    Ok(())
}
