//! Acceptance criteria C1-C11. Prints one `PASS`/`FAIL` line per criterion
//! and exits nonzero if any fails. A criterion id given on the command line
//! restricts the run, e.g. `cargo test --test acceptance -- C3`.

use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use subfpt::cox_renewal::{ruin_probability, simulate_ruin, solve_rq, RiskModel};
use subfpt::fractional::{
    factorized_sample, sn_stable_series_density, sn_stable_series_leading, sn_stable_series_survival, tail_asymptote,
    BrownianPassage, FractionalProblem, SnStableExit, StableParams,
};
use subfpt::models::{JumpSpec, LevyModel, ProblemTriple, Sign, SubJumps, SubordinatorModel};
use subfpt::montecarlo::{
    default_workers, estimate_lt, ks_one_sample, parallel_map, pearson, run_ensemble, Estimate, SamplerKind, Z95,
};
use subfpt::sampler::{exit_two_barrier, fpt_reduced, fpt_reduced_halving, FptSample, SamplerConfig};
use subfpt::spectrally_negative::{fpt_laplace_exponent, two_sided_exit, ScaleFunctions};
use subfpt::special::quadrature::tanh_sinh;
use subfpt::special::{gamma, gamma_complex, laplace_invert, log_barnes_g, log_gamma, mittag_leffler, MellinLine};
use subfpt::wiener_hopf::composite_rhs;

type Outcome = anyhow::Result<()>;

struct Report {
    lines: Vec<(String, bool)>,
}

impl Report {
    fn line(&mut self, id: &str, passed: bool, detail: String) {
        println!("{id} {} {detail}", if passed { "PASS" } else { "FAIL" });
        self.lines.push((id.to_string(), passed));
    }
}

const SEED: u64 = 20_240_917;

fn kinetic(level: f64, start: f64) -> subfpt::Result<ProblemTriple<f64>> {
    ProblemTriple::new(LevyModel::brownian(1.0, 0.0)?, SubordinatorModel::stable(0.5)?, SubordinatorModel::zero(), level, start)
}

fn risk() -> subfpt::Result<RiskModel<f64>> {
    RiskModel::fractional(1.0, 1.0, 1.0, 0.5)
}

fn c1(r: &mut Report) -> Outcome {
    let start = Instant::now();
    let p = kinetic(1.0, 0.0)?;
    let cfg = SamplerConfig::new(1e-3, 10.0).with_bridge(true);
    let pairs = parallel_map(100_000, 1, SEED, |_, rng| fpt_reduced_halving(&p, &cfg, rng))?;
    let coarse: Vec<FptSample> = pairs.iter().map(|s| s.0).collect();
    let fine: Vec<FptSample> = pairs.iter().map(|s| s.1).collect();
    let (ec, ef) = (estimate_lt(&coarse, 1.0, 0.0)?, estimate_lt(&fine, 1.0, 0.0)?);
    let elapsed = start.elapsed();
    let exact = (-(2f64.sqrt())).exp();
    let bias = (ec.value - ef.value).abs();
    let budget_ok = bias <= 0.01 * exact;
    let within = ec.agrees_with(exact, 3.0, bias);
    let fast = elapsed <= Duration::from_secs(120);
    r.line(
        "C1",
        budget_ok && within && fast,
        format!(
            "estimate {:.5} ± {:.5} (halved step {:.5}), target {exact:.6}, halving bias {bias:.5} (budget {:.5}), censored {:.4}, {:.1}s single-threaded",
            ec.value,
            ec.std_error,
            ef.value,
            0.01 * exact,
            ec.censored_fraction,
            elapsed.as_secs_f64()
        ),
    );
    Ok(())
}

fn c2(r: &mut Report) -> Outcome {
    let start = Instant::now();
    let m = risk()?;
    let r0 = solve_rq(&m, 0.0)?;
    let algebraic = (3.0 - 5f64.sqrt()) / 2.0;
    let psi = ruin_probability(&m, 1.0)?;
    let closed = (1.0 - algebraic) * (-algebraic).exp();
    let quoted = 0.421862;
    let hits = parallel_map(100_000, default_workers(), SEED + 2, |_, rng| {
        Ok(if simulate_ruin(&m, 1.0, 1000, rng)?.finite { 1.0 } else { 0.0 })
    })?;
    let e = Estimate::from_values(&hits)?;
    let elapsed = start.elapsed();
    let ok = (r0 - algebraic).abs() <= 1e-12
        && (psi - closed).abs() <= 1e-12
        && (psi - quoted).abs() <= 1e-4
        && e.agrees_with(psi, 3.0, 0.0)
        && elapsed <= Duration::from_secs(60);
    r.line(
        "C2",
        ok,
        format!(
            "R(0) error {:.1e}; ruin(1) = {psi:.7} (closed form gap {:.1e}, quoted {quoted} gap {:.1e}); renewal MC {:.5} ± {:.5}; {:.1}s",
            (r0 - algebraic).abs(),
            (psi - closed).abs(),
            (psi - quoted).abs(),
            e.value,
            e.std_error,
            elapsed.as_secs_f64()
        ),
    );
    Ok(())
}

fn c3(r: &mut Report) -> Outcome {
    let m = risk()?;
    let problem = m.problem(0.0)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, &(q, p, v)) in [(1.0, 2.0, 0.5), (0.5, 1.0, 2.0), (2.0, 0.5, 0.0)].iter().enumerate() {
        let rhs = composite_rhs(&problem, q, p, v)?;
        let vals = parallel_map(100_000, default_workers(), SEED + 30 + k as u64, |_, rng| {
            let a = rng.exp1() / p;
            let s = simulate_ruin(&m, a, 1000, rng)?;
            Ok(if s.finite { (-q * s.time - v * s.overshoot).exp() } else { 0.0 })
        })?;
        let e = Estimate::from_values(&vals)?;
        ok &= e.agrees_with(rhs, 3.0, 0.0);
        parts.push(format!("({q},{p},{v}): {rhs:.5} vs {:.5} ± {:.5}", e.value, e.std_error));
    }
    r.line("C3", ok, parts.join("; "));
    Ok(())
}

fn c4(r: &mut Report) -> Outcome {
    let m = risk()?;
    let batch = parallel_map(40_000, default_workers(), SEED + 4, |_, rng| simulate_ruin(&m, 1.0, 1000, rng))?;
    let finite: Vec<&FptSample> = batch.iter().filter(|s| s.finite).take(10_000).collect();
    anyhow::ensure!(finite.len() == 10_000, "only {} ruined paths", finite.len());
    let ov: Vec<f64> = finite.iter().map(|s| s.overshoot).collect();
    let tm: Vec<f64> = finite.iter().map(|s| s.time).collect();
    let ks = ks_one_sample(&ov, |x| 1.0 - (-x).exp())?;
    let corr = pearson(&tm, &ov, Z95)?;
    r.line(
        "C4",
        !ks.rejects(0.01) && corr.contains(0.0),
        format!(
            "KS D = {:.4}, p = {:.3}; corr(time, overshoot) = {:.4}, 95% CI ({:.4}, {:.4})",
            ks.statistic, ks.p_value, corr.r, corr.ci.0, corr.ci.1
        ),
    );
    Ok(())
}

fn c5(r: &mut Report) -> Outcome {
    let p = kinetic(2.0, 1.0)?;
    let w = ScaleFunctions::new(&p, 1.0)?.w_by_inversion(1.0)?.value;
    let w_exact = 2f64.sqrt() * 2f64.sqrt().sinh();
    let (up, _) = two_sided_exit(&p, 2.0, 1.0, 1.0)?;
    let up_exact = 1.0 / (2.0 * 2f64.sqrt().cosh());
    let cfg = SamplerConfig::new(1e-3, 10.0).with_bridge(true);
    let vals = parallel_map(100_000, default_workers(), SEED + 5, |_, rng| {
        let s = exit_two_barrier(&p, 0.0, &cfg, rng)?;
        Ok(if s.finite && s.upper { (-s.time).exp() } else { 0.0 })
    })?;
    let e = Estimate::from_values(&vals)?;
    let ok = (w - w_exact).abs() <= 1e-8 && (up - up_exact).abs() <= 1e-10 && e.agrees_with(up, 3.0, 0.0);
    r.line(
        "C5",
        ok,
        format!(
            "W(1) = {w:.10} (closed form gap {:.1e}); upper exit {up:.6} (closed form gap {:.1e}); two-barrier MC {:.5} ± {:.5}",
            (w - w_exact).abs(),
            (up - up_exact).abs(),
            e.value,
            e.std_error
        ),
    );
    Ok(())
}

fn c6(r: &mut Report) -> Outcome {
    let x = LevyModel::new(1.0, 0.3, JumpSpec::CompoundPoissonExp { rate: 1.0, jump_rate: 2.0, sign: Sign::Negative })?;
    let sub = SubordinatorModel::new(0.0, SubJumps::TemperedStable { alpha: 0.6, theta: 1.0 })?;
    let base = ProblemTriple::new(x, sub, SubordinatorModel::zero(), 1.0, 0.0)?;
    let q = 1.0;
    let phi_t = fpt_laplace_exponent(&base, q)?;
    let cfg = SamplerConfig::new(1e-3, 10.0).with_bridge(true);
    let mut ok = true;
    let mut est = Vec::new();
    let mut parts = vec![format!("φ_T(1) = {phi_t:.6}")];
    for (k, &a) in [0.5, 1.0].iter().enumerate() {
        let batch = run_ensemble(&base.with_level(a), SamplerKind::Reduced, &cfg, 50_000, default_workers(), SEED + 60 + k as u64)?;
        let e = estimate_lt(&batch, q, 0.0)?;
        let target = (-phi_t * a).exp();
        ok &= e.agrees_with(target, 3.0, 0.0);
        parts.push(format!("a={a}: {target:.5} vs {:.5} ± {:.5}", e.value, e.std_error));
        est.push(e);
    }
    // E[e^{-qT_{a1+a2}}] = E[e^{-qT_{a1}}] E[e^{-qT_{a2}}] with a1 = a2 = 0.5
    let prod = est[0].value * est[0].value;
    let se = ((2.0 * est[0].value * est[0].std_error).powi(2) + est[1].std_error.powi(2)).sqrt();
    let gap = (prod - est[1].value).abs();
    ok &= gap <= 3.0 * se;
    parts.push(format!("product gap {gap:.5} (3 s.e. {:.5})", 3.0 * se));
    r.line("C6", ok, parts.join("; "));
    Ok(())
}

fn kinetic_density_problem() -> subfpt::Result<FractionalProblem<f64, BrownianPassage<f64>>> {
    FractionalProblem::new(0.5, BrownianPassage::new(1.0, 1.0, 1.0)?)
}

fn factorized_draws(n: usize) -> subfpt::Result<Vec<f64>> {
    let base = BrownianPassage::new(1.0, 1.0, 1.0)?;
    parallel_map(n, default_workers(), SEED + 7, |_, rng| {
        let t0x = base.sample(rng);
        factorized_sample(0.5, t0x, rng)
    })
}

fn c7(r: &mut Report, draws: &[f64]) -> Outcome {
    let fp = kinetic_density_problem()?;
    let line = MellinLine::new(0.2, 60.0, 4096)?;
    let upper = 1e6f64;
    let body = tanh_sinh(|u: f64| { let t = u.exp(); t * fp.density(t, 0, &line).map(|d| d.value).unwrap_or(f64::NAN) }, (1e-8f64).ln(), upper.ln(), 1e-9)?;
    let integral = body.value + tail_asymptote(1.0, 0.5, upper)?;
    let mass_ok = (integral - 1.0).abs() <= 1e-3 && (fp.mass()? - 1.0).abs() <= 1e-3;

    let edges: Vec<f64> = (0..=20).map(|k| 10f64.powf(-2.0 + 4.0 * k as f64 / 20.0)).collect();
    let cl = MellinLine::new(-0.2, 60.0, 4096)?;
    let cdfs = edges.iter().map(|&t| fp.cdf(t, &cl)).collect::<subfpt::Result<Vec<_>>>()?;
    let n = draws.len() as f64;
    // simultaneous 95% band over the 20 bins
    let z_band = 3.0233;
    let (mut worst, mut pointwise_in, mut band_ok) = (0.0f64, 0, true);
    for k in 0..20 {
        let p = cdfs[k + 1].value - cdfs[k].value;
        let count = draws.iter().filter(|&&t| t > edges[k] && t <= edges[k + 1]).count() as f64;
        let se = (p * (1.0 - p) / n).sqrt();
        let err = cdfs[k + 1].abs_error + cdfs[k].abs_error;
        let z = ((count / n - p).abs() - err).max(0.0) / se;
        worst = worst.max(z);
        pointwise_in += usize::from(z <= Z95);
        band_ok &= z <= z_band;
    }

    let mut contour_ok = true;
    let mut max_gap = 0.0f64;
    for &t in &[0.1, 1.0, 10.0] {
        let a = fp.density(t, 0, &line)?;
        let b = fp.density(t, 0, &MellinLine::new(-0.4, 60.0, 4096)?)?;
        let gap = (a.value - b.value).abs();
        max_gap = max_gap.max(gap);
        contour_ok &= gap <= a.abs_error + b.abs_error + 1e-12;
    }
    r.line(
        "C7",
        mass_ok && band_ok && contour_ok,
        format!(
            "∫f = {integral:.6}; histogram of {} draws: {pointwise_in}/20 bins inside pointwise 95% CI, max |z| {worst:.2} (band {z_band}); contour gap {max_gap:.1e}",
            draws.len()
        ),
    );
    Ok(())
}

fn c8(r: &mut Report, draws: &[f64]) -> Outcome {
    let alpha = 0.5;
    let target = 1.0 / gamma(1.5)?;
    let n = draws.len() as f64;
    let ts = [50.0, 100.0, 200.0];
    let surv: Vec<f64> = ts.iter().map(|&t| draws.iter().filter(|&&x| x > t).count() as f64 / n).collect();
    let literal: Vec<f64> = ts.iter().zip(&surv).map(|(&t, s)| s * t.powf(alpha - 1.0)).collect();
    let trend = |v: &[f64], c: f64| (v[0] - c).abs() >= (v[1] - c).abs() && (v[1] - c).abs() >= (v[2] - c).abs();
    let near = |v: &[f64], c: f64| v.iter().all(|x| (x / c - 1.0).abs() <= 0.15);
    r.line(
        "C8",
        near(&literal, target) && trend(&literal, target),
        format!("P(T>t)·t^(α-1) at t = 50, 100, 200: {:.5}, {:.5}, {:.5} vs {target:.6}", literal[0], literal[1], literal[2]),
    );

    let truncated: Vec<f64> = ts
        .iter()
        .map(|&t| draws.iter().map(|&x| x.min(t)).sum::<f64>() / n * t.powf(alpha - 1.0))
        .collect();
    let tail_target = 1.0 / gamma(1.0 - alpha)?;
    let tail: Vec<f64> = ts.iter().zip(&surv).map(|(&t, s)| s * t.powf(alpha)).collect();
    r.line(
        "C8-corrected",
        near(&truncated, target) && trend(&truncated, target) && near(&tail, tail_target),
        format!(
            "E[T∧t]·t^(α-1): {:.5}, {:.5}, {:.5} vs {target:.6}; P(T>t)·t^α: {:.5}, {:.5}, {:.5} vs {tail_target:.6}",
            truncated[0], truncated[1], truncated[2], tail[0], tail[1], tail[2]
        ),
    );
    Ok(())
}

fn c9(r: &mut Report) -> Outcome {
    let pi = std::f64::consts::PI;
    let mut refl = 0.0f64;
    for k in 0..40 {
        let z = Complex64::new(-4.7 + 0.25 * k as f64, -3.0 + 0.15 * k as f64);
        let lhs = gamma_complex(z)? * gamma_complex(1.0 - z)?;
        let rhs = pi / (z * pi).sin();
        refl = refl.max((lhs - rhs).norm() / rhs.norm());
    }
    let mut barnes = 0.0f64;
    for &tau in &[0.5, 1.0 / 1.6, 1.25] {
        for k in 0..6 {
            let z = Complex64::new(0.3 + 1.1 * k as f64, -2.0 + 0.9 * k as f64);
            let d = (log_barnes_g(z + 1.0, tau)? - log_gamma(z / tau)? - log_barnes_g(z, tau)?).exp() - 1.0;
            barnes = barnes.max(d.norm());
        }
    }
    let sp = StableParams::new(1.5, 0.55, 1.0)?;
    for k in 0..6 {
        let z = Complex64::new(0.4 + 0.3 * k as f64, -1.0 + 0.4 * k as f64);
        let dm = (sp.log_w_minus(z + 1.0)? - sp.log_w_minus(z)?).exp() / sp.phi_minus(z)? - 1.0;
        let dp = (sp.log_w_plus(z + 1.0)? - sp.log_w_plus(z)?).exp() / sp.phi_plus(z)? - 1.0;
        barnes = barnes.max(dm.norm()).max(dp.norm());
    }
    // e·erfc(1)
    let ml_exact = 0.427_583_576_155_807;
    let ml = mittag_leffler(0.5f64, -1.0)?.value;
    type Pair = (fn(Complex64) -> Complex64, fn(f64) -> f64);
    let pairs: [Pair; 5] = [
        (|s| 1.0 / (s + 1.0), |t| (-t).exp()),
        (|s| 1.0 / (s * s), |t| t),
        (|s| 1.0 / (s * s + 1.0), f64::sin),
        (|s| 1.0 / s.sqrt(), |t| 1.0 / (std::f64::consts::PI * t).sqrt()),
        (|s| 1.0 / ((s + 1.0) * (s + 2.0)), |t| (-t).exp() - (-2.0 * t).exp()),
    ];
    let mut lap = 0.0f64;
    for (f, g) in pairs {
        for &t in &[0.5, 1.0, 3.0] {
            let v = laplace_invert(|s| Ok(f(s)), t, 0.0, 1e-10)?.value;
            lap = lap.max((v - g(t)).abs());
        }
    }
    let ok = refl <= 1e-12 && barnes <= 1e-9 && (ml - ml_exact).abs() <= 1e-10 && lap <= 1e-8;
    r.line(
        "C9",
        ok,
        format!(
            "reflection {refl:.1e}; Barnes recurrences {barnes:.1e}; E_0.5(-1) = {ml:.12} (gap {:.1e}); Laplace pairs {lap:.1e}",
            (ml - ml_exact).abs()
        ),
    );
    Ok(())
}

fn c10(r: &mut Report) -> Outcome {
    let (index, alpha) = (1.6, 0.5);
    let fp = FractionalProblem::new(alpha, SnStableExit::new(index, 1.0)?)?;
    let line = MellinLine::new(-0.1, 60.0, 4096)?;
    let split = 5.0f64;
    let far = 1e5f64;
    let log_density = |u: f64, series: bool| {
        let t = u.exp();
        let f = if series {
            sn_stable_series_density(index, alpha, t, 200).map(|d| d.value)
        } else {
            fp.density(t, 0, &line).map(|d| d.value)
        };
        t * f.unwrap_or(f64::NAN)
    };
    let near = tanh_sinh(|u| log_density(u, false), (1e-6f64).ln(), split.ln(), 1e-9)?;
    let mid = tanh_sinh(|u| log_density(u, true), split.ln(), far.ln(), 1e-9)?;
    let beyond = sn_stable_series_survival(index, alpha, far, 200)?;
    let total = near.value + mid.value + beyond.value;
    let t = 1000.0;
    let ratio = sn_stable_series_density(index, alpha, t, 200)?.value / sn_stable_series_leading(index, alpha, t)?;
    r.line(
        "C10",
        (total - 1.0).abs() <= 1e-2 && (ratio - 1.0).abs() <= 0.05,
        format!(
            "∫f = {total:.6} (Mellin below t = {split}: {:.6}, series above: {:.6}); series/leading at t = 1000: {ratio:.4}",
            near.value,
            mid.value + beyond.value
        ),
    );
    Ok(())
}

fn bits(s: &FptSample) -> (u64, u64, u64, bool, bool) {
    (s.time.to_bits(), s.overshoot.to_bits(), s.elapsed.to_bits(), s.finite, s.censored)
}

fn c11(r: &mut Report) -> Outcome {
    let p = kinetic(1.0, 0.0)?;
    let cfg = SamplerConfig::new(1e-2, 10.0).with_bridge(true);
    let mut same = true;
    for kind in [SamplerKind::Reduced, SamplerKind::Direct] {
        let base: Vec<_> = run_ensemble(&p, kind, &cfg, 2000, 1, SEED)?.iter().map(bits).collect();
        for w in [4, 8] {
            let other: Vec<_> = run_ensemble(&p, kind, &cfg, 2000, w, SEED)?.iter().map(bits).collect();
            same &= base == other;
        }
    }
    let direct_ok = {
        let mut rng = subfpt::sampler::RngStream::new(SEED, 17);
        let a = fpt_reduced(&p, &cfg, &mut rng)?;
        let b = run_ensemble(&p, SamplerKind::Reduced, &cfg, 18, 3, SEED)?[17];
        bits(&a) == bits(&b)
    };
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_subfpt")).arg("selftest").output()?;
    let elapsed = start.elapsed();
    let green = out.status.success();
    let failed: Vec<String> =
        String::from_utf8_lossy(&out.stdout).lines().filter(|l| !l.starts_with("PASS")).map(str::to_owned).collect();
    r.line(
        "C11",
        same && direct_ok && green && elapsed <= Duration::from_secs(600),
        format!(
            "ensembles bit-identical across 1/4/8 workers: {}; selftest exit {:?} in {:.1}s{}",
            same && direct_ok,
            out.status.code(),
            elapsed.as_secs_f64(),
            if failed.is_empty() { String::new() } else { format!("; {}", failed.join(" | ")) }
        ),
    );
    Ok(())
}

fn guard(id: &str, out: Outcome, report: &mut Report) {
    if let Err(e) = out {
        report.line(id, false, format!("error: {e:#}"));
    }
}

fn main() {
    let wanted: Vec<String> = std::env::args().skip(1).filter(|a| a.starts_with('C')).collect();
    let run = |id: &str| wanted.is_empty() || wanted.iter().any(|w| w == id);
    let mut report = Report { lines: Vec::new() };
    type Simple = fn(&mut Report) -> Outcome;
    let simple: [(&str, Simple); 7] = [("C1", c1), ("C2", c2), ("C3", c3), ("C4", c4), ("C5", c5), ("C6", c6), ("C9", c9)];
    for (id, f) in simple {
        if run(id) {
            let out = f(&mut report);
            guard(id, out, &mut report);
        }
    }
    if run("C7") || run("C8") {
        match factorized_draws(1_000_000) {
            Ok(draws) => {
                if run("C7") {
                    let out = c7(&mut report, &draws);
                    guard("C7", out, &mut report);
                }
                if run("C8") {
                    let out = c8(&mut report, &draws);
                    guard("C8", out, &mut report);
                }
            }
            Err(e) => report.line("C7", false, format!("error: {e}")),
        }
    }
    for (id, f) in [("C10", c10 as Simple), ("C11", c11)] {
        if run(id) {
            let out = f(&mut report);
            guard(id, out, &mut report);
        }
    }
    let failed: Vec<&str> = report.lines.iter().filter(|l| !l.1).map(|l| l.0.as_str()).collect();
    println!("acceptance: {} passed, {} failed{}", report.lines.len() - failed.len(), failed.len(),
        if failed.is_empty() { String::new() } else { format!(" ({})", failed.join(", ")) });
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
