//! Fast invariant suite behind the `selftest` command.

use num_complex::Complex64;

use crate::cox_renewal::{ruin_probability, simulate_ruin, solve_rq, RiskModel};
use crate::error::Result;
use crate::fractional::{sn_stable_series_density, BrownianPassage, FractionalProblem, SnStableExit, StableParams};
use crate::models::{LevyModel, ProblemTriple, SubordinatorModel};
use crate::montecarlo::{estimate_lt, parallel_map, run_ensemble, Estimate, SamplerKind};
use crate::sampler::SamplerConfig;
use crate::spectrally_negative::{fpt_laplace_transform, ScaleFunctions};
use crate::special::{gamma_complex, laplace_invert, mittag_leffler, MellinLine};
use crate::wiener_hopf::WhFactor;

/// Outcome of one invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type CheckFn = fn(u64, usize) -> Result<(bool, String)>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("gamma_reflection", gamma_reflection),
    ("barnes_recurrence", barnes_recurrence),
    ("mittag_leffler_value", mittag_leffler_value),
    ("laplace_round_trips", laplace_round_trips),
    ("fractional_kinetic_transform", fractional_kinetic_transform),
    ("scale_function_inversion", scale_function_inversion),
    ("wiener_hopf_residual", wiener_hopf_residual),
    ("ruin_root", ruin_root),
    ("fractional_density_contours", fractional_density_contours),
    ("sn_series_vs_mellin", sn_series_vs_mellin),
    ("ensemble_determinism", ensemble_determinism),
    ("mc_fractional_kinetic", mc_fractional_kinetic),
    ("mc_ruin", mc_ruin),
];

/// Runs every check; numerical errors count as failures.
pub fn run(seed: u64, workers: usize) -> Vec<Check> {
    CHECKS
        .iter()
        .map(|(name, f)| match f(seed, workers) {
            Ok((passed, detail)) => Check { name, passed, detail },
            Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
        })
        .collect()
}

fn gamma_reflection(_: u64, _: usize) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for &(x, y) in &[(0.3, 0.0), (0.7, 1.2), (-2.4, 0.5), (4.1, -3.0)] {
        let z = Complex64::new(x, y);
        let lhs = gamma_complex(z)? * gamma_complex(1.0 - z)?;
        let rhs = std::f64::consts::PI / (z * std::f64::consts::PI).sin();
        worst = worst.max((lhs - rhs).norm() / rhs.norm());
    }
    Ok((worst <= 1e-12, format!("max rel {worst:.2e}")))
}

fn barnes_recurrence(_: u64, _: usize) -> Result<(bool, String)> {
    let sp = StableParams::new(1.5, 0.55, 1.0)?;
    let mut worst = 0.0f64;
    for k in 0..8 {
        let z = Complex64::new(0.4 + 0.3 * k as f64, -1.0 + 0.4 * k as f64);
        let lhs = (sp.log_w_minus(z + 1.0)? - sp.log_w_minus(z)?).exp();
        let rhs = sp.phi_minus(z)?;
        worst = worst.max((lhs - rhs).norm() / rhs.norm());
        let lhs = (sp.log_w_plus(z + 1.0)? - sp.log_w_plus(z)?).exp();
        let rhs = sp.phi_plus(z)?;
        worst = worst.max((lhs - rhs).norm() / rhs.norm());
    }
    Ok((worst <= 1e-9, format!("max rel {worst:.2e}")))
}

fn mittag_leffler_value(_: u64, _: usize) -> Result<(bool, String)> {
    let v = mittag_leffler(0.5f64, -1.0)?.value;
    let exact = 0.427_583_576_155_807;
    Ok(((v - exact).abs() <= 1e-10, format!("E_0.5(-1) = {v:.12}")))
}

fn laplace_round_trips(_: u64, _: usize) -> Result<(bool, String)> {
    type Pair = (fn(Complex64) -> Complex64, fn(f64) -> f64);
    let pairs: [Pair; 5] = [
        (|s| 1.0 / (s + 1.0), |t| (-t).exp()),
        (|s| 1.0 / (s * s), |t| t),
        (|s| 1.0 / (s * s + 1.0), f64::sin),
        (|s| 1.0 / s.sqrt(), |t| 1.0 / (std::f64::consts::PI * t).sqrt()),
        (|s| 1.0 / (s * (s + 1.0)), |t| 1.0 - (-t).exp()),
    ];
    let mut worst = 0.0f64;
    for (f, g) in pairs {
        for &t in &[0.5, 1.0, 3.0] {
            let v = laplace_invert(|s| Ok(f(s)), t, 0.0, 1e-10)?.value;
            worst = worst.max((v - g(t)).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max abs {worst:.2e}")))
}

fn kinetic_problem() -> Result<ProblemTriple<f64>> {
    ProblemTriple::new(LevyModel::brownian(1.0, 0.0)?, SubordinatorModel::stable(0.5)?, SubordinatorModel::zero(), 1.0, 0.0)
}

fn fractional_kinetic_transform(_: u64, _: usize) -> Result<(bool, String)> {
    let v = fpt_laplace_transform(&kinetic_problem()?, 1.0)?;
    let exact = (-(2f64.sqrt())).exp();
    Ok(((v - exact).abs() <= 1e-12, format!("{v:.12} vs {exact:.12}")))
}

fn scale_function_inversion(_: u64, _: usize) -> Result<(bool, String)> {
    let p = ProblemTriple::new(
        LevyModel::brownian(1.0, 0.0)?,
        SubordinatorModel::pure_drift(1.0)?,
        SubordinatorModel::zero(),
        1.0,
        0.0,
    )?;
    let w = ScaleFunctions::new(&p, 1.0)?.w_by_inversion(1.0)?.value;
    let exact_w = 2f64.sqrt() * 2f64.sqrt().sinh();
    Ok(((w - exact_w).abs() <= 1e-8, format!("W(1) = {w:.12} vs {exact_w:.12}")))
}

fn wiener_hopf_residual(_: u64, _: usize) -> Result<(bool, String)> {
    let m = RiskModel::fractional(1.0, 1.0, 1.0, 0.5)?;
    let ce = m.problem(0.0)?.composite(1.0)?;
    let f = WhFactor::solve(&ce, 1.0)?;
    let zs: Vec<f64> = (1..40).map(|k| -4.0 + 0.2 * k as f64 + 0.01).collect();
    let r = f.factorization_residual(&zs)?;
    Ok((r <= 1e-9, format!("residual {r:.2e}")))
}

fn ruin_root(_: u64, _: usize) -> Result<(bool, String)> {
    let m = RiskModel::fractional(1.0, 1.0, 1.0, 0.5)?;
    let r = solve_rq(&m, 0.0)?;
    let exact = (3.0 - 5f64.sqrt()) / 2.0;
    let psi0 = ruin_probability(&m, 0.0)?;
    let ok = (r - exact).abs() <= 1e-12 && (psi0 - (1.0 - exact)).abs() <= 1e-12;
    Ok((ok, format!("R(0) = {r:.14}, ruin(0) = {psi0:.12}")))
}

fn fractional_density_contours(_: u64, _: usize) -> Result<(bool, String)> {
    let fp = FractionalProblem::new(0.5f64, BrownianPassage::new(1.0, 1.0, 1.0)?)?;
    let a = fp.density(1.0, 0, &MellinLine::new(0.2, 60.0, 2048)?)?;
    let b = fp.density(1.0, 0, &MellinLine::new(-0.4, 60.0, 2048)?)?;
    let diff = (a.value - b.value).abs();
    Ok((diff <= a.abs_error + b.abs_error + 1e-12, format!("f(1) = {:.10}, contour gap {diff:.2e}", a.value)))
}

fn sn_series_vs_mellin(_: u64, _: usize) -> Result<(bool, String)> {
    let fp = FractionalProblem::new(0.5f64, SnStableExit::new(1.6, 1.0)?)?;
    let m = fp.density(5.0, 0, &MellinLine::new(-0.1, 60.0, 4096)?)?;
    let s = sn_stable_series_density(1.6, 0.5, 5.0, 200)?;
    let diff = (m.value - s.value).abs();
    Ok((diff <= m.abs_error + s.abs_error + 1e-9, format!("gap {diff:.2e}")))
}

fn ensemble_determinism(seed: u64, _: usize) -> Result<(bool, String)> {
    let p = kinetic_problem()?;
    let cfg = SamplerConfig::new(1e-2, 50.0);
    let base = run_ensemble(&p, SamplerKind::Reduced, &cfg, 64, 1, seed)?;
    let mut same = true;
    for w in [4, 8] {
        let other = run_ensemble(&p, SamplerKind::Reduced, &cfg, 64, w, seed)?;
        same &= base.iter().zip(&other).all(|(a, b)| a.time.to_bits() == b.time.to_bits());
    }
    Ok((same, "workers 1, 4, 8".into()))
}

fn mc_fractional_kinetic(seed: u64, workers: usize) -> Result<(bool, String)> {
    let p = kinetic_problem()?;
    let cfg = SamplerConfig::new(1e-3, 50.0);
    let batch = run_ensemble(&p, SamplerKind::Reduced, &cfg, 20_000, workers, seed)?;
    let e = estimate_lt(&batch, 1.0, 0.0)?;
    let exact = (-(2f64.sqrt())).exp();
    let ok = e.agrees_with(exact, 4.0, 0.02 * exact);
    Ok((ok, format!("{:.5} ± {:.5} vs {exact:.5}", e.value, e.std_error)))
}

fn mc_ruin(seed: u64, workers: usize) -> Result<(bool, String)> {
    let m = RiskModel::fractional(1.0, 1.0, 1.0, 0.5)?;
    let hits = parallel_map(20_000, workers, seed, |_, rng| {
        Ok(if simulate_ruin(&m, 1.0, 1000, rng)?.finite { 1.0 } else { 0.0 })
    })?;
    let e = Estimate::from_values(&hits)?;
    let exact = ruin_probability(&m, 1.0)?;
    Ok((e.agrees_with(exact, 4.0, 0.0), format!("{:.5} ± {:.5} vs {exact:.5}", e.value, e.std_error)))
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_green() {
        let checks = super::run(2024, 4);
        for c in &checks {
            eprintln!("{} {} {}", c.passed, c.name, c.detail);
        }
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert_eq!(checks.len(), super::CHECKS.len());
    }
}
