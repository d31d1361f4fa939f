//! Spectrally negative `X`: the first-passage process `a ↦ T_a` is a killed
//! subordinator with Laplace exponent `φ_T(q) = φ_q(φ_Sub(q))`, where `φ_q`
//! is the right inverse of `u ↦ Ψ_q(-iu)`. With `K ≡ 0` two-sided exit is
//! expressed through the scale functions `W^{(p)}`, `Z^{(p)}` at `p = φ_Sub(q)`.

use std::io::Write;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::models::{CompositeExponent, JumpSpec, LevyModel, ProblemTriple};
use crate::scalar::{lit, re, to_f64, Scalar};
use crate::special::{laplace_invert, AccuracyReport};
use crate::wiener_hopf::solve_root;

fn require_sn<T: Scalar>(x: &LevyModel<T>) -> Result<()> {
    if x.is_spectrally_negative() {
        Ok(())
    } else {
        Err(Error::Model("X has positive jumps; the spectrally negative results do not apply".into()))
    }
}

/// Whether the level can be reached at all: `σ² > 0` or
/// `d_X + ∫_{-1}^0 |y| Π(dy) - δ_K 𝚔_Sub > 0`.
pub fn passage_possible<T: Scalar>(problem: &ProblemTriple<T>) -> Result<bool> {
    let x = &problem.x_process;
    require_sn(x)?;
    if x.sigma2() > T::zero() {
        return Ok(true);
    }
    let bv = x.sn_bounded_variation_drift()?;
    if bv.is_infinite() {
        return Ok(true);
    }
    Ok(bv - problem.boundary.drift() * problem.time_change.drift() > T::zero())
}

/// Right inverse `ϱ ↦ φ_q(ϱ)` of `u ↦ Ψ_q(-iu)` on `[θ₀, ∞)`, with a cache of solved pairs.
#[derive(Debug, Clone)]
pub struct BernsteinInverse<T> {
    base: CompositeExponent<T>,
    cache: Vec<(T, T)>,
}

impl<T: Scalar> BernsteinInverse<T> {
    pub fn new(base: CompositeExponent<T>) -> Result<Self> {
        require_sn(&base.base.x_process)?;
        Ok(Self { base, cache: Vec::new() })
    }

    pub fn base(&self) -> &CompositeExponent<T> {
        &self.base
    }

    /// `φ_q(ϱ)`.
    pub fn eval(&mut self, varrho: T) -> Result<T> {
        if let Some(&(_, u)) = self.cache.iter().find(|(r, _)| *r == varrho) {
            return Ok(u);
        }
        let u = solve_root(&self.base, varrho)?;
        self.cache.push((varrho, u));
        Ok(u)
    }

    /// `θ₀ = φ_q(0)`, the largest zero of `Ψ_q(-iu)`.
    pub fn theta0(&mut self) -> Result<T> {
        self.eval(T::zero())
    }

    /// Solved `(ϱ, φ_q(ϱ))` pairs in insertion order.
    pub fn solved(&self) -> &[(T, T)] {
        &self.cache
    }
}

/// `φ_T(q) = φ_q(φ_Sub(q))`; `E[e^{-qT_a}; T_a < ∞] = e^{-φ_T(q) a}`.
pub fn fpt_laplace_exponent<T: Scalar>(problem: &ProblemTriple<T>, q: T) -> Result<T> {
    if !passage_possible(problem)? {
        return Err(Error::Model("the level is never reached: the reduced process cannot move upwards".into()));
    }
    let ce = problem.composite(q)?;
    solve_root(&ce, problem.time_change.phi_real(q)?)
}

/// `E[e^{-qT_a}; T_a < ∞]` at the problem's effective level.
pub fn fpt_laplace_transform<T: Scalar>(problem: &ProblemTriple<T>, q: T) -> Result<T> {
    let a = problem.effective_level().max(T::zero());
    Ok((-fpt_laplace_exponent(problem, q)? * a).exp())
}

/// `P(T_a < ∞) = e^{-φ_T(0) a}` at the problem's effective level.
pub fn passage_probability<T: Scalar>(problem: &ProblemTriple<T>) -> Result<T> {
    if !passage_possible(problem)? {
        return Ok(T::zero());
    }
    fpt_laplace_transform(problem, T::zero())
}

/// Scale functions `W^{(p)}`, `Z^{(p)}` of `X` at `p = φ_Sub(q)`.
#[derive(Debug, Clone)]
pub struct ScaleFunctions<T> {
    x: LevyModel<T>,
    q: T,
    p: T,
    root: T,
}

impl<T: Scalar> ScaleFunctions<T> {
    /// Requires `K ≡ 0` and `X` not the negative of a subordinator.
    pub fn new(problem: &ProblemTriple<T>, q: T) -> Result<Self> {
        if !problem.boundary.is_identically_zero() {
            return Err(Error::Model("scale functions are defined for a zero boundary subordinator".into()));
        }
        let x = problem.x_process.clone();
        require_sn(&x)?;
        if x.sigma2() == T::zero() && x.sn_bounded_variation_drift()? <= T::zero() {
            return Err(Error::Model("X is the negative of a subordinator".into()));
        }
        if !(q >= T::zero()) {
            return Err(Error::Domain(format!("q must be >= 0, got {q}")));
        }
        let p = problem.time_change.phi_real(q)?;
        let lifted = ProblemTriple::new(
            x.clone(),
            crate::models::SubordinatorModel::pure_drift(T::one())?,
            crate::models::SubordinatorModel::zero(),
            T::zero(),
            T::zero(),
        )?;
        let root = solve_root(&lifted.composite(T::zero())?, p)?;
        Ok(Self { x, q, p, root })
    }

    /// The composed parameter `p = φ_Sub(q)`.
    pub fn p(&self) -> T {
        self.p
    }

    pub fn q(&self) -> T {
        self.q
    }

    /// `φ(p)`, the right-most singularity of the transforms.
    pub fn root(&self) -> T {
        self.root
    }

    fn psi_at(&self, s: Complex<T>) -> Result<Complex<T>> {
        Ok(self.x.psi_continued(-Complex::<T>::i() * s))
    }

    /// Closed forms for Brownian motion with drift and for a pure drift.
    fn closed_form(&self, x: T) -> Option<(T, T)> {
        if !matches!(self.x.jumps(), JumpSpec::None) {
            return None;
        }
        let (s2, mu, p) = (self.x.sigma2(), self.x.drift(), self.p);
        if s2 == T::zero() {
            let e = (p * x / mu).exp();
            return Some((e / mu, e));
        }
        let disc = (mu * mu + lit::<T>(2.0) * p * s2).sqrt();
        if disc == T::zero() {
            return Some((lit::<T>(2.0) * x / s2, T::one()));
        }
        let up = (-mu + disc) / s2;
        let dn = (-mu - disc) / s2;
        let c = lit::<T>(2.0) / (s2 * (up - dn));
        let w = c * ((up * x).exp() - (dn * x).exp());
        let z = if p == T::zero() {
            T::one()
        } else {
            T::one() + p * c * (((up * x).exp() - T::one()) / up - ((dn * x).exp() - T::one()) / dn)
        };
        Some((w, z))
    }

    /// `W^{(p)}(0)`: `1/d_X` for bounded variation, `0` otherwise.
    fn w_at_zero(&self) -> Result<T> {
        if self.x.sigma2() > T::zero() {
            return Ok(T::zero());
        }
        let d = self.x.sn_bounded_variation_drift()?;
        Ok(if d.is_infinite() { T::zero() } else { T::one() / d })
    }

    fn target(&self, x: T) -> f64 {
        1e-9 * (to_f64(self.root) * to_f64(x)).exp().max(1.0)
    }

    /// `W^{(p)}(x)`, `x ≥ 0`, from `∫ e^{-ux} W(x) dx = 1/(Ψ(-iu) - p)`.
    pub fn w(&self, x: T) -> Result<AccuracyReport<T>> {
        if x < T::zero() {
            return Ok(AccuracyReport::exact(T::zero()));
        }
        if let Some((w, _)) = self.closed_form(x) {
            return Ok(AccuracyReport::exact(w));
        }
        self.w_by_inversion(x)
    }

    /// `W^{(p)}(x)` by Laplace inversion only, bypassing closed forms.
    pub fn w_by_inversion(&self, x: T) -> Result<AccuracyReport<T>> {
        if x < T::zero() {
            return Ok(AccuracyReport::exact(T::zero()));
        }
        if x == T::zero() {
            return Ok(AccuracyReport::exact(self.w_at_zero()?));
        }
        let p = re(self.p);
        laplace_invert(|s| Ok(Complex::new(T::one(), T::zero()) / (self.psi_at(s)? - p)), x, self.root, self.target(x))
    }

    /// `Z^{(p)}(x) = 1 + p ∫_0^x W^{(p)}`, inverted from `1/u + p/(u(Ψ(-iu) - p))`.
    pub fn z(&self, x: T) -> Result<AccuracyReport<T>> {
        if x <= T::zero() || self.p == T::zero() {
            return Ok(AccuracyReport::exact(T::one()));
        }
        if let Some((_, z)) = self.closed_form(x) {
            return Ok(AccuracyReport::exact(z));
        }
        let p = re(self.p);
        laplace_invert(
            |s| {
                let one = Complex::new(T::one(), T::zero());
                Ok(one / s + p / (s * (self.psi_at(s)? - p)))
            },
            x,
            self.root,
            self.target(x),
        )
    }

    /// Tabulate on an increasing grid.
    pub fn table(&self, grid: &[T]) -> Result<ScaleFunctionTable<T>> {
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("scale-function grid must be strictly increasing".into()));
        }
        let mut t = ScaleFunctionTable { q: self.p, x: Vec::new(), w: Vec::new(), z: Vec::new(), err_w: Vec::new() };
        for &x in grid {
            let w = self.w(x)?;
            t.x.push(x);
            t.w.push(w.value);
            t.err_w.push(w.abs_error);
            t.z.push(self.z(x)?.value);
        }
        Ok(t)
    }
}

/// Tabulated `W^{(p)}`, `Z^{(p)}`; `q` holds the composed parameter `p = φ_Sub(q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFunctionTable<T> {
    pub q: T,
    pub x: Vec<T>,
    pub w: Vec<T>,
    pub z: Vec<T>,
    pub err_w: Vec<f64>,
}

impl<T: Scalar> ScaleFunctionTable<T> {
    /// CSV with header `x,W,Z,errW`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x", "W", "Z", "errW"])?;
        for i in 0..self.x.len() {
            w.write_record([
                self.x[i].to_string(),
                self.w[i].to_string(),
                self.z[i].to_string(),
                self.err_w[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scale functions of `problem` at `p = φ_Sub(q)` on `grid`.
pub fn scale_functions<T: Scalar>(problem: &ProblemTriple<T>, q: T, grid: &[T]) -> Result<ScaleFunctionTable<T>> {
    ScaleFunctions::new(problem, q)?.table(grid)
}

/// `(E_x[e^{-qT_a}; T_a < T̂_0], E_x[e^{-qT̂_0}; T̂_0 < T_a])` for `0 < x ≤ a`, `K ≡ 0`.
pub fn two_sided_exit<T: Scalar>(problem: &ProblemTriple<T>, a: T, x: T, q: T) -> Result<(T, T)> {
    if !(x > T::zero() && x <= a) {
        return Err(Error::Domain(format!("start must lie in (0, a], got x = {x}, a = {a}")));
    }
    let sf = ScaleFunctions::new(problem, q)?;
    if x == a {
        return Ok((T::one(), T::zero()));
    }
    let (wx, wa) = (sf.w(x)?.value, sf.w(a)?.value);
    let (zx, za) = (sf.z(x)?.value, sf.z(a)?.value);
    Ok((wx / wa, zx - za / wa * wx))
}
