//! The linear propagator `V(t)`, acting on Fourier coefficients as
//! multiplication by `e^{itξ³ + ηtΦ(ξ)}`, and numerical checks of its
//! smoothing estimates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::quadrature::{composite, GaussLegendre};
use crate::symbol::SymbolSpec;

/// Above this magnitude the dispersive phase `tξ³` is reduced mod 2π in
/// double-double arithmetic.
pub const PHASE_REDUCTION_THRESHOLD: f64 = 1e8;

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn dd_mul_f(hi: f64, lo: f64, b: f64) -> (f64, f64) {
    let (p, e) = two_prod(hi, b);
    let e = e + lo * b;
    two_sum(p, e)
}

const TWO_PI_HI: f64 = std::f64::consts::TAU;
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

/// `t·ξ³`, reduced to `(−π, π]` when it exceeds [`PHASE_REDUCTION_THRESHOLD`];
/// exactly odd in `ξ`.
pub fn dispersive_phase(t: f64, xi: f64) -> f64 {
    let a = xi.abs();
    let direct = t * a * a * a;
    if direct <= PHASE_REDUCTION_THRESHOLD {
        return if xi < 0.0 { -direct } else { direct };
    }
    let reduced = {
        let (h2, l2) = two_prod(a, a);
        let (h3, l3) = dd_mul_f(h2, l2, a);
        let (h, l) = dd_mul_f(h3, l3, t);
        let k = (h / TWO_PI_HI).round();
        let (p1, e1) = two_prod(k, TWO_PI_HI);
        let (r, e) = two_sum(h, -p1);
        r + (e - e1 + l - k * TWO_PI_LO)
    };
    let wrapped = reduced - TWO_PI_HI * (reduced / TWO_PI_HI).round();
    let wrapped = if wrapped <= -PI { wrapped + TWO_PI_HI } else { wrapped };
    if xi < 0.0 {
        -wrapped
    } else {
        wrapped
    }
}

/// `e^{itξ³ + ηtΦ(ξ)}`.
#[inline]
pub fn multiplier(spec: &SymbolSpec, xi: f64, t: f64) -> Complex64 {
    let modulus = (t * spec.damping(xi)).exp();
    let (sin, cos) = dispersive_phase(t, xi).sin_cos();
    Complex64::new(modulus * cos, modulus * sin)
}

/// `(e^z − 1)/z`, accurate for small `|z|` and free of cancellation.
pub fn exprel(z: Complex64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    let (sin, cos) = z.im.sin_cos();
    let half_sin = (0.5 * z.im).sin();
    let em1 = Complex64::new(z.re.exp_m1() * cos - 2.0 * half_sin * half_sin, z.re.exp() * sin);
    smith_div(em1, z)
}

/// `a / b` by Smith's scaled algorithm; no intermediate `|b|²`.
pub fn smith_div(a: Complex64, b: Complex64) -> Complex64 {
    if b.re.abs() >= b.im.abs() {
        let r = b.im / b.re;
        let den = b.re + b.im * r;
        Complex64::new((a.re + a.im * r) / den, (a.im - a.re * r) / den)
    } else {
        let r = b.re / b.im;
        let den = b.re * r + b.im;
        Complex64::new((a.re * r + a.im) / den, (a.im * r - a.re) / den)
    }
}

/// `V(t)f`.
pub fn apply_semigroup(spec: &SymbolSpec, f: &SpectralField, t: f64) -> Result<SpectralField> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("semigroup time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.map_multiplier(spec.is_even(), |xi| multiplier(spec, xi, t)))
}

/// Weight exponent of the time-weighted `L²` term of the X-norm: `|s|/p` for `s < 0`.
pub fn x_weight_exponent(s: f64, p: f64) -> f64 {
    (-s).max(0.0) / p
}

/// Empirical constant of the linear estimate `‖V(t)f‖_{X_T^s} ≲ e^{C_M T}‖f‖_{H^s}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearEstimate {
    /// `max_t [‖V(t)f‖_{H^s} + t^{|s|/p}‖V(t)f‖_{L²}] / ‖f‖_{H^s}`.
    pub ratio_max: f64,
    /// `C_M = η·sup Φ`.
    pub c_m: f64,
    /// `ratio_max / e^{C_M T}`.
    pub k: f64,
    /// Same constant on the refined time grid.
    pub k_refined: f64,
    /// `k_refined` exceeds `k` by no more than 1%.
    pub stable: bool,
}

fn linear_ratio_max(spec: &SymbolSpec, f: &SpectralField, s: f64, t_grid: &[f64]) -> Result<f64> {
    let base = f.hs_norm(s);
    let w = x_weight_exponent(s, spec.p);
    let ratios = t_grid
        .par_iter()
        .map(|&t| {
            let vt = apply_semigroup(spec, f, t)?;
            let weighted = if w == 0.0 { vt.l2_norm() } else { t.powf(w) * vt.l2_norm() };
            Ok((vt.hs_norm(s) + weighted) / base)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Largest observed ratio of the X-norm of `V(·)f` to `‖f‖_{H^s}` over `t_grid`,
/// repeated on a grid with midpoints inserted.
///
/// A zero field gives a zero ratio by convention.
pub fn verify_linear_xnorm(
    spec: &SymbolSpec,
    f: &SpectralField,
    s: f64,
    horizon: f64,
    t_grid: &[f64],
) -> Result<LinearEstimate> {
    if !(horizon > 0.0 && horizon <= 1.0) {
        return Err(Error::InvalidArgument(format!("T must lie in (0, 1], got {horizon}")));
    }
    if t_grid.iter().any(|&t| !(0.0..=horizon).contains(&t)) {
        return Err(Error::InvalidArgument("t_grid must lie inside [0, T]".into()));
    }
    let c_m = spec.eta * spec.sup_phi()?;
    let growth = (c_m * horizon).exp();
    if f.hs_norm(s) == 0.0 {
        return Ok(LinearEstimate {
            ratio_max: 0.0,
            c_m,
            k: 0.0,
            k_refined: 0.0,
            stable: true,
        });
    }
    let mut sorted = t_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut refined = sorted.clone();
    refined.extend(sorted.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    let ratio_max = linear_ratio_max(spec, f, s, &sorted)?;
    let ratio_refined = linear_ratio_max(spec, f, s, &refined)?;
    let k = ratio_max / growth;
    let k_refined = ratio_refined / growth;
    Ok(LinearEstimate {
        ratio_max,
        c_m,
        k,
        k_refined,
        stable: k_refined <= k * 1.01,
    })
}

/// `τ ↦ ‖w(ξ)e^{τηΦ(ξ)}‖_{L²_ξ}` weight families, `⟨ξ⟩ = 1 + |ξ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelWeight {
    /// `ξ⟨ξ⟩^s`, bounded by `τ^{−(1/2 + s/p)}` for `s > −p/2`.
    XiBracketS,
    /// `⟨ξ⟩^s`, bounded by `τ^{−(p−2+2s)/(2p)}` for `s > 1 − p/2`.
    BracketSOnly,
    /// `ξ`, bounded by `τ^{−(3+ε)/(2p)}`.
    XiOnly { eps: f64 },
}

impl KernelWeight {
    pub const DEFAULT_EPS: f64 = 0.01;

    pub fn xi_only() -> Self {
        Self::XiOnly { eps: Self::DEFAULT_EPS }
    }

    /// Decay exponent `a` of the bound `≲ τ^{−a}`.
    pub fn exponent(&self, s: f64, p: f64) -> f64 {
        match *self {
            Self::XiBracketS => 0.5 + s / p,
            Self::BracketSOnly => (p - 2.0 + 2.0 * s) / (2.0 * p),
            Self::XiOnly { eps } => (3.0 + eps) / (2.0 * p),
        }
    }

    pub fn admissible(&self, s: f64, p: f64) -> Result<()> {
        if !(p > 3.0) {
            return Err(Error::Inadmissible(format!("p > 3 (got p = {p})")));
        }
        match *self {
            Self::XiBracketS if !(s > -p / 2.0) => {
                Err(Error::Inadmissible(format!("s > -p/2 (got s = {s}, p = {p})")))
            }
            Self::BracketSOnly if !(s > 1.0 - p / 2.0) => {
                Err(Error::Inadmissible(format!("s > 1 - p/2 (got s = {s}, p = {p})")))
            }
            Self::XiOnly { eps } if !(eps > 0.0) => {
                Err(Error::Inadmissible(format!("eps > 0 (got eps = {eps})")))
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, xi: f64, s: f64) -> f64 {
        let bracket = 1.0 + xi.abs();
        match *self {
            Self::XiBracketS => xi * bracket.powf(s),
            Self::BracketSOnly => bracket.powf(s),
            Self::XiOnly { .. } => xi,
        }
    }
}

/// Weighted kernel norms `τ^a·‖w(ξ)e^{τηΦ(ξ)}‖_{L²}` over a τ grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub exponent: f64,
    pub tau_values: Vec<f64>,
    pub kernel_norms: Vec<f64>,
    pub weighted_values: Vec<f64>,
    pub sup_constant: f64,
    /// Weighted values below `τ = 1/M^p` change by less than a factor 4 across any decade.
    pub monotone_tail_ok: bool,
    /// Supremum changes by less than 1% when the τ floor drops tenfold.
    pub stable: bool,
    pub sup_constant_extended: f64,
}

/// `‖w(ξ)e^{τηΦ(ξ)}‖_{L²(ℝ)}` by composite Gauss–Legendre on `[−Ξ, 0] ∪ [0, Ξ]`.
pub fn kernel_norm(spec: &SymbolSpec, weight: KernelWeight, s: f64, tau: f64, m: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    let cutoff = (2.0 * m).max(2.0 * (40.0 / (spec.eta * tau)).powf(1.0 / spec.p));
    let rule = GaussLegendre::new(16);
    let integrand = |xi: f64| {
        let w = weight.eval(xi, s);
        w * w * (2.0 * tau * spec.damping(xi)).exp()
    };
    let run = |panels: usize| {
        let right = composite(&rule, 0.0, cutoff, panels, integrand);
        let left = if spec.is_even() {
            right
        } else {
            composite(&rule, -cutoff, 0.0, panels, integrand)
        };
        left + right
    };
    let coarse = run(200);
    let fine = run(400);
    let diff = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
    if diff > 1e-9 {
        return Err(Error::QuadratureNonConvergence { diff, tol: 1e-9 });
    }
    Ok(fine.sqrt())
}

/// Log-spaced grid of `count` points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect()
}

/// Computes `τ^a·‖w(ξ)e^{τηΦ(ξ)}‖_{L²}` on `tau_grid` and checks that the
/// supremum is stable when the smallest τ is lowered tenfold.
pub fn kernel_weighted_l2(
    spec: &SymbolSpec,
    s: f64,
    weight: KernelWeight,
    tau_grid: &[f64],
) -> Result<SmoothingReport> {
    weight.admissible(s, spec.p)?;
    if tau_grid.is_empty() || tau_grid.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(Error::InvalidArgument("tau values must lie in (0, 1]".into()));
    }
    let a = weight.exponent(s, spec.p);
    let m = spec.threshold_m()?;
    let mut taus = tau_grid.to_vec();
    taus.sort_by(f64::total_cmp);

    let eval = |taus: &[f64]| -> Result<Vec<f64>> {
        taus.par_iter().map(|&tau| kernel_norm(spec, weight, s, tau, m)).collect()
    };
    let kernel_norms = eval(&taus)?;
    let weighted_values: Vec<f64> = taus
        .iter()
        .zip(&kernel_norms)
        .map(|(t, k)| t.powf(a) * k)
        .collect();
    let sup_constant = weighted_values.iter().copied().fold(0.0, f64::max);

    let floor = taus[0];
    let extra = log_grid(floor / 10.0, floor, 11);
    let extra_norms = eval(&extra[..10])?;
    let sup_constant_extended = extra[..10]
        .iter()
        .zip(&extra_norms)
        .map(|(t, k)| t.powf(a) * k)
        .fold(sup_constant, f64::max);
    let stable = sup_constant.is_finite() && (sup_constant_extended - sup_constant) < 0.01 * sup_constant;

    let tail_limit = 1.0 / m.powf(spec.p);
    let mut monotone_tail_ok = true;
    for i in 0..taus.len() {
        for j in i + 1..taus.len() {
            if taus[j] >= tail_limit || taus[j] > 10.0 * taus[i] {
                break;
            }
            let (x, y) = (weighted_values[i], weighted_values[j]);
            if x.max(y) >= 4.0 * x.min(y) {
                monotone_tail_ok = false;
            }
        }
    }

    Ok(SmoothingReport {
        exponent: a,
        tau_values: taus,
        kernel_norms,
        weighted_values,
        sup_constant,
        monotone_tail_ok,
        stable,
        sup_constant_extended,
    })
}

/// `‖V(t)f₀‖_{H^{s+μ}}`, finite for every `t > 0` since `V(t)` is smoothing.
pub fn regularity_gain_demo(spec: &SymbolSpec, f0: &SpectralField, s: f64, mu: f64, t: f64) -> Result<f64> {
    if !(mu >= 0.0) {
        return Err(Error::InvalidArgument(format!("mu must be >= 0, got {mu}")));
    }
    let v = apply_semigroup(spec, f0, t)?;
    let norm = v.hs_norm(s + mu);
    if !norm.is_finite() {
        return Err(Error::InvalidArgument(format!("H^(s+mu) norm is not finite at t = {t}")));
    }
    Ok(norm)
}
