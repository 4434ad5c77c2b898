use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{duhamel_nl, FieldPath, Nonlinearity};
use crate::error::{Error, Result};
use crate::field::{Convolver, SpectralField, Trajectory};
use crate::quadrature::QuadConfig;
use crate::semigroup::{dispersive_phase, exprel, multiplier};
use crate::symbol::SymbolSpec;

/// Exponential midpoint marcher, order 2:
///
/// ```text
/// v* = E(h/2)vₙ − (h/2)·φ₁(Lh/2)·N(vₙ)
/// vₙ₊₁ = E(h)vₙ − h·φ₁(Lh)·N(v*)
/// ```
///
/// with `E(h) = e^{hL}`, `L = iξ³ + ηΦ(ξ)`, `φ₁(z) = (e^z − 1)/z`. The step is
/// `T/⌈T/dt⌉`. `nl = None` gives the linear flow.
pub fn evolve(
    spec: &SymbolSpec,
    v0: &SpectralField,
    horizon: f64,
    dt: f64,
    nl: Option<Nonlinearity>,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("T must be >= 0, got {horizon}")));
    }
    let grid = *v0.grid();
    let steps = (horizon / dt).ceil().max(1.0) as usize;
    let h = horizon / steps as f64;
    let mut traj = Trajectory::new(grid);
    traj.push(0.0, v0.clone())?;
    if horizon == 0.0 {
        return Ok(traj);
    }
    let conv = Convolver::new(grid);
    let real = v0.is_real() && spec.is_even();
    let generator = |xi: f64, tau: f64| Complex64::new(tau * spec.damping(xi), dispersive_phase(tau, xi));
    let nodes: Vec<f64> = grid.nodes().collect();
    let e_full: Vec<Complex64> = nodes.iter().map(|&xi| multiplier(spec, xi, h)).collect();
    let e_half: Vec<Complex64> = nodes.iter().map(|&xi| multiplier(spec, xi, 0.5 * h)).collect();
    let phi_full: Vec<Complex64> = nodes.iter().map(|&xi| exprel(generator(xi, h)) * h).collect();
    let phi_half: Vec<Complex64> = nodes.iter().map(|&xi| exprel(generator(xi, 0.5 * h)) * (0.5 * h)).collect();
    let finish = |coeffs: Vec<Complex64>| -> Result<SpectralField> {
        let f = SpectralField::new(grid, coeffs, false)?;
        Ok(if real { f.symmetrize() } else { f })
    };
    let mut v = v0.clone();
    for step in 1..=steps {
        let t = step as f64 * h;
        let next = match nl {
            None => finish(v.coeffs().iter().zip(&e_full).map(|(c, e)| c * e).collect())?,
            Some(nl) => {
                let n0 = nl.apply(&conv, &v)?;
                let mid = finish(
                    v.coeffs()
                        .iter()
                        .zip(n0.coeffs())
                        .enumerate()
                        .map(|(k, (c, n))| e_half[k] * c - phi_half[k] * n)
                        .collect(),
                )?;
                let n1 = nl.apply(&conv, &mid)?;
                finish(
                    v.coeffs()
                        .iter()
                        .zip(n1.coeffs())
                        .enumerate()
                        .map(|(k, (c, n))| e_full[k] * c - phi_full[k] * n)
                        .collect(),
                )?
            }
        };
        let before = v.l2_norm();
        let after = next.l2_norm();
        if !after.is_finite() || (before > 0.0 && after > 10.0 * before) {
            return Err(Error::StepInstability {
                t,
                growth: after / before,
            });
        }
        let t_push = if step == steps { horizon } else { t };
        traj.push(t_push, next.clone())?;
        v = next;
    }
    Ok(traj)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularityReport {
    pub s: f64,
    pub mu: f64,
    pub t_values: Vec<f64>,
    /// `‖ℒ(f)(t)‖_{H^{s+μ}}` on `t_values`.
    pub norms: Vec<f64>,
    pub finite: bool,
    /// Largest difference between adjacent samples on `t_values`.
    pub max_jump: f64,
    /// Same with midpoints inserted.
    pub max_jump_refined: f64,
    pub continuous: bool,
    /// Norms at `t₁·4^{−k}`, `k = 0..3`, with `t₁` the first positive time.
    pub small_time_norms: Vec<f64>,
    pub vanishes_at_zero: bool,
}

/// Evaluates the Duhamel term of `path` in `H^{s+μ}` on `t_grid`. Continuity is
/// read off the adjacent-sample differences shrinking under midpoint refinement.
pub fn nonlinear_regularity_check<P: FieldPath>(
    spec: &SymbolSpec,
    path: &P,
    s: f64,
    mu: f64,
    t_grid: &[f64],
    nl: Nonlinearity,
    quad: &QuadConfig,
) -> Result<RegularityReport> {
    if !(mu >= 0.0 && mu < spec.p / 2.0) {
        return Err(Error::Inadmissible(format!("0 <= mu < p/2, got mu = {mu}")));
    }
    if t_grid.len() < 2 || t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid[0] < 0.0 {
        return Err(Error::InvalidArgument("t_grid must be increasing, nonnegative, with >= 2 points".into()));
    }
    let eval = |t: f64| -> Result<f64> { Ok(duhamel_nl(spec, path, t, nl, quad)?.hs_norm(s + mu)) };
    let norms = t_grid.iter().map(|&t| eval(t)).collect::<Result<Vec<_>>>()?;
    let mids = t_grid
        .windows(2)
        .map(|w| eval(0.5 * (w[0] + w[1])))
        .collect::<Result<Vec<_>>>()?;
    let jump = |v: &[f64]| v.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    let max_jump = jump(&norms);
    let mut refined = Vec::with_capacity(2 * norms.len());
    for (k, &n) in norms.iter().enumerate() {
        refined.push(n);
        if let Some(&m) = mids.get(k) {
            refined.push(m);
        }
    }
    let max_jump_refined = jump(&refined);
    let t1 = t_grid.iter().copied().find(|&t| t > 0.0).unwrap_or(t_grid[1]);
    let small_time_norms = (0..4)
        .map(|k| eval(t1 / 4f64.powi(k)))
        .collect::<Result<Vec<_>>>()?;
    let finite = norms.iter().chain(&mids).chain(&small_time_norms).all(|v| v.is_finite());
    let vanishes_at_zero = small_time_norms.windows(2).all(|w| w[1] <= w[0]) && eval(0.0)? == 0.0;
    Ok(RegularityReport {
        s,
        mu,
        t_values: t_grid.to_vec(),
        norms,
        finite,
        max_jump,
        max_jump_refined,
        continuous: max_jump_refined < max_jump || max_jump == 0.0,
        small_time_norms,
        vanishes_at_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{gaussian_data, LinearFlow};
    use super::*;
    use crate::field::FrequencyGrid;
    use crate::semigroup::apply_semigroup;

    fn grid() -> FrequencyGrid {
        FrequencyGrid::with_spacing(10.0, 1.0 / 8.0).unwrap()
    }

    #[test]
    fn linear_run_reproduces_semigroup() {
        let spec = SymbolSpec::kdv_ks();
        let v0 = gaussian_data(grid(), -1.0, 0.1).unwrap();
        let traj = evolve(&spec, &v0, 0.5, 0.05, None).unwrap();
        let last = traj.last().unwrap();
        let exact = apply_semigroup(&spec, &v0, 0.5).unwrap();
        assert!(last.sub(&exact).unwrap().max_abs() < 1e-14);
        let zero = evolve(&spec, &SpectralField::zeros(grid()), 0.5, 0.1, Some(Nonlinearity::DerivativeOfSquare)).unwrap();
        assert_eq!(zero.last().unwrap().max_abs(), 0.0);
    }

    #[test]
    fn mean_is_conserved_without_dissipation() {
        let spec = SymbolSpec::kdv_burgers().with_eta(0.0);
        let v0 = gaussian_data(grid(), 0.0, 0.3).unwrap();
        let traj = evolve(&spec, &v0, 0.2, 0.01, Some(Nonlinearity::DerivativeOfSquare)).unwrap();
        let k0 = grid().index_of(0.0).unwrap();
        assert!((traj.last().unwrap().coeffs()[k0] - v0.coeffs()[k0]).norm() < 1e-15);
    }

    #[test]
    fn second_order_in_dt() {
        let spec = SymbolSpec::kdv_ks();
        let v0 = gaussian_data(grid(), 0.0, 1.0).unwrap();
        let nl = Some(Nonlinearity::DerivativeOfSquare);
        let run = |dt: f64| evolve(&spec, &v0, 0.2, dt, nl).unwrap().last().unwrap().clone();
        let reference = run(0.2 / 1024.0);
        let e1 = run(0.2 / 16.0).sub(&reference).unwrap().l2_norm();
        let e2 = run(0.2 / 32.0).sub(&reference).unwrap().l2_norm();
        let order = (e1 / e2).log2();
        assert!(order > 1.8 && order < 2.3, "observed order {order}");
    }

    #[test]
    fn regularity_check_on_linear_flow() {
        let spec = SymbolSpec::kdv_ks();
        let v0 = gaussian_data(grid(), -1.0, 0.1).unwrap();
        let flow = LinearFlow::new(spec.clone(), v0);
        let quad = QuadConfig {
            panels: 8,
            order: 8,
            ..QuadConfig::default()
        };
        let t_grid: Vec<f64> = (0..=8).map(|j| 0.5 * j as f64 / 8.0).collect();
        let rep = nonlinear_regularity_check(&spec, &flow, -1.0, 1.9, &t_grid, Nonlinearity::DerivativeOfSquare, &quad).unwrap();
        assert!(rep.finite && rep.continuous && rep.vanishes_at_zero);
        assert_eq!(rep.norms[0], 0.0);
        assert!(nonlinear_regularity_check(&spec, &flow, -1.0, 2.0, &t_grid, Nonlinearity::DerivativeOfSquare, &quad).is_err());
    }
}
