use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FieldPath, LinearFlow, Nonlinearity, WeightedNormParams};
use crate::error::{Error, Result};
use crate::field::{Convolver, FrequencyGrid, SpectralField, Trajectory};
use crate::quadrature::{GaussLegendre, QuadConfig};
use crate::semigroup::multiplier;
use crate::symbol::SymbolSpec;

// Nodes per parallel job; fixed so that the summation order does not depend
// on the thread count.
const CHUNK: usize = 16;

type Integrand<'a> = dyn Fn(f64) -> Result<SpectralField> + Sync + 'a;

/// `Σ w·V(t−τ)·g(τ)` over `nodes`.
pub(super) fn sum_over_nodes(
    spec: &SymbolSpec,
    grid: &FrequencyGrid,
    t: f64,
    nodes: &[(f64, f64)],
    g: &Integrand<'_>,
) -> Result<SpectralField> {
    let n = grid.n;
    let partial = nodes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![Complex64::new(0.0, 0.0); n];
            let mut real = true;
            for &(tau, w) in chunk {
                let val = g(tau)?;
                real &= val.is_real();
                for (k, (a, c)) in acc.iter_mut().zip(val.coeffs()).enumerate() {
                    *a += c * multiplier(spec, grid.node(k), t - tau) * w;
                }
            }
            Ok((acc, real))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = vec![Complex64::new(0.0, 0.0); n];
    let mut real = spec.is_even();
    for (acc, r) in partial {
        real &= r;
        for (x, y) in total.iter_mut().zip(acc) {
            *x += y;
        }
    }
    let field = SpectralField::new(*grid, total, false)?;
    Ok(if real { field.symmetrize() } else { field })
}

fn check_span<P: FieldPath + ?Sized>(path: &P, t: f64) -> Result<()> {
    let (start, end) = path.span()?;
    let slack = 1e-12 * t.abs().max(1.0);
    if !(t >= 0.0) || start > slack || t > end + slack {
        return Err(Error::OutsideSpan { t, start, end });
    }
    Ok(())
}

fn relative_l2_gap(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    let diff = a.sub(b)?.l2_norm();
    let scale = b.l2_norm();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

fn graded_with_refinement(
    spec: &SymbolSpec,
    grid: &FrequencyGrid,
    t: f64,
    quad: &QuadConfig,
    g: &Integrand<'_>,
) -> Result<SpectralField> {
    quad.validate()?;
    if t == 0.0 {
        return Ok(SpectralField::zeros(*grid));
    }
    let coarse = sum_over_nodes(spec, grid, t, &quad.nodes(t), g)?;
    let Some(tol) = quad.refine_tol else {
        return Ok(coarse);
    };
    let fine = sum_over_nodes(spec, grid, t, &quad.refined().nodes(t), g)?;
    let diff = relative_l2_gap(&coarse, &fine)?;
    if diff > tol {
        return Err(Error::QuadratureNonConvergence { diff, tol });
    }
    Ok(fine)
}

/// `∫₀^t V(t−t')·N(u(t'), v(t'))dt'` for the symmetric bilinear form of `nl`.
pub fn duhamel_bilinear<P: FieldPath, Q: FieldPath>(
    spec: &SymbolSpec,
    u: &P,
    v: &Q,
    t: f64,
    nl: Nonlinearity,
    quad: &QuadConfig,
) -> Result<SpectralField> {
    if !u.grid().same_as(v.grid()) {
        return Err(Error::GridMismatch);
    }
    check_span(u, t)?;
    check_span(v, t)?;
    let conv = Convolver::new(*u.grid());
    let g = |tau: f64| nl.bilinear(&conv, &u.at(tau)?, &v.at(tau)?);
    graded_with_refinement(spec, u.grid(), t, quad, &g)
}

/// `∫₀^t V(t−t')·N(v(t'))dt'` on the graded mesh of `quad`. With
/// `quad.refine_tol` set, the mesh is doubled once and the two results must agree.
pub fn duhamel_nl<P: FieldPath>(
    spec: &SymbolSpec,
    path: &P,
    t: f64,
    nl: Nonlinearity,
    quad: &QuadConfig,
) -> Result<SpectralField> {
    check_span(path, t)?;
    let conv = Convolver::new(*path.grid());
    let g = |tau: f64| nl.apply(&conv, &path.at(tau)?);
    graded_with_refinement(spec, path.grid(), t, quad, &g)
}

/// Same integral with `order`-point Gauss–Legendre on each interval of
/// `breakpoints` below `t`; `t` must be a breakpoint.
pub fn duhamel_on_mesh<P: FieldPath>(
    spec: &SymbolSpec,
    path: &P,
    t: f64,
    nl: Nonlinearity,
    breakpoints: &[f64],
    order: usize,
) -> Result<SpectralField> {
    check_span(path, t)?;
    let j = breakpoints
        .iter()
        .position(|&b| (b - t).abs() <= 1e-14 * t.abs().max(1.0))
        .ok_or_else(|| Error::InvalidArgument(format!("t = {t} is not a mesh breakpoint")))?;
    let rule = GaussLegendre::new(order);
    let nodes: Vec<(f64, f64)> = breakpoints[..=j]
        .windows(2)
        .flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>())
        .collect();
    let conv = Convolver::new(*path.grid());
    let g = |tau: f64| nl.apply(&conv, &path.at(tau)?);
    sum_over_nodes(spec, path.grid(), breakpoints[j], &nodes, &g)
}

/// Random trial setup for [`estimate_bilinear_constant`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BilinearTrials {
    pub grid: FrequencyGrid,
    /// Trial data are supported in `|ξ| ≤ band`.
    pub band: f64,
    pub trials: usize,
    pub seed: u64,
    pub horizons: Vec<f64>,
    /// Output times per horizon: `T·(j/out_times)²`, `j = 0..=out_times`.
    pub out_times: usize,
    pub quad: QuadConfig,
}

impl BilinearTrials {
    pub fn new(grid: FrequencyGrid, seed: u64) -> Self {
        Self {
            grid,
            band: 4.0,
            trials: 20,
            seed,
            horizons: vec![1.0, 0.1, 0.01],
            out_times: 8,
            quad: QuadConfig {
                panels: 16,
                order: 8,
                ..QuadConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BilinearEstimate {
    pub c_hat: f64,
    /// `(trial, T, ratio)` for every evaluated pair.
    pub ratios: Vec<(usize, f64, f64)>,
}

fn random_band_limited(rng: &mut ChaCha8Rng, grid: FrequencyGrid, band: f64) -> Result<SpectralField> {
    let coeffs = grid
        .nodes()
        .map(|xi| {
            if xi.abs() <= band {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(SpectralField::new(grid, coeffs, false)?.symmetrize())
}

/// Largest observed `‖∫₀^t V(t−t')N(u,v)dt'‖ / (T^κ·‖u‖·‖v‖)` over random pairs
/// of linear flows with band-limited data, `κ = α` (X) or `θ` (Y).
pub fn estimate_bilinear_constant(
    spec: &SymbolSpec,
    params: &WeightedNormParams,
    setup: &BilinearTrials,
) -> Result<BilinearEstimate> {
    if setup.trials == 0 || setup.horizons.is_empty() || setup.out_times == 0 {
        return Err(Error::InvalidArgument("need at least one trial, horizon and output time".into()));
    }
    if let Some(&h) = setup.horizons.iter().find(|&&h| !(h > 0.0 && h <= 1.0)) {
        return Err(Error::InvalidArgument(format!("trial horizons must lie in (0, 1], got {h}")));
    }
    let nl = params.nonlinearity();
    let kappa = params.time_exponent();
    let mut rng = ChaCha8Rng::seed_from_u64(setup.seed);
    let mut ratios = Vec::new();
    let mut c_hat: f64 = 0.0;
    for trial in 0..setup.trials {
        let u0 = random_band_limited(&mut rng, setup.grid, setup.band)?;
        let v0 = random_band_limited(&mut rng, setup.grid, setup.band)?;
        if u0.max_abs() == 0.0 || v0.max_abs() == 0.0 {
            continue;
        }
        let u = LinearFlow::new(spec.clone(), u0);
        let v = LinearFlow::new(spec.clone(), v0);
        for &horizon in &setup.horizons {
            let times: Vec<f64> = (0..=setup.out_times)
                .map(|j| horizon * (j as f64 / setup.out_times as f64).powi(2))
                .collect();
            let nu = params.norm(&u.sample(&times)?)?;
            let nv = params.norm(&v.sample(&times)?)?;
            let mut out = Trajectory::new(setup.grid);
            for &t in &times {
                out.push(t, duhamel_bilinear(spec, &u, &v, t, nl, &setup.quad)?)?;
            }
            let ratio = params.norm(&out)? / (horizon.powf(kappa) * nu * nv);
            c_hat = c_hat.max(ratio);
            ratios.push((trial, horizon, ratio));
        }
    }
    Ok(BilinearEstimate { c_hat, ratios })
}
