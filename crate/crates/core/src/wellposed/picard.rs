use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::duhamel::{estimate_bilinear_constant, BilinearTrials};
use super::{LinearFlow, FieldPath, Nonlinearity, WeightedNormParams};
use crate::error::{Error, Result};
use crate::field::{Convolver, FrequencyGrid, SpectralField, Trajectory};
use crate::quadrature::GaussLegendre;
use crate::semigroup::multiplier;
use crate::symbol::SymbolSpec;

/// Discretization of the Duhamel map `Ψ(v)(t) = V(t)v₀ − ∫₀^t V(t−t')N(v(t'))dt'`.
///
/// Snapshots sit at `t_j = T·(j/m)²`. Each interval carries `order`
/// Gauss–Legendre nodes where the iterate is also stored, so the integral over
/// whole intervals needs no interpolation; the partial integral up to a node
/// uses the Lagrange interpolant of `N` through the interval's nodes.
pub struct PicardScheme {
    spec: SymbolSpec,
    nl: Nonlinearity,
    grid: FrequencyGrid,
    conv: Convolver,
    breakpoints: Vec<f64>,
    x: Vec<f64>,
    w: Vec<f64>,
    // interp[a][c][b] = ℓ_b(x_a·x_c)
    interp: Vec<Vec<Vec<f64>>>,
    real: bool,
    linear: Iterate,
}

/// Values of an iterate at the snapshots and at the interior nodes
/// (interval-major, `order` nodes per interval).
#[derive(Debug, Clone)]
pub struct Iterate {
    pub snapshots: Vec<SpectralField>,
    pub nodes: Vec<SpectralField>,
}

impl PicardScheme {
    pub fn new(spec: &SymbolSpec, v0: &SpectralField, nl: Nonlinearity, horizon: f64, m: usize, order: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
        }
        if m == 0 || order == 0 {
            return Err(Error::InvalidArgument("snapshot count and node order must be >= 1".into()));
        }
        let breakpoints: Vec<f64> = (0..=m).map(|j| horizon * (j as f64 / m as f64).powi(2)).collect();
        let (x, w): (Vec<f64>, Vec<f64>) = GaussLegendre::new(order).mapped(0.0, 1.0).unzip();
        let lagrange = |b: usize, y: f64| -> f64 {
            (0..order)
                .filter(|&d| d != b)
                .map(|d| (y - x[d]) / (x[b] - x[d]))
                .product()
        };
        let interp = (0..order)
            .map(|a| {
                (0..order)
                    .map(|c| (0..order).map(|b| lagrange(b, x[a] * x[c])).collect())
                    .collect()
            })
            .collect();
        let flow = LinearFlow::new(spec.clone(), v0.clone());
        let snapshots = breakpoints.iter().map(|&t| flow.at(t)).collect::<Result<Vec<_>>>()?;
        let nodes = breakpoints
            .windows(2)
            .flat_map(|iv| x.iter().map(move |&xc| iv[0] + (iv[1] - iv[0]) * xc))
            .map(|t| flow.at(t))
            .collect::<Result<Vec<_>>>()?;
        let grid = *v0.grid();
        Ok(Self {
            spec: spec.clone(),
            nl,
            grid,
            conv: Convolver::new(grid),
            breakpoints,
            x,
            w,
            interp,
            real: v0.is_real() && spec.is_even(),
            linear: Iterate { snapshots, nodes },
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn order(&self) -> usize {
        self.x.len()
    }

    /// `V(t)v₀` on the mesh.
    pub fn linear_iterate(&self) -> Iterate {
        self.linear.clone()
    }

    fn finish(&self, coeffs: Vec<Complex64>) -> SpectralField {
        let f = SpectralField::from_parts(self.grid, coeffs, false);
        if self.real {
            f.symmetrize()
        } else {
            f
        }
    }

    /// `∫₀^t V(t−t')N(v(t'))dt'` on the mesh.
    pub fn duhamel(&self, it: &Iterate) -> Result<Iterate> {
        let q = self.order();
        let n = self.grid.n;
        let nl_values = it
            .nodes
            .par_iter()
            .map(|f| self.nl.apply(&self.conv, f))
            .collect::<Result<Vec<_>>>()?;
        let zero = Complex64::new(0.0, 0.0);
        let mut d = vec![zero; n];
        let mut snapshots = vec![SpectralField::zeros(self.grid)];
        let mut nodes = Vec::with_capacity(it.nodes.len());
        for (i, iv) in self.breakpoints.windows(2).enumerate() {
            let h = iv[1] - iv[0];
            let nv = &nl_values[i * q..(i + 1) * q];
            let per_mode: Vec<(Vec<Complex64>, Complex64)> = (0..n)
                .into_par_iter()
                .map(|k| {
                    let xi = self.grid.node(k);
                    let e = |tau: f64| multiplier(&self.spec, xi, tau);
                    let nk: Vec<Complex64> = nv.iter().map(|f| f.coeffs()[k]).collect();
                    let at_nodes = (0..q)
                        .map(|a| {
                            let mut acc = e(h * self.x[a]) * d[k];
                            for c in 0..q {
                                let interp: Complex64 = (0..q).map(|b| nk[b] * self.interp[a][c][b]).sum();
                                acc += interp * e(h * self.x[a] * (1.0 - self.x[c])) * (h * self.x[a] * self.w[c]);
                            }
                            acc
                        })
                        .collect();
                    let mut end = e(h) * d[k];
                    for c in 0..q {
                        end += nk[c] * e(h * (1.0 - self.x[c])) * (h * self.w[c]);
                    }
                    (at_nodes, end)
                })
                .collect();
            for a in 0..q {
                nodes.push(self.finish(per_mode.iter().map(|(v, _)| v[a]).collect()));
            }
            d = per_mode.iter().map(|(_, e)| *e).collect();
            snapshots.push(self.finish(d.clone()));
        }
        Ok(Iterate { snapshots, nodes })
    }

    /// `Ψ(v)`.
    pub fn apply(&self, it: &Iterate) -> Result<Iterate> {
        let d = self.duhamel(it)?;
        let sub = |lin: &[SpectralField], dv: &[SpectralField]| -> Result<Vec<SpectralField>> {
            lin.iter().zip(dv).map(|(a, b)| a.sub(b)).collect()
        };
        Ok(Iterate {
            snapshots: sub(&self.linear.snapshots, &d.snapshots)?,
            nodes: sub(&self.linear.nodes, &d.nodes)?,
        })
    }

    /// Weighted norm of `a − b` over the snapshots.
    pub fn distance(&self, a: &Iterate, b: &Iterate, params: &WeightedNormParams) -> Result<f64> {
        let mut sup: f64 = 0.0;
        for ((x, y), &t) in a.snapshots.iter().zip(&b.snapshots).zip(&self.breakpoints) {
            sup = sup.max(params.snapshot_norm(&x.sub(y)?, t));
        }
        Ok(sup)
    }

    pub fn norm(&self, a: &Iterate, params: &WeightedNormParams) -> f64 {
        a.snapshots
            .iter()
            .zip(&self.breakpoints)
            .map(|(f, &t)| params.snapshot_norm(f, t))
            .fold(0.0, f64::max)
    }

    pub fn trajectory(&self, it: &Iterate) -> Result<Trajectory> {
        Trajectory::from_samples(
            self.grid,
            self.breakpoints.iter().copied().zip(it.snapshots.iter().cloned()).collect(),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Snapshot count `m` of the mesh `T·(j/m)²`.
    pub m: usize,
    /// Gauss–Legendre nodes per snapshot interval.
    pub order: usize,
    /// Fixed horizon; skips the constant estimate and the horizon rule.
    pub horizon: Option<f64>,
    pub trials: usize,
    pub trial_band: f64,
    pub seed: u64,
    /// Re-solve with `2m` snapshots and report the change of `‖v(T)‖_{H^s}`.
    pub refine_check: bool,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 60,
            m: 64,
            order: 8,
            horizon: None,
            trials: 20,
            trial_band: 4.0,
            seed: 42,
            refine_check: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContractionReport {
    /// Ball radius `4c‖v₀‖_{H^s}`; absent when the horizon was fixed.
    pub r: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: f64,
    /// Empirical bilinear constant; absent when the horizon was fixed.
    pub c_hat: Option<f64>,
    /// Linear constant `sup_t ‖V(t)v₀‖_w / ‖v₀‖_{H^s}` over `[0, 1]`.
    pub linear_k: f64,
    /// `c = 2·c_hat`.
    pub c: Option<f64>,
    /// `linear_k·‖v₀‖_{H^s} ≤ r/4`: the ball holds the linear part with the
    /// same constant.
    pub ball_holds_linear: Option<bool>,
    pub alpha_or_theta: f64,
    /// `(iteration, ‖v^{k} − v^{k−1}‖_w)`.
    pub iterates: Vec<(usize, f64)>,
    pub converged: bool,
    pub ratio_max: f64,
    /// `‖v − Ψ(v)‖_w` of the returned solution.
    pub residual: f64,
    pub refinement_change: Option<f64>,
    pub m: usize,
    pub order: usize,
}

fn linear_constant(spec: &SymbolSpec, v0: &SpectralField, params: &WeightedNormParams) -> Result<f64> {
    let base = v0.hs_norm(params.s);
    if base == 0.0 {
        return Ok(0.0);
    }
    let times: Vec<f64> = (0..=128).map(|j| (j as f64 / 128.0).powi(2)).collect();
    let traj = LinearFlow::new(spec.clone(), v0.clone()).sample(&times)?;
    Ok(params.norm(&traj)? / base)
}

struct Solved {
    scheme: PicardScheme,
    solution: Iterate,
    distances: Vec<f64>,
}

fn iterate_to_tolerance(
    spec: &SymbolSpec,
    v0: &SpectralField,
    params: &WeightedNormParams,
    horizon: f64,
    m: usize,
    opts: &PicardOptions,
) -> Result<Solved> {
    let scheme = PicardScheme::new(spec, v0, params.nonlinearity(), horizon, m, opts.order)?;
    let mut current = scheme.linear_iterate();
    let mut distances = Vec::new();
    for _ in 0..opts.max_iter {
        let next = scheme.apply(&current)?;
        let d = scheme.distance(&next, &current, params)?;
        distances.push(d);
        current = next;
        if d < opts.tol {
            return Ok(Solved {
                scheme,
                solution: current,
                distances,
            });
        }
        if !d.is_finite() {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: distances.len(),
        last: distances.last().copied().unwrap_or(f64::NAN),
    })
}

/// Picard iteration `v^{k+1} = Ψ(v^k)` from `v⁰ = V(t)v₀` on `[0, T]`.
///
/// Unless fixed in `opts`, `T` follows `c·T^κ·r = 1/4` with `r = 4c‖v₀‖_{H^s}`,
/// `c = 2·c_hat`, capped at 1.
pub fn picard_solve(
    spec: &SymbolSpec,
    v0: &SpectralField,
    params: &WeightedNormParams,
    opts: &PicardOptions,
) -> Result<(Trajectory, ContractionReport)> {
    params.check_solver_range()?;
    if (params.p - spec.p).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "norm parameter p = {} differs from the symbol order {}",
            params.p, spec.p
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let kappa = params.time_exponent();
    let norm0 = v0.hs_norm(params.s);
    let linear_k = linear_constant(spec, v0, params)?;
    let (horizon, c_hat, c) = match opts.horizon {
        Some(t) => {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::InvalidArgument(format!("horizon must lie in (0, 1], got {t}")));
            }
            (t, None, None)
        }
        None => {
            let mut setup = BilinearTrials::new(*v0.grid(), opts.seed);
            setup.trials = opts.trials;
            setup.band = opts.trial_band.min(v0.grid().xi_max);
            let c_hat = estimate_bilinear_constant(spec, params, &setup)?.c_hat;
            let c = 2.0 * c_hat;
            let r = 4.0 * c * norm0;
            let t = if r == 0.0 { 1.0 } else { (1.0 / (4.0 * c * r)).powf(1.0 / kappa).min(1.0) };
            if t < 1e-6 {
                return Err(Error::HorizonUnderflow { horizon: t });
            }
            (t, Some(c_hat), Some(c))
        }
    };
    let r = c.map(|c| 4.0 * c * norm0);
    let solved = iterate_to_tolerance(spec, v0, params, horizon, opts.m, opts)?;
    let residual = {
        let next = solved.scheme.apply(&solved.solution)?;
        solved.scheme.distance(&next, &solved.solution, params)?
    };
    let ratio_max = solved
        .distances
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max);
    let traj = solved.scheme.trajectory(&solved.solution)?;
    let refinement_change = if opts.refine_check {
        let fine = iterate_to_tolerance(spec, v0, params, horizon, 2 * opts.m, opts)?;
        let a = solved.solution.snapshots.last().map(|f| f.hs_norm(params.s)).unwrap_or(0.0);
        let b = fine.solution.snapshots.last().map(|f| f.hs_norm(params.s)).unwrap_or(0.0);
        Some((a - b).abs())
    } else {
        None
    };
    let report = ContractionReport {
        r,
        horizon,
        c_hat,
        linear_k,
        c,
        ball_holds_linear: r.map(|r| linear_k * norm0 <= 0.25 * r),
        alpha_or_theta: kappa,
        iterates: solved.distances.iter().enumerate().map(|(k, &d)| (k + 1, d)).collect(),
        converged: true,
        ratio_max,
        residual,
        refinement_change,
        m: opts.m,
        order: opts.order,
    };
    Ok((traj, report))
}

#[cfg(test)]
mod tests {
    use super::super::{duhamel_on_mesh, gaussian_data};
    use super::*;

    fn setup() -> (SymbolSpec, SpectralField, WeightedNormParams) {
        let grid = FrequencyGrid::with_spacing(10.0, 1.0 / 8.0).unwrap();
        let spec = SymbolSpec::kdv_ks();
        let v0 = gaussian_data(grid, -1.0, 0.1).unwrap();
        (spec, v0, WeightedNormParams::x(-1.0, 4.0).unwrap())
    }

    #[test]
    fn zero_data_is_a_fixed_point() {
        let (spec, v0, params) = setup();
        let zero = SpectralField::zeros(*v0.grid());
        let opts = PicardOptions {
            horizon: Some(0.5),
            m: 8,
            order: 4,
            ..PicardOptions::default()
        };
        let (traj, report) = picard_solve(&spec, &zero, &params, &opts).unwrap();
        assert_eq!(report.iterates.len(), 1);
        assert_eq!(report.iterates[0].1, 0.0);
        assert!(traj.samples().iter().all(|(_, f)| f.max_abs() == 0.0));
    }

    #[test]
    fn first_iterate_is_linear_minus_duhamel() {
        let (spec, v0, _) = setup();
        let nl = Nonlinearity::DerivativeOfSquare;
        let scheme = PicardScheme::new(&spec, &v0, nl, 0.3, 8, 6).unwrap();
        let lin = scheme.linear_iterate();
        let first = scheme.apply(&lin).unwrap();
        let flow = LinearFlow::new(spec.clone(), v0.clone());
        for (j, &t) in scheme.breakpoints().iter().enumerate().skip(1) {
            let d = duhamel_on_mesh(&spec, &flow, t, nl, scheme.breakpoints(), scheme.order()).unwrap();
            let expect = lin.snapshots[j].sub(&d).unwrap();
            let gap = first.snapshots[j].sub(&expect).unwrap().max_abs();
            assert!(gap <= 1e-13 * d.max_abs().max(1e-300), "t = {t}: {gap}");
        }
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        let (spec, v0, _) = setup();
        let bad = WeightedNormParams::x(-2.5, 4.0).unwrap();
        assert!(matches!(
            picard_solve(&spec, &v0, &bad, &PicardOptions::default()),
            Err(Error::Inadmissible(_))
        ));
        let burgers = SymbolSpec::kdv_burgers();
        let p2 = WeightedNormParams::x(-0.5, 2.0).unwrap();
        assert!(picard_solve(&burgers, &v0, &p2, &PicardOptions::default()).is_err());
    }
}
