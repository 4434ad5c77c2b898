//! Acceptance criteria, one line each. Exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use kdvlab::field::ConvolutionMethod;
use kdvlab::illposed::{counterexample_data, inflation_sweep, resonance, second_iterate, CounterexampleParams};
use kdvlab::semigroup::{apply_semigroup, kernel_weighted_l2, log_grid, KernelWeight};
use kdvlab::wellposed::{duhamel_nl, evolve, gaussian_data, picard_solve, LinearFlow, PicardOptions};
use kdvlab::{
    convolve, Complex64, FrequencyGrid, Nonlinearity, QuadConfig, SpectralField, SymbolSpec, WeightedNormParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

const N_LIST: [f64; 4] = [100.0, 200.0, 400.0, 800.0];

fn slope_within(which: Nonlinearity, s: f64, target: f64) -> Outcome {
    let spec = SymbolSpec::kdv_ks();
    match inflation_sweep(&spec, s, 1.0, 0.1, &N_LIST, which, 64) {
        Ok(r) => {
            let rel = (r.fitted_slope - target).abs() / target.abs();
            outcome(
                rel <= 0.10 && !r.inconclusive,
                format!(
                    "slope {:.6} vs {:+.1} (rel dev {:.2e}, tol 1e-1), fit residual {:.2e}, bands ok {}",
                    r.fitted_slope, target, rel, r.fit_residual, r.denominator_band_ok
                ),
            )
        }
        Err(e) => outcome(false, format!("sweep failed: {e}")),
    }
}

fn criterion_1() -> Outcome {
    slope_within(Nonlinearity::DerivativeOfSquare, -2.5, 1.0)
}

fn criterion_2() -> Outcome {
    let spec = SymbolSpec::kdv_ks();
    let above = inflation_sweep(&spec, -1.5, 1.0, 0.1, &N_LIST, Nonlinearity::DerivativeOfSquare, 64);
    let below = inflation_sweep(&spec, -2.5, 1.0, 0.1, &N_LIST, Nonlinearity::DerivativeOfSquare, 64);
    match (above, below) {
        (Ok(a), Ok(b)) => outcome(
            a.fitted_slope <= -0.5 && b.fitted_slope > 0.0,
            format!(
                "slope {:.6} at s = -1.5 (need <= -0.5), {:.6} at s = -2.5 (sign flip)",
                a.fitted_slope, b.fitted_slope
            ),
        ),
        (Err(e), _) | (_, Err(e)) => outcome(false, format!("sweep failed: {e}")),
    }
}

fn criterion_3() -> Outcome {
    slope_within(Nonlinearity::SquareOfGradient, -1.5, 1.0)
}

fn criterion_4() -> Outcome {
    let spec = SymbolSpec::kdv_ks();
    let params = CounterexampleParams::new(20.0, 1.0, -2.0, 0.05);
    let run = || -> kdvlab::Result<f64> {
        let grid = FrequencyGrid::with_spacing(2.0 * params.n + 6.0, 1.0 / 64.0)?;
        let v0 = counterexample_data(&params, grid)?;
        let closed = second_iterate(&spec, &params, grid, Nonlinearity::DerivativeOfSquare, 64)?;
        let quad = QuadConfig {
            panels: 64,
            order: 16,
            grading: 3.0,
            refine_tol: Some(1e-8),
        };
        let flow = LinearFlow::new(spec.clone(), v0);
        let generic = duhamel_nl(&spec, &flow, params.t_eval, Nonlinearity::DerivativeOfSquare, &quad)?;
        let (mut num, mut den) = (0.0, 0.0);
        for (k, xi) in grid.nodes().enumerate() {
            if xi.abs() <= 0.5 * params.gamma {
                num += (generic.coeffs()[k] - closed.coeffs()[k]).norm_sqr();
                den += closed.coeffs()[k].norm_sqr();
            }
        }
        Ok((num / den).sqrt())
    };
    match run() {
        Ok(rel) => outcome(rel < 1e-6, format!("window relative L2 gap {rel:.3e} (tol 1e-6)")),
        Err(e) => outcome(false, format!("run failed: {e}")),
    }
}

fn picard_grid() -> FrequencyGrid {
    FrequencyGrid::with_spacing(10.0, 1.0 / 8.0).expect("grid")
}

fn relative_gap(a: &SpectralField, b: &SpectralField) -> f64 {
    a.sub(b).expect("same grid").l2_norm() / b.l2_norm()
}

fn criterion_5() -> Outcome {
    let spec = SymbolSpec::kdv_ks();
    let run = || -> kdvlab::Result<Outcome> {
        let v0 = gaussian_data(picard_grid(), -1.0, 0.1)?;
        let params = WeightedNormParams::x(-1.0, 4.0)?;
        let (traj, report) = picard_solve(&spec, &v0, &params, &PicardOptions::default())?;
        let horizon = report.horizon;
        let marched = evolve(&spec, &v0, horizon, horizon * 1e-4, Some(Nonlinearity::DerivativeOfSquare))?;
        let gap = relative_gap(traj.last().expect("snapshots"), marched.last().expect("steps"));
        let geometric = report.iterates.windows(2).all(|w| w[1].1 < w[0].1);
        Ok(outcome(
            geometric && report.ratio_max <= 0.6 && report.residual < 1e-8 && gap < 1e-6,
            format!(
                "T {:.4}, {} iterations, ratio_max {:.3e} (tol 0.6), residual {:.3e} (tol 1e-8), picard vs evolve {:.3e} (tol 1e-6)",
                horizon,
                report.iterates.len(),
                report.ratio_max,
                report.residual,
                gap
            ),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, format!("run failed: {e}")))
}

fn criterion_6() -> Outcome {
    let spec = SymbolSpec::kdv_ks();
    let weight = KernelWeight::XiBracketS;
    let a = kernel_weighted_l2(&spec, -1.0, weight, &log_grid(1e-5, 1.0, 50));
    let b = kernel_weighted_l2(&spec, -1.0, weight, &log_grid(1e-6, 1.0, 50));
    match (a, b) {
        (Ok(a), Ok(b)) => {
            let change = (b.sup_constant - a.sup_constant).abs() / a.sup_constant;
            outcome(
                change < 0.01,
                format!(
                    "sup {:.10} at floor 1e-5, {:.10} at floor 1e-6, change {change:.3e} (tol 1e-2)",
                    a.sup_constant, b.sup_constant
                ),
            )
        }
        (Err(e), _) | (_, Err(e)) => outcome(false, format!("run failed: {e}")),
    }
}

fn criterion_7() -> Outcome {
    let spec = SymbolSpec::kdv_ks();
    let grid = FrequencyGrid::new(16.0, 512).expect("grid");
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let coeffs: Vec<Complex64> = grid
        .nodes()
        .map(|xi| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (-0.1 * xi * xi).exp())
        .collect();
    let f = SpectralField::new(grid, coeffs, false).expect("field").symmetrize();

    let mut semigroup_err: f64 = 0.0;
    for (t1, t2) in [(0.1, 0.2), (0.013, 0.5), (1e-4, 0.7)] {
        let two = apply_semigroup(&spec, &apply_semigroup(&spec, &f, t1).unwrap(), t2).unwrap();
        let one = apply_semigroup(&spec, &f, t1 + t2).unwrap();
        semigroup_err = semigroup_err.max(two.sub(&one).unwrap().max_abs());
    }

    let mut resonance_err: f64 = 0.0;
    for _ in 0..100_000 {
        let xi: f64 = rng.gen_range(-1e3..1e3);
        let xi1: f64 = rng.gen_range(-1e3..1e3);
        let cubic = -xi.powi(3) + xi1.powi(3) + (xi - xi1).powi(3);
        let scale = xi.abs().max(xi1.abs()).max((xi - xi1).abs()).powi(3);
        resonance_err = resonance_err.max((cubic - resonance(xi, xi1)).abs() / scale);
    }

    let m = 1024;
    let phys = f.to_physical(m).unwrap();
    let back = SpectralField::from_physical(grid, &phys, true).unwrap();
    let roundtrip = back.sub(&f).unwrap().max_abs() / f.max_abs();
    let dx = 2.0 * std::f64::consts::PI / (m as f64 * grid.dxi);
    let phys_l2 = (phys.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt();
    let plancherel = (phys_l2 - f.l2_norm()).abs() / f.l2_norm();

    let evolved = apply_semigroup(&spec, &f, 0.3).unwrap();
    let product = convolve(&f, &evolved).unwrap();
    let direct = kdvlab::field::convolve_with(&f, &evolved, ConvolutionMethod::Direct).unwrap();
    let hermitian = [evolved.hermitian_defect(), product.hermitian_defect(), direct.hermitian_defect()]
        .into_iter()
        .fold(0.0, f64::max);
    let hermitian_ok = evolved.is_real() && product.is_real() && hermitian < 1e-12;

    outcome(
        semigroup_err < 1e-12 && resonance_err < 1e-12 && roundtrip < 1e-10 && plancherel < 1e-10 && hermitian_ok,
        format!(
            "semigroup {semigroup_err:.2e} (tol 1e-12), resonance {resonance_err:.2e} (tol 1e-12), round trip {roundtrip:.2e} and Plancherel {plancherel:.2e} (tol 1e-10), Hermitian defect {hermitian:.2e}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let spec = SymbolSpec::kdv_ks();
    let run = || -> kdvlab::Result<Outcome> {
        let u0 = gaussian_data(picard_grid(), -0.5, 0.1)?;
        let v0 = u0.derivative();
        let y = WeightedNormParams::y(-0.5, 4.0)?;
        let (_, report_u) = picard_solve(&spec, &u0, &y, &PicardOptions::default())?;
        let fixed = PicardOptions {
            horizon: Some(report_u.horizon),
            ..PicardOptions::default()
        };
        let (traj_u, _) = picard_solve(&spec, &u0, &y, &fixed)?;
        let x = WeightedNormParams::x(-1.5, 4.0)?;
        let (traj_v, _) = picard_solve(&spec, &v0, &x, &fixed)?;
        let ux = traj_u.last().expect("snapshots").derivative();
        let gap = relative_gap(traj_v.last().expect("snapshots"), &ux);
        Ok(outcome(
            gap < 1e-6,
            format!("T {:.4}, relative gap between v(T) and u_x(T) {gap:.3e} (tol 1e-6)", report_u.horizon),
        ))
    };
    run().unwrap_or_else(|e| outcome(false, format!("run failed: {e}")))
}

/// Independent threshold: last failing point of a fine scan, then bisection.
fn threshold_oracle(spec: &SymbolSpec) -> f64 {
    let holds = |xi: f64| {
        let phi = spec.eval_phi(xi);
        let pow = xi.powf(spec.p);
        phi < -1.0 && spec.phi1(xi) / pow <= 0.5 && phi.abs() >= 0.5 * pow
    };
    let holds_both = |xi: f64| holds(xi) && holds(-xi);
    let mut last_fail = 1.0;
    let mut xi = 1.0;
    while xi < 100.0 {
        if !holds_both(xi) {
            last_fail = xi;
        }
        xi += 1e-3;
    }
    let (mut lo, mut hi) = (last_fail, last_fail + 1e-3);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if holds_both(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn criterion_9() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, expect) in [("ost", 2f64.sqrt()), ("kdvks", 2f64.sqrt()), ("kdvb", 1.0)] {
        let spec = SymbolSpec::builtin(name).expect("builtin");
        let oracle = threshold_oracle(&spec);
        match spec.threshold_m() {
            Ok(m) => {
                let ok = (m - oracle).abs() <= 1e-9 * oracle && (m - expect).abs() <= 1e-9 * expect;
                pass &= ok;
                parts.push(format!("{name} M = {m:.12} (oracle {oracle:.12})"));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("inflation slope, derivative nonlinearity", criterion_1),
        ("threshold straddle", criterion_2),
        ("inflation slope, gradient nonlinearity", criterion_3),
        ("closed form vs generic Duhamel", criterion_4),
        ("contraction suite", criterion_5),
        ("smoothing-lemma stability", criterion_6),
        ("structural identities", criterion_7),
        ("derivative relation", criterion_8),
        ("threshold values", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {} [{verdict}] {name}: {} ({:.1}s)",
            k + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
