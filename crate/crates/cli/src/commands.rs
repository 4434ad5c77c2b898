//! One function per subcommand. Each writes its artifacts into `out` and
//! returns the named checks it evaluated.

use std::collections::BTreeMap;
use std::path::Path;

use kdvlab::illposed::{c2_flowmap_witness, inflation_sweep};
use kdvlab::io::{parse_field_csv, write_csv, write_json, write_trajectory};
use kdvlab::semigroup::{kernel_weighted_l2, log_grid, verify_linear_xnorm};
use kdvlab::wellposed::{evolve, gaussian_data, picard_solve, xts_norm, yts_norm, LinearFlow, PicardOptions};
use kdvlab::{KernelWeight, SpectralField, Trajectory, WeightedNormParams};
use serde::Serialize;

use crate::config::{bad, parse_nonlinearity, parse_variant, Command, RunConfig};
use crate::error::CliError;

#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: BTreeMap<String, bool>,
    pub artifacts: Vec<String>,
}

impl Outcome {
    fn check(&mut self, name: &str, ok: bool) {
        self.checks.insert(name.to_string(), ok);
    }

    fn json<T: Serialize + ?Sized>(&mut self, out: &Path, name: &str, value: &T) -> Result<(), CliError> {
        write_json(&out.join(name), value)?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn csv(&mut self, out: &Path, name: &str, header: &[&str], rows: Vec<Vec<f64>>) -> Result<(), CliError> {
        write_csv(&out.join(name), header, rows)?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn trajectory(&mut self, out: &Path, name: &str, traj: &Trajectory) -> Result<(), CliError> {
        write_trajectory(&out.join(name), traj)?;
        self.artifacts.push(format!("{name}/index.json"));
        Ok(())
    }
}

pub fn run(command: Command, cfg: &RunConfig, seed: u64, out: &Path) -> Result<Outcome, CliError> {
    match command {
        Command::Solve => solve(cfg, seed, out),
        Command::Evolve => evolve_cmd(cfg, out),
        Command::VerifyLemmas => verify(cfg, out),
        Command::Inflate => inflate(cfg, out),
        Command::Norms => norms(cfg, out),
        Command::Threshold => threshold(cfg, out),
    }
}

fn initial_data(cfg: &RunConfig, default_s: f64, default_norm: f64) -> Result<SpectralField, CliError> {
    let grid = cfg.frequency_grid()?;
    if let Some(path) = &cfg.data.file {
        if cfg.data.norm.is_some() {
            return Err(bad("data.norm", "cannot be combined with data.file"));
        }
        let text = std::fs::read_to_string(path).map_err(|e| bad("data.file", format!("{}: {e}", path.display())))?;
        let field = parse_field_csv(grid, &text, false).map_err(|e| bad("data.file", e))?;
        // real-valued when the file is Hermitian
        return Ok(if field.is_hermitian(1e-12) { field.symmetrize() } else { field });
    }
    let s = cfg.data.s.unwrap_or(default_s);
    let norm = cfg.data.norm.unwrap_or(default_norm);
    if !(norm >= 0.0 && norm.is_finite()) {
        return Err(bad("data.norm", "must be a non-negative number"));
    }
    gaussian_data(grid, s, norm).map_err(|e| CliError::from_core("data", e))
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    report: &'a kdvlab::ContractionReport,
    final_hs_norm: f64,
    evolve_gap: Option<f64>,
}

fn solve(cfg: &RunConfig, seed: u64, out: &Path) -> Result<Outcome, CliError> {
    let sec = cfg.solve.as_ref().expect("section checked at load");
    let nl = parse_nonlinearity("solve.nonlinearity", &sec.nonlinearity)?;
    let variant = parse_variant("solve.variant", &sec.variant)?;
    let params = WeightedNormParams::new(sec.s, cfg.spec.p, variant).map_err(|e| bad("solve.s", e))?;
    params.check_solver_range().map_err(|e| bad("solve.s", e))?;
    if !(sec.max_ratio > 0.0 && sec.max_ratio < 1.0) {
        return Err(bad("solve.max_ratio", "must lie in (0, 1)"));
    }
    let v0 = initial_data(cfg, sec.s, 0.1)?;
    let opts = PicardOptions {
        tol: sec.tol,
        max_iter: sec.max_iter,
        m: sec.m,
        order: sec.order,
        horizon: sec.horizon,
        trials: sec.trials,
        trial_band: sec.trial_band,
        seed,
        refine_check: sec.refine_check,
    };
    let (traj, report) = picard_solve(&cfg.spec, &v0, &params, &opts).map_err(|e| CliError::from_core("solve", e))?;

    let mut o = Outcome::default();
    o.check("converged", report.converged);
    o.check("ratio_max_within_bound", report.ratio_max <= sec.max_ratio);
    o.check("residual_within_tol", report.residual < sec.residual_tol);

    let last = traj.last().expect("trajectory holds t = 0");
    let evolve_gap = match sec.compare_dt {
        None => None,
        Some(dt) => {
            if !(dt > 0.0) {
                return Err(bad("solve.compare_dt", "must be positive"));
            }
            let marched = evolve(&cfg.spec, &v0, report.horizon, dt, Some(nl)).map_err(|e| CliError::from_core("solve", e))?;
            let end = marched.last().expect("evolve returns t = 0");
            let gap = end.sub(last)?.hs_norm(sec.s) / last.hs_norm(sec.s).max(f64::MIN_POSITIVE);
            o.check("agrees_with_evolve", gap < sec.compare_tol);
            Some(gap)
        }
    };

    o.trajectory(out, "trajectory", &traj)?;
    o.csv(
        out,
        "iterates.csv",
        &["k", "distance"],
        report.iterates.iter().map(|&(k, d)| vec![k as f64, d]).collect(),
    )?;
    let summary = SolveSummary {
        report: &report,
        final_hs_norm: last.hs_norm(sec.s),
        evolve_gap,
    };
    o.json(out, "contraction_report.json", &summary)?;
    Ok(o)
}

fn evolve_cmd(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let sec = cfg.evolve.as_ref().expect("section checked at load");
    let nl = match sec.nonlinearity.as_str() {
        "none" | "linear" => None,
        other => Some(parse_nonlinearity("evolve.nonlinearity", other)?),
    };
    if !(sec.horizon >= 0.0 && sec.horizon.is_finite()) {
        return Err(bad("evolve.horizon", "must be a non-negative number"));
    }
    if !(sec.dt > 0.0 && sec.dt.is_finite()) {
        return Err(bad("evolve.dt", "must be positive"));
    }
    if sec.snapshots < 2 {
        return Err(bad("evolve.snapshots", "must be at least 2"));
    }
    let v0 = initial_data(cfg, sec.s, 0.1)?;
    let full = evolve(&cfg.spec, &v0, sec.horizon, sec.dt, nl).map_err(|e| CliError::from_core("evolve", e))?;

    let samples = full.samples();
    let last = samples.len() - 1;
    let mut picks: Vec<usize> = (0..sec.snapshots)
        .map(|j| (j * last + (sec.snapshots - 1) / 2) / (sec.snapshots - 1))
        .collect();
    picks.dedup();
    let thinned = Trajectory::from_samples(*v0.grid(), picks.iter().map(|&k| samples[k].clone()).collect())?;

    let mut o = Outcome::default();
    let finite = samples.iter().all(|(_, f)| f.l2_norm().is_finite());
    o.check("finite", finite);
    o.trajectory(out, "trajectory", &thinned)?;
    o.csv(
        out,
        "norms.csv",
        &["t", "l2_norm", "hs_norm"],
        thinned
            .samples()
            .iter()
            .map(|(t, f)| vec![*t, f.l2_norm(), f.hs_norm(sec.s)])
            .collect(),
    )?;
    Ok(o)
}

#[derive(Serialize)]
struct SmoothingSummary {
    weight: KernelWeight,
    a: f64,
    sup_constant: f64,
    sup_constant_extended: f64,
    monotone_tail_ok: bool,
    stable: bool,
}

fn weight_by_name(name: &str, eps: f64) -> Option<KernelWeight> {
    match name {
        "xi_bracket_s" => Some(KernelWeight::XiBracketS),
        "bracket_s_only" => Some(KernelWeight::BracketSOnly),
        "xi_only" => Some(KernelWeight::XiOnly { eps }),
        _ => None,
    }
}

fn verify(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let sec = cfg.verify.as_ref().expect("section checked at load");
    let p = cfg.spec.p;
    if !(sec.tau_min > 0.0 && sec.tau_min < sec.tau_max && sec.tau_max <= 1.0) {
        return Err(bad("verify.tau_min", "need 0 < tau_min < tau_max <= 1"));
    }
    if sec.points < 2 {
        return Err(bad("verify.points", "must be at least 2"));
    }
    let (names, explicit): (Vec<String>, bool) = match &sec.weights {
        Some(w) => (w.clone(), true),
        None => (
            ["xi_bracket_s", "bracket_s_only", "xi_only"].map(String::from).to_vec(),
            false,
        ),
    };
    let taus = log_grid(sec.tau_min, sec.tau_max, sec.points);
    let mut o = Outcome::default();
    for name in &names {
        let weight = weight_by_name(name, sec.eps).ok_or_else(|| bad("verify.weights", format!("unknown weight {name:?}")))?;
        if let Err(e) = weight.admissible(sec.s, p) {
            if explicit {
                return Err(bad("verify.weights", format!("{name}: {e}")));
            }
            continue;
        }
        let rep = kernel_weighted_l2(&cfg.spec, sec.s, weight, &taus).map_err(|e| CliError::from_core("verify", e))?;
        o.check(&format!("smoothing_{name}_stable"), rep.stable);
        o.csv(
            out,
            &format!("smoothing_{name}.csv"),
            &["tau", "kernel_norm", "weighted_value"],
            rep.tau_values
                .iter()
                .zip(&rep.kernel_norms)
                .zip(&rep.weighted_values)
                .map(|((t, k), w)| vec![*t, *k, *w])
                .collect(),
        )?;
        let summary = SmoothingSummary {
            weight,
            a: rep.exponent,
            sup_constant: rep.sup_constant,
            sup_constant_extended: rep.sup_constant_extended,
            monotone_tail_ok: rep.monotone_tail_ok,
            stable: rep.stable,
        };
        o.json(out, &format!("smoothing_{name}.json"), &summary)?;
    }
    if o.checks.is_empty() {
        return Err(bad("verify.s", "no smoothing weight is admissible for this s and p"));
    }

    if !(sec.linear_horizon > 0.0 && sec.linear_horizon <= 1.0) {
        return Err(bad("verify.linear_horizon", "must lie in (0, 1]"));
    }
    if sec.linear_points < 2 {
        return Err(bad("verify.linear_points", "must be at least 2"));
    }
    let v0 = initial_data(cfg, sec.s, 1.0)?;
    let n = sec.linear_points - 1;
    let t_grid: Vec<f64> = (0..=n).map(|j| sec.linear_horizon * (j as f64 / n as f64).powi(2)).collect();
    let est = verify_linear_xnorm(&cfg.spec, &v0, sec.s, sec.linear_horizon, &t_grid)
        .map_err(|e| CliError::from_core("verify", e))?;
    o.check("linear_estimate_stable", est.stable);
    o.json(out, "linear_estimate.json", &est)?;
    Ok(o)
}

fn inflate(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let sec = cfg.inflate.as_ref().expect("section checked at load");
    let which = parse_nonlinearity("inflate.which", &sec.which)?;
    if sec.n_list.len() < 4 || sec.n_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(bad("inflate.n_list", "need at least 4 increasing values"));
    }
    if sec.per_gamma < 16 {
        return Err(bad("inflate.per_gamma", "must be at least 16"));
    }
    let sweep = inflation_sweep(&cfg.spec, sec.s, sec.gamma, sec.t_eval, &sec.n_list, which, sec.per_gamma)
        .map_err(|e| CliError::from_core("inflate", e))?;

    let mut o = Outcome::default();
    o.check("denominator_band_ok", sweep.denominator_band_ok);
    o.check("fit_conclusive", !sweep.inconclusive);
    if let Some(tol) = sec.slope_tol {
        let rel = (sweep.fitted_slope - sweep.predicted_slope).abs() / sweep.predicted_slope.abs().max(f64::MIN_POSITIVE);
        o.check("slope_within_tol", rel <= tol);
    }
    o.csv(
        out,
        "sweep.csv",
        &["N", "norm", "window_norm"],
        sweep
            .n_values
            .iter()
            .zip(&sweep.full_norms)
            .zip(&sweep.norm_values)
            .map(|((n, full), win)| vec![*n, *full, *win])
            .collect(),
    )?;
    o.json(out, "sweep.json", &sweep)?;

    if sec.witness {
        let w = c2_flowmap_witness(&cfg.spec, sec.s, sec.gamma, sec.t_eval, &sec.n_list, which, sec.per_gamma)
            .map_err(|e| CliError::from_core("inflate", e))?;
        o.csv(
            out,
            "c2_witness.csv",
            &["N", "data_norm", "v2_norm", "ratio"],
            (0..w.n_values.len())
                .map(|k| vec![w.n_values[k], w.data_norms[k], w.v2_norms[k], w.ratios[k]])
                .collect(),
        )?;
        o.json(out, "c2_witness.json", &w)?;
    }
    Ok(o)
}

#[derive(Serialize)]
struct FlowNorms {
    s: f64,
    horizon: f64,
    x_norm: f64,
    y_norm: f64,
}

fn norms(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let sec = cfg.norms.as_ref().expect("section checked at load");
    if sec.s_values.is_empty() {
        return Err(bad("norms.s_values", "must not be empty"));
    }
    let base_s = sec.flow_s.unwrap_or(sec.s_values[0]);
    let v0 = initial_data(cfg, base_s, 1.0)?;
    let mut o = Outcome::default();
    let rows: Vec<Vec<f64>> = sec.s_values.iter().map(|&s| vec![s, v0.hs_norm(s)]).collect();
    o.check("finite", rows.iter().all(|r| r[1].is_finite()));
    o.csv(out, "norms.csv", &["s", "hs_norm"], rows)?;

    if let Some(horizon) = sec.horizon {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(bad("norms.horizon", "must be positive"));
        }
        if sec.points < 2 {
            return Err(bad("norms.points", "must be at least 2"));
        }
        let n = sec.points - 1;
        let times: Vec<f64> = (0..=n).map(|j| horizon * (j as f64 / n as f64).powi(2)).collect();
        let traj = LinearFlow::new(cfg.spec.clone(), v0).sample(&times)?;
        let x = WeightedNormParams::x(base_s, cfg.spec.p).map_err(|e| bad("norms.flow_s", e))?;
        let x_norm = xts_norm(&traj, &x)?;
        let y = WeightedNormParams::y(base_s, cfg.spec.p).map_err(|e| bad("norms.flow_s", e))?;
        let y_norm = yts_norm(&traj, &y)?;
        o.check("flow_norms_finite", x_norm.is_finite() && y_norm.is_finite());
        o.json(
            out,
            "flow_norms.json",
            &FlowNorms {
                s: base_s,
                horizon,
                x_norm,
                y_norm,
            },
        )?;
    }
    Ok(o)
}

#[derive(Serialize)]
struct ThresholdSummary<'a> {
    spec: &'a kdvlab::SymbolSpec,
    #[serde(rename = "M")]
    m: f64,
    sup_phi: f64,
    c_m: f64,
}

fn threshold(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let m = cfg.spec.threshold_m().map_err(|e| CliError::from_core("symbol", e))?;
    let sup_phi = cfg.spec.sup_phi().map_err(|e| CliError::from_core("symbol", e))?;
    let mut o = Outcome::default();
    o.check("threshold_found", m.is_finite() && m >= 1.0);
    o.json(
        out,
        "threshold.json",
        &ThresholdSummary {
            spec: &cfg.spec,
            m,
            sup_phi,
            c_m: cfg.spec.eta * sup_phi,
        },
    )?;
    Ok(o)
}
