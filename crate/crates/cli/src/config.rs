//! Run configuration. The grammar is documented in `docs/config.md`.

use std::path::{Path, PathBuf};

use kdvlab::{FrequencyGrid, Nonlinearity, NormVariant, SymbolSpec, Term};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Solve,
    Evolve,
    VerifyLemmas,
    Inflate,
    Norms,
    Threshold,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Solve => "solve",
            Self::Evolve => "evolve",
            Self::VerifyLemmas => "verify-lemmas",
            Self::Inflate => "inflate",
            Self::Norms => "norms",
            Self::Threshold => "threshold",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Option<String>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    symbol: toml::Value,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    data: DataSection,
    solve: Option<SolveSection>,
    evolve: Option<EvolveSection>,
    verify: Option<VerifySection>,
    inflate: Option<InflateSection>,
    norms: Option<NormsSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "d_xi_max")]
    pub xi_max: f64,
    #[serde(default = "d_dxi")]
    pub dxi: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            xi_max: d_xi_max(),
            dxi: d_dxi(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    /// Target `H^s` norm of the Gaussian profile.
    pub norm: Option<f64>,
    /// Sobolev index the target norm refers to; defaults to the command's `s`.
    pub s: Option<f64>,
    /// Field CSV (`xi,re,im`) on the configured grid, replacing the Gaussian.
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    pub s: f64,
    #[serde(default = "d_variant")]
    pub variant: String,
    #[serde(default = "d_nonlinearity")]
    pub nonlinearity: String,
    #[serde(default = "d_tol")]
    pub tol: f64,
    #[serde(default = "d_max_iter")]
    pub max_iter: usize,
    #[serde(default = "d_m")]
    pub m: usize,
    #[serde(default = "d_order")]
    pub order: usize,
    pub horizon: Option<f64>,
    #[serde(default = "d_trials")]
    pub trials: usize,
    #[serde(default = "d_trial_band")]
    pub trial_band: f64,
    #[serde(default)]
    pub refine_check: bool,
    #[serde(default = "d_max_ratio")]
    pub max_ratio: f64,
    #[serde(default = "d_residual_tol")]
    pub residual_tol: f64,
    /// Step of an independent exponential-integrator run compared at `T`.
    pub compare_dt: Option<f64>,
    #[serde(default = "d_compare_tol")]
    pub compare_tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    pub horizon: f64,
    pub dt: f64,
    #[serde(default = "d_nonlinearity")]
    pub nonlinearity: String,
    #[serde(default = "d_snapshots")]
    pub snapshots: usize,
    /// Sobolev index of the Gaussian data norm.
    #[serde(default)]
    pub s: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub s: f64,
    #[serde(default = "d_tau_min")]
    pub tau_min: f64,
    #[serde(default = "d_tau_max")]
    pub tau_max: f64,
    #[serde(default = "d_points")]
    pub points: usize,
    pub weights: Option<Vec<String>>,
    #[serde(default = "d_eps")]
    pub eps: f64,
    #[serde(default = "d_tau_max")]
    pub linear_horizon: f64,
    #[serde(default = "d_linear_points")]
    pub linear_points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InflateSection {
    pub s: f64,
    #[serde(default = "d_gamma")]
    pub gamma: f64,
    #[serde(default = "d_t_eval")]
    pub t_eval: f64,
    pub n_list: Vec<f64>,
    #[serde(default = "d_nonlinearity")]
    pub which: String,
    #[serde(default = "d_per_gamma")]
    pub per_gamma: usize,
    #[serde(default)]
    pub witness: bool,
    /// Relative tolerance on `|fitted − predicted| / |predicted|`.
    pub slope_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsSection {
    pub s_values: Vec<f64>,
    /// When set, weighted norms of the linear flow on `[0, horizon]` are added.
    pub horizon: Option<f64>,
    pub flow_s: Option<f64>,
    #[serde(default = "d_linear_points")]
    pub points: usize,
}

fn d_xi_max() -> f64 {
    10.0
}
fn d_dxi() -> f64 {
    0.125
}
fn d_variant() -> String {
    "x".into()
}
fn d_nonlinearity() -> String {
    "derivative_of_square".into()
}
fn d_tol() -> f64 {
    1e-10
}
fn d_max_iter() -> usize {
    60
}
fn d_m() -> usize {
    64
}
fn d_order() -> usize {
    8
}
fn d_trials() -> usize {
    20
}
fn d_trial_band() -> f64 {
    4.0
}
fn d_max_ratio() -> f64 {
    0.6
}
fn d_residual_tol() -> f64 {
    1e-8
}
fn d_compare_tol() -> f64 {
    1e-6
}
fn d_snapshots() -> usize {
    11
}
fn d_tau_min() -> f64 {
    1e-5
}
fn d_tau_max() -> f64 {
    1.0
}
fn d_points() -> usize {
    50
}
fn d_eps() -> f64 {
    0.1
}
fn d_linear_points() -> usize {
    65
}
fn d_gamma() -> f64 {
    1.0
}
fn d_t_eval() -> f64 {
    0.1
}
fn d_per_gamma() -> usize {
    kdvlab::illposed::DEFAULT_PER_GAMMA
}

/// Parsed configuration plus the raw table for the manifest echo.
#[derive(Debug)]
pub struct RunConfig {
    pub echo: toml::Table,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub spec: SymbolSpec,
    pub grid: GridSection,
    pub data: DataSection,
    pub solve: Option<SolveSection>,
    pub evolve: Option<EvolveSection>,
    pub verify: Option<VerifySection>,
    pub inflate: Option<InflateSection>,
    pub norms: Option<NormsSection>,
}

pub fn bad(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config {
        key: key.to_string(),
        msg: msg.to_string(),
    }
}

impl RunConfig {
    pub fn load(path: &Path, command: Command) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad("--config", format!("{}: {e}", path.display())))?;
        Self::parse(&text, command)
    }

    pub fn parse(text: &str, command: Command) -> Result<Self, CliError> {
        let echo: toml::Table = text.parse().map_err(|e: toml::de::Error| syntax_error(&e))?;
        let raw: RawConfig = toml::from_str(text).map_err(|e| syntax_error(&e))?;
        if let Some(c) = &raw.command {
            if c != command.name() {
                return Err(bad("command", format!("config is for {c:?}, invoked as {:?}", command.name())));
            }
        }
        let spec = parse_symbol(&raw.symbol)?;
        let cfg = Self {
            echo,
            seed: raw.seed,
            output: raw.output,
            spec,
            grid: raw.grid,
            data: raw.data,
            solve: raw.solve,
            evolve: raw.evolve,
            verify: raw.verify,
            inflate: raw.inflate,
            norms: raw.norms,
        };
        cfg.check_section(command)?;
        Ok(cfg)
    }

    fn check_section(&self, command: Command) -> Result<(), CliError> {
        let present = match command {
            Command::Solve => self.solve.is_some(),
            Command::Evolve => self.evolve.is_some(),
            Command::VerifyLemmas => self.verify.is_some(),
            Command::Inflate => self.inflate.is_some(),
            Command::Norms => self.norms.is_some(),
            Command::Threshold => true,
        };
        if present {
            Ok(())
        } else {
            let key = match command {
                Command::VerifyLemmas => "verify",
                other => other.name(),
            };
            Err(bad(key, "section is required for this command"))
        }
    }

    pub fn frequency_grid(&self) -> Result<FrequencyGrid, CliError> {
        if !(self.grid.xi_max > 0.0 && self.grid.xi_max.is_finite()) {
            return Err(bad("grid.xi_max", "must be positive"));
        }
        if !(self.grid.dxi > 0.0 && self.grid.dxi < self.grid.xi_max) {
            return Err(bad("grid.dxi", "must be positive and below grid.xi_max"));
        }
        FrequencyGrid::with_spacing(self.grid.xi_max, self.grid.dxi).map_err(|e| bad("grid", e))
    }
}

fn syntax_error(e: &toml::de::Error) -> CliError {
    let msg = e.message().to_string();
    // serde names the offending field inside backticks
    let key = msg
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<syntax>".to_string());
    CliError::Config { key, msg: e.to_string() }
}

fn parse_symbol(value: &toml::Value) -> Result<SymbolSpec, CliError> {
    match value {
        toml::Value::String(name) => {
            SymbolSpec::builtin(name).ok_or_else(|| bad("symbol", format!("unknown builtin {name:?} (kdvb, ost, kdvks)")))
        }
        toml::Value::Table(t) => {
            for key in t.keys() {
                if !matches!(key.as_str(), "builtin" | "p" | "terms" | "eta" | "q_bound") {
                    return Err(bad(&format!("symbol.{key}"), "unknown key"));
                }
            }
            let eta = match t.get("eta") {
                None => None,
                Some(v) => Some(number(v).ok_or_else(|| bad("symbol.eta", "must be a number"))?),
            };
            let spec = if let Some(b) = t.get("builtin") {
                if t.contains_key("p") || t.contains_key("terms") || t.contains_key("q_bound") {
                    return Err(bad("symbol.builtin", "cannot be combined with p, terms or q_bound"));
                }
                let name = b.as_str().ok_or_else(|| bad("symbol.builtin", "must be a string"))?;
                SymbolSpec::builtin(name).ok_or_else(|| bad("symbol.builtin", format!("unknown builtin {name:?}")))?
            } else {
                let p = t
                    .get("p")
                    .and_then(number)
                    .ok_or_else(|| bad("symbol.p", "a number is required"))?;
                let terms = match t.get("terms") {
                    None => Vec::new(),
                    Some(toml::Value::Array(items)) => items
                        .iter()
                        .enumerate()
                        .map(|(k, item)| {
                            let key = format!("symbol.terms[{k}]");
                            item.as_str()
                                .ok_or_else(|| bad(&key, "must be a \"c,i,j\" string"))?
                                .parse::<Term>()
                                .map_err(|e| bad(&key, e))
                        })
                        .collect::<Result<_, _>>()?,
                    Some(_) => return Err(bad("symbol.terms", "must be an array of \"c,i,j\" strings")),
                };
                let q_bound = match t.get("q_bound") {
                    Some(v) => number(v).ok_or_else(|| bad("symbol.q_bound", "must be a number"))?,
                    None => terms.iter().map(|t: &Term| f64::from(t.order())).fold(0.0, f64::max),
                };
                SymbolSpec {
                    p,
                    terms,
                    eta: 1.0,
                    q_bound,
                }
            };
            let spec = match eta {
                Some(e) => spec.with_eta(e),
                None => spec,
            };
            spec.validate().map_err(|e| bad("symbol", e))?;
            Ok(spec)
        }
        _ => Err(bad("symbol", "must be a builtin name or a table")),
    }
}

fn number(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Float(x) => Some(*x),
        toml::Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

pub fn parse_nonlinearity(key: &str, s: &str) -> Result<Nonlinearity, CliError> {
    match s {
        "derivative_of_square" | "derivative" => Ok(Nonlinearity::DerivativeOfSquare),
        "square_of_gradient" | "gradient" => Ok(Nonlinearity::SquareOfGradient),
        other => Err(bad(key, format!("unknown nonlinearity {other:?}"))),
    }
}

pub fn parse_variant(key: &str, s: &str) -> Result<NormVariant, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "x" => Ok(NormVariant::X),
        "y" => Ok(NormVariant::Y),
        other => Err(bad(key, format!("unknown norm variant {other:?} (x or y)"))),
    }
}
