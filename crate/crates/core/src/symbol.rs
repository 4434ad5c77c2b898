//! The dissipation symbol `Φ(ξ) = −|ξ|^p + Φ₁(ξ)` with a polynomial perturbation
//! `Φ₁(ξ) = Σ c·ξ^i·|ξ|^j`, its high-frequency threshold and its upper bound.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One monomial `c·ξ^i·|ξ|^j` of the perturbation `Φ₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub c: f64,
    pub i: u32,
    pub j: u32,
}

impl Term {
    pub fn new(c: f64, i: u32, j: u32) -> Self {
        Self { c, i, j }
    }

    #[inline]
    pub fn eval(&self, xi: f64) -> f64 {
        self.c * xi.powi(self.i as i32) * xi.abs().powi(self.j as i32)
    }

    pub fn order(&self) -> u32 {
        self.i + self.j
    }
}

impl FromStr for Term {
    type Err = Error;

    /// Parses a `"c,i,j"` triple.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("term {s:?} is not a \"c,i,j\" triple")));
        }
        let c = parts[0]
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("term coefficient {:?}: {e}", parts[0])))?;
        let i = parts[1]
            .parse::<u32>()
            .map_err(|e| Error::Parse(format!("term exponent i {:?}: {e}", parts[1])))?;
        let j = parts[2]
            .parse::<u32>()
            .map_err(|e| Error::Parse(format!("term exponent j {:?}: {e}", parts[2])))?;
        Ok(Self { c, i, j })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.c, self.i, self.j)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn default_eta() -> f64 {
    1.0
}

/// The symbol `Φ(ξ) = −|ξ|^p + Σ c·ξ^i·|ξ|^j` together with the dissipation strength η.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub p: f64,
    #[serde(default)]
    pub terms: Vec<Term>,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub q_bound: f64,
}

impl SymbolSpec {
    pub fn new(p: f64, terms: Vec<Term>, eta: f64, q_bound: f64) -> Result<Self> {
        let spec = Self {
            p,
            terms,
            eta,
            q_bound,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Pure dissipation `Φ(ξ) = −|ξ|^p`.
    pub fn pure(p: f64) -> Result<Self> {
        Self::new(p, Vec::new(), 1.0, 0.0)
    }

    /// KdV–Burgers: `Φ(ξ) = −ξ²`.
    pub fn kdv_burgers() -> Self {
        Self {
            p: 2.0,
            terms: Vec::new(),
            eta: 1.0,
            q_bound: 0.0,
        }
    }

    /// Ostrovsky–Stepanyams–Tsimring: `Φ(ξ) = −|ξ|³ + |ξ|`.
    pub fn ost() -> Self {
        Self {
            p: 3.0,
            terms: vec![Term::new(1.0, 0, 1)],
            eta: 1.0,
            q_bound: 1.0,
        }
    }

    /// KdV–Kuramoto–Sivashinsky: `Φ(ξ) = −ξ⁴ + ξ²`.
    pub fn kdv_ks() -> Self {
        Self {
            p: 4.0,
            terms: vec![Term::new(1.0, 2, 0)],
            eta: 1.0,
            q_bound: 2.0,
        }
    }

    /// Resolves `"kdvb"`, `"ost"` or `"kdvks"`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "kdvb" => Some(Self::kdv_burgers()),
            "ost" => Some(Self::ost()),
            "kdvks" => Some(Self::kdv_ks()),
            _ => None,
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p > 0.0) {
            return Err(Error::InvalidSymbol(format!("p must be positive, got {}", self.p)));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::InvalidSymbol(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.q_bound >= 0.0 && self.q_bound < self.p) {
            return Err(Error::InvalidSymbol(format!(
                "q_bound must satisfy 0 <= q < p, got q = {} with p = {}",
                self.q_bound, self.p
            )));
        }
        for t in &self.terms {
            if !t.c.is_finite() {
                return Err(Error::InvalidSymbol(format!("term {t} has a non-finite coefficient")));
            }
            if f64::from(t.order()) > self.q_bound {
                return Err(Error::InvalidSymbol(format!(
                    "term {t} has order {} above q_bound {}",
                    t.order(),
                    self.q_bound
                )));
            }
        }
        Ok(())
    }

    /// `Φ₁(ξ)`.
    #[inline]
    pub fn phi1(&self, xi: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(xi)).sum()
    }

    /// `Φ(ξ) = −|ξ|^p + Φ₁(ξ)`.
    #[inline]
    pub fn eval_phi(&self, xi: f64) -> f64 {
        -xi.abs().powf(self.p) + self.phi1(xi)
    }

    /// `η·Φ(ξ)`, the real part of the semigroup exponent.
    #[inline]
    pub fn damping(&self, xi: f64) -> f64 {
        self.eta * self.eval_phi(xi)
    }

    /// Φ is even when every perturbation term has an even power of `ξ`.
    pub fn is_even(&self) -> bool {
        self.terms.iter().all(|t| t.i % 2 == 0)
    }

    fn high_frequency_ok(&self, xi: f64) -> bool {
        let lead = xi.abs().powf(self.p);
        let phi = -lead + self.phi1(xi);
        phi < -1.0 && self.phi1(xi) / lead <= 0.5 && phi.abs() >= 0.5 * lead
    }

    fn high_frequency_ok_both(&self, x: f64) -> bool {
        self.high_frequency_ok(x) && self.high_frequency_ok(-x)
    }

    /// Smallest `M ≥ 1` such that for all `|ξ| ≥ M`: `Φ(ξ) < −1`,
    /// `Φ₁(ξ)/|ξ|^p ≤ 1/2` and `|Φ(ξ)| ≥ |ξ|^p/2`.
    ///
    /// A geometric scan over `[1, 10⁶]` brackets the last failing point, then
    /// bisection locates the boundary to relative tolerance `1e-10`. The three
    /// conditions are re-checked on `10⁴` samples in `[M, 10M]`.
    pub fn threshold_m(&self) -> Result<f64> {
        self.validate()?;
        const LIMIT: f64 = 1e6;
        const RATIO: f64 = 1.001;

        let mut last_fail: Option<f64> = None;
        let mut x = 1.0;
        while x <= LIMIT {
            if !self.high_frequency_ok_both(x) {
                last_fail = Some(x);
            }
            x *= RATIO;
        }
        let m = match last_fail {
            None => 1.0,
            Some(f) if f * RATIO > LIMIT => return Err(Error::ThresholdNotFound { limit: LIMIT }),
            Some(f) => {
                let (mut lo, mut hi) = (f, f * RATIO);
                while hi - lo > 1e-10 * hi {
                    let mid = 0.5 * (lo + hi);
                    if self.high_frequency_ok_both(mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        };

        let samples = 10_000;
        for k in 0..samples {
            let xi = m * (1.0 + 9.0 * k as f64 / (samples - 1) as f64);
            if !self.high_frequency_ok_both(xi) {
                return Err(Error::InvalidSymbol(format!(
                    "threshold post-check failed at |xi| = {xi} (M = {m})"
                )));
            }
        }
        Ok(m)
    }

    /// Numerical upper bound `C_M` of `Φ` (grid search on `[−M, M]` plus local
    /// refinement); valid on all of ℝ because `Φ < −1` beyond `M`.
    pub fn sup_phi(&self) -> Result<f64> {
        let m = self.threshold_m()?;
        Ok(self.sup_phi_on(m))
    }

    pub(crate) fn sup_phi_on(&self, m: f64) -> f64 {
        const GRID: usize = 100_001;
        let h0 = 2.0 * m / (GRID - 1) as f64;
        let mut best_x = -m;
        let mut best = f64::NEG_INFINITY;
        for k in 0..GRID {
            let x = -m + k as f64 * h0;
            let v = self.eval_phi(x);
            if v > best {
                best = v;
                best_x = x;
            }
        }
        let mut h = h0;
        loop {
            h *= 0.5;
            let prev = best;
            let center = best_x;
            for k in -20i32..=20 {
                let x = (center + k as f64 * h).clamp(-m, m);
                let v = self.eval_phi(x);
                if v > best {
                    best = v;
                    best_x = x;
                }
            }
            if (best - prev).abs() < 1e-9 && h < 1e-9 * m.max(1.0) {
                break;
            }
            if h < 1e-15 {
                break;
            }
        }
        // Φ < −1 beyond M, so the bound is never below −1 there.
        best.max(-1.0)
    }
}

/// Peak of `t ↦ t^a e^{tb}` over `t ≥ 0` for `a > 0`, `b < 0`: `(a/|b|)^a e^{−a}`.
pub fn power_exp_peak(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "power_exp_peak needs a > 0 and b < 0, got a = {a}, b = {b}"
        )));
    }
    Ok((a / b.abs()).powf(a) * (-a).exp())
}
