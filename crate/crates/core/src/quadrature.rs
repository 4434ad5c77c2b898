//! Gauss–Legendre rules and composite meshes graded toward endpoint singularities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let pn = if n == 0 { 1.0 } else { p1 };
    let pm1 = if n == 0 { 0.0 } else { p0 };
    let d = n as f64 * (x * pn - pm1) / (x * x - 1.0);
    (pn, d)
}

/// Composite Gauss–Legendre configuration for time integrals on `[0, t]`.
///
/// Panels are graded algebraically toward both endpoints: on each half the
/// breakpoints are `(t/2)·(j/(panels/2))^grading`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub panels: usize,
    pub order: usize,
    pub grading: f64,
    /// When set, the integral is recomputed with doubled panels and the two
    /// results must agree to this relative tolerance.
    pub refine_tol: Option<f64>,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            panels: 32,
            order: 12,
            grading: 3.0,
            refine_tol: None,
        }
    }
}

impl QuadConfig {
    /// Grading `3/(1 - a)`, capped at 8, for an integrable singularity
    /// `|t - t'|^{-a}`. The first-panel error then decays like `panels^{-3}`.
    pub fn for_singularity(a: f64) -> Self {
        let grading = if a < 1.0 { (3.0 / (1.0 - a)).clamp(3.0, 8.0) } else { 3.0 };
        Self {
            grading,
            ..Self::default()
        }
    }

    pub fn refined(&self) -> Self {
        Self {
            panels: self.panels * 2,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.panels < 2 || !self.panels.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "quadrature panels must be even and >= 2, got {}",
                self.panels
            )));
        }
        if self.order == 0 {
            return Err(Error::InvalidArgument("quadrature order must be >= 1".into()));
        }
        if !(self.grading >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "grading exponent must be >= 1, got {}",
                self.grading
            )));
        }
        Ok(())
    }

    /// Breakpoints of the graded mesh on `[0, t]`, increasing.
    pub fn breakpoints(&self, t: f64) -> Vec<f64> {
        let half = self.panels / 2;
        let mut pts = Vec::with_capacity(self.panels + 1);
        for j in 0..=half {
            pts.push(0.5 * t * (j as f64 / half as f64).powf(self.grading));
        }
        for j in (0..half).rev() {
            pts.push(t - 0.5 * t * (j as f64 / half as f64).powf(self.grading));
        }
        pts
    }

    /// All (node, weight) pairs of the composite rule on `[0, t]`.
    pub fn nodes(&self, t: f64) -> Vec<(f64, f64)> {
        let rule = GaussLegendre::new(self.order);
        let bp = self.breakpoints(t);
        bp.windows(2)
            .filter(|w| w[1] > w[0])
            .flat_map(|w| rule.mapped(w[0], w[1]).collect::<Vec<_>>())
            .collect()
    }
}

/// Composite Gauss–Legendre over `[a, b]` split into `panels` equal pieces.
pub fn composite<F: FnMut(f64) -> f64>(rule: &GaussLegendre, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + k as f64 * h;
            rule.integrate(lo, lo + h, &mut f)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for n in 1..=20 {
            let rule = GaussLegendre::new(n);
            for deg in 0..(2 * n) {
                let got = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
                let exact = 1.0 / (deg as f64 + 1.0);
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn weights_sum_to_interval_length() {
        let rule = GaussLegendre::new(17);
        let s: f64 = rule.mapped(-2.0, 5.0).map(|(_, w)| w).sum();
        assert!((s - 7.0).abs() < 1e-13);
    }

    #[test]
    fn graded_mesh_resolves_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} (1-x)^{-1/4} dx = B(1/2, 3/4)
        let exact = 2.396_280_469_471_184_4;
        let cfg = QuadConfig {
            panels: 128,
            order: 16,
            ..QuadConfig::for_singularity(0.5)
        };
        let got: f64 = cfg
            .nodes(1.0)
            .into_iter()
            .map(|(x, w)| w * x.powf(-0.5) * (1.0 - x).powf(-0.25))
            .sum();
        assert!((got - exact).abs() < 1e-6, "{got} vs {exact}");
    }

    #[test]
    fn breakpoints_are_symmetric_and_cover_interval() {
        let cfg = QuadConfig::default();
        let bp = cfg.breakpoints(2.0);
        assert_eq!(bp.len(), cfg.panels + 1);
        assert_eq!(bp[0], 0.0);
        assert!((bp[cfg.panels] - 2.0).abs() < 1e-15);
        for j in 0..=cfg.panels {
            assert!((bp[j] + bp[cfg.panels - j] - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_odd_panel_count() {
        let cfg = QuadConfig {
            panels: 3,
            ..QuadConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
