//! Duhamel formulation, weighted norms and the Picard solver.
//!
//! Both equations are written as `v(t) = V(t)v₀ − ∫₀^t V(t−t')N(v(t'))dt'`;
//! [`duhamel_nl`] returns the integral with a positive sign.

mod duhamel;
mod evolve;

mod picard;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Convolver, FrequencyGrid, SpectralField, Trajectory};
use crate::semigroup::apply_semigroup;
use crate::symbol::SymbolSpec;

pub use duhamel::{duhamel_bilinear, duhamel_nl, duhamel_on_mesh, estimate_bilinear_constant, BilinearEstimate, BilinearTrials};

pub use evolve::{evolve, nonlinear_regularity_check, RegularityReport};
pub use picard::{picard_solve, ContractionReport, Iterate, PicardOptions, PicardScheme};

/// Quadratic nonlinearity of the two equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `∂_x(v²)`: `iξ·(v̂ ∗ v̂)`.
    DerivativeOfSquare,
    /// `(u_x)²`: `(iξû) ∗ (iξû)`.
    SquareOfGradient,
}

impl Nonlinearity {
    /// Symmetric bilinear form `N(u, v)` with `N(v, v)` the nonlinearity.
    pub fn bilinear(&self, conv: &Convolver, u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
        match self {
            Self::DerivativeOfSquare => Ok(conv.convolve(u, v)?.derivative()),
            Self::SquareOfGradient => conv.convolve(&u.derivative(), &v.derivative()),
        }
    }

    pub fn apply(&self, conv: &Convolver, v: &SpectralField) -> Result<SpectralField> {
        self.bilinear(conv, v, v)
    }
}

/// `X` pairs with `∂_x(v²)`, `Y` with `(u_x)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormVariant {
    X,
    Y,
}

/// `X_T^s`: `sup_t ‖f‖_{H^s} + t^{|s|/p}‖f‖_{L²}`.
/// `Y_T^s`: `sup_t ‖f‖_{H^s} + t^{(1+|s|)/p}‖∂_x f‖_{L²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormParams {
    pub s: f64,
    pub p: f64,
    pub variant: NormVariant,
}

impl WeightedNormParams {
    pub fn new(s: f64, p: f64, variant: NormVariant) -> Result<Self> {
        if !(s.is_finite() && s <= 0.0) {
            return Err(Error::Inadmissible(format!("s <= 0, got s = {s}")));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::Inadmissible(format!("p > 0, got p = {p}")));
        }
        Ok(Self { s, p, variant })
    }

    pub fn x(s: f64, p: f64) -> Result<Self> {
        Self::new(s, p, NormVariant::X)
    }

    pub fn y(s: f64, p: f64) -> Result<Self> {
        Self::new(s, p, NormVariant::Y)
    }

    /// Exponent of the time weight.
    pub fn weight_exponent(&self) -> f64 {
        match self.variant {
            NormVariant::X => self.s.abs() / self.p,
            NormVariant::Y => (1.0 + self.s.abs()) / self.p,
        }
    }

    /// `α = (2s+p)/(2p)` for X, `θ = (p−2+2s)/(2p)` for Y.
    pub fn time_exponent(&self) -> f64 {
        match self.variant {
            NormVariant::X => (2.0 * self.s + self.p) / (2.0 * self.p),
            NormVariant::Y => (self.p - 2.0 + 2.0 * self.s) / (2.0 * self.p),
        }
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        match self.variant {
            NormVariant::X => Nonlinearity::DerivativeOfSquare,
            NormVariant::Y => Nonlinearity::SquareOfGradient,
        }
    }

    /// Range required by the contraction argument: `−p/2 < s ≤ 0` (X) or
    /// `1 − p/2 < s ≤ 0` (Y), and `p > 3`.
    pub fn check_solver_range(&self) -> Result<()> {
        if !(self.p > 3.0) {
            return Err(Error::Inadmissible(format!("p > 3, got p = {}", self.p)));
        }
        let (lo, label) = match self.variant {
            NormVariant::X => (-self.p / 2.0, "s > -p/2"),
            NormVariant::Y => (1.0 - self.p / 2.0, "s > 1 - p/2"),
        };
        if !(self.s > lo && self.s <= 0.0) {
            return Err(Error::Inadmissible(format!("{label} and s <= 0, got s = {}", self.s)));
        }
        Ok(())
    }

    /// Contribution of one snapshot at time `t`.
    pub fn snapshot_norm(&self, f: &SpectralField, t: f64) -> f64 {
        let w = t.powf(self.weight_exponent());
        let second = match self.variant {
            NormVariant::X => f.l2_norm(),
            NormVariant::Y => f.derivative_l2_norm(),
        };
        f.hs_norm(self.s) + w * second
    }

    /// Supremum of [`Self::snapshot_norm`] over the snapshots.
    pub fn norm(&self, traj: &Trajectory) -> Result<f64> {
        if traj.is_empty() {
            return Err(Error::InvalidArgument("empty trajectory".into()));
        }
        Ok(traj
            .samples()
            .iter()
            .map(|(t, f)| self.snapshot_norm(f, *t))
            .fold(0.0, f64::max))
    }
}

pub fn xts_norm(traj: &Trajectory, params: &WeightedNormParams) -> Result<f64> {
    if params.variant != NormVariant::X {
        return Err(Error::InvalidArgument("xts_norm needs the X variant".into()));
    }
    params.norm(traj)
}

pub fn yts_norm(traj: &Trajectory, params: &WeightedNormParams) -> Result<f64> {
    if params.variant != NormVariant::Y {
        return Err(Error::InvalidArgument("yts_norm needs the Y variant".into()));
    }
    params.norm(traj)
}

/// A field-valued function of time on a common grid.
pub trait FieldPath: Sync {
    fn grid(&self) -> &FrequencyGrid;
    /// Closed interval on which [`FieldPath::at`] is defined.
    fn span(&self) -> Result<(f64, f64)>;
    fn at(&self, t: f64) -> Result<SpectralField>;
}

impl FieldPath for Trajectory {
    fn grid(&self) -> &FrequencyGrid {
        Trajectory::grid(self)
    }

    fn span(&self) -> Result<(f64, f64)> {
        Trajectory::span(self).ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))
    }

    fn at(&self, t: f64) -> Result<SpectralField> {
        self.interpolate(t)
    }
}

/// `t ↦ V(t)v₀`, evaluated exactly.
#[derive(Debug, Clone)]
pub struct LinearFlow {
    pub spec: SymbolSpec,
    pub v0: SpectralField,
}

impl LinearFlow {
    pub fn new(spec: SymbolSpec, v0: SpectralField) -> Self {
        Self { spec, v0 }
    }

    /// Snapshots at `times`.
    pub fn sample(&self, times: &[f64]) -> Result<Trajectory> {
        let mut traj = Trajectory::new(*self.v0.grid());
        for &t in times {
            traj.push(t, self.at(t)?)?;
        }
        Ok(traj)
    }
}

impl FieldPath for LinearFlow {
    fn grid(&self) -> &FrequencyGrid {
        self.v0.grid()
    }

    fn span(&self) -> Result<(f64, f64)> {
        Ok((0.0, f64::INFINITY))
    }

    fn at(&self, t: f64) -> Result<SpectralField> {
        apply_semigroup(&self.spec, &self.v0, t)
    }
}

/// `v̂₀(ξ) = A·e^{−ξ²/2}` with `A` chosen so that `‖v₀‖_{H^s} = target`.
pub fn gaussian_data(grid: FrequencyGrid, s: f64, target: f64) -> Result<SpectralField> {
    let shape = SpectralField::from_fn(grid, true, |xi| num_complex::Complex64::new((-0.5 * xi * xi).exp(), 0.0))?;
    let norm = shape.hs_norm(s);
    Ok(shape.scaled(target / norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_grid() -> FrequencyGrid {
        FrequencyGrid::with_spacing(8.0, 1.0 / 16.0).unwrap()
    }

    #[test]
    fn snapshot_at_time_zero() {
        let f = gaussian_data(box_grid(), -1.0, 0.1).unwrap();
        let traj = Trajectory::from_samples(*f.grid(), vec![(0.0, f.clone())]).unwrap();
        let x = WeightedNormParams::x(-1.0, 4.0).unwrap();
        assert!((xts_norm(&traj, &x).unwrap() - 0.1).abs() < 1e-15);
        let x0 = WeightedNormParams::x(0.0, 4.0).unwrap();
        assert!((xts_norm(&traj, &x0).unwrap() - 2.0 * f.l2_norm()).abs() < 1e-15);
        let zero = Trajectory::from_samples(*f.grid(), vec![(0.5, SpectralField::zeros(*f.grid()))]).unwrap();
        assert_eq!(xts_norm(&zero, &x).unwrap(), 0.0);
        assert!(yts_norm(&traj, &x).is_err());
        assert!(xts_norm(&Trajectory::new(*f.grid()), &x).is_err());
    }

    #[test]
    fn exponents() {
        let x = WeightedNormParams::x(-1.0, 4.0).unwrap();
        assert_eq!(x.time_exponent(), 0.25);
        assert_eq!(x.weight_exponent(), 0.25);
        let y = WeightedNormParams::y(-0.5, 4.0).unwrap();
        assert_eq!(y.time_exponent(), 0.125);
        assert_eq!(y.weight_exponent(), 0.375);
    }

    #[test]
    fn solver_range() {
        assert!(WeightedNormParams::x(-1.9, 4.0).unwrap().check_solver_range().is_ok());
        assert!(WeightedNormParams::x(-2.0, 4.0).unwrap().check_solver_range().is_err());
        assert!(WeightedNormParams::y(-1.0, 4.0).unwrap().check_solver_range().is_err());
        assert!(WeightedNormParams::x(-1.0, 3.0).unwrap().check_solver_range().is_err());
        assert!(WeightedNormParams::new(0.5, 4.0, NormVariant::X).is_err());
    }

    #[test]
    fn gaussian_data_hits_target_norm() {
        let f = gaussian_data(box_grid(), -1.0, 0.1).unwrap();
        assert!((f.hs_norm(-1.0) - 0.1).abs() < 1e-15);
        assert!(f.is_real());
    }
}
