//! Uniform frequency grids, sampled Fourier transforms of real fields,
//! convolution and Sobolev norms.
//!
//! Transforms omit the `1/√(2π)` factor in products: the Fourier coefficient of
//! `u·v` is taken to be `û ∗ ĝ`. Integrals over ξ use the trapezoid rule with
//! half weights at the two end nodes.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for the Hermitian-symmetry check of real-flagged fields.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Symmetric uniform grid `ξ_k = (k − n/2)·dξ`, `k = 0..n`, covering `[−ξ_max, ξ_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub xi_max: f64,
    pub n: usize,
    pub dxi: f64,
}

impl FrequencyGrid {
    pub fn new(xi_max: f64, n: usize) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n must be even and >= 8, got {n}")));
        }
        if !(xi_max.is_finite() && xi_max > 0.0) {
            return Err(Error::InvalidGrid(format!("xi_max must be positive, got {xi_max}")));
        }
        Ok(Self {
            xi_max,
            n,
            dxi: 2.0 * xi_max / n as f64,
        })
    }

    /// Grid with spacing `dxi` and half-width at least `min_xi_max`, rounded up
    /// to a whole (even) number of nodes.
    pub fn with_spacing(min_xi_max: f64, dxi: f64) -> Result<Self> {
        if !(dxi.is_finite() && dxi > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {dxi}")));
        }
        let half = (min_xi_max / dxi - 1e-9).ceil().max(4.0) as usize;
        Ok(Self {
            xi_max: half as f64 * dxi,
            n: 2 * half,
            dxi,
        })
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dxi
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.node(k))
    }

    /// Trapezoid weight of node `k`.
    #[inline]
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.n {
            0.5 * self.dxi
        } else {
            self.dxi
        }
    }

    /// Index of the node equal to `xi` (within a tiny fraction of the spacing).
    pub fn index_of(&self, xi: f64) -> Option<usize> {
        let r = xi / self.dxi + (self.n / 2) as f64;
        let k = r.round();
        if (r - k).abs() < 1e-9 && k >= 0.0 && (k as usize) < self.n {
            Some(k as usize)
        } else {
            None
        }
    }

    /// Index of `−ξ_k`; the first node has no partner on the grid.
    #[inline]
    pub fn mirror(&self, k: usize) -> Option<usize> {
        if k == 0 {
            None
        } else {
            Some(self.n - k)
        }
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.n == other.n && self.dxi == other.dxi
    }
}

/// Samples `v̂(ξ_k)` of a Fourier transform on a [`FrequencyGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    grid: FrequencyGrid,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl SpectralField {
    pub fn new(grid: FrequencyGrid, coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        if coeffs.len() != grid.n {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                grid.n,
                coeffs.len()
            )));
        }
        if let Some(k) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "non-finite coefficient at node {k} (xi = {})",
                grid.node(k)
            )));
        }
        let field = Self { grid, coeffs, real };
        if real && !field.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::InvalidArgument(
                "field flagged real-valued violates Hermitian symmetry".into(),
            ));
        }
        Ok(field)
    }

    pub fn zeros(grid: FrequencyGrid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.n],
            real: true,
        }
    }

    /// Samples `f(ξ_k)`; flagged real when `real` is set (checked).
    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: FrequencyGrid, real: bool, f: F) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect(), real)
    }

    /// Builds a field without re-checking invariants; used on hot paths whose
    /// inputs were already validated.
    pub(crate) fn from_parts(grid: FrequencyGrid, coeffs: Vec<Complex64>, real: bool) -> Self {
        debug_assert_eq!(coeffs.len(), grid.n);
        Self { grid, coeffs, real }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest violation of `v̂(−ξ) = conj(v̂(ξ))` over paired nodes, relative to
    /// the largest coefficient modulus.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for k in 1..self.grid.n {
            let m = self.grid.n - k;
            worst = worst.max((self.coeffs[k] - self.coeffs[m].conj()).norm());
        }
        worst / scale
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Projects onto Hermitian-symmetric coefficients and flags the field real.
    pub fn symmetrize(mut self) -> Self {
        let n = self.grid.n;
        for k in 1..n / 2 {
            let m = n - k;
            let avg = 0.5 * (self.coeffs[k] + self.coeffs[m].conj());
            self.coeffs[k] = avg;
            self.coeffs[m] = avg.conj();
        }
        self.coeffs[n / 2].im = 0.0;
        self.real = true;
        self
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::from_parts(self.grid, self.coeffs.iter().map(|c| c * a).collect(), self.real)
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| x + y * a)
            .collect();
        Ok(Self::from_parts(self.grid, coeffs, self.real && other.real))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    /// Pointwise multiplier `m(ξ)`; the result is flagged real when the input is
    /// real and `hermitian_multiplier` holds for `m`.
    pub fn map_multiplier<M: Fn(f64) -> Complex64>(&self, hermitian_multiplier: bool, m: M) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * m(self.grid.node(k)))
            .collect();
        Self::from_parts(self.grid, coeffs, self.real && hermitian_multiplier)
    }

    /// `∂_x` as multiplication by `iξ`.
    pub fn derivative(&self) -> Self {
        self.map_multiplier(true, |xi| Complex64::new(0.0, xi))
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `Σ_k w_k·weight(ξ_k)·|v̂(ξ_k)|²` with trapezoid weights `w_k`.
    pub fn weighted_energy<W: Fn(f64) -> f64>(&self, weight: W) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let xi = self.grid.node(k);
                self.grid.weight(k) * weight(xi) * c.norm_sqr()
            })
            .sum()
    }

    /// `‖f‖_{H^s} = (∫(1+ξ²)^s |v̂|² dξ)^{1/2}`.
    pub fn hs_norm(&self, s: f64) -> f64 {
        if s == 0.0 {
            return self.l2_norm();
        }
        self.weighted_energy(|xi| (1.0 + xi * xi).powf(s)).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.weighted_energy(|_| 1.0).sqrt()
    }

    /// `‖∂_x f‖_{L²} = ‖ξ v̂‖`.
    pub fn derivative_l2_norm(&self) -> f64 {
        self.weighted_energy(|xi| xi * xi).sqrt()
    }

    /// `H^s` norm restricted to `lo ≤ ξ ≤ hi` (trapezoid on the nodes inside).
    pub fn hs_norm_window(&self, s: f64, lo: f64, hi: f64) -> f64 {
        let nodes: Vec<usize> = (0..self.grid.n)
            .filter(|&k| {
                let xi = self.grid.node(k);
                xi >= lo - 1e-12 && xi <= hi + 1e-12
            })
            .collect();
        let mut acc = 0.0;
        for (pos, &k) in nodes.iter().enumerate() {
            let xi = self.grid.node(k);
            let w = if pos == 0 || pos + 1 == nodes.len() {
                0.5 * self.grid.dxi
            } else {
                self.grid.dxi
            };
            acc += w * (1.0 + xi * xi).powf(s) * self.coeffs[k].norm_sqr();
        }
        acc.sqrt()
    }

    /// Fraction of the `H^s` energy carried by the two end nodes.
    pub fn tail_fraction(&self, s: f64) -> f64 {
        let total = self.hs_norm(s).powi(2);
        if total == 0.0 {
            return 0.0;
        }
        let n = self.grid.n;
        let tail: f64 = [0, n - 1]
            .iter()
            .map(|&k| {
                let xi = self.grid.node(k);
                self.grid.weight(k) * (1.0 + xi * xi).powf(s) * self.coeffs[k].norm_sqr()
            })
            .sum();
        tail / total
    }

    /// Samples of the physical field on `m ≥ n` points `x_j = (j − m/2)·2π/(m·dξ)`.
    pub fn to_physical(&self, m: usize) -> Result<Vec<Complex64>> {
        let n = self.grid.n;
        if m < n {
            return Err(Error::InvalidArgument(format!(
                "physical sample count m = {m} is below grid size n = {n}"
            )));
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (k, c) in self.coeffs.iter().enumerate() {
            let a = k as i64 - (n / 2) as i64;
            buf[a.rem_euclid(m as i64) as usize] += c;
        }
        FftPlanner::<f64>::new().plan_fft_inverse(m).process(&mut buf);
        let scale = self.grid.dxi / (2.0 * PI).sqrt();
        let out = (0..m)
            .map(|j| {
                let b = j as i64 - (m / 2) as i64;
                buf[b.rem_euclid(m as i64) as usize] * scale
            })
            .collect();
        Ok(out)
    }

    /// Real samples of a real-flagged field.
    pub fn to_physical_real(&self, m: usize) -> Result<Vec<f64>> {
        if !self.real {
            return Err(Error::InvalidArgument("field is not flagged real-valued".into()));
        }
        Ok(self.to_physical(m)?.into_iter().map(|z| z.re).collect())
    }

    /// Inverse of [`SpectralField::to_physical`].
    pub fn from_physical(grid: FrequencyGrid, samples: &[Complex64], real: bool) -> Result<Self> {
        let n = grid.n;
        let m = samples.len();
        if m < n {
            return Err(Error::InvalidArgument(format!(
                "physical sample count m = {m} is below grid size n = {n}"
            )));
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (j, v) in samples.iter().enumerate() {
            let b = j as i64 - (m / 2) as i64;
            buf[b.rem_euclid(m as i64) as usize] = *v;
        }
        FftPlanner::<f64>::new().plan_fft_forward(m).process(&mut buf);
        let dx = 2.0 * PI / (m as f64 * grid.dxi);
        let scale = dx / (2.0 * PI).sqrt();
        let coeffs = (0..n)
            .map(|k| {
                let a = k as i64 - (n / 2) as i64;
                buf[a.rem_euclid(m as i64) as usize] * scale
            })
            .collect();
        let field = Self::from_parts(grid, coeffs, false);
        Ok(if real { field.symmetrize() } else { field })
    }

    pub fn from_physical_real(grid: FrequencyGrid, samples: &[f64]) -> Result<Self> {
        let z: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_physical(grid, &z, true)
    }
}

/// Physical sample points used by [`SpectralField::to_physical`].
pub fn physical_nodes(grid: &FrequencyGrid, m: usize) -> Vec<f64> {
    let dx = 2.0 * PI / (m as f64 * grid.dxi);
    (0..m).map(|j| (j as f64 - (m / 2) as f64) * dx).collect()
}

/// Convolution route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvolutionMethod {
    /// Direct O(n²) trapezoid sum; the reference route.
    Direct,
    /// Zero-padded FFT evaluation of the same discrete sum.
    Fft,
    /// Direct for small grids, FFT otherwise.
    #[default]
    Auto,
}

const AUTO_DIRECT_MAX_N: usize = 256;

/// `(f̂ ∗ ĝ)(ξ_k) ≈ Σ_j w_j f̂(ξ_j) ĝ(ξ_k − ξ_j)`, dropping lags that leave the grid.
pub fn convolve(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    convolve_with(f, g, ConvolutionMethod::Auto)
}

pub fn convolve_with(f: &SpectralField, g: &SpectralField, method: ConvolutionMethod) -> Result<SpectralField> {
    f.check_grid(g)?;
    let method = match method {
        ConvolutionMethod::Auto if f.grid.n <= AUTO_DIRECT_MAX_N => ConvolutionMethod::Direct,
        ConvolutionMethod::Auto => ConvolutionMethod::Fft,
        m => m,
    };
    let coeffs = match method {
        ConvolutionMethod::Direct => convolve_direct(f, g),
        _ => Convolver::new(f.grid).convolve_coeffs(&f.coeffs, &g.coeffs),
    };
    let out = SpectralField::from_parts(f.grid, coeffs, f.real && g.real);
    Ok(if out.real { out.symmetrize() } else { out })
}

fn convolve_direct(f: &SpectralField, g: &SpectralField) -> Vec<Complex64> {
    let grid = f.grid;
    let n = grid.n;
    let half = n / 2;
    (0..n)
        .into_par_iter()
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            // ξ_k − ξ_j is node k − j + n/2
            let j_lo = (k + half + 1).saturating_sub(n);
            let j_hi = (k + half).min(n - 1);
            for j in j_lo..=j_hi {
                acc += f.coeffs[j] * g.coeffs[k + half - j] * grid.weight(j);
            }
            acc
        })
        .collect()
}

/// Reusable FFT plans for convolutions on one grid.
#[derive(Clone)]
pub struct Convolver {
    grid: FrequencyGrid,
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Convolver {
    pub fn new(grid: FrequencyGrid) -> Self {
        let len = (2 * grid.n).next_power_of_two();
        let mut planner = FftPlanner::new();
        Self {
            grid,
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub(crate) fn convolve_coeffs(&self, f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.n;
        let zero = Complex64::new(0.0, 0.0);
        let mut a = vec![zero; self.len];
        let mut b = vec![zero; self.len];
        for k in 0..n {
            a[k] = f[k] * self.grid.weight(k);
            b[k] = g[k];
        }
        self.forward.process(&mut a);
        self.forward.process(&mut b);
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= y;
        }
        self.inverse.process(&mut a);
        let scale = 1.0 / self.len as f64;
        (0..n).map(|k| a[k + n / 2] * scale).collect()
    }

    pub fn convolve(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
        if !f.grid.same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        f.check_grid(g)?;
        let out = SpectralField::from_parts(self.grid, self.convolve_coeffs(&f.coeffs, &g.coeffs), f.real && g.real);
        Ok(if out.real { out.symmetrize() } else { out })
    }
}

/// Young's inequality `‖f̂ ∗ ĝ‖_∞ ≤ ‖f̂‖₂‖ĝ‖₂` on the discrete data.
pub fn young_linf_bound_check(f: &SpectralField, g: &SpectralField) -> Result<bool> {
    let conv = convolve_with(f, g, ConvolutionMethod::Direct)?;
    Ok(conv.max_abs() <= f.l2_norm() * g.l2_norm() * (1.0 + 1e-9))
}

/// Time-stamped snapshots of fields sharing one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    grid: FrequencyGrid,
    samples: Vec<(f64, SpectralField)>,
}

impl Trajectory {
    pub fn new(grid: FrequencyGrid) -> Self {
        Self {
            grid,
            samples: Vec::new(),
        }
    }

    pub fn from_samples(grid: FrequencyGrid, samples: Vec<(f64, SpectralField)>) -> Result<Self> {
        let mut traj = Self::new(grid);
        for (t, f) in samples {
            traj.push(t, f)?;
        }
        Ok(traj)
    }

    pub fn push(&mut self, t: f64, field: SpectralField) -> Result<()> {
        if !field.grid.same_as(&self.grid) {
            return Err(Error::GridMismatch);
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidArgument(format!("snapshot time must be >= 0, got {t}")));
        }
        if let Some((last, _)) = self.samples.last() {
            if t <= *last {
                return Err(Error::InvalidArgument(format!(
                    "snapshot times must increase strictly: {t} after {last}"
                )));
            }
        }
        self.samples.push((t, field));
        Ok(())
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[(f64, SpectralField)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|(t, _)| *t).collect()
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.0, self.samples.last()?.0))
    }

    pub fn last(&self) -> Option<&SpectralField> {
        self.samples.last().map(|(_, f)| f)
    }

    /// Linear interpolation of the coefficients between the bracketing snapshots.
    pub fn interpolate(&self, t: f64) -> Result<SpectralField> {
        let (start, end) = self
            .span()
            .ok_or_else(|| Error::InvalidArgument("empty trajectory".into()))?;
        let slack = 1e-12 * end.abs().max(1.0);
        if t < start - slack || t > end + slack {
            return Err(Error::OutsideSpan { t, start, end });
        }
        let t = t.clamp(start, end);
        let idx = self.samples.partition_point(|(ts, _)| *ts < t);
        if idx == 0 {
            return Ok(self.samples[0].1.clone());
        }
        if idx >= self.samples.len() {
            return Ok(self.samples[self.samples.len() - 1].1.clone());
        }
        let (t1, f1) = &self.samples[idx];
        if *t1 == t {
            return Ok(f1.clone());
        }
        let (t0, f0) = &self.samples[idx - 1];
        let lambda = (t - t0) / (t1 - t0);
        let coeffs = f0
            .coeffs
            .iter()
            .zip(&f1.coeffs)
            .map(|(a, b)| a * (1.0 - lambda) + b * lambda)
            .collect();
        Ok(SpectralField::from_parts(self.grid, coeffs, f0.real && f1.real))
    }

    /// Applies `op` to every snapshot.
    pub fn map<F: Fn(&SpectralField) -> SpectralField>(&self, op: F) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|(t, f)| (*t, op(f))).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn box_field(grid: FrequencyGrid) -> SpectralField {
        SpectralField::from_fn(grid, true, |xi| {
            if xi.abs() < 1.0 - 1e-12 {
                c(1.0, 0.0)
            } else if (xi.abs() - 1.0).abs() <= 1e-12 {
                c(0.5, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
        .unwrap()
    }

    #[test]
    fn grid_is_antisymmetric_and_rejects_bad_sizes() {
        let g = FrequencyGrid::new(3.7, 64).unwrap();
        for k in 1..g.n {
            assert_eq!(g.node(k), -g.node(g.n - k));
        }
        assert_eq!(g.node(g.n / 2), 0.0);
        assert!(FrequencyGrid::new(1.0, 6).is_err());
        assert!(FrequencyGrid::new(1.0, 9).is_err());
        assert!(FrequencyGrid::new(-1.0, 16).is_err());
    }

    #[test]
    fn box_norms_match_closed_forms() {
        let grid = FrequencyGrid::with_spacing(4.0, 1.0 / 512.0).unwrap();
        let f = box_field(grid);
        // half values at ξ = ±1 give 2 − dξ/2 exactly
        let dxi = grid.dxi;
        assert!((f.l2_norm() - (2.0 - 0.5 * dxi).sqrt()).abs() < 1e-12);
        // ∫_{-1}^{1} (1+ξ²) dξ = 8/3, less dξ from the quarter-weight ends
        assert!((f.hs_norm(1.0) - (8.0 / 3.0 - dxi).sqrt()).abs() < 1e-5);
        assert_eq!(SpectralField::zeros(grid).l2_norm(), 0.0);
        assert!((f.scaled(3.0).l2_norm() - 3.0 * f.l2_norm()).abs() < 1e-12);
    }

    #[test]
    fn box_self_convolution_is_a_triangle() {
        let grid = FrequencyGrid::with_spacing(4.0, 1.0 / 64.0).unwrap();
        let f = box_field(grid);
        let conv = convolve(&f, &f).unwrap();
        let at = |xi: f64| conv.coeffs()[grid.index_of(xi).unwrap()].re;
        let dxi = grid.dxi;
        assert!((at(0.0) - (2.0 - 0.5 * dxi)).abs() < 1e-12);
        assert!((at(2.0) - 0.25 * dxi).abs() < 1e-12);
        assert!((at(1.0) - 1.0).abs() < 1e-12);
        assert!(young_linf_bound_check(&f, &f).unwrap());
    }

    #[test]
    fn real_flag_requires_hermitian_symmetry() {
        let grid = FrequencyGrid::new(2.0, 16).unwrap();
        let bad = SpectralField::from_fn(grid, true, |xi| c(xi, 0.0));
        assert!(bad.is_err());
        let good = SpectralField::from_fn(grid, true, |xi| c(1.0 / (1.0 + xi * xi), xi));
        assert!(good.is_ok());
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = SpectralField::zeros(FrequencyGrid::new(2.0, 16).unwrap());
        let b = SpectralField::zeros(FrequencyGrid::new(2.0, 32).unwrap());
        assert!(matches!(convolve(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn single_mode_pair_is_a_cosine() {
        let grid = FrequencyGrid::new(8.0, 64).unwrap();
        let k1 = grid.index_of(1.0).unwrap();
        let km = grid.index_of(-1.0).unwrap();
        let mut coeffs = vec![c(0.0, 0.0); grid.n];
        coeffs[k1] = c(1.0, 0.0);
        coeffs[km] = c(1.0, 0.0);
        let f = SpectralField::new(grid, coeffs, true).unwrap();
        let xs = physical_nodes(&grid, 128);
        let samples = f.to_physical_real(128).unwrap();
        let amp = 2.0 * grid.dxi / (2.0 * PI).sqrt();
        for (x, v) in xs.iter().zip(&samples) {
            assert!((v - amp * x.cos()).abs() < 1e-13);
        }
        assert!(SpectralField::zeros(grid).to_physical(64).unwrap().iter().all(|z| z.norm() == 0.0));
        assert!(f.to_physical(32).is_err());
    }

    #[test]
    fn interpolation_is_linear_between_snapshots() {
        let grid = FrequencyGrid::new(2.0, 16).unwrap();
        let a = SpectralField::from_fn(grid, true, |_| c(1.0, 0.0)).unwrap();
        let b = a.scaled(3.0);
        let traj = Trajectory::from_samples(grid, vec![(0.0, a), (2.0, b)]).unwrap();
        let mid = traj.interpolate(0.5).unwrap();
        assert!((mid.coeffs()[3].re - 1.5).abs() < 1e-15);
        assert!(traj.interpolate(2.5).is_err());
        let mut t2 = traj.clone();
        assert!(t2.push(1.0, SpectralField::zeros(grid)).is_err());
    }

    #[test]
    fn tail_fraction_of_compact_data_vanishes() {
        let grid = FrequencyGrid::with_spacing(4.0, 1.0 / 64.0).unwrap();
        assert_eq!(box_field(grid).tail_fraction(-1.0), 0.0);
        let flat = SpectralField::from_fn(grid, true, |_| c(1.0, 0.0)).unwrap();
        assert!(flat.tail_fraction(0.0) > 0.0);
    }
}
