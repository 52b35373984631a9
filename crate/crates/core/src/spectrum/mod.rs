//! Bound states of a current-biased Josephson junction.
//!
//! The junction phase δ moves in the tilted washboard
//! U(δ) = −E_J (cos δ + γ δ), γ = I_b / I₀, with effective mass
//! m = C_J (Φ₀/2π)². One local well is cut out between the left turning
//! point at the barrier energy and the barrier top, padded on both sides by
//! `box_margin` well widths, and closed with hard walls. Outside the well the
//! potential is clamped to the barrier height so the padding never hosts
//! states below the barrier.
//!
//! The Hamiltonian p²/2m + U is discretised with second-order central
//! differences, which gives a symmetric tridiagonal matrix.

mod tridiag;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScrapError};
use crate::units;
pub use tridiag::SymTridiagonal;

pub const DEFAULT_GRID_POINTS: usize = 2048;
pub const DEFAULT_BOX_MARGIN: f64 = 0.5;
pub const MIN_GRID_POINTS: usize = 256;

/// Junction parameters plus discretisation controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CbjjParams {
    /// C_J in pF.
    pub junction_capacitance: f64,
    /// I₀ in µA.
    pub critical_current: f64,
    /// I_b / I₀.
    pub bias_current_ratio: f64,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    /// Padding beyond each turning point, as a fraction of the well width.
    #[serde(default = "default_box_margin")]
    pub box_margin: f64,
}

fn default_grid_points() -> usize {
    DEFAULT_GRID_POINTS
}

fn default_box_margin() -> f64 {
    DEFAULT_BOX_MARGIN
}

impl CbjjParams {
    pub fn new(junction_capacitance: f64, critical_current: f64, bias_current_ratio: f64) -> Self {
        Self {
            junction_capacitance,
            critical_current,
            bias_current_ratio,
            grid_points: DEFAULT_GRID_POINTS,
            box_margin: DEFAULT_BOX_MARGIN,
        }
    }

    /// C_J = 4.3 pF, I₀ = 13.3 µA, I_b = 0.9725 I₀.
    pub fn reference() -> Self {
        Self::new(4.3, 13.3, 0.9725)
    }

    pub fn with_grid(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    pub fn with_margin(mut self, box_margin: f64) -> Self {
        self.box_margin = box_margin;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.junction_capacitance > 0.0 && self.junction_capacitance.is_finite()) {
            return Err(ScrapError::invalid("junction_capacitance", "must be positive"));
        }
        if !(self.critical_current > 0.0 && self.critical_current.is_finite()) {
            return Err(ScrapError::invalid("critical_current", "must be positive"));
        }
        if !(self.bias_current_ratio >= 0.0 && self.bias_current_ratio < 1.0) {
            return Err(ScrapError::invalid(
                "bias_current_ratio",
                format!("{} outside [0, 1): no bound well", self.bias_current_ratio),
            ));
        }
        if self.grid_points < MIN_GRID_POINTS {
            return Err(ScrapError::invalid(
                "grid_points",
                format!("{} < {MIN_GRID_POINTS}", self.grid_points),
            ));
        }
        if !(self.box_margin > 0.0 && self.box_margin.is_finite()) {
            return Err(ScrapError::invalid("box_margin", "must be positive"));
        }
        Ok(())
    }

    /// E_J = Φ₀I₀/2π in rad/ns.
    pub fn josephson_energy(&self) -> f64 {
        units::joules_to_rad_per_ns(units::REDUCED_FLUX_QUANTUM * units::microamp(self.critical_current))
    }

    /// ħ/m in rad/ns, with m = C_J (Φ₀/2π)². The kinetic term is
    /// −(ħ/m)/2 ∂²/∂δ².
    pub fn kinetic_scale(&self) -> f64 {
        let mass = units::picofarad(self.junction_capacitance) * units::REDUCED_FLUX_QUANTUM.powi(2);
        units::HBAR / mass * 1e-9
    }

    /// Small-oscillation plasma frequency at the well bottom (rad/ns).
    pub fn plasma_frequency(&self) -> f64 {
        let gamma = self.bias_current_ratio;
        (self.josephson_energy() * self.kinetic_scale()).sqrt() * (1.0 - gamma * gamma).powf(0.25)
    }

    pub fn well_minimum(&self) -> f64 {
        self.bias_current_ratio.asin()
    }

    pub fn barrier_top(&self) -> f64 {
        PI - self.bias_current_ratio.asin()
    }

    /// Bare washboard potential in rad/ns.
    pub fn potential(&self, delta: f64) -> f64 {
        -self.josephson_energy() * (delta.cos() + self.bias_current_ratio * delta)
    }

    /// U(δ_barrier) − U(δ_min) in rad/ns.
    pub fn barrier_height(&self) -> f64 {
        self.potential(self.barrier_top()) - self.potential(self.well_minimum())
    }
}

/// The washboard potential sampled on the box grid.
#[derive(Debug, Clone)]
pub struct PotentialGrid {
    pub grid: Vec<f64>,
    /// Potential values in rad/ns, clamped at the barrier outside the well.
    pub values: Vec<f64>,
    pub well_minimum: f64,
    pub barrier_top: f64,
    pub left_turning_point: f64,
    /// U at the barrier top (rad/ns).
    pub barrier_energy: f64,
}

impl PotentialGrid {
    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub fn well_width(&self) -> f64 {
        self.barrier_top - self.left_turning_point
    }

    /// Index of the grid point nearest the well minimum.
    pub fn minimum_index(&self) -> usize {
        let x0 = self.grid[0];
        let idx = ((self.well_minimum - x0) / self.spacing()).round();
        (idx.max(0.0) as usize).min(self.grid.len() - 1)
    }
}

pub fn build_washboard_potential(params: &CbjjParams) -> Result<PotentialGrid> {
    params.validate()?;
    let well_minimum = params.well_minimum();
    let barrier_top = params.barrier_top();
    let barrier_energy = params.potential(barrier_top);

    // U is monotonically decreasing on (δ_barrier − 2π, δ_min).
    let mut lo = barrier_top - 2.0 * PI;
    let mut hi = well_minimum;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if params.potential(mid) > barrier_energy {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let left_turning_point = 0.5 * (lo + hi);

    let width = barrier_top - left_turning_point;
    let start = left_turning_point - params.box_margin * width;
    let end = barrier_top + params.box_margin * width;
    let n = params.grid_points;
    let h = (end - start) / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| start + i as f64 * h).collect();
    let values = grid
        .iter()
        .map(|&x| {
            let u = params.potential(x);
            if x < left_turning_point || x > barrier_top {
                u.max(barrier_energy)
            } else {
                u
            }
        })
        .collect();

    Ok(PotentialGrid {
        grid,
        values,
        well_minimum,
        barrier_top,
        left_turning_point,
        barrier_energy,
    })
}

/// Bound states and matrix elements of one junction.
///
/// Energies are absolute (rad/ns, same zero as the potential). Wavefunctions
/// are real, normalised so that h Σ ψ_i ψ_j = δ_ij, with the sign fixed by
/// ψ(δ_min) ≥ 0.
///
/// `momentum_matrix` holds the real antisymmetric P_ij = ⟨i|∂/∂δ|j⟩, so that
/// the conjugate momentum is ⟨i|p|j⟩ = −iħ P_ij.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub params: CbjjParams,
    pub energies: Vec<f64>,
    pub wavefunctions: Vec<Vec<f64>>,
    pub grid: Vec<f64>,
    pub delta_matrix: DMatrix<f64>,
    pub momentum_matrix: DMatrix<f64>,
    pub barrier_energy: f64,
}

impl SpectrumResult {
    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    /// (E_i − E_j)/ħ in rad/ns.
    pub fn transition(&self, upper: usize, lower: usize) -> f64 {
        self.energies[upper] - self.energies[lower]
    }

    pub fn omega_10(&self) -> f64 {
        self.transition(1, 0)
    }

    pub fn omega_21(&self) -> f64 {
        self.transition(2, 1)
    }

    pub fn delta(&self, i: usize, j: usize) -> f64 {
        self.delta_matrix[(i, j)]
    }

    pub fn momentum(&self, i: usize, j: usize) -> f64 {
        self.momentum_matrix[(i, j)]
    }

    pub fn spacing(&self) -> f64 {
        self.grid[1] - self.grid[0]
    }

    pub(crate) fn require_levels(&self, required: usize) -> Result<()> {
        if self.levels() < required {
            return Err(ScrapError::TooFewLevels {
                required,
                available: self.levels(),
            });
        }
        Ok(())
    }
}

pub fn solve_bound_states(potential: &PotentialGrid, params: &CbjjParams, n_levels: usize) -> Result<SpectrumResult> {
    params.validate()?;
    if n_levels < 2 {
        return Err(ScrapError::invalid("n_levels", "at least two levels are required"));
    }
    let n = potential.grid.len();
    if n_levels > n {
        return Err(ScrapError::invalid("n_levels", "more levels than grid points"));
    }
    let h = potential.spacing();
    let kinetic = params.kinetic_scale();
    let diag: Vec<f64> = potential.values.iter().map(|u| kinetic / (h * h) + u).collect();
    let off = vec![-kinetic / (2.0 * h * h); n - 1];
    let matrix = SymTridiagonal::new(diag, off);

    let mut energies = Vec::with_capacity(n_levels);
    let mut wavefunctions = Vec::with_capacity(n_levels);
    let anchor = potential.minimum_index();
    let norm = h.sqrt();
    for level in 0..n_levels {
        let energy = matrix.eigenvalue(level);
        if energy >= potential.barrier_energy {
            return Err(ScrapError::LevelAboveBarrier {
                level,
                energy,
                barrier: potential.barrier_energy,
            });
        }
        let mut psi = matrix.eigenvector(energy);
        // odd states of a symmetric well vanish at the minimum; fall back to
        // the first clearly nonzero sample to the right
        let sign_sample = psi[anchor..]
            .iter()
            .copied()
            .find(|v| v.abs() > 1e-8)
            .unwrap_or(psi[anchor]);
        let sign = if sign_sample < 0.0 { -1.0 } else { 1.0 };
        psi.iter_mut().for_each(|v| *v *= sign / norm);
        energies.push(energy);
        wavefunctions.push(psi);
    }

    let mut result = SpectrumResult {
        params: *params,
        energies,
        wavefunctions,
        grid: potential.grid.clone(),
        delta_matrix: DMatrix::zeros(0, 0),
        momentum_matrix: DMatrix::zeros(0, 0),
        barrier_energy: potential.barrier_energy,
    };
    result.delta_matrix = dipole_matrix(&result);
    result.momentum_matrix = momentum_matrix(&result);
    Ok(result)
}

/// Convenience: potential plus the lowest `n_levels` bound states.
pub fn compute_spectrum(params: &CbjjParams, n_levels: usize) -> Result<SpectrumResult> {
    let potential = build_washboard_potential(params)?;
    solve_bound_states(&potential, params, n_levels)
}

/// Overlap matrix h Σ ψ_i ψ_j; the identity for a healthy spectrum.
pub fn overlap_matrix(spectrum: &SpectrumResult) -> DMatrix<f64> {
    let h = spectrum.spacing();
    let n = spectrum.levels();
    DMatrix::from_fn(n, n, |i, j| {
        h * spectrum.wavefunctions[i]
            .iter()
            .zip(&spectrum.wavefunctions[j])
            .map(|(a, b)| a * b)
            .sum::<f64>()
    })
}

/// δ_ij = ⟨i|δ|j⟩ by grid quadrature; symmetric by construction.
pub fn dipole_matrix(spectrum: &SpectrumResult) -> DMatrix<f64> {
    let h = spectrum.spacing();
    let n = spectrum.levels();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let value = h * spectrum.wavefunctions[i]
                .iter()
                .zip(&spectrum.wavefunctions[j])
                .zip(&spectrum.grid)
                .map(|((a, b), x)| a * b * x)
                .sum::<f64>();
            out[(i, j)] = value;
            out[(j, i)] = value;
        }
    }
    out
}

/// P_ij = ⟨i|∂/∂δ|j⟩ with the derivative taken spectrally.
///
/// Each wavefunction vanishes at the hard walls, so it is extended as an odd
/// function over twice the box and differentiated in Fourier space. The
/// result is antisymmetrised and its diagonal is exactly zero, as it must be
/// for real bound states.
pub fn momentum_matrix(spectrum: &SpectrumResult) -> DMatrix<f64> {
    let h = spectrum.spacing();
    let n = spectrum.levels();
    let derivatives: Vec<Vec<f64>> = spectrum
        .wavefunctions
        .iter()
        .map(|psi| spectral_derivative(psi, h))
        .collect();
    let raw = DMatrix::from_fn(n, n, |i, j| {
        h * spectrum.wavefunctions[i]
            .iter()
            .zip(&derivatives[j])
            .map(|(a, b)| a * b)
            .sum::<f64>()
    });
    DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 0.5 * (raw[(i, j)] - raw[(j, i)]) })
}

/// Derivative of samples `f` on a uniform grid with implicit zeros one step
/// beyond each end.
pub fn spectral_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let period = 2 * (n + 1);
    let mut buffer = vec![Complex64::new(0.0, 0.0); period];
    for (i, &v) in f.iter().enumerate() {
        buffer[i + 1] = Complex64::new(v, 0.0);
        buffer[period - 1 - i] = Complex64::new(-v, 0.0);
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(period).process(&mut buffer);
    let length = period as f64 * h;
    for (k, c) in buffer.iter_mut().enumerate() {
        let m = if k < period / 2 {
            k as f64
        } else if k == period / 2 {
            0.0
        } else {
            k as f64 - period as f64
        };
        *c *= Complex64::new(0.0, 2.0 * PI * m / length);
    }
    planner.plan_fft_inverse(period).process(&mut buffer);
    let scale = 1.0 / period as f64;
    (0..n).map(|i| buffer[i + 1].re * scale).collect()
}
