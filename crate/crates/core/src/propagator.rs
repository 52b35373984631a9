//! Time-dependent Schrödinger propagation, adiabaticity monitoring and the
//! analytic Landau-Zener oracle.
//!
//! Each step is a fourth-order Magnus exponential built from H at the two
//! Gauss points of the step,
//!
//! ```text
//! K = dt/2 (H₁ + H₂) − i √3 dt²/12 [H₂, H₁],   U = exp(−iK),
//! ```
//!
//! so every step is unitary by construction. The local error is estimated by
//! step doubling: one step of size dt against two of size dt/2, keeping the
//! finer result. Steps are accepted when the estimate is at most `tol`.

use std::f64::consts::PI;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Result, ScrapError};
use crate::hamiltonians::{CMatrix, TimeDependentHamiltonian};
use crate::pulse::{PulseSchedule, Window};

pub type CVector = DVector<Complex64>;

pub const DEFAULT_OUTPUT_POINTS: usize = 1000;
pub const MIN_OUTPUT_POINTS: usize = 500;
pub const MIN_TOL: f64 = 1e-14;
pub const MAX_TOL: f64 = 1e-3;
/// Samples used by [`adiabaticity_margin`].
pub const ADIABATICITY_SAMPLES: usize = 10_001;

const SAFETY: f64 = 0.9;
const MAX_GROWTH: f64 = 4.0;
const MAX_SHRINK: f64 = 0.2;

/// Sampled evolution on a uniform output mesh.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub basis_labels: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<CVector>,
    /// `populations[k][j]` = |⟨j|ψ(t_k)⟩|².
    pub populations: Vec<Vec<f64>>,
    pub final_unitary: Option<CMatrix>,
    /// Accepted internal steps.
    pub steps: usize,
}

impl Trajectory {
    pub fn empty(basis_labels: Vec<String>) -> Self {
        Self {
            basis_labels,
            times: Vec::new(),
            states: Vec::new(),
            populations: Vec::new(),
            final_unitary: None,
            steps: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&CVector> {
        self.states.last()
    }

    pub fn final_populations(&self) -> Option<&[f64]> {
        self.populations.last().map(|p| p.as_slice())
    }

    /// P_j(t) over the whole mesh.
    pub fn population_series(&self, j: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[j]).collect()
    }

    /// Largest |‖ψ(t)‖ − 1| along the trajectory.
    pub fn max_norm_defect(&self) -> f64 {
        self.states.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    pub tspan: Window,
    pub tol: f64,
    pub output_points: usize,
}

impl PropagationOptions {
    pub fn new(tspan: Window, tol: f64) -> Self {
        Self {
            tspan,
            tol,
            output_points: DEFAULT_OUTPUT_POINTS,
        }
    }

    pub fn with_output_points(mut self, output_points: usize) -> Self {
        self.output_points = output_points;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > MIN_TOL && self.tol < MAX_TOL) {
            return Err(ScrapError::invalid(
                "tol",
                format!("{:e} outside ({MIN_TOL:e}, {MAX_TOL:e})", self.tol),
            ));
        }
        if self.output_points < MIN_OUTPUT_POINTS {
            return Err(ScrapError::invalid(
                "output_points",
                format!("{} < {MIN_OUTPUT_POINTS}", self.output_points),
            ));
        }
        Window::new(self.tspan.start, self.tspan.end)?;
        Ok(())
    }

    fn mesh(&self) -> Vec<f64> {
        let n = self.output_points - 1;
        let span = self.tspan.duration();
        (0..=n)
            .map(|k| {
                if k == n {
                    self.tspan.end
                } else {
                    self.tspan.start + span * (k as f64) / (n as f64)
                }
            })
            .collect()
    }
}

pub fn basis_state(dimension: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(dimension);
    v[index] = Complex64::new(1.0, 0.0);
    v
}

/// exp(−i H dt) for Hermitian H.
pub fn hermitian_exponential(h: &CMatrix, dt: f64) -> CMatrix {
    match h.nrows() {
        1 => CMatrix::from_element(1, 1, Complex64::from_polar(1.0, -h[(0, 0)].re * dt)),
        2 => exponential_2x2(h, dt),
        n => {
            let eigen = SymmetricEigen::new(h.clone());
            let v = eigen.eigenvectors;
            let phases = CMatrix::from_diagonal(&DVector::from_iterator(
                n,
                eigen.eigenvalues.iter().map(|&e| Complex64::from_polar(1.0, -e * dt)),
            ));
            &v * phases * v.adjoint()
        }
    }
}

fn exponential_2x2(h: &CMatrix, dt: f64) -> CMatrix {
    let mean = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
    let half_split = 0.5 * (h[(0, 0)].re - h[(1, 1)].re);
    let b = h[(0, 1)];
    let r = (half_split * half_split + b.norm_sqr()).sqrt();
    let (cos, sinc) = if r * dt.abs() < 1e-8 {
        (1.0 - 0.5 * (r * dt).powi(2), dt * (1.0 - (r * dt).powi(2) / 6.0))
    } else {
        ((r * dt).cos(), (r * dt).sin() / r)
    };
    let global = Complex64::from_polar(1.0, -mean * dt);
    let mi = Complex64::new(0.0, -sinc);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            global * (cos + mi * half_split),
            global * mi * b,
            global * mi * b.conj(),
            global * (cos - mi * half_split),
        ],
    )
}

const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // √3/6

fn magnus_step(h: &TimeDependentHamiltonian, t: f64, dt: f64) -> CMatrix {
    let h1 = h.evaluate(t + (0.5 - GAUSS_OFFSET) * dt);
    let h2 = h.evaluate(t + (0.5 + GAUSS_OFFSET) * dt);
    let commutator = &h2 * &h1 - &h1 * &h2;
    let k = (&h1 + &h2) * Complex64::new(0.5 * dt, 0.0)
        + commutator * Complex64::new(0.0, -3f64.sqrt() * dt * dt / 12.0);
    let k = (&k + k.adjoint()) * Complex64::new(0.5, 0.0);
    hermitian_exponential(&k, 1.0)
}

/// Integrates the columns of `state` from `t0` to `t1`.
struct Stepper<'a> {
    h: &'a TimeDependentHamiltonian,
    tol: f64,
    dt: f64,
    min_dt: f64,
    steps: usize,
}

impl Stepper<'_> {
    fn advance(&mut self, state: &mut CMatrix, t0: f64, t1: f64) -> Result<()> {
        let mut t = t0;
        while t < t1 {
            let remaining = t1 - t;
            let dt = self.dt.min(remaining);
            let big = magnus_step(self.h, t, dt) * &*state;
            let half = 0.5 * dt;
            let first = magnus_step(self.h, t, half) * &*state;
            let fine = magnus_step(self.h, t + half, half) * first;
            let err = (0..state.ncols())
                .map(|k| (big.column(k) - fine.column(k)).norm())
                .fold(0.0, |acc: f64, e| if e.is_nan() { e } else { acc.max(e) });
            if err.is_finite() && err <= self.tol {
                *state = fine;
                t = if dt == remaining { t1 } else { t + dt };
                self.steps += 1;
                let growth = if err == 0.0 {
                    MAX_GROWTH
                } else {
                    (SAFETY * (self.tol / err).powf(0.2)).clamp(MAX_SHRINK, MAX_GROWTH)
                };
                // a step clipped to the mesh says little about the next one
                if dt == self.dt || growth < 1.0 {
                    self.dt = dt * growth;
                }
            } else {
                let shrink = if err.is_finite() {
                    (SAFETY * (self.tol / err).powf(0.2)).clamp(MAX_SHRINK, 1.0)
                } else {
                    MAX_SHRINK
                };
                self.dt = dt * shrink;
                if self.dt < self.min_dt {
                    return Err(ScrapError::StepUnderflow { time: t, step: self.dt });
                }
            }
        }
        Ok(())
    }
}

fn evolve_columns(
    h: &TimeDependentHamiltonian,
    initial: CMatrix,
    options: &PropagationOptions,
    mut observe: impl FnMut(f64, &CMatrix),
) -> Result<(CMatrix, usize)> {
    options.validate()?;
    let mesh = options.mesh();
    let span = options.tspan.duration();
    let mut stepper = Stepper {
        h,
        tol: options.tol,
        dt: span / (options.output_points - 1) as f64,
        min_dt: span * 1e-13,
        steps: 0,
    };
    let mut state = initial;
    observe(mesh[0], &state);
    for pair in mesh.windows(2) {
        stepper.advance(&mut state, pair[0], pair[1])?;
        observe(pair[1], &state);
    }
    Ok((state, stepper.steps))
}

/// Propagates `initial_state` over `tspan` with the default output mesh.
pub fn propagate(
    h: &TimeDependentHamiltonian,
    initial_state: &CVector,
    tspan: Window,
    tol: f64,
) -> Result<Trajectory> {
    propagate_with(h, initial_state, &PropagationOptions::new(tspan, tol))
}

pub fn propagate_with(
    h: &TimeDependentHamiltonian,
    initial_state: &CVector,
    options: &PropagationOptions,
) -> Result<Trajectory> {
    if initial_state.len() != h.dimension() {
        return Err(ScrapError::DimensionMismatch {
            expected: h.dimension(),
            actual: initial_state.len(),
        });
    }
    if (initial_state.norm() - 1.0).abs() > 1e-8 {
        return Err(ScrapError::invalid("initial_state", "must be a unit vector"));
    }
    let mut trajectory = Trajectory::empty(h.basis_labels().to_vec());
    let initial = CMatrix::from_column_slice(h.dimension(), 1, initial_state.as_slice());
    let (_, steps) = evolve_columns(h, initial, options, |t, state| {
        let psi = state.column(0).into_owned();
        trajectory.times.push(t);
        trajectory.populations.push(psi.iter().map(|z| z.norm_sqr()).collect());
        trajectory.states.push(psi);
    })?;
    trajectory.steps = steps;
    Ok(trajectory)
}

/// Propagator over `tspan`: column j is the evolved basis state |j⟩.
pub fn propagate_unitary(h: &TimeDependentHamiltonian, tspan: Window, tol: f64) -> Result<CMatrix> {
    propagate_unitary_with(h, &PropagationOptions::new(tspan, tol))
}

pub fn propagate_unitary_with(h: &TimeDependentHamiltonian, options: &PropagationOptions) -> Result<CMatrix> {
    let identity = CMatrix::identity(h.dimension(), h.dimension());
    let (u, _) = evolve_columns(h, identity, options, |_, _| {})?;
    Ok(u)
}

/// max |(U†U − I)_ij|.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let product = u.adjoint() * u;
    let identity = CMatrix::identity(n, n);
    (product - identity).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Result of scanning the adiabaticity ratio over a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticityReport {
    /// max over t of ½|ΩΔ̇ − ΔΩ̇| / (Δ² + Ω²)^{3/2}.
    pub max_ratio: f64,
    pub argmax_time: f64,
    pub mixing_angle_start: f64,
    pub mixing_angle_end: f64,
}

/// θ = ½ atan2(|Ω|, Δ) ∈ [0, π/2]. The sign of Ω is a basis phase and does
/// not enter.
pub fn mixing_angle(rabi: f64, detuning: f64) -> f64 {
    0.5 * rabi.abs().atan2(detuning)
}

pub fn adiabaticity_margin(rabi: &PulseSchedule, detuning: &PulseSchedule, tspan: Window) -> Result<AdiabaticityReport> {
    rabi.validate()?;
    detuning.validate()?;
    let n = ADIABATICITY_SAMPLES - 1;
    let scale = rabi.max_abs().max(detuning.max_abs());
    let mut best = (0.0f64, tspan.start);
    for k in 0..=n {
        let t = if k == n {
            tspan.end
        } else {
            tspan.start + tspan.duration() * (k as f64) / (n as f64)
        };
        let (o, d) = (rabi.value(t), detuning.value(t));
        let gap2 = o * o + d * d;
        if gap2 == 0.0 || gap2.sqrt() <= 1e-14 * scale {
            return Err(ScrapError::DegeneratePoint { time: t });
        }
        let ratio = 0.5 * (o * detuning.derivative(t) - d * rabi.derivative(t)).abs() / gap2.powf(1.5);
        if ratio > best.0 {
            best = (ratio, t);
        }
    }
    Ok(AdiabaticityReport {
        max_ratio: best.0,
        argmax_time: best.1,
        mixing_angle_start: mixing_angle(rabi.value(tspan.start), detuning.value(tspan.start)),
        mixing_angle_end: mixing_angle(rabi.value(tspan.end), detuning.value(tspan.end)),
    })
}

/// Diabatic probability exp(−πΩ²/(2v)) for H = ½[[0, Ω], [Ω, 2vt]] swept
/// from t = −∞ to +∞.
pub fn landau_zener_probability(rabi_gap: f64, sweep_rate: f64) -> Result<f64> {
    if rabi_gap.is_nan() || rabi_gap < 0.0 {
        return Err(ScrapError::invalid("rabi_gap", "must be non-negative"));
    }
    if sweep_rate.is_nan() || sweep_rate <= 0.0 {
        return Err(ScrapError::invalid("sweep_rate", "must be positive"));
    }
    Ok((-PI * rabi_gap * rabi_gap / (2.0 * sweep_rate)).exp())
}

/// Mixing angle and adiabatic energies of a two-level Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstantaneousEigenbasis {
    pub mixing_angle: f64,
    /// Energy of |λ₋⟩ = cos θ|0⟩ − sin θ|1⟩.
    pub lower: f64,
    /// Energy of |λ₊⟩ = sin θ|0⟩ + cos θ|1⟩.
    pub upper: f64,
    /// arg H₀₁; the |1⟩ components above carry e^{−iφ}.
    pub coupling_phase: f64,
}

impl InstantaneousEigenbasis {
    pub fn lower_state(&self) -> CVector {
        let (s, c) = self.mixing_angle.sin_cos();
        CVector::from_vec(vec![
            Complex64::new(c, 0.0),
            -Complex64::from_polar(s, -self.coupling_phase),
        ])
    }

    pub fn upper_state(&self) -> CVector {
        let (s, c) = self.mixing_angle.sin_cos();
        CVector::from_vec(vec![
            Complex64::new(s, 0.0),
            Complex64::from_polar(c, -self.coupling_phase),
        ])
    }
}

pub fn instantaneous_eigenbasis(h: &TimeDependentHamiltonian, t: f64) -> Result<InstantaneousEigenbasis> {
    if h.dimension() != 2 {
        return Err(ScrapError::DimensionMismatch {
            expected: 2,
            actual: h.dimension(),
        });
    }
    let m = h.evaluate(t);
    let base = m[(0, 0)].re;
    let detuning = m[(1, 1)].re - base;
    let rabi = 2.0 * m[(0, 1)].norm();
    let gap = detuning.hypot(rabi);
    if gap <= 1e-15 * (1.0 + base.abs()) {
        return Err(ScrapError::DegeneratePoint { time: t });
    }
    Ok(InstantaneousEigenbasis {
        mixing_angle: mixing_angle(rabi, detuning),
        lower: base + 0.5 * (detuning - gap),
        upper: base + 0.5 * (detuning + gap),
        coupling_phase: m[(0, 1)].arg(),
    })
}
