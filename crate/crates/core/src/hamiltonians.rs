//! Time-dependent Hamiltonians for the single-qubit, readout and two-qubit
//! passages. All matrices are in rad/ns with ħ = 1.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, ScrapError};
use crate::pulse::{PulseSchedule, Window};
use crate::spectrum::SpectrumResult;
use crate::units;

pub type CMatrix = DMatrix<Complex64>;

type Evaluator = dyn Fn(f64) -> CMatrix + Send + Sync;

/// An evaluable map t ↦ H(t) with a fixed, labelled basis.
#[derive(Clone)]
pub struct TimeDependentHamiltonian {
    labels: Vec<String>,
    window: Window,
    evaluator: Arc<Evaluator>,
}

impl fmt::Debug for TimeDependentHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeDependentHamiltonian")
            .field("labels", &self.labels)
            .field("window", &self.window)
            .finish()
    }
}

impl TimeDependentHamiltonian {
    pub fn new<F>(labels: Vec<String>, window: Window, evaluator: F) -> Self
    where
        F: Fn(f64) -> CMatrix + Send + Sync + 'static,
    {
        Self {
            labels,
            window,
            evaluator: Arc::new(evaluator),
        }
    }

    /// H(t) = `matrix` for every t.
    pub fn constant(labels: Vec<String>, window: Window, matrix: CMatrix) -> Self {
        assert_eq!(matrix.nrows(), labels.len());
        Self::new(labels, window, move |_| matrix.clone())
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.labels
    }

    /// The window the pulses were defined on.
    pub fn window(&self) -> Window {
        self.window
    }

    pub fn evaluate(&self, t: f64) -> CMatrix {
        (self.evaluator)(t)
    }

    /// Place this Hamiltonian on the basis states `positions` of a larger
    /// space; every other matrix element is zero.
    pub fn embed(&self, labels: Vec<String>, positions: &[usize]) -> Result<Self> {
        if positions.len() != self.dimension() {
            return Err(ScrapError::DimensionMismatch {
                expected: self.dimension(),
                actual: positions.len(),
            });
        }
        if positions.iter().any(|&p| p >= labels.len()) {
            return Err(ScrapError::invalid("positions", "index outside the target basis"));
        }
        let inner = self.clone();
        let positions = positions.to_vec();
        let dim = labels.len();
        Ok(Self::new(labels, self.window, move |t| {
            let small = inner.evaluate(t);
            let mut big = CMatrix::zeros(dim, dim);
            for (a, &i) in positions.iter().enumerate() {
                for (b, &j) in positions.iter().enumerate() {
                    big[(i, j)] = small[(a, b)];
                }
            }
            big
        }))
    }
}

pub fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn common_window(a: &PulseSchedule, b: &PulseSchedule) -> Result<Window> {
    a.validate()?;
    b.validate()?;
    if a.window != b.window {
        return Err(ScrapError::invalid(
            "window",
            format!(
                "schedules must share a window: [{}, {}] vs [{}, {}]",
                a.window.start, a.window.end, b.window.start, b.window.end
            ),
        ));
    }
    Ok(a.window)
}

/// H₁(t) = ½ [[0, Ω(t)], [Ω(t), 2Δ(t)]] on {|0⟩, |1⟩}.
pub fn scrap_two_level(rabi: &PulseSchedule, detuning: &PulseSchedule) -> Result<TimeDependentHamiltonian> {
    let window = common_window(rabi, detuning)?;
    let rabi = rabi.clone();
    let detuning = detuning.clone();
    Ok(TimeDependentHamiltonian::new(labels(&["|0⟩", "|1⟩"]), window, move |t| {
        let half_rabi = c(0.5 * rabi.value(t));
        CMatrix::from_row_slice(2, 2, &[c(0.0), half_rabi, half_rabi, c(detuning.value(t))])
    }))
}

/// Which transition the microwave is tuned to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveTransition {
    /// ω₁₀: the qubit NOT passage, |2⟩ is the leakage level.
    Qubit,
    /// ω₂₁: the readout passage |1⟩ → |2⟩.
    Readout,
}

/// Rabi frequency −(Φ₀/2π)·A·δ_ij (rad/ns) of a microwave amplitude `amplitude` (nA).
pub fn rabi_frequency(spectrum: &SpectrumResult, i: usize, j: usize, amplitude: f64) -> f64 {
    -units::current_coupling_per_na() * amplitude * spectrum.delta(i, j)
}

/// Stark shift of the i→j transition, −(Φ₀/2π)·I·(δ_jj − δ_ii), in rad/ns
/// for a bias current `current` (nA). With a ramp rate in nA/ns this is the
/// sweep rate in rad/ns².
pub fn stark_shift(spectrum: &SpectrumResult, i: usize, j: usize, current: f64) -> f64 {
    -units::current_coupling_per_na() * current * (spectrum.delta(j, j) - spectrum.delta(i, i))
}

/// Three-level driven junction in the frame rotating at the microwave
/// frequency, rotating-wave approximation applied.
///
/// Diagonal: static offsets E_j − j·ω_drive plus the Stark shifts
/// −(Φ₀/2π) I_dc(t) (δ_jj − δ_00). Off-diagonal: −(Φ₀/2π) A(t) δ_{j,j+1} / 2
/// on (0,1) and (1,2). The (0,2) element is dropped.
pub fn driven_cbjj(
    spectrum: &SpectrumResult,
    transition: DriveTransition,
    dc_current: &PulseSchedule,
    microwave: &PulseSchedule,
) -> Result<TimeDependentHamiltonian> {
    spectrum.require_levels(3)?;
    let window = common_window(dc_current, microwave)?;
    let offsets = match transition {
        DriveTransition::Qubit => [0.0, 0.0, spectrum.omega_21() - spectrum.omega_10()],
        DriveTransition::Readout => {
            let shift = spectrum.omega_10() - spectrum.omega_21();
            [0.0, shift, shift]
        }
    };
    let g = units::current_coupling_per_na();
    let stark = [
        0.0,
        spectrum.delta(1, 1) - spectrum.delta(0, 0),
        spectrum.delta(2, 2) - spectrum.delta(0, 0),
    ];
    let d01 = spectrum.delta(0, 1);
    let d12 = spectrum.delta(1, 2);
    let dc = dc_current.clone();
    let mw = microwave.clone();
    Ok(TimeDependentHamiltonian::new(
        labels(&["|0⟩", "|1⟩", "|2⟩"]),
        window,
        move |t| {
            let current = dc.value(t);
            let amplitude = mw.value(t);
            let mut h = CMatrix::zeros(3, 3);
            for j in 0..3 {
                h[(j, j)] = c(offsets[j] - g * current * stark[j]);
            }
            let low = c(-0.5 * g * amplitude * d01);
            let leak = c(-0.5 * g * amplitude * d12);
            h[(0, 1)] = low;
            h[(1, 0)] = low;
            h[(1, 2)] = leak;
            h[(2, 1)] = leak;
            h
        },
    ))
}

/// Single-qubit passage with I_dc(t) = v₁ t (nA/ns) and a constant microwave
/// amplitude A₀₁ (nA) on `window`.
pub fn single_qubit_three_level(
    spectrum: &SpectrumResult,
    dc_rate_v1: f64,
    mw_amplitude_a01: f64,
    window: Window,
) -> Result<TimeDependentHamiltonian> {
    driven_cbjj(
        spectrum,
        DriveTransition::Qubit,
        &PulseSchedule::linear_ramp(dc_rate_v1, window),
        &PulseSchedule::constant(mw_amplitude_a01, window),
    )
}

/// XY-coupled qubits with a Stark chirp on the second qubit, basis
/// {|00⟩, |01⟩, |10⟩, |11⟩}.
pub fn xy_two_qubit(coupling: &PulseSchedule, detuning2: &PulseSchedule) -> Result<TimeDependentHamiltonian> {
    let window = common_window(coupling, detuning2)?;
    let k = coupling.clone();
    let d = detuning2.clone();
    Ok(TimeDependentHamiltonian::new(
        labels(&["|00⟩", "|01⟩", "|10⟩", "|11⟩"]),
        window,
        move |t| {
            let half_d = 0.5 * d.value(t);
            let half_k = c(0.5 * k.value(t));
            let mut h = CMatrix::zeros(4, 4);
            h[(0, 0)] = c(-half_d);
            h[(1, 1)] = c(-half_d);
            h[(2, 2)] = c(half_d);
            h[(3, 3)] = c(half_d);
            h[(1, 2)] = half_k;
            h[(2, 1)] = half_k;
            h
        },
    ))
}

/// Two identical capacitively coupled junctions, the second one biased by an
/// extra dc pulse. Momentum products enter through
/// (2π/Φ₀)² p p' / C̄_m = κ ζ/(1+ζ) · P P' with κ = ħ/m.
#[derive(Debug, Clone)]
pub struct CoupledPair {
    spectrum: SpectrumResult,
    zeta: f64,
    dc: PulseSchedule,
}

/// Derived constants of a coupled pair, all in rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConstants {
    /// κ ζ/(1+ζ).
    pub coupling_scale: f64,
    /// Ω̄ on {|01⟩, |10⟩}.
    pub omega_bar: f64,
    pub omega_ab: f64,
    pub omega_ac: f64,
    /// ϑ = ω₁₀ − ω₂₁.
    pub theta: f64,
}

impl CoupledPair {
    pub fn new(spectrum: &SpectrumResult, zeta: f64, dc: PulseSchedule) -> Result<Self> {
        spectrum.require_levels(3)?;
        if !(zeta > 0.0 && zeta < 1.0) {
            return Err(ScrapError::invalid("coupling_zeta", format!("{zeta} outside (0, 1)")));
        }
        dc.validate()?;
        Ok(Self {
            spectrum: spectrum.clone(),
            zeta,
            dc,
        })
    }

    pub fn constants(&self) -> CouplingConstants {
        let s = &self.spectrum;
        let scale = s.params.kinetic_scale() * self.zeta / (1.0 + self.zeta);
        CouplingConstants {
            coupling_scale: scale,
            omega_bar: 2.0 * scale * s.momentum(1, 0).powi(2),
            omega_ab: scale * s.momentum(0, 1) * s.momentum(1, 2),
            omega_ac: scale * s.momentum(0, 2).powi(2),
            theta: s.omega_10() - s.omega_21(),
        }
    }

    pub fn window(&self) -> Window {
        self.dc.window
    }

    /// ℑ₁ = {|00⟩}: E₀₀(t) = −(Φ₀/2π) I(t) δ₀₀ + κ' p₀₀².
    pub fn subspace1(&self) -> TimeDependentHamiltonian {
        let g = units::current_coupling_per_na();
        let k = self.constants();
        let d00 = self.spectrum.delta(0, 0);
        let static_part = k.coupling_scale * self.spectrum.momentum(0, 0).powi(2);
        let dc = self.dc.clone();
        TimeDependentHamiltonian::new(labels(&["|00⟩"]), self.window(), move |t| {
            CMatrix::from_element(1, 1, c(-g * dc.value(t) * d00 + static_part))
        })
    }

    /// ℑ₂ = {|01⟩, |10⟩} in the form of H₁ with Ω = Ω̄ and
    /// Δ̄(t) = (Φ₀/2π) I(t) (δ₁₁ − δ₀₀).
    pub fn subspace2(&self) -> TimeDependentHamiltonian {
        let g = units::current_coupling_per_na();
        let half_bar = c(0.5 * self.constants().omega_bar);
        let split = self.spectrum.delta(1, 1) - self.spectrum.delta(0, 0);
        let dc = self.dc.clone();
        TimeDependentHamiltonian::new(labels(&["|01⟩", "|10⟩"]), self.window(), move |t| {
            CMatrix::from_row_slice(2, 2, &[c(0.0), half_bar, half_bar, c(g * dc.value(t) * split)])
        })
    }

    /// ℑ₃ = {|02⟩, |11⟩, |20⟩} in the interaction picture of the bare pair.
    ///
    /// The couplings of |11⟩ carry e^{i(E_row − E_col)t}; since E₀₂ = E₂₀
    /// both |11⟩ couplings rotate at ϑ in the same sense.
    pub fn subspace3(&self) -> TimeDependentHamiltonian {
        let g = units::current_coupling_per_na();
        let k = self.constants();
        let s = &self.spectrum;
        let (d00, d11, d22) = (s.delta(0, 0), s.delta(1, 1), s.delta(2, 2));
        let (p00, p11, p22) = (s.momentum(0, 0), s.momentum(1, 1), s.momentum(2, 2));
        let static_a = k.coupling_scale * p00 * p22;
        let static_b = k.coupling_scale * p11 * p11;
        let static_c = k.coupling_scale * p22 * p00;
        let dc = self.dc.clone();
        TimeDependentHamiltonian::new(labels(&["|02⟩", "|11⟩", "|20⟩"]), self.window(), move |t| {
            let current = dc.value(t);
            let phase = Complex64::from_polar(1.0, -k.theta * t);
            let ab = phase * k.omega_ab;
            let mut h = CMatrix::zeros(3, 3);
            h[(0, 0)] = c(-g * current * d22 + static_a);
            h[(1, 1)] = c(-g * current * d11 + static_b);
            h[(2, 2)] = c(-g * current * d00 + static_c);
            h[(0, 1)] = ab;
            h[(1, 0)] = ab.conj();
            h[(1, 2)] = ab.conj();
            h[(2, 1)] = ab;
            h[(0, 2)] = c(k.omega_ac);
            h[(2, 0)] = c(k.omega_ac);
            h
        })
    }
}

/// ℑ₃ block of the coupled pair with I_dc⁽²⁾(t) = v₂ t (nA/ns).
pub fn coupled_cbjj_subspace3(
    spectrum: &SpectrumResult,
    coupling_zeta: f64,
    dc_rate_v2: f64,
    window: Window,
) -> Result<TimeDependentHamiltonian> {
    Ok(CoupledPair::new(spectrum, coupling_zeta, PulseSchedule::linear_ramp(dc_rate_v2, window))?.subspace3())
}

/// ℑ₂ block of the coupled pair with I_dc⁽²⁾(t) = v₂ t (nA/ns).
pub fn coupled_cbjj_pair_subspace2(
    spectrum: &SpectrumResult,
    coupling_zeta: f64,
    dc_rate_v2: f64,
    window: Window,
) -> Result<TimeDependentHamiltonian> {
    Ok(CoupledPair::new(spectrum, coupling_zeta, PulseSchedule::linear_ramp(dc_rate_v2, window))?.subspace2())
}

/// max |H − H†| over all elements.
pub fn hermiticity_defect(h: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}
