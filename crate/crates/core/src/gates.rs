//! Logic gates built from propagated unitaries.
//!
//! An adiabatic inversion with Δ swept from positive to negative (Ω > 0)
//! produces
//!
//! ```text
//! U_x = e^{iβ₊}|0⟩⟨1| − e^{iβ₋}|1⟩⟨0|,   β± = −½∫μ±(t) dt,
//! μ± = Δ ± √(Δ² + Ω²)
//! ```
//!
//! where ½μ± are the instantaneous eigenvalues of the two-level Hamiltonian.
//! A single phase-shift gate U_z(α) = diag(1, e^{iα}) on either side turns
//! U_x into σ_x up to a global phase.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, ScrapError};
use crate::hamiltonians::{labels, CMatrix};
use crate::propagator::unitarity_defect;
use crate::pulse::{PulseSchedule, Window};

pub const UNITARITY_TOL: f64 = 1e-8;
const PHASE_QUADRATURE_RTOL: f64 = 1e-8;

/// Which side of the raw gate the corrective U_z(α) acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionSide {
    /// U_z(α) is applied first: result = U · U_z(α).
    Before,
    /// U_z(α) is applied last: result = U_z(α) · U.
    After,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GatePhases {
    pub alpha: f64,
    pub side: CorrectionSide,
    pub beta_plus: f64,
    pub beta_minus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    pub matrix: CMatrix,
    pub basis_labels: Vec<String>,
    pub phases: Option<GatePhases>,
}

impl GateMatrix {
    pub fn new(matrix: CMatrix, basis_labels: Vec<String>) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d || basis_labels.len() != d {
            return Err(ScrapError::DimensionMismatch {
                expected: d,
                actual: if matrix.ncols() != d { matrix.ncols() } else { basis_labels.len() },
            });
        }
        if d != 2 && d != 4 {
            return Err(ScrapError::invalid("matrix", format!("gates are 2x2 or 4x4, got {d}x{d}")));
        }
        let defect = unitarity_defect(&matrix);
        if defect.is_nan() || defect > UNITARITY_TOL {
            return Err(ScrapError::invalid("matrix", format!("not unitary (defect {defect:e})")));
        }
        Ok(Self {
            matrix,
            basis_labels,
            phases: None,
        })
    }

    /// Single-qubit gate on |0⟩, |1⟩.
    pub fn qubit(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, labels(&["|0⟩", "|1⟩"]))
    }

    /// Two-qubit gate on |00⟩, |01⟩, |10⟩, |11⟩.
    pub fn two_qubit(matrix: CMatrix) -> Result<Self> {
        Self::new(matrix, labels(&["|00⟩", "|01⟩", "|10⟩", "|11⟩"]))
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn compose(&self, first: &GateMatrix) -> Result<GateMatrix> {
        check_dimensions(self, first)?;
        Ok(GateMatrix {
            matrix: &self.matrix * &first.matrix,
            basis_labels: self.basis_labels.clone(),
            phases: None,
        })
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_dimensions(u: &GateMatrix, v: &GateMatrix) -> Result<()> {
    if u.dimension() != v.dimension() {
        return Err(ScrapError::DimensionMismatch {
            expected: u.dimension(),
            actual: v.dimension(),
        });
    }
    Ok(())
}

/// Wrap to (−π, π].
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

pub fn pauli_x() -> GateMatrix {
    let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
    GateMatrix::qubit(m).expect("σ_x is unitary")
}

pub fn identity_gate(dimension: usize) -> Result<GateMatrix> {
    let m = CMatrix::identity(dimension, dimension);
    match dimension {
        2 => GateMatrix::qubit(m),
        4 => GateMatrix::two_qubit(m),
        _ => GateMatrix::new(m, (0..dimension).map(|k| format!("|{k}⟩")).collect()),
    }
}

/// Permutation taking |01⟩ ↔ |10⟩.
const SWAP_TARGET: [usize; 4] = [0, 2, 1, 3];

pub fn swap_gate() -> GateMatrix {
    let mut m = CMatrix::zeros(4, 4);
    for (j, &i) in SWAP_TARGET.iter().enumerate() {
        m[(i, j)] = c(1.0, 0.0);
    }
    GateMatrix::two_qubit(m).expect("SWAP is unitary")
}

/// U_z(α) = diag(1, e^{iα}).
pub fn phase_shift_gate(alpha: f64) -> GateMatrix {
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, alpha)],
    );
    GateMatrix::qubit(m).expect("phase shift is unitary")
}

/// e^{iβ₊}|0⟩⟨1| − e^{iβ₋}|1⟩⟨0|.
pub fn ux_gate(beta_plus: f64, beta_minus: f64) -> GateMatrix {
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            c(0.0, 0.0),
            Complex64::from_polar(1.0, beta_plus),
            -Complex64::from_polar(1.0, beta_minus),
            c(0.0, 0.0),
        ],
    );
    let mut gate = GateMatrix::qubit(m).expect("U_x is unitary");
    gate.phases = Some(GatePhases {
        alpha: 0.0,
        side: CorrectionSide::After,
        beta_plus,
        beta_minus,
    });
    gate
}

/// (β₊, β₋) read off an inverter: β₊ = arg U₀₁, β₋ = arg(−U₁₀).
pub fn extract_ux_phases(u: &GateMatrix) -> Result<(f64, f64)> {
    if u.dimension() != 2 {
        return Err(ScrapError::DimensionMismatch {
            expected: 2,
            actual: u.dimension(),
        });
    }
    Ok((u.matrix[(0, 1)].arg(), (-u.matrix[(1, 0)]).arg()))
}

/// (β₊, β₋) from the pulse shapes by adaptive quadrature.
pub fn expected_ux_phases(rabi: &PulseSchedule, detuning: &PulseSchedule, tspan: Window) -> Result<(f64, f64)> {
    rabi.validate()?;
    detuning.validate()?;
    let root = |t: f64| {
        let (o, d) = (rabi.value(t), detuning.value(t));
        (d, o.hypot(d))
    };
    let plus = integrate(|t| {
        let (d, r) = root(t);
        d + r
    }, tspan);
    let minus = integrate(|t| {
        let (d, r) = root(t);
        d - r
    }, tspan);
    Ok((-0.5 * plus, -0.5 * minus))
}

/// Adaptive Simpson over `PANELS` panels, each refined to the relative
/// tolerance of the coarse total.
fn integrate(f: impl Fn(f64) -> f64, w: Window) -> f64 {
    const PANELS: usize = 64;
    let h = w.duration() / PANELS as f64;
    let edges: Vec<f64> = (0..=PANELS)
        .map(|k| if k == PANELS { w.end } else { w.start + h * k as f64 })
        .collect();
    let coarse: f64 = edges.windows(2).map(|p| simpson(&f, p[0], p[1]).0.abs()).sum();
    let abs_tol = PHASE_QUADRATURE_RTOL * 1e-2 * coarse.max(f64::MIN_POSITIVE);
    edges
        .windows(2)
        .map(|p| {
            let (whole, fm) = simpson(&f, p[0], p[1]);
            adaptive_simpson(&f, p[0], p[1], f(p[0]), fm, f(p[1]), whole, abs_tol / PANELS as f64, 40)
        })
        .sum()
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let fm = f(0.5 * (a + b));
    ((b - a) / 6.0 * (f(a) + 4.0 * fm + f(b)), fm)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Corrects an inverter to σ_x with one phase-shift gate.
///
/// Candidate corrections come from the supplied (β₊, β₋) and from the phases
/// read off `u` itself, each tried before and after `u`; the best one is kept
/// and recorded in the result's `phases`.
pub fn cancel_phases(u: &GateMatrix, beta_plus: f64, beta_minus: f64) -> Result<GateMatrix> {
    if u.dimension() != 2 {
        return Err(ScrapError::DimensionMismatch {
            expected: 2,
            actual: u.dimension(),
        });
    }
    let target = pauli_x();
    let (bp, bm) = extract_ux_phases(u)?;
    let mut best: Option<(f64, GateMatrix)> = None;
    for (p, m) in [(beta_plus, beta_minus), (bp, bm)] {
        // U_z(α)·U_x ∝ σ_x needs e^{iβ₊} = −e^{i(β₋+α)}; U_x·U_z(α) needs e^{i(β₊+α)} = −e^{iβ₋}
        let offset = p - m - PI;
        for (side, alpha) in [(CorrectionSide::After, offset), (CorrectionSide::Before, -offset)] {
            let alpha = wrap_phase(alpha);
            let z = phase_shift_gate(alpha);
            let matrix = match side {
                CorrectionSide::After => &z.matrix * &u.matrix,
                CorrectionSide::Before => &u.matrix * &z.matrix,
            };
            let fidelity = matrix_fidelity(&matrix, &target.matrix);
            if best.as_ref().is_none_or(|(f, _)| fidelity > *f + 1e-15) {
                let gate = GateMatrix {
                    matrix,
                    basis_labels: u.basis_labels.clone(),
                    phases: Some(GatePhases {
                        alpha,
                        side,
                        beta_plus: p,
                        beta_minus: m,
                    }),
                };
                best = Some((fidelity, gate));
            }
        }
    }
    let (fidelity, gate) = best.expect("at least one candidate");
    if fidelity <= 0.5 {
        return Err(ScrapError::NotAnInverter { fidelity });
    }
    Ok(gate)
}

fn matrix_fidelity(u: &CMatrix, v: &CMatrix) -> f64 {
    let d = u.nrows() as f64;
    let trace: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
    (trace.norm_sqr() / (d * d)).min(1.0)
}

/// |Tr(U†V)|² / d².
pub fn gate_fidelity(u: &GateMatrix, v: &GateMatrix) -> Result<f64> {
    check_dimensions(u, v)?;
    Ok(matrix_fidelity(&u.matrix, &v.matrix))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwapScore {
    /// Mean population reaching the SWAP target over the four basis inputs.
    pub population: f64,
    /// gate_fidelity against (U_z(a) ⊗ U_z(b))·SWAP at the best local phases.
    pub phase_sensitive: f64,
    pub local_phases: (f64, f64),
}

pub fn swap_fidelity(u4: &GateMatrix) -> Result<SwapScore> {
    if u4.dimension() != 4 {
        return Err(ScrapError::DimensionMismatch {
            expected: 4,
            actual: u4.dimension(),
        });
    }
    let u = &u4.matrix;
    let population = SWAP_TARGET.iter().enumerate().map(|(j, &i)| u[(i, j)].norm_sqr()).sum::<f64>() / 4.0;

    // Tr(U† D S) = Σ_k D_kk conj(U[k, σ(k)]) with D = diag(1, e^{ib}, e^{ia}, e^{i(a+b)})
    let k: Vec<Complex64> = (0..4).map(|i| u[(i, SWAP_TARGET[i])].conj()).collect();
    let overlap = |a: f64, b: f64| {
        k[0] + k[1] * Complex64::from_polar(1.0, b)
            + k[2] * Complex64::from_polar(1.0, a)
            + k[3] * Complex64::from_polar(1.0, a + b)
    };
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for start in 0..8 {
        let mut a = start as f64 * PI / 4.0;
        let mut b = 0.0;
        for _ in 0..100 {
            let ea = Complex64::from_polar(1.0, a);
            b = (k[0] + k[2] * ea).arg() - (k[1] + k[3] * ea).arg();
            let eb = Complex64::from_polar(1.0, b);
            let next = (k[0] + k[1] * eb).arg() - (k[2] + k[3] * eb).arg();
            let converged = (wrap_phase(next - a)).abs() < 1e-14;
            a = next;
            if converged {
                break;
            }
        }
        let score = overlap(a, b).norm_sqr() / 16.0;
        if score > best.0 {
            best = (score, wrap_phase(a), wrap_phase(b));
        }
    }
    Ok(SwapScore {
        population,
        phase_sensitive: best.0.min(1.0),
        local_phases: (best.1, best.2),
    })
}
