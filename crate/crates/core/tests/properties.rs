use proptest::prelude::*;

use scrap_core::hamiltonians::{
    driven_cbjj, hermiticity_defect, scrap_two_level, xy_two_qubit, CoupledPair, DriveTransition,
};
use scrap_core::propagator::{adiabaticity_margin, basis_state, propagate};
use scrap_core::pulse::{PulseSchedule, Window};
use scrap_core::spectrum::{compute_spectrum, overlap_matrix, CbjjParams, SpectrumResult};
use std::f64::consts::PI;
use std::sync::OnceLock;

fn reference_spectrum() -> &'static SpectrumResult {
    static SPECTRUM: OnceLock<SpectrumResult> = OnceLock::new();
    SPECTRUM.get_or_init(|| compute_spectrum(&CbjjParams::reference(), 4).unwrap())
}

fn omega_10(params: CbjjParams) -> f64 {
    compute_spectrum(&params, 2).unwrap().omega_10()
}

#[test]
fn bound_states_are_orthonormal_and_ordered() {
    let s = reference_spectrum();
    let overlap = overlap_matrix(s);
    for i in 0..s.levels() {
        for j in 0..s.levels() {
            let kron = if i == j { 1.0 } else { 0.0 };
            assert!((overlap[(i, j)] - kron).abs() < 1e-8, "({i},{j})");
        }
    }
    assert!(s.energies.windows(2).all(|e| e[1] > e[0]));
}

#[test]
fn grid_doubling_moves_omega_10_less_than_five_hundredths_percent() {
    let base = omega_10(CbjjParams::reference());
    let fine = omega_10(CbjjParams::reference().with_grid(4096));
    assert!(((fine - base) / base).abs() < 5e-4);
}

#[test]
fn wider_box_leaves_omega_10_alone() {
    let base = omega_10(CbjjParams::reference());
    let wide = omega_10(CbjjParams::reference().with_margin(0.75));
    assert!(((wide - base) / base).abs() < 1e-3);
}

#[test]
fn energies_converge_monotonically_from_below() {
    // central differences underestimate the kinetic energy, so E_n rises
    // toward its limit as the grid is refined
    let grids = [512, 1024, 2048, 4096];
    let levels: Vec<Vec<f64>> = grids
        .iter()
        .map(|&n| compute_spectrum(&CbjjParams::reference().with_grid(n), 3).unwrap().energies)
        .collect();
    for k in 0..3 {
        let steps: Vec<f64> = levels.windows(2).map(|p| p[1][k] - p[0][k]).collect();
        assert!(steps.iter().all(|&d| d >= -1e-10 * levels[0][k].abs()), "level {k}: {steps:?}");
        assert!(steps.windows(2).all(|d| d[1].abs() <= d[0].abs()), "level {k}: {steps:?}");
    }
}

#[test]
fn deep_well_approaches_plasma_frequency() {
    let params = CbjjParams::new(4.3, 13.3, 0.5);
    let s = compute_spectrum(&params, 3).unwrap();
    let wp = params.plasma_frequency();
    assert!(((s.omega_10() - wp) / wp).abs() < 0.05);
    assert!(((s.omega_21() - wp) / wp).abs() < 0.05);
}

#[test]
fn momentum_matches_dipole_sum_rule() {
    // ⟨0|∂|1⟩ = (E₀ − E₁)⟨0|δ|1⟩ / (−κ) for H = −(κ/2)∂² + U
    let s = reference_spectrum();
    let kappa = s.params.kinetic_scale();
    for (i, j) in [(0, 1), (1, 2)] {
        let predicted = s.transition(j, i) * s.delta(i, j).abs() / kappa;
        let actual = s.momentum(i, j).abs();
        assert!(((actual - predicted) / predicted).abs() < 0.05, "({i},{j}): {actual} vs {predicted}");
    }
}

#[test]
fn symmetric_well_kills_same_parity_elements() {
    let s = compute_spectrum(&CbjjParams::new(4.3, 13.3, 0.0), 3).unwrap();
    for (i, j) in [(0, 0), (1, 1), (2, 2), (0, 2)] {
        assert!(s.delta(i, j).abs() < 1e-6, "delta_{i}{j} = {}", s.delta(i, j));
    }
    assert!(s.momentum(0, 2).abs() < 1e-6);
}

#[test]
fn reference_coupling_constants() {
    let s = reference_spectrum();
    let w = Window::symmetric(100.0).unwrap();
    let k = CoupledPair::new(s, 0.05, PulseSchedule::linear_ramp(3.0, w)).unwrap().constants();
    assert!((k.omega_bar - 2.1733).abs() < 1e-3, "{}", k.omega_bar);
    assert!((k.omega_ab.abs() - 1.5154).abs() < 1e-3, "{}", k.omega_ab);
    assert!((k.omega_ac - 0.0116).abs() < 1e-4, "{}", k.omega_ac);
}

prop_compose! {
    fn window()(half in 5.0f64..200.0, shift in -50.0f64..50.0) -> Window {
        Window::new(shift - half, shift + half).unwrap()
    }
}

fn pulse(kind: u8, a: f64, b: f64, w: Window) -> PulseSchedule {
    let width = 0.1 * w.duration() * (1.0 + b.abs());
    match kind % 3 {
        0 => PulseSchedule::constant(a, w),
        1 => PulseSchedule::linear_ramp(a * 0.05, w),
        _ => PulseSchedule::gaussian(a, width, w).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn builders_are_hermitian_and_deterministic(
        w in window(),
        kinds in (0u8..3, 0u8..3),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        zeta in 0.001f64..0.5,
        ts in proptest::collection::vec(0.0f64..1.0, 20),
    ) {
        let s = reference_spectrum();
        let p = pulse(kinds.0, a, b, w);
        let q = pulse(kinds.1, b, a, w);
        let pair = CoupledPair::new(s, zeta, q.clone()).unwrap();
        let hs = [
            scrap_two_level(&p, &q).unwrap(),
            driven_cbjj(s, DriveTransition::Qubit, &q, &p).unwrap(),
            driven_cbjj(s, DriveTransition::Readout, &q, &p).unwrap(),
            xy_two_qubit(&p, &q).unwrap(),
            pair.subspace1(),
            pair.subspace2(),
            pair.subspace3(),
        ];
        for h in &hs {
            for &u in &ts {
                let t = w.start + u * w.duration();
                let m = h.evaluate(t);
                prop_assert!(hermiticity_defect(&m) < 1e-12);
                prop_assert_eq!(&m, &h.evaluate(t));
            }
        }
    }

    #[test]
    fn two_level_norm_is_conserved(
        kinds in (0u8..3, 0u8..3),
        a in -1.5f64..1.5,
        b in -1.5f64..1.5,
        start in 0usize..2,
    ) {
        let w = Window::symmetric(40.0).unwrap();
        let h = scrap_two_level(&pulse(kinds.0, a, b, w), &pulse(kinds.1, b, a, w)).unwrap();
        let traj = propagate(&h, &basis_state(2, start), w, 1e-8).unwrap();
        prop_assert!(traj.max_norm_defect() < 1e-8);
    }

    #[test]
    fn outer_xy_states_are_invariant(
        kinds in (0u8..3, 0u8..3),
        a in -1.5f64..1.5,
        b in -1.5f64..1.5,
    ) {
        let w = Window::symmetric(30.0).unwrap();
        let h = xy_two_qubit(&pulse(kinds.0, a, b, w), &pulse(kinds.1, b, a, w)).unwrap();
        for k in [0, 3] {
            let traj = propagate(&h, &basis_state(4, k), w, 1e-9).unwrap();
            prop_assert!(traj.populations.iter().all(|p| (p[k] - 1.0).abs() < 1e-9));
        }
    }

    #[test]
    fn adiabaticity_report_ranges(
        kinds in (0u8..3, 0u8..3),
        a in 0.1f64..1.5,
        b in -1.5f64..1.5,
    ) {
        let w = Window::symmetric(25.0).unwrap();
        let rabi = pulse(kinds.0, a, b, w);
        let detuning = pulse(kinds.1, b, a, w);
        if let Ok(report) = adiabaticity_margin(&rabi, &detuning, w) {
            prop_assert!(report.max_ratio >= 0.0);
            for theta in [report.mixing_angle_start, report.mixing_angle_end] {
                prop_assert!((0.0..=PI / 2.0).contains(&theta));
            }
        }
    }
}
