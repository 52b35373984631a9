use std::path::Path;

use crate::cli::config::{ScenarioConfig, ScenarioKind};
use crate::cli::output::{emit_timeseries, write_table, RunSummary};
use crate::error::{Result, ScrapError};
use crate::gates::{swap_fidelity, GateMatrix};
use crate::hamiltonians::{driven_cbjj, xy_two_qubit, CoupledPair, DriveTransition, TimeDependentHamiltonian};
use crate::propagator::{
    adiabaticity_margin, basis_state, instantaneous_eigenbasis, landau_zener_probability, propagate_unitary_with, propagate_with,
    PropagationOptions, Trajectory,
};
use crate::pulse::{PulseSchedule, Window};
use crate::spectrum::{compute_spectrum, SpectrumResult};
use crate::units::{current_coupling_per_na, rad_per_ns_to_ghz};

/// A scenario failure with the scenario it came from.
#[derive(Debug, thiserror::Error)]
#[error("scenario `{scenario}`: {source}")]
pub struct ScenarioError {
    pub scenario: String,
    #[source]
    pub source: ScrapError,
}

impl ScenarioError {
    pub fn is_numerical(&self) -> bool {
        self.source.is_numerical()
    }
}

/// Runs `config` and writes its artifacts and `summary.json` into `out_dir`.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> std::result::Result<RunSummary, ScenarioError> {
    let wrap = |source| ScenarioError {
        scenario: config.scenario.name().to_string(),
        source,
    };
    config.validate().map_err(wrap)?;
    std::fs::create_dir_all(out_dir).map_err(|e| wrap(e.into()))?;
    let mut summary = RunSummary::new(config);
    let result = match config.scenario {
        ScenarioKind::Spectrum => spectrum(config, out_dir, &mut summary),
        ScenarioKind::ScrapNot => scrap_not(config, out_dir, &mut summary),
        ScenarioKind::Readout => readout(config, out_dir, &mut summary),
        ScenarioKind::Swap => swap(config, out_dir, &mut summary),
        ScenarioKind::LzSweep => lz_sweep(config, out_dir, &mut summary),
    };
    result.map_err(wrap)?;
    summary.check_finite().map_err(wrap)?;
    summary.write(out_dir).map_err(wrap)?;
    Ok(summary)
}

fn options(config: &ScenarioConfig, tspan: Window) -> PropagationOptions {
    PropagationOptions::new(tspan, config.integrator.tol).with_output_points(config.integrator.output_points)
}

fn record_trajectory(
    summary: &mut RunSummary,
    out_dir: &Path,
    name: &str,
    trajectory: &Trajectory,
) -> Result<()> {
    let file = format!("timeseries_{name}.csv");
    emit_timeseries(trajectory, &out_dir.join(&file))?;
    summary.artifacts.push(file);
    summary.metric(&format!("norm_defect_{name}"), trajectory.max_norm_defect());
    summary.derived(&format!("steps_{name}"), trajectory.steps);
    Ok(())
}

fn peak(trajectory: &Trajectory, level: usize) -> (f64, f64) {
    trajectory
        .times
        .iter()
        .zip(&trajectory.populations)
        .map(|(&t, p)| (p[level], t))
        .fold((f64::NEG_INFINITY, 0.0), |best, x| if x.0 > best.0 { x } else { best })
}

fn trough(trajectory: &Trajectory, level: usize) -> (f64, f64) {
    trajectory
        .times
        .iter()
        .zip(&trajectory.populations)
        .map(|(&t, p)| (p[level], t))
        .fold((f64::INFINITY, 0.0), |best, x| if x.0 < best.0 { x } else { best })
}

fn final_population(trajectory: &Trajectory, level: usize) -> f64 {
    trajectory.final_populations().map_or(f64::NAN, |p| p[level])
}

/// Smallest edge detuning should be at least this multiple of the peak coupling.
pub const MIN_WINDOW_RATIO: f64 = 10.0;

fn check_window(summary: &mut RunSummary, name: &str, rabi: &PulseSchedule, detuning: &PulseSchedule, window: Window) {
    let edge = detuning.value(window.start).abs().min(detuning.value(window.end).abs());
    let ratio = edge / rabi.max_abs();
    summary.derived(&format!("window_ratio_{name}"), ratio);
    if ratio < MIN_WINDOW_RATIO {
        summary.warnings.push(format!(
            "{name}: edge detuning is only {ratio:.2}x the peak coupling (want >= {MIN_WINDOW_RATIO})"
        ));
    }
}

fn record_spectrum_basics(summary: &mut RunSummary, s: &SpectrumResult) {
    summary.metric("omega_10_ghz", rad_per_ns_to_ghz(s.omega_10()));
    summary.metric("omega_21_ghz", rad_per_ns_to_ghz(s.omega_21()));
}

fn spectrum(config: &ScenarioConfig, out_dir: &Path, summary: &mut RunSummary) -> Result<()> {
    let n = config.spectrum.levels;
    let s = compute_spectrum(&config.cbjj, n)?;
    record_spectrum_basics(summary, &s);
    summary.metric("plasma_frequency_ghz", rad_per_ns_to_ghz(config.cbjj.plasma_frequency()));
    summary.metric("barrier_above_ground_ghz", rad_per_ns_to_ghz(s.barrier_energy - s.energies[0]));
    for i in 0..n {
        for j in i..n {
            summary.metric(&format!("delta_{i}{j}"), s.delta(i, j));
            if i != j {
                summary.metric(&format!("p_{i}{j}"), s.momentum(i, j));
            }
        }
    }

    let levels: Vec<Vec<f64>> = (0..n)
        .map(|k| vec![k as f64, rad_per_ns_to_ghz(s.energies[k]), rad_per_ns_to_ghz(s.energies[k] - s.energies[0])])
        .collect();
    write_table(&out_dir.join("spectrum_levels.csv"), &["level", "energy_ghz", "above_ground_ghz"], &levels)?;
    let mut matrices = Vec::new();
    for i in 0..n {
        for j in 0..n {
            matrices.push(vec![i as f64, j as f64, s.delta(i, j), s.momentum(i, j)]);
        }
    }
    write_table(&out_dir.join("spectrum_matrices.csv"), &["i", "j", "delta_ij", "p_ij"], &matrices)?;
    summary.artifacts.push("spectrum_levels.csv".into());
    summary.artifacts.push("spectrum_matrices.csv".into());
    summary.derived("well_minimum_rad", config.cbjj.well_minimum());
    summary.derived("barrier_top_rad", config.cbjj.barrier_top());
    summary.derived("grid_spacing_rad", s.spacing());
    Ok(())
}

struct DrivenRun {
    spectrum: SpectrumResult,
    h: TimeDependentHamiltonian,
    window: Window,
}

fn driven(config: &ScenarioConfig, transition: DriveTransition, summary: &mut RunSummary) -> Result<DrivenRun> {
    let spectrum = compute_spectrum(&config.cbjj, 3)?;
    record_spectrum_basics(summary, &spectrum);
    let dc = config.pulse("dc")?;
    let mw = config.pulse("mw")?;
    let h = driven_cbjj(&spectrum, transition, dc, mw)?;
    let window = h.window();

    // two-level adiabaticity of the driven transition
    let (lo, hi) = match transition {
        DriveTransition::Qubit => (0, 1),
        DriveTransition::Readout => (1, 2),
    };
    let g = current_coupling_per_na();
    let rabi = mw.scaled(-g * spectrum.delta(lo, hi));
    let detuning = dc.scaled(-g * (spectrum.delta(hi, hi) - spectrum.delta(lo, lo)));
    let report = adiabaticity_margin(&rabi, &detuning, window)?;
    check_window(summary, "drive", &rabi, &detuning, window);
    summary.metric("max_ratio", report.max_ratio);
    summary.derived("max_ratio_time_ns", report.argmax_time);
    summary.derived("window_ns", window);
    summary.derived("peak_rabi_rad_per_ns", rabi.max_abs());
    Ok(DrivenRun { spectrum, h, window })
}

fn scrap_not(config: &ScenarioConfig, out_dir: &Path, summary: &mut RunSummary) -> Result<()> {
    let run = driven(config, DriveTransition::Qubit, summary)?;
    let opts = options(config, run.window);
    let from0 = propagate_with(&run.h, &basis_state(3, 0), &opts)?;
    let from1 = propagate_with(&run.h, &basis_state(3, 1), &opts)?;
    record_trajectory(summary, out_dir, "from_0", &from0)?;
    record_trajectory(summary, out_dir, "from_1", &from1)?;
    summary.metric("inversion_0_to_1", final_population(&from0, 1));
    summary.metric("inversion_1_to_0", final_population(&from1, 0));
    let (leak0, t0) = peak(&from0, 2);
    let (leak1, t1) = peak(&from1, 2);
    summary.metric("peak_leakage_from_0", leak0);
    summary.metric("peak_leakage_from_1", leak1);
    summary.metric("peak_leakage", leak0.max(leak1));
    summary.derived("peak_leakage_time_from_0_ns", t0);
    summary.derived("peak_leakage_time_from_1_ns", t1);
    summary.derived("stark_slope_01_rad_per_ns2", stark_slope(&run.spectrum, config.pulse("dc")?, 0, 1));
    Ok(())
}

fn stark_slope(s: &SpectrumResult, dc: &PulseSchedule, lo: usize, hi: usize) -> f64 {
    let g = current_coupling_per_na();
    -g * (s.delta(hi, hi) - s.delta(lo, lo)) * dc.derivative(0.5 * (dc.window.start + dc.window.end))
}

fn readout(config: &ScenarioConfig, out_dir: &Path, summary: &mut RunSummary) -> Result<()> {
    let run = driven(config, DriveTransition::Readout, summary)?;
    let opts = options(config, run.window);
    let from1 = propagate_with(&run.h, &basis_state(3, 1), &opts)?;
    let from0 = propagate_with(&run.h, &basis_state(3, 0), &opts)?;
    record_trajectory(summary, out_dir, "from_1", &from1)?;
    record_trajectory(summary, out_dir, "from_0", &from0)?;
    summary.metric("p2_from_1", final_population(&from1, 2));
    summary.metric("p0_from_0", final_population(&from0, 0));
    summary.metric("min_p0_from_0", trough(&from0, 0).0);
    summary.derived("stark_slope_12_rad_per_ns2", stark_slope(&run.spectrum, config.pulse("dc")?, 1, 2));
    Ok(())
}

fn swap(config: &ScenarioConfig, out_dir: &Path, summary: &mut RunSummary) -> Result<()> {
    let spectrum = compute_spectrum(&config.cbjj, 3)?;
    record_spectrum_basics(summary, &spectrum);
    let zeta = config.coupling.zeta;
    let g = current_coupling_per_na();

    // ℑ₂ through the XY form on the full two-qubit space
    let dc2 = config.pulse("dc_subspace2")?.clone();
    let pair2 = CoupledPair::new(&spectrum, zeta, dc2.clone())?;
    let k = pair2.constants();
    let window2 = dc2.window;
    let coupling = PulseSchedule::constant(k.omega_bar, window2);
    let detuning = dc2.scaled(g * (spectrum.delta(1, 1) - spectrum.delta(0, 0)));
    let report = adiabaticity_margin(&coupling, &detuning, window2)?;
    check_window(summary, "subspace2", &coupling, &detuning, window2);
    let xy = xy_two_qubit(&coupling, &detuning)?;
    let opts2 = options(config, window2);
    let u4 = GateMatrix::two_qubit(propagate_unitary_with(&xy, &opts2)?)?;
    let score = swap_fidelity(&u4)?;
    let from01 = propagate_with(&xy, &basis_state(4, 1), &opts2)?;
    let from00 = propagate_with(&xy, &basis_state(4, 0), &opts2)?;
    record_trajectory(summary, out_dir, "subspace2", &from01)?;
    summary.metric("swap_population", score.population);
    summary.metric("swap_phase_sensitive", score.phase_sensitive);
    summary.metric("max_ratio", report.max_ratio);
    summary.metric(
        "p00_defect",
        from00.populations.iter().map(|p| (p[0] - 1.0).abs()).fold(0.0, f64::max),
    );
    summary.derived("swap_local_phases_rad", score.local_phases);

    // ℑ₃ from |11⟩
    let dc3 = config.pulse("dc_subspace3")?.clone();
    let pair3 = CoupledPair::new(&spectrum, zeta, dc3.clone())?;
    let from11 = propagate_with(&pair3.subspace3(), &basis_state(3, 1), &options(config, dc3.window))?;
    record_trajectory(summary, out_dir, "subspace3", &from11)?;
    let (p11_min, t_min) = trough(&from11, 1);
    summary.metric("p11_min", p11_min);
    summary.metric("p11_min_time_ns", t_min);
    summary.metric("p11_final", final_population(&from11, 1));

    summary.metric("omega_bar_rad_per_ns", k.omega_bar);
    summary.metric("omega_ab_rad_per_ns", k.omega_ab);
    summary.metric("omega_ac_rad_per_ns", k.omega_ac);
    summary.derived("theta_rad_per_ns", k.theta);
    summary.derived("coupling_scale_rad_per_ns", k.coupling_scale);
    summary.derived("window_subspace2_ns", window2);
    summary.derived("window_subspace3_ns", dc3.window);
    Ok(())
}

fn lz_sweep(config: &ScenarioConfig, out_dir: &Path, summary: &mut RunSummary) -> Result<()> {
    let lz = &config.lz;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &omega in &lz.rabi {
        for &rate in &lz.rates {
            let numeric = lz_numeric(omega, rate, lz.window_ratio, config)?;
            let exact = landau_zener_probability(omega, rate)?;
            let err = (numeric - exact).abs();
            worst = worst.max(err);
            rows.push(vec![omega, rate, numeric, exact, err]);
        }
    }
    write_table(
        &out_dir.join("lz_grid.csv"),
        &["rabi", "rate", "p_numeric", "p_analytic", "abs_error"],
        &rows,
    )?;
    summary.artifacts.push("lz_grid.csv".into());
    summary.metric("max_abs_error", worst);
    summary.metric("grid_points", rows.len() as f64);
    let ps = rows.iter().map(|r| r[3]);
    summary.metric("p_analytic_min", ps.clone().fold(f64::INFINITY, f64::min));
    summary.metric("p_analytic_max", ps.fold(f64::NEG_INFINITY, f64::max));
    Ok(())
}

/// Diabatic probability for Ω constant and Δ = vt over |t| ≤ ratio·Ω/v.
///
/// The run starts in the instantaneous eigenstate continuous with |0⟩ and is
/// projected onto the one continuous with |0⟩ at the end, which removes the
/// switch-on transients of the finite window.
pub fn lz_numeric(omega: f64, rate: f64, window_ratio: f64, config: &ScenarioConfig) -> Result<f64> {
    let window = Window::symmetric(window_ratio * omega / rate)?;
    let h = crate::hamiltonians::scrap_two_level(
        &PulseSchedule::constant(omega, window),
        &PulseSchedule::linear_ramp(rate, window),
    )?;
    let start = instantaneous_eigenbasis(&h, window.start)?.upper_state();
    let finish = instantaneous_eigenbasis(&h, window.end)?.lower_state();
    let traj = propagate_with(&h, &start, &options(config, window))?;
    let psi = traj.final_state().ok_or_else(|| ScrapError::Config("empty trajectory".into()))?;
    Ok(finish.dotc(psi).norm_sqr())
}
