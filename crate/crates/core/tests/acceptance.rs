//! Exit criteria. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::path::Path;
use std::process::ExitCode;

use scrap_core::cli::{lz_numeric, run_scenario, RunSummary, ScenarioKind};
use scrap_core::gates::{cancel_phases, expected_ux_phases, extract_ux_phases, gate_fidelity, pauli_x, wrap_phase, GateMatrix};
use scrap_core::hamiltonians::{
    driven_cbjj, hermiticity_defect, labels, scrap_two_level, xy_two_qubit, CoupledPair, DriveTransition,
    TimeDependentHamiltonian,
};
use scrap_core::propagator::{adiabaticity_margin, basis_state, landau_zener_probability, propagate, propagate_unitary};
use scrap_core::pulse::{PulseSchedule, Window};
use scrap_core::spectrum::{compute_spectrum, CbjjParams};
use scrap_core::units::{current_coupling_per_na, rad_per_ns_to_ghz};

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
    }

    fn within(&mut self, name: &str, value: f64, target: f64, rel: f64) {
        let err = (value - target).abs() / target.abs();
        self.check(err <= rel, format!("{name} = {value:.6} (target {target}, rel err {err:.3e} <= {rel})"));
    }

    fn below(&mut self, name: &str, value: f64, bound: f64) {
        self.check(value < bound, format!("{name} = {value:.6e} < {bound:e}"));
    }

    fn above(&mut self, name: &str, value: f64, bound: f64) {
        self.check(value > bound, format!("{name} = {value:.9} > {bound}"));
    }
}

type Criterion = fn(&Runs) -> Result<Outcome, String>;

struct Runs {
    scrap_not: RunSummary,
    readout: RunSummary,
    swap: RunSummary,
    tol: f64,
}

fn run(kind: ScenarioKind, dir: &Path) -> Result<RunSummary, String> {
    run_scenario(&kind.default_config(), &dir.join(kind.name())).map_err(|e| e.to_string())
}

fn metric(summary: &RunSummary, name: &str) -> Result<f64, String> {
    summary.get(name).ok_or_else(|| format!("summary of `{}` lacks `{name}`", summary.scenario))
}

fn spectrum_regression(_: &Runs) -> Result<Outcome, String> {
    let s = compute_spectrum(&CbjjParams::new(4.3, 13.3, 0.9725), 3).map_err(|e| e.to_string())?;
    let mut out = Outcome::new();
    out.within("omega_10/2pi [GHz]", rad_per_ns_to_ghz(s.omega_10()), 5.981, 0.005);
    out.within("omega_21/2pi [GHz]", rad_per_ns_to_ghz(s.omega_21()), 5.637, 0.005);
    out.within("delta_00", s.delta(0, 0), 1.406, 0.02);
    out.within("delta_11", s.delta(1, 1), 1.425, 0.02);
    out.within("delta_22", s.delta(2, 2), 1.450, 0.02);
    out.within("|delta_01|", s.delta(0, 1).abs(), 0.053, 0.10);
    out.within("|delta_12|", s.delta(1, 2).abs(), 0.077, 0.10);
    out.within("|delta_02|", s.delta(0, 2).abs(), 0.004, 0.25);
    Ok(out)
}

fn single_qubit_not(runs: &Runs) -> Result<Outcome, String> {
    let s = &runs.scrap_not;
    let mut out = Outcome::new();
    out.above("P_1 after passage from |0>", metric(s, "inversion_0_to_1")?, 0.99);
    out.above("P_0 after passage from |1>", metric(s, "inversion_1_to_0")?, 0.99);
    out.below("peak P_2", metric(s, "peak_leakage")?, 0.05);
    Ok(out)
}

fn phase_integrals(runs: &Runs) -> Result<Outcome, String> {
    // Gaussian coupling that has vanished at the window edges, linear chirp from + to −
    let window = Window::symmetric(1750.0).map_err(|e| e.to_string())?;
    let rabi = PulseSchedule::gaussian(2.0, 500.0, window).map_err(|e| e.to_string())?;
    let detuning = PulseSchedule::linear_ramp(-0.008, window);
    let mut out = Outcome::new();
    let report = adiabaticity_margin(&rabi, &detuning, window).map_err(|e| e.to_string())?;
    out.below("max adiabaticity ratio", report.max_ratio, 0.01);

    let h = scrap_two_level(&rabi, &detuning).map_err(|e| e.to_string())?;
    let u = propagate_unitary(&h, window, runs.tol * 0.1).map_err(|e| e.to_string())?;
    let gate = GateMatrix::qubit(u).map_err(|e| e.to_string())?;
    let (bp, bm) = expected_ux_phases(&rabi, &detuning, window).map_err(|e| e.to_string())?;
    let (mp, mm) = extract_ux_phases(&gate).map_err(|e| e.to_string())?;
    out.below("|beta_plus(dynamics) - beta_plus(quadrature)| [rad]", wrap_phase(mp - bp).abs(), 2e-3);
    out.below("|beta_minus(dynamics) - beta_minus(quadrature)| [rad]", wrap_phase(mm - bm).abs(), 2e-3);
    let corrected = cancel_phases(&gate, bp, bm).map_err(|e| e.to_string())?;
    let fidelity = gate_fidelity(&corrected, &pauli_x()).map_err(|e| e.to_string())?;
    out.above("corrected fidelity to sigma_x", fidelity, 1.0 - 1e-4);
    Ok(out)
}

fn two_qubit_swap(runs: &Runs) -> Result<Outcome, String> {
    let s = &runs.swap;
    let mut out = Outcome::new();
    out.above("SWAP population score", metric(s, "swap_population")?, 0.99);
    out.below("min P_11", metric(s, "p11_min")?, 0.02);
    let t_min = metric(s, "p11_min_time_ns")?;
    out.check(t_min.abs() <= 10.0, format!("P_11 minimum at t = {t_min:.3} ns, within 10 ns of the crossing"));
    out.above("final P_11", metric(s, "p11_final")?, 0.99);
    out.below("max |P_00 - 1|", metric(s, "p00_defect")?, runs.tol);
    Ok(out)
}

fn landau_zener_suite(_: &Runs) -> Result<Outcome, String> {
    let config = ScenarioKind::LzSweep.default_config();
    let mut out = Outcome::new();
    let (mut worst, mut lo, mut hi, mut n) = (0.0f64, 1.0f64, 0.0f64, 0);
    for &omega in &config.lz.rabi {
        for &rate in &config.lz.rates {
            let numeric = lz_numeric(omega, rate, config.lz.window_ratio, &config).map_err(|e| e.to_string())?;
            let exact = landau_zener_probability(omega, rate).map_err(|e| e.to_string())?;
            worst = worst.max((numeric - exact).abs());
            lo = lo.min(exact);
            hi = hi.max(exact);
            n += 1;
        }
    }
    out.check(n == 25, format!("{n} grid points"));
    out.check(lo <= 0.02 && hi >= 0.98, format!("grid spans P in [{lo:.4}, {hi:.4}]"));
    out.below("max |P_numeric - exp(-pi Omega^2 / 2v)|", worst, 1e-2);
    Ok(out)
}

fn sample_times(w: Window, n: usize) -> impl Iterator<Item = f64> {
    // deterministic, irrational stride through the window
    (0..n).map(move |k| w.start + w.duration() * ((k as f64 * 0.618_033_988_749_895) % 1.0))
}

fn property_suite(runs: &Runs) -> Result<Outcome, String> {
    let e = |e: scrap_core::ScrapError| e.to_string();
    let mut out = Outcome::new();

    let mut worst_norm: f64 = 0.0;
    for s in [&runs.scrap_not, &runs.readout, &runs.swap] {
        for (name, value) in &s.metrics {
            if name.starts_with("norm_defect") {
                worst_norm = worst_norm.max(*value);
            }
        }
    }
    out.below("max norm defect over scenario trajectories", worst_norm, 1e-8);

    let spectrum = compute_spectrum(&CbjjParams::reference(), 3).map_err(e)?;
    let w = Window::symmetric(300.0).map_err(e)?;
    let dc = PulseSchedule::linear_ramp(0.15, w);
    let mw = PulseSchedule::gaussian(1.25, 50.0, w).map_err(e)?;
    let g = current_coupling_per_na();
    let split = g * (spectrum.delta(1, 1) - spectrum.delta(0, 0));
    let ramp = PulseSchedule::linear_ramp(3.0, w);
    let pair = CoupledPair::new(&spectrum, 0.05, ramp.clone()).map_err(e)?;
    let k_bar = PulseSchedule::constant(pair.constants().omega_bar, w);
    let builders: Vec<(&str, TimeDependentHamiltonian)> = vec![
        ("two-level", scrap_two_level(&mw, &dc).map_err(e)?),
        ("driven qubit", driven_cbjj(&spectrum, DriveTransition::Qubit, &dc, &mw).map_err(e)?),
        ("driven readout", driven_cbjj(&spectrum, DriveTransition::Readout, &dc, &mw).map_err(e)?),
        ("xy two-qubit", xy_two_qubit(&k_bar, &ramp.scaled(split)).map_err(e)?),
        ("pair subspace 1", pair.subspace1()),
        ("pair subspace 2", pair.subspace2()),
        ("pair subspace 3", pair.subspace3()),
    ];
    let mut worst_herm: f64 = 0.0;
    for (_, h) in &builders {
        for t in sample_times(w, 1000) {
            worst_herm = worst_herm.max(hermiticity_defect(&h.evaluate(t)));
        }
    }
    out.below("max Hermiticity defect, 7 builders x 1000 samples", worst_herm, 1e-12);

    let xy = &builders[3].1;
    let short = Window::symmetric(100.0).map_err(e)?;
    let mut worst_invariant: f64 = 0.0;
    for start in [0, 3] {
        let traj = propagate(xy, &basis_state(4, start), short, runs.tol).map_err(e)?;
        for p in &traj.populations {
            worst_invariant = worst_invariant.max((p[start] - 1.0).abs());
        }
    }
    out.below("max |P - 1| for |00> and |11> under the XY Hamiltonian", worst_invariant, runs.tol);

    let sub2 = pair.subspace2();
    let embedded = sub2.embed(labels(&["|00⟩", "|01⟩", "|10⟩", "|11⟩"]), &[1, 2]).map_err(e)?;
    let u2 = propagate_unitary(&sub2, short, runs.tol).map_err(e)?;
    let u4 = propagate_unitary(&embedded, short, runs.tol).map_err(e)?;
    let mut block_gap: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            block_gap = block_gap.max((u2[(i, j)] - u4[(i + 1, j + 1)]).norm());
        }
    }
    out.below("max |U_2x2 - block of embedded U_4x4|", block_gap, 1e-8);

    let mut previous: Option<f64> = None;
    let mut worst_change: f64 = 0.0;
    for grid in [1024, 2048, 4096] {
        let s = compute_spectrum(&CbjjParams::reference().with_grid(grid), 2).map_err(e)?;
        if let Some(prev) = previous {
            worst_change = worst_change.max(((s.omega_10() - prev) / prev).abs());
        }
        previous = Some(s.omega_10());
    }
    out.below("max relative change of omega_10 per grid doubling", worst_change, 5e-4);
    Ok(out)
}

fn readout_transfer(runs: &Runs) -> Result<Outcome, String> {
    let s = &runs.readout;
    let mut out = Outcome::new();
    out.above("P_2 after passage from |1>", metric(s, "p2_from_1")?, 0.99);
    out.above("P_0 after passage from |0>", metric(s, "p0_from_0")?, 0.99);
    Ok(out)
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let runs = match (|| {
        Ok::<_, String>(Runs {
            scrap_not: run(ScenarioKind::ScrapNot, dir.path())?,
            readout: run(ScenarioKind::Readout, dir.path())?,
            swap: run(ScenarioKind::Swap, dir.path())?,
            tol: ScenarioKind::Swap.default_config().integrator.tol,
        })
    })() {
        Ok(runs) => runs,
        Err(err) => {
            println!("FAIL scenario runs: {err}");
            return ExitCode::FAILURE;
        }
    };

    let criteria: [(&str, Criterion); 7] = [
        ("spectrum regression", spectrum_regression),
        ("single-qubit NOT", single_qubit_not),
        ("phase-integral cross-check", phase_integrals),
        ("two-qubit SWAP", two_qubit_swap),
        ("Landau-Zener oracle grid", landau_zener_suite),
        ("property suite", property_suite),
        ("readout transfer", readout_transfer),
    ];
    let mut failures = 0;
    for (n, (name, criterion)) in criteria.iter().enumerate() {
        let outcome = criterion(&runs).unwrap_or_else(|err| Outcome {
            pass: false,
            lines: vec![format!("FAIL error: {err}")],
        });
        println!("[{}] criterion {}: {name}", if outcome.pass { "PASS" } else { "FAIL" }, n + 1);
        for line in &outcome.lines {
            println!("         {line}");
        }
        if !outcome.pass {
            failures += 1;
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
