use std::f64::consts::{PI, TAU};

use crossstitch::dense::DenseSpectrum;
use crossstitch::dynamics::profile_from_amplitudes;
use crossstitch::{
    assemble_system, evolve, field_profile, populations, two_emitter_scenario, Boundary, EmitterSpec, EvolveOptions,
    LatticeConfig, SiteIndex,
};

fn grid(horizon: f64, dt: f64) -> Vec<f64> {
    (0..=((horizon / dt).round() as usize)).map(|i| i as f64 * dt).collect()
}

fn snapshots_everywhere(times: &[f64]) -> EvolveOptions {
    EvolveOptions {
        snapshot_times: times.to_vec(),
        ..EvolveOptions::default()
    }
}

/// Largest amplitude error between the propagator and exact diagonalisation.
fn dense_mismatch(lattice: LatticeConfig, emitters: &[EmitterSpec], horizon: f64, dt: f64) -> f64 {
    let sys = assemble_system(&lattice, emitters).unwrap();
    let psi0 = sys.excited_emitter(0).unwrap();
    let times = grid(horizon, dt);
    let traj = evolve(&sys, &psi0, &times, &snapshots_everywhere(&times)).unwrap();
    let dense = DenseSpectrum::new(&sys.matrix);
    traj.snapshots
        .iter()
        .map(|s| {
            let exact = dense.evolve(&psi0.amplitudes, s.time);
            s.amplitudes
                .iter()
                .zip(&exact)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[test]
fn small_lattices_agree_with_dense_propagation() {
    for n in [2, 3, 5, 8] {
        let mid = n / 2;
        let cases: Vec<(LatticeConfig, Vec<EmitterSpec>)> = vec![
            (LatticeConfig::new(n, 1.0, 0.0), vec![EmitterSpec::small(0.0, 0.3, mid)]),
            (LatticeConfig::new(n, 1.0, -2.4), vec![EmitterSpec::small(-1.9, 0.1, mid)]),
            (LatticeConfig::new(n, 1.0, 0.0), vec![EmitterSpec::giant(0.2, 0.1, PI, mid, mid)]),
            (
                LatticeConfig::new(n, -1.0, 1.0).with_boundary(Boundary::Open),
                vec![EmitterSpec::giant(0.5, 0.4, 1.3, 0, n - 1), EmitterSpec::small(-0.3, 0.2, mid)],
            ),
        ];
        for (lat, em) in cases {
            // two step sizes: one sample per sub-step and several sub-steps per sample
            for dt in [0.7, 25.0] {
                let err = dense_mismatch(lat, &em, 200.0, dt);
                assert!(err < 1e-9, "N={n} dt={dt} error {err}");
            }
        }
    }
}

#[test]
fn mid_size_lattice_agrees_with_dense_propagation() {
    let err = dense_mismatch(
        LatticeConfig::new(64, 1.0, -2.4),
        &[EmitterSpec::small(-1.9, 0.1, 32), EmitterSpec::small(-1.9, 0.1, 33)],
        100.0,
        1.0,
    );
    assert!(err < 1e-9, "{err}");
}

#[test]
fn norm_and_energy_are_conserved() {
    let lat = LatticeConfig::new(400, 1.0, -2.4);
    let sys = assemble_system(&lat, &[EmitterSpec::giant(-1.8, 0.05, 0.0, 200, 200)]).unwrap();
    let psi0 = sys.excited_emitter(0).unwrap();
    let traj = evolve(&sys, &psi0, &grid(2000.0, 2.0), &EvolveOptions::tracking_emitters(&sys)).unwrap();
    assert!(traj.max_norm_drift < 1e-10, "{}", traj.max_norm_drift);
    assert!(traj.max_energy_drift < 1e-10, "{}", traj.max_energy_drift);
}

#[test]
fn populations_partition_unity() {
    let lat = LatticeConfig::new(300, 1.0, 0.0);
    let sys = assemble_system(&lat, &[EmitterSpec::small(0.0, 0.3, 150)]).unwrap();
    let psi0 = sys.excited_emitter(0).unwrap();
    let traj = evolve(&sys, &psi0, &grid(60.0, 0.1), &EvolveOptions::tracking_emitters(&sys)).unwrap();
    let pops = populations(&traj, SiteIndex::a(150)).unwrap();
    assert_eq!((pops.p_e[0], pops.p_0[0], pops.p_d[0]), (1.0, 0.0, 0.0));
    for i in 0..traj.times.len() {
        assert!((1.0 - pops.p_e[i] - pops.p_0[i] - pops.p_d[i]).abs() < 1e-10);
    }
}

#[test]
fn distant_boundaries_are_invisible() {
    // the radiated front moves at most 4|J| per unit time: 4·40 = 160 < 250
    let horizon = 40.0;
    let run = |n: usize, boundary: Boundary| {
        let lat = LatticeConfig::new(n, 1.0, 0.0).with_boundary(boundary);
        let sys = assemble_system(&lat, &[EmitterSpec::small(0.0, 0.3, n / 2)]).unwrap();
        let psi0 = sys.excited_emitter(0).unwrap();
        evolve(&sys, &psi0, &grid(horizon, 0.5), &EvolveOptions::default())
            .unwrap()
            .emitter_pops
            .remove(0)
    };
    let base = run(500, Boundary::Periodic);
    for other in [run(1000, Boundary::Periodic), run(500, Boundary::Open)] {
        let diff = base.iter().zip(&other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff}");
    }
}

#[test]
fn full_turn_of_the_giant_phase_changes_nothing() {
    let lat = LatticeConfig::new(120, 1.0, 0.0);
    for phi in [0.0, PI / 2.0, PI, -PI / 2.0] {
        let run = |phase: f64| {
            let sys = assemble_system(&lat, &[EmitterSpec::giant(0.1, 0.2, phase, 60, 61)]).unwrap();
            let psi0 = sys.excited_emitter(0).unwrap();
            evolve(&sys, &psi0, &grid(30.0, 0.5), &EvolveOptions::default()).unwrap()
        };
        let (a, b) = (run(phi), run(phi + TAU));
        assert_eq!(a.emitter_amplitudes, b.emitter_amplitudes, "phi={phi}");
        assert_eq!(a.final_state, b.final_state);
    }
}

#[test]
fn generic_phases_are_covariant_to_round_off() {
    let lat = LatticeConfig::new(120, 1.0, 0.0);
    let run = |phase: f64| {
        let sys = assemble_system(&lat, &[EmitterSpec::giant(0.1, 0.2, phase, 60, 61)]).unwrap();
        let psi0 = sys.excited_emitter(0).unwrap();
        evolve(&sys, &psi0, &grid(30.0, 0.5), &EvolveOptions::default()).unwrap()
    };
    let (a, b) = (run(0.7), run(0.7 + TAU));
    for (x, y) in a.emitter_pops[0].iter().zip(&b.emitter_pops[0]) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn decoupled_emitter_keeps_its_excitation() {
    let lat = LatticeConfig::new(200, 1.0, 0.0);
    let sys = assemble_system(&lat, &[EmitterSpec::small(0.0, 0.0, 100)]).unwrap();
    let psi0 = sys.excited_emitter(0).unwrap();
    let traj = evolve(&sys, &psi0, &grid(500.0, 1.0), &EvolveOptions::default()).unwrap();
    assert!(traj.emitter_pops[0].iter().all(|&p| (p - 1.0).abs() < 1e-12));
}

#[test]
fn symmetric_giant_at_zero_phase_fills_both_legs_equally() {
    let lat = LatticeConfig::new(300, 1.0, 0.0);
    let sys = assemble_system(&lat, &[EmitterSpec::giant(0.0, 0.1, 0.0, 150, 150)]).unwrap();
    let psi0 = sys.excited_emitter(0).unwrap();
    let times = grid(50.0, 1.0);
    let traj = evolve(&sys, &psi0, &times, &EvolveOptions { snapshot_times: vec![25.0, 50.0], ..EvolveOptions::default() }).unwrap();
    for s in &traj.snapshots {
        let p = field_profile(s, 300);
        for x in 0..300 {
            assert!((p.a[x] - p.b[x]).abs() < 1e-8);
        }
        let emitter = s.emitter_amplitude(300, 0).norm_sqr();
        assert!((p.total() + emitter - 1.0).abs() < 1e-10);
    }
}

#[test]
fn giant_at_pi_phase_never_leaves_its_cell() {
    // φ = π addresses only the compact localized state of its own cell
    let lat = LatticeConfig::new(100, 1.0, 0.0);
    let sys = assemble_system(&lat, &[EmitterSpec::giant(0.0, 0.1, PI, 50, 50)]).unwrap();
    let psi0 = sys.excited_emitter(0).unwrap();
    let traj = evolve(&sys, &psi0, &grid(100.0, 0.5), &EvolveOptions::tracking_emitters(&sys)).unwrap();
    for (i, &t) in traj.times.iter().enumerate() {
        let local = traj.cell_pops[0][i];
        assert!((traj.emitter_pops[0][i] + local - 1.0).abs() < 1e-10);
        let g = 2f64.sqrt() * 0.1;
        assert!((traj.emitter_pops[0][i] - (g * t).cos().powi(2)).abs() < 1e-10);
    }
}

#[test]
fn two_emitter_scenario_starts_with_the_first_excited() {
    let lat = LatticeConfig::new(200, 1.0, -2.4);
    let first = EmitterSpec::small(-2.0, 0.3, 100);
    let (sys, psi0) = two_emitter_scenario(&lat, first, first, 3).unwrap();
    assert_eq!(sys.emitters[1].attach_a.cell, 103);
    let times = grid(10.0, 0.5);
    let traj = evolve(&sys, &psi0, &times, &EvolveOptions::tracking_emitters(&sys)).unwrap();
    assert_eq!(traj.tracked_cells, vec![100, 103]);
    assert_eq!(traj.emitter_pops[0][0], 1.0);
    assert_eq!(traj.emitter_pops[1][0], 0.0);
    assert!(traj.emitter_pops[1].last().unwrap() > &0.0);
}

#[test]
fn projection_isolates_a_stationary_state() {
    // projecting at a bound level returns that eigenvector, weighted by its overlap
    let lat = LatticeConfig::new(40, 1.0, -2.4);
    let sys = assemble_system(&lat, &[EmitterSpec::giant(-1.9, 0.2, 0.0, 20, 20)]).unwrap();
    let dense = DenseSpectrum::new(&sys.matrix);
    // the only level between the flat band (−2.4) and the dispersive edge (−1.6)
    let e0 = *dense
        .sorted_eigenvalues()
        .iter()
        .find(|&&e| e > -2.3 && e < -1.6)
        .unwrap();
    let psi0 = sys.excited_emitter(0).unwrap();
    let times = grid(3000.0, 1.0);
    let project = |energy: f64| {
        let opts = EvolveOptions {
            projection: Some(crossstitch::EnergyProjection { energy, window_start: 500.0 }),
            ..EvolveOptions::default()
        };
        let traj = evolve(&sys, &psi0, &times, &opts).unwrap();
        traj.projection.unwrap().amplitudes
    };
    let on = project(e0);
    let off = project(e0 + 0.2);
    let on_weight: f64 = on.iter().map(|c| c.norm_sqr()).sum();
    let off_weight: f64 = off.iter().map(|c| c.norm_sqr()).sum();
    // the bound level is isolated, so the projection keeps only it
    let ce = on[sys.emitter_index(0)].norm_sqr();
    assert!(on_weight > 0.5, "{on_weight}");
    assert!(off_weight < 1e-3 * on_weight, "{off_weight}");
    let profile = profile_from_amplitudes(&on, 40);
    assert!((profile.total() + ce - on_weight).abs() < 1e-12);
}
