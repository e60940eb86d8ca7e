use std::f64::consts::SQRT_2;

use approx::assert_relative_eq;
use crossstitch::dense::DenseSpectrum;
use crossstitch::lattice::k_grid;
use crossstitch::oracles::*;
use crossstitch::{assemble_system, Complex64, CsrMatrix, EmitterSpec, LatticeConfig};
use proptest::prelude::*;

#[test]
fn small_intersection_law() {
    assert_eq!(small_intersection_ce(0.3, 4.0, 0.0).unwrap(), Complex64::new(1.0, 0.0));
    let p = DecayRabiPrediction::small_intersection(0.3, 4.0).unwrap();
    assert_relative_eq!(p.gamma, 0.01125, max_relative = 1e-14);
    assert_relative_eq!(p.rabi, 0.424264, max_relative = 1e-6);
    assert!(matches!(small_intersection_ce(0.3, 0.0, 1.0), Err(crossstitch::Error::ZeroGroupVelocity)));
    for t in [0.0, 3.0, 70.0] {
        let ce = small_intersection_ce(0.3, 4.0, t).unwrap();
        assert_relative_eq!(ce.norm_sqr(), p.population(t), max_relative = 1e-12);
    }
}

#[test]
fn giant_dispersive_rate_is_eight_small_rates() {
    let giant = DecayRabiPrediction::giant_dispersive(0.1, 4.0).unwrap();
    assert_relative_eq!(giant.gamma, 0.01, max_relative = 1e-14);
    let small = DecayRabiPrediction::small_intersection(0.1, 4.0).unwrap();
    assert_relative_eq!(giant.gamma / small.gamma, 8.0, max_relative = 1e-14);
    let ce = giant_dispersive_ce(0.1, -4.0, 100.0).unwrap();
    assert_relative_eq!(ce.norm_sqr(), (-1.0f64).exp(), max_relative = 1e-14);
    assert!(giant_dispersive_ce(0.1, 0.0, 1.0).is_err());
}

#[test]
fn giant_flat_matches_a_two_level_propagation() {
    for (big_g, delta_f) in [(0.1 * SQRT_2, 0.0), (0.07, -0.5), (0.2, 0.3)] {
        // emitter at 0, compact localized state at Δ_f = E_f − ω_e
        let h = CsrMatrix::from_triplets(
            2,
            &[
                (0, 1, Complex64::new(big_g, 0.0)),
                (1, 0, Complex64::new(big_g, 0.0)),
                (1, 1, Complex64::new(delta_f, 0.0)),
            ],
        );
        let dense = DenseSpectrum::new(&h);
        let psi0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        for t in [0.0, 1.3, 17.0, 250.0] {
            let exact = dense.evolve(&psi0, t)[0];
            assert!((giant_flat_ce(big_g, delta_f, t) - exact).norm() < 1e-12, "G={big_g} Δ={delta_f} t={t}");
        }
    }
    let p = DecayRabiPrediction::giant_flat(0.1 * SQRT_2, 0.0);
    assert!((p.rabi - 0.282843).abs() < 1e-6);
    for t in [0.5, 12.0, 90.0] {
        let expect = (0.1 * SQRT_2 * t).cos().powi(2);
        assert_relative_eq!(giant_flat_ce(0.1 * SQRT_2, 0.0, t).norm_sqr(), expect, epsilon = 1e-14);
    }
}

#[test]
fn small_flat_contrast_and_frequency() {
    let p = DecayRabiPrediction::small_flat_detuned(0.1, 0.5);
    assert_relative_eq!(p.amplitude, 0.02 / 0.27, max_relative = 1e-14);
    assert!((p.amplitude - 0.0741).abs() < 1e-4);
    assert_relative_eq!(DecayRabiPrediction::small_flat_detuned(0.1, 0.0).amplitude, 1.0, max_relative = 1e-15);
    let p = DecayRabiPrediction::small_flat_detuned(0.3, 0.4);
    assert_relative_eq!(p.rabi, 0.34f64.sqrt(), max_relative = 1e-14);
    let period = std::f64::consts::TAU / p.rabi;
    assert_relative_eq!(small_flat_population(0.3, 0.4, 0.5 * period), 1.0 - p.amplitude, max_relative = 1e-12);
    assert_eq!(small_flat_population(0.3, 0.4, 0.0), 1.0);
}

#[test]
fn self_energy_examples() {
    let s = self_energy(Complex64::new(0.0, 0.0), 0.005, 2.0, 0.3).unwrap();
    assert!(s.re.abs() < 1e-18);
    assert_relative_eq!(s.im, -0.005 / (2.0 * 0.6f64.sqrt()), max_relative = 1e-14);
    assert!((s.im + 0.0032275).abs() < 1e-7);
    for nu in [-1.0, -0.01, 0.0, 0.1, 0.29] {
        let s = self_energy(Complex64::new(0.0, -nu), 0.005, 2.0, 0.3).unwrap();
        assert!(s.re.abs() < 1e-18);
        assert_relative_eq!(s.im, -0.005 / (2.0 * (2.0 * (0.3 - nu)).sqrt()), max_relative = 1e-13);
    }
    assert!(self_energy(Complex64::new(0.0, -0.31), 0.005, 2.0, 0.3).is_err());
    assert!(self_energy(Complex64::new(0.0, 0.0), 0.005, 0.0, 0.3).is_err());
}

#[test]
fn self_energy_derivative_matches_finite_differences() {
    let h = 1e-6;
    for s in [Complex64::new(0.0, 0.01), Complex64::new(0.02, -0.2), Complex64::new(0.1, 0.5)] {
        let fd = (self_energy(s + h, 0.02, 2.0, 0.3).unwrap() - self_energy(s - h, 0.02, 2.0, 0.3).unwrap()) / (2.0 * h);
        let exact = self_energy_derivative(s, 0.02, 2.0, 0.3).unwrap();
        assert!((fd - exact).norm() < 1e-8 * exact.norm().max(1e-3), "{s}");
    }
}

/// `Σ(s) = Σ_k (w/N) / (s + i(E_d(k) − ω_e))` on an `n`-mode ring with J = 1.
fn k_sum(s: Complex64, w: f64, delta0: f64, n: usize) -> Complex64 {
    let lat = LatticeConfig::new(n, 1.0, -2.4);
    let omega_e = lat.dispersive_minimum().0 - delta0;
    k_grid(n)
        .iter()
        .map(|&k| (w / n as f64) / (s + Complex64::i() * (lat.dispersive_energy(k) - omega_e)))
        .sum()
}

#[test]
fn self_energy_matches_the_discrete_mode_sum() {
    for delta0 in [0.02, 0.05, 0.1] {
        for s in [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.01), Complex64::new(0.005, -0.01)] {
            let cont = self_energy(s, 0.005, 2.0, delta0).unwrap();
            let disc = k_sum(s, 0.005, delta0, 4096);
            assert!((cont - disc).norm() <= 0.01 * cont.norm(), "Δ₀={delta0} s={s}: {cont} vs {disc}");
        }
    }
}

#[test]
fn bound_state_for_the_gap_emitter() {
    let b = bound_state(small_channel_weight(0.1), 2.0, 0.3).unwrap();
    assert!((b.steady_population - 0.989).abs() <= 0.001, "{}", b.steady_population);
    assert!((b.bound_shift + 0.00321).abs() < 1e-5, "{}", b.bound_shift);
    assert_eq!(b.pole.re, 0.0);
    let sigma = self_energy(b.pole, b.coupling_weight, 2.0, 0.3).unwrap();
    assert!((b.pole + sigma).norm() <= 1e-12);
    assert_relative_eq!(1.0 / b.localization_length, 0.15f64.sqrt(), max_relative = 1e-14);
}

#[test]
fn weak_coupling_limit() {
    let mut last = -1.0;
    for w in [1e-3, 1e-5, 1e-7, 1e-9] {
        let b = bound_state(w, 2.0, 0.3).unwrap();
        assert!(b.bound_shift < 0.0 && b.bound_shift > last);
        last = b.bound_shift;
        assert!(b.steady_population < 1.0);
    }
    assert!(1.0 - bound_state(1e-9, 2.0, 0.3).unwrap().steady_population < 1e-8);
}

#[test]
fn strong_coupling_widens_the_bracket() {
    // the pole sits well below −2α here
    let b = bound_state(200.0, 2.0, 0.3).unwrap();
    assert!(b.bound_shift < -4.0);
    let sigma = self_energy(b.pole, 200.0, 2.0, 0.3).unwrap();
    assert!((b.pole + sigma).norm() <= 1e-12);
}

proptest! {
    #[test]
    fn residue_falls_with_coupling(delta0 in 0.01f64..2.0, w in 1e-6f64..0.5, factor in 1.01f64..5.0) {
        let a = bound_state(w, 2.0, delta0).unwrap();
        let b = bound_state(w * factor, 2.0, delta0).unwrap();
        prop_assert!(a.steady_population > 0.0 && a.steady_population <= 1.0);
        prop_assert!(b.steady_population < a.steady_population);
        let sigma = self_energy(a.pole, w, 2.0, delta0).unwrap();
        prop_assert!((a.pole + sigma).norm() <= 1e-12);
    }
}

#[test]
fn bound_level_matches_exact_diagonalisation() {
    // giant emitter at φ = 0 just below the band edge; the edge is near-quadratic here
    let lat = LatticeConfig::new(300, 1.0, -2.4);
    let (g, delta0) = (0.05, 0.05);
    let omega_e = lat.dispersive_minimum().0 - delta0;
    let sys = assemble_system(&lat, &[EmitterSpec::giant(omega_e, g, 0.0, 150, 150)]).unwrap();
    let levels = DenseSpectrum::new(&sys.matrix).sorted_eigenvalues();
    let bound = levels.iter().copied().find(|&e| e > -2.35 && e < -1.6).unwrap();
    let b = bound_state(giant_channel_weight(g), 2.0, delta0).unwrap();
    assert_relative_eq!(bound - omega_e, b.bound_shift, max_relative = 0.02);
}

#[test]
fn dispersive_exchange_examples() {
    let small = dipole_coupling_dispersive(small_effective_coupling(0.3), 2.0, 0.4, 1).unwrap();
    assert!((small.strength + 0.01608).abs() < 1e-5, "{}", small.strength);
    assert!((small.exchange_frequency - 0.0322).abs() < 1e-4);
    let giant = dipole_coupling_dispersive(giant_effective_coupling(0.05), 2.0, 0.2, 6).unwrap();
    assert!((giant.strength + 5.93e-4).abs() < 1e-6, "{}", giant.strength);
    assert_eq!(giant.channel, Channel::Dispersive);

    let mut last = f64::INFINITY;
    for d in 0..200 {
        let j = dipole_coupling_dispersive(0.1, 2.0, 0.2, d).unwrap().strength.abs();
        assert!(j < last);
        last = j;
    }
    assert!(last < 1e-20);
    assert!(dipole_coupling_dispersive(0.1, 2.0, 0.0, 1).is_err());
    assert!(dipole_coupling_dispersive(0.1, 2.0, -0.2, 1).is_err());
}

#[test]
fn flat_exchange_examples() {
    let big_g = giant_effective_coupling(0.05);
    let on = dipole_coupling_flat(big_g, -0.5, 0).unwrap();
    assert_relative_eq!(on.strength, 0.01, max_relative = 1e-12);
    assert_relative_eq!(on.exchange_frequency, 0.02, max_relative = 1e-12);
    assert_eq!(dipole_coupling_flat(big_g, 0.5, 0).unwrap().strength, -on.strength);
    for d in 1..6 {
        assert_eq!(dipole_coupling_flat(big_g, -0.5, d).unwrap().strength, 0.0);
    }
    assert!(dipole_coupling_flat(big_g, 0.0, 0).is_err());
}
