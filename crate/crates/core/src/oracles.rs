//! Closed-form predictions for emitter dynamics on the cross-stitch lattice.
//!
//! Everything here is lattice-size independent. Bath couplings enter either as
//! the bare emitter coupling `g` or as the channel weight `w`, the squared
//! coupling of the emitter to the dispersive channel: `g²/2` for a small
//! emitter and `2g²` for a giant emitter at φ = 0.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coupling of a small emitter to either band channel.
pub fn small_effective_coupling(g: f64) -> f64 {
    g / SQRT_2
}

/// Coupling of a giant emitter to its selected channel (φ = 0 or φ = π).
pub fn giant_effective_coupling(g: f64) -> f64 {
    SQRT_2 * g
}

pub fn small_channel_weight(g: f64) -> f64 {
    0.5 * g * g
}

pub fn giant_channel_weight(g: f64) -> f64 {
    2.0 * g * g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SmallIntersection,
    GiantDispersive,
    GiantFlat,
    SmallFlatDetuned,
}

/// Markovian decay rate, Rabi frequency and oscillation contrast of one regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRabiPrediction {
    pub gamma: f64,
    pub rabi: f64,
    pub amplitude: f64,
    pub detuning_flat: Option<f64>,
    pub detuning_edge: Option<f64>,
    pub regime: Regime,
}

fn check_velocity(v_g: f64) -> Result<f64> {
    let v = v_g.abs();
    if v == 0.0 || !v.is_finite() {
        return Err(Error::ZeroGroupVelocity);
    }
    Ok(v)
}

impl DecayRabiPrediction {
    /// Small emitter resonant with both bands where they cross.
    pub fn small_intersection(g: f64, v_g: f64) -> Result<Self> {
        let v = check_velocity(v_g)?;
        Ok(Self {
            gamma: g * g / (2.0 * v),
            rabi: SQRT_2 * g,
            amplitude: 1.0,
            detuning_flat: Some(0.0),
            detuning_edge: None,
            regime: Regime::SmallIntersection,
        })
    }

    /// Giant emitter at φ = 0, seeing only the dispersive band.
    pub fn giant_dispersive(g: f64, v_g: f64) -> Result<Self> {
        let v = check_velocity(v_g)?;
        Ok(Self {
            gamma: 4.0 * g * g / v,
            rabi: 0.0,
            amplitude: 0.0,
            detuning_flat: None,
            detuning_edge: None,
            regime: Regime::GiantDispersive,
        })
    }

    /// Giant emitter at φ = π: a closed two-level system with one compact
    /// localized state, coupled with strength `big_g`.
    pub fn giant_flat(big_g: f64, delta_f: f64) -> Self {
        let rabi = (delta_f * delta_f + 4.0 * big_g * big_g).sqrt();
        let amplitude = if rabi > 0.0 { 4.0 * big_g * big_g / (rabi * rabi) } else { 0.0 };
        Self {
            gamma: 0.0,
            rabi,
            amplitude,
            detuning_flat: Some(delta_f),
            detuning_edge: None,
            regime: Regime::GiantFlat,
        }
    }

    /// Small emitter detuned by `delta_f` from the flat band.
    pub fn small_flat_detuned(g: f64, delta_f: f64) -> Self {
        let w = 2.0 * g * g;
        let rabi = (w + delta_f * delta_f).sqrt();
        Self {
            gamma: 0.0,
            rabi,
            amplitude: if rabi > 0.0 { w / (rabi * rabi) } else { 0.0 },
            detuning_flat: Some(delta_f),
            detuning_edge: None,
            regime: Regime::SmallFlatDetuned,
        }
    }

    /// Predicted excited-state population at time `t`.
    pub fn population(&self, t: f64) -> f64 {
        let s = (0.5 * self.rabi * t).sin();
        match self.regime {
            Regime::SmallIntersection => (-self.gamma * t).exp() * (0.5 * self.rabi * t).cos().powi(2),
            Regime::GiantDispersive => (-self.gamma * t).exp(),
            Regime::GiantFlat | Regime::SmallFlatDetuned => 1.0 - self.amplitude * s * s,
        }
    }
}

/// `c_e(t) = e^{−Γt/2} cos(Ωt/2)`, `Γ = g²/(2|v_g|)`, `Ω = √2 g`.
pub fn small_intersection_ce(g: f64, v_g: f64, t: f64) -> Result<Complex64> {
    let p = DecayRabiPrediction::small_intersection(g, v_g)?;
    Ok(Complex64::new((-0.5 * p.gamma * t).exp() * (0.5 * p.rabi * t).cos(), 0.0))
}

/// `c_e(t) = e^{−Γt/2}`, `Γ = 4g²/|v_g|`.
pub fn giant_dispersive_ce(g: f64, v_g: f64, t: f64) -> Result<Complex64> {
    let p = DecayRabiPrediction::giant_dispersive(g, v_g)?;
    Ok(Complex64::new((-0.5 * p.gamma * t).exp(), 0.0))
}

/// `c_e(t) = e^{−iΔ_f t/2} [cos(Ω̃t/2) + i(Δ_f/Ω̃) sin(Ω̃t/2)]`, `Ω̃ = √(Δ_f² + 4G²)`,
/// with `Δ_f = E_f − ω_e`, in the frame rotating at `ω_e`.
pub fn giant_flat_ce(big_g: f64, delta_f: f64, t: f64) -> Complex64 {
    let rabi = (delta_f * delta_f + 4.0 * big_g * big_g).sqrt();
    let half = 0.5 * rabi * t;
    // Δ_f sin(Ω̃t/2)/Ω̃ → Δ_f t/2 as Ω̃ → 0
    let skew = if rabi > 0.0 { delta_f * half.sin() / rabi } else { 0.5 * delta_f * t };
    Complex64::from_polar(1.0, -0.5 * delta_f * t) * Complex64::new(half.cos(), skew)
}

/// `P_e(t) = 1 − A sin²(Ω_f t/2)`, `A = 2g²/(2g²+Δ_f²)`, `Ω_f = √(2g²+Δ_f²)`.
pub fn small_flat_population(g: f64, delta_f: f64, t: f64) -> f64 {
    DecayRabiPrediction::small_flat_detuned(g, delta_f).population(t)
}

fn check_edge(alpha: f64, delta0: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::OutOfDomain(format!("curvature must be positive, got {alpha}")));
    }
    if !delta0.is_finite() {
        return Err(Error::OutOfDomain("band-edge detuning must be finite".into()));
    }
    Ok(())
}

/// Square root of `α(Δ₀ − is)`, failing on the branch cut (the band itself).
fn edge_root(s: Complex64, alpha: f64, delta0: f64) -> Result<Complex64> {
    let z = alpha * (Complex64::new(delta0, 0.0) - Complex64::i() * s);
    if z.re <= 0.0 && z.im.abs() <= 1e-15 * z.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::BranchCut(s));
    }
    Ok(z.sqrt())
}

/// Band-edge self-energy `Σ(s) = w / (2√(−α(Δ₀ − is)))` for an emitter at
/// detuning `Δ₀` below a band edge of curvature `α`.
///
/// The principal root of `−α(Δ₀ − is)` equals `i√(α(Δ₀ − is))` off the cut, so
/// the cut lies exactly on the band: `s = −iν` with `ν ≥ Δ₀`.
pub fn self_energy(s: Complex64, coupling_weight: f64, alpha: f64, delta0: f64) -> Result<Complex64> {
    check_edge(alpha, delta0)?;
    let root = edge_root(s, alpha, delta0)?;
    Ok(coupling_weight / (2.0 * Complex64::i() * root))
}

/// `∂Σ/∂s = wα / (4 (α(Δ₀ − is))^{3/2})`.
pub fn self_energy_derivative(s: Complex64, coupling_weight: f64, alpha: f64, delta0: f64) -> Result<Complex64> {
    check_edge(alpha, delta0)?;
    let root = edge_root(s, alpha, delta0)?;
    Ok(coupling_weight * alpha / (4.0 * root * root * root))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundStatePrediction {
    /// Pole `s₀ = −iν` of the emitter amplitude.
    pub pole: Complex64,
    /// `ν`: bound-state energy relative to the emitter frequency.
    pub bound_shift: f64,
    pub residue: Complex64,
    /// `|Res(s₀)|²`, the long-time emitter population.
    pub steady_population: f64,
    /// `√(α/Δ₀)`, the decay length of the photonic part in cells.
    pub localization_length: f64,
    pub coupling_weight: f64,
}

/// Pole residual `ν + w / (2√(α(Δ₀ − ν)))`, i.e. `i·(s₀ + Σ(s₀))` at `s₀ = −iν`.
fn pole_residual(nu: f64, w: f64, alpha: f64, delta0: f64) -> f64 {
    nu + w / (2.0 * (alpha * (delta0 - nu)).sqrt())
}

/// Solves `s₀ + Σ(s₀) = 0` on the imaginary axis below the band edge and
/// evaluates the residue there.
pub fn bound_state(coupling_weight: f64, alpha: f64, delta0: f64) -> Result<BoundStatePrediction> {
    check_edge(alpha, delta0)?;
    if delta0 <= 0.0 {
        return Err(Error::NoBoundState(format!(
            "emitter must sit below the band edge (Δ₀ = {delta0})"
        )));
    }
    let w = coupling_weight;
    if !(w >= 0.0 && w.is_finite()) {
        return Err(Error::OutOfDomain(format!("coupling weight must be non-negative, got {w}")));
    }

    let nu = if w == 0.0 {
        0.0
    } else {
        let f = |nu: f64| pole_residual(nu, w, alpha, delta0);
        let mut hi = -1e-14;
        let mut lo = -2.0 * alpha;
        if f(hi) <= 0.0 {
            return Err(Error::NoBoundState(format!(
                "no sign change near the emitter frequency (w = {w})"
            )));
        }
        let mut widen = 0;
        while f(lo) >= 0.0 {
            widen += 1;
            if widen > 60 {
                return Err(Error::NoBoundState("pole bracket did not close".into()));
            }
            lo *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // secant polish inside the final bracket
        let (mut a, mut b) = (lo, hi);
        let mut nu = if f(lo).abs() < f(hi).abs() { lo } else { hi };
        for _ in 0..8 {
            let (fa, fb) = (f(a), f(b));
            if fa == fb {
                break;
            }
            let next = b - fb * (b - a) / (fb - fa);
            if !(next >= lo && next <= hi) {
                break;
            }
            a = b;
            b = next;
            if f(next).abs() < f(nu).abs() {
                nu = next;
            }
        }
        nu
    };

    let pole = Complex64::new(0.0, -nu);
    let q = (alpha * (delta0 - nu)).sqrt();
    let d_sigma = w * alpha / (4.0 * q * q * q);
    let residue = Complex64::new(1.0 / (1.0 + d_sigma), 0.0);
    Ok(BoundStatePrediction {
        pole,
        bound_shift: nu,
        residue,
        steady_population: residue.norm_sqr(),
        localization_length: (alpha / delta0).sqrt(),
        coupling_weight: w,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Dispersive,
    Flat,
}

/// Photon-mediated exchange coupling between two identical emitters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleCoupling {
    pub strength: f64,
    /// `2|J_d|`, the population exchange frequency.
    pub exchange_frequency: f64,
    pub channel: Channel,
    pub effective_coupling: f64,
}

/// `J_d = −g_eff² / (2√(Δ₀α)) · e^{−√(Δ₀/α) D}` for emitters `D` cells apart,
/// both `Δ₀` below the dispersive band edge.
pub fn dipole_coupling_dispersive(
    effective_coupling: f64,
    alpha: f64,
    delta0: f64,
    separation: usize,
) -> Result<DipoleCoupling> {
    check_edge(alpha, delta0)?;
    if delta0 <= 0.0 {
        return Err(Error::OutOfDomain(format!(
            "exchange law needs the emitters inside the gap (Δ₀ = {delta0})"
        )));
    }
    let g2 = effective_coupling * effective_coupling;
    let strength = -g2 / (2.0 * (delta0 * alpha).sqrt()) * (-(delta0 / alpha).sqrt() * separation as f64).exp();
    Ok(DipoleCoupling {
        strength,
        exchange_frequency: 2.0 * strength.abs(),
        channel: Channel::Dispersive,
        effective_coupling,
    })
}

/// `J_d = −G²/Δ_f` (`Δ_f = E_f − ω_e`) for co-located emitters, zero otherwise: compact localized
/// states never overlap across cells.
pub fn dipole_coupling_flat(effective_coupling: f64, delta_f: f64, separation: usize) -> Result<DipoleCoupling> {
    if delta_f == 0.0 || !delta_f.is_finite() {
        return Err(Error::OutOfDomain(
            "flat-band exchange law needs a finite, nonzero detuning".into(),
        ));
    }
    let strength = if separation == 0 {
        -effective_coupling * effective_coupling / delta_f
    } else {
        0.0
    };
    Ok(DipoleCoupling {
        strength,
        exchange_frequency: 2.0 * strength.abs(),
        channel: Channel::Flat,
        effective_coupling,
    })
}
