//! Emitters attached to the lattice and the full single-excitation Hamiltonian.
//!
//! Basis ordering: A sites `0..N`, B sites `N..2N`, emitters `2N..2N+Q`.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{lattice_triplets, LatticeConfig, SiteIndex, Sublattice};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmitterKind {
    Small,
    Giant,
}

/// A two-level emitter. Small emitters couple to one A site; giant emitters
/// couple with `g` to an A site and with `g·e^{iφ}` to a B site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterSpec {
    pub kind: EmitterKind,
    pub frequency: f64,
    pub coupling: f64,
    pub phase: f64,
    pub attach_a: SiteIndex,
    pub attach_b: Option<SiteIndex>,
}

impl EmitterSpec {
    pub fn small(frequency: f64, coupling: f64, cell: usize) -> Self {
        Self {
            kind: EmitterKind::Small,
            frequency,
            coupling,
            phase: 0.0,
            attach_a: SiteIndex::a(cell),
            attach_b: None,
        }
    }

    pub fn giant(frequency: f64, coupling: f64, phase: f64, cell_a: usize, cell_b: usize) -> Self {
        Self {
            kind: EmitterKind::Giant,
            frequency,
            coupling,
            phase,
            attach_a: SiteIndex::a(cell_a),
            attach_b: Some(SiteIndex::b(cell_b)),
        }
    }

    /// Same emitter moved by `shift` cells (both legs).
    pub fn shifted(mut self, shift: usize) -> Self {
        self.attach_a.cell += shift;
        if let Some(b) = self.attach_b.as_mut() {
            b.cell += shift;
        }
        self
    }

    pub fn validate(&self, n_cells: usize) -> Result<()> {
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return Err(Error::InvalidEmitter(format!(
                "coupling must be finite and non-negative, got {}",
                self.coupling
            )));
        }
        if !self.frequency.is_finite() || !self.phase.is_finite() {
            return Err(Error::InvalidEmitter("frequency and phase must be finite".into()));
        }
        if self.attach_a.sublattice != Sublattice::A {
            return Err(Error::InvalidEmitter("first leg must sit on sublattice A".into()));
        }
        self.attach_a.check(n_cells)?;
        match (self.kind, self.attach_b) {
            (EmitterKind::Small, None) => Ok(()),
            (EmitterKind::Small, Some(_)) => Err(Error::InvalidEmitter(
                "small emitter has exactly one attachment".into(),
            )),
            (EmitterKind::Giant, None) => Err(Error::InvalidEmitter(
                "giant emitter needs an A and a B attachment".into(),
            )),
            (EmitterKind::Giant, Some(b)) => {
                if b.sublattice != Sublattice::B {
                    return Err(Error::InvalidEmitter("second leg must sit on sublattice B".into()));
                }
                b.check(n_cells).map(|_| ())
            }
        }
    }

    /// `e^{iφ}` with φ reduced modulo 2π. Quarter-turn phases map to exact
    /// `±1, ±i`, so φ and φ+2π give bit-identical matrices there.
    pub fn phase_factor(&self) -> Complex64 {
        let reduced = self.phase - TAU * (self.phase / TAU).round();
        let quarter = reduced / FRAC_PI_2;
        if (quarter - quarter.round()).abs() < 1e-12 {
            return match quarter.round() as i64 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                -1 => Complex64::new(0.0, -1.0),
                _ => Complex64::new(-1.0, 0.0),
            };
        }
        Complex64::from_polar(1.0, reduced)
    }
}

/// Sparse Hermitian Hamiltonian over lattice sites plus emitters.
#[derive(Debug, Clone)]
pub struct SystemHamiltonian {
    pub lattice: LatticeConfig,
    pub emitters: Vec<EmitterSpec>,
    pub matrix: CsrMatrix,
}

impl SystemHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn n_cells(&self) -> usize {
        self.lattice.n_cells
    }

    pub fn n_emitters(&self) -> usize {
        self.emitters.len()
    }

    pub fn site_index(&self, site: SiteIndex) -> usize {
        site.basis_index(self.lattice.n_cells)
    }

    pub fn emitter_index(&self, q: usize) -> usize {
        2 * self.lattice.n_cells + q
    }

    /// State with emitter `q` excited and the lattice empty.
    pub fn excited_emitter(&self, q: usize) -> Result<SystemState> {
        if q >= self.n_emitters() {
            return Err(Error::InvalidState(format!(
                "emitter {q} does not exist (Q={})",
                self.n_emitters()
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim()];
        amps[self.emitter_index(q)] = Complex64::new(1.0, 0.0);
        Ok(SystemState {
            amplitudes: amps,
            time: 0.0,
        })
    }

    /// State with one lattice site excited.
    pub fn excited_site(&self, site: SiteIndex) -> Result<SystemState> {
        site.check(self.n_cells())?;
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim()];
        amps[self.site_index(site)] = Complex64::new(1.0, 0.0);
        Ok(SystemState {
            amplitudes: amps,
            time: 0.0,
        })
    }
}

/// Builds the `(2N+Q)`-dimensional Hamiltonian: lattice block, emitter
/// frequencies on the diagonal and the emitter–site couplings.
pub fn assemble_system(lattice: &LatticeConfig, emitters: &[EmitterSpec]) -> Result<SystemHamiltonian> {
    lattice.validate()?;
    if emitters.is_empty() {
        return Err(Error::NoEmitters);
    }
    let n = lattice.n_cells;
    for e in emitters {
        e.validate(n)?;
    }

    let mut trip = lattice_triplets(lattice);
    for (q, e) in emitters.iter().enumerate() {
        let row = 2 * n + q;
        trip.push((row, row, Complex64::new(e.frequency, 0.0)));

        let g = Complex64::new(e.coupling, 0.0);
        let a = e.attach_a.basis_index(n);
        trip.push((a, row, g));
        trip.push((row, a, g));

        if let Some(b_site) = e.attach_b {
            let gb = g * e.phase_factor();
            let b = b_site.basis_index(n);
            trip.push((b, row, gb));
            trip.push((row, b, gb.conj()));
        }
    }

    Ok(SystemHamiltonian {
        lattice: *lattice,
        emitters: emitters.to_vec(),
        matrix: CsrMatrix::from_triplets(2 * n + emitters.len(), &trip),
    })
}

/// Two emitters `separation` cells apart; `first` fixes the left position,
/// `second` is placed relative to it. Starts with emitter 1 excited.
pub fn two_emitter_scenario(
    lattice: &LatticeConfig,
    first: EmitterSpec,
    second: EmitterSpec,
    separation: usize,
) -> Result<(SystemHamiltonian, SystemState)> {
    let mut second = second;
    second.attach_a.cell = first.attach_a.cell + separation;
    if let Some(b) = second.attach_b.as_mut() {
        let leg = first
            .attach_b
            .map(|fb| fb.cell as i64 - first.attach_a.cell as i64)
            .unwrap_or(0);
        let cell = second.attach_a.cell as i64 + leg;
        if cell < 0 {
            return Err(Error::InvalidEmitter("second emitter leg falls before cell 0".into()));
        }
        b.cell = cell as usize;
    }
    let system = assemble_system(lattice, &[first, second])?;
    let initial = system.excited_emitter(0)?;
    Ok((system, initial))
}

/// Amplitudes over the full single-excitation basis at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub amplitudes: Vec<Complex64>,
    pub time: f64,
}

impl SystemState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn emitter_amplitude(&self, n_cells: usize, q: usize) -> Complex64 {
        self.amplitudes[2 * n_cells + q]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn small_emitter_couples_once() {
        let lat = LatticeConfig::new(1500, 1.0, 0.0);
        let sys = assemble_system(&lat, &[EmitterSpec::small(0.0, 0.3, 750)]).unwrap();
        let e = sys.emitter_index(0);
        let off: Vec<_> = sys.matrix.row(e).filter(|&(c, _)| c != e).collect();
        assert_eq!(off.len(), 1);
        assert_eq!(off[0], (750, Complex64::new(0.3, 0.0)));
        let col: Vec<_> = (0..sys.dim())
            .filter(|&r| r != e && sys.matrix.get(r, e).norm() > 0.0)
            .collect();
        assert_eq!(col, vec![750]);
        assert_eq!(sys.dim(), 3001);
    }

    #[test]
    fn giant_phase_pi_flips_b_leg() {
        let lat = LatticeConfig::new(16, 1.0, 0.0);
        let sys = assemble_system(&lat, &[EmitterSpec::giant(0.0, 0.1, PI, 8, 8)]).unwrap();
        let e = sys.emitter_index(0);
        assert_eq!(sys.matrix.get(16 + 8, e), Complex64::new(-0.1, 0.0));
        assert_eq!(sys.matrix.get(8, e), Complex64::new(0.1, 0.0));
    }

    #[test]
    fn phase_factor_is_periodic_at_quarter_turns() {
        for k in 0..4 {
            let phi = k as f64 * FRAC_PI_2;
            let a = EmitterSpec::giant(0.0, 1.0, phi, 0, 0).phase_factor();
            let b = EmitterSpec::giant(0.0, 1.0, phi + TAU, 0, 0).phase_factor();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn out_of_range_attachment_is_rejected() {
        let lat = LatticeConfig::new(8, 1.0, 0.0);
        let err = assemble_system(&lat, &[EmitterSpec::small(0.0, 0.1, 8)]).unwrap_err();
        assert!(matches!(err, Error::SiteOutOfRange { cell: 8, .. }));
        assert!(two_emitter_scenario(
            &lat,
            EmitterSpec::small(0.0, 0.1, 4),
            EmitterSpec::small(0.0, 0.1, 0),
            4
        )
        .is_err());
    }

    #[test]
    fn negative_coupling_is_rejected() {
        let lat = LatticeConfig::new(8, 1.0, 0.0);
        assert!(assemble_system(&lat, &[EmitterSpec::small(0.0, -0.1, 2)]).is_err());
        assert_eq!(assemble_system(&lat, &[]).unwrap_err(), Error::NoEmitters);
    }

    #[test]
    fn colocated_giants_share_coupling_columns() {
        let lat = LatticeConfig::new(16, 1.0, -2.4);
        let g = EmitterSpec::giant(-1.9, 0.05, PI, 8, 8);
        let (sys, psi0) = two_emitter_scenario(&lat, g, g, 0).unwrap();
        let (e1, e2) = (sys.emitter_index(0), sys.emitter_index(1));
        for r in 0..32 {
            assert_eq!(sys.matrix.get(r, e1), sys.matrix.get(r, e2));
        }
        assert_eq!(psi0.amplitudes[e1], Complex64::new(1.0, 0.0));
        assert_eq!(sys.matrix.hermitian_residual(), 0.0);
    }
}
