//! Single-excitation dynamics of small and giant two-level emitters coupled to
//! a cross-stitch lattice, together with the closed-form predictions and
//! spectral tools used to check them.
//!
//! The lattice has one flat band at `E_f = t` and one dispersive band
//! `E_d(k) = −4J cos k − t`. A giant emitter touching both sites of a cell
//! with relative phase φ couples only to the dispersive band at φ = 0 and only
//! to the flat band at φ = π.

pub mod chebyshev;
pub mod dense;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod oracles;
pub mod sparse;
pub mod spectral;
pub mod system;

pub use dynamics::{evolve, field_profile, populations, EnergyProjection, EvolveOptions, FieldProfile, Populations, Trajectory};
pub use error::{Error, Result};
pub use lattice::{band_structure, build_lattice_hamiltonian, group_velocity, resonant_k, BandStructure, Boundary, LatticeConfig, SiteIndex, Sublattice};
pub use num_complex::Complex64;
pub use sparse::CsrMatrix;
pub use system::{assemble_system, two_emitter_scenario, EmitterKind, EmitterSpec, SystemHamiltonian, SystemState};
