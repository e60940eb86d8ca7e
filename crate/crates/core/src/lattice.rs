//! Cross-stitch lattice: real-space Hamiltonian, band structure and the
//! sublattice (A/B) ↔ flat/dispersive (F/D) basis change.
//!
//! Each unit cell holds one A and one B site. Intra-cell hopping `t` links
//! `a_x` and `b_x`; inter-cell hopping `J` links every site of cell `x` to every
//! site of cell `x+1`. In momentum space the two sublattices decouple into
//!
//! ```text
//! E_f(k)  = t                     flat band, (a_k − b_k)/√2
//! E_d(k)  = −4 J cos k − t        dispersive band, (a_k + b_k)/√2
//! ```
//!
//! on top of the common on-site energy.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sublattice {
    A,
    B,
}

impl Sublattice {
    pub fn label(self) -> char {
        match self {
            Sublattice::A => 'a',
            Sublattice::B => 'b',
        }
    }
}

/// A lattice site: unit cell plus sublattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiteIndex {
    pub cell: usize,
    pub sublattice: Sublattice,
}

impl SiteIndex {
    pub fn a(cell: usize) -> Self {
        Self {
            cell,
            sublattice: Sublattice::A,
        }
    }

    pub fn b(cell: usize) -> Self {
        Self {
            cell,
            sublattice: Sublattice::B,
        }
    }

    /// Position in the lattice basis: A sites first, then B sites.
    pub fn basis_index(self, n_cells: usize) -> usize {
        match self.sublattice {
            Sublattice::A => self.cell,
            Sublattice::B => n_cells + self.cell,
        }
    }

    pub fn check(self, n_cells: usize) -> Result<Self> {
        if self.cell < n_cells {
            Ok(self)
        } else {
            Err(Error::SiteOutOfRange {
                cell: self.cell,
                sublattice: self.sublattice.label(),
                n_cells,
            })
        }
    }
}

/// Bath parameters. Energies are in units where the unit-cell length is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub n_cells: usize,
    /// Inter-cell hopping `J`.
    pub inter_hop: f64,
    /// Intra-cell hopping `t`.
    pub intra_hop: f64,
    /// Common mode frequency; 0 in the emitter rotating frame.
    #[serde(default)]
    pub onsite: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl LatticeConfig {
    pub fn new(n_cells: usize, inter_hop: f64, intra_hop: f64) -> Self {
        Self {
            n_cells,
            inter_hop,
            intra_hop,
            onsite: 0.0,
            boundary: Boundary::Periodic,
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_cells < 2 {
            return Err(Error::TooFewCells(self.n_cells));
        }
        for (name, v) in [
            ("inter_hop", self.inter_hop),
            ("intra_hop", self.intra_hop),
            ("onsite", self.onsite),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Flat-band energy `E_f = ω₀ + t`.
    pub fn flat_energy(&self) -> f64 {
        self.onsite + self.intra_hop
    }

    /// Dispersive-band energy `E_d(k) = ω₀ − 4J cos k − t`.
    pub fn dispersive_energy(&self, k: f64) -> f64 {
        self.onsite - 4.0 * self.inter_hop * k.cos() - self.intra_hop
    }

    /// Bottom of the dispersive band and the wavenumber where it sits.
    pub fn dispersive_minimum(&self) -> (f64, f64) {
        let k_min = if self.inter_hop < 0.0 { PI } else { 0.0 };
        (self.dispersive_energy(k_min), k_min)
    }

    /// Top of the dispersive band.
    pub fn dispersive_maximum(&self) -> f64 {
        self.onsite + 4.0 * self.inter_hop.abs() - self.intra_hop
    }

    /// Half the second derivative of `E_d` at its minimum, `2|J|`.
    pub fn band_edge_curvature(&self) -> f64 {
        2.0 * self.inter_hop.abs()
    }

    /// A gap separates the flat band from the dispersive band iff `|t| > 2|J|`.
    pub fn gap_present(&self) -> bool {
        self.intra_hop.abs() > 2.0 * self.inter_hop.abs()
    }

    /// Lattice wavenumbers `2πn/N`, `n ∈ (−N/2, N/2]`, ascending.
    pub fn k_grid(&self) -> Vec<f64> {
        k_grid(self.n_cells)
    }
}

/// `k = 2πn/n_k` for `n ∈ (−n_k/2, n_k/2]`, ascending.
pub fn k_grid(n_k: usize) -> Vec<f64> {
    let n = n_k as i64;
    let lo = -((n - 1) / 2);
    let hi = n / 2;
    (lo..=hi)
        .map(|m| 2.0 * PI * m as f64 / n_k as f64)
        .collect()
}

/// Real-space lattice Hamiltonian of dimension `2N` (A sites, then B sites).
///
/// Periodic boundaries add the wrap-around hoppings between cells `N−1` and `0`.
/// Entries accumulate, so at `N = 2` the two inter-cell paths fold onto one element.
pub fn build_lattice_hamiltonian(config: &LatticeConfig) -> Result<CsrMatrix> {
    config.validate()?;
    let n = config.n_cells;
    Ok(CsrMatrix::from_triplets(2 * n, &lattice_triplets(config)))
}

pub(crate) fn lattice_triplets(config: &LatticeConfig) -> Vec<(usize, usize, Complex64)> {
    let n = config.n_cells;
    let t = Complex64::new(-config.intra_hop, 0.0);
    let j = Complex64::new(-config.inter_hop, 0.0);
    let w0 = Complex64::new(config.onsite, 0.0);
    let mut trip = Vec::with_capacity(14 * n);

    for x in 0..n {
        let (ax, bx) = (x, n + x);
        trip.push((ax, ax, w0));
        trip.push((bx, bx, w0));
        trip.push((ax, bx, t));
        trip.push((bx, ax, t));

        let next = x + 1;
        if next == n && config.boundary == Boundary::Open {
            continue;
        }
        let y = next % n;
        for p in [x, n + x] {
            for q in [y, n + y] {
                trip.push((p, q, j));
                trip.push((q, p, j));
            }
        }
    }
    trip
}

/// Analytic band structure sampled on a k-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BandStructure {
    pub k_grid: Vec<f64>,
    pub flat_energy: f64,
    pub flat_branch: Vec<f64>,
    pub dispersive_energies: Vec<f64>,
    pub gap_present: bool,
    pub band_edge_min: f64,
    pub band_edge_k: f64,
    pub curvature: f64,
}

pub fn band_structure(config: &LatticeConfig, n_k: usize) -> Result<BandStructure> {
    if n_k < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 k-points, got {n_k}")));
    }
    let k_grid = k_grid(n_k);
    let flat_energy = config.flat_energy();
    let dispersive_energies = k_grid.iter().map(|&k| config.dispersive_energy(k)).collect();
    let (band_edge_min, band_edge_k) = config.dispersive_minimum();
    Ok(BandStructure {
        flat_branch: vec![flat_energy; k_grid.len()],
        k_grid,
        flat_energy,
        dispersive_energies,
        gap_present: config.gap_present(),
        band_edge_min,
        band_edge_k,
        curvature: config.band_edge_curvature(),
    })
}

/// Slope of the dispersive band, `dE_d/dk = 4J sin k`.
pub fn group_velocity(config: &LatticeConfig, k: f64) -> f64 {
    4.0 * config.inter_hop * k.sin()
}

/// Wavenumber in `[0, π]` where the dispersive band is resonant with `omega_e`,
/// or `None` when `omega_e` lies outside the band.
pub fn resonant_k(config: &LatticeConfig, omega_e: f64) -> Option<f64> {
    if config.inter_hop == 0.0 {
        return None;
    }
    let cos_k = -(omega_e - config.onsite + config.intra_hop) / (4.0 * config.inter_hop);
    if !(-1.0..=1.0).contains(&cos_k) {
        return None;
    }
    Some(cos_k.acos())
}

/// Single-cell change of basis: `c_f = (a − b)/√2`, `c_d = (a + b)/√2`.
pub fn ab_to_fd(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    ((a - b) * FRAC_1_SQRT_2, (a + b) * FRAC_1_SQRT_2)
}

/// Inverse of [`ab_to_fd`].
pub fn fd_to_ab(f: Complex64, d: Complex64) -> (Complex64, Complex64) {
    ((d + f) * FRAC_1_SQRT_2, (d - f) * FRAC_1_SQRT_2)
}

/// Per-cell flat/dispersive amplitudes of a lattice field.
#[derive(Debug, Clone, PartialEq)]
pub struct FdBasisAmplitudes {
    pub flat: Vec<Complex64>,
    pub dispersive: Vec<Complex64>,
}

impl FdBasisAmplitudes {
    pub fn from_sublattices(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidArgument(format!(
                "sublattice lengths differ: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        let (flat, dispersive) = a.iter().zip(b).map(|(&x, &y)| ab_to_fd(x, y)).unzip();
        Ok(Self { flat, dispersive })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.flat
            .iter()
            .chain(&self.dispersive)
            .map(|c| c.norm_sqr())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn two_cell_periodic_folds_parallel_paths() {
        let h = build_lattice_hamiltonian(&LatticeConfig::new(2, 1.0, 0.5)).unwrap();
        // H_A
        assert_eq!(h.get(0, 1), c(-2.0));
        assert_eq!(h.get(1, 0), c(-2.0));
        assert_eq!(h.get(0, 0), c(0.0));
        // H_B
        assert_eq!(h.get(2, 3), c(-2.0));
        // H_AB: −t on the diagonal, −2J off it
        assert_eq!(h.get(0, 2), c(-0.5));
        assert_eq!(h.get(1, 3), c(-0.5));
        assert_eq!(h.get(0, 3), c(-2.0));
        assert_eq!(h.get(1, 2), c(-2.0));
    }

    #[test]
    fn four_cell_sublattice_block_has_corner_terms() {
        let h = build_lattice_hamiltonian(&LatticeConfig::new(4, 1.0, 0.0)).unwrap();
        for (r, col) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
            assert_eq!(h.get(r, col), c(-1.0), "H_A({r},{col})");
        }
        assert_eq!(h.get(0, 2), c(0.0));
        // t = 0 leaves no intra-cell entries
        assert_eq!(h.get(0, 4), c(0.0));
    }

    #[test]
    fn open_boundary_drops_wraparound() {
        let cfg = LatticeConfig::new(4, 1.0, 0.3).with_boundary(Boundary::Open);
        let h = build_lattice_hamiltonian(&cfg).unwrap();
        assert_eq!(h.get(0, 3), c(0.0));
        assert_eq!(h.get(0, 7), c(0.0));
        assert_eq!(h.get(0, 1), c(-1.0));
    }

    #[test]
    fn rejects_single_cell() {
        assert_eq!(
            build_lattice_hamiltonian(&LatticeConfig::new(1, 1.0, 0.0)),
            Err(Error::TooFewCells(1))
        );
    }

    #[test]
    fn hermitian_at_production_size() {
        let h = build_lattice_hamiltonian(&LatticeConfig::new(1500, 1.0, 2.4)).unwrap();
        assert_eq!(h.hermitian_residual(), 0.0);
        assert_eq!(h.dim(), 3000);
    }

    #[test]
    fn band_values_at_k0() {
        let cfg = LatticeConfig::new(8, -1.0, 1.0);
        assert_eq!(cfg.flat_energy(), 1.0);
        assert_eq!(cfg.dispersive_energy(0.0), 3.0);
        let bands = band_structure(&cfg, 16).unwrap();
        assert_eq!(bands.band_edge_k, PI);
        assert_abs_diff_eq!(bands.band_edge_min, -5.0);
        assert!(!bands.gap_present);
    }

    #[test]
    fn gap_opens_beyond_twice_inter_hop() {
        assert!(LatticeConfig::new(8, 1.0, 2.4).gap_present());
        assert!(LatticeConfig::new(8, 1.0, -2.4).gap_present());
        assert!(!LatticeConfig::new(8, 1.0, 2.0).gap_present());
    }

    #[test]
    fn k_grid_matches_lattice_quantisation() {
        let k = k_grid(4);
        assert_eq!(k.len(), 4);
        assert_abs_diff_eq!(k[0], -PI / 2.0);
        assert_abs_diff_eq!(k[3], PI);
        assert_eq!(k_grid(5).len(), 5);
        assert!(k_grid(5).iter().all(|&x| x > -PI && x <= PI));
    }

    #[test]
    fn band_structure_rejects_single_k() {
        assert!(band_structure(&LatticeConfig::new(8, 1.0, 0.0), 1).is_err());
    }

    #[test]
    fn group_velocity_values() {
        let cfg = LatticeConfig::new(8, 1.0, 0.0);
        assert_abs_diff_eq!(group_velocity(&cfg, PI / 2.0).abs(), 4.0);
        assert_eq!(group_velocity(&cfg, 0.0), 0.0);
    }

    #[test]
    fn resonant_k_cases() {
        let cfg = LatticeConfig::new(8, 1.0, 0.0);
        assert_abs_diff_eq!(resonant_k(&cfg, 0.0).unwrap(), PI / 2.0, epsilon = 1e-15);
        let gapped = LatticeConfig::new(8, 1.0, -2.4);
        // dispersive band spans [-1.6, 6.4]; -1.9 sits in the gap
        assert_eq!(resonant_k(&gapped, -1.9), None);
    }

    #[test]
    fn fd_transform_channels() {
        let s = FRAC_1_SQRT_2;
        let (f, d) = ab_to_fd(c(1.0), c(0.0));
        assert_abs_diff_eq!(f.re, s);
        assert_abs_diff_eq!(d.re, s);
        let (f, d) = ab_to_fd(c(s), c(s));
        assert_abs_diff_eq!(f.norm(), 0.0);
        assert_abs_diff_eq!(d.re, 1.0, epsilon = 1e-15);
        let (f, d) = ab_to_fd(c(s), c(-s));
        assert_abs_diff_eq!(f.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.norm(), 0.0);
    }

    #[test]
    fn fd_amplitudes_length_mismatch() {
        assert!(FdBasisAmplitudes::from_sublattices(&[c(1.0)], &[]).is_err());
    }
}
