//! Time evolution in the single-excitation sector and the observables drawn
//! from it: emitter populations, coupling-cell and lattice populations, field
//! snapshots and energy-resolved field projections.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::chebyshev::ChebyshevPropagator;
use crate::error::{Error, Result};
use crate::lattice::SiteIndex;
use crate::system::{SystemHamiltonian, SystemState};

/// Largest tolerated `|‖ψ(t)‖ − 1|` before propagation aborts.
pub const NORM_TOLERANCE: f64 = 1e-8;

/// Hann-weighted projection of the field onto one energy,
/// `Σ_t w(t) ψ(t) e^{iEt} / Σ_t w(t)`, over samples with `t ≥ window_start`.
///
/// Components at energies further than a few `2π/(T − window_start)` from `E`
/// average out, which isolates a bound state from the radiated continuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyProjection {
    pub energy: f64,
    pub window_start: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    /// Cells whose population `|c_a|² + |c_b|²` is recorded at every sample.
    pub tracked_cells: Vec<usize>,
    /// Sample times at which the full state is kept.
    pub snapshot_times: Vec<f64>,
    pub projection: Option<EnergyProjection>,
    pub norm_tolerance: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            tracked_cells: Vec::new(),
            snapshot_times: Vec::new(),
            projection: None,
            norm_tolerance: NORM_TOLERANCE,
        }
    }
}

impl EvolveOptions {
    /// Tracks the A-leg cell of every emitter.
    pub fn tracking_emitters(system: &SystemHamiltonian) -> Self {
        let mut cells: Vec<usize> = system.emitters.iter().map(|e| e.attach_a.cell).collect();
        cells.dedup();
        Self {
            tracked_cells: cells,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedField {
    pub energy: f64,
    pub window_start: f64,
    pub amplitudes: Vec<Complex64>,
}

/// Sampled observables of one propagation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub n_cells: usize,
    pub times: Vec<f64>,
    /// `c_e(t)` per emitter.
    pub emitter_amplitudes: Vec<Vec<Complex64>>,
    /// `|c_e(t)|²` per emitter.
    pub emitter_pops: Vec<Vec<f64>>,
    /// Total photon population `Σ_x |c_{x,a}|² + |c_{x,b}|²`.
    pub lattice_pop: Vec<f64>,
    pub tracked_cells: Vec<usize>,
    /// Per tracked cell, `|c_{x,a}|² + |c_{x,b}|²` at every sample.
    pub cell_pops: Vec<Vec<f64>>,
    pub snapshots: Vec<SystemState>,
    pub projection: Option<ProjectedField>,
    pub initial_energy: f64,
    pub max_norm_drift: f64,
    /// `max_t |⟨H⟩(t) − ⟨H⟩(0)| / max(|⟨H⟩(0)|, 1)`.
    pub max_energy_drift: f64,
    pub final_state: SystemState,
}

impl Trajectory {
    pub fn total_emitter_pop(&self) -> Vec<f64> {
        (0..self.times.len())
            .map(|i| self.emitter_pops.iter().map(|p| p[i]).sum())
            .collect()
    }

    pub fn snapshot_at(&self, time: f64) -> Option<&SystemState> {
        self.snapshots.iter().find(|s| same_time(s.time, time))
    }
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

fn check_grid(times: &[f64]) -> Result<()> {
    match times.first() {
        None => return Err(Error::InvalidTimeGrid("empty time grid".into())),
        Some(&t0) if t0 != 0.0 => {
            return Err(Error::InvalidTimeGrid(format!("grid must start at 0, starts at {t0}")))
        }
        _ => {}
    }
    if let Some(w) = times.windows(2).find(|w| w[1] <= w[0] || !w[1].is_finite()) {
        return Err(Error::InvalidTimeGrid(format!(
            "times must increase strictly ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Propagates `initial` under `system` and samples the observables at `times`.
///
/// Steps between samples use a Chebyshev expansion of the exact exponential.
/// The run aborts with [`Error::NormDrift`] when `|‖ψ‖ − 1|` exceeds the tolerance.
pub fn evolve(
    system: &SystemHamiltonian,
    initial: &SystemState,
    times: &[f64],
    options: &EvolveOptions,
) -> Result<Trajectory> {
    check_grid(times)?;
    let n = system.n_cells();
    let dim = system.dim();
    if initial.amplitudes.len() != dim {
        return Err(Error::InvalidState(format!(
            "state has {} amplitudes, system dimension is {dim}",
            initial.amplitudes.len()
        )));
    }
    if (initial.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidState(format!("initial norm {} is not 1", initial.norm())));
    }
    for &cell in &options.tracked_cells {
        SiteIndex::a(cell).check(n)?;
    }
    let mut pending_snapshots: Vec<f64> = options.snapshot_times.clone();
    for &ts in &pending_snapshots {
        if !times.iter().any(|&t| same_time(t, ts)) {
            return Err(Error::InvalidTimeGrid(format!("snapshot time {ts} is not a sample time")));
        }
    }
    pending_snapshots.sort_by(|a, b| a.total_cmp(b));

    let horizon = *times.last().unwrap();
    let q_count = system.n_emitters();
    let h = &system.matrix;

    let mut traj = Trajectory {
        n_cells: n,
        times: times.to_vec(),
        emitter_amplitudes: vec![Vec::with_capacity(times.len()); q_count],
        emitter_pops: vec![Vec::with_capacity(times.len()); q_count],
        lattice_pop: Vec::with_capacity(times.len()),
        tracked_cells: options.tracked_cells.clone(),
        cell_pops: vec![Vec::with_capacity(times.len()); options.tracked_cells.len()],
        snapshots: Vec::new(),
        projection: None,
        initial_energy: h.expectation(&initial.amplitudes),
        max_norm_drift: 0.0,
        max_energy_drift: 0.0,
        final_state: initial.clone(),
    };
    let energy_scale = traj.initial_energy.abs().max(1.0);

    let window = options.projection.map(|p| {
        let span = horizon - p.window_start;
        (p, span)
    });
    let mut projected = vec![Complex64::new(0.0, 0.0); dim];
    let mut weight_sum = 0.0;

    let mut psi = initial.amplitudes.clone();
    let mut propagator: Option<(f64, ChebyshevPropagator)> = None;

    for (i, &t) in times.iter().enumerate() {
        if i > 0 {
            let dt = t - times[i - 1];
            let reuse = matches!(&propagator, Some((step, _)) if (step - dt).abs() <= 1e-12 * dt);
            if !reuse {
                propagator = Some((dt, ChebyshevPropagator::new(h, dt)));
            }
            let (_, prop) = propagator.as_mut().unwrap();
            prop.step(&mut psi);

            let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let drift = (norm - 1.0).abs();
            traj.max_norm_drift = traj.max_norm_drift.max(drift);
            if drift > options.norm_tolerance {
                return Err(Error::NormDrift {
                    drift,
                    tolerance: options.norm_tolerance,
                    time: t,
                    step: dt,
                    horizon,
                    half_width: prop.half_width(),
                });
            }
            let energy = h.expectation(&psi);
            traj.max_energy_drift = traj
                .max_energy_drift
                .max((energy - traj.initial_energy).abs() / energy_scale);
        }

        for q in 0..q_count {
            let c = psi[2 * n + q];
            traj.emitter_amplitudes[q].push(c);
            traj.emitter_pops[q].push(c.norm_sqr());
        }
        traj.lattice_pop
            .push(psi[..2 * n].iter().map(|c| c.norm_sqr()).sum());
        for (slot, &cell) in options.tracked_cells.iter().enumerate() {
            traj.cell_pops[slot].push(psi[cell].norm_sqr() + psi[n + cell].norm_sqr());
        }
        if pending_snapshots.first().is_some_and(|&ts| same_time(ts, t)) {
            pending_snapshots.remove(0);
            traj.snapshots.push(SystemState {
                amplitudes: psi.clone(),
                time: t,
            });
        }
        if let Some((p, span)) = window {
            if t >= p.window_start && span > 0.0 {
                let w = (PI * (t - p.window_start) / span).sin().powi(2);
                let rot = Complex64::from_polar(w, p.energy * t);
                for (acc, c) in projected.iter_mut().zip(&psi) {
                    *acc += rot * c;
                }
                weight_sum += w;
            }
        }
    }

    if let Some((p, _)) = window {
        if weight_sum <= 0.0 {
            return Err(Error::InvalidTimeGrid(format!(
                "projection window starting at {} holds no samples",
                p.window_start
            )));
        }
        for c in projected.iter_mut() {
            *c /= weight_sum;
        }
        traj.projection = Some(ProjectedField {
            energy: p.energy,
            window_start: p.window_start,
            amplitudes: projected,
        });
    }

    traj.final_state = SystemState {
        amplitudes: psi,
        time: horizon,
    };
    Ok(traj)
}

/// Emitter, coupling-cell and remaining-lattice populations.
#[derive(Debug, Clone, PartialEq)]
pub struct Populations {
    /// Total emitter population.
    pub p_e: Vec<f64>,
    /// `|c_{0,a}|² + |c_{0,b}|²` at the coupling cell.
    pub p_0: Vec<f64>,
    /// Photon population everywhere else.
    pub p_d: Vec<f64>,
}

pub fn populations(traj: &Trajectory, coupling_cell: SiteIndex) -> Result<Populations> {
    let slot = traj
        .tracked_cells
        .iter()
        .position(|&c| c == coupling_cell.cell)
        .ok_or_else(|| {
            Error::MissingData(format!("cell {} was not tracked during propagation", coupling_cell.cell))
        })?;
    let p_e = traj.total_emitter_pop();
    let p_0 = traj.cell_pops[slot].clone();
    let p_d = traj
        .lattice_pop
        .iter()
        .zip(&p_0)
        .map(|(total, local)| total - local)
        .collect();
    Ok(Populations { p_e, p_0, p_d })
}

/// Per-cell sublattice populations `|c_{x,a}|²`, `|c_{x,b}|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldProfile {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

pub fn field_profile(state: &SystemState, n_cells: usize) -> FieldProfile {
    profile_from_amplitudes(&state.amplitudes, n_cells)
}

pub fn profile_from_amplitudes(amplitudes: &[Complex64], n_cells: usize) -> FieldProfile {
    FieldProfile {
        a: amplitudes[..n_cells].iter().map(|c| c.norm_sqr()).collect(),
        b: amplitudes[n_cells..2 * n_cells].iter().map(|c| c.norm_sqr()).collect(),
    }
}

impl FieldProfile {
    pub fn n_cells(&self) -> usize {
        self.a.len()
    }

    pub fn total(&self) -> f64 {
        self.a.iter().chain(&self.b).sum()
    }

    pub fn cell_population(&self, cell: usize) -> f64 {
        self.a[cell] + self.b[cell]
    }

    /// Slope `κ` of a least-squares fit `ln|ψ(d)| ≈ c − κ d`, where
    /// `|ψ(d)|² = |c_a|² + |c_b|²` at cell `origin ± d` (periodic wrap), for
    /// `d` in `distances`. Both sides of the origin are averaged.
    pub fn amplitude_decay_constant(&self, origin: usize, distances: std::ops::RangeInclusive<usize>) -> Result<f64> {
        let n = self.n_cells();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for d in distances {
            let right = (origin + d) % n;
            let left = (origin + n - d % n) % n;
            let pop = 0.5 * (self.cell_population(right) + self.cell_population(left));
            if pop <= 0.0 {
                return Err(Error::MissingData(format!("zero field at distance {d}")));
            }
            xs.push(d as f64);
            ys.push(0.5 * pop.ln());
        }
        if xs.len() < 2 {
            return Err(Error::InvalidArgument("need at least two distances to fit".into()));
        }
        let (slope, _) = crate::spectral::least_squares_line(&xs, &ys);
        Ok(-slope)
    }
}
