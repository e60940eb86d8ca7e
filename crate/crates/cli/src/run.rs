//! Simulating scenarios and writing their output tables.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crossstitch::dynamics::profile_from_amplitudes;
use crossstitch::spectral::{dominant_line_energy, extract_peaks, population_spectrum, Window};
use crossstitch::{assemble_system, evolve, field_profile, EnergyProjection, Error, EvolveOptions, FieldProfile, Trajectory};
use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One simulated configuration (a single sweep point).
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub label: String,
    pub config: ScenarioConfig,
    pub sweep_value: Option<f64>,
    pub trajectory: Trajectory,
    /// Energy used for the field projection, when one was requested.
    pub projection_energy: Option<f64>,
}

impl RunOutput {
    /// Projected field profile, when a projection was requested.
    pub fn projected_profile(&self) -> Option<FieldProfile> {
        self.trajectory
            .projection
            .as_ref()
            .map(|p| profile_from_amplitudes(&p.amplitudes, self.trajectory.n_cells))
    }
}

fn numerical(label: &str, err: Error) -> CliError {
    match err {
        Error::NormDrift { .. } => CliError::numerical(label, err),
        other => CliError::config(label, other.to_string()),
    }
}

/// Propagates one configuration. Sweeps must be expanded by the caller.
pub fn simulate(config: &ScenarioConfig, label: &str) -> Result<RunOutput> {
    let system = assemble_system(&config.lattice, &config.emitter_specs()).map_err(|e| numerical(label, e))?;
    let initial = system.excited_emitter(0).map_err(|e| numerical(label, e))?;
    let times = config.time_grid();

    let mut tracked: Vec<usize> = Vec::new();
    for e in &config.emitters {
        if !tracked.contains(&e.cell) {
            tracked.push(e.cell);
        }
    }
    let mut options = EvolveOptions {
        tracked_cells: tracked,
        snapshot_times: config.snapshots.iter().map(|&t| snap_to_grid(t, config.sample_spacing)).collect(),
        ..EvolveOptions::default()
    };

    let mut projection_energy = None;
    if let Some(p) = &config.projection {
        let energy = match p.energy {
            Some(e) => e,
            None => {
                let first = evolve(&system, &initial, &times, &options).map_err(|e| numerical(label, e))?;
                let start = times.partition_point(|&t| t < p.window_start);
                dominant_line_energy(&times[start..], &first.emitter_amplitudes[0][start..])
                    .map_err(|e| numerical(label, e))?
            }
        };
        projection_energy = Some(energy);
        options.projection = Some(EnergyProjection {
            energy,
            window_start: p.window_start,
        });
    }

    let trajectory = evolve(&system, &initial, &times, &options).map_err(|e| numerical(label, e))?;
    Ok(RunOutput {
        label: label.to_string(),
        config: config.clone(),
        sweep_value: None,
        trajectory,
        projection_energy,
    })
}

fn snap_to_grid(t: f64, dt: f64) -> f64 {
    (t / dt).round() * dt
}

/// Every sweep point of `config`, run on at most `jobs` threads. Results keep
/// the order of the sweep values.
pub fn simulate_all(config: &ScenarioConfig, jobs: usize) -> Result<Vec<RunOutput>> {
    let points = config.points();
    let work = |value: &Option<f64>| -> Result<RunOutput> {
        let point = match value {
            Some(v) => config.sweep_point(*v),
            None => config.clone(),
        };
        let mut out = simulate(&point, &config.point_label(*value))?;
        out.sweep_value = *value;
        Ok(out)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::config("--jobs", e.to_string()))?;
    pool.install(|| points.par_iter().map(work).collect())
}

/// Files written by [`run_scenario`].
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub max_norm_drift: f64,
    pub max_energy_drift: f64,
}

pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path, jobs: usize) -> Result<RunSummary> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let outputs = simulate_all(config, jobs)?;
    let mut summary = RunSummary::default();
    for out in &outputs {
        summary.max_norm_drift = summary.max_norm_drift.max(out.trajectory.max_norm_drift);
        summary.max_energy_drift = summary.max_energy_drift.max(out.trajectory.max_energy_drift);
        for (name, body) in render_outputs(out) {
            let path = out_dir.join(name);
            write_atomic(&path, &body)?;
            summary.files.push(path);
        }
    }
    if let Some(sweep) = &config.sweep {
        let path = out_dir.join(format!("{}_sweep.csv", config.scenario));
        write_atomic(&path, &render_sweep_summary(config, sweep.parameter.name(), &outputs))?;
        summary.files.push(path);
    }
    Ok(summary)
}

/// Writes through a temporary sibling and renames, so readers never see a partial file.
pub fn write_atomic(path: &Path, body: &str) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    fs::write(&tmp, body).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

/// `#` lines recording the code version and every parameter of a run.
pub fn preamble(config: &ScenarioConfig, sweep_value: Option<f64>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# crossstitch {VERSION}");
    let _ = writeln!(s, "# scenario: {}", config.scenario);
    if !config.description.is_empty() {
        let _ = writeln!(s, "# description: {}", config.description);
    }
    for note in &config.notes {
        let _ = writeln!(s, "# note: {note}");
    }
    let l = &config.lattice;
    let boundary = match l.boundary {
        crossstitch::Boundary::Periodic => "periodic",
        crossstitch::Boundary::Open => "open",
    };
    let _ = writeln!(
        s,
        "# lattice: n_cells={} inter_hop={} intra_hop={} onsite={} boundary={boundary}",
        l.n_cells, l.inter_hop, l.intra_hop, l.onsite
    );
    for (q, e) in config.emitters.iter().enumerate() {
        let kind = match e.kind {
            crossstitch::EmitterKind::Small => "small",
            crossstitch::EmitterKind::Giant => "giant",
        };
        let _ = write!(
            s,
            "# emitter {q}: kind={kind} frequency={} coupling={} phase={} cell={}",
            e.frequency, e.coupling, e.phase, e.cell
        );
        if let Some(b) = e.cell_b {
            let _ = write!(s, " cell_b={b}");
        }
        s.push('\n');
    }
    let _ = writeln!(
        s,
        "# grid: horizon={} sample_spacing={} samples={}",
        config.horizon,
        config.sample_spacing,
        config.sample_count() + 1
    );
    if let (Some(sweep), Some(v)) = (&config.sweep, sweep_value) {
        let _ = writeln!(s, "# sweep: {}={v}", sweep.parameter.name());
    }
    s
}

fn run_preamble(out: &RunOutput) -> String {
    let mut s = preamble(&out.config, None);
    if let Some(v) = out.sweep_value {
        let _ = writeln!(s, "# sweep point: {v}");
    }
    let _ = writeln!(
        s,
        "# max_norm_drift={:.3e} max_energy_drift={:.3e}",
        out.trajectory.max_norm_drift, out.trajectory.max_energy_drift
    );
    if let Some(e) = out.projection_energy {
        let _ = writeln!(s, "# projection_energy={}", num(e));
    }
    s
}

/// `(file name, contents)` for every table of one run.
pub fn render_outputs(out: &RunOutput) -> Vec<(String, String)> {
    let traj = &out.trajectory;
    let head = run_preamble(out);
    let mut files = Vec::new();

    let q_count = traj.emitter_pops.len();
    let p_e = traj.total_emitter_pop();
    let mut table = head.clone();
    table.push_str("time,P_e,P_0,P_d");
    if q_count > 1 {
        for q in 1..=q_count {
            let _ = write!(table, ",P_e{q}");
        }
    }
    table.push('\n');
    for i in 0..traj.times.len() {
        let p0 = traj.cell_pops[0][i];
        let pd = traj.lattice_pop[i] - p0;
        let _ = write!(table, "{},{},{},{}", num(traj.times[i]), num(p_e[i]), num(p0), num(pd));
        if q_count > 1 {
            for pops in &traj.emitter_pops {
                let _ = write!(table, ",{}", num(pops[i]));
            }
        }
        table.push('\n');
    }
    files.push((format!("{}.csv", out.label), table));

    let profile_table = |profile: &FieldProfile, extra: &str| {
        let mut s = head.clone();
        s.push_str(extra);
        s.push_str("cell,pop_a,pop_b\n");
        for x in 0..profile.n_cells() {
            let _ = writeln!(s, "{x},{},{}", num(profile.a[x]), num(profile.b[x]));
        }
        s
    };
    for snap in &traj.snapshots {
        let profile = field_profile(snap, traj.n_cells);
        let extra = format!("# snapshot time={}\n", snap.time);
        files.push((
            format!("{}_snapshot_t{}.csv", out.label, snap.time),
            profile_table(&profile, &extra),
        ));
    }
    if let Some(profile) = out.projected_profile() {
        files.push((format!("{}_projection.csv", out.label), profile_table(&profile, "")));
    }

    let last = &traj.emitter_pops[q_count - 1];
    if let Ok(spec) = population_spectrum(&traj.times, last, Window::Hann) {
        let mut s = head;
        let series = if q_count > 1 { format!("P_e{q_count}") } else { "P_e".to_string() };
        let _ = writeln!(s, "# spectrum of {series} (Hann window), angular frequency");
        s.push_str("frequency,power\n");
        for (f, p) in spec.frequencies.iter().zip(&spec.power) {
            let _ = writeln!(s, "{},{}", num(*f), num(*p));
        }
        files.push((format!("{}_spectrum.csv", out.label), s));
    }
    files
}

/// Headline numbers of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSummary {
    /// Maximum population reached by the last emitter.
    pub max_last_pop: f64,
    /// Mean total emitter population over the final fifth of the run.
    pub late_mean_pop: f64,
    /// Lowest spectral peak of the last emitter's population above 5% of the
    /// strongest, or 0 when the spectrum is empty.
    pub first_peak: f64,
}

pub fn summarise(traj: &Trajectory) -> PointSummary {
    let last = &traj.emitter_pops[traj.emitter_pops.len() - 1];
    let total = traj.total_emitter_pop();
    let start = traj.times.partition_point(|&t| t < 0.8 * traj.times[traj.times.len() - 1]);
    let late = &total[start..];
    let first_peak = population_spectrum(&traj.times, last, Window::Hann)
        .ok()
        .and_then(|s| extract_peaks(&s, 0.05).first().map(|p| p.frequency))
        .unwrap_or(0.0);
    PointSummary {
        max_last_pop: last.iter().copied().fold(0.0, f64::max),
        late_mean_pop: late.iter().sum::<f64>() / late.len() as f64,
        first_peak,
    }
}

fn render_sweep_summary(config: &ScenarioConfig, parameter: &str, outputs: &[RunOutput]) -> String {
    let mut s = preamble(config, None);
    let _ = writeln!(s, "{parameter},max_P_last,late_mean_P_e,first_peak,max_norm_drift,max_energy_drift");
    for out in outputs {
        let p = summarise(&out.trajectory);
        let _ = writeln!(
            s,
            "{},{},{},{},{:.3e},{:.3e}",
            out.sweep_value.unwrap_or(f64::NAN),
            num(p.max_last_pop),
            num(p.late_mean_pop),
            num(p.first_peak),
            out.trajectory.max_norm_drift,
            out.trajectory.max_energy_drift
        );
    }
    s
}
