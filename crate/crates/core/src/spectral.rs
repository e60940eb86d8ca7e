//! Frequencies and rates from sampled trajectories: one-sided power spectra,
//! refined peak lists and exponential envelope fits.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    Rectangular,
    #[default]
    Hann,
}

impl Window {
    fn weights(self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            // periodic form: its bins line up with the DFT grid
            Window::Hann => (0..n).map(|i| (PI * i as f64 / n as f64).sin().powi(2)).collect(),
        }
    }
}

/// One-sided power spectrum on angular frequencies `ω_k = k·resolution`.
///
/// Normalised so that, with a rectangular window, the powers sum to the
/// variance of the series.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    pub resolution: f64,
    pub window: Window,
    /// Mean square of the raw series, the scale below which power is noise.
    pub signal_scale: f64,
}

impl PowerSpectrum {
    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    /// Power within `half_width` of `frequency`.
    pub fn band_power(&self, frequency: f64, half_width: f64) -> f64 {
        self.frequencies
            .iter()
            .zip(&self.power)
            .filter(|(f, _)| (**f - frequency).abs() <= half_width)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Uniform spacing of `times`, or an error naming the first offending step.
pub fn uniform_spacing(times: &[f64]) -> Result<f64> {
    if times.len() < 2 {
        return Err(Error::Spectral("need at least two samples".into()));
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::Spectral("times must increase".into()));
    }
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt {
            return Err(Error::Spectral(format!(
                "non-uniform grid: step {} at sample {i} differs from {dt}",
                w[1] - w[0]
            )));
        }
    }
    Ok(dt)
}

pub fn population_spectrum(times: &[f64], values: &[f64], window: Window) -> Result<PowerSpectrum> {
    if times.len() != values.len() {
        return Err(Error::Spectral(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    let n = values.len();
    if n < MIN_SAMPLES {
        return Err(Error::Spectral(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    let dt = uniform_spacing(times)?;
    let mean = values.iter().sum::<f64>() / n as f64;
    let weights = window.weights(n);
    let weight_sq: f64 = weights.iter().map(|w| w * w).sum();

    let mut buf: Vec<Complex64> = values
        .iter()
        .zip(&weights)
        .map(|(v, w)| Complex64::new((v - mean) * w, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let resolution = TAU / (n as f64 * dt);
    let half = n / 2;
    let mut frequencies = Vec::with_capacity(half + 1);
    let mut power = Vec::with_capacity(half + 1);
    for (k, x) in buf.iter().take(half + 1).enumerate() {
        let doubled = if k == 0 || (n.is_multiple_of(2) && k == half) { 1.0 } else { 2.0 };
        frequencies.push(k as f64 * resolution);
        power.push(doubled * x.norm_sqr() / (n as f64 * weight_sq));
    }
    Ok(PowerSpectrum {
        frequencies,
        power,
        resolution,
        window,
        signal_scale: values.iter().map(|v| v * v).sum::<f64>() / n as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub frequency: f64,
    pub power: f64,
    /// Half width at half maximum.
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PeakSet {
    /// Ascending in frequency.
    pub peaks: Vec<Peak>,
    pub threshold: f64,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn first(&self) -> Option<&Peak> {
        self.peaks.first()
    }

    pub fn strongest(&self) -> Option<&Peak> {
        self.peaks.iter().max_by(|a, b| a.power.total_cmp(&b.power))
    }

    /// Strongest peak with frequency in `[lo, hi]`.
    pub fn strongest_in(&self, lo: f64, hi: f64) -> Option<&Peak> {
        self.peaks
            .iter()
            .filter(|p| p.frequency >= lo && p.frequency <= hi)
            .max_by(|a, b| a.power.total_cmp(&b.power))
    }
}

/// Vertex of the parabola through `(−1, a)`, `(0, b)`, `(1, c)`: offset and value.
fn parabola_vertex(a: f64, b: f64, c: f64) -> (f64, f64) {
    let denom = a - 2.0 * b + c;
    if denom >= 0.0 {
        return (0.0, b);
    }
    let offset = (0.5 * (a - c) / denom).clamp(-0.5, 0.5);
    (offset, b - 0.25 * (a - c) * offset)
}

fn half_width_at(power: &[f64], k: usize, level: f64, resolution: f64) -> f64 {
    let side = |dir: isize| -> f64 {
        let mut i = k as isize;
        loop {
            let next = i + dir;
            if next < 0 || next as usize >= power.len() {
                return (i - k as isize).unsigned_abs() as f64;
            }
            let (p0, p1) = (power[i as usize], power[next as usize]);
            if p1 <= level {
                let frac = if p0 > p1 { (p0 - level) / (p0 - p1) } else { 0.0 };
                return (i - k as isize).unsigned_abs() as f64 + frac;
            }
            i = next;
        }
    };
    0.5 * (side(-1) + side(1)) * resolution
}

/// Local maxima above `threshold_fraction · max(power)`, excluding DC, each
/// refined by a 3-bin parabola through the log power.
pub fn extract_peaks(spectrum: &PowerSpectrum, threshold_fraction: f64) -> PeakSet {
    let p = &spectrum.power;
    let max = p.iter().skip(1).copied().fold(0.0, f64::max);
    // round-off floor: a detrended constant leaves only ~ε² of power
    let floor = 1e-24 * spectrum.signal_scale.max(f64::MIN_POSITIVE);
    let threshold = (threshold_fraction * max).max(floor);
    let mut peaks = Vec::new();
    if max <= floor {
        return PeakSet { peaks, threshold };
    }
    for k in 1..p.len() {
        let left = p[k - 1];
        let right = if k + 1 < p.len() { p[k + 1] } else { f64::NEG_INFINITY };
        if !(p[k] > left && p[k] >= right && p[k] > threshold) {
            continue;
        }
        let (offset, power) = if k + 1 < p.len() && left > 0.0 && right > 0.0 {
            let (off, log_peak) = parabola_vertex(left.ln(), p[k].ln(), right.ln());
            (off, log_peak.exp())
        } else {
            (0.0, p[k])
        };
        peaks.push(Peak {
            frequency: (k as f64 + offset) * spectrum.resolution,
            power,
            half_width: half_width_at(p, k, 0.5 * p[k], spectrum.resolution),
        });
    }
    PeakSet { peaks, threshold }
}

/// Angular frequency `E` of the strongest line in a complex signal
/// `c(t) ≈ Σ c_j e^{−iE_j t}`, from a Hann-windowed transform refined by a
/// 3-bin log parabola.
pub fn dominant_line_energy(times: &[f64], amplitudes: &[Complex64]) -> Result<f64> {
    if times.len() != amplitudes.len() || times.len() < MIN_SAMPLES {
        return Err(Error::Spectral(format!(
            "need at least {MIN_SAMPLES} paired samples, got {} times and {} values",
            times.len(),
            amplitudes.len()
        )));
    }
    let dt = uniform_spacing(times)?;
    let n = amplitudes.len();
    let weights = Window::Hann.weights(n);
    let mut buf: Vec<Complex64> = amplitudes.iter().zip(&weights).map(|(c, w)| c * *w).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let p: Vec<f64> = buf.iter().map(|x| x.norm_sqr()).collect();
    let k = (0..n).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
    let (l, r) = (p[(k + n - 1) % n], p[(k + 1) % n]);
    let offset = if l > 0.0 && r > 0.0 { parabola_vertex(l.ln(), p[k].ln(), r.ln()).0 } else { 0.0 };
    // bin k carries e^{+2πi k j/n}; fold to a signed index
    let signed = if k > n / 2 { k as f64 - n as f64 } else { k as f64 };
    // e^{−iEt} lands on ω = −E
    Ok(-(signed + offset) * TAU / (n as f64 * dt))
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    /// Fitted `Γ̂` in `y ≈ y₀ e^{−Γ̂t}`.
    pub rate: f64,
    pub prefactor: f64,
    /// RMS residual of the log fit.
    pub log_residual: f64,
    pub points: usize,
    pub used_maxima: bool,
}

/// Fits `ln y = ln y₀ − Γ̂t` by least squares.
pub fn fit_exponential(times: &[f64], values: &[f64]) -> Result<DecayFit> {
    if times.len() != values.len() || times.len() < 2 {
        return Err(Error::Spectral("need at least two paired samples".into()));
    }
    if values.iter().any(|&v| v.is_nan() || v <= 0.0) {
        return Err(Error::NotDecaying("log fit needs positive values".into()));
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (slope, intercept) = least_squares_line(times, &logs);
    let ss: f64 = times
        .iter()
        .zip(&logs)
        .map(|(t, l)| (l - (slope * t + intercept)).powi(2))
        .sum();
    Ok(DecayFit {
        rate: -slope,
        prefactor: intercept.exp(),
        log_residual: (ss / times.len() as f64).sqrt(),
        points: times.len(),
        used_maxima: false,
    })
}

/// Parabola-refined local maxima `(t, value)` of a sampled series.
pub fn local_maxima(times: &[f64], values: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..values.len().saturating_sub(1) {
        let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
        if b > a && b >= c {
            let (off, v) = parabola_vertex(a, b, c);
            let dt = 0.5 * (times[i + 1] - times[i - 1]);
            out.push((times[i] + off * dt, v));
        }
    }
    out
}

/// Decay rate of a series' envelope: a log fit through its local maxima when
/// there are at least five, otherwise through the whole series if it falls
/// monotonically.
pub fn fit_decay_envelope(times: &[f64], values: &[f64]) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(Error::Spectral("times and values differ in length".into()));
    }
    let maxima = local_maxima(times, values);
    let fit = if maxima.len() >= 5 {
        let (ts, vs): (Vec<f64>, Vec<f64>) = maxima.into_iter().unzip();
        DecayFit {
            used_maxima: true,
            ..fit_exponential(&ts, &vs)?
        }
    } else if values.windows(2).all(|w| w[1] <= w[0]) {
        fit_exponential(times, values)?
    } else {
        return Err(Error::NotDecaying(
            "fewer than five maxima and the series is not monotone".into(),
        ));
    };
    // the envelope must drop across the span by more than the fit scatter
    let span = times[times.len() - 1] - times[0];
    let significant = fit.rate * span > (2.0 * fit.log_residual).max(1e-6);
    if !significant {
        return Err(Error::NotDecaying(format!("fitted rate {} shows no decay", fit.rate)));
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * dt).collect()
    }

    #[test]
    fn short_or_irregular_series_are_rejected() {
        let t = grid(32, 0.5);
        assert!(population_spectrum(&t, &vec![0.0; 32], Window::Hann).is_err());
        let mut t = grid(128, 0.5);
        t[60] += 0.1;
        assert!(population_spectrum(&t, &vec![0.0; 128], Window::Hann).is_err());
    }

    #[test]
    fn resolution_matches_grid() {
        let t = grid(400, 0.25);
        let s = population_spectrum(&t, &vec![1.0; 400], Window::Rectangular).unwrap();
        assert!((s.resolution - TAU / 100.0).abs() < 1e-15);
        assert_eq!(s.frequencies.len(), 201);
    }

    #[test]
    fn negative_line_energy() {
        let t = grid(4000, 0.5);
        let c: Vec<Complex64> = t.iter().map(|&t| Complex64::from_polar(1.0, 1.93 * t)).collect();
        let e = dominant_line_energy(&t, &c).unwrap();
        assert!((e + 1.93).abs() < 1e-3, "{e}");
    }

    #[test]
    fn growing_series_is_not_decaying() {
        let t = grid(100, 1.0);
        let v: Vec<f64> = t.iter().map(|t| (0.01 * t).exp()).collect();
        assert!(matches!(fit_decay_envelope(&t, &v), Err(Error::NotDecaying(_))));
    }
}
