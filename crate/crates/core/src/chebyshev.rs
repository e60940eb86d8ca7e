//! Chebyshev expansion of the time-step operator `exp(−iHΔt)`.
//!
//! With `H = c + r·Ĥ` and spec(Ĥ) ⊂ [−1, 1],
//!
//! ```text
//! exp(−iHΔt) = e^{−icΔt} Σ_k (2 − δ_k0) (−i)^k J_k(rΔt) T_k(Ĥ)
//! ```
//!
//! The Bessel coefficients fall off super-exponentially once `k > rΔt`, so the
//! series is truncated where they drop below `1e-17`; the step is then accurate
//! to round-off.

use num_complex::Complex64;

use crate::sparse::CsrMatrix;

/// Largest `rΔt` per sub-step. Larger arguments are split into equal sub-steps.
const MAX_ARGUMENT: f64 = 40.0;
const COEFF_CUTOFF: f64 = 1e-17;

/// Bessel functions `J_0(x) … J_{k_max}(x)` for `x ≥ 0` by Miller's backward
/// recurrence, normalised with `J_0 + 2 Σ J_{2k} = 1`.
pub fn bessel_j_sequence(x: f64, k_max: usize) -> Vec<f64> {
    assert!(x >= 0.0, "bessel_j_sequence needs x >= 0");
    let mut out = vec![0.0; k_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    // start well above both k_max and x so the seed error has decayed
    let start = (k_max.max(x.ceil() as usize) + 30 + (2.0 * x.sqrt()) as usize) | 1;
    let mut upper = 0.0_f64; // J_{m+1}
    let mut current = 1e-300_f64; // J_m
    let mut norm = 0.0;
    let mut values = vec![0.0; start + 1];
    values[start] = current;
    for m in (1..=start).rev() {
        let lower = 2.0 * m as f64 / x * current - upper;
        upper = current;
        current = lower;
        values[m - 1] = current;
        if current.abs() > 1e250 {
            for v in values[m - 1..].iter_mut() {
                *v *= 1e-250;
            }
            upper *= 1e-250;
            current *= 1e-250;
        }
    }
    for (k, v) in values.iter().enumerate() {
        if k == 0 {
            norm += v;
        } else if k % 2 == 0 {
            norm += 2.0 * v;
        }
    }
    for (k, o) in out.iter_mut().enumerate() {
        *o = values[k] / norm;
    }
    out
}

/// Expansion coefficients `(2 − δ_k0)(−i)^k J_k(x)`, truncated.
fn expansion_coefficients(x: f64) -> Vec<Complex64> {
    let k_max = (x * 1.2 + 12.0 * x.cbrt() + 40.0).ceil() as usize;
    let bessel = bessel_j_sequence(x, k_max);
    let mut last = 0;
    for (k, b) in bessel.iter().enumerate() {
        if b.abs() > COEFF_CUTOFF {
            last = k;
        }
    }
    let minus_i_pow = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
    ];
    (0..=last.max(1))
        .map(|k| {
            let weight = if k == 0 { 1.0 } else { 2.0 };
            minus_i_pow[k % 4] * (weight * bessel[k])
        })
        .collect()
}

/// Propagator for a fixed Hamiltonian and a fixed step.
pub struct ChebyshevPropagator<'a> {
    h: &'a CsrMatrix,
    centre: f64,
    half_width: f64,
    sub_steps: usize,
    coeffs: Vec<Complex64>,
    phase: Complex64,
    prev: Vec<Complex64>,
    curr: Vec<Complex64>,
    next: Vec<Complex64>,
    acc: Vec<Complex64>,
}

impl<'a> ChebyshevPropagator<'a> {
    pub fn new(h: &'a CsrMatrix, dt: f64) -> Self {
        let (lo, hi) = h.gershgorin_bounds();
        let centre = 0.5 * (lo + hi);
        // small margin keeps round-off from pushing the spectrum outside [-1, 1]
        let half_width = (0.5 * (hi - lo)).max(1e-6) * (1.0 + 1e-9) + 1e-12;
        let sub_steps = ((half_width * dt.abs()) / MAX_ARGUMENT).ceil().max(1.0) as usize;
        let sub_dt = dt / sub_steps as f64;
        let x = half_width * sub_dt.abs();
        let mut coeffs = expansion_coefficients(x);
        if sub_dt < 0.0 {
            // exp(+i|Δt|H): conjugate the (−i)^k factors
            for c in coeffs.iter_mut() {
                *c = c.conj();
            }
        }
        let dim = h.dim();
        let zero = Complex64::new(0.0, 0.0);
        Self {
            h,
            centre,
            half_width,
            sub_steps,
            coeffs,
            phase: Complex64::from_polar(1.0, -centre * sub_dt),
            prev: vec![zero; dim],
            curr: vec![zero; dim],
            next: vec![zero; dim],
            acc: vec![zero; dim],
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Number of matrix–vector products per full step.
    pub fn matvecs_per_step(&self) -> usize {
        self.sub_steps * (self.coeffs.len() - 1)
    }

    /// `ĥ·src` into `dst`, where `ĥ = (H − c)/r`.
    fn scaled_apply(h: &CsrMatrix, centre: f64, half_width: f64, src: &[Complex64], dst: &mut [Complex64]) {
        h.mul_vec_into(src, dst);
        let inv = 1.0 / half_width;
        for (d, s) in dst.iter_mut().zip(src) {
            *d = (*d - s * centre) * inv;
        }
    }

    /// Advances `psi` in place by one full step.
    pub fn step(&mut self, psi: &mut [Complex64]) {
        for _ in 0..self.sub_steps {
            self.sub_step(psi);
        }
    }

    fn sub_step(&mut self, psi: &mut [Complex64]) {
        let (h, c, r) = (self.h, self.centre, self.half_width);
        self.prev.copy_from_slice(psi);
        Self::scaled_apply(h, c, r, &self.prev, &mut self.curr);
        let (a0, a1) = (self.coeffs[0], self.coeffs[1]);
        for ((acc, p), q) in self.acc.iter_mut().zip(&self.prev).zip(&self.curr) {
            *acc = a0 * p + a1 * q;
        }
        for &ak in &self.coeffs[2..] {
            Self::scaled_apply(h, c, r, &self.curr, &mut self.next);
            for ((n, p), acc) in self.next.iter_mut().zip(&self.prev).zip(self.acc.iter_mut()) {
                *n = 2.0 * *n - p;
                *acc += ak * *n;
            }
            std::mem::swap(&mut self.prev, &mut self.curr);
            std::mem::swap(&mut self.curr, &mut self.next);
        }
        for (out, acc) in psi.iter_mut().zip(&self.acc) {
            *out = self.phase * acc;
        }
    }
}
