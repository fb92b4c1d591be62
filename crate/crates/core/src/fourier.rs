//! Finite Fourier sums on equispaced grids and at single points.
//!
//! Grids are `x_j = offset + j * 2π / m` for `j = 0..m`. Grid evaluation is a
//! single inverse FFT of the (phase-shifted) coefficient vector; coefficients
//! at frequencies `>= m` are folded modulo `m`, which is exact on the grid.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// `sum_r z_r e^{i r x_j}` for `r = 0..z.len()`.
pub fn complex_series_on_grid(z: &[Complex64], m: usize, offset: f64) -> Vec<Complex64> {
    assert!(m > 0, "grid size must be positive");
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for (r, &c) in z.iter().enumerate() {
        let c = if offset != 0.0 {
            c * Complex64::from_polar(1.0, r as f64 * offset)
        } else {
            c
        };
        buf[r % m] += c;
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(m).process(&mut buf);
    buf
}

/// `c_0 + 2 sum_{r>=1} c_r cos(r x_j)`: the real symmetric series with
/// coefficients `c_{-r} = c_r`.
pub fn cosine_series_on_grid(c: &[f64], m: usize, offset: f64) -> Vec<f64> {
    if c.is_empty() {
        return vec![0.0; m];
    }
    let z: Vec<Complex64> = c.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    complex_series_on_grid(&z, m, offset)
        .into_iter()
        .map(|v| 2.0 * v.re - c[0])
        .collect()
}

/// `sum_{r>=1} d_r sin(r x_j)`; `d[0]` is ignored.
pub fn sine_series_on_grid(d: &[f64], m: usize, offset: f64) -> Vec<f64> {
    let z: Vec<Complex64> = d
        .iter()
        .enumerate()
        .map(|(r, &v)| Complex64::new(if r == 0 { 0.0 } else { v }, 0.0))
        .collect();
    complex_series_on_grid(&z, m, offset)
        .into_iter()
        .map(|v| v.im)
        .collect()
}

/// Evaluates `sum_r z_r e^{i r x}` at one point by a rotation recurrence,
/// re-anchored every 64 steps to keep the phase error at round-off level.
pub fn complex_series_at(z: &[Complex64], x: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, x);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut rot = Complex64::new(1.0, 0.0);
    for (r, &c) in z.iter().enumerate() {
        if r % 64 == 0 {
            rot = Complex64::from_polar(1.0, r as f64 * x);
        }
        acc += c * rot;
        rot *= step;
    }
    acc
}

pub fn cosine_series_at(c: &[f64], x: f64) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    let (re, _) = trig_sums_at(c, x);
    2.0 * re - c[0]
}

pub fn sine_series_at(d: &[f64], x: f64) -> f64 {
    let (_, im) = trig_sums_at(d, x);
    // r = 0 contributes nothing to the sine part
    im
}

fn trig_sums_at(c: &[f64], x: f64) -> (f64, f64) {
    let step = Complex64::from_polar(1.0, x);
    let mut rot = Complex64::new(1.0, 0.0);
    let (mut re, mut im) = (0.0, 0.0);
    for (r, &v) in c.iter().enumerate() {
        if r % 64 == 0 {
            rot = Complex64::from_polar(1.0, r as f64 * x);
        }
        re += v * rot.re;
        im += v * rot.im;
        rot *= step;
    }
    (re, im)
}

/// Grid spacing for `m` points on one period.
pub fn grid_step(m: usize) -> f64 {
    2.0 * PI / m as f64
}

/// Smallest power of two that is at least `n` (and at least 1).
pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}
