//! Arbitrary-length discrete Fourier transforms.
//!
//! Lengths here are `q - 1` for a field order `q`, which is rarely smooth.
//! Short inputs use the direct quadratic sum against a root table; longer
//! ones go through Bluestein's chirp-z identity
//! `jk = (j^2 + k^2 - (k - j)^2) / 2`, which turns the transform into a
//! power-of-two convolution.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

use crate::sum::ComplexSum;

/// Lengths strictly below this use the direct transform.
pub const DEFAULT_DIRECT_THRESHOLD: usize = 4096;

/// Exponent sign of the kernel `exp(sign * 2 pi i jk / N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }
}

/// `exp(2 pi i k / n)` for `k < n`.
pub fn roots_of_unity(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
        .collect()
}

/// `X[k] = sum_j x[j] exp(sign 2 pi i jk / N)`.
pub fn dft(input: &[Complex64], sign: Sign, threshold: usize) -> Vec<Complex64> {
    if input.len() < threshold.max(2) {
        dft_direct(input, sign)
    } else {
        bluestein(input, sign)
    }
}

pub fn dft_direct(input: &[Complex64], sign: Sign) -> Vec<Complex64> {
    let n = input.len();
    let roots = roots_of_unity(n);
    (0..n)
        .map(|k| {
            let mut acc = ComplexSum::new();
            for (j, &x) in input.iter().enumerate() {
                let idx = (j as u64 * k as u64 % n as u64) as usize;
                let w = match sign {
                    Sign::Positive => roots[idx],
                    Sign::Negative => roots[idx].conj(),
                };
                acc.add(x * w);
            }
            acc.value()
        })
        .collect()
}

pub fn bluestein(input: &[Complex64], sign: Sign) -> Vec<Complex64> {
    let n = input.len();
    if n <= 1 {
        return input.to_vec();
    }
    // chirp[m] = exp(sign * pi i m^2 / n), with m^2 reduced mod 2n exactly
    let two_n = 2 * n as u64;
    let chirp: Vec<Complex64> = (0..n as u64)
        .map(|m| {
            let r = (m * m) % two_n;
            Complex64::from_polar(1.0, sign.value() * PI * r as f64 / n as f64)
        })
        .collect();
    let len = (2 * n - 1).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); len];
    for (j, (&x, &w)) in input.iter().zip(&chirp).enumerate() {
        a[j] = x * w;
    }
    let mut b = vec![Complex64::new(0.0, 0.0); len];
    b[0] = chirp[0].conj();
    for m in 1..n {
        b[m] = chirp[m].conj();
        b[len - m] = chirp[m].conj();
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    inv.process(&mut a);
    let scale = 1.0 / len as f64;
    (0..n).map(|k| a[k] * chirp[k] * scale).collect()
}
