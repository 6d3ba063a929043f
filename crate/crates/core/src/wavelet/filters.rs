//! Daubechies orthonormal filters by spectral factorisation.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Compactly supported orthonormal wavelet system with `order` vanishing
/// moments.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletSystem {
    pub order: usize,
    pub low: Vec<f64>,
    pub high: Vec<f64>,
}

impl WaveletSystem {
    /// Daubechies filters with `order` vanishing moments (`2 * order` taps).
    pub fn daubechies(order: usize) -> Result<Self> {
        if order == 0 || order > 12 {
            return Err(Error::InvalidParameter(format!(
                "Daubechies order {order} outside 1..=12"
            )));
        }
        let low = daubechies_low(order);
        let len = low.len();
        let high = (0..len)
            .map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } * low[len - 1 - k])
            .collect();
        Ok(WaveletSystem { order, low, high })
    }

    pub fn len(&self) -> usize {
        self.low.len()
    }

    pub fn is_empty(&self) -> bool {
        self.low.is_empty()
    }

    /// Length of the support interval of the scaling function.
    pub fn support_length(&self) -> usize {
        self.low.len() - 1
    }

    /// Largest deviation from orthonormality of the even shifts of the low
    /// pass filter and of low against high.
    pub fn orthonormality_defect(&self) -> f64 {
        let len = self.len() as isize;
        let mut worst = 0.0f64;
        let mut shift = 0;
        while shift < len {
            let dot = |a: &[f64], b: &[f64]| -> f64 {
                (0..len - shift)
                    .map(|k| a[k as usize] * b[(k + shift) as usize])
                    .sum()
            };
            let target = if shift == 0 { 1.0 } else { 0.0 };
            worst = worst.max((dot(&self.low, &self.low) - target).abs());
            worst = worst.max((dot(&self.high, &self.high) - target).abs());
            worst = worst.max(dot(&self.low, &self.high).abs());
            worst = worst.max(dot(&self.high, &self.low).abs());
            shift += 2;
        }
        worst
    }

    /// Largest `|Σ_k k^m g_k|` over `m < order`, relative to `Σ_k k^m |g_k|`.
    pub fn moment_defect(&self) -> f64 {
        (0..self.order)
            .map(|m| {
                let (s, a) = self.high.iter().enumerate().fold((0.0, 0.0), |(s, a), (k, g)| {
                    let km = (k as f64).powi(m as i32);
                    (s + km * g, a + km * g.abs())
                });
                (s / a).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn daubechies_low(order: usize) -> Vec<f64> {
    // P(y) = Σ C(order-1+k, k) y^k, |m0|² = cos^{2N}(ω/2) P(sin²(ω/2))
    let coeffs: Vec<f64> = (0..order).map(|k| binomial(order - 1 + k, k)).collect();
    let roots = polynomial_roots(&coeffs);
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..order {
        poly = multiply(&poly, &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
    }
    for y in roots {
        // z + 1/z = 2 - 4y, keep the root inside the unit circle
        let b = Complex64::new(2.0, 0.0) - y * 4.0;
        let disc = (b * b - 4.0).sqrt();
        let z1 = (b + disc) * 0.5;
        let z2 = (b - disc) * 0.5;
        let z = if z1.norm() < z2.norm() { z1 } else { z2 };
        poly = multiply(&poly, &[-z, Complex64::new(1.0, 0.0)]);
    }
    let real: Vec<f64> = poly.iter().map(|c| c.re).collect();
    let sum: f64 = real.iter().sum();
    let s = std::f64::consts::SQRT_2 / sum;
    real.iter().map(|v| v * s).collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn multiply(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// All complex roots of the polynomial with ascending coefficients, by
/// Durand–Kerner iteration followed by Newton polishing.
fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..deg].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<Complex64> = (0..deg)
        .map(|i| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * i as f64 / deg as f64))
        .collect();
    for _ in 0..2000 {
        let mut change = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            let step = eval(&monic, z[i]) / denom;
            z[i] -= step;
            change = change.max(step.norm() / (1.0 + z[i].norm()));
        }
        if change < 1e-15 {
            break;
        }
    }
    let deriv: Vec<f64> = (1..=deg).map(|k| k as f64 * monic[k]).collect();
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = eval(&deriv, *zi);
            if d.norm() > 0.0 {
                *zi -= eval(&monic, *zi) / d;
            }
        }
    }
    z
}
