//! Real-argument gamma and Riemann zeta functions.
//!
//! Both are implemented in-crate so the numerical core stays dependency-free:
//! gamma through the Lanczos rational approximation, zeta through the
//! alternating (eta) series with an Euler-accelerated tail and the relation
//! `zeta(s) = eta(s) / (1 - 2^{1-s})`.

use crate::error::{Error, Result};

/// Polynomial coefficients of the Lanczos approximation (g = 10.900511),
/// accurate to roughly 16 significant digits.
const LANCZOS_DK: &[f64] = &[
    2.4857408913875355e-5,
    1.0514237858172197,
    -3.4568709722201625,
    4.512277094668948,
    -2.9828522532357664,
    1.056397115771267,
    -1.9542877319164587e-1,
    1.709705434044412e-2,
    -5.719261174043057e-4,
    4.633994733599057e-6,
    -2.7199490848860772e-9,
];

const LANCZOS_R: f64 = 10.900511;
const TWO_SQRT_E_OVER_PI: f64 = 1.8603827342052657;

/// Gamma function for positive real arguments.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(format!("gamma requires x > 0, got {x}")));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the series argument in the well-conditioned range.
        let s = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |s, (i, &d)| s + d / (i as f64 - x));
        std::f64::consts::PI
            / ((std::f64::consts::PI * x).sin()
                * s
                * TWO_SQRT_E_OVER_PI
                * ((0.5 - x + LANCZOS_R) / std::f64::consts::E).powf(0.5 - x))
    } else {
        let s = LANCZOS_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_DK[0], |s, (i, &d)| s + d / (x + i as f64 - 1.0));
        s * TWO_SQRT_E_OVER_PI * ((x - 0.5 + LANCZOS_R) / std::f64::consts::E).powf(x - 0.5)
    }
}

/// Number of directly summed eta terms before the accelerated tail.
const ETA_DIRECT_TERMS: usize = 40;
/// Number of Euler-transform terms in the tail.
const ETA_EULER_TERMS: usize = 40;

/// Riemann zeta function for real `x != 1`.
///
/// Absolute error is below 1e-10 on `[-1, 0.99]`, the range needed by the
/// `h^{2-alpha}` quadrature correction (arguments `alpha - 1`).
pub fn zeta(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain(format!("zeta requires finite x, got {x}")));
    }
    if x == 1.0 {
        return Err(Error::domain("zeta has a pole at x = 1".to_string()));
    }
    // eta(x) = sum_{k>=1} (-1)^{k-1} k^{-x}, split into a direct part and an
    // Euler-transformed tail so the alternating series converges for all x.
    let m = ETA_DIRECT_TERMS;
    let mut eta = 0.0;
    let mut sign = 1.0;
    for k in 1..=m {
        eta += sign * (k as f64).powf(-x);
        sign = -sign;
    }
    // Tail sum_{k>m} (-1)^{k-1} k^{-x} = (-1)^m sum_n (D^n b)(0) / 2^{n+1}
    // with b_i = (m+1+i)^{-x} and D the forward-decrement difference.
    let mut d: Vec<f64> = (0..=ETA_EULER_TERMS)
        .map(|i| ((m + 1 + i) as f64).powf(-x))
        .collect();
    let mut tail = 0.0;
    let mut pow = 0.5;
    for _ in 0..=ETA_EULER_TERMS {
        tail += pow * d[0];
        pow *= 0.5;
        for i in 0..d.len() - 1 {
            d[i] -= d[i + 1];
        }
        d.pop();
        if d.is_empty() {
            break;
        }
    }
    eta += if m % 2 == 0 { tail } else { -tail };
    Ok(eta / (1.0 - 2f64.powf(1.0 - x)))
}
