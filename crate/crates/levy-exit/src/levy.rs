//! Stable-law constants and the scalar coefficient functions the
//! discretization needs.

use num_complex::Complex64;

use crate::discretization::DriftSpec;
use crate::error::{Error, Result};
use crate::quad;
use crate::special;

/// Arguments within this distance of 1 are routed to the alpha = 1 branch to
/// avoid catastrophic cancellation in `(b^{1-alpha} - 1)/(1 - alpha)`; both
/// branches agree in the limit.
pub const ALPHA_ONE_TOLERANCE: f64 = 1e-12;

/// True when `alpha` should take the alpha = 1 formulas.
#[inline]
pub fn is_alpha_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() <= ALPHA_ONE_TOLERANCE
}

/// Parameters of a stable law `S_alpha(sigma, beta, mu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    /// Index of stability, `0 < alpha < 2`.
    pub alpha: f64,
    /// Skewness, `-1 <= beta <= 1`.
    pub beta: f64,
    /// Scale, `sigma >= 0`.
    pub sigma: f64,
    /// Shift.
    pub mu: f64,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64, mu: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::invalid(format!(
                "index of stability must satisfy 0 < alpha < 2, got {alpha}"
            )));
        }
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::invalid(format!(
                "skewness must satisfy -1 <= beta <= 1, got {beta}"
            )));
        }
        if !(sigma >= 0.0) {
            return Err(Error::invalid(format!("scale must be >= 0, got {sigma}")));
        }
        if !mu.is_finite() {
            return Err(Error::invalid(format!("shift must be finite, got {mu}")));
        }
        Ok(StableParams { alpha, beta, sigma, mu })
    }

    /// Standard law `S_alpha(1, beta, 0)`.
    pub fn standard(alpha: f64, beta: f64) -> Result<Self> {
        StableParams::new(alpha, beta, 1.0, 0.0)
    }

    #[inline]
    pub(crate) fn is_alpha_one(&self) -> bool {
        is_alpha_one(self.alpha)
    }
}

/// Normalizing constant of the stable jump measure,
/// `alpha (1 - alpha) / (Gamma(2 - alpha) cos(pi alpha / 2))` for
/// `alpha != 1` and `2/pi` at `alpha = 1`; continuous across the branch.
pub fn jump_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain(format!(
            "jump constant requires 0 < alpha < 2, got {alpha}"
        )));
    }
    if is_alpha_one(alpha) {
        return Ok(std::f64::consts::FRAC_2_PI);
    }
    let g = special::gamma_unchecked(2.0 - alpha);
    Ok(alpha * (1.0 - alpha) / (g * (std::f64::consts::FRAC_PI_2 * alpha).cos()))
}

/// One-sided jump intensities and the small-jump compensator drift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyCoefficients {
    /// Total intensity `C_alpha = right + left`.
    pub total: f64,
    /// Intensity of rightward jumps, `C_alpha (1 + beta)/2`.
    pub right: f64,
    /// Intensity of leftward jumps, `C_alpha (1 - beta)/2`.
    pub left: f64,
    /// Drift produced by compensating jumps below unit size.
    pub compensator: f64,
}

/// Computes the jump intensities and compensator drift for a stable law.
pub fn jump_coefficients(params: &StableParams) -> Result<LevyCoefficients> {
    let total = jump_constant(params.alpha)?;
    let right = total * (1.0 + params.beta) / 2.0;
    let left = total * (1.0 - params.beta) / 2.0;
    let compensator = if params.is_alpha_one() {
        quad::alpha_one_compensator_constant() * (left - right)
    } else {
        (right - left) / (1.0 - params.alpha)
    };
    Ok(LevyCoefficients { total, right, left, compensator })
}

/// Advection coefficient of the rescaled exit problem: the physical drift
/// plus the compensator drift plus the term produced by widening the
/// small-jump cutoff from unit radius to the domain half-width `b`.
pub fn effective_drift(
    x: f64,
    drift: &DriftSpec,
    params: &StableParams,
    eps: f64,
    b: f64,
) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::invalid(format!("half-width must be positive, got {b}")));
    }
    if !(eps >= 0.0) {
        return Err(Error::invalid(format!("noise intensity must be >= 0, got {eps}")));
    }
    let co = jump_coefficients(params)?;
    let cutoff = if params.is_alpha_one() {
        eps * (co.right - co.left) * b.ln()
    } else {
        eps * (co.right - co.left) * (b.powf(1.0 - params.alpha) - 1.0) / (1.0 - params.alpha)
    };
    Ok(drift.eval(x) + eps * co.compensator + cutoff)
}

/// Boundary advection factor `g(s)` of the reformulated jump integral:
/// `(1 - (1 - |s|)^{1-alpha})/(1 - alpha)` for `alpha != 1`,
/// `-ln(1 - |s|)` at `alpha = 1`. Defined for `|s| < 1`.
pub fn boundary_drift(s: f64, alpha: f64) -> Result<f64> {
    let a = s.abs();
    if !(a < 1.0) {
        return Err(Error::domain(format!(
            "boundary drift factor requires |s| < 1, got {s}"
        )));
    }
    if is_alpha_one(alpha) {
        Ok(-(1.0 - a).ln())
    } else {
        Ok((1.0 - (1.0 - a).powf(1.0 - alpha)) / (1.0 - alpha))
    }
}

/// Characteristic function `E[exp(i lambda L_t)]` of the stable process.
pub fn characteristic_fn(lambda: f64, t: f64, params: &StableParams) -> Complex64 {
    if lambda == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let sgn = lambda.signum();
    let abs = lambda.abs();
    let exponent = if params.is_alpha_one() {
        let skew = params.beta * std::f64::consts::FRAC_2_PI * sgn * abs.ln();
        Complex64::new(-params.sigma * abs * t, -params.sigma * abs * t * skew)
            + Complex64::new(0.0, params.mu * lambda * t)
    } else {
        let scale = params.sigma.powf(params.alpha) * abs.powf(params.alpha) * t;
        let skew = params.beta * sgn * (std::f64::consts::FRAC_PI_2 * params.alpha).tan();
        Complex64::new(-scale, scale * skew) + Complex64::new(0.0, params.mu * lambda * t)
    };
    exponent.exp()
}
