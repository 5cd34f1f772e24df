//! Pipeline: rescale to the unit domain, assemble, solve, map back to
//! physical coordinates. Also houses the closed-form symmetric-case
//! references and the reflection-symmetry check.

use crate::discretization::{
    build_grid, build_system, DenseSystem, Grid, ProblemKind, ProblemSpec,
};
use crate::error::{Error, Result};
use crate::levy::is_alpha_one;
use crate::linalg::{direct_solve, gmres_solve, DenseMatrix, GmresOptions, SolveMethod, SolveStats};
use crate::quad::adaptive_simpson;
use crate::special;

/// Linear-solver settings for a solve run.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tol: f64,
    pub restart: usize,
    /// Inner-iteration cap; `None` means ten times the system size.
    pub max_iters: Option<usize>,
    /// Diagonal preconditioning for the GMRES stage.
    pub jacobi: bool,
    /// Fall back to direct elimination when GMRES stagnates.
    pub direct_fallback: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            restart: 50,
            max_iters: None,
            jacobi: false,
            direct_fallback: true,
        }
    }
}

impl SolverOptions {
    fn gmres(&self) -> GmresOptions {
        GmresOptions {
            tol: self.tol,
            restart: self.restart,
            max_iters: self.max_iters,
            jacobi: self.jacobi,
        }
    }
}

/// Nodal solution on the physical grid `x_j = b s_j`, including the boundary
/// nodes. For the mean exit time both boundary values are 0; for the
/// escape probability the reported boundary values are the exterior data,
/// 0 at `-b` and 1 at `+b`.
#[derive(Debug, Clone)]
pub struct SolutionProfile {
    pub x_nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub stats: SolveStats,
    pub spec: ProblemSpec,
    pub resolution: usize,
}

impl SolutionProfile {
    /// Values at the interior nodes only.
    pub fn interior_values(&self) -> &[f64] {
        &self.values[1..self.values.len() - 1]
    }

    /// Index of the node closest to `x`; `None` outside the domain.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let b = self.spec.half_width;
        if x.abs() > b {
            return None;
        }
        let j = (x / b * self.resolution as f64).round() as i64 + self.resolution as i64;
        Some(j as usize)
    }

    /// Value at the node closest to `x`.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        self.node_index(x).map(|i| self.values[i])
    }
}

/// Solves an assembled system: GMRES first, direct elimination as fallback.
pub(crate) fn solve_system(
    system: &DenseSystem,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolveStats)> {
    match gmres_solve(&system.matrix, &system.rhs, &opts.gmres()) {
        Ok(out) => Ok(out),
        Err(Error::NonConvergence { stats, best }) if opts.direct_fallback => {
            match direct_solve(&system.matrix, &system.rhs) {
                Ok(x) => {
                    let res = relative_residual(&system.matrix, &x, &system.rhs);
                    let stats = SolveStats {
                        iterations: stats.iterations,
                        final_residual: res,
                        converged: res <= opts.tol,
                        method: SolveMethod::Direct,
                    };
                    Ok((x, stats))
                }
                Err(e) => Err(e),
            }
        }
        Err(e) => Err(e),
    }
}

fn relative_residual(m: &DenseMatrix, x: &[f64], b: &[f64]) -> f64 {
    let mut ax = vec![0.0; x.len()];
    m.matvec(x, &mut ax);
    let num: f64 = ax.iter().zip(b).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Solves the exit problem at the given resolution with default options.
pub fn solve(spec: &ProblemSpec, resolution: usize) -> Result<SolutionProfile> {
    solve_with(spec, resolution, &SolverOptions::default())
}

/// Solves the exit problem with explicit solver options.
pub fn solve_with(
    spec: &ProblemSpec,
    resolution: usize,
    opts: &SolverOptions,
) -> Result<SolutionProfile> {
    let grid = build_grid(resolution)?;
    let system = build_system(spec, &grid)?;
    let (v, stats) = solve_system(&system, opts)?;
    Ok(profile_from_interior(spec, &grid, v, stats))
}

pub(crate) fn profile_from_interior(
    spec: &ProblemSpec,
    grid: &Grid,
    interior: Vec<f64>,
    stats: SolveStats,
) -> SolutionProfile {
    let b = spec.half_width;
    let jj = grid.resolution() as i64;
    let x_nodes: Vec<f64> = (-jj..=jj).map(|j| b * grid.node(j)).collect();
    let right = match spec.kind {
        ProblemKind::MeanExitTime => 0.0,
        ProblemKind::EscapeRight => 1.0,
    };
    let mut values = Vec::with_capacity(x_nodes.len());
    values.push(0.0);
    values.extend(interior);
    values.push(right);
    SolutionProfile {
        x_nodes,
        values,
        stats,
        spec: spec.clone(),
        resolution: grid.resolution(),
    }
}

/// Closed-form mean exit time of the symmetric pure-jump case (`beta = 0`,
/// `d = 0`, `f = 0`):
/// `(b^alpha / eps) sqrt(pi) / (2^alpha Gamma(1 + alpha/2) Gamma((1+alpha)/2))
///  (1 - (x/b)^2)^{alpha/2}`.
pub fn symmetric_mean_exit_time(alpha: f64, x: f64, b: f64, eps: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain(format!("alpha must be in (0, 2), got {alpha}")));
    }
    if x.abs() > b {
        return Err(Error::domain(format!("|x| <= b required, got x = {x}, b = {b}")));
    }
    if !(eps > 0.0) {
        return Err(Error::domain(format!("eps > 0 required, got {eps}")));
    }
    let g1 = special::gamma(1.0 + alpha / 2.0)?;
    let g2 = special::gamma((1.0 + alpha) / 2.0)?;
    let c = std::f64::consts::PI.sqrt() / (2f64.powf(alpha) * g1 * g2);
    let s = x / b;
    Ok(b.powf(alpha) / eps * c * (1.0 - s * s).powf(alpha / 2.0))
}

/// Closed-form escape probability of the symmetric pure-jump case
/// (`beta = 0`, `d = 0`): `(2b)^{1-alpha} Gamma(alpha) / Gamma(alpha/2)^2
/// int_{-b}^x (b^2 - y^2)^{alpha/2 - 1} dy`, with the endpoint singularity
/// removed by substitution before adaptive quadrature.
pub fn symmetric_escape_probability(alpha: f64, x: f64, b: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain(format!("alpha must be in (0, 2), got {alpha}")));
    }
    if !(b > 0.0) {
        return Err(Error::domain(format!("b > 0 required, got {b}")));
    }
    if x.abs() > b {
        return Err(Error::domain(format!("|x| <= b required, got x = {x}, b = {b}")));
    }
    let coef = (2.0 * b).powf(1.0 - alpha) * special::gamma(alpha)?
        / special::gamma(alpha / 2.0)?.powi(2);
    // Normalize to t = y/b: integral = b^{alpha-1} int_{-1}^{z} (1-t^2)^{c-1} dt.
    let z = x / b;
    let c = alpha / 2.0;
    Ok(coef * b.powf(alpha - 1.0) * interval_power_integral(z, c))
}

/// `int_{-1}^z (1 - t^2)^{c-1} dt` for `0 < c < 1`, accurate to 1e-10.
///
/// Split at 0; on each half the substitution `t = -1 + w^{1/c}` (mirrored on
/// the right) turns the endpoint singularity into a smooth integrand
/// `(1/c) (2 - w^{1/c})^{c-1}`.
fn interval_power_integral(z: f64, c: f64) -> f64 {
    let tol = 1e-12;
    let left_part = |upper_t: f64| -> f64 {
        // int_{-1}^{upper_t}, upper_t <= 0
        let w_hi = (1.0 + upper_t).powf(c);
        adaptive_simpson(
            &|w: f64| (2.0 - w.powf(1.0 / c)).powf(c - 1.0) / c,
            0.0,
            w_hi,
            tol,
        )
    };
    let right_part = |lower_t: f64, upper_t: f64| -> f64 {
        // int over [lower_t, upper_t] with 0 <= lower_t <= upper_t, handled
        // from the right endpoint singularity at 1
        let w_lo = (1.0 - upper_t).powf(c);
        let w_hi = (1.0 - lower_t).powf(c);
        adaptive_simpson(
            &|w: f64| (2.0 - w.powf(1.0 / c)).powf(c - 1.0) / c,
            w_lo,
            w_hi,
            tol,
        )
    };
    if z <= 0.0 {
        left_part(z)
    } else {
        left_part(0.0) + right_part(0.0, z)
    }
}

/// Maximum deviation from the reflection identity `u_{-beta}(-x) = u_beta(x)`
/// over the interior nodes, measured by running the two solves. Requires an
/// odd drift.
pub fn symmetry_check(spec: &ProblemSpec, resolution: usize) -> Result<f64> {
    if !spec.drift.is_odd() {
        return Err(Error::invalid(
            "symmetry check requires an odd drift term".to_string(),
        ));
    }
    let mut mirrored = spec.clone();
    mirrored.stable.beta = -spec.stable.beta;
    let a = solve(spec, resolution)?;
    let b = solve(&mirrored, resolution)?;
    let n = a.values.len();
    let mut worst = 0.0f64;
    for i in 1..n - 1 {
        let d = (b.values[n - 1 - i] - a.values[i]).abs();
        worst = worst.max(d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::DriftSpec;

    fn met_spec(alpha: f64, beta: f64, d: f64, eps: f64, b: f64) -> ProblemSpec {
        ProblemSpec::new(alpha, beta, d, eps, b, DriftSpec::Zero, ProblemKind::MeanExitTime)
            .unwrap()
    }

    #[test]
    fn brownian_limit_exact_quadratic() {
        // eps = 0, d = 1, b = 1: u = 1 - x^2; the central scheme is exact on
        // quadratics so only solver error remains
        let spec = met_spec(1.5, 0.0, 1.0, 0.0, 1.0);
        let p = solve(&spec, 40).unwrap();
        for (x, u) in p.x_nodes.iter().zip(&p.values) {
            assert!((u - (1.0 - x * x)).abs() < 1e-8, "x={x} u={u}");
        }
        assert!(p.stats.converged);
    }

    #[test]
    fn symmetric_met_closed_form_values() {
        let v = symmetric_mean_exit_time(1.5, 0.0, 1.0, 1.0).unwrap();
        assert!((v - 0.752252778063675049).abs() < 1e-12);
        let v = symmetric_mean_exit_time(0.5, 0.0, 1.0, 1.0).unwrap();
        assert!((v - 1.12837916709551257).abs() < 1e-12);
        let v = symmetric_mean_exit_time(1.5, -0.5, 1.0, 1.0).unwrap();
        assert!((v - 0.606261162328464981).abs() < 1e-12);
        assert_eq!(symmetric_mean_exit_time(0.7, 1.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(symmetric_mean_exit_time(0.7, -1.0, 1.0, 1.0).unwrap(), 0.0);
        assert!(symmetric_mean_exit_time(0.7, 1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn symmetric_met_scaling_in_b_and_eps() {
        // u(0) scales like b^alpha / eps
        let base = symmetric_mean_exit_time(1.2, 0.0, 1.0, 1.0).unwrap();
        let scaled = symmetric_mean_exit_time(1.2, 0.0, 2.0, 0.5).unwrap();
        assert!((scaled - base * 2f64.powf(1.2) / 0.5).abs() < 1e-12);
    }

    #[test]
    fn symmetric_escape_normalization_and_midpoint() {
        for &(alpha, b) in &[(0.5, 1.0), (1.5, 1.0), (0.5, 4.0), (1.2, 2.0)] {
            let p0 = symmetric_escape_probability(alpha, -b, b).unwrap();
            let p1 = symmetric_escape_probability(alpha, b, b).unwrap();
            let pm = symmetric_escape_probability(alpha, 0.0, b).unwrap();
            assert!(p0.abs() < 1e-10, "P(-b) = {p0}");
            assert!((p1 - 1.0).abs() < 1e-10, "P(b) = {p1}");
            assert!((pm - 0.5).abs() < 1e-10, "P(0) = {pm}");
        }
    }

    #[test]
    fn symmetric_escape_reference_values() {
        // regularized incomplete-beta references computed independently
        let v = symmetric_escape_probability(0.5, 0.5, 1.0).unwrap();
        assert!((v - 0.602243221682644163).abs() < 1e-8, "got {v}");
        let v = symmetric_escape_probability(1.5, -0.5, 1.0).unwrap();
        assert!((v - 0.286523695044399719).abs() < 1e-8, "got {v}");
        // b-independence of the profile shape
        let v4 = symmetric_escape_probability(0.5, 2.0, 4.0).unwrap();
        let v1 = symmetric_escape_probability(0.5, 0.5, 1.0).unwrap();
        assert!((v4 - v1).abs() < 1e-9);
    }

    #[test]
    fn met_matches_closed_form_small_grid() {
        // coarse-grid sanity; the acceptance suite runs the full-size check
        let spec = met_spec(1.5, 0.0, 0.0, 1.0, 1.0);
        let p = solve(&spec, 80).unwrap();
        let got = p.value_at(0.0).unwrap();
        assert!((got - 0.752252778063675049).abs() < 5e-3, "got {got}");
    }

    #[test]
    fn escape_midpoint_symmetric() {
        let spec = ProblemSpec::new(1.5, 0.0, 0.0, 1.0, 1.0, DriftSpec::Zero,
            ProblemKind::EscapeRight).unwrap();
        let p = solve(&spec, 80).unwrap();
        assert!((p.value_at(0.0).unwrap() - 0.5).abs() < 5e-3);
        assert_eq!(p.values[0], 0.0);
        assert_eq!(*p.values.last().unwrap(), 1.0);
        // interior values within [0, 1] up to slack
        for v in p.interior_values() {
            assert!(*v >= -1e-6 && *v <= 1.0 + 1e-6);
        }
    }

    #[test]
    fn met_positive_interior() {
        for &(alpha, beta) in &[(0.5, 0.5), (1.0, 1.0), (1.5, -0.7)] {
            let spec = met_spec(alpha, beta, 0.0, 1.0, 1.0);
            let p = solve(&spec, 60).unwrap();
            for v in p.interior_values() {
                assert!(*v >= -1e-8, "negative MET value {v}");
            }
        }
    }

    #[test]
    fn symmetry_check_small() {
        let spec = met_spec(1.5, 0.5, 0.0, 1.0, 1.0);
        let gap = symmetry_check(&spec, 40).unwrap();
        assert!(gap <= 1e-8, "gap = {gap:.3e}");
        // beta = 0 is self-symmetric
        let spec = met_spec(1.5, 0.0, 0.0, 1.0, 1.0);
        let gap = symmetry_check(&spec, 40).unwrap();
        assert!(gap <= 1e-8);
    }

    #[test]
    fn symmetry_check_requires_odd_drift() {
        let spec = ProblemSpec::new(
            1.5,
            0.5,
            0.0,
            1.0,
            1.0,
            DriftSpec::Polynomial { coefficients: vec![0.5] },
            ProblemKind::MeanExitTime,
        )
        .unwrap();
        assert!(symmetry_check(&spec, 20).is_err());
    }

    #[test]
    fn one_sided_alpha_guard() {
        // alpha within 1e-12 of 1 takes the alpha = 1 branch
        assert!(is_alpha_one(1.0 + 5e-13));
        assert!(!is_alpha_one(1.0 + 1e-9));
    }
}
