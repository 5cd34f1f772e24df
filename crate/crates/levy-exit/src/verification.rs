//! Grid-refinement studies: manufactured-solution convergence and
//! self-convergence against a high-resolution reference.

use crate::discretization::{
    build_grid, manufactured_system, DriftSpec, ProblemKind, ProblemSpec,
};
use crate::error::{Error, Result};
use crate::solver::{profile_from_interior, solve_system, solve_with, SolverOptions};

/// What the errors in a [`ConvergenceReport`] are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    /// A closed-form solution.
    Analytic,
    /// The manufactured solution `(1 - x^2)_+`.
    Manufactured,
    /// A solve of the same problem at the given resolution.
    SelfResolution(usize),
}

/// Pointwise errors at a probe node for a ladder of resolutions, with the
/// observed orders `log2(e_J / e_{2J})` between consecutive entries.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub resolutions: Vec<usize>,
    pub probe_x: f64,
    pub errors: Vec<f64>,
    pub observed_orders: Vec<f64>,
    pub reference: ReferenceKind,
}

/// Observed orders from a sequence of errors at doubled resolutions.
pub fn observed_orders(errors: &[f64]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Err(Error::invalid("need at least two errors".to_string()));
    }
    if let Some(bad) = errors.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::invalid(format!("errors must be positive, got {bad}")));
    }
    Ok(errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect())
}

fn probe_node(resolution: usize, probe_x: f64) -> Result<i64> {
    let exact = probe_x * resolution as f64;
    let rounded = exact.round();
    if (exact - rounded).abs() > 1e-9 || rounded.abs() >= resolution as f64 {
        return Err(Error::invalid(format!(
            "probe x = {probe_x} is not an interior node at resolution {resolution}"
        )));
    }
    Ok(rounded as i64)
}

/// Solves the manufactured problem (`b = 1`, `d = 0`, `eps = 1`, `f = 0`)
/// at each resolution and compares against `(1 - x^2)_+` at the probe.
pub fn manufactured_study(
    alpha: f64,
    beta: f64,
    resolutions: &[usize],
    probe_x: f64,
) -> Result<ConvergenceReport> {
    if resolutions.len() < 2 {
        return Err(Error::invalid("need at least two resolutions".to_string()));
    }
    let spec = ProblemSpec::new(
        alpha,
        beta,
        0.0,
        1.0,
        1.0,
        DriftSpec::Zero,
        ProblemKind::MeanExitTime,
    )?;
    let opts = SolverOptions::default();
    let exact = 1.0 - probe_x * probe_x;
    let mut errors = Vec::with_capacity(resolutions.len());
    for &j in resolutions {
        let node = probe_node(j, probe_x)?;
        let grid = build_grid(j)?;
        let system = manufactured_system(&spec, &grid)?;
        let (v, _) = solve_system(&system, &opts)?;
        let got = v[grid.interior_index(node)];
        errors.push((got - exact).abs());
    }
    let orders = observed_orders(&errors)?;
    Ok(ConvergenceReport {
        resolutions: resolutions.to_vec(),
        probe_x,
        errors,
        observed_orders: orders,
        reference: ReferenceKind::Manufactured,
    })
}

/// Solves `spec` at each resolution and measures errors against a solve at
/// `reference_resolution` (required to be at least eight times the largest
/// entry) at the shared probe node.
pub fn self_convergence_study(
    spec: &ProblemSpec,
    resolutions: &[usize],
    reference_resolution: usize,
    probe_x: f64,
) -> Result<ConvergenceReport> {
    if resolutions.len() < 2 {
        return Err(Error::invalid("need at least two resolutions".to_string()));
    }
    let max_j = *resolutions.iter().max().unwrap();
    if reference_resolution < 8 * max_j {
        return Err(Error::invalid(format!(
            "reference resolution {reference_resolution} must be >= 8 * {max_j}"
        )));
    }
    let opts = SolverOptions::default();
    let ref_node = probe_node(reference_resolution, probe_x)?;
    let reference = solve_with(spec, reference_resolution, &opts)?;
    let ref_value =
        reference.values[(ref_node + reference_resolution as i64) as usize];

    let mut errors = Vec::with_capacity(resolutions.len());
    for &j in resolutions {
        let node = probe_node(j, probe_x)?;
        let profile = solve_with(spec, j, &opts)?;
        let got = profile.values[(node + j as i64) as usize];
        errors.push((got - ref_value).abs());
    }
    let orders = observed_orders(&errors)?;
    Ok(ConvergenceReport {
        resolutions: resolutions.to_vec(),
        probe_x,
        errors,
        observed_orders: orders,
        reference: ReferenceKind::SelfResolution(reference_resolution),
    })
}
