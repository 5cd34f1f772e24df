//! Solver library for mean first exit time (MET) and escape probability of
//! scalar stochastic differential equations driven by an asymmetric
//! alpha-stable process, optionally mixed with Brownian noise:
//!
//! ```text
//! dX_t = f(X_t) dt + dL_t,     X_0 = x in D = (-b, b),
//! ```
//!
//! where `L_t` has generating triplet `(0, d, eps * nu)` for the two-sided
//! power-law jump measure `nu(dy) = (C1 1_{y>0} + C2 1_{y<0}) |y|^{-1-alpha} dy`.
//!
//! The MET solves the nonlocal equation `A u = -1` on `D` with `u = 0`
//! outside, and the escape probability to the right target set `E = [b, inf)`
//! solves `A p = 0` with `p = 1` on `E` and `p = 0` on the remaining
//! exterior. Both are discretized on a uniform grid of the rescaled domain
//! `[-1, 1]` with a punched-hole trapezoidal rule whose leading singular
//! quadrature error is absorbed into an `h^{2-alpha}` diffusion correction.
//! The resulting dense system is solved by restarted GMRES with a direct
//! elimination fallback.
//!
//! A Chambers-Mallows-Stuck sampler plus Euler-Maruyama path simulator acts
//! as an independent cross-check, and the `verification` module packages
//! grid-refinement studies.

pub mod discretization;
pub mod error;
pub mod levy;
pub mod linalg;
pub mod monte_carlo;
pub mod solver;
pub mod special;
pub mod verification;

pub(crate) mod quad;

pub use discretization::{
    build_grid, DenseSystem, DriftSpec, Grid, ProblemKind, ProblemSpec,
};
pub use error::{Error, Result};
pub use levy::{LevyCoefficients, StableParams};
pub use linalg::{DenseMatrix, SolveMethod, SolveStats};
pub use monte_carlo::{ExitEstimates, McConfig, McEstimate};
pub use solver::{SolutionProfile, SolverOptions};
