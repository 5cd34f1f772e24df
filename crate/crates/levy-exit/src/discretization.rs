//! Uniform grid, dense assembly of the nonlocal operator, and right-hand
//! sides for the exit-time, escape-probability and manufactured problems.
//!
//! The rescaled domain is `[-1, 1]`, split into `2J` intervals with nodes
//! `s_j = j/J`, `-J <= j <= J`. Unknowns are the interior nodes
//! `j = -J+1 .. J-1`, stored at matrix index `j + J - 1`. Row `j` combines
//!
//! * a second difference weighted by [`correction_coefficient`] (physical
//!   diffusion plus the `h^{2-alpha}` punched-hole quadrature correction),
//! * an advection term whose coefficient splits off the boundary factor
//!   `g(s)`,
//! * a killing term from the jump mass that leaves the domain, and
//! * three trapezoidal sums over the jump kernel with the singular node
//!   omitted and endpoint weights halved per sum convention: the
//!   compensated sums halve only the node at the far end of their
//!   integration range, the uncompensated tail sum halves both ends.
//!
//! For `alpha <= 1` the first-derivative stencils at the two rows next to
//! the boundary are one-sided into the interior; the solutions can be
//! discontinuous at the boundary there and a central difference would reach
//! across the jump.
//!
//! Rows with `j < 0` are generated by mirroring the `j >= 0` routine with
//! the jump intensities swapped and the advection reflected. This is
//! algebraically the stated scheme and makes the reflection symmetry of the
//! assembled matrix under skewness negation exact in floating point.

use crate::error::{Error, Result};
use crate::levy::{
    boundary_drift, effective_drift, is_alpha_one, jump_coefficients, jump_constant,
    LevyCoefficients, StableParams,
};
use crate::linalg::DenseMatrix;
use crate::special;

/// Drift term `f` of the SDE.
#[derive(Debug, Clone, PartialEq)]
pub enum DriftSpec {
    /// `f(x) = 0`.
    Zero,
    /// `f(x) = slope * x`.
    Linear { slope: f64 },
    /// `f(x) = c_0 + c_1 x + c_2 x^2 + ...`, ascending powers.
    Polynomial { coefficients: Vec<f64> },
}

impl DriftSpec {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            DriftSpec::Zero => 0.0,
            DriftSpec::Linear { slope } => slope * x,
            DriftSpec::Polynomial { coefficients } => {
                let mut acc = 0.0;
                for &c in coefficients.iter().rev() {
                    acc = acc * x + c;
                }
                acc
            }
        }
    }

    /// True when every even-power coefficient vanishes, so `f(-x) = -f(x)`.
    pub fn is_odd(&self) -> bool {
        match self {
            DriftSpec::Zero | DriftSpec::Linear { .. } => true,
            DriftSpec::Polynomial { coefficients } => coefficients
                .iter()
                .step_by(2)
                .all(|&c| c == 0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DriftSpec::Zero => true,
            DriftSpec::Linear { slope } => *slope == 0.0,
            DriftSpec::Polynomial { coefficients } => coefficients.iter().all(|&c| c == 0.0),
        }
    }
}

/// Which exit quantity to solve for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Mean first exit time from `(-b, b)`.
    MeanExitTime,
    /// Probability of first landing in `E = [b, inf)` upon exit.
    EscapeRight,
}

/// Full description of an exit problem on the symmetric domain `(-b, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    /// Stable parameters of the driving noise; the exit problem fixes
    /// `sigma = 1`, `mu = 0`.
    pub stable: StableParams,
    /// Intensity `d >= 0` of the Gaussian part.
    pub gaussian_intensity: f64,
    /// Intensity `eps >= 0` of the jump part.
    pub levy_intensity: f64,
    /// Domain half-width `b > 0`.
    pub half_width: f64,
    /// Drift term `f`.
    pub drift: DriftSpec,
    pub kind: ProblemKind,
}

impl ProblemSpec {
    pub fn new(
        alpha: f64,
        beta: f64,
        gaussian_intensity: f64,
        levy_intensity: f64,
        half_width: f64,
        drift: DriftSpec,
        kind: ProblemKind,
    ) -> Result<Self> {
        let stable = StableParams::standard(alpha, beta)?;
        if !(gaussian_intensity >= 0.0) {
            return Err(Error::invalid(format!(
                "Gaussian intensity must be >= 0, got {gaussian_intensity}"
            )));
        }
        if !(levy_intensity >= 0.0) {
            return Err(Error::invalid(format!(
                "jump intensity must be >= 0, got {levy_intensity}"
            )));
        }
        if gaussian_intensity + levy_intensity <= 0.0 {
            return Err(Error::invalid(
                "pure transport problem: need d + eps > 0".to_string(),
            ));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::invalid(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        Ok(ProblemSpec {
            stable,
            gaussian_intensity,
            levy_intensity,
            half_width,
            drift,
            kind,
        })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.stable.alpha
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.stable.beta
    }
}

/// Uniform mesh of the rescaled domain `[-1, 1]` with `2J` subintervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    resolution: usize,
}

impl Grid {
    /// Number of subintervals per half-domain (`J`).
    #[inline]
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Mesh width `h = 1/J`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    /// Node `s_j = j/J` for `-J <= j <= J`; the end nodes are exactly -1, 1.
    #[inline]
    pub fn node(&self, j: i64) -> f64 {
        j as f64 / self.resolution as f64
    }

    /// All `2J + 1` nodes in ascending order.
    pub fn nodes(&self) -> Vec<f64> {
        let j = self.resolution as i64;
        (-j..=j).map(|i| self.node(i)).collect()
    }

    /// Number of interior unknowns, `2J - 1`.
    #[inline]
    pub fn interior_len(&self) -> usize {
        2 * self.resolution - 1
    }

    /// Matrix index of interior node `j`.
    #[inline]
    pub fn interior_index(&self, j: i64) -> usize {
        (j + self.resolution as i64 - 1) as usize
    }
}

/// Builds the uniform grid; `J >= 2`.
pub fn build_grid(resolution: usize) -> Result<Grid> {
    if resolution < 2 {
        return Err(Error::invalid(format!(
            "grid needs at least 2 subintervals per half-domain, got {resolution}"
        )));
    }
    Ok(Grid { resolution })
}

/// Dense operator matrix over the interior unknowns together with the
/// coefficients that multiplied the two boundary nodes before elimination.
/// For homogeneous exterior data the couplings drop out; for the escape
/// problem the right coupling times the boundary value 1 moves to the
/// right-hand side.
#[derive(Debug, Clone)]
pub struct AssembledOperator {
    pub matrix: DenseMatrix,
    /// Per-row coefficient of the node at `s = -1`.
    pub left_boundary: Vec<f64>,
    /// Per-row coefficient of the node at `s = +1`.
    pub right_boundary: Vec<f64>,
}

/// Assembled linear system `matrix * v = rhs` over the interior unknowns,
/// ordered `j = -J+1 .. J-1` at row `j + J - 1`.
#[derive(Debug, Clone)]
pub struct DenseSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
}

/// Coefficient of the second-difference term: physical diffusion `d/(2 b^2)`
/// plus the correction `-eps b^{-alpha} C_alpha zeta(alpha - 1) h^{2-alpha}/2`
/// absorbing the leading error of the punched-hole trapezoidal rule.
/// `zeta(alpha - 1) < 0` on `0 < alpha < 2`, so the correction adds positive
/// diffusion.
pub fn correction_coefficient(spec: &ProblemSpec, grid: &Grid) -> f64 {
    let alpha = spec.alpha();
    let b = spec.half_width;
    let diffusion = spec.gaussian_intensity / (2.0 * b * b);
    if spec.levy_intensity == 0.0 {
        return diffusion;
    }
    let total = jump_constant(alpha).expect("alpha validated by ProblemSpec");
    let z = special::zeta(alpha - 1.0).expect("alpha - 1 < 1 for alpha < 2");
    let h = grid.spacing();
    diffusion - spec.levy_intensity * b.powf(-alpha) * total * z * h.powf(2.0 - alpha) / 2.0
}

struct AssemblyConfig {
    /// Include the compensator drift constant in the advection coefficient.
    include_compensator: bool,
    /// Use one-sided first differences at the rows next to the boundary for
    /// `alpha <= 1`.
    one_sided: bool,
}

/// Assembles the operator of the exit problem (advection coefficient from
/// [`effective_drift`], one-sided boundary stencils for `alpha <= 1`).
pub fn assemble_operator(spec: &ProblemSpec, grid: &Grid) -> Result<AssembledOperator> {
    assemble_with(
        spec,
        grid,
        &AssemblyConfig { include_compensator: true, one_sided: true },
    )
}

/// Assembles the operator variant that pairs with [`manufactured_rhs`]: the
/// compensator drift constant is omitted (the closed-form right-hand side is
/// the action of the bare compensated jump integral) and all first
/// differences are central (the manufactured solution is smooth up to the
/// boundary, where a one-sided stencil would cost an order of accuracy).
pub fn assemble_manufactured_operator(
    spec: &ProblemSpec,
    grid: &Grid,
) -> Result<AssembledOperator> {
    assemble_with(
        spec,
        grid,
        &AssemblyConfig { include_compensator: false, one_sided: false },
    )
}

fn assemble_with(
    spec: &ProblemSpec,
    grid: &Grid,
    cfg: &AssemblyConfig,
) -> Result<AssembledOperator> {
    let jj = grid.resolution();
    let n = grid.interior_len();
    let alpha = spec.alpha();
    let b = spec.half_width;
    let eps = spec.levy_intensity;
    let co = jump_coefficients(&spec.stable)?;
    let epsb = eps * b.powf(-alpha);
    let ch = correction_coefficient(spec, grid);

    // Distance tables indexed by node offset m: dist(m) = m/J.
    let dist = |m: usize| m as f64 / jj as f64;
    let mut inv_pow = vec![0.0; 2 * jj + 1]; // dist(m)^{-(1+alpha)}
    let mut inv_kill = vec![0.0; 2 * jj + 1]; // dist(m)^{-alpha}
    for m in 1..=2 * jj {
        inv_pow[m] = dist(m).powf(-(1.0 + alpha));
        inv_kill[m] = dist(m).powf(-alpha);
    }

    // Advection coefficient c(b s)/b of the rescaled equation; for mirrored
    // rows the reflected coefficient -c(-b s)/b is used, which equals the
    // advection of the skew-negated problem when the drift is odd.
    let base = StableParams::standard(alpha, spec.beta())?;
    let advect = |s: f64| -> Result<f64> {
        let c = if cfg.include_compensator {
            effective_drift(b * s, &spec.drift, &base, eps, b)?
        } else {
            let full = effective_drift(b * s, &spec.drift, &base, eps, b)?;
            full - eps * co.compensator
        };
        Ok(c / b)
    };

    let mut matrix = DenseMatrix::zeros(n);
    let mut left_boundary = vec![0.0; n];
    let mut right_boundary = vec![0.0; n];
    let mut buf = vec![0.0; 2 * jj + 1];

    for row in 0..n {
        let j = row as i64 - (jj as i64 - 1);
        buf.iter_mut().for_each(|v| *v = 0.0);
        if j >= 0 {
            assemble_row_nonnegative(
                j as usize,
                grid,
                alpha,
                epsb,
                ch,
                co.right,
                co.left,
                &|s| advect(s),
                cfg.one_sided,
                &inv_pow,
                &inv_kill,
                &mut buf,
            )?;
            let dst = matrix.row_mut(row);
            dst.copy_from_slice(&buf[1..2 * jj]);
            left_boundary[row] = buf[0];
            right_boundary[row] = buf[2 * jj];
        } else {
            // Mirrored construction: run the nonnegative-row routine at -j
            // with swapped intensities and reflected advection, then reverse.
            assemble_row_nonnegative(
                (-j) as usize,
                grid,
                alpha,
                epsb,
                ch,
                co.left,
                co.right,
                &|s| advect(-s).map(|v| -v),
                cfg.one_sided,
                &inv_pow,
                &inv_kill,
                &mut buf,
            )?;
            let dst = matrix.row_mut(row);
            for (col, &v) in buf.iter().rev().skip(1).take(n).enumerate() {
                dst[col] = v;
            }
            left_boundary[row] = buf[2 * jj];
            right_boundary[row] = buf[0];
        }
    }

    Ok(AssembledOperator { matrix, left_boundary, right_boundary })
}

/// Fills `buf` (indexed by `k + J`, `-J <= k <= J`) with row `j >= 0` of the
/// scheme, with `c_right`/`c_left` in the roles of the rightward/leftward
/// jump intensities.
#[allow(clippy::too_many_arguments)]
fn assemble_row_nonnegative(
    j: usize,
    grid: &Grid,
    alpha: f64,
    epsb: f64,
    ch: f64,
    c_right: f64,
    c_left: f64,
    advect: &dyn Fn(f64) -> Result<f64>,
    one_sided: bool,
    inv_pow: &[f64],
    inv_kill: &[f64],
    buf: &mut [f64],
) -> Result<()> {
    let jj = grid.resolution();
    let h = grid.spacing();
    let s_j = grid.node(j as i64);
    let dist = |m: usize| m as f64 / jj as f64;
    let center = j + jj; // buffer index of column j

    // First-derivative stencil: (offset from j, weight). One-sided into the
    // interior at the last row when alpha <= 1.
    let use_one_sided = one_sided && (alpha <= 1.0 || is_alpha_one(alpha)) && j == jj - 1;
    let stencil: [(isize, f64); 2] = if use_one_sided {
        [(0, 1.0 / h), (-1, -1.0 / h)]
    } else {
        [(1, 0.5 / h), (-1, -0.5 / h)]
    };

    // Second difference.
    let ch_h2 = ch / (h * h);
    buf[center - 1] += ch_h2;
    buf[center] += -2.0 * ch_h2;
    buf[center + 1] += ch_h2;

    // Advection, with the boundary factor g(s) split off.
    let coeff = advect(s_j)? - epsb * c_right * boundary_drift(s_j, alpha)?;
    for (off, w) in stencil {
        buf[(center as isize + off) as usize] += coeff * w;
    }

    // Killing by jump mass leaving the domain.
    buf[center] +=
        -epsb / alpha * (c_right * inv_kill[jj - j] + c_left * inv_kill[jj + j]);

    // Quadrature sums, accumulated in ascending node offset. Compensated
    // sums aggregate their diagonal and first-derivative corrections into
    // scalars applied once after the loop.
    let mut diag_right = 0.0;
    let mut comp_right = 0.0;
    // rightward compensated sum: offsets 1 ..= J - j, far end halved
    for m in 1..=(jj - j) {
        let w = if m == jj - j { 0.5 } else { 1.0 };
        let coef = epsb * c_right * h * w * inv_pow[m];
        buf[center + m] += coef;
        diag_right -= coef;
        comp_right += coef * dist(m);
    }

    let mut diag_tail = 0.0;
    // uncompensated tail (jumps past the opposite boundary): offsets
    // J ..= J + j, both ends halved; empty integration interval at j = 0
    if j >= 1 {
        for m in jj..=(jj + j) {
            let w = if m == jj || m == jj + j { 0.5 } else { 1.0 };
            let coef = epsb * c_left * h * w * inv_pow[m];
            buf[center - m] += coef;
            diag_tail -= coef;
        }
    }

    let mut diag_left = 0.0;
    let mut comp_left = 0.0;
    // leftward compensated sum: offsets 1 ..= J, far end halved
    for m in 1..=jj {
        let w = if m == jj { 0.5 } else { 1.0 };
        let coef = epsb * c_left * h * w * inv_pow[m];
        buf[center - m] += coef;
        diag_left -= coef;
        comp_left -= coef * dist(m);
    }

    buf[center] += diag_right;
    buf[center] += diag_tail;
    buf[center] += diag_left;
    let comp = comp_right + comp_left;
    for (off, w) in stencil {
        buf[(center as isize + off) as usize] += -comp * w;
    }

    Ok(())
}

/// Right-hand side of the mean-exit-time problem: all entries -1.
pub fn mean_exit_rhs(grid: &Grid) -> Vec<f64> {
    vec![-1.0; grid.interior_len()]
}

/// Analytic part of the escape-probability right-hand side,
/// `-eps b^{-alpha} (C1 / alpha) (1 - s_j)^{-alpha}`; the boundary-node
/// coupling is folded in by [`escape_system`].
pub fn escape_rhs(spec: &ProblemSpec, grid: &Grid) -> Result<Vec<f64>> {
    if spec.kind != ProblemKind::EscapeRight {
        return Err(Error::invalid(
            "escape right-hand side requires an EscapeRight problem".to_string(),
        ));
    }
    let alpha = spec.alpha();
    let co = jump_coefficients(&spec.stable)?;
    let epsb = spec.levy_intensity * spec.half_width.powf(-alpha);
    let jj = grid.resolution() as i64;
    Ok((-jj + 1..jj)
        .map(|j| {
            let s = grid.node(j);
            -epsb * (co.right / alpha) * (1.0 - s).powf(-alpha)
        })
        .collect())
}

/// Closed-form action of the compensated jump integral on the manufactured
/// solution `(1 - x^2)_+`, sampled at the interior nodes. Requires the
/// verification configuration `b = 1`, `d = 0`, `f = 0`, `eps = 1`.
pub fn manufactured_rhs(spec: &ProblemSpec, grid: &Grid) -> Result<Vec<f64>> {
    if spec.half_width != 1.0
        || spec.gaussian_intensity != 0.0
        || spec.levy_intensity != 1.0
        || !spec.drift.is_zero()
    {
        return Err(Error::invalid(
            "manufactured right-hand side requires b = 1, d = 0, eps = 1, f = 0".to_string(),
        ));
    }
    let alpha = spec.alpha();
    let co = jump_coefficients(&spec.stable)?;
    let jj = grid.resolution() as i64;
    Ok((-jj + 1..jj)
        .map(|j| manufactured_value(grid.node(j), alpha, &co))
        .collect())
}

fn manufactured_value(x: f64, alpha: f64, co: &LevyCoefficients) -> f64 {
    if is_alpha_one(alpha) {
        return -2.0 * (co.right + co.left)
            - 2.0 * x * (co.right * (1.0 - x).ln() - co.left * (1.0 + x).ln());
    }
    let a = alpha;
    let up = -(1.0 - x).powf(2.0 - a) / (2.0 - a)
        - 2.0 * x * ((1.0 - x).powf(1.0 - a) - 1.0) / (1.0 - a)
        - (1.0 + x) * (1.0 - x).powf(1.0 - a) / a;
    let down = -(1.0 + x).powf(2.0 - a) / (2.0 - a)
        - 2.0 * x * (1.0 - (1.0 + x).powf(1.0 - a)) / (1.0 - a)
        - (1.0 - x) * (1.0 + x).powf(1.0 - a) / a;
    co.right * up + co.left * down
}

/// Assembles the full linear system for `spec.kind`.
pub fn build_system(spec: &ProblemSpec, grid: &Grid) -> Result<DenseSystem> {
    let op = assemble_operator(spec, grid)?;
    let rhs = match spec.kind {
        ProblemKind::MeanExitTime => mean_exit_rhs(grid),
        ProblemKind::EscapeRight => {
            // Exterior data: 1 on the target side (including the node at
            // s = +1, which lies in E), 0 on the left. The eliminated
            // right-boundary coupling moves to the right-hand side.
            let mut rhs = escape_rhs(spec, grid)?;
            for (r, &c) in rhs.iter_mut().zip(op.right_boundary.iter()) {
                *r -= c;
            }
            rhs
        }
    };
    Ok(DenseSystem { matrix: op.matrix, rhs })
}

/// Assembles the manufactured verification system (drift-free operator
/// paired with the closed-form right-hand side).
pub fn manufactured_system(spec: &ProblemSpec, grid: &Grid) -> Result<DenseSystem> {
    let op = assemble_manufactured_operator(spec, grid)?;
    let rhs = manufactured_rhs(spec, grid)?;
    Ok(DenseSystem { matrix: op.matrix, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_met(alpha: f64, beta: f64, d: f64, eps: f64, b: f64, drift: DriftSpec) -> ProblemSpec {
        ProblemSpec::new(alpha, beta, d, eps, b, drift, ProblemKind::MeanExitTime).unwrap()
    }

    #[test]
    fn grid_nodes_exact() {
        let g = build_grid(2).unwrap();
        assert_eq!(g.nodes(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let g = build_grid(4).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.nodes().len(), 9);
        let g = build_grid(1280).unwrap();
        assert_eq!(g.nodes().len(), 2561);
        assert_eq!(g.node(640), 0.5);
        assert_eq!(g.node(-1280), -1.0);
        assert_eq!(g.node(1280), 1.0);
        let nodes = g.nodes();
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn grid_rejects_tiny() {
        assert!(build_grid(0).is_err());
        assert!(build_grid(1).is_err());
    }

    #[test]
    fn drift_eval_and_oddness() {
        assert_eq!(DriftSpec::Zero.eval(3.0), 0.0);
        assert!(DriftSpec::Zero.is_odd());
        let f = DriftSpec::Linear { slope: -2.0 };
        assert_eq!(f.eval(1.5), -3.0);
        assert!(f.is_odd());
        let p = DriftSpec::Polynomial { coefficients: vec![0.0, 1.0, 0.0, -2.0] };
        assert_eq!(p.eval(2.0), 2.0 - 16.0);
        assert!(p.is_odd());
        let q = DriftSpec::Polynomial { coefficients: vec![0.1, 1.0] };
        assert!(!q.is_odd());
    }

    #[test]
    fn problem_spec_validation() {
        assert!(ProblemSpec::new(2.0, 0.0, 0.0, 1.0, 1.0, DriftSpec::Zero,
            ProblemKind::MeanExitTime).is_err());
        assert!(ProblemSpec::new(1.5, 1.5, 0.0, 1.0, 1.0, DriftSpec::Zero,
            ProblemKind::MeanExitTime).is_err());
        assert!(ProblemSpec::new(1.5, 0.0, 0.0, 0.0, 1.0, DriftSpec::Zero,
            ProblemKind::MeanExitTime).is_err());
        assert!(ProblemSpec::new(1.5, 0.0, 0.0, 1.0, -1.0, DriftSpec::Zero,
            ProblemKind::MeanExitTime).is_err());
    }

    #[test]
    fn correction_coefficient_values() {
        let g = build_grid(10).unwrap();
        let s = spec_met(1.5, 0.3, 0.0, 0.0, 2.0, DriftSpec::Zero);
        // d = 0, eps = 0 would be rejected; take d = 1, eps = 0 and b = 2
        let s2 = spec_met(1.5, 0.3, 1.0, 0.0, 2.0, DriftSpec::Zero);
        assert_eq!(correction_coefficient(&s2, &g), 0.125);
        let _ = s;
        // d = 0, eps = 1, b = 1, alpha = 1, J = 10: 0.05 / pi
        let s3 = spec_met(1.0, 0.0, 0.0, 1.0, 1.0, DriftSpec::Zero);
        let got = correction_coefficient(&s3, &g);
        assert!((got - 0.015915494309189534).abs() < 1e-14, "got {got}");
    }

    // Row fixtures for J = 2, beta = 0.5, d = 0, eps = 1, b = 1, f = 0,
    // tabulated independently by direct evaluation of the per-row formulas
    // (rows j = -1, 0, 1; columns V_{-1}, V_0, V_1; plus the coefficients
    // of the eliminated boundary nodes).
    const FIXTURE_A15: [[f64; 3]; 3] = [
        [-4.662832267744201, 1.3896935720371744, 0.22440503272580592],
        [2.7553746767351064, -4.712864792667346, 1.4089444803802704],
        [0.07480167757526864, 2.697621951705819, -4.518553388507569],
    ];
    const FIXTURE_A15_BCL: [f64; 3] =
        [2.5630544912477933, 0.03740083878763432, 0.013572291997303332];
    const FIXTURE_A15_BCR: [f64; 3] =
        [0.04071687599191, 0.11220251636290296, 0.8319839239183321];

    const FIXTURE_A05: [[f64; 3]; 3] = [
        [-2.4867027125492407, 1.145406936004939, 0.14960335515053724],
        [-0.008336082229730965, -1.5790969571462687, 0.6898129084727762],
        [0.04986778505017908, -0.2373231212389731, -1.0951555938291917],
    ];
    const FIXTURE_A05_BCL: [f64; 3] =
        [0.3802782417250564, 0.02493389252508954, 0.01357229199730333];
    const FIXTURE_A05_BCR: [f64; 3] =
        [0.04071687599190999, 0.07480167757526862, 0.2598867587314078];

    fn check_fixture(alpha: f64, m: &[[f64; 3]; 3], bcl: &[f64; 3], bcr: &[f64; 3]) {
        let grid = build_grid(2).unwrap();
        let spec = spec_met(alpha, 0.5, 0.0, 1.0, 1.0, DriftSpec::Zero);
        let op = assemble_operator(&spec, &grid).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let got = op.matrix.get(r, c);
                assert!(
                    (got - m[r][c]).abs() <= 1e-9,
                    "alpha={alpha} entry ({r},{c}): got {got}, want {}",
                    m[r][c]
                );
            }
            assert!((op.left_boundary[r] - bcl[r]).abs() <= 1e-9);
            assert!((op.right_boundary[r] - bcr[r]).abs() <= 1e-9);
        }
    }

    #[test]
    fn assembly_fixture_central_branch() {
        check_fixture(1.5, &FIXTURE_A15, &FIXTURE_A15_BCL, &FIXTURE_A15_BCR);
    }

    #[test]
    fn assembly_fixture_one_sided_branch() {
        check_fixture(0.5, &FIXTURE_A05, &FIXTURE_A05_BCL, &FIXTURE_A05_BCR);
    }

    #[test]
    fn gaussian_only_reduces_to_tridiagonal() {
        let jj = 8usize;
        let grid = build_grid(jj).unwrap();
        let d = 1.0;
        let b = 2.0;
        let slope = -1.0;
        let spec = spec_met(1.5, 0.3, d, 0.0, b, DriftSpec::Linear { slope });
        let op = assemble_operator(&spec, &grid).unwrap();
        let h = grid.spacing();
        let diff = d / (2.0 * b * b) / (h * h);
        let n = grid.interior_len();
        for r in 0..n {
            let j = r as i64 - (jj as i64 - 1);
            for c in 0..n {
                let k = c as i64 - (jj as i64 - 1);
                let drift = slope * grid.node(j); // f(b s)/b = slope * s
                let want = if k == j {
                    -2.0 * diff
                } else if k == j + 1 {
                    diff + drift / (2.0 * h)
                } else if k == j - 1 {
                    diff - drift / (2.0 * h)
                } else {
                    0.0
                };
                let got = op.matrix.get(r, c);
                assert!(
                    (got - want).abs() <= 1e-12,
                    "entry ({r},{c}): got {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn persymmetry_exact_under_skew_negation() {
        // reversing node order maps the matrix for beta to the matrix for
        // -beta, bitwise, when the drift is odd
        for &(alpha, beta) in &[(0.5, 0.5), (0.5, 1.0), (1.0, 0.7), (1.5, 0.5), (1.8, -0.3)] {
            let grid = build_grid(12).unwrap();
            let plus = spec_met(alpha, beta, 0.2, 1.0, 2.0, DriftSpec::Linear { slope: -1.0 });
            let minus = spec_met(alpha, -beta, 0.2, 1.0, 2.0, DriftSpec::Linear { slope: -1.0 });
            let lp = assemble_operator(&plus, &grid).unwrap();
            let lm = assemble_operator(&minus, &grid).unwrap();
            let n = grid.interior_len();
            for r in 0..n {
                for c in 0..n {
                    let a = lp.matrix.get(n - 1 - r, n - 1 - c);
                    let bb = lm.matrix.get(r, c);
                    assert_eq!(a, bb, "alpha={alpha} beta={beta} entry ({r},{c})");
                }
                assert_eq!(lp.left_boundary[n - 1 - r], lm.right_boundary[r]);
                assert_eq!(lp.right_boundary[n - 1 - r], lm.left_boundary[r]);
            }
        }
    }

    #[test]
    fn diagonal_strictly_negative() {
        let grid = build_grid(40).unwrap();
        for &(alpha, beta, d, eps, b) in &[
            (0.5, 0.5, 0.0, 1.0, 1.0),
            (0.5, 1.0, 0.0, 1.0, 1.0),
            (1.0, 0.5, 0.0, 1.0, 4.0),
            (1.5, 1.0, 0.1, 1.0, 1.0),
            (1.5, 0.5, 1.0, 0.5, 4.0),
            (1.9, -1.0, 0.0, 2.0, 2.0),
        ] {
            let spec = spec_met(alpha, beta, d, eps, b, DriftSpec::Linear { slope: -1.0 });
            let op = assemble_operator(&spec, &grid).unwrap();
            for r in 0..grid.interior_len() {
                let v = op.matrix.get(r, r);
                assert!(
                    v < 0.0,
                    "diagonal not negative at row {r} for alpha={alpha} beta={beta}: {v}"
                );
            }
        }
    }

    #[test]
    fn rows_all_finite() {
        let grid = build_grid(24).unwrap();
        let spec = spec_met(0.7, -0.4, 0.3, 0.8, 3.0, DriftSpec::Polynomial {
            coefficients: vec![0.0, -1.0, 0.0, 0.25],
        });
        let op = assemble_operator(&spec, &grid).unwrap();
        for r in 0..grid.interior_len() {
            assert!(op.matrix.row(r).iter().all(|v| v.is_finite()));
        }
        assert!(op.left_boundary.iter().chain(op.right_boundary.iter()).all(|v| v.is_finite()));
    }

    #[test]
    fn mean_exit_rhs_all_minus_one() {
        let grid = build_grid(2).unwrap();
        assert_eq!(mean_exit_rhs(&grid), vec![-1.0, -1.0, -1.0]);
        let grid = build_grid(17).unwrap();
        let rhs = mean_exit_rhs(&grid);
        assert_eq!(rhs.len(), 33);
        assert!(rhs.iter().all(|&v| v == -1.0));
    }

    #[test]
    fn escape_rhs_values() {
        let grid = build_grid(4).unwrap();
        // beta = -1: no rightward jumps, zero vector
        let spec = ProblemSpec::new(0.8, -1.0, 0.0, 1.0, 1.0, DriftSpec::Zero,
            ProblemKind::EscapeRight).unwrap();
        let rhs = escape_rhs(&spec, &grid).unwrap();
        assert!(rhs.iter().all(|&v| v == 0.0));

        // alpha = 1, beta = 0, eps = 1, b = 1 at s = 0: -1/pi
        let spec = ProblemSpec::new(1.0, 0.0, 0.0, 1.0, 1.0, DriftSpec::Zero,
            ProblemKind::EscapeRight).unwrap();
        let rhs = escape_rhs(&spec, &grid).unwrap();
        let mid = rhs[grid.interior_index(0)];
        assert!((mid - (-std::f64::consts::FRAC_1_PI)).abs() < 1e-14, "got {mid}");
        // entries decrease (more negative) toward s = 1
        assert!(rhs.windows(2).all(|w| w[1] < w[0]));

        // wrong problem kind rejected
        let met = spec_met(1.0, 0.0, 0.0, 1.0, 1.0, DriftSpec::Zero);
        assert!(escape_rhs(&met, &grid).is_err());
    }

    #[test]
    fn manufactured_rhs_values() {
        let grid = build_grid(2).unwrap();
        // alpha = 1: value at x = 0 is -4/pi for any beta
        for beta in [0.0, 0.5, -0.7, 1.0] {
            let spec = spec_met(1.0, beta, 0.0, 1.0, 1.0, DriftSpec::Zero);
            let rhs = manufactured_rhs(&spec, &grid).unwrap();
            let got = rhs[grid.interior_index(0)];
            assert!(
                (got - (-4.0 / std::f64::consts::PI)).abs() < 1e-13,
                "beta={beta}: got {got}"
            );
        }
        // frozen closed-form evaluations
        let spec = spec_met(0.5, 0.5, 0.0, 1.0, 1.0, DriftSpec::Zero);
        let rhs = manufactured_rhs(&spec, &grid).unwrap();
        let got = rhs[grid.interior_index(-1)]; // x = -0.5
        assert!((got - (-0.775068669433270203)).abs() < 1e-13, "got {got}");

        let grid4 = build_grid(4).unwrap();
        let spec = spec_met(1.5, 0.5, 0.0, 1.0, 1.0, DriftSpec::Zero);
        let rhs = manufactured_rhs(&spec, &grid4).unwrap();
        let got = rhs[grid4.interior_index(1)]; // x = 0.25
        assert!((got - (-1.5254322440895768)).abs() < 1e-13, "got {got}");

        let spec = spec_met(1.0, 0.5, 0.0, 1.0, 1.0, DriftSpec::Zero);
        let rhs = manufactured_rhs(&spec, &grid4).unwrap();
        let got = rhs[grid4.interior_index(-2)]; // x = -0.5
        assert!((got - (-0.969326416038724613)).abs() < 1e-13, "got {got}");
    }

    #[test]
    fn manufactured_rhs_rejects_other_configs() {
        let grid = build_grid(4).unwrap();
        let bad = spec_met(1.5, 0.5, 0.0, 1.0, 2.0, DriftSpec::Zero);
        assert!(manufactured_rhs(&bad, &grid).is_err());
        let bad = spec_met(1.5, 0.5, 0.5, 1.0, 1.0, DriftSpec::Zero);
        assert!(manufactured_rhs(&bad, &grid).is_err());
        let bad = spec_met(1.5, 0.5, 0.0, 1.0, 1.0, DriftSpec::Linear { slope: 1.0 });
        assert!(manufactured_rhs(&bad, &grid).is_err());
    }
}
