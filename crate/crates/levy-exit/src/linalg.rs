//! Dense storage, restarted GMRES, and a partial-pivoting direct solver.
//!
//! GMRES is the production path; elimination doubles as the fallback when
//! restarts stagnate and as an independent oracle in tests. Single-threaded
//! execution is bit-reproducible: all reductions run in a fixed order.

use crate::error::{Error, Result};

/// Row-major dense square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            data.extend_from_slice(r);
        }
        DenseMatrix { n, data }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    /// `out = self * x`.
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.n)) {
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            *o = acc;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Which algorithm produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Gmres,
    Direct,
}

/// Outcome statistics of a linear solve.
#[derive(Debug, Clone, Copy)]
pub struct SolveStats {
    /// Inner iterations performed (0 for the direct solver).
    pub iterations: usize,
    /// Relative residual `||b - A x|| / ||b||`, recomputed from scratch.
    pub final_residual: f64,
    /// Whether `final_residual <= tol` was reached.
    pub converged: bool,
    pub method: SolveMethod,
}

/// GMRES settings. Defaults: `tol = 1e-10`, `restart = 50`,
/// `max_iters = 10 n`, no preconditioning.
#[derive(Debug, Clone, Copy)]
pub struct GmresOptions {
    pub tol: f64,
    pub restart: usize,
    /// Total inner-iteration cap; `None` means `10 * n`.
    pub max_iters: Option<usize>,
    /// Diagonal (Jacobi) preconditioning.
    pub jacobi: bool,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions { tol: 1e-10, restart: 50, max_iters: None, jacobi: false }
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `A x = b` by restarted GMRES with modified Gram-Schmidt Arnoldi
/// and Givens rotations. On convergence the reported residual is the true
/// relative residual recomputed from the returned iterate.
pub fn gmres_solve(
    a: &DenseMatrix,
    b: &[f64],
    opts: &GmresOptions,
) -> Result<(Vec<f64>, SolveStats)> {
    let n = a.size();
    if b.len() != n {
        return Err(Error::invalid(format!(
            "rhs length {} does not match matrix size {n}",
            b.len()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let max_iters = opts.max_iters.unwrap_or(10 * n);
    let restart = opts.restart.max(1).min(n);

    // Optional left Jacobi scaling; the convergence loop runs on the scaled
    // system, the reported residual is always the unscaled one.
    let dinv: Option<Vec<f64>> = if opts.jacobi {
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            let v = a.get(i, i);
            if v == 0.0 {
                return Err(Error::Singular { pivot_index: i });
            }
            d.push(1.0 / v);
        }
        Some(d)
    } else {
        None
    };
    let scale = |v: &mut [f64]| {
        if let Some(d) = &dinv {
            for (x, s) in v.iter_mut().zip(d) {
                *x *= s;
            }
        }
    };

    let mut b_scaled = b.to_vec();
    scale(&mut b_scaled);
    let b_norm_scaled = norm2(&b_scaled);
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        let stats = SolveStats {
            iterations: 0,
            final_residual: 0.0,
            converged: true,
            method: SolveMethod::Gmres,
        };
        return Ok((vec![0.0; n], stats));
    }

    let true_rel_residual = |x: &[f64], work: &mut Vec<f64>| -> f64 {
        work.resize(n, 0.0);
        a.matvec(x, work);
        let mut acc = 0.0;
        for i in 0..n {
            let r = b[i] - work[i];
            acc += r * r;
        }
        acc.sqrt() / b_norm
    };

    let mut x = vec![0.0; n];
    let mut total_iters = 0usize;
    let mut work = Vec::new();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut best = x.clone();
    let mut best_residual = f64::INFINITY;

    loop {
        // outer (restart) loop; residual of the scaled system drives Arnoldi
        let mut r = vec![0.0; n];
        a.matvec(&x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        scale(&mut r);
        let r_norm = norm2(&r);

        let true_res = true_rel_residual(&x, &mut work);
        if true_res < best_residual {
            best_residual = true_res;
            best.copy_from_slice(&x);
        }
        if true_res <= opts.tol {
            let stats = SolveStats {
                iterations: total_iters,
                final_residual: true_res,
                converged: true,
                method: SolveMethod::Gmres,
            };
            return Ok((x, stats));
        }
        if total_iters >= max_iters {
            let stats = SolveStats {
                iterations: total_iters,
                final_residual: best_residual,
                converged: false,
                method: SolveMethod::Gmres,
            };
            return Err(Error::NonConvergence { stats, best });
        }

        // Arnoldi with modified Gram-Schmidt
        basis.clear();
        let inv = 1.0 / r_norm;
        basis.push(r.iter().map(|v| v * inv).collect());
        let m = restart;
        let mut h = vec![vec![0.0; m + 1]; m]; // h[k][i]
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = r_norm;
        let mut k_used = 0;

        for k in 0..m {
            if total_iters >= max_iters {
                break;
            }
            total_iters += 1;
            let mut w = vec![0.0; n];
            a.matvec(&basis[k], &mut w);
            scale(&mut w);
            for (i, v) in basis.iter().enumerate() {
                let hik = dot(v, &w);
                h[k][i] = hik;
                for (wj, vj) in w.iter_mut().zip(v) {
                    *wj -= hik * vj;
                }
            }
            let w_norm = norm2(&w);
            h[k][k + 1] = w_norm;

            // apply existing rotations to the new column
            for i in 0..k {
                let t = cs[i] * h[k][i] + sn[i] * h[k][i + 1];
                h[k][i + 1] = -sn[i] * h[k][i] + cs[i] * h[k][i + 1];
                h[k][i] = t;
            }
            let (c, s) = givens(h[k][k], h[k][k + 1]);
            cs[k] = c;
            sn[k] = s;
            h[k][k] = c * h[k][k] + s * h[k][k + 1];
            h[k][k + 1] = 0.0;
            g[k + 1] = -s * g[k];
            g[k] *= c;
            k_used = k + 1;

            let est = g[k + 1].abs() / b_norm_scaled;
            if est <= 0.1 * opts.tol {
                break;
            }
            if w_norm <= f64::EPSILON * b_norm_scaled {
                break; // happy breakdown
            }
            let inv = 1.0 / w_norm;
            basis.push(w.iter().map(|v| v * inv).collect());
        }

        if k_used == 0 {
            let stats = SolveStats {
                iterations: total_iters,
                final_residual: best_residual,
                converged: false,
                method: SolveMethod::Gmres,
            };
            return Err(Error::NonConvergence { stats, best });
        }

        // back-substitution for the least-squares coefficients
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut acc = g[i];
            for l in (i + 1)..k_used {
                acc -= h[l][i] * y[l];
            }
            y[i] = acc / h[i][i];
        }
        for (l, yl) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&basis[l]) {
                *xi += yl * vi;
            }
        }
    }
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else if a.abs() > b.abs() {
        let t = b / a;
        let c = 1.0 / (1.0 + t * t).sqrt() * a.signum();
        (c, c * t)
    } else {
        let t = a / b;
        let s = 1.0 / (1.0 + t * t).sqrt() * b.signum();
        (s * t, s)
    }
}

/// Gaussian elimination with partial pivoting.
pub fn direct_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.size();
    if b.len() != n {
        return Err(Error::invalid(format!(
            "rhs length {} does not match matrix size {n}",
            b.len()
        )));
    }
    let mut lu = a.data.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let tiny = f64::EPSILON * (n as f64) * a.max_abs();

    for col in 0..n {
        let mut p = col;
        let mut pmax = lu[perm[col] * n + col].abs();
        for r in (col + 1)..n {
            let v = lu[perm[r] * n + col].abs();
            if v > pmax {
                pmax = v;
                p = r;
            }
        }
        if pmax <= tiny || pmax == 0.0 {
            return Err(Error::Singular { pivot_index: col });
        }
        perm.swap(col, p);
        let prow = perm[col];
        let pivot = lu[prow * n + col];
        for r in (col + 1)..n {
            let row = perm[r];
            let factor = lu[row * n + col] / pivot;
            lu[row * n + col] = factor;
            if factor != 0.0 {
                let (pr, cr) = if prow < row {
                    let (head, tail) = lu.split_at_mut(row * n);
                    (&head[prow * n..prow * n + n], &mut tail[..n])
                } else {
                    let (head, tail) = lu.split_at_mut(prow * n);
                    (&tail[..n], &mut head[row * n..row * n + n])
                };
                for c in (col + 1)..n {
                    cr[c] -= factor * pr[c];
                }
            }
        }
    }

    // forward substitution L y = P b
    let mut y = vec![0.0; n];
    for i in 0..n {
        let row = perm[i];
        let mut acc = b[row];
        for (c, yc) in y.iter().enumerate().take(i) {
            acc -= lu[row * n + c] * yc;
        }
        y[i] = acc;
    }
    // back substitution U x = y
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let row = perm[i];
        let mut acc = y[i];
        for c in (i + 1)..n {
            acc -= lu[row * n + c] * x[c];
        }
        x[i] = acc / lu[row * n + i];
    }
    Ok(x)
}
