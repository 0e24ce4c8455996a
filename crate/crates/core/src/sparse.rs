//! Compressed-sparse-row matrices and Jacobi-preconditioned Krylov solvers.
//!
//! Summation orders are fixed everywhere (row-wise matvec, sequential dot
//! products) so repeated solves are bit-reproducible, with or without the
//! parallel matvec.

use thiserror::Error;

use crate::exec::ExecPolicy;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("dimension mismatch: matrix is {rows}x{cols}, vector has length {len}")]
    DimensionMismatch { rows: usize, cols: usize, len: usize },
    #[error("solver breakdown ({reason}) after {} iterations", report.iterations)]
    Breakdown {
        reason: &'static str,
        report: SolverReport,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverReport {
    pub iterations: usize,
    /// `||b - A x||_2 / ||b||_2`, recomputed from the returned iterate.
    pub final_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    /// `None` means `10 * n`.
    pub max_iter: Option<usize>,
    pub exec: ExecPolicy,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: None,
            exec: ExecPolicy::default(),
        }
    }
}

impl SolverOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        SolverOptions {
            tol,
            max_iter: Some(max_iter),
            ..Default::default()
        }
    }

    fn iteration_cap(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(10 * n.max(1))
    }
}

/// Row-compressed real matrix with sorted, duplicate-free column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Zero-valued matrix with the given per-row column sets (deduplicated
    /// and sorted here).
    pub fn from_pattern(n_cols: usize, rows: &[Vec<usize>]) -> SparseMatrix {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for r in rows {
            let mut cols = r.clone();
            cols.sort_unstable();
            cols.dedup();
            assert!(cols.last().map_or(true, |&c| c < n_cols), "column index out of range");
            col_idx.extend(cols);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        SparseMatrix {
            n_rows: rows.len(),
            n_cols,
            row_ptr,
            col_idx,
            values: vec![0.0; nnz],
        }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed in
    /// input order.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> SparseMatrix {
        let mut rows = vec![Vec::new(); n_rows];
        for &(r, c, _) in triplets {
            rows[r].push(c);
        }
        let mut m = SparseMatrix::from_pattern(n_cols, &rows);
        for &(r, c, v) in triplets {
            m.add_at(r, c, v);
        }
        m
    }

    pub fn identity(n: usize) -> SparseMatrix {
        let rows: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut m = SparseMatrix::from_pattern(n, &rows);
        m.values.iter_mut().for_each(|v| *v = 1.0);
        m
    }

    pub fn from_dense(a: &[Vec<f64>]) -> SparseMatrix {
        let n_cols = a.first().map_or(0, |r| r.len());
        let mut t = Vec::new();
        for (i, row) in a.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 || i == j {
                    t.push((i, j, v));
                }
            }
        }
        SparseMatrix::from_triplets(a.len(), n_cols, &t)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Storage slot of `(row, col)` if it is in the pattern.
    pub fn slot(&self, row: usize, col: usize) -> Option<usize> {
        let (lo, hi) = (self.row_ptr[row], self.row_ptr[row + 1]);
        self.col_idx[lo..hi].binary_search(&col).ok().map(|k| lo + k)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.slot(row, col).map_or(0.0, |k| self.values[k])
    }

    /// Adds `v` to entry `(row, col)`.
    ///
    /// Panics if the entry is outside the pattern.
    pub fn add_at(&mut self, row: usize, col: usize, v: f64) {
        let k = self
            .slot(row, col)
            .unwrap_or_else(|| panic!("entry ({row}, {col}) not in sparsity pattern"));
        self.values[k] += v;
    }

    pub fn same_pattern(&self, other: &SparseMatrix) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self.row_ptr == other.row_ptr
            && self.col_idx == other.col_idx
    }

    /// `alpha * self + beta * other`; both must share a pattern.
    pub fn linear_combination(&self, alpha: f64, other: &SparseMatrix, beta: f64) -> SparseMatrix {
        assert!(self.same_pattern(other), "sparsity patterns differ");
        let mut out = self.clone();
        for (o, (&a, &b)) in out.values.iter_mut().zip(self.values.iter().zip(&other.values)) {
            *o = alpha * a + beta * b;
        }
        out
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| self.values[self.row_ptr[i]..self.row_ptr[i + 1]].iter().sum())
            .collect()
    }

    /// `max_ij |A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n_rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                let t = if j < self.n_rows { self.get(j, i) } else { 0.0 };
                worst = worst.max((self.values[k] - t).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, row) in d.iter_mut().enumerate() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row[self.col_idx[k]] = self.values[k];
            }
        }
        d
    }

    #[inline]
    fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            s += self.values[k] * x[self.col_idx[k]];
        }
        s
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, SolveError> {
        self.matvec_with(x, ExecPolicy::default())
    }

    pub fn matvec_with(&self, x: &[f64], exec: ExecPolicy) -> Result<Vec<f64>, SolveError> {
        let mut y = vec![0.0; self.n_rows];
        self.matvec_into(x, &mut y, exec)?;
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64], exec: ExecPolicy) -> Result<(), SolveError> {
        if x.len() != self.n_cols || y.len() != self.n_rows {
            return Err(SolveError::DimensionMismatch {
                rows: self.n_rows,
                cols: self.n_cols,
                len: if x.len() != self.n_cols { x.len() } else { y.len() },
            });
        }
        // Small systems are not worth the scheduling overhead.
        let exec = if self.n_rows < 4096 { ExecPolicy::Sequential } else { exec };
        exec.fill_indexed(y, |i| self.row_dot(i, x));
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn check_square(a: &SparseMatrix, b: &[f64], x0: Option<&[f64]>) -> Result<(), SolveError> {
    let bad = a.n_rows != a.n_cols || b.len() != a.n_rows || x0.is_some_and(|x| x.len() != a.n_cols);
    if bad {
        return Err(SolveError::DimensionMismatch {
            rows: a.n_rows,
            cols: a.n_cols,
            len: b.len(),
        });
    }
    Ok(())
}

fn inverse_diagonal(a: &SparseMatrix) -> Vec<f64> {
    a.diagonal()
        .into_iter()
        .map(|d| if d != 0.0 && d.is_finite() { 1.0 / d } else { 1.0 })
        .collect()
}

fn true_residual(a: &SparseMatrix, b: &[f64], x: &[f64], exec: ExecPolicy) -> Vec<f64> {
    let mut r = vec![0.0; b.len()];
    a.matvec_into(x, &mut r, exec).expect("dimensions checked");
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    r
}

/// Preconditioned conjugate gradients for symmetric positive-definite `a`,
/// starting from zero.
pub fn solve_cg(a: &SparseMatrix, b: &[f64], opts: &SolverOptions) -> Result<(Vec<f64>, SolverReport), SolveError> {
    solve_cg_from(a, b, None, opts)
}

/// As [`solve_cg`] with an optional initial guess.
pub fn solve_cg_from(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolverReport), SolveError> {
    check_square(a, b, x0)?;
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolverReport {
                iterations: 0,
                final_residual: 0.0,
                converged: true,
            },
        ));
    }
    if !bnorm.is_finite() {
        return Err(SolveError::Breakdown {
            reason: "non-finite right-hand side",
            report: SolverReport {
                iterations: 0,
                final_residual: f64::NAN,
                converged: false,
            },
        });
    }
    let exec = opts.exec;
    let cap = opts.iteration_cap(n);
    let dinv = inverse_diagonal(a);
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r = true_residual(a, b, &x, exec);
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut rel = norm(&r) / bnorm;
    let mut it = 0;

    while it < cap {
        if rel <= opts.tol {
            // Confirm against the true residual before declaring success.
            rel = norm(&true_residual(a, b, &x, exec)) / bnorm;
            if rel <= opts.tol {
                break;
            }
        }
        a.matvec_into(&p, &mut ap, exec)?;
        let pap = dot(&p, &ap);
        if !pap.is_finite() || pap <= 0.0 {
            let report = SolverReport {
                iterations: it,
                final_residual: rel,
                converged: false,
            };
            return Err(SolveError::Breakdown {
                reason: if pap.is_finite() { "matrix not positive definite" } else { "NaN encountered" },
                report,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        it += 1;
        // Periodic residual replacement keeps the recursive residual honest.
        if it % 50 == 0 {
            r = true_residual(a, b, &x, exec);
        }
        for i in 0..n {
            z[i] = r[i] * dinv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rel = norm(&r) / bnorm;
        if !rel.is_finite() {
            return Err(SolveError::Breakdown {
                reason: "NaN encountered",
                report: SolverReport {
                    iterations: it,
                    final_residual: rel,
                    converged: false,
                },
            });
        }
    }
    let final_residual = norm(&true_residual(a, b, &x, exec)) / bnorm;
    Ok((
        x,
        SolverReport {
            iterations: it,
            final_residual,
            converged: final_residual <= opts.tol,
        },
    ))
}

/// Right-preconditioned BiCGStab for general nonsingular `a`, starting
/// from zero.
pub fn solve_bicgstab(
    a: &SparseMatrix,
    b: &[f64],
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolverReport), SolveError> {
    solve_bicgstab_from(a, b, None, opts)
}

pub fn solve_bicgstab_from(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolverReport), SolveError> {
    check_square(a, b, x0)?;
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolverReport {
                iterations: 0,
                final_residual: 0.0,
                converged: true,
            },
        ));
    }
    let exec = opts.exec;
    let cap = opts.iteration_cap(n);
    let dinv = inverse_diagonal(a);
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r = true_residual(a, b, &x, exec);
    let mut r_hat = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut p_hat = vec![0.0; n];
    let mut s_hat = vec![0.0; n];
    let mut t = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut rel = norm(&r) / bnorm;
    let mut it = 0;
    let mut restarts = 0;

    let breakdown = |reason, it, rel| SolveError::Breakdown {
        reason,
        report: SolverReport {
            iterations: it,
            final_residual: rel,
            converged: false,
        },
    };

    while it < cap && rel > opts.tol {
        let rho_new = dot(&r_hat, &r);
        if !rho_new.is_finite() {
            return Err(breakdown("NaN encountered", it, rel));
        }
        if rho_new == 0.0 || omega == 0.0 {
            // Restart the shadow residual once per stall.
            if restarts >= 3 {
                return Err(breakdown("rho or omega vanished", it, rel));
            }
            restarts += 1;
            r = true_residual(a, b, &x, exec);
            r_hat = r.clone();
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
            v.iter_mut().for_each(|e| *e = 0.0);
            p.iter_mut().for_each(|e| *e = 0.0);
            continue;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            p_hat[i] = p[i] * dinv[i];
        }
        a.matvec_into(&p_hat, &mut v, exec)?;
        let rv = dot(&r_hat, &v);
        if rv == 0.0 || !rv.is_finite() {
            return Err(breakdown("r_hat . v vanished", it, rel));
        }
        alpha = rho / rv;
        for i in 0..n {
            s[i] = r[i] - alpha * v[i];
        }
        it += 1;
        if norm(&s) / bnorm <= opts.tol {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            rel = norm(&true_residual(a, b, &x, exec)) / bnorm;
            r = s.clone();
            continue;
        }
        for i in 0..n {
            s_hat[i] = s[i] * dinv[i];
        }
        a.matvec_into(&s_hat, &mut t, exec)?;
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
        rel = norm(&r) / bnorm;
        if !rel.is_finite() {
            return Err(breakdown("NaN encountered", it, rel));
        }
        if rel <= opts.tol {
            rel = norm(&true_residual(a, b, &x, exec)) / bnorm;
        }
    }
    let final_residual = norm(&true_residual(a, b, &x, exec)) / bnorm;
    Ok((
        x,
        SolverReport {
            iterations: it,
            final_residual,
            converged: final_residual <= opts.tol,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense Gaussian elimination with partial pivoting; test oracle.
    pub(crate) fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
            a.swap(k, piv);
            b.swap(k, piv);
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
            x[i] = (b[i] - s) / a[i][i];
        }
        x
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64)
    }

    #[test]
    fn matvec_small_cases() {
        let id = SparseMatrix::identity(3);
        assert_eq!(id.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let a = SparseMatrix::from_dense(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
        assert_eq!(a.matvec(&[1.0, 2.0]).unwrap(), vec![6.0, 7.0]);
        assert_eq!(a.matvec(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(matches!(a.matvec(&[1.0]), Err(SolveError::DimensionMismatch { .. })));
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (0, 1, 2.0), (1, 0, 5.0)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 1), 0.0);
    }

    #[test]
    fn cg_small_spd() {
        let a = SparseMatrix::from_dense(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
        let (x, rep) = solve_cg(&a, &[6.0, 7.0], &SolverOptions::new(1e-12, 100)).unwrap();
        assert!(rep.converged && rep.final_residual <= 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cg_identity_one_iteration() {
        let a = SparseMatrix::identity(5);
        let b = [1.0, -2.0, 3.5, 0.25, 9.0];
        let (x, rep) = solve_cg(&a, &b, &SolverOptions::default()).unwrap();
        assert!(rep.iterations <= 1);
        assert_eq!(x, b.to_vec());
    }

    #[test]
    fn cg_zero_rhs() {
        let a = SparseMatrix::identity(3);
        let (x, rep) = solve_cg(&a, &[0.0; 3], &SolverOptions::default()).unwrap();
        assert_eq!(x, vec![0.0; 3]);
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn cg_reports_nonconvergence() {
        // 1D Laplacian with too few iterations.
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &t);
        let b = vec![1.0; n];
        let (_, rep) = solve_cg(&a, &b, &SolverOptions::new(1e-12, 3)).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 3);
    }

    #[test]
    fn cg_detects_nan() {
        let a = SparseMatrix::from_dense(&[vec![f64::NAN, 0.0], vec![0.0, 1.0]]);
        let err = solve_cg(&a, &[1.0, 1.0], &SolverOptions::default()).unwrap_err();
        assert!(matches!(err, SolveError::Breakdown { .. }));
    }

    #[test]
    fn cg_error_decreases_in_energy_norm() {
        let n = 40;
        let mut t = Vec::new();
        let mut seed = 7;
        for i in 0..n {
            t.push((i, i, 4.0 + lcg(&mut seed)));
            if i + 3 < n {
                let v = -lcg(&mut seed);
                t.push((i, i + 3, v));
                t.push((i + 3, i, v));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &t);
        let b: Vec<f64> = (0..n).map(|_| lcg(&mut seed) - 0.5).collect();
        let exact = dense_solve(a.to_dense(), b.clone());
        let energy = |x: &[f64]| {
            let e: Vec<f64> = x.iter().zip(&exact).map(|(a, b)| a - b).collect();
            dot(&e, &a.matvec(&e).unwrap()).sqrt()
        };
        let mut prev = f64::INFINITY;
        for k in 1..30 {
            let (x, _) = solve_cg(&a, &b, &SolverOptions::new(0.0, k)).unwrap();
            let e = energy(&x);
            assert!(e <= prev * (1.0 + 1e-10) + 1e-14, "iteration {k}: {e} > {prev}");
            prev = e;
        }
    }

    #[test]
    fn bicgstab_small_nonsymmetric() {
        let a = SparseMatrix::from_dense(&[vec![2.0, 1.0], vec![0.0, 1.0]]);
        let (x, rep) = solve_bicgstab(&a, &[3.0, 1.0], &SolverOptions::new(1e-12, 100)).unwrap();
        assert!(rep.converged);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bicgstab_zero_rhs() {
        let a = SparseMatrix::from_dense(&[vec![2.0, 1.0], vec![0.0, 1.0]]);
        let (x, rep) = solve_bicgstab(&a, &[0.0, 0.0], &SolverOptions::default()).unwrap();
        assert_eq!(x, vec![0.0, 0.0]);
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn bicgstab_random_diagonally_dominant_vs_dense() {
        let n = 50;
        let mut seed = 42;
        let mut dense = vec![vec![0.0; n]; n];
        for (i, row) in dense.iter_mut().enumerate() {
            let mut off = 0.0;
            for (j, e) in row.iter_mut().enumerate() {
                if i != j && lcg(&mut seed) < 0.2 {
                    *e = lcg(&mut seed) * 2.0 - 1.0;
                    off += e.abs();
                }
            }
            row[i] = off + 1.0 + lcg(&mut seed);
        }
        let b: Vec<f64> = (0..n).map(|_| lcg(&mut seed) * 10.0 - 5.0).collect();
        let a = SparseMatrix::from_dense(&dense);
        let oracle = dense_solve(dense, b.clone());
        let (x, rep) = solve_bicgstab(&a, &b, &SolverOptions::new(1e-12, 500)).unwrap();
        assert!(rep.converged);
        for (xi, oi) in x.iter().zip(&oracle) {
            assert!((xi - oi).abs() < 1e-8, "{xi} vs {oi}");
        }
    }

    #[test]
    fn policies_are_bit_identical() {
        let n = 5000;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 3.0 + (i % 7) as f64));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &t);
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let seq = SolverOptions { exec: ExecPolicy::Sequential, ..SolverOptions::default() };
        let par = SolverOptions { exec: ExecPolicy::Parallel, ..SolverOptions::default() };
        let (xs, rs) = solve_cg(&a, &b, &seq).unwrap();
        let (xp, rp) = solve_cg(&a, &b, &par).unwrap();
        assert_eq!(xs, xp);
        assert_eq!(rs, rp);
    }
}
