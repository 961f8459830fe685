//! Small dense and iterative solvers for symmetric positive-definite systems.

use crate::error::{EcneError, Result};

/// Row-major dense Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn factor(matrix: &[f64], n: usize) -> Result<Cholesky> {
        if matrix.len() != n * n {
            return Err(EcneError::Shape(format!(
                "expected {n}x{n} matrix, got {} entries",
                matrix.len()
            )));
        }
        let mut lower = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = matrix[i * n + j];
                for k in 0..j {
                    sum -= lower[i * n + k] * lower[j * n + k];
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return Err(EcneError::InvalidArgument(format!(
                            "matrix not positive definite at pivot {i} ({sum:e})"
                        )));
                    }
                    lower[i * n + i] = sum.sqrt();
                } else {
                    lower[i * n + j] = sum / lower[j * n + j];
                }
            }
        }
        Ok(Cholesky { n, lower })
    }

    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = self.n;
        let l = &self.lower;
        for i in 0..n {
            let mut sum = rhs[i];
            for k in 0..i {
                sum -= l[i * n + k] * rhs[k];
            }
            rhs[i] = sum / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut sum = rhs[i];
            for k in i + 1..n {
                sum -= l[k * n + i] * rhs[k];
            }
            rhs[i] = sum / l[i * n + i];
        }
    }
}

/// Compressed sparse rows for a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SparseSymmetric {
    pub n: usize,
    pub row_start: Vec<usize>,
    pub cols: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseSymmetric {
    pub fn mul(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            let span = self.row_start[i]..self.row_start[i + 1];
            *o = self.values[span.clone()]
                .iter()
                .zip(&self.cols[span])
                .map(|(v, &c)| v * x[c])
                .sum();
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_start[i]..self.row_start[i + 1])
                    .find(|&k| self.cols[k] == i)
                    .map_or(0.0, |k| self.values[k])
            })
            .collect()
    }
}

/// Jacobi-preconditioned conjugate gradient. Stops when `‖r‖ ≤ tol·max(1, ‖b‖)`.
pub fn conjugate_gradient(a: &SparseSymmetric, b: &[f64], tolerance: f64, max_iterations: usize) -> Result<Vec<f64>> {
    let n = a.n;
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d != 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let threshold = tolerance * norm(b).max(1.0);

    let mut residual = norm(&r);
    for _ in 0..max_iterations {
        if residual <= threshold {
            return Ok(x);
        }
        a.mul(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        residual = norm(&r);
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if residual <= threshold {
        Ok(x)
    } else {
        Err(EcneError::NoConvergence {
            residual,
            iterations: max_iterations,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
