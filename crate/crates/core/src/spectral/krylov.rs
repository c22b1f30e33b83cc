//! Lanczos with full reorthogonalisation.

use nalgebra::{DMatrix, SymmetricEigen};

use super::Kernel;
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovInfo {
    pub dim: usize,
    /// Final a-posteriori error estimate relative to the result norm.
    pub residual: f64,
}

struct Lanczos<'a> {
    g: &'a Graph,
    basis: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// Set once the Krylov space is invariant.
    exhausted: bool,
}

impl<'a> Lanczos<'a> {
    /// `v0` must have unit norm.
    fn new(g: &'a Graph, v0: Vec<f64>) -> Self {
        Lanczos {
            g,
            basis: vec![v0],
            alpha: Vec::new(),
            beta: Vec::new(),
            exhausted: false,
        }
    }

    fn dim(&self) -> usize {
        self.alpha.len()
    }

    fn step(&mut self) {
        let j = self.alpha.len();
        let mut w = self.g.matvec(&self.basis[j]);
        let a = dot(&w, &self.basis[j]);
        self.alpha.push(a);
        for _ in 0..2 {
            for q in &self.basis {
                let c = dot(&w, q);
                axpy(-c, q, &mut w);
            }
        }
        let b = dot(&w, &w).sqrt();
        let scale = self.alpha.iter().map(|x| x.abs()).fold(b, f64::max).max(1.0);
        self.beta.push(b);
        if b <= 1e-13 * scale || self.basis.len() == self.g.n() {
            self.exhausted = true;
            return;
        }
        w.iter_mut().for_each(|x| *x /= b);
        self.basis.push(w);
    }

    /// `f(T_m) e_1` and its trailing entry.
    fn small_function(&self, kernel: Kernel) -> Vec<f64> {
        let m = self.dim();
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = self.alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = self.beta[i];
                t[(i + 1, i)] = self.beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        (0..m)
            .map(|r| {
                (0..m)
                    .map(|k| {
                        eig.eigenvectors[(r, k)]
                            * kernel.eval(eig.eigenvalues[k])
                            * eig.eigenvectors[(0, k)]
                    })
                    .sum()
            })
            .collect()
    }

    fn ritz_max(&self) -> f64 {
        let m = self.dim();
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = self.alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = self.beta[i];
                t[(i + 1, i)] = self.beta[i];
            }
        }
        SymmetricEigen::new(t).eigenvalues.max()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub(super) fn expm_action(
    g: &Graph,
    kernel: Kernel,
    v: &[f64],
    tol: f64,
    max_dim: usize,
) -> Result<(Vec<f64>, KrylovInfo)> {
    let norm = dot(v, v).sqrt();
    if norm == 0.0 || g.n() == 0 {
        return Ok((
            vec![0.0; v.len()],
            KrylovInfo {
                dim: 0,
                residual: 0.0,
            },
        ));
    }
    let mut lz = Lanczos::new(g, v.iter().map(|x| x / norm).collect());
    let zeta = kernel.zeta();
    loop {
        lz.step();
        let m = lz.dim();
        let fe1 = lz.small_function(kernel);
        let coeff_norm = dot(&fe1, &fe1).sqrt();
        let residual = if lz.exhausted {
            0.0
        } else {
            zeta.max(1.0) * lz.beta[m - 1] * fe1[m - 1].abs() / coeff_norm.max(f64::MIN_POSITIVE)
        };
        if residual <= tol || lz.exhausted || m >= max_dim {
            if residual > tol {
                return Err(Error::KrylovNotConverged { dim: m, residual });
            }
            let mut out = vec![0.0; v.len()];
            for (q, c) in lz.basis.iter().zip(&fe1) {
                axpy(norm * c, q, &mut out);
            }
            return Ok((out, KrylovInfo { dim: m, residual }));
        }
    }
}

/// `f(A)_{ii}` by Lanczos quadrature: `e_1ᵀ f(T_m) e_1` for the recurrence
/// started at `e_i`. Stops when two consecutive estimates agree to `tol`.
pub(super) fn diagonal_entry(
    g: &Graph,
    kernel: Kernel,
    i: usize,
    tol: f64,
    max_dim: usize,
) -> Result<f64> {
    let mut e = vec![0.0; g.n()];
    e[i] = 1.0;
    let mut lz = Lanczos::new(g, e);
    let mut prev = f64::NAN;
    let mut stable = 0;
    loop {
        lz.step();
        let m = lz.dim();
        let est = lz.small_function(kernel)[0];
        let diff = (est - prev).abs();
        if diff <= tol * est.abs().max(f64::MIN_POSITIVE) {
            stable += 1;
        } else {
            stable = 0;
        }
        if lz.exhausted || stable >= 2 {
            return Ok(est);
        }
        if m >= max_dim {
            return Err(Error::KrylovNotConverged {
                dim: m,
                residual: diff / est.abs(),
            });
        }
        prev = est;
    }
}

/// Top Ritz value from a Lanczos run on the all-ones vector.
pub(super) fn largest_eigenvalue(g: &Graph, max_dim: usize) -> f64 {
    let n = g.n();
    if n == 0 {
        return 0.0;
    }
    // A slight tilt keeps the start vector from being orthogonal to ψ_1 on
    // disconnected graphs.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 1e-3 * ((i % 7) as f64)).collect();
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let mut lz = Lanczos::new(g, v);
    let mut prev = f64::NEG_INFINITY;
    loop {
        lz.step();
        let r = lz.ritz_max();
        if lz.exhausted || lz.dim() >= max_dim || (r - prev).abs() <= 1e-14 * r.abs().max(1.0) {
            return r;
        }
        prev = r;
    }
}
