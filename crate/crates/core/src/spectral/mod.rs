//! Functions of the adjacency matrix: `e^{ζA} v` and `diag(e^{ζA})`.
//!
//! Two interchangeable paths:
//!
//! * dense: full eigendecomposition `A = U Λ Uᵀ` once, then every action is
//!   `U f(Λ) Uᵀ v` and every diagonal is `Σ_j f(λ_j) U_ij²`;
//! * Krylov: Lanczos with full reorthogonalisation for actions, Lanczos
//!   quadrature (one short recurrence per node) for diagonal entries.
//!
//! Besides the plain exponential every routine offers the *excess*
//! `e^{ζA} - I` (evaluated with `expm1`, exact to full relative precision as
//! `ζ → 0`) and the *shifted* `e^{ζ(A - sI)}` that keeps values finite when
//! `ζ λ_1` exceeds the range of `f64`.

mod krylov;

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::Graph;

pub use krylov::KrylovInfo;

/// Eigenpairs of the adjacency matrix in descending eigenvalue order.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    /// Column `j` is `ψ_j`.
    eigenvectors: DMatrix<f64>,
}

pub const DEFAULT_DENSE_LIMIT: usize = 5000;
const EIG_MAX_ITER: usize = 10_000;

/// Dense eigendecomposition with the default size budget.
pub fn decompose(g: &Graph) -> Result<SpectralDecomposition> {
    SpectralDecomposition::new(g, DEFAULT_DENSE_LIMIT)
}

impl SpectralDecomposition {
    pub fn new(g: &Graph, limit: usize) -> Result<Self> {
        let n = g.n();
        if n > limit {
            return Err(Error::DenseBudget { n, limit });
        }
        if n == 0 {
            return Err(Error::invalid("empty graph"));
        }
        let eig = SymmetricEigen::try_new(g.dense_adjacency(), f64::EPSILON, EIG_MAX_ITER)
            .ok_or(Error::EigenNonConvergence {
                max_iter: EIG_MAX_ITER,
            })?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            // Perron vector: positive sum. Others: largest-magnitude entry
            // positive, so repeated runs give identical bases.
            let flip = if dst == 0 {
                col.sum() < 0.0
            } else {
                col.iamax() < n && col[col.iamax()] < 0.0
            };
            if flip {
                col.neg_mut();
            }
            eigenvectors.set_column(dst, &col);
        }
        Ok(SpectralDecomposition {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `λ_1 - λ_2` (zero for a single node).
    pub fn gap(&self) -> f64 {
        if self.n() < 2 {
            0.0
        } else {
            self.eigenvalues[0] - self.eigenvalues[1]
        }
    }

    /// `ψ_1`, nonnegative for connected graphs.
    pub fn perron(&self) -> Vec<f64> {
        self.eigenvectors.column(0).iter().copied().collect()
    }

    /// `U diag(f(λ)) Uᵀ v`.
    pub fn apply(&self, f: impl Fn(f64) -> f64, v: &[f64]) -> Vec<f64> {
        let u = &self.eigenvectors;
        let n = self.n();
        let mut coeff = vec![0.0; n];
        for (j, c) in coeff.iter_mut().enumerate() {
            let col = u.column(j);
            let proj: f64 = col.iter().zip(v).map(|(a, b)| a * b).sum();
            *c = f(self.eigenvalues[j]) * proj;
        }
        let mut out = vec![0.0; n];
        for (j, &c) in coeff.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(u.column(j).iter()) {
                *o += c * x;
            }
        }
        out
    }

    /// `Σ_j f(λ_j) U_ij²` for every `i`.
    pub fn diagonal(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = self.n();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = vec![0.0; n];
        for (j, &c) in fl.iter().enumerate() {
            for (o, &x) in out.iter_mut().zip(self.eigenvectors.column(j).iter()) {
                *o += c * x * x;
            }
        }
        out
    }

    /// Full `U diag(f(λ)) Uᵀ`.
    pub fn matrix_function(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let u = &self.eigenvectors;
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.n(),
            self.eigenvalues.iter().map(|&l| f(l)),
        ));
        u * d * u.transpose()
    }

    pub fn write_eigenvalues_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut text = String::from("index,eigenvalue\n");
        for (k, l) in self.eigenvalues.iter().enumerate() {
            text.push_str(&format!("{},{:.17e}\n", k + 1, l));
        }
        f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathChoice {
    /// Dense when `n <= dense_threshold`.
    #[default]
    Auto,
    Dense,
    Krylov,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    pub dense_threshold: usize,
    /// Relative tolerance for Krylov stopping.
    pub tol: f64,
    pub max_dim: usize,
    pub path: PathChoice,
    pub execution: Execution,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            dense_threshold: DEFAULT_DENSE_LIMIT,
            tol: 1e-10,
            max_dim: 200,
            path: PathChoice::Auto,
            execution: Execution::default(),
        }
    }
}

/// Scalar function applied to the spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Kernel {
    /// `e^{ζ(λ - s)}`
    Exp { zeta: f64, shift: f64 },
    /// `e^{ζλ} - 1`
    Expm1 { zeta: f64 },
}

impl Kernel {
    pub(crate) fn eval(self, lambda: f64) -> f64 {
        match self {
            Kernel::Exp { zeta, shift } => (zeta * (lambda - shift)).exp(),
            Kernel::Expm1 { zeta } => (zeta * lambda).exp_m1(),
        }
    }

    pub(crate) fn zeta(self) -> f64 {
        match self {
            Kernel::Exp { zeta, .. } | Kernel::Expm1 { zeta } => zeta,
        }
    }
}

/// Evaluates `e^{ζA}` actions and diagonals for one graph.
#[derive(Debug, Clone)]
pub struct ExpmEngine<'g> {
    graph: &'g Graph,
    config: EngineConfig,
    dense: Option<SpectralDecomposition>,
    lambda_max: f64,
}

impl<'g> ExpmEngine<'g> {
    pub fn new(graph: &'g Graph) -> Result<Self> {
        Self::with_config(graph, EngineConfig::default())
    }

    pub fn with_config(graph: &'g Graph, config: EngineConfig) -> Result<Self> {
        if !(config.tol > 0.0) || config.max_dim == 0 {
            return Err(Error::invalid("engine tolerance and max_dim must be positive"));
        }
        let use_dense = match config.path {
            PathChoice::Auto => graph.n() <= config.dense_threshold,
            PathChoice::Dense => true,
            PathChoice::Krylov => false,
        };
        let (dense, lambda_max) = if use_dense {
            let d = SpectralDecomposition::new(graph, config.dense_threshold.max(graph.n()))?;
            let l = d.lambda_max();
            (Some(d), l)
        } else {
            (None, krylov::largest_eigenvalue(graph, config.max_dim))
        };
        Ok(ExpmEngine {
            graph,
            config,
            dense,
            lambda_max,
        })
    }

    /// Reuses an existing decomposition.
    pub fn from_decomposition(graph: &'g Graph, dec: SpectralDecomposition) -> Result<Self> {
        if dec.n() != graph.n() {
            return Err(Error::invalid("decomposition size does not match graph"));
        }
        let lambda_max = dec.lambda_max();
        Ok(ExpmEngine {
            graph,
            config: EngineConfig {
                path: PathChoice::Dense,
                ..EngineConfig::default()
            },
            dense: Some(dec),
            lambda_max,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn decomposition(&self) -> Option<&SpectralDecomposition> {
        self.dense.as_ref()
    }

    pub fn is_dense(&self) -> bool {
        self.dense.is_some()
    }

    /// `λ_1`, exact on the dense path, the top Ritz value otherwise.
    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// `e^{ζA} v`.
    pub fn action(&self, zeta: f64, v: &[f64]) -> Result<Vec<f64>> {
        self.apply(Kernel::Exp { zeta, shift: 0.0 }, v)
    }

    /// `(e^{ζA} - I) v`.
    pub fn action_excess(&self, zeta: f64, v: &[f64]) -> Result<Vec<f64>> {
        self.apply(Kernel::Expm1 { zeta }, v)
    }

    /// `e^{ζ(A - sI)} v`.
    pub fn action_shifted(&self, zeta: f64, shift: f64, v: &[f64]) -> Result<Vec<f64>> {
        self.apply(Kernel::Exp { zeta, shift }, v)
    }

    /// `diag(e^{ζA})`.
    pub fn diagonal(&self, zeta: f64) -> Result<Vec<f64>> {
        self.diag(Kernel::Exp { zeta, shift: 0.0 })
    }

    /// `diag(e^{ζA}) - 1`.
    pub fn diagonal_excess(&self, zeta: f64) -> Result<Vec<f64>> {
        self.diag(Kernel::Expm1 { zeta })
    }

    /// `diag(e^{ζ(A - sI)})`.
    pub fn diagonal_shifted(&self, zeta: f64, shift: f64) -> Result<Vec<f64>> {
        self.diag(Kernel::Exp { zeta, shift })
    }

    fn check_zeta(zeta: f64) -> Result<()> {
        if !(zeta >= 0.0) || !zeta.is_finite() {
            return Err(Error::invalid(format!("zeta must be finite and >= 0, got {zeta}")));
        }
        Ok(())
    }

    fn finite(values: Vec<f64>, what: &str) -> Result<Vec<f64>> {
        if values.iter().all(|x| x.is_finite()) {
            Ok(values)
        } else {
            Err(Error::NonFinite(format!(
                "{what} overflowed; use the shifted form for large zeta"
            )))
        }
    }

    pub(crate) fn apply(&self, kernel: Kernel, v: &[f64]) -> Result<Vec<f64>> {
        Self::check_zeta(kernel.zeta())?;
        if v.len() != self.graph.n() {
            return Err(Error::invalid(format!(
                "vector has length {}, graph has {} nodes",
                v.len(),
                self.graph.n()
            )));
        }
        if kernel.zeta() == 0.0 {
            return Ok(match kernel {
                Kernel::Exp { .. } => v.to_vec(),
                Kernel::Expm1 { .. } => vec![0.0; v.len()],
            });
        }
        let out = match &self.dense {
            Some(d) => d.apply(|l| kernel.eval(l), v),
            None => {
                krylov::expm_action(self.graph, kernel, v, self.config.tol, self.config.max_dim)?.0
            }
        };
        Self::finite(out, "matrix exponential action")
    }

    pub(crate) fn diag(&self, kernel: Kernel) -> Result<Vec<f64>> {
        Self::check_zeta(kernel.zeta())?;
        if kernel.zeta() == 0.0 {
            let fill = kernel.eval(0.0);
            return Ok(vec![fill; self.graph.n()]);
        }
        let out = match &self.dense {
            Some(d) => d.diagonal(|l| kernel.eval(l)),
            None => {
                let (tol, dim) = (self.config.tol, self.config.max_dim);
                self.config
                    .execution
                    .try_map_range(self.graph.n(), |i| {
                        krylov::diagonal_entry(self.graph, kernel, i, tol, dim)
                    })?
            }
        };
        Self::finite(out, "matrix exponential diagonal")
    }
}

/// `e^{ζA} v` with the default engine.
pub fn expm_action(g: &Graph, zeta: f64, v: &[f64]) -> Result<Vec<f64>> {
    ExpmEngine::new(g)?.action(zeta, v)
}

/// `diag(e^{ζA})` with the default engine.
pub fn expm_diagonal(g: &Graph, zeta: f64) -> Result<Vec<f64>> {
    ExpmEngine::new(g)?.diagonal(zeta)
}
