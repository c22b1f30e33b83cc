//! SI epidemics on a graph: `ẋ_i = γ (1 - x_i) Σ_j A_ij x_j`.
//!
//! Four solvers, from ground truth to cheapest summary:
//!
//! * [`si_exact`]: adaptive Dormand–Prince integration of the nonlinear ODE;
//! * [`si_linearized`]: `x*(t) = e^{γtA} x_0`, an unbounded upper bound;
//! * [`si_lee`]: `x_i = 1 - (1-β) exp(-(β/α)(R_i(αγt) - 1))`, a bound that
//!   stays in `[0, 1]`;
//! * [`si_meanfield`]: the homogeneous logistic curve with the same mean
//!   degree.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::ExpmEngine;

#[derive(Debug, Clone, PartialEq)]
pub struct SIParams {
    /// Infection rate per link.
    pub gamma: f64,
    /// Uniform initial infection probability.
    pub beta: f64,
    pub t_grid: Vec<f64>,
}

impl SIParams {
    pub fn new(gamma: f64, beta: f64, t_grid: Vec<f64>) -> Result<Self> {
        let p = SIParams { gamma, beta, t_grid };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma must be >= 0, got {}", self.gamma)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::invalid(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        validate_times(&self.t_grid)
    }

    pub fn alpha(&self) -> f64 {
        1.0 - self.beta
    }

    /// External risk `ζ = αγt`.
    pub fn zeta(&self, t: f64) -> f64 {
        self.alpha() * self.gamma * t
    }
}

fn validate_times(t: &[f64]) -> Result<()> {
    if t.is_empty() {
        return Err(Error::invalid("time grid is empty"));
    }
    if !t.iter().all(|x| x.is_finite() && *x >= 0.0) || t.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("time grid must be nonnegative and strictly ascending"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    ExactOde,
    Linearized,
    LeeBound,
    MeanField,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::ExactOde => "exact-ode",
            Solver::Linearized => "linearized",
            Solver::LeeBound => "lee-bound",
            Solver::MeanField => "mean-field",
        })
    }
}

impl std::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact-ode" | "exact" => Ok(Solver::ExactOde),
            "linearized" => Ok(Solver::Linearized),
            "lee-bound" | "lee" => Ok(Solver::LeeBound),
            "mean-field" | "meanfield" => Ok(Solver::MeanField),
            other => Err(Error::invalid(format!("unknown solver {other:?}"))),
        }
    }
}

/// Infection probabilities; row `k` is time `t_grid[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SITrajectory {
    pub t_grid: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub solver: Solver,
}

impl SITrajectory {
    /// Mean over nodes at each time.
    pub fn node_mean(&self) -> Vec<f64> {
        self.x.iter().map(|row| crate::stats::mean(row)).collect()
    }

    /// Rows = t; columns = node labels then `mean`.
    pub fn write_csv(&self, labels: &[String], path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["t".to_string()];
        header.extend(labels.iter().cloned());
        header.push("mean".into());
        w.write_record(&header)?;
        for (t, row) in self.t_grid.iter().zip(&self.x) {
            let mut rec = vec![t.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            rec.push(crate::stats::mean(row).to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

pub fn si_exact(g: &Graph, params: &SIParams) -> Result<SITrajectory> {
    params.validate()?;
    si_exact_from(g, &vec![params.beta; g.n()], params.gamma, &params.t_grid)
}

/// Exact ODE from an arbitrary initial state `x0 ∈ [0,1]^n`.
pub fn si_exact_from(g: &Graph, x0: &[f64], gamma: f64, t_grid: &[f64]) -> Result<SITrajectory> {
    check_state(g, x0)?;
    validate_times(t_grid)?;
    let rhs = |x: &[f64], out: &mut [f64]| {
        g.matvec_into(x, out);
        for (o, xi) in out.iter_mut().zip(x) {
            *o *= gamma * (1.0 - xi);
        }
    };
    let x = dopri::integrate(rhs, x0, t_grid, &dopri::Tolerances::default())?;
    Ok(SITrajectory {
        t_grid: t_grid.to_vec(),
        x,
        solver: Solver::ExactOde,
    })
}

fn check_state(g: &Graph, x0: &[f64]) -> Result<()> {
    if x0.len() != g.n() {
        return Err(Error::invalid("initial state length differs from node count"));
    }
    if !x0.iter().all(|v| (0.0..=1.0).contains(v)) {
        return Err(Error::invalid("initial probabilities must lie in [0, 1]"));
    }
    Ok(())
}

pub fn si_linearized(g: &Graph, params: &SIParams) -> Result<SITrajectory> {
    params.validate()?;
    si_linearized_from(g, &vec![params.beta; g.n()], params.gamma, &params.t_grid)
}

/// `e^{γtA} x_0` at every grid time.
pub fn si_linearized_from(g: &Graph, x0: &[f64], gamma: f64, t_grid: &[f64]) -> Result<SITrajectory> {
    check_state(g, x0)?;
    validate_times(t_grid)?;
    let e = ExpmEngine::new(g)?;
    let x = t_grid
        .iter()
        .map(|&t| e.action(gamma * t, x0))
        .collect::<Result<Vec<_>>>()?;
    Ok(SITrajectory {
        t_grid: t_grid.to_vec(),
        x,
        solver: Solver::Linearized,
    })
}

/// `R_i(ζ) - 1` at every grid time with `ζ = αγt`; `None` entries mark
/// overflow (the bound is then 1).
fn lee_excess(g: &Graph, params: &SIParams) -> Result<Vec<Option<Vec<f64>>>> {
    let e = ExpmEngine::new(g)?;
    let ones = vec![1.0; g.n()];
    params
        .t_grid
        .iter()
        .map(|&t| match e.action_excess(params.zeta(t), &ones) {
            Ok(v) => Ok(Some(v)),
            Err(Error::NonFinite(_)) => Ok(None),
            Err(other) => Err(other),
        })
        .collect()
}

pub fn si_lee(g: &Graph, params: &SIParams) -> Result<SITrajectory> {
    params.validate()?;
    let (beta, alpha) = (params.beta, params.alpha());
    let x = lee_excess(g, params)?
        .into_iter()
        .map(|row| match row {
            Some(ex) => ex
                .iter()
                .map(|r1| beta - alpha * (-(beta / alpha) * r1).exp_m1())
                .collect(),
            None => vec![1.0; g.n()],
        })
        .collect();
    Ok(SITrajectory {
        t_grid: params.t_grid.clone(),
        x,
        solver: Solver::LeeBound,
    })
}

/// `y(t) = -log(1 - x(t))` of the Lee solution:
/// `y = (1/α - 1) R - (log α + (1-α)/α)`.
pub fn lee_y(g: &Graph, params: &SIParams) -> Result<Vec<Vec<f64>>> {
    params.validate()?;
    let (beta, alpha) = (params.beta, params.alpha());
    let y0 = -alpha.ln();
    Ok(lee_excess(g, params)?
        .into_iter()
        .map(|row| match row {
            Some(ex) => ex.iter().map(|r1| y0 + beta / alpha * r1).collect(),
            None => vec![f64::INFINITY; g.n()],
        })
        .collect())
}

/// Lee solution for a non-uniform start `x0 < 1`:
/// `y = y0 + Σ_{j≥0} (γt)^{j+1}/(j+1)! (A D)^j A x0` with `D = diag(1 - x0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTrajectory {
    pub trajectory: SITrajectory,
    /// Bound on the ∞-norm of the discarded tail of `y`, per time.
    pub tail_bound: Vec<f64>,
}

pub const SERIES_ORDER: usize = 60;

pub fn si_lee_general(g: &Graph, x0: &[f64], gamma: f64, t_grid: &[f64]) -> Result<SeriesTrajectory> {
    check_state(g, x0)?;
    validate_times(t_grid)?;
    if x0.iter().any(|&v| v >= 1.0) {
        return Err(Error::invalid("series path needs every initial probability below 1"));
    }
    let d: Vec<f64> = x0.iter().map(|v| 1.0 - v).collect();
    // terms[j] = (A D)^j A x0
    let mut terms = Vec::with_capacity(SERIES_ORDER + 1);
    terms.push(g.matvec(x0));
    for j in 1..=SERIES_ORDER {
        let scaled: Vec<f64> = terms[j - 1].iter().zip(&d).map(|(a, b)| a * b).collect();
        terms.push(g.matvec(&scaled));
    }
    let rho = (0..g.n())
        .map(|i| g.neighbors(i).iter().map(|&(j, w)| w * d[j]).sum::<f64>())
        .fold(0.0, f64::max);
    let norm_ax0 = terms[0].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let y0: Vec<f64> = d.iter().map(|v| -v.ln()).collect();

    let mut x = Vec::with_capacity(t_grid.len());
    let mut tail_bound = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let s = gamma * t;
        let mut y = y0.clone();
        let mut coef = 1.0;
        for (j, term) in terms.iter().enumerate() {
            coef *= s / (j + 1) as f64;
            for (yi, v) in y.iter_mut().zip(term) {
                *yi += coef * v;
            }
        }
        // Next coefficient s^{J+2}/(J+2)! times geometric majorant.
        let next = coef * s / (SERIES_ORDER + 2) as f64;
        let ratio = s * rho / (SERIES_ORDER + 3) as f64;
        let bound = if ratio < 1.0 {
            next * rho.powi(SERIES_ORDER as i32 + 1) * norm_ax0 / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        tail_bound.push(bound);
        x.push(y.iter().map(|v| -(-v).exp_m1()).collect());
    }
    Ok(SeriesTrajectory {
        trajectory: SITrajectory {
            t_grid: t_grid.to_vec(),
            x,
            solver: Solver::LeeBound,
        },
        tail_bound,
    })
}

/// Logistic SI with mean degree `kbar`: `β / (β + (1-β) e^{-γ k̄ t})`.
pub fn si_meanfield(kbar: f64, params: &SIParams) -> Result<Vec<f64>> {
    params.validate()?;
    if !(kbar > 0.0) {
        return Err(Error::invalid("mean degree must be positive"));
    }
    let b = params.beta;
    Ok(params
        .t_grid
        .iter()
        .map(|&t| b / (b + (1.0 - b) * (-params.gamma * kbar * t).exp()))
        .collect())
}

/// Ratio of the probabilities that `i` and `j` stay uninfected:
/// `e^{(β/α)(R_j - R_i)}`.
pub fn survival_ratio(g: &Graph, zeta: f64, beta: f64, i: usize, j: usize) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::invalid("beta must lie in (0, 1)"));
    }
    for index in [i, j] {
        if index >= g.n() {
            return Err(Error::NodeOutOfRange { index, n: g.n() });
        }
    }
    let r = ExpmEngine::new(g)?.action_excess(zeta, &vec![1.0; g.n()])?;
    Ok((beta / (1.0 - beta) * (r[j] - r[i])).exp())
}

mod dopri {
    use crate::error::{Error, Result};

    pub struct Tolerances {
        pub atol: f64,
        pub rtol: f64,
    }

    impl Default for Tolerances {
        fn default() -> Self {
            Tolerances {
                atol: 1e-12,
                rtol: 1e-10,
            }
        }
    }

    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    /// Fifth-order weights minus embedded fourth-order weights.
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];

    /// Solution of the autonomous system `y' = f(y)` at every grid time.
    /// Steps are clipped to land on grid points.
    pub fn integrate<F>(f: F, y0: &[f64], grid: &[f64], tol: &Tolerances) -> Result<Vec<Vec<f64>>>
    where
        F: Fn(&[f64], &mut [f64]),
    {
        let n = y0.len();
        let mut y = y0.to_vec();
        let mut t = grid[0];
        let mut out = vec![y.clone()];
        let mut k = vec![vec![0.0; n]; 7];
        let mut tmp = vec![0.0; n];
        f(&y, &mut k[0]);
        let mut h = initial_step(&y, &k[0], tol);
        for &target in &grid[1..] {
            while t < target {
                let last = h >= target - t;
                let step = if last { target - t } else { h };
                if step <= 1e-14 * t.abs().max(1.0) && !last {
                    return Err(Error::StepUnderflow { t });
                }
                for s in 1..7 {
                    for i in 0..n {
                        let mut acc = y[i];
                        for (r, a) in A[s][..s].iter().enumerate() {
                            acc += step * a * k[r][i];
                        }
                        tmp[i] = acc;
                    }
                    f(&tmp, &mut k[s]);
                }
                // Stage 7 was evaluated at the fifth-order solution (FSAL).
                let mut err = 0.0f64;
                for i in 0..n {
                    let mut e = 0.0;
                    for s in 0..7 {
                        e += E[s] * k[s][i];
                    }
                    let sc = tol.atol + tol.rtol * y[i].abs().max(tmp[i].abs());
                    err = err.max((step * e / sc).abs());
                }
                if !err.is_finite() {
                    return Err(Error::NonFinite(format!("ODE state at t = {t}")));
                }
                if err <= 1.0 {
                    t = if last { target } else { t + step };
                    y.copy_from_slice(&tmp);
                    k.swap(0, 6);
                }
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if err <= 1.0 && last {
                    h = h.max(step * factor);
                } else {
                    h = step * factor;
                }
                if h <= 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow { t });
                }
            }
            out.push(y.clone());
        }
        Ok(out)
    }

    fn initial_step(y: &[f64], dy: &[f64], tol: &Tolerances) -> f64 {
        let mut d0 = 0.0f64;
        let mut d1 = 0.0f64;
        for (a, b) in y.iter().zip(dy) {
            let sc = tol.atol + tol.rtol * a.abs();
            d0 = d0.max((a / sc).abs());
            d1 = d1.max((b / sc).abs());
        }
        if d1 <= 1e-5 || d0 <= 1e-5 {
            1e-3
        } else {
            (0.01 * d0 / d1).max(1e-6)
        }
    }
}
