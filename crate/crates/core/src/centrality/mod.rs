//! Risk-dependent centralities `R`, `C`, `T`, their ζ sweeps and rankings.
//!
//! Ranks are 1-based with rank 1 = most central.

mod export;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::Graph;
use crate::spectral::ExpmEngine;

pub use crate::stats::spearman;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    /// Total communicability `(e^{ζA} 1)_i`.
    R,
    /// Circulability `(e^{ζA})_ii`.
    C,
    /// Transmissibility `R - C`.
    T,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::R, Measure::C, Measure::T];
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::R => "R",
            Measure::C => "C",
            Measure::T => "T",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "R" | "r" | "risk" => Ok(Measure::R),
            "C" | "c" | "circulability" => Ok(Measure::C),
            "T" | "t" | "transmissibility" => Ok(Measure::T),
            other => Err(Error::invalid(format!("unknown measure {other:?}"))),
        }
    }
}

pub fn risk_centrality(g: &Graph, zeta: f64) -> Result<Vec<f64>> {
    ExpmEngine::new(g)?.action(zeta, &vec![1.0; g.n()])
}

pub fn circulability(g: &Graph, zeta: f64) -> Result<Vec<f64>> {
    ExpmEngine::new(g)?.diagonal(zeta)
}

pub fn transmissibility(g: &Graph, zeta: f64) -> Result<Vec<f64>> {
    let e = ExpmEngine::new(g)?;
    measure_values(&e, Measure::T, zeta)
}

/// Raw values of `measure` at `zeta`.
pub fn measure_values(engine: &ExpmEngine<'_>, measure: Measure, zeta: f64) -> Result<Vec<f64>> {
    let n = engine.graph().n();
    match measure {
        Measure::R => engine.action(zeta, &vec![1.0; n]),
        Measure::C => engine.diagonal(zeta),
        Measure::T => {
            let r = engine.action(zeta, &vec![1.0; n])?;
            let c = engine.diagonal(zeta)?;
            Ok(r.iter().zip(&c).map(|(a, b)| a - b).collect())
        }
    }
}

/// Values that order nodes exactly like `measure` at `zeta` but stay
/// accurate and finite at both extremes: the excess over the identity
/// (`R - 1`, `C - 1`, `T`) while `ζ λ_1 <= 1`, otherwise the values scaled
/// by `e^{-ζ λ_1}`.
pub fn ranking_values(engine: &ExpmEngine<'_>, measure: Measure, zeta: f64) -> Result<Vec<f64>> {
    let n = engine.graph().n();
    let ones = vec![1.0; n];
    let shift = engine.lambda_max();
    let excess = zeta * shift.abs() <= 1.0;
    let r = || {
        if excess {
            engine.action_excess(zeta, &ones)
        } else {
            engine.action_shifted(zeta, shift, &ones)
        }
    };
    let c = || {
        if excess {
            engine.diagonal_excess(zeta)
        } else {
            engine.diagonal_shifted(zeta, shift)
        }
    };
    match measure {
        Measure::R => r(),
        Measure::C => c(),
        Measure::T => Ok(r()?.iter().zip(&c()?).map(|(a, b)| a - b).collect()),
    }
}

/// `0.01, 0.02, ..., 1.00`.
pub fn default_grid() -> Vec<f64> {
    uniform_grid(0.01, 1.0, 100)
}

/// `count` equally spaced points from `start` to `stop` inclusive.
pub fn uniform_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![start];
    }
    let h = (stop - start) / (count - 1) as f64;
    (0..count).map(|k| start + h * k as f64).collect()
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("zeta grid is empty"));
    }
    if !grid.iter().all(|z| z.is_finite() && *z > 0.0) {
        return Err(Error::invalid("zeta grid values must be finite and positive"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("zeta grid must be strictly ascending"));
    }
    Ok(())
}

/// `R`, `C`, `T` for every node at every grid point. Row `k` belongs to
/// `zeta_grid[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskProfile {
    pub zeta_grid: Vec<f64>,
    pub labels: Vec<String>,
    pub r: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub t: Vec<Vec<f64>>,
}

impl RiskProfile {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn rows(&self, measure: Measure) -> &[Vec<f64>] {
        match measure {
            Measure::R => &self.r,
            Measure::C => &self.c,
            Measure::T => &self.t,
        }
    }

    /// Row index of `zeta` (within `1e-9`).
    pub fn grid_index(&self, zeta: f64) -> Result<usize> {
        self.zeta_grid
            .iter()
            .position(|z| (z - zeta).abs() <= 1e-9 * zeta.abs().max(1.0))
            .ok_or(Error::ZetaNotOnGrid(zeta))
    }

    /// Node `i`'s curve for `measure`.
    pub fn column(&self, measure: Measure, i: usize) -> Vec<f64> {
        self.rows(measure).iter().map(|row| row[i]).collect()
    }
}

pub fn sweep(g: &Graph, zeta_grid: &[f64]) -> Result<RiskProfile> {
    sweep_with(&ExpmEngine::new(g)?, zeta_grid, Execution::default())
}

/// Parallel over grid points against one engine.
pub fn sweep_with(engine: &ExpmEngine<'_>, zeta_grid: &[f64], exec: Execution) -> Result<RiskProfile> {
    validate_grid(zeta_grid)?;
    let g = engine.graph();
    let ones = vec![1.0; g.n()];
    let rows = exec.try_map_range(zeta_grid.len(), |k| -> Result<_> {
        let r = engine.action(zeta_grid[k], &ones)?;
        let c = engine.diagonal(zeta_grid[k])?;
        let t = r.iter().zip(&c).map(|(a, b)| a - b).collect::<Vec<_>>();
        Ok((r, c, t))
    })?;
    let mut profile = RiskProfile {
        zeta_grid: zeta_grid.to_vec(),
        labels: g.labels().to_vec(),
        r: Vec::with_capacity(rows.len()),
        c: Vec::with_capacity(rows.len()),
        t: Vec::with_capacity(rows.len()),
    };
    for (r, c, t) in rows {
        profile.r.push(r);
        profile.c.push(c);
        profile.t.push(t);
    }
    Ok(profile)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieRule {
    /// Equal values ordered by node index: a permutation of `1..=n`.
    #[default]
    NodeIndex,
    /// Equal values share the mean of their positions.
    Average,
}

/// Permutation ranks, rank 1 = largest value, ties by node index.
pub fn rank(values: &[f64]) -> Result<Vec<usize>> {
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::NaN);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut ranks = vec![0; values.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = pos + 1;
    }
    Ok(ranks)
}

pub fn rank_with(values: &[f64], rule: TieRule) -> Result<Vec<f64>> {
    match rule {
        TieRule::NodeIndex => Ok(rank(values)?.into_iter().map(|r| r as f64).collect()),
        TieRule::Average => {
            if values.iter().any(|v| v.is_nan()) {
                return Err(Error::NaN);
            }
            Ok(crate::stats::average_ranks(values))
        }
    }
}

/// Per-ζ permutation ranks of one measure and each node's rank volatility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingSweep {
    pub measure: Measure,
    pub zeta_grid: Vec<f64>,
    pub labels: Vec<String>,
    /// `ranks[k][i]`: rank of node `i` at `zeta_grid[k]`.
    pub ranks: Vec<Vec<usize>>,
    /// Population standard deviation of each node's rank across the grid.
    pub std: Vec<f64>,
}

impl RankingSweep {
    fn from_rows(measure: Measure, zeta_grid: Vec<f64>, labels: Vec<String>, ranks: Vec<Vec<usize>>) -> Self {
        let n = labels.len();
        let std = (0..n)
            .map(|i| {
                let col: Vec<f64> = ranks.iter().map(|row| row[i] as f64).collect();
                crate::stats::std_population(&col)
            })
            .collect();
        RankingSweep {
            measure,
            zeta_grid,
            labels,
            ranks,
            std,
        }
    }

    pub fn mean_std(&self) -> f64 {
        crate::stats::mean(&self.std)
    }

    pub fn ranks_at(&self, zeta: f64) -> Result<&[usize]> {
        let k = self
            .zeta_grid
            .iter()
            .position(|z| (z - zeta).abs() <= 1e-9 * zeta.abs().max(1.0))
            .ok_or(Error::ZetaNotOnGrid(zeta))?;
        Ok(&self.ranks[k])
    }
}

/// Ranks the stored values of `profile`.
pub fn ranking_sweep(profile: &RiskProfile, measure: Measure) -> Result<RankingSweep> {
    let ranks = profile
        .rows(measure)
        .iter()
        .map(|row| rank(row))
        .collect::<Result<Vec<_>>>()?;
    Ok(RankingSweep::from_rows(
        measure,
        profile.zeta_grid.clone(),
        profile.labels.clone(),
        ranks,
    ))
}

/// Ranks computed from [`ranking_values`]; valid for any grid, including
/// ζ far below or above the range where raw values are informative.
pub fn ranking_sweep_direct(
    engine: &ExpmEngine<'_>,
    zeta_grid: &[f64],
    measure: Measure,
    exec: Execution,
) -> Result<RankingSweep> {
    validate_grid(zeta_grid)?;
    let ranks = exec.try_map_range(zeta_grid.len(), |k| {
        rank(&ranking_values(engine, measure, zeta_grid[k])?)
    })?;
    Ok(RankingSweep::from_rows(
        measure,
        zeta_grid.to_vec(),
        engine.graph().labels().to_vec(),
        ranks,
    ))
}

/// Reference orderings for ζ → 0 and ζ → ∞.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitRankings {
    /// Degree, or strength on weighted graphs.
    pub degree: Vec<f64>,
    /// Perron vector `ψ_1`.
    pub eigenvector: Vec<f64>,
    pub degree_ranks: Vec<usize>,
    pub eigenvector_ranks: Vec<usize>,
}

pub fn limit_rankings(g: &Graph) -> Result<LimitRankings> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let degree = g.strengths();
    let eigenvector = crate::spectral::decompose(g)?.perron();
    Ok(LimitRankings {
        degree_ranks: rank(&degree)?,
        eigenvector_ranks: rank(&eigenvector)?,
        degree,
        eigenvector,
    })
}

/// True when `values` orders every pair of nodes the way `reference` does,
/// ignoring pairs that `reference` ties. Reference entries within
/// `tie_tol` (relative) of each other form one tie group.
pub fn orders_agree(values: &[f64], reference: &[f64], tie_tol: f64) -> bool {
    let n = reference.len();
    for i in 0..n {
        for j in 0..n {
            let scale = reference[i].abs().max(reference[j].abs()).max(f64::MIN_POSITIVE);
            if reference[i] - reference[j] > tie_tol * scale && values[i] <= values[j] {
                return false;
            }
        }
    }
    true
}

/// Closed forms on the complete graph `K_n`: `(R, C, T)` of every node.
pub fn complete_graph_closed_form(n: usize, zeta: f64) -> (f64, f64, f64) {
    let m = (n - 1) as f64;
    let nf = n as f64;
    let big = (m * zeta).exp();
    let small = (-zeta).exp();
    let r = big;
    let c = m / nf * (big / m + small);
    let t = m / nf * (big - small);
    (r, c, t)
}
