//! Ranking interlacement: values of ζ where two nodes swap order under
//! `R`, `C` or `T`.
//!
//! [`detect`] is the reference: it scans the sign of the pair difference on
//! a grid and bisects every sign change. The series heuristics in
//! [`series`] predict crossings from walk counts alone, and
//! [`shifted_expansion`] re-expands around a known crossing to predict the
//! next one.

pub mod fixtures;
mod series;

use std::fmt;
use std::path::Path;

use crate::centrality::Measure;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::Graph;
use crate::spectral::{decompose, SpectralDecomposition};

pub use series::{
    heuristic_linear, heuristic_linear_with, heuristic_poly, linear_from_counts, poly_real_roots,
    series_coefficients, DegreeRule, PolyRoots, SeriesCoefficients,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    GridBisection,
    LinearHeuristic,
    PolyHeuristic(usize),
    ShiftedExpansion,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::GridBisection => f.write_str("grid-bisection"),
            Method::LinearHeuristic => f.write_str("linear-heuristic"),
            Method::PolyHeuristic(k) => write!(f, "poly-heuristic({k})"),
            Method::ShiftedExpansion => f.write_str("shifted-expansion"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterlacementEvent {
    pub i: usize,
    pub j: usize,
    pub measure: Measure,
    pub zeta_star: f64,
    pub method: Method,
    pub bracket: (f64, f64),
    /// Sign of `M_i - M_j` just below / above the crossing.
    pub sign_before: i8,
    pub sign_after: i8,
}

/// Point where the two curves touch without crossing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangency {
    pub zeta: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Detection {
    pub events: Vec<InterlacementEvent>,
    pub tangencies: Vec<Tangency>,
}

pub const BRACKET_WIDTH: f64 = 1e-8;
pub const TANGENCY_TOL: f64 = 1e-10;

/// `M_i(ζ) - M_j(ζ) = Σ_k (e^{ζλ_k} - 1) c_k` in spectral form.
///
/// For `C`, `c_k = ψ_ki² - ψ_kj²`; for `R`, `c_k = (ψ_kᵀ1)(ψ_ki - ψ_kj)`; `T`
/// takes the difference of the two. Every family sums to zero, so the
/// `expm1` form loses nothing as `ζ → 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairCurve {
    pub i: usize,
    pub j: usize,
    pub measure: Measure,
    lambda: Vec<f64>,
    coeff: Vec<f64>,
    /// Magnitudes `|a_k| + |b_k|` of the two families whose difference is
    /// `c_k`; used for the rounding floor.
    mag: Vec<f64>,
}

impl PairCurve {
    pub fn new(dec: &SpectralDecomposition, i: usize, j: usize, measure: Measure) -> Result<Self> {
        let n = dec.n();
        for index in [i, j] {
            if index >= n {
                return Err(Error::NodeOutOfRange { index, n });
            }
        }
        if i == j {
            return Err(Error::invalid("interlacement needs two distinct nodes"));
        }
        let u = dec.eigenvectors();
        let mut coeff = Vec::with_capacity(n);
        let mut mag = Vec::with_capacity(n);
        for k in 0..n {
            let (pi, pj) = (u[(i, k)], u[(j, k)]);
            let s: f64 = u.column(k).sum();
            let (ci, cj) = (pi * pi, pj * pj);
            let (ri, rj) = (s * pi, s * pj);
            let (a, b) = match measure {
                Measure::C => (ci, cj),
                Measure::R => (ri, rj),
                Measure::T => (ri - ci, rj - cj),
            };
            coeff.push(a - b);
            mag.push(match measure {
                Measure::T => ri.abs() + ci.abs() + rj.abs() + cj.abs(),
                _ => a.abs() + b.abs(),
            });
        }
        Ok(PairCurve {
            i,
            j,
            measure,
            lambda: dec.eigenvalues().to_vec(),
            coeff,
            mag,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeff
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.lambda
    }

    /// `M_i(ζ) - M_j(ζ)`.
    pub fn value(&self, zeta: f64) -> f64 {
        self.lambda
            .iter()
            .zip(&self.coeff)
            .map(|(l, c)| (zeta * l).exp_m1() * c)
            .sum()
    }

    /// `e^{-ζλ_1} (M_i(ζ) - M_j(ζ))`: same sign, never overflows.
    pub fn scaled_value(&self, zeta: f64) -> f64 {
        let l1 = self.lambda[0];
        if zeta * l1.abs() < 1.0 {
            return (-zeta * l1).exp() * self.value(zeta);
        }
        self.lambda
            .iter()
            .zip(&self.coeff)
            .map(|(l, c)| (zeta * (l - l1)).exp() * c)
            .sum()
    }

    /// Rounding floor of [`PairCurve::scaled_value`]: values below it carry
    /// no sign information.
    pub fn noise_floor(&self, zeta: f64) -> f64 {
        let l1 = self.lambda[0];
        let scale: f64 = if zeta * l1.abs() < 1.0 {
            self.lambda
                .iter()
                .zip(&self.mag)
                .map(|(l, m)| (zeta * l).exp_m1().abs() * m)
                .sum::<f64>()
                * (-zeta * l1).exp()
        } else {
            self.lambda
                .iter()
                .zip(&self.mag)
                .map(|(l, m)| (zeta * (l - l1)).exp() * m)
                .sum()
        };
        64.0 * f64::EPSILON * scale * (self.lambda.len() as f64).sqrt()
    }

    /// `d^m/dζ^m (M_i - M_j)` for `m >= 1`.
    pub fn derivative(&self, m: u32, zeta: f64) -> f64 {
        self.lambda
            .iter()
            .zip(&self.coeff)
            .map(|(l, c)| l.powi(m as i32) * (zeta * l).exp() * c)
            .sum()
    }

    fn sign_at(&self, zeta: f64) -> i8 {
        let v = self.scaled_value(zeta);
        if v.abs() <= self.noise_floor(zeta) {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    }

    /// Crossings and tangencies on `grid`.
    pub fn detect(&self, grid: &[f64]) -> Result<Detection> {
        crate::centrality::validate_grid(grid)?;
        let signs: Vec<i8> = grid.iter().map(|&z| self.sign_at(z)).collect();
        let mut out = Detection::default();
        let mut last: Option<(usize, i8)> = None;
        for (k, &s) in signs.iter().enumerate() {
            if s == 0 {
                continue;
            }
            if let Some((p, ps)) = last {
                if ps != s {
                    out.events.push(self.refine(grid[p], grid[k], ps, s));
                }
            }
            last = Some((k, s));
        }
        if signs.iter().all(|&s| s == 0) {
            // Identical curves, e.g. nodes swapped by an automorphism.
            return Ok(out);
        }
        let vals: Vec<f64> = grid.iter().map(|&z| self.value(z)).collect();
        for k in 1..grid.len().saturating_sub(1) {
            let (a, b, c) = (vals[k - 1].abs(), vals[k].abs(), vals[k + 1].abs());
            let flip = signs[k - 1] * signs[k + 1] < 0;
            if b <= a && b <= c && b < TANGENCY_TOL && !flip {
                out.tangencies.push(Tangency {
                    zeta: grid[k],
                    difference: vals[k],
                });
            }
        }
        Ok(out)
    }

    fn refine(&self, mut lo: f64, mut hi: f64, s_lo: i8, s_hi: i8) -> InterlacementEvent {
        while hi - lo > BRACKET_WIDTH {
            let mid = 0.5 * (lo + hi);
            let s = self.sign_at(mid);
            if s == 0 {
                lo = mid - 0.25 * BRACKET_WIDTH;
                hi = mid + 0.25 * BRACKET_WIDTH;
                break;
            }
            if s == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut z = 0.5 * (lo + hi);
        let d = self.derivative(1, z);
        if d != 0.0 && d.is_finite() {
            let newton = z - self.value(z) / d;
            if newton > lo && newton < hi {
                z = newton;
            }
        }
        InterlacementEvent {
            i: self.i,
            j: self.j,
            measure: self.measure,
            zeta_star: z,
            method: Method::GridBisection,
            bracket: (lo, hi),
            sign_before: s_lo,
            sign_after: s_hi,
        }
    }
}

/// Grid scan plus bisection for the pair `(i, j)`.
pub fn detect(g: &Graph, i: usize, j: usize, measure: Measure, grid: &[f64]) -> Result<Detection> {
    PairCurve::new(&decompose(g)?, i, j, measure)?.detect(grid)
}

/// Every pair `i < j`, in parallel over pairs against one decomposition.
pub fn scan_all_pairs(
    g: &Graph,
    measure: Measure,
    grid: &[f64],
    exec: Execution,
) -> Result<Vec<InterlacementEvent>> {
    let dec = decompose(g)?;
    let n = g.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let per_pair = exec.map(&pairs, |&(i, j)| {
        PairCurve::new(&dec, i, j, measure)?.detect(grid).map(|d| d.events)
    });
    let mut out = Vec::new();
    for events in per_pair {
        out.extend(events?);
    }
    Ok(out)
}

/// Prediction of the crossing that follows `zeta_star`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedCrossing {
    /// Smallest positive root `η*` of the re-expanded polynomial.
    pub eta: f64,
    /// `ζ* + η*`.
    pub predicted: f64,
    /// The crossing detect finds near the prediction.
    pub event: InterlacementEvent,
}

pub const DEFAULT_SHIFT_ORDER: usize = 12;

/// Re-expands `M_i - M_j` around a known crossing `ζ*`:
/// `Σ_{m=1}^{k} D_m η^{m-1} / m! = 0` with `D_m` the spectral derivatives.
/// Returns the next crossing when the smallest positive root is confirmed by
/// [`PairCurve::detect`] on a local grid, `None` otherwise.
pub fn shifted_expansion(
    g: &Graph,
    i: usize,
    j: usize,
    measure: Measure,
    zeta_star: f64,
    k: usize,
) -> Result<Option<ShiftedCrossing>> {
    let curve = PairCurve::new(&decompose(g)?, i, j, measure)?;
    shifted_expansion_on(&curve, zeta_star, k)
}

pub fn shifted_expansion_on(
    curve: &PairCurve,
    zeta_star: f64,
    k: usize,
) -> Result<Option<ShiftedCrossing>> {
    if !(zeta_star > 0.0) {
        return Err(Error::invalid("zeta_star must be positive"));
    }
    if k < 2 {
        return Err(Error::invalid("expansion order must be at least 2"));
    }
    let mut coeffs = Vec::with_capacity(k);
    let mut fact = 1.0;
    for m in 1..=k {
        fact *= m as f64;
        coeffs.push(curve.derivative(m as u32, zeta_star) / fact);
    }
    let roots = poly_real_roots(&coeffs);
    let Some(&eta) = roots.iter().find(|&&r| r > 1e-9) else {
        return Ok(None);
    };
    let predicted = zeta_star + eta;
    let lo = zeta_star + 0.25 * eta;
    let hi = zeta_star + 2.0 * eta;
    let grid: Vec<f64> = (0..=400).map(|s| lo + (hi - lo) * s as f64 / 400.0).collect();
    let det = curve.detect(&grid)?;
    let best = det.events.into_iter().min_by(|a, b| {
        (a.zeta_star - predicted)
            .abs()
            .total_cmp(&(b.zeta_star - predicted).abs())
    });
    Ok(best.map(|mut event| {
        event.method = Method::ShiftedExpansion;
        ShiftedCrossing {
            eta,
            predicted,
            event,
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Finiteness {
    /// No crossing can occur for `ζ > zeta_bar`.
    Bounded { zeta_bar: f64 },
    /// Leading coefficient vanishes (equal eigenvector entries) or the
    /// spectral gap is zero.
    Undecidable,
}

/// Tail bound for circulability: the smallest `ζ̄` with
/// `|c_1| > Σ_{k≥2} e^{ζ(λ_k - λ_1)} |c_k|`.
pub fn finiteness_check(g: &Graph, i: usize, j: usize) -> Result<Finiteness> {
    Ok(finiteness_bound(&PairCurve::new(&decompose(g)?, i, j, Measure::C)?))
}

pub fn finiteness_bound(curve: &PairCurve) -> Finiteness {
    let l = &curve.lambda;
    let c = &curve.coeff;
    let lead = c[0].abs();
    let gap = if l.len() > 1 { l[0] - l[1] } else { f64::INFINITY };
    if lead <= 1e-12 || gap <= 1e-12 {
        return Finiteness::Undecidable;
    }
    let tail = |z: f64| -> f64 {
        l.iter()
            .zip(c)
            .skip(1)
            .map(|(lk, ck)| (z * (lk - l[0])).exp() * ck.abs())
            .sum()
    };
    if tail(0.0) < lead {
        return Finiteness::Bounded { zeta_bar: 0.0 };
    }
    let mut hi = 1.0;
    while tail(hi) >= lead {
        hi *= 2.0;
        if hi > 1e12 {
            return Finiteness::Undecidable;
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-10 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if tail(mid) >= lead {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Finiteness::Bounded { zeta_bar: hi }
}

/// Columns `i,j,measure,method,zeta_star,bracket_lo,bracket_hi`; nodes by
/// label.
pub fn write_events_csv(
    events: &[InterlacementEvent],
    labels: &[String],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["i", "j", "measure", "method", "zeta_star", "bracket_lo", "bracket_hi"])?;
    for e in events {
        w.write_record([
            labels[e.i].clone(),
            labels[e.j].clone(),
            e.measure.to_string(),
            e.method.to_string(),
            e.zeta_star.to_string(),
            e.bracket.0.to_string(),
            e.bracket.1.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests;
