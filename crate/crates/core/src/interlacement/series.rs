//! Truncated walk-series heuristics.
//!
//! With `s^(k)` the closed (`C`), total (`R`) or open (`T`) walk counts of
//! length `k`, `M_i - M_j = Σ_k a_k ζ^k` where `a_k = (s_i^(k) - s_j^(k)) / k!`.
//! Truncating at order `k` and dividing by the lowest power of ζ gives a
//! polynomial whose positive roots approximate crossings.

use nalgebra::DMatrix;

use crate::centrality::Measure;
use crate::error::{Error, Result};
use crate::graph::{closed_walks_of, total_walks, Graph};

/// Lowest series order with a possibly nonzero coefficient.
fn start_order(measure: Measure) -> usize {
    match measure {
        Measure::C => 2,
        Measure::R | Measure::T => 1,
    }
}

/// Walk-count differences `d_k = s_i^(k) - s_j^(k)`, `k = 0..=kmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    pub measure: Measure,
    pub diffs: Vec<f64>,
    /// First order `k` whose difference has the opposite sign of the
    /// lowest-order one (zero counts as positive).
    pub k0: Option<usize>,
}

impl SeriesCoefficients {
    pub fn start(&self) -> usize {
        start_order(self.measure)
    }

    /// `a_k = d_k / k!` for `k = start..=kmax`.
    pub fn taylor(&self, kmax: usize) -> Vec<f64> {
        let mut fact: f64 = (1..self.start()).map(|x| x as f64).product();
        (self.start()..=kmax)
            .map(|k| {
                fact *= k as f64;
                self.diffs[k] / fact
            })
            .collect()
    }
}

pub fn series_coefficients(
    g: &Graph,
    i: usize,
    j: usize,
    measure: Measure,
    kmax: usize,
) -> Result<SeriesCoefficients> {
    let n = g.n();
    for index in [i, j] {
        if index >= n {
            return Err(Error::NodeOutOfRange { index, n });
        }
    }
    if i == j {
        return Err(Error::invalid("interlacement needs two distinct nodes"));
    }
    let closed = closed_walks_of(g, &[i, j], kmax);
    let diffs: Vec<f64> = match measure {
        Measure::C => (0..=kmax).map(|k| closed[0][k] - closed[1][k]).collect(),
        Measure::R | Measure::T => {
            let total = total_walks(g, kmax);
            (0..=kmax)
                .map(|k| {
                    let d = total[k][i] - total[k][j];
                    if measure == Measure::T {
                        d - (closed[0][k] - closed[1][k])
                    } else {
                        d
                    }
                })
                .collect()
        }
    };
    let s = start_order(measure);
    let positive = |x: f64| x >= 0.0;
    let k0 = (s < diffs.len())
        .then(|| {
            let first = positive(diffs[s]);
            (s + 1..=kmax).find(|&k| positive(diffs[k]) != first)
        })
        .flatten();
    Ok(SeriesCoefficients { measure, diffs, k0 })
}

/// How node degree enters the weighted linear heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeRule {
    /// Use the walk counts themselves: `(A²)_ii = Σ_j w_ij²` for `C`,
    /// strength `(A 1)_i` for `R`.
    #[default]
    Walks,
    /// Replace `(A²)_ii` by the strength `Σ_j w_ij` in the `C` formula.
    Strength,
}

/// Linear heuristic: the root of the order-`s+1` truncation,
/// `ζ* = -(s+1) d_s / d_{s+1}` (for `C`, `3 (k_i - k_j) / (2 (t_j - t_i))`;
/// for `R`, `2 (k_i - k_j) / (w_j^(2) - w_i^(2))`). `None` unless the two
/// lowest differences are nonzero with opposite signs.
pub fn heuristic_linear(g: &Graph, i: usize, j: usize, measure: Measure) -> Result<Option<f64>> {
    heuristic_linear_with(g, i, j, measure, DegreeRule::Walks)
}

pub fn heuristic_linear_with(
    g: &Graph,
    i: usize,
    j: usize,
    measure: Measure,
    rule: DegreeRule,
) -> Result<Option<f64>> {
    let s = start_order(measure);
    let sc = series_coefficients(g, i, j, measure, s + 1)?;
    let mut low = sc.diffs[s];
    if measure == Measure::C && rule == DegreeRule::Strength {
        low = g.strength(i) - g.strength(j);
    }
    let high = sc.diffs[s + 1];
    if low == 0.0 || high == 0.0 || (low > 0.0) == (high > 0.0) {
        return Ok(None);
    }
    Ok(Some(-((s + 1) as f64) * low / high))
}

/// `ζ* = (3/2) |Δk / Δt|` from degree and triangle differences; `None`
/// unless both are nonzero with opposite signs.
pub fn linear_from_counts(delta_k: f64, delta_t: f64) -> Option<f64> {
    if delta_k == 0.0 || delta_t == 0.0 || (delta_k > 0.0) == (delta_t > 0.0) {
        return None;
    }
    Some(1.5 * (delta_k / delta_t).abs())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyRoots {
    pub k: usize,
    pub k0: usize,
    /// Ascending powers of ζ after dividing by the lowest power.
    pub coefficients: Vec<f64>,
    /// Positive real roots, ascending.
    pub roots: Vec<f64>,
    /// Sign changes in the coefficients: an upper bound on `roots.len()`
    /// with the same parity.
    pub descartes: usize,
}

/// Positive roots of the order-`k` truncation. Rejects `k < k₀`, where the
/// truncation cannot have a positive root.
pub fn heuristic_poly(g: &Graph, i: usize, j: usize, measure: Measure, k: usize) -> Result<PolyRoots> {
    const K0_SEARCH: usize = 60;
    let s = start_order(measure);
    if k <= s {
        return Err(Error::invalid(format!(
            "truncation order must exceed {s} for measure {measure}"
        )));
    }
    let sc = series_coefficients(g, i, j, measure, k.max(K0_SEARCH))?;
    let k0 = sc.k0.ok_or(Error::NoSignChange(K0_SEARCH.max(k)))?;
    if k < k0 {
        return Err(Error::TruncationBelowSignChange { k, k0 });
    }
    let coefficients = sc.taylor(k);
    Ok(PolyRoots {
        k,
        k0,
        roots: poly_real_roots(&coefficients),
        descartes: descartes_count(&coefficients),
        coefficients,
    })
}

fn descartes_count(c: &[f64]) -> usize {
    let signs: Vec<bool> = c.iter().filter(|x| **x != 0.0).map(|x| *x > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn horner(c: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &a in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

/// Positive real roots of `Σ c_m x^m` (ascending coefficients) from the
/// eigenvalues of the companion matrix, each polished by Newton steps and
/// kept only if the relative residual is at most `1e-10`.
pub fn poly_real_roots(coeffs: &[f64]) -> Vec<f64> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    while c.first() == Some(&0.0) {
        c.remove(0);
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let mut comp = DMatrix::zeros(deg, deg);
    for r in 1..deg {
        comp[(r, r - 1)] = 1.0;
    }
    for r in 0..deg {
        comp[(r, deg - 1)] = -c[r] / lead;
    }
    let eig = comp.complex_eigenvalues();
    let mut roots: Vec<f64> = Vec::new();
    for z in eig.iter() {
        if z.re <= 0.0 || z.im.abs() > 1e-6 * z.re.abs().max(1.0) {
            continue;
        }
        let mut x = z.re;
        for _ in 0..50 {
            let (p, dp) = horner(&c, x);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            x -= step;
            if step.abs() <= 1e-16 * x.abs() {
                break;
            }
        }
        let scale: f64 = c
            .iter()
            .enumerate()
            .map(|(m, a)| (a * x.powi(m as i32)).abs())
            .sum();
        let (p, _) = horner(&c, x);
        if x > 0.0 && p.abs() <= 1e-10 * scale {
            roots.push(x);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    roots
}
