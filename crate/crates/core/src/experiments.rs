//! Monte Carlo studies on Erdős–Rényi graphs.
//!
//! Replication `r` at density index `d` draws its graph from
//! [`stream_rng`]`(seed, (d << 32) | r)`, so results are identical for any
//! execution strategy or thread count.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::exec::{stream_rng, Execution};
use crate::graph::{generate_er_with, ErOptions, Graph};
use crate::spectral::{decompose, SpectralDecomposition};
use crate::stats;

pub use crate::stats::{paired_t_test, TTest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub densities: Vec<f64>,
    pub zetas: Vec<f64>,
    pub replications: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub const KEYS: [&'static str; 5] = ["n", "densities", "zetas", "replications", "seed"];

    /// The layout of the published Spearman table.
    pub fn table1() -> Self {
        ExperimentConfig {
            n: 100,
            densities: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            zetas: vec![0.1, 0.5, 1.0],
            replications: 1000,
            seed: 20,
        }
    }

    pub fn from_config(cfg: &Config) -> Result<Self> {
        let d = Self::table1();
        let out = ExperimentConfig {
            n: cfg.get_or("n", d.n)?,
            densities: cfg.get_list("densities")?.unwrap_or(d.densities),
            zetas: cfg.get_list("zetas")?.unwrap_or(d.zetas),
            replications: cfg.get_or("replications", d.replications)?,
            seed: cfg.get_or("seed", d.seed)?,
        };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid(format!("n must be at least 2, got {}", self.n)));
        }
        if self.replications == 0 {
            return Err(Error::invalid("replications must be at least 1"));
        }
        if self.densities.is_empty() || self.zetas.is_empty() {
            return Err(Error::invalid("densities and zetas must be nonempty"));
        }
        if let Some(p) = self.densities.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(Error::invalid(format!("density {p} outside (0, 1)")));
        }
        if let Some(z) = self.zetas.iter().find(|z| !(z.is_finite() && **z >= 0.0)) {
            return Err(Error::invalid(format!("zeta {z} must be finite and nonnegative")));
        }
        Ok(())
    }

    /// Graph of replication `rep` at density index `d`.
    pub fn graph(&self, d: usize, rep: usize) -> Result<Graph> {
        let mut rng = stream_rng(self.seed, ((d as u64) << 32) | rep as u64);
        generate_er_with(&mut rng, self.n, self.densities[d], ErOptions::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    #[serde(skip)]
    pub samples: Vec<f64>,
    pub count: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    /// Quantiles at [`DistributionSummary::LEVELS`].
    pub quantiles: [f64; 5],
}

impl DistributionSummary {
    pub const LEVELS: [f64; 5] = [0.01, 0.25, 0.5, 0.75, 0.99];

    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("no samples to summarise"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("distribution sample".into()));
        }
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let quantiles = Self::LEVELS.map(|q| stats::quantile_sorted(&sorted, q));
        Ok(DistributionSummary {
            count: samples.len(),
            mean: stats::mean(&samples),
            std: stats::std_population(&samples),
            quantiles,
            samples,
        })
    }
}

/// Per-node ratios studied in the ER experiments. `E[·]` is the node mean
/// within one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ratio {
    RelativeR,
    RelativeC,
    RelativeT,
    CoverR,
}

impl Ratio {
    pub const ALL: [Ratio; 4] = [Ratio::RelativeR, Ratio::RelativeC, Ratio::RelativeT, Ratio::CoverR];
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ratio::RelativeR => "R/E[R]",
            Ratio::RelativeC => "C/E[C]",
            Ratio::RelativeT => "T/E[T]",
            Ratio::CoverR => "C/R",
        })
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "R/E[R]" | "R" => Ok(Ratio::RelativeR),
            "C/E[C]" | "C" => Ok(Ratio::RelativeC),
            "T/E[T]" | "T" => Ok(Ratio::RelativeT),
            "C/R" | "CR" => Ok(Ratio::CoverR),
            other => Err(Error::invalid(format!("unknown ratio {other:?}"))),
        }
    }
}

/// `(R, C)` scaled by `e^{-ζλ₁}`; the scale cancels in every ratio and
/// rank statistic.
fn scaled_measures(dec: &SpectralDecomposition, zeta: f64) -> (Vec<f64>, Vec<f64>) {
    let l1 = dec.lambda_max();
    let f = |l: f64| (zeta * (l - l1)).exp();
    let ones = vec![1.0; dec.n()];
    (dec.apply(f, &ones), dec.diagonal(f))
}

fn ratio_values(dec: &SpectralDecomposition, zeta: f64, ratio: Ratio) -> Vec<f64> {
    let (r, c) = scaled_measures(dec, zeta);
    let relative = |v: Vec<f64>| {
        let m = stats::mean(&v);
        v.into_iter().map(|x| x / m).collect()
    };
    match ratio {
        Ratio::RelativeR => relative(r),
        Ratio::RelativeC => relative(c),
        Ratio::RelativeT => relative(r.iter().zip(&c).map(|(a, b)| a - b).collect()),
        Ratio::CoverR => c.iter().zip(&r).map(|(a, b)| a / b).collect(),
    }
}

/// Per-node `ratio` of one graph at `zeta`.
pub fn graph_ratios(g: &Graph, zeta: f64, ratio: Ratio) -> Result<Vec<f64>> {
    Ok(ratio_values(&decompose(g)?, zeta, ratio))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioCell {
    pub density: f64,
    pub zeta: f64,
    pub summary: DistributionSummary,
}

/// Node-level ratio samples pooled over replications, one summary per
/// `(density, ζ)` in density-major order.
pub fn ratio_study(config: &ExperimentConfig, ratio: Ratio, exec: Execution) -> Result<Vec<RatioCell>> {
    config.validate()?;
    let mut cells = Vec::with_capacity(config.densities.len() * config.zetas.len());
    for (d, &density) in config.densities.iter().enumerate() {
        let per_rep = exec.try_map_range(config.replications, |rep| {
            let dec = decompose(&config.graph(d, rep)?)?;
            Ok::<_, Error>(
                config
                    .zetas
                    .iter()
                    .map(|&z| ratio_values(&dec, z, ratio))
                    .collect::<Vec<_>>(),
            )
        })?;
        for (k, &zeta) in config.zetas.iter().enumerate() {
            let pooled: Vec<f64> = per_rep.iter().flat_map(|rows| rows[k].iter().copied()).collect();
            cells.push(RatioCell {
                density,
                zeta,
                summary: DistributionSummary::from_samples(pooled)?,
            });
        }
    }
    Ok(cells)
}

pub fn write_ratio_csv(cells: &[RatioCell], ratio: Ratio, path: impl AsRef<Path>) -> Result<()> {
    let mut text = String::from("ratio,density,zeta,count,mean,std,q01,q25,q50,q75,q99\n");
    for c in cells {
        let s = &c.summary;
        text.push_str(&format!(
            "{ratio},{},{},{},{},{},{},{},{},{},{}\n",
            c.density, c.zeta, s.count, s.mean, s.std, s.quantiles[0], s.quantiles[1], s.quantiles[2], s.quantiles[3],
            s.quantiles[4]
        ));
    }
    write_text(path.as_ref(), &text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpearmanTable {
    pub densities: Vec<f64>,
    pub zetas: Vec<f64>,
    /// `mean[k][d]`: mean Spearman(C, R) at `zetas[k]`, `densities[d]`.
    pub mean: Vec<Vec<f64>>,
    /// Smallest Spearman(R, T) seen in any replication and cell.
    pub min_r_t: f64,
    pub replications: usize,
}

impl SpearmanTable {
    pub fn get(&self, density: f64, zeta: f64) -> Option<f64> {
        let d = self.densities.iter().position(|&x| (x - density).abs() < 1e-12)?;
        let k = self.zetas.iter().position(|&x| (x - zeta).abs() < 1e-12)?;
        Some(self.mean[k][d])
    }

    /// Rows ζ, columns density.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = String::from("zeta");
        for d in &self.densities {
            text.push_str(&format!(",{d}"));
        }
        text.push('\n');
        for (z, row) in self.zetas.iter().zip(&self.mean) {
            text.push_str(&z.to_string());
            for v in row {
                text.push_str(&format!(",{v:.6}"));
            }
            text.push('\n');
        }
        write_text(path.as_ref(), &text)
    }
}

pub fn spearman_table(config: &ExperimentConfig, exec: Execution) -> Result<SpearmanTable> {
    config.validate()?;
    let nz = config.zetas.len();
    let mut mean = vec![vec![0.0; config.densities.len()]; nz];
    let mut min_r_t = f64::INFINITY;
    for d in 0..config.densities.len() {
        let per_rep = exec.try_map_range(config.replications, |rep| {
            let dec = decompose(&config.graph(d, rep)?)?;
            let mut out = Vec::with_capacity(nz);
            for &z in &config.zetas {
                let (r, c) = scaled_measures(&dec, z);
                let t: Vec<f64> = r.iter().zip(&c).map(|(a, b)| a - b).collect();
                let cr = stats::spearman(&c, &r).ok_or_else(|| Error::ZeroVariance("circulability".into()))?;
                let rt = stats::spearman(&r, &t).ok_or_else(|| Error::ZeroVariance("risk centrality".into()))?;
                out.push((cr, rt));
            }
            Ok::<_, Error>(out)
        })?;
        for k in 0..nz {
            let cr: Vec<f64> = per_rep.iter().map(|row| row[k].0).collect();
            mean[k][d] = stats::mean(&cr);
            for row in &per_rep {
                min_r_t = min_r_t.min(row[k].1);
            }
        }
    }
    Ok(SpearmanTable {
        densities: config.densities.clone(),
        zetas: config.zetas.clone(),
        mean,
        min_r_t,
        replications: config.replications,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitTrend {
    pub ns: Vec<usize>,
    pub p: f64,
    pub zetas: Vec<f64>,
    /// `deviation[k][m]`: mean over nodes and replications of
    /// `|n C_i / R_i - 1|` at `zetas[k]`, `ns[m]`.
    pub deviation: Vec<Vec<f64>>,
    /// Standard error of each entry of `deviation` across replications.
    pub std_error: Vec<Vec<f64>>,
}

impl LimitTrend {
    /// Per ζ: whether the deviation strictly decreases along `ns`.
    pub fn decreasing(&self) -> Vec<bool> {
        self.deviation
            .iter()
            .map(|row| row.windows(2).all(|w| w[1] < w[0]))
            .collect()
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = String::from("zeta,n,deviation,std_error\n");
        for (k, z) in self.zetas.iter().enumerate() {
            for (m, n) in self.ns.iter().enumerate() {
                text.push_str(&format!("{z},{n},{},{}\n", self.deviation[k][m], self.std_error[k][m]));
            }
        }
        write_text(path.as_ref(), &text)
    }
}

/// Monte Carlo check that `n C_i / R_i → 1` as `n` grows at fixed `p`.
pub fn er_ratio_limit_check(
    ns: &[usize],
    p: f64,
    zetas: &[f64],
    replications: usize,
    seed: u64,
    exec: Execution,
) -> Result<LimitTrend> {
    if ns.is_empty() || zetas.is_empty() {
        return Err(Error::invalid("need at least one n and one zeta"));
    }
    let mut deviation = vec![vec![0.0; ns.len()]; zetas.len()];
    let mut std_error = deviation.clone();
    for (m, &n) in ns.iter().enumerate() {
        let cfg = ExperimentConfig {
            n,
            densities: vec![p],
            zetas: zetas.to_vec(),
            replications,
            seed: seed.wrapping_add(m as u64),
        };
        cfg.validate()?;
        let per_rep = exec.try_map_range(replications, |rep| {
            let dec = decompose(&cfg.graph(0, rep)?)?;
            Ok::<_, Error>(
                zetas
                    .iter()
                    .map(|&z| {
                        let cr = ratio_values(&dec, z, Ratio::CoverR);
                        stats::mean(&cr.iter().map(|x| (n as f64 * x - 1.0).abs()).collect::<Vec<_>>())
                    })
                    .collect::<Vec<f64>>(),
            )
        })?;
        for k in 0..zetas.len() {
            let xs: Vec<f64> = per_rep.iter().map(|row| row[k]).collect();
            deviation[k][m] = stats::mean(&xs);
            std_error[k][m] = if xs.len() > 1 {
                stats::std_sample(&xs) / (xs.len() as f64).sqrt()
            } else {
                0.0
            };
        }
    }
    Ok(LimitTrend {
        ns: ns.to_vec(),
        p,
        zetas: zetas.to_vec(),
        deviation,
        std_error,
    })
}

/// Derivative of the second-order approximation
/// `(1 + k̄ζ²/2) / (1 + k̄ζ + k̄²ζ²/2)` of the mean `C/R` ratio.
pub fn ratio_derivative(kbar: f64, zeta: f64) -> f64 {
    let num = 2.0 * kbar * kbar * zeta * zeta - (4.0 * kbar * (kbar - 1.0) * zeta + 4.0 * kbar);
    let den = 2.0 + 2.0 * kbar * zeta + kbar * kbar * zeta * zeta;
    num / (den * den)
}

pub fn ratio_derivative_curve(kbar: f64, zeta_grid: &[f64]) -> Result<Vec<f64>> {
    if !(kbar >= 1.0 && kbar.is_finite()) {
        return Err(Error::invalid(format!("mean degree must be at least 1, got {kbar}")));
    }
    Ok(zeta_grid.iter().map(|&z| ratio_derivative(kbar, z)).collect())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
