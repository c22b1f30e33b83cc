use std::path::Path;

use serde::{Deserialize, Serialize};

use super::returns::{ReturnsPanel, WindowSlice};
use crate::centrality::{default_grid, ranking_sweep_direct, Measure, RankingSweep};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{Graph, GraphBuilder};
use crate::spectral::ExpmEngine;
use crate::stats::{self, TTest};

/// `d = √(2(1-ρ))`, with `ρ` clamped to `[-1, 1]`.
pub fn mantegna_distance(rho: f64) -> f64 {
    (2.0 * (1.0 - rho.clamp(-1.0, 1.0))).max(0.0).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    /// Panel indices of the assets kept, in panel order.
    pub assets: Vec<usize>,
    pub rho: Vec<Vec<f64>>,
    pub distance: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

fn is_constant(values: impl Iterator<Item = f64>) -> bool {
    let mut first = None;
    for v in values {
        match first {
            None => first = Some(v),
            Some(f) if f != v => return false,
            _ => {}
        }
    }
    true
}

/// Pairwise-complete Pearson correlation over a window and the matching
/// distance matrix. Assets constant over the window are dropped.
pub fn correlation_and_distance(panel: &ReturnsPanel, window: &WindowSlice) -> Result<Correlation> {
    let mut warnings = Vec::new();
    let mut assets = Vec::new();
    let mut series = Vec::new();
    for &a in &window.assets {
        let s = panel.series(a, window.rows.clone());
        if is_constant(s.iter().flatten().copied()) {
            warnings.push(format!("{}: asset {} is constant, dropped", window.id, panel.assets()[a]));
            continue;
        }
        assets.push(a);
        series.push(s);
    }
    if assets.len() < 2 {
        return Err(Error::EmptyWindow(window.id.clone()));
    }
    let m = assets.len();
    let mut rho = vec![vec![1.0; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let (x, y): (Vec<f64>, Vec<f64>) = series[i]
                .iter()
                .zip(&series[j])
                .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
                .unzip();
            let name = |k: usize| &panel.assets()[assets[k]];
            if x.len() < 2 {
                return Err(Error::invalid(format!(
                    "{}: assets {} and {} share fewer than 2 observations",
                    window.id,
                    name(i),
                    name(j)
                )));
            }
            let r = match raw_pearson(&x, &y) {
                Some(r) if (-1.0..=1.0).contains(&r) => r,
                Some(r) => {
                    warnings.push(format!("{}: correlation {r} of {} and {} clamped", window.id, name(i), name(j)));
                    r.clamp(-1.0, 1.0)
                }
                None => {
                    warnings.push(format!(
                        "{}: {} and {} have no joint variation, correlation set to 0",
                        window.id,
                        name(i),
                        name(j)
                    ));
                    0.0
                }
            };
            rho[i][j] = r;
            rho[j][i] = r;
        }
    }
    let distance = rho
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &r)| if i == j { 0.0 } else { mantegna_distance(r) })
                .collect()
        })
        .collect();
    Ok(Correlation {
        assets,
        rho,
        distance,
        warnings,
    })
}

fn raw_pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mx, my) = (stats::mean(x), stats::mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        None
    } else {
        Some(sxy / (sxx.sqrt() * syy.sqrt()))
    }
}

struct DisjointSets(Vec<usize>);

impl DisjointSets {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Kruskal on a symmetric distance matrix. Ties go to the lexicographically
/// smaller `(i, j)`; non-finite entries count as absent edges.
pub fn mst_edges(d: &[Vec<f64>]) -> Result<Vec<(usize, usize, f64)>> {
    let n = d.len();
    if n < 2 {
        return Err(Error::invalid("spanning tree needs at least 2 nodes"));
    }
    if d.iter().any(|row| row.len() != n) {
        return Err(Error::invalid("distance matrix is not square"));
    }
    let mut cand = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (d[i][j], d[j][i]);
            if a.is_finite() != b.is_finite() || (a.is_finite() && (a - b).abs() > 1e-12 * a.abs().max(1.0)) {
                return Err(Error::invalid(format!("distance matrix not symmetric at ({i}, {j})")));
            }
            if a.is_finite() {
                if a < 0.0 {
                    return Err(Error::invalid(format!("negative distance at ({i}, {j})")));
                }
                cand.push((a, i, j));
            }
        }
    }
    cand.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut sets = DisjointSets((0..n).collect());
    let mut tree = Vec::with_capacity(n - 1);
    for (w, i, j) in cand {
        if sets.union(i, j) {
            tree.push((i, j, w));
            if tree.len() == n - 1 {
                break;
            }
        }
    }
    if tree.len() < n - 1 {
        return Err(Error::Disconnected);
    }
    Ok(tree)
}

/// How tree distances become adjacency weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// `A_ij = d_ij`.
    #[default]
    Distance,
    /// `A_ij = 1 / d_ij`.
    InverseDistance,
}

impl std::str::FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "distance" => Ok(Weighting::Distance),
            "inverse-distance" | "inverse" => Ok(Weighting::InverseDistance),
            other => Err(Error::invalid(format!("unknown weighting {other:?}"))),
        }
    }
}

/// Distances below this are raised to it before becoming edge weights, so
/// perfectly correlated pairs keep their tree edge.
pub const DISTANCE_FLOOR: f64 = 1e-12;

pub fn tree_graph(labels: &[String], edges: &[(usize, usize, f64)], weighting: Weighting) -> Result<Graph> {
    let mut b = GraphBuilder::with_labels(labels.to_vec()).weighted(true);
    for &(i, j, d) in edges {
        let d = d.max(DISTANCE_FLOOR);
        let w = match weighting {
            Weighting::Distance => d,
            Weighting::InverseDistance => 1.0 / d,
        };
        b.add_weighted_edge(i, j, w)?;
    }
    Ok(b.build())
}

/// Minimum spanning tree as a distance-weighted graph.
pub fn mst(d: &[Vec<f64>], labels: &[String]) -> Result<Graph> {
    if labels.len() != d.len() {
        return Err(Error::invalid("one label per distance-matrix row required"));
    }
    tree_graph(labels, &mst_edges(d)?, Weighting::Distance)
}

#[derive(Debug, Clone)]
pub struct MarketOptions {
    pub zeta_grid: Vec<f64>,
    pub weighting: Weighting,
    pub measure: Measure,
    pub execution: Execution,
}

impl Default for MarketOptions {
    fn default() -> Self {
        MarketOptions {
            zeta_grid: default_grid(),
            weighting: Weighting::Distance,
            measure: Measure::R,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowReport {
    pub id: String,
    pub labels: Vec<String>,
    pub distance: Vec<Vec<f64>>,
    pub tree: Vec<(usize, usize, f64)>,
    pub weighting: Weighting,
    pub sweep: RankingSweep,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct TreeEdge<'a> {
    source: &'a str,
    target: &'a str,
    distance: f64,
}

#[derive(Serialize)]
struct TreeDocument<'a> {
    id: &'a str,
    weighting: Weighting,
    assets: &'a [String],
    total_distance: f64,
    edges: Vec<TreeEdge<'a>>,
    warnings: &'a [String],
}

impl WindowReport {
    pub fn total_distance(&self) -> f64 {
        self.tree.iter().map(|e| e.2).sum()
    }

    pub fn mean_rank_std(&self) -> f64 {
        self.sweep.mean_std()
    }

    pub fn mst_json(&self) -> Result<String> {
        let doc = TreeDocument {
            id: &self.id,
            weighting: self.weighting,
            assets: &self.labels,
            total_distance: self.total_distance(),
            edges: self
                .tree
                .iter()
                .map(|&(i, j, d)| TreeEdge {
                    source: &self.labels[i],
                    target: &self.labels[j],
                    distance: d,
                })
                .collect(),
            warnings: &self.warnings,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Writes `ranks.csv`, `rankstd.csv` and `mst.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.sweep.write_csv(dir.join("ranks.csv"))?;
        self.sweep.write_std_csv(dir.join("rankstd.csv"))?;
        let path = dir.join("mst.json");
        std::fs::write(&path, self.mst_json()?).map_err(|e| Error::io(&path, e))
    }
}

/// Tree, centrality sweep and rank volatility for one distance matrix.
pub fn report_from_distance(
    id: &str,
    labels: Vec<String>,
    distance: Vec<Vec<f64>>,
    opts: &MarketOptions,
) -> Result<WindowReport> {
    let tree = mst_edges(&distance)?;
    let g = tree_graph(&labels, &tree, opts.weighting)?;
    let engine = ExpmEngine::new(&g)?;
    let sweep = ranking_sweep_direct(&engine, &opts.zeta_grid, opts.measure, opts.execution)?;
    Ok(WindowReport {
        id: id.to_string(),
        labels,
        distance,
        tree,
        weighting: opts.weighting,
        sweep,
        warnings: Vec::new(),
    })
}

pub fn window_rank_report(panel: &ReturnsPanel, window: &WindowSlice, opts: &MarketOptions) -> Result<WindowReport> {
    let corr = correlation_and_distance(panel, window)?;
    let labels = corr.assets.iter().map(|&a| panel.assets()[a].clone()).collect();
    let mut report = report_from_distance(&window.id, labels, corr.distance, opts)?;
    report.warnings = corr.warnings;
    for &a in &window.dropped {
        report
            .warnings
            .push(format!("{}: asset {} below the observation threshold, dropped", window.id, panel.assets()[a]));
    }
    Ok(report)
}

/// Paired t-test on the rank volatility of the assets present in both windows.
pub fn compare_windows(a: &WindowReport, b: &WindowReport) -> Result<TTest> {
    let mut xa = Vec::new();
    let mut xb = Vec::new();
    for (i, label) in a.labels.iter().enumerate() {
        if let Some(j) = b.labels.iter().position(|l| l == label) {
            xa.push(a.sweep.std[i]);
            xb.push(b.sweep.std[j]);
        }
    }
    stats::paired_t_test(&xa, &xb)
}

/// Runs every window and writes one report directory per window id plus
/// `windows.csv` under `out`.
pub fn market_pipeline(
    panel: &ReturnsPanel,
    windows: &[WindowSlice],
    opts: &MarketOptions,
    out: Option<&Path>,
) -> Result<Vec<WindowReport>> {
    let reports = opts
        .execution
        .try_map_range(windows.len(), |k| window_rank_report(panel, &windows[k], opts))?;
    if let Some(out) = out {
        std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        let mut summary = String::from("window,start,end,assets,dropped,total_distance,mean_rank_std\n");
        for (w, r) in windows.iter().zip(&reports) {
            r.write(out.join(&w.id))?;
            summary.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                w.id,
                w.start,
                w.end,
                r.labels.len(),
                w.dropped.len(),
                r.total_distance(),
                r.mean_rank_std()
            ));
        }
        let path = out.join("windows.csv");
        std::fs::write(&path, summary).map_err(|e| Error::io(&path, e))?;
    }
    Ok(reports)
}
