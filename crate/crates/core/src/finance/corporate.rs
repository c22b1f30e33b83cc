use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::centrality::{default_grid, ranking_sweep_direct, Measure, RankingSweep};
use crate::error::{Error, Result};
use crate::exec::{stream_rng, Execution};
use crate::graph::project_bipartite;
use crate::spectral::ExpmEngine;
use crate::stats;

/// `rank(ζ_lo) - rank(ζ_hi)`: positive when a node climbs towards rank 1 as
/// risk grows, i.e. its exposure increases.
pub fn delta_rank(sweep: &RankingSweep, zeta_hi: f64, zeta_lo: f64) -> Result<Vec<i64>> {
    let hi = sweep.ranks_at(zeta_hi)?;
    let lo = sweep.ranks_at(zeta_lo)?;
    Ok(lo.iter().zip(hi).map(|(&l, &h)| l as i64 - h as i64).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub true_positive: usize,
    pub false_positive: usize,
    pub true_negative: usize,
    pub false_negative: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.true_positive + self.false_positive + self.true_negative + self.false_negative
    }

    pub fn accuracy(&self) -> f64 {
        (self.true_positive + self.true_negative) as f64 / self.total() as f64
    }

    fn tally(truth: &[i8], predicted: &[i8]) -> Self {
        let mut c = Confusion::default();
        for (&t, &p) in truth.iter().zip(predicted) {
            match (t > 0, p > 0) {
                (true, true) => c.true_positive += 1,
                (false, true) => c.false_positive += 1,
                (false, false) => c.true_negative += 1,
                (true, false) => c.false_negative += 1,
            }
        }
        c
    }
}

/// One-predictor linear discriminant: class `+1` when
/// `intercept + slope * x > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub intercept: f64,
    pub slope: f64,
    pub mean_negative: f64,
    pub mean_positive: f64,
    /// Within-class variance with divisor `N - 2`.
    pub pooled_variance: f64,
    pub prior_positive: f64,
    pub accuracy: f64,
    pub confusion: Confusion,
}

/// Fisher discriminant with a pooled variance and empirical class priors.
/// `labels` are `+1` / `-1`.
pub fn lda_fit(x: &[f64], labels: &[i8]) -> Result<LdaModel> {
    if x.len() != labels.len() {
        return Err(Error::invalid("one label per observation required"));
    }
    if let Some(l) = labels.iter().find(|l| l.abs() != 1) {
        return Err(Error::invalid(format!("class labels must be +1 or -1, got {l}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("discriminant predictor".into()));
    }
    let pos: Vec<f64> = x.iter().zip(labels).filter(|(_, &l)| l > 0).map(|(v, _)| *v).collect();
    let neg: Vec<f64> = x.iter().zip(labels).filter(|(_, &l)| l < 0).map(|(v, _)| *v).collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::invalid("both classes need at least one observation"));
    }
    let n = x.len() as f64;
    let (mp, mn) = (stats::mean(&pos), stats::mean(&neg));
    let ss: f64 = pos.iter().map(|v| (v - mp).powi(2)).sum::<f64>() + neg.iter().map(|v| (v - mn).powi(2)).sum::<f64>();
    if x.len() < 3 || ss == 0.0 {
        return Err(Error::ZeroVariance("pooled within-class variance".into()));
    }
    let var = ss / (n - 2.0);
    let prior = pos.len() as f64 / n;
    let slope = (mp - mn) / var;
    let intercept = (prior / (1.0 - prior)).ln() - (mp * mp - mn * mn) / (2.0 * var);
    let mut model = LdaModel {
        intercept,
        slope,
        mean_negative: mn,
        mean_positive: mp,
        pooled_variance: var,
        prior_positive: prior,
        accuracy: 0.0,
        confusion: Confusion::default(),
    };
    model.confusion = Confusion::tally(labels, &lda_predict(&model, x));
    model.accuracy = model.confusion.accuracy();
    Ok(model)
}

pub fn lda_predict(model: &LdaModel, x: &[f64]) -> Vec<i8> {
    x.iter()
        .map(|v| if model.intercept + model.slope * v > 0.0 { 1 } else { -1 })
        .collect()
}

/// Pearson correlation of a company's SVC series with `1 / year`, and its
/// class: `+1` (growing SVC, negative correlation), `-1`, or `None` when
/// `|ρ| < threshold`.
pub fn svc_trend(years: &[i32], svc: &[f64], threshold: f64) -> Result<(f64, Option<i8>)> {
    if years.len() != svc.len() {
        return Err(Error::invalid("one SVC value per year required"));
    }
    if years.len() < 3 {
        return Err(Error::invalid(format!("SVC trend needs at least 3 years, got {}", years.len())));
    }
    let inv: Vec<f64> = years.iter().map(|&y| 1.0 / y as f64).collect();
    let rho = stats::pearson(&inv, svc).ok_or_else(|| Error::ZeroVariance("SVC series is constant".into()))?;
    let label = if rho.abs() < threshold {
        None
    } else if rho < 0.0 {
        Some(1)
    } else {
        Some(-1)
    };
    Ok((rho, label))
}

/// `company,year,value` rows grouped by company and sorted by year. A header
/// row is detected by a non-numeric year.
pub fn load_svc(path: impl AsRef<Path>) -> Result<BTreeMap<String, Vec<(i32, f64)>>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_svc(&text)
}

pub fn parse_svc(text: &str) -> Result<BTreeMap<String, Vec<(i32, f64)>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out: BTreeMap<String, Vec<(i32, f64)>> = BTreeMap::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |message: String| Error::Parse { line: k + 1, message };
        if rec.len() != 3 {
            return Err(bad(format!("expected 3 columns, found {}", rec.len())));
        }
        let Ok(year) = rec[1].parse::<i32>() else {
            if k == 0 {
                continue;
            }
            return Err(bad(format!("bad year {:?}", &rec[1])));
        };
        let value: f64 = rec[2].parse().map_err(|_| bad(format!("bad SVC value {:?}", &rec[2])))?;
        if !value.is_finite() {
            return Err(bad("non-finite SVC value".into()));
        }
        let series = out.entry(rec[0].to_string()).or_default();
        if series.iter().any(|&(y, _)| y == year) {
            return Err(bad(format!("duplicate year {year} for {}", &rec[0])));
        }
        series.push((year, value));
    }
    for series in out.values_mut() {
        series.sort_by_key(|&(y, _)| y);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct CorporateOptions {
    pub zeta_grid: Vec<f64>,
    pub zeta_hi: f64,
    pub zeta_lo: f64,
    /// Use the unit-weight projection instead of shared-director counts.
    pub binary: bool,
    pub threshold: f64,
    pub execution: Execution,
}

impl Default for CorporateOptions {
    fn default() -> Self {
        CorporateOptions {
            zeta_grid: default_grid(),
            zeta_hi: 1.0,
            zeta_lo: 0.01,
            binary: false,
            threshold: 0.05,
            execution: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanyRow {
    pub company: String,
    pub delta_rank: i64,
    pub svc_rho: Option<f64>,
    pub class: Option<i8>,
    pub predicted: Option<i8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorporateReport {
    pub binary: bool,
    pub zeta_hi: f64,
    pub zeta_lo: f64,
    pub threshold: f64,
    /// Companies entering the discriminant.
    pub sample: usize,
    pub model: LdaModel,
    pub companies: Vec<CompanyRow>,
    pub warnings: Vec<String>,
}

impl CorporateReport {
    /// Writes `lda.json` and `companies.csv` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("lda.json");
        std::fs::write(&path, serde_json::to_string_pretty(self)?).map_err(|e| Error::io(&path, e))?;
        let path = dir.join("companies.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| Error::invalid(e.to_string()))?;
        w.write_record(["company", "delta_rank", "svc_rho", "class", "predicted"])?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for r in &self.companies {
            w.write_record([
                r.company.clone(),
                r.delta_rank.to_string(),
                opt(r.svc_rho.map(|v| v.to_string())),
                opt(r.class.map(|v| v.to_string())),
                opt(r.predicted.map(|v| v.to_string())),
            ])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))
    }
}

/// Board projection → `ΔRank(R)` → SVC trend classes → discriminant.
pub fn corporate_pipeline(
    memberships: &[(String, String)],
    svc: &BTreeMap<String, Vec<(i32, f64)>>,
    opts: &CorporateOptions,
) -> Result<CorporateReport> {
    let proj = project_bipartite(memberships)?;
    let g = if opts.binary { proj.binary } else { proj.weighted };
    let engine = ExpmEngine::new(&g)?;
    let sweep = ranking_sweep_direct(&engine, &opts.zeta_grid, Measure::R, opts.execution)?;
    let dr = delta_rank(&sweep, opts.zeta_hi, opts.zeta_lo)?;

    let mut warnings = Vec::new();
    let mut rows = Vec::with_capacity(g.n());
    for (i, company) in g.labels().iter().enumerate() {
        let (rho, class) = match svc.get(company) {
            None => {
                warnings.push(format!("{company}: no SVC data"));
                (None, None)
            }
            Some(series) => {
                let years: Vec<i32> = series.iter().map(|s| s.0).collect();
                let values: Vec<f64> = series.iter().map(|s| s.1).collect();
                match svc_trend(&years, &values, opts.threshold) {
                    Ok((rho, class)) => (Some(rho), class),
                    Err(e) => {
                        warnings.push(format!("{company}: {e}"));
                        (None, None)
                    }
                }
            }
        };
        rows.push(CompanyRow {
            company: company.clone(),
            delta_rank: dr[i],
            svc_rho: rho,
            class,
            predicted: None,
        });
    }
    let (x, y): (Vec<f64>, Vec<i8>) = rows
        .iter()
        .filter_map(|r| Some((r.delta_rank as f64, r.class?)))
        .unzip();
    let model = lda_fit(&x, &y)?;
    for r in &mut rows {
        if r.class.is_some() {
            r.predicted = Some(lda_predict(&model, &[r.delta_rank as f64])[0]);
        }
    }
    Ok(CorporateReport {
        binary: opts.binary,
        zeta_hi: opts.zeta_hi,
        zeta_lo: opts.zeta_lo,
        threshold: opts.threshold,
        sample: x.len(),
        model,
        companies: rows,
        warnings,
    })
}

/// Random board memberships and five years (1999 to 2003) of SVC values for
/// `companies` firms. Used for demonstrations and end-to-end tests.
pub fn synthetic_corporate(
    seed: u64,
    companies: usize,
    directors: usize,
) -> (Vec<(String, String)>, BTreeMap<String, Vec<(i32, f64)>>) {
    let mut rng = stream_rng(seed, 0);
    let name = |c: usize| format!("C{c:03}");
    let mut memberships = Vec::new();
    for c in 0..companies {
        memberships.push((name(c), format!("D{:03}", c % directors.max(1))));
    }
    for d in 0..directors {
        let seats = rng.random_range(1..=3);
        for _ in 0..seats {
            memberships.push((name(rng.random_range(0..companies)), format!("D{d:03}")));
        }
    }
    let mut svc = BTreeMap::new();
    for c in 0..companies {
        let base: f64 = rng.random_range(50.0..150.0);
        let slope: f64 = rng.random_range(-10.0..10.0);
        let series = (1999..=2003)
            .map(|y| (y, base + slope * (y - 1999) as f64 + rng.random_range(-3.0..3.0)))
            .collect();
        svc.insert(name(c), series);
    }
    (memberships, svc)
}
