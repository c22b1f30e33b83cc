use std::ops::Range;
use std::path::Path;

use chrono::{Datelike, Months, NaiveDate};

use crate::error::{Error, Result};

/// Daily returns, one row per date, one column per asset. `None` marks a
/// missing observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsPanel {
    dates: Vec<NaiveDate>,
    assets: Vec<String>,
    returns: Vec<Vec<Option<f64>>>,
}

const MISSING: [&str; 4] = ["", "NA", "NaN", "nan"];

impl ReturnsPanel {
    /// Rows are sorted by date; a repeated date is an error.
    pub fn new(dates: Vec<NaiveDate>, assets: Vec<String>, returns: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if assets.len() < 2 {
            return Err(Error::invalid(format!("returns panel needs at least 2 assets, got {}", assets.len())));
        }
        if dates.len() != returns.len() {
            return Err(Error::invalid("one row of returns per date required"));
        }
        if let Some(k) = returns.iter().position(|r| r.len() != assets.len()) {
            return Err(Error::invalid(format!("row {k} has {} cells, expected {}", returns[k].len(), assets.len())));
        }
        if returns.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("return".into()));
        }
        let mut order: Vec<usize> = (0..dates.len()).collect();
        order.sort_by_key(|&k| dates[k]);
        if let Some(w) = order.windows(2).find(|w| dates[w[0]] == dates[w[1]]) {
            return Err(Error::invalid(format!("duplicate date {}", dates[w[0]])));
        }
        Ok(ReturnsPanel {
            dates: order.iter().map(|&k| dates[k]).collect(),
            returns: order.iter().map(|&k| returns[k].clone()).collect(),
            assets,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Header row `date,<asset>,...`; ISO dates in the first column.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let assets: Vec<String> = rdr.headers()?.iter().skip(1).map(|s| s.trim().to_string()).collect();
        let mut dates = Vec::new();
        let mut returns = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            let date = NaiveDate::parse_from_str(rec.get(0).unwrap_or("").trim(), "%Y-%m-%d").map_err(|e| {
                Error::Parse {
                    line,
                    message: format!("bad date {:?}: {e}", rec.get(0).unwrap_or("")),
                }
            })?;
            let row = rec
                .iter()
                .skip(1)
                .map(|cell| {
                    let cell = cell.trim();
                    if MISSING.contains(&cell) {
                        return Ok(None);
                    }
                    cell.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                        line,
                        message: format!("unparseable return {cell:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            dates.push(date);
            returns.push(row);
        }
        Self::new(dates, assets, returns)
    }

    pub fn to_csv_string(&self) -> String {
        let mut text = String::from("date");
        for a in &self.assets {
            text.push(',');
            text.push_str(a);
        }
        text.push('\n');
        for (d, row) in self.dates.iter().zip(&self.returns) {
            text.push_str(&d.format("%Y-%m-%d").to_string());
            for v in row {
                text.push(',');
                if let Some(v) = v {
                    text.push_str(&v.to_string());
                }
            }
            text.push('\n');
        }
        text
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv_string()).map_err(|e| Error::io(path, e))
    }

    /// `(dates, assets)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.dates.len(), self.assets.len())
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn assets(&self) -> &[String] {
        &self.assets
    }

    pub fn get(&self, row: usize, asset: usize) -> Option<f64> {
        self.returns[row][asset]
    }

    pub fn missing_count(&self) -> usize {
        self.returns.iter().flatten().filter(|v| v.is_none()).count()
    }

    /// Observations of `asset` over `rows`, `None` where missing.
    pub fn series(&self, asset: usize, rows: Range<usize>) -> Vec<Option<f64>> {
        self.returns[rows].iter().map(|r| r[asset]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub width_months: u32,
    pub step_months: u32,
    /// Minimum fraction of the window's dates an asset must cover.
    pub min_obs: f64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            width_months: 6,
            step_months: 1,
            min_obs: 0.9,
        }
    }
}

/// Calendar window `[start, end)` of a panel with the assets it retains.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSlice {
    /// Start month as `"M-YYYY"`.
    pub id: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub rows: Range<usize>,
    pub assets: Vec<usize>,
    pub dropped: Vec<usize>,
}

fn month_start(d: NaiveDate) -> NaiveDate {
    NaiveDate::from_ymd_opt(d.year(), d.month(), 1).expect("first of month")
}

/// Windows of `width_months` whole calendar months, starting at the first
/// month of the panel and advancing by `step_months` while the window still
/// ends within the panel's last month.
pub fn rolling_windows(panel: &ReturnsPanel, spec: WindowSpec) -> Result<Vec<WindowSlice>> {
    if spec.width_months == 0 || spec.step_months == 0 {
        return Err(Error::invalid("window width and step must be positive"));
    }
    if !(spec.min_obs > 0.0 && spec.min_obs <= 1.0) {
        return Err(Error::invalid(format!("min_obs must lie in (0, 1], got {}", spec.min_obs)));
    }
    let (Some(&first), Some(&last)) = (panel.dates.first(), panel.dates.last()) else {
        return Err(Error::invalid("returns panel has no dates"));
    };
    let horizon = month_start(last) + Months::new(1);
    let mut start = month_start(first);
    if start + Months::new(spec.width_months) > horizon {
        return Err(Error::invalid(format!(
            "panel spans less than {} months",
            spec.width_months
        )));
    }
    let mut out = Vec::new();
    while start + Months::new(spec.width_months) <= horizon {
        let end = start + Months::new(spec.width_months);
        let lo = panel.dates.partition_point(|d| *d < start);
        let hi = panel.dates.partition_point(|d| *d < end);
        let id = format!("{}-{}", start.month(), start.year());
        let len = hi - lo;
        if len == 0 {
            return Err(Error::EmptyWindow(id));
        }
        let need = spec.min_obs * len as f64;
        let (assets, dropped): (Vec<usize>, Vec<usize>) = (0..panel.assets.len()).partition(|&a| {
            let have = panel.returns[lo..hi].iter().filter(|r| r[a].is_some()).count();
            have as f64 >= need - 1e-9
        });
        if assets.len() < 2 {
            return Err(Error::EmptyWindow(id));
        }
        out.push(WindowSlice {
            id,
            start,
            end,
            rows: lo..hi,
            assets,
            dropped,
        });
        start = start + Months::new(spec.step_months);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "date,A,B,C\n2001-01-02,0.01,-0.02,0.003\n2001-01-03,0.0,0.01,\n\
                       2001-01-04,-0.01,0.02,0.001\n2001-01-05,0.02,0.0,0.002\n2001-01-08,0.005,-0.01,-0.004\n";

    #[test]
    fn loads_toy_panel() {
        let p = ReturnsPanel::parse(TOY).unwrap();
        assert_eq!(p.dims(), (5, 3));
        assert_eq!(p.missing_count(), 1);
        assert_eq!(p.get(1, 2), None);
        assert_eq!(p.get(0, 1), Some(-0.02));
    }

    #[test]
    fn round_trip() {
        let p = ReturnsPanel::parse(TOY).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        p.write_csv(&path).unwrap();
        assert_eq!(ReturnsPanel::load(&path).unwrap(), p);
        let odd = ReturnsPanel::parse("date,A,B\n2001-01-02,0.1234567890123456789,1e-300\n").unwrap();
        assert_eq!(ReturnsPanel::parse(&odd.to_csv_string()).unwrap(), odd);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            ReturnsPanel::parse("date,A,B\n2001-01-02,0.1,x\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(ReturnsPanel::parse("date,A,B\n2001-01-02,0.1,0.2\n2001-01-02,0.1,0.2\n").is_err());
        assert!(ReturnsPanel::parse("date,A\n2001-01-02,0.1\n").is_err());
        assert!(ReturnsPanel::parse("date,A,B\n01/02/2001,0.1,0.2\n").is_err());
    }

    fn business_days(from: NaiveDate, to: NaiveDate) -> Vec<NaiveDate> {
        from.iter_days()
            .take_while(|d| *d <= to)
            .filter(|d| d.weekday().number_from_monday() <= 5)
            .collect()
    }

    fn synthetic(from: NaiveDate, to: NaiveDate, assets: usize) -> ReturnsPanel {
        let dates = business_days(from, to);
        let returns = (0..dates.len())
            .map(|k| (0..assets).map(|a| Some(((k * 7 + a * 13) % 11) as f64 / 100.0 - 0.05)).collect())
            .collect();
        ReturnsPanel::new(dates, (0..assets).map(|a| format!("S{a}")).collect(), returns).unwrap()
    }

    #[test]
    fn one_year_gives_seven_windows() {
        let p = synthetic(
            NaiveDate::from_ymd_opt(2001, 1, 1).unwrap(),
            NaiveDate::from_ymd_opt(2001, 12, 31).unwrap(),
            3,
        );
        let w = rolling_windows(&p, WindowSpec::default()).unwrap();
        assert_eq!(w.len(), 7);
        assert_eq!(w[0].id, "1-2001");
        assert_eq!(w[6].id, "7-2001");
        assert_eq!(w[0].end, NaiveDate::from_ymd_opt(2001, 7, 1).unwrap());
        assert!(w.iter().all(|s| s.assets.len() == 3));
    }

    #[test]
    fn seventeen_years_give_199_windows() {
        let p = synthetic(
            NaiveDate::from_ymd_opt(2001, 1, 1).unwrap(),
            NaiveDate::from_ymd_opt(2017, 12, 31).unwrap(),
            2,
        );
        let w = rolling_windows(&p, WindowSpec::default()).unwrap();
        assert_eq!(w.len(), 199);
        assert_eq!(w.last().unwrap().id, "7-2017");
    }

    #[test]
    fn sparse_asset_is_dropped() {
        let mut p = synthetic(
            NaiveDate::from_ymd_opt(2001, 1, 1).unwrap(),
            NaiveDate::from_ymd_opt(2001, 6, 30).unwrap(),
            3,
        );
        let half = p.dates.len() / 2;
        for row in &mut p.returns[..half] {
            row[1] = None;
        }
        let w = rolling_windows(&p, WindowSpec::default()).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].assets, vec![0, 2]);
        assert_eq!(w[0].dropped, vec![1]);
    }

    #[test]
    fn too_short_panel() {
        let p = synthetic(
            NaiveDate::from_ymd_opt(2001, 1, 1).unwrap(),
            NaiveDate::from_ymd_opt(2001, 3, 31).unwrap(),
            3,
        );
        assert!(rolling_windows(&p, WindowSpec::default()).is_err());
    }
}
