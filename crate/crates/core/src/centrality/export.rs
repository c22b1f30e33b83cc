use std::path::Path;

use super::{Measure, RankingSweep, RiskProfile};
use crate::error::{Error, Result};

fn write_matrix<T: ToString>(
    path: &Path,
    grid: &[f64],
    labels: &[String],
    rows: &[Vec<T>],
) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::invalid(format!("{other:?}")),
    })?;
    let mut header = vec!["zeta".to_string()];
    header.extend(labels.iter().cloned());
    w.write_record(&header)?;
    for (z, row) in grid.iter().zip(rows) {
        let mut rec = vec![format!("{z}")];
        rec.extend(row.iter().map(|x| x.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

impl RiskProfile {
    /// Rows = ζ, columns = node labels.
    pub fn write_csv(&self, measure: Measure, path: impl AsRef<Path>) -> Result<()> {
        write_matrix(path.as_ref(), &self.zeta_grid, &self.labels, self.rows(measure))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

impl RankingSweep {
    /// Rows = ζ, columns = node labels, entries = ranks.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        write_matrix(path.as_ref(), &self.zeta_grid, &self.labels, &self.ranks)
    }

    /// One row per node: `label,rank_std`.
    pub fn write_std_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["node", "rank_std"])?;
        for (l, s) in self.labels.iter().zip(&self.std) {
            w.write_record([l.as_str(), &s.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
