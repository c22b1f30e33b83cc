use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use super::{Graph, GraphBuilder};
use crate::error::{Error, Result};

/// Company-company projection of a board-membership bipartite graph.
#[derive(Debug, Clone)]
pub struct Projection {
    /// Edge weight = number of directors two companies share.
    pub weighted: Graph,
    /// Same edges with unit weights.
    pub binary: Graph,
}

/// Projects `(company, director)` memberships onto companies. Companies keep
/// their order of first appearance; companies without shared directors stay
/// as isolated nodes. Repeated memberships count once.
pub fn project_bipartite<C, D>(memberships: &[(C, D)]) -> Result<Projection>
where
    C: AsRef<str>,
    D: AsRef<str>,
{
    if memberships.is_empty() {
        return Err(Error::invalid("membership list is empty"));
    }
    let mut companies: Vec<String> = Vec::new();
    let mut company_index: HashMap<String, usize> = HashMap::new();
    let mut boards: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for (c, d) in memberships {
        let (c, d) = (c.as_ref(), d.as_ref());
        if c.is_empty() || d.is_empty() {
            return Err(Error::invalid("empty company or director name"));
        }
        let idx = *company_index.entry(c.to_string()).or_insert_with(|| {
            companies.push(c.to_string());
            companies.len() - 1
        });
        boards.entry(d).or_default().insert(idx);
    }

    let mut shared: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    for members in boards.values() {
        let members: Vec<usize> = members.iter().copied().collect();
        for (a, &u) in members.iter().enumerate() {
            for &v in &members[a + 1..] {
                *shared.entry((u, v)).or_default() += 1;
            }
        }
    }

    let mut weighted = GraphBuilder::with_labels(companies.clone()).weighted(true);
    for (&(u, v), &count) in &shared {
        weighted.insert(u, v, count as f64)?;
    }
    let weighted = weighted.build();
    let binary = weighted.binarize();
    Ok(Projection { weighted, binary })
}

/// Two-column CSV `company,director`; a header row with exactly those names
/// is skipped.
pub fn load_memberships(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 2 {
            return Err(Error::Parse {
                line: k + 1,
                message: format!("expected 2 columns, found {}", rec.len()),
            });
        }
        if k == 0
            && rec[0].eq_ignore_ascii_case("company")
            && rec[1].eq_ignore_ascii_case("director")
        {
            continue;
        }
        out.push((rec[0].to_string(), rec[1].to_string()));
    }
    Ok(out)
}
