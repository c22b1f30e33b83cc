use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Graph, GraphBuilder};
use crate::error::{Error, Result};

/// Reads an edge list: one `u v [w]` edge per line, separated by whitespace
/// and/or commas. Blank lines and `#` comments are skipped. The weight column
/// is only accepted when `weighted` is set and defaults to 1 when absent.
pub fn load_edge_list(path: impl AsRef<Path>, weighted: bool) -> Result<Graph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, weighted)
}

pub fn parse_edge_list(text: &str, weighted: bool) -> Result<Graph> {
    let mut raw: Vec<(usize, String, String, f64)> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line_no = k + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|f| !f.is_empty())
            .collect();
        let weight = match (fields.len(), weighted) {
            (2, _) => 1.0,
            (3, true) => fields[2].parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("weight {:?} is not a number", fields[2]),
            })?,
            (3, false) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "weight column present but the graph is loaded as unweighted".into(),
                })
            }
            (c, _) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected `u v [w]`, found {c} fields"),
                })
            }
        };
        raw.push((line_no, fields[0].to_string(), fields[1].to_string(), weight));
    }

    let mut names: Vec<String> = Vec::new();
    let mut seen: HashMap<String, ()> = HashMap::new();
    for (_, u, v, _) in &raw {
        for name in [u, v] {
            if seen.insert(name.clone(), ()).is_none() {
                names.push(name.clone());
            }
        }
    }
    // Integer ids keep their numeric order so that "0 1\n1 2" maps 0->0.
    if names.iter().all(|s| s.parse::<u64>().is_ok()) {
        names.sort_by_key(|s| s.parse::<u64>().unwrap());
    }
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();

    let mut b = GraphBuilder::with_labels(names.clone()).weighted(weighted);
    for (line, u, v, w) in &raw {
        let (iu, iv) = (index[u.as_str()], index[v.as_str()]);
        b.insert(iu, iv, *w).map_err(|e| Error::Parse {
            line: *line,
            message: e.to_string(),
        })?;
    }
    Ok(b.build())
}

/// JSON form `{n, labels, edges: [[u, v, w], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub n: usize,
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize, f64)>,
}

impl From<&Graph> for GraphDocument {
    fn from(g: &Graph) -> Self {
        GraphDocument {
            n: g.n(),
            labels: g.labels().to_vec(),
            edges: g.edges().iter().map(|e| (e.u, e.v, e.weight)).collect(),
        }
    }
}

impl TryFrom<GraphDocument> for Graph {
    type Error = Error;

    fn try_from(doc: GraphDocument) -> Result<Graph> {
        if doc.labels.len() != doc.n {
            return Err(Error::invalid("label count differs from n"));
        }
        let weighted = doc.edges.iter().any(|e| e.2 != 1.0);
        let mut b = GraphBuilder::with_labels(doc.labels).weighted(weighted);
        for (u, v, w) in doc.edges {
            b.insert(u, v, w)?;
        }
        Ok(b.build())
    }
}

impl Graph {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphDocument::from(self)).expect("graph serializes")
    }

    pub fn from_json(text: &str) -> Result<Graph> {
        let doc: GraphDocument = serde_json::from_str(text)?;
        Graph::try_from(doc)
    }
}
