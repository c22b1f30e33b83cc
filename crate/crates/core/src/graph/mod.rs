//! Undirected simple graphs with optional positive edge weights.
//!
//! Nodes are dense indices `0..n`; external names live in a label table and
//! only surface in reports.

mod bipartite;
mod generate;
mod io;
mod walks;

pub use bipartite::{load_memberships, project_bipartite, Projection};
pub use generate::{generate_complete, generate_er, generate_er_with, generate_star, ErOptions};
pub use io::{load_edge_list, parse_edge_list, GraphDocument};
pub use walks::{closed_walks_of, total_walks, walk_counts, CountVector, WalkCounts, WalkSeries};

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<String>,
    /// Sorted neighbour lists; symmetric by construction.
    adj: Vec<Vec<(usize, f64)>>,
    /// Each undirected edge once, `u < v`, sorted.
    edges: Vec<Edge>,
    weighted: bool,
}

/// Validating constructor for [`Graph`].
#[derive(Debug, Clone)]
pub struct GraphBuilder {
    labels: Vec<String>,
    adj: Vec<Vec<(usize, f64)>>,
    weighted: bool,
}

impl GraphBuilder {
    /// `n` nodes labelled `"0"`..`"n-1"`.
    pub fn new(n: usize) -> Self {
        Self::with_labels((0..n).map(|i| i.to_string()).collect())
    }

    pub fn with_labels(labels: Vec<String>) -> Self {
        let n = labels.len();
        GraphBuilder {
            labels,
            adj: vec![Vec::new(); n],
            weighted: false,
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Marks the graph as weighted even if every weight happens to be 1.
    pub fn weighted(mut self, weighted: bool) -> Self {
        self.weighted = weighted;
        self
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.insert(u, v, 1.0)
    }

    pub fn add_weighted_edge(&mut self, u: usize, v: usize, weight: f64) -> Result<()> {
        if weight != 1.0 {
            self.weighted = true;
        }
        self.insert(u, v, weight)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].iter().any(|&(w, _)| w == v)
    }

    fn insert(&mut self, u: usize, v: usize, weight: f64) -> Result<()> {
        let n = self.n();
        for index in [u, v] {
            if index >= n {
                return Err(Error::NodeOutOfRange { index, n });
            }
        }
        if u == v {
            return Err(Error::SelfLoop(self.labels[u].clone()));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::BadWeight(
                self.labels[u].clone(),
                self.labels[v].clone(),
                weight,
            ));
        }
        if self.has_edge(u, v) {
            return Err(Error::DuplicateEdge(
                self.labels[u].clone(),
                self.labels[v].clone(),
            ));
        }
        self.adj[u].push((v, weight));
        self.adj[v].push((u, weight));
        Ok(())
    }

    pub fn build(mut self) -> Graph {
        let mut edges = Vec::new();
        for (u, row) in self.adj.iter_mut().enumerate() {
            row.sort_by_key(|&(v, _)| v);
            edges.extend(
                row.iter()
                    .filter(|&&(v, _)| u < v)
                    .map(|&(v, weight)| Edge { u, v, weight }),
            );
        }
        Graph {
            labels: self.labels,
            adj: self.adj,
            edges,
            weighted: self.weighted,
        }
    }
}

impl Graph {
    /// Unweighted graph on `n` nodes from an edge list.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut b = GraphBuilder::new(n);
        for &(u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    pub fn from_weighted_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut b = GraphBuilder::new(n).weighted(true);
        for &(u, v, w) in edges {
            b.add_weighted_edge(u, v, w)?;
        }
        Ok(b.build())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adj[i]
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.adj[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|k| self.adj[u][k].1)
            .unwrap_or(0.0)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|i| self.degree(i)).collect()
    }

    /// Weighted degree; equals the degree on unweighted graphs.
    pub fn strength(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|&(_, w)| w).sum()
    }

    pub fn strengths(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.strength(i)).collect()
    }

    /// Weighted triangle count at `i`: sum over triangles through `i` of the
    /// product of the three edge weights. Half of `(A^3)_ii`.
    pub fn triangle_weight(&self, i: usize) -> f64 {
        let nb = &self.adj[i];
        let mut total = 0.0;
        for (a, &(u, wu)) in nb.iter().enumerate() {
            for &(v, wv) in &nb[a + 1..] {
                let w = self.weight(u, v);
                if w > 0.0 {
                    total += wu * wv * w;
                }
            }
        }
        total
    }

    /// `out = A x`.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.adj) {
            *o = row.iter().map(|&(j, w)| w * x[j]).sum();
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        self.matvec_into(x, &mut out);
        out
    }

    pub fn dense_adjacency(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut a = DMatrix::zeros(n, n);
        for e in &self.edges {
            a[(e.u, e.v)] = e.weight;
            a[(e.v, e.u)] = e.weight;
        }
        a
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &self.adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.components().len() == 1
    }

    /// Subgraph induced by `nodes` (in the given order), labels carried over.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut position = vec![usize::MAX; self.n()];
        for (k, &u) in nodes.iter().enumerate() {
            position[u] = k;
        }
        let labels = nodes.iter().map(|&u| self.labels[u].clone()).collect();
        let mut b = GraphBuilder::with_labels(labels).weighted(self.weighted);
        for e in &self.edges {
            let (pu, pv) = (position[e.u], position[e.v]);
            if pu != usize::MAX && pv != usize::MAX {
                b.insert(pu, pv, e.weight).expect("subgraph of a valid graph");
            }
        }
        b.build()
    }

    /// Largest connected component; ties go to the component with the
    /// smallest node index.
    pub fn largest_component(&self) -> Graph {
        let comps = self.components();
        let best = comps
            .iter()
            .enumerate()
            .max_by_key(|(k, c)| (c.len(), std::cmp::Reverse(*k)))
            .map(|(_, c)| c.clone())
            .unwrap_or_default();
        self.induced_subgraph(&best)
    }

    /// Same edge set with every weight set to 1.
    pub fn binarize(&self) -> Graph {
        let mut b = GraphBuilder::with_labels(self.labels.clone());
        for e in &self.edges {
            b.insert(e.u, e.v, 1.0).expect("binarizing a valid graph");
        }
        b.build()
    }

    /// Relabels node `i` as node `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph> {
        let n = self.n();
        let mut check = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut check[p], true)) {
            return Err(Error::invalid("not a permutation of the node set"));
        }
        let mut labels = vec![String::new(); n];
        for (i, &p) in perm.iter().enumerate() {
            labels[p] = self.labels[i].clone();
        }
        let mut b = GraphBuilder::with_labels(labels).weighted(self.weighted);
        for e in &self.edges {
            b.insert(perm[e.u], perm[e.v], e.weight)?;
        }
        Ok(b.build())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_rejects_invalid_edges() {
        let mut b = GraphBuilder::new(3);
        assert!(matches!(b.add_edge(1, 1), Err(Error::SelfLoop(_))));
        assert!(matches!(b.add_weighted_edge(0, 1, 0.0), Err(Error::BadWeight(..))));
        assert!(matches!(b.add_weighted_edge(0, 1, -2.0), Err(Error::BadWeight(..))));
        assert!(matches!(b.add_edge(0, 5), Err(Error::NodeOutOfRange { .. })));
        b.add_edge(0, 1).unwrap();
        assert!(matches!(b.add_edge(1, 0), Err(Error::DuplicateEdge(..))));
    }

    #[test]
    fn adjacency_is_symmetric_and_degrees_sum() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (4, 2)]).unwrap();
        let a = g.dense_adjacency();
        assert_eq!(a, a.transpose());
        assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.edge_count());
        assert_eq!(g.triangle_weight(0), 2.0);
    }

    #[test]
    fn components_and_largest() {
        let g = Graph::from_edges(6, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2, 3, 4], vec![5]]);
        assert!(!g.is_connected());
        let big = g.largest_component();
        assert_eq!(big.labels(), &["2", "3", "4"]);
        assert_eq!(big.edge_count(), 2);
    }

    #[test]
    fn permutation_preserves_structure() {
        let g = Graph::from_weighted_edges(3, &[(0, 1, 2.0), (1, 2, 3.0)]).unwrap();
        let p = g.permute(&[2, 0, 1]).unwrap();
        assert_eq!(p.weight(2, 0), 2.0);
        assert_eq!(p.weight(0, 1), 3.0);
        assert_eq!(p.label(2), "0");
        assert!(g.permute(&[0, 0, 1]).is_err());
    }
}
