//! Exact walk counts `w_i^(k) = (A^k 1)_i` and `w_ii^(k) = (A^k)_ii`.
//!
//! Only matrix-vector products are used. Closed walks come from
//! `(A^k)_ii = <A^a e_i, A^b e_i>` with `a = floor(k/2)`, `b = ceil(k/2)`, so
//! one chain of `ceil(kmax/2)` products per node suffices.

use super::Graph;

#[derive(Debug, Clone, PartialEq)]
pub enum CountVector {
    /// Exact counts (unweighted graphs whose counts fit in `u128`).
    Integer(Vec<u128>),
    Real(Vec<f64>),
}

impl CountVector {
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            CountVector::Integer(v) => v.iter().map(|&x| x as f64).collect(),
            CountVector::Real(v) => v.clone(),
        }
    }

    pub fn get(&self, i: usize) -> f64 {
        match self {
            CountVector::Integer(v) => v[i] as f64,
            CountVector::Real(v) => v[i],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkCounts {
    pub order: usize,
    pub total: CountVector,
    pub closed: CountVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkSeries {
    /// Entry `k` holds the counts for walks of length `k`, `k = 0..=kmax`.
    pub orders: Vec<WalkCounts>,
    /// Set when an unweighted graph overflowed `u128` and the whole series was
    /// recomputed in floating point.
    pub overflowed: bool,
}

pub fn walk_counts(g: &Graph, kmax: usize) -> WalkSeries {
    if !g.is_weighted() {
        if let Some(orders) = integer_counts(g, kmax) {
            return WalkSeries {
                orders,
                overflowed: false,
            };
        }
    }
    let total = total_walks(g, kmax);
    let nodes: Vec<usize> = (0..g.n()).collect();
    let closed = closed_walks_of(g, &nodes, kmax);
    let orders = (0..=kmax)
        .map(|k| WalkCounts {
            order: k,
            total: CountVector::Real(total[k].clone()),
            closed: CountVector::Real(closed.iter().map(|c| c[k]).collect()),
        })
        .collect();
    WalkSeries {
        orders,
        overflowed: !g.is_weighted(),
    }
}

/// `result[k][i] = (A^k 1)_i` in floating point.
pub fn total_walks(g: &Graph, kmax: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(vec![1.0; g.n()]);
    for k in 1..=kmax {
        let next = g.matvec(&out[k - 1]);
        out.push(next);
    }
    out
}

/// `result[m][k] = (A^k)_{ii}` for `i = nodes[m]`, in floating point.
pub fn closed_walks_of(g: &Graph, nodes: &[usize], kmax: usize) -> Vec<Vec<f64>> {
    let half = kmax.div_ceil(2);
    nodes
        .iter()
        .map(|&i| {
            let mut chain = Vec::with_capacity(half + 1);
            let mut e = vec![0.0; g.n()];
            e[i] = 1.0;
            chain.push(e);
            for t in 1..=half {
                let next = g.matvec(&chain[t - 1]);
                chain.push(next);
            }
            (0..=kmax)
                .map(|k| dot(&chain[k / 2], &chain[k.div_ceil(2)]))
                .collect()
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn int_matvec(g: &Graph, x: &[u128]) -> Option<Vec<u128>> {
    (0..g.n())
        .map(|i| {
            g.neighbors(i)
                .iter()
                .try_fold(0u128, |acc, &(j, _)| acc.checked_add(x[j]))
        })
        .collect()
}

fn int_dot(a: &[u128], b: &[u128]) -> Option<u128> {
    a.iter()
        .zip(b)
        .try_fold(0u128, |acc, (&x, &y)| acc.checked_add(x.checked_mul(y)?))
}

fn integer_counts(g: &Graph, kmax: usize) -> Option<Vec<WalkCounts>> {
    let n = g.n();
    let mut total = vec![vec![1u128; n]];
    for k in 1..=kmax {
        total.push(int_matvec(g, &total[k - 1])?);
    }
    let half = kmax.div_ceil(2);
    let mut closed = vec![vec![0u128; n]; kmax + 1];
    for i in 0..n {
        let mut chain = Vec::with_capacity(half + 1);
        let mut e = vec![0u128; n];
        e[i] = 1;
        chain.push(e);
        for t in 1..=half {
            chain.push(int_matvec(g, &chain[t - 1])?);
        }
        for (k, row) in closed.iter_mut().enumerate() {
            row[i] = int_dot(&chain[k / 2], &chain[k.div_ceil(2)])?;
        }
    }
    Some(
        total
            .into_iter()
            .zip(closed)
            .enumerate()
            .map(|(order, (t, c))| WalkCounts {
                order,
                total: CountVector::Integer(t),
                closed: CountVector::Integer(c),
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_complete, generate_er};

    fn ints(v: &CountVector) -> Vec<u128> {
        match v {
            CountVector::Integer(x) => x.clone(),
            CountVector::Real(_) => panic!("expected exact counts"),
        }
    }

    #[test]
    fn low_orders() {
        let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let s = walk_counts(&p3, 3);
        assert_eq!(ints(&s.orders[0].total), vec![1, 1, 1]);
        assert_eq!(ints(&s.orders[0].closed), vec![1, 1, 1]);
        assert_eq!(ints(&s.orders[1].closed), vec![0, 0, 0]);
        assert_eq!(ints(&s.orders[2].closed), vec![1, 2, 1]);
        let k3 = generate_complete(3).unwrap();
        let s = walk_counts(&k3, 3);
        assert_eq!(ints(&s.orders[3].closed), vec![2, 2, 2]);
    }

    /// Counts every walk of length k by explicit depth-first enumeration.
    fn enumerate(g: &Graph, start: usize, k: usize, end: Option<usize>) -> u128 {
        if k == 0 {
            return match end {
                Some(e) => (start == e) as u128,
                None => 1,
            };
        }
        g.neighbors(start)
            .iter()
            .map(|&(v, _)| enumerate(g, v, k - 1, end))
            .sum()
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        let g = generate_er(6, 0.5, 4, true).unwrap();
        let s = walk_counts(&g, 5);
        for k in 0..=5 {
            for i in 0..6 {
                assert_eq!(ints(&s.orders[k].total)[i], enumerate(&g, i, k, None));
                assert_eq!(ints(&s.orders[k].closed)[i], enumerate(&g, i, k, Some(i)));
            }
        }
    }

    #[test]
    fn total_recursion_and_degree_identities() {
        let g = generate_er(12, 0.4, 8, true).unwrap();
        let s = walk_counts(&g, 6);
        for k in 1..=6 {
            let prev = s.orders[k - 1].total.to_f64();
            assert_eq!(g.matvec(&prev), s.orders[k].total.to_f64());
        }
        for i in 0..12 {
            assert_eq!(s.orders[2].closed.get(i), g.degree(i) as f64);
            assert_eq!(s.orders[3].closed.get(i), 2.0 * g.triangle_weight(i));
        }
    }

    #[test]
    fn overflow_switches_to_floating_point() {
        let g = generate_complete(30).unwrap();
        let s = walk_counts(&g, 40);
        assert!(s.overflowed);
        let closed = s.orders[40].closed.to_f64();
        // (A^k)_ii for K_n is ((n-1)^k + (n-1)(-1)^k) / n.
        let expect = (29f64.powi(40) + 29.0) / 30.0;
        assert!((closed[0] - expect).abs() / expect < 1e-12);
    }

    #[test]
    fn weighted_counts_are_real() {
        let g = Graph::from_weighted_edges(3, &[(0, 1, 2.0), (1, 2, 0.5), (0, 2, 1.0)]).unwrap();
        let s = walk_counts(&g, 3);
        assert!(!s.overflowed);
        assert!(matches!(s.orders[2].closed, CountVector::Real(_)));
        assert_eq!(s.orders[3].closed.get(0), 2.0 * 2.0 * 0.5 * 1.0);
        assert_eq!(s.orders[2].closed.get(0), 4.0 + 1.0);
    }
}
