//! Small weighted graphs with known interlacing pairs.

use crate::error::Result;
use crate::graph::{Graph, GraphBuilder};

/// Hub versus clique member, all edges of weight `s`.
///
/// Node `j = 0` sits in a clique `K_m` (degree `m - 1`, many triangles).
/// Hub `i = m` has `m - 2 + delta` pendant leaves and one link to clique node
/// 1: degree `m - 1 + delta`, no triangles. The hub leads at small ζ and the
/// clique member overtakes it once triangles dominate.
pub fn hub_versus_clique(m: usize, delta: usize, s: f64) -> Result<(Graph, usize, usize)> {
    let leaves = m - 2 + delta;
    let hub = m;
    let mut b = GraphBuilder::new(m + 1 + leaves).weighted(true);
    for u in 0..m {
        for v in u + 1..m {
            b.add_weighted_edge(u, v, s)?;
        }
    }
    b.add_weighted_edge(hub, 1, s)?;
    for l in 0..leaves {
        b.add_weighted_edge(hub, m + 1 + l, s)?;
    }
    Ok((b.build(), hub, 0))
}

/// A pair whose circulabilities cross twice.
///
/// Hub `i` links (weight `wb`) to a large clique `K_big` and carries `leaves`
/// pendant leaves; `j` is a member of a small clique `K_small`, reached from
/// the first leaf through a two-edge path. `j` overtakes `i` through its
/// triangles, then `i` wins back through the large clique's dominant
/// eigenvalue.
pub fn two_crossings(big: usize, small: usize, leaves: usize, wb: f64) -> Result<(Graph, usize, usize)> {
    let hub = big;
    let leaf0 = big + 1;
    let small0 = big + 1 + leaves;
    let path_mid = small0 + small;
    let n = path_mid + 1;
    let mut b = GraphBuilder::new(n).weighted(true);
    for u in 0..big {
        for v in u + 1..big {
            b.add_edge(u, v)?;
        }
    }
    b.add_weighted_edge(hub, 0, wb)?;
    for l in 0..leaves {
        b.add_edge(hub, leaf0 + l)?;
    }
    for u in 0..small {
        for v in u + 1..small {
            b.add_edge(small0 + u, small0 + v)?;
        }
    }
    b.add_edge(leaf0, path_mid)?;
    b.add_edge(path_mid, small0 + 1)?;
    Ok((b.build(), hub, small0))
}
