use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphBuilder};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct ErOptions {
    pub require_connected: bool,
    /// Resampling attempts before giving up on connectivity.
    pub max_retries: usize,
}

impl Default for ErOptions {
    fn default() -> Self {
        ErOptions {
            require_connected: true,
            max_retries: 1000,
        }
    }
}

/// Erdős–Rényi `G(n, p)` from a seed. With `require_connected` disconnected
/// samples are discarded and redrawn (up to 1000 attempts).
pub fn generate_er(n: usize, p: f64, seed: u64, require_connected: bool) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_er_with(
        &mut rng,
        n,
        p,
        ErOptions {
            require_connected,
            ..ErOptions::default()
        },
    )
}

pub fn generate_er_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    p: f64,
    opts: ErOptions,
) -> Result<Graph> {
    if n < 2 {
        return Err(Error::invalid(format!("ER graph needs n >= 2, got {n}")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("edge probability must lie in (0, 1), got {p}")));
    }
    let attempts = if opts.require_connected { opts.max_retries.max(1) } else { 1 };
    for _ in 0..attempts {
        let mut b = GraphBuilder::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    b.add_edge(u, v).expect("fresh pair");
                }
            }
        }
        let g = b.build();
        if !opts.require_connected || g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::RetriesExhausted(attempts))
}

pub fn generate_complete(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::invalid(format!("complete graph needs n >= 2, got {n}")));
    }
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            b.add_edge(u, v)?;
        }
    }
    Ok(b.build())
}

/// Star `S_n`: hub at index 0 joined to leaves `1..n`.
pub fn generate_star(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::invalid(format!("star graph needs n >= 2, got {n}")));
    }
    let mut b = GraphBuilder::new(n);
    for leaf in 1..n {
        b.add_edge(0, leaf)?;
    }
    Ok(b.build())
}
