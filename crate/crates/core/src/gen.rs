//! Deterministic graph generators for tests and the CLI. The random family
//! uses a counter-based hash so outputs are identical across platforms and
//! independent of iteration order.

use num::bigint::BigInt;
use num::{BigRational, ToPrimitive};

use crate::graph::{Graph, VertexId};

/// splitmix64 finalizer over a (seed, u, v) triple.
fn mix(seed: u64, u: u64, v: u64) -> u64 {
    let mut z = seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(u.wrapping_mul(0xbf58_476d_1ce4_e5b9))
        .wrapping_add(v.wrapping_mul(0x94d0_49bb_1331_11eb));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Erdős–Rényi G(n, p): each unordered pair appears independently with
/// probability `p` (exact rational, mapped to a 64-bit threshold).
pub fn gnp(n: u32, p: &BigRational, seed: u64) -> Graph {
    // threshold = floor(p * 2^64), clamped to [0, 2^64].
    let scaled: BigInt = (p.numer() << 64u32) / p.denom();
    let threshold = scaled.to_u128().map_or(u128::from(u64::MAX) + 1, |t| {
        t.min(u128::from(u64::MAX) + 1)
    });
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in (u + 1)..n {
            if u128::from(mix(seed, u64::from(u), u64::from(v))) < threshold {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

pub fn path(n: u32) -> Graph {
    let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn cycle(n: u32) -> Graph {
    assert!(n >= 3);
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn complete(n: u32) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// rows x cols grid, vertex (r, c) = r*cols + c.
pub fn grid(rows: u32, cols: u32) -> Graph {
    let mut edges = Vec::new();
    let id = |r: u32, c: u32| r * cols + c;
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::from_edges(rows * cols, &edges).unwrap()
}

/// Two k-cliques joined by a path with `bridge` interior vertices.
/// Clique A = [0, k), clique B = [k, 2k), path vertices follow.
pub fn barbell(k: u32, bridge: u32) -> Graph {
    assert!(k >= 2);
    let n = 2 * k + bridge;
    let mut edges = Vec::new();
    for base in [0, k] {
        for u in 0..k {
            for v in (u + 1)..k {
                edges.push((base + u, base + v));
            }
        }
    }
    let mut chain: Vec<VertexId> = vec![0];
    chain.extend(2 * k..2 * k + bridge);
    chain.push(k);
    for w in chain.windows(2) {
        edges.push((w[0], w[1]));
    }
    Graph::from_edges(n, &edges).unwrap()
}
