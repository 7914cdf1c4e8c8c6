//! Exhaustive optima for small graphs.
//!
//! Scores are compared in the integer scale `4 e(G)^2 * mod`, in which a
//! block contributes `4 e(G) e(S) - vol(S)^2`, so every comparison is exact.

use super::{require_edges, score_with_method, Method, ModularityReport, Partition};
use crate::error::{Result, RigError};
use crate::graph::Graph;

/// Default vertex limit for enumerating all set partitions (B(11) = 678570).
pub const DEFAULT_EXACT_LIMIT: usize = 11;
/// Vertex limit for the two-block search over `2^(n-1)` splits.
pub const BIPARTITION_LIMIT: usize = 26;
/// Vertex limit for searches over partitions with at most `k >= 3` blocks.
pub const RESTRICTED_LIMIT: usize = 13;

/// Depth-first enumeration of restricted-growth strings with running
/// per-block edge and volume counts.
struct Enumerator<'g> {
    lower: Vec<Vec<usize>>,
    degree: Vec<i64>,
    four_e: i64,
    max_blocks: usize,
    assign: Vec<usize>,
    block_edges: Vec<i64>,
    block_volume: Vec<i64>,
    best: i64,
    best_assign: Vec<usize>,
    _graph: &'g Graph,
}

impl<'g> Enumerator<'g> {
    fn new(graph: &'g Graph, max_blocks: usize) -> Self {
        let n = graph.n();
        let lower = (0..n)
            .map(|v| graph.neighbors(v).iter().copied().filter(|&w| w < v).collect())
            .collect();
        Self {
            lower,
            degree: graph.degrees().into_iter().map(|d| d as i64).collect(),
            four_e: 4 * graph.edge_count() as i64,
            max_blocks: max_blocks.min(n.max(1)),
            assign: vec![0; n],
            block_edges: vec![0; n.max(1)],
            block_volume: vec![0; n.max(1)],
            // The one-block partition scores exactly zero and is always feasible.
            best: 0,
            best_assign: vec![0; n],
            _graph: graph,
        }
    }

    fn run(mut self) -> Vec<usize> {
        if !self.assign.is_empty() {
            self.visit(0, 0);
        }
        self.best_assign
    }

    fn visit(&mut self, v: usize, used: usize) {
        let n = self.assign.len();
        if v == n {
            let scaled: i64 = (0..used)
                .map(|b| self.four_e * self.block_edges[b] - self.block_volume[b] * self.block_volume[b])
                .sum();
            if scaled > self.best {
                self.best = scaled;
                self.best_assign.copy_from_slice(&self.assign);
            }
            return;
        }
        let limit = if used < self.max_blocks { used + 1 } else { used };
        for b in 0..limit {
            let links = self.lower[v].iter().filter(|&&w| self.assign[w] == b).count() as i64;
            self.assign[v] = b;
            self.block_edges[b] += links;
            self.block_volume[b] += self.degree[v];
            self.visit(v + 1, used.max(b + 1));
            self.block_edges[b] -= links;
            self.block_volume[b] -= self.degree[v];
        }
    }
}

/// `mod(G)` by enumerating every set partition.
pub fn exact_modularity(graph: &Graph, max_n: usize) -> Result<ModularityReport> {
    require_edges(graph)?;
    if graph.n() > max_n {
        return Err(RigError::TooLarge {
            n: graph.n(),
            limit: max_n,
        });
    }
    let best = Enumerator::new(graph, graph.n()).run();
    score_with_method(graph, &Partition::from_labels(&best), Method::Exact)
}

/// Best score over partitions with at most `k` blocks. The true modularity
/// lies in `[result, k/(k-1) * result]`.
pub fn best_restricted(graph: &Graph, k: usize) -> Result<ModularityReport> {
    require_edges(graph)?;
    if k < 2 {
        return Err(RigError::InvalidParams(format!(
            "need at least two blocks, got k = {k}"
        )));
    }
    let best = if k == 2 {
        if graph.n() > BIPARTITION_LIMIT {
            return Err(RigError::TooLarge {
                n: graph.n(),
                limit: BIPARTITION_LIMIT,
            });
        }
        let mask = best_split(graph);
        (0..graph.n()).map(|v| usize::from(mask >> v & 1 == 1)).collect()
    } else {
        if graph.n() > RESTRICTED_LIMIT {
            return Err(RigError::TooLarge {
                n: graph.n(),
                limit: RESTRICTED_LIMIT,
            });
        }
        Enumerator::new(graph, k).run()
    };
    score_with_method(graph, &Partition::from_labels(&best), Method::Restricted(k))
}

fn adjacency_masks(graph: &Graph) -> Vec<u32> {
    (0..graph.n())
        .map(|v| graph.neighbors(v).iter().fold(0u32, |acc, &w| acc | 1 << w))
        .collect()
}

/// Walks every subset of the first `bits` vertices in Gray-code order and
/// hands `(mask, e(S), vol(S))` to `visit`, starting with the empty set.
fn gray_walk(graph: &Graph, bits: usize, mut visit: impl FnMut(u32, i64, i64)) {
    let adj = adjacency_masks(graph);
    let degree: Vec<i64> = graph.degrees().into_iter().map(|d| d as i64).collect();
    let (mut mask, mut edges, mut volume) = (0u32, 0i64, 0i64);
    visit(mask, edges, volume);
    for step in 1u64..(1u64 << bits) {
        let v = step.trailing_zeros() as usize;
        let bit = 1u32 << v;
        if mask & bit == 0 {
            edges += (adj[v] & mask).count_ones() as i64;
            volume += degree[v];
            mask |= bit;
        } else {
            mask &= !bit;
            edges -= (adj[v] & mask).count_ones() as i64;
            volume -= degree[v];
        }
        visit(mask, edges, volume);
    }
}

/// Best two-block split as a mask of the block that excludes the last vertex.
fn best_split(graph: &Graph) -> u32 {
    let e = graph.edge_count() as i64;
    let vol_g = 2 * e;
    let (mut best, mut best_mask) = (0i64, 0u32);
    gray_walk(graph, graph.n() - 1, |mask, edges, volume| {
        let other_edges = e - volume + edges;
        let other_volume = vol_g - volume;
        let scaled = 4 * e * (edges + other_edges) - volume * volume - other_volume * other_volume;
        if scaled > best {
            best = scaled;
            best_mask = mask;
        }
    });
    best_mask
}

/// `max { e(S)/e(G) - (vol(S)/vol(G))^2 : |S| >= n/2 }` by subset enumeration,
/// returned with a maximizing subset.
pub fn best_large_subset_deviation(graph: &Graph) -> Result<(f64, Vec<usize>)> {
    require_edges(graph)?;
    let n = graph.n();
    if n > BIPARTITION_LIMIT {
        return Err(RigError::TooLarge {
            n,
            limit: BIPARTITION_LIMIT,
        });
    }
    let e = graph.edge_count() as i64;
    let mut best: Option<(i64, u32)> = None;
    gray_walk(graph, n, |mask, edges, volume| {
        if 2 * mask.count_ones() as usize >= n {
            let scaled = 4 * e * edges - volume * volume;
            if best.is_none_or(|(b, _)| scaled > b) {
                best = Some((scaled, mask));
            }
        }
    });
    let (scaled, mask) = best.expect("the full vertex set qualifies");
    let subset = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
    Ok((scaled as f64 / (4 * e * e) as f64, subset))
}
