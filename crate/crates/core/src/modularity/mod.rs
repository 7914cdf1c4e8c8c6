//! Modularity of a partition, exact optima and the Louvain heuristic.
//!
//! Edge and volume counts are kept as integers and divided only when a
//! block's term is formed, so scores do not drift with the number of blocks.

mod exact;
mod louvain;
mod partition;

pub use exact::{
    best_large_subset_deviation, best_restricted, exact_modularity, BIPARTITION_LIMIT, DEFAULT_EXACT_LIMIT,
    RESTRICTED_LIMIT,
};
pub use louvain::{louvain, DEFAULT_LEVELS};
pub use partition::Partition;

use std::fmt;
use std::io::Write;

use crate::error::{Result, RigError};
use crate::graph::Graph;

/// Absolute tolerance for comparing modularity values.
pub const TOLERANCE: f64 = 1e-12;

/// How the partition of a report was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    /// Best partition with at most `k` blocks.
    Restricted(usize),
    Louvain,
    Supplied,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Exact => f.write_str("exact"),
            Method::Restricted(2) => f.write_str("bipartition"),
            Method::Restricted(k) => write!(f, "restricted{k}"),
            Method::Louvain => f.write_str("louvain"),
            Method::Supplied => f.write_str("supplied"),
        }
    }
}

/// One block's share of a modularity score.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockTerm {
    pub size: usize,
    /// `e(S)`.
    pub edges: u64,
    /// `vol(S)`.
    pub volume: u64,
    pub edge_fraction: f64,
    pub volume_fraction: f64,
    /// `e(S)/e(G) - (vol(S)/vol(G))^2`.
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModularityReport {
    pub score: f64,
    pub per_block: Vec<BlockTerm>,
    pub method: Method,
    pub partition: Partition,
}

impl ModularityReport {
    /// Prints `key=value` lines.
    pub fn write_summary<W: Write>(&self, graph: &Graph, mut out: W) -> Result<()> {
        writeln!(out, "method={}", self.method)?;
        writeln!(out, "score={}", self.score)?;
        writeln!(out, "n={}", graph.n())?;
        writeln!(out, "edges={}", graph.edge_count())?;
        writeln!(out, "blocks={}", self.partition.block_count())?;
        Ok(())
    }

    pub fn write_blocks_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "block,size,edges,volume,edge_fraction,volume_fraction,deviation")?;
        for (b, t) in self.per_block.iter().enumerate() {
            writeln!(
                out,
                "{b},{},{},{},{},{},{}",
                t.size, t.edges, t.volume, t.edge_fraction, t.volume_fraction, t.deviation
            )?;
        }
        Ok(())
    }
}

fn require_edges(graph: &Graph) -> Result<()> {
    if graph.edge_count() == 0 {
        Err(RigError::EmptyGraph)
    } else {
        Ok(())
    }
}

fn block_term(graph: &Graph, size: usize, edges: u64, volume: u64) -> BlockTerm {
    let edge_fraction = edges as f64 / graph.edge_count() as f64;
    let volume_fraction = volume as f64 / graph.volume() as f64;
    BlockTerm {
        size,
        edges,
        volume,
        edge_fraction,
        volume_fraction,
        deviation: edge_fraction - volume_fraction * volume_fraction,
    }
}

/// `mod_A(G)` for the supplied partition.
pub fn score(graph: &Graph, partition: &Partition) -> Result<ModularityReport> {
    score_with_method(graph, partition, Method::Supplied)
}

pub(crate) fn score_with_method(graph: &Graph, partition: &Partition, method: Method) -> Result<ModularityReport> {
    require_edges(graph)?;
    if partition.n() != graph.n() {
        return Err(RigError::InvalidPartition(format!(
            "partition covers {} vertices, graph has {}",
            partition.n(),
            graph.n()
        )));
    }
    let k = partition.block_count();
    let mut sizes = vec![0usize; k];
    let mut edges = vec![0u64; k];
    let mut volume = vec![0u64; k];
    for v in 0..graph.n() {
        let b = partition.block_of(v);
        sizes[b] += 1;
        volume[b] += graph.degree(v) as u64;
    }
    for (u, v) in graph.edges() {
        let b = partition.block_of(u);
        if b == partition.block_of(v) {
            edges[b] += 1;
        }
    }
    let per_block: Vec<BlockTerm> = (0..k)
        .map(|b| block_term(graph, sizes[b], edges[b], volume[b]))
        .collect();
    let score = per_block.iter().map(|t| t.deviation).sum();
    Ok(ModularityReport {
        score,
        per_block,
        method,
        partition: partition.clone(),
    })
}

/// Membership mask of a vertex subset; repeated vertices are harmless.
fn subset_mask(graph: &Graph, subset: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; graph.n()];
    for &v in subset {
        if v >= graph.n() {
            return Err(RigError::InvalidParams(format!(
                "vertex {v} outside [0, {})",
                graph.n()
            )));
        }
        mask[v] = true;
    }
    Ok(mask)
}

fn deviation_of_mask(graph: &Graph, mask: &[bool], select: bool) -> f64 {
    let mut edges = 0u64;
    let mut volume = 0u64;
    for v in (0..graph.n()).filter(|&v| mask[v] == select) {
        volume += graph.degree(v) as u64;
        edges += graph
            .neighbors(v)
            .iter()
            .filter(|&&w| w > v && mask[w] == select)
            .count() as u64;
    }
    let size = mask.iter().filter(|&&b| b == select).count();
    block_term(graph, size, edges, volume).deviation
}

/// `e(S)/e(G) - (vol(S)/vol(G))^2`.
pub fn deviation(graph: &Graph, subset: &[usize]) -> Result<f64> {
    require_edges(graph)?;
    let mask = subset_mask(graph, subset)?;
    Ok(deviation_of_mask(graph, &mask, true))
}

/// Deviations of `S` and of its complement. The two are equal on every
/// graph with at least one edge.
pub fn complement_check(graph: &Graph, subset: &[usize]) -> Result<(f64, f64)> {
    require_edges(graph)?;
    let mask = subset_mask(graph, subset)?;
    Ok((
        deviation_of_mask(graph, &mask, true),
        deviation_of_mask(graph, &mask, false),
    ))
}

#[cfg(test)]
pub(crate) mod test_graphs {
    use crate::graph::Graph;

    pub fn two_triangles() -> Graph {
        Graph::from_edges(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap()
    }

    pub fn triangle_plus_edge() -> Graph {
        Graph::from_edges(5, [(0, 1), (0, 2), (1, 2), (3, 4)]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_graphs::*;
    use super::*;

    #[test]
    fn single_block_scores_zero() {
        let g = triangle_plus_edge();
        let r = score(&g, &Partition::trivial(5)).unwrap();
        assert_eq!(r.score, 0.0);
        assert_eq!(r.method, Method::Supplied);
    }

    #[test]
    fn k2_singletons() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let r = score(&g, &Partition::new(vec![0, 1]).unwrap()).unwrap();
        assert!((r.score + 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_triangles_split() {
        let g = two_triangles();
        let r = score(&g, &Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap()).unwrap();
        assert!((r.score - 0.5).abs() < 1e-15);
        assert_eq!(r.per_block[0].edges, 3);
        assert_eq!(r.per_block[0].volume, 6);
    }

    #[test]
    fn empty_graph_is_rejected() {
        let g = Graph::empty(3);
        assert!(matches!(score(&g, &Partition::trivial(3)), Err(RigError::EmptyGraph)));
        assert!(matches!(deviation(&g, &[0]), Err(RigError::EmptyGraph)));
        assert!(matches!(complement_check(&g, &[0]), Err(RigError::EmptyGraph)));
    }

    #[test]
    fn partition_size_mismatch() {
        let g = two_triangles();
        assert!(matches!(
            score(&g, &Partition::trivial(5)),
            Err(RigError::InvalidPartition(_))
        ));
    }

    #[test]
    fn deviation_examples() {
        let g = triangle_plus_edge();
        assert_eq!(deviation(&g, &[0, 1, 2, 3, 4]).unwrap(), 0.0);
        assert_eq!(deviation(&g, &[]).unwrap(), 0.0);
        assert!((deviation(&g, &[0, 1, 2]).unwrap() - 3.0 / 16.0).abs() < 1e-15);
        assert!(deviation(&g, &[7]).is_err());
    }

    #[test]
    fn complement_examples() {
        let g = triangle_plus_edge();
        assert_eq!(complement_check(&g, &[]).unwrap(), (0.0, 0.0));
        let (a, b) = complement_check(&g, &[0, 1, 2]).unwrap();
        assert!((a - 3.0 / 16.0).abs() < 1e-15 && (b - 3.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn report_outputs() {
        let g = two_triangles();
        let r = score(&g, &Partition::new(vec![0, 0, 0, 1, 1, 1]).unwrap()).unwrap();
        let mut s = Vec::new();
        r.write_summary(&g, &mut s).unwrap();
        let s = String::from_utf8(s).unwrap();
        assert!(s.contains("score=0.5\n") && s.contains("method=supplied\n"));
        let mut c = Vec::new();
        r.write_blocks_csv(&mut c).unwrap();
        assert_eq!(String::from_utf8(c).unwrap().lines().count(), 3);
    }
}
