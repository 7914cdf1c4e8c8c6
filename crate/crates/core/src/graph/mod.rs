//! Incidence structures, simple graphs and their generators.

mod generate;
mod io;

pub use generate::{
    model_moments, project, sample_er, sample_er_with, sample_incidence, sample_incidence_sparse,
    sample_incidence_sparse_with, sample_incidence_with, ModelMoments,
};
pub use io::{read_edge_list, read_incidence, write_edge_list, write_incidence};

use crate::error::{Result, RigError};

/// Parameters of `G(n, m, p)` together with the replication seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigParams {
    pub n: usize,
    pub m: usize,
    pub p: f64,
    pub seed: u64,
}

impl RigParams {
    pub fn new(n: usize, m: usize, p: f64, seed: u64) -> Result<Self> {
        let params = Self { n, m, p, seed };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(RigError::InvalidParams("n must be at least 1".into()));
        }
        if self.m == 0 {
            return Err(RigError::InvalidParams("m must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(RigError::InvalidParams(format!("p = {} is outside [0, 1]", self.p)));
        }
        Ok(())
    }

    pub fn np(&self) -> f64 {
        self.n as f64 * self.p
    }

    pub fn mp(&self) -> f64 {
        self.m as f64 * self.p
    }
}

/// The bipartite vertex–attribute structure.
///
/// Member lists are stored attribute-major in one flat buffer. A full
/// incidence stores all `m` attributes. An edges-only incidence, produced by
/// the sparse sampler, stores only the attributes with at least two members;
/// it projects to the same graph but cannot answer questions about
/// attributes held by a single vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incidence {
    n: usize,
    m: usize,
    offsets: Vec<usize>,
    members: Vec<usize>,
    vertex_attrs: Vec<u32>,
    edges_only: bool,
}

impl Incidence {
    /// Builds a full incidence from one sorted member list per attribute.
    pub fn from_members(n: usize, lists: Vec<Vec<usize>>) -> Result<Self> {
        let m = lists.len();
        Self::from_lists(n, m, lists, false)
    }

    /// Builds an edges-only incidence with nominal attribute count `m`.
    /// Every stored list must have at least two members.
    pub fn edges_only_from_members(n: usize, m: usize, lists: Vec<Vec<usize>>) -> Result<Self> {
        if lists.len() > m {
            return Err(RigError::InvalidParams(format!(
                "{} retained attributes exceed m = {m}",
                lists.len()
            )));
        }
        if lists.iter().any(|l| l.len() < 2) {
            return Err(RigError::InvalidParams(
                "edges-only incidence may only keep attributes with at least two members".into(),
            ));
        }
        Self::from_lists(n, m, lists, true)
    }

    fn from_lists(n: usize, m: usize, lists: Vec<Vec<usize>>, edges_only: bool) -> Result<Self> {
        let mut builder = IncidenceBuilder::new(n, m, edges_only);
        for (i, list) in lists.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(RigError::InvalidParams(format!(
                    "member list of attribute {i} is not strictly increasing"
                )));
            }
            if let Some(&v) = list.iter().find(|&&v| v >= n) {
                return Err(RigError::InvalidParams(format!(
                    "attribute {i} contains vertex {v} outside [0, {n})"
                )));
            }
            builder.push_sorted(list);
        }
        Ok(builder.finish())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Nominal attribute count of the model.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of attributes with a stored member list; equals `m` unless
    /// the incidence is edges-only.
    pub fn stored_attributes(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_edges_only(&self) -> bool {
        self.edges_only
    }

    pub fn members(&self, i: usize) -> &[usize] {
        &self.members[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[usize]> + '_ {
        self.offsets.windows(2).map(move |w| &self.members[w[0]..w[1]])
    }

    /// `V_i` for every stored attribute.
    pub fn sizes(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `|W(v)|` for every vertex, counted over stored attributes.
    pub fn vertex_attr_counts(&self) -> &[u32] {
        &self.vertex_attrs
    }

    pub fn total_memberships(&self) -> usize {
        self.members.len()
    }

    /// Materializes `W(v)` for every vertex.
    pub fn vertex_attribute_lists(&self) -> Vec<Vec<usize>> {
        let mut lists: Vec<Vec<usize>> = self
            .vertex_attrs
            .iter()
            .map(|&c| Vec::with_capacity(c as usize))
            .collect();
        for (i, members) in self.iter().enumerate() {
            for &v in members {
                lists[v].push(i);
            }
        }
        lists
    }

    pub(crate) fn require_full(&self) -> Result<()> {
        if self.edges_only {
            Err(RigError::EdgesOnlyIncidence)
        } else {
            Ok(())
        }
    }
}

/// Incremental CSR construction for [`Incidence`].
pub(crate) struct IncidenceBuilder {
    n: usize,
    m: usize,
    offsets: Vec<usize>,
    members: Vec<usize>,
    vertex_attrs: Vec<u32>,
    edges_only: bool,
}

impl IncidenceBuilder {
    pub(crate) fn new(n: usize, m: usize, edges_only: bool) -> Self {
        let mut offsets = Vec::with_capacity(if edges_only { 1 } else { m + 1 });
        offsets.push(0);
        Self {
            n,
            m,
            offsets,
            members: Vec::new(),
            vertex_attrs: vec![0; n],
            edges_only,
        }
    }

    /// Appends one attribute; `list` must already be strictly increasing.
    pub(crate) fn push_sorted(&mut self, list: &[usize]) {
        for &v in list {
            self.vertex_attrs[v] += 1;
        }
        self.members.extend_from_slice(list);
        self.offsets.push(self.members.len());
    }

    pub(crate) fn finish(self) -> Incidence {
        debug_assert!(self.edges_only || self.offsets.len() == self.m + 1);
        Incidence {
            n: self.n,
            m: self.m,
            offsets: self.offsets,
            members: self.members,
            vertex_attrs: self.vertex_attrs,
            edges_only: self.edges_only,
        }
    }
}

/// A simple undirected graph in compressed adjacency form.
///
/// Neighbor lists are sorted, so edges can be enumerated as `(u, v)` with
/// `u < v` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            edge_count: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::from_sorted_unique(n, edges.collect())
    }

    /// Builds a graph from arbitrary endpoint pairs. Duplicate pairs are
    /// merged; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(RigError::InvalidParams(format!("self-loop at vertex {a}")));
            }
            if a >= n || b >= n {
                return Err(RigError::InvalidParams(format!(
                    "edge ({a}, {b}) has an endpoint outside [0, {n})"
                )));
            }
            pairs.push((a.min(b), a.max(b)));
        }
        Ok(Self::from_pairs(n, pairs))
    }

    /// Normalized pairs (`u < v`, in range), possibly repeated and unsorted.
    pub(crate) fn from_pairs(n: usize, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        Self::from_sorted_unique(n, pairs)
    }

    fn from_sorted_unique(n: usize, pairs: Vec<(usize, usize)>) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in &pairs {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut acc = 0;
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0usize; acc];
        // Lexicographic order fills every neighbor list in increasing order:
        // smaller neighbors arrive as `u` of earlier pairs, larger ones as `v`.
        for &(u, v) in &pairs {
            targets[cursor[v]] = u;
            cursor[v] += 1;
        }
        for &(u, v) in &pairs {
            targets[cursor[u]] = v;
            cursor[u] += 1;
        }
        Self {
            n,
            offsets,
            targets,
            edge_count: pairs.len(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `e(G)`.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// `vol(G) = 2 e(G)`.
    pub fn volume(&self) -> usize {
        2 * self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically ordered.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            let nb = self.neighbors(u);
            let start = nb.partition_point(|&w| w <= u);
            nb[start..].iter().map(move |&v| (u, v))
        })
    }

    /// True when every edge of `self` is also an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.n == other.n && self.edges().all(|(u, v)| other.has_edge(u, v))
    }
}
