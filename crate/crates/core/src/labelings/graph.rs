use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::edge_length;
use crate::error::{bail, Result};
use crate::linalg::{CMatrix, ONE};

/// Labelled graph on `0..n` whose edges are unordered pairs; loops `{i, i}` allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LoopGraph {
    n: usize,
    /// Stored as `(min, max)`.
    edges: BTreeSet<(usize, usize)>,
}

impl LoopGraph {
    /// Rejects out-of-range endpoints and repeated edges.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            bail!(Domain, "a loop-graph needs at least one vertex");
        }
        let mut set = BTreeSet::new();
        for &(i, j) in edges {
            if i >= n || j >= n {
                bail!(Domain, "edge {{{i}, {j}}} has an endpoint outside 0..{n}");
            }
            if !set.insert((i.min(j), i.max(j))) {
                bail!(Domain, "edge {{{i}, {j}}} appears twice");
            }
        }
        Ok(Self { n, edges: set })
    }

    /// Like [`LoopGraph::new`] but silently merges repeated edges.
    pub(crate) fn from_edges_merged(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges = edges.into_iter().map(|(i, j)| (i.min(j), i.max(j))).collect();
        Self { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(i, j)` with `i ≤ j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn loops(&self) -> Vec<usize> {
        self.edges.iter().filter(|(i, j)| i == j).map(|&(i, _)| i).collect()
    }

    pub fn non_loop_edges(&self) -> Vec<(usize, usize)> {
        self.edges.iter().copied().filter(|(i, j)| i != j).collect()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(i, j)| {
                if i == j {
                    None
                } else if i == v {
                    Some(j)
                } else if j == v {
                    Some(i)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Symmetric 0/1 adjacency with loops on the diagonal.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let mut a = vec![vec![0u8; self.n]; self.n];
        for &(i, j) in &self.edges {
            a[i][j] = 1;
            a[j][i] = 1;
        }
        a
    }

    pub fn adjacency_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n);
        for &(i, j) in &self.edges {
            m[(i, j)] = ONE;
            m[(j, i)] = ONE;
        }
        m
    }

    /// BFS distances from `src`, ignoring loops; `None` for unreachable vertices.
    pub fn distances(&self, src: usize) -> Vec<Option<usize>> {
        let adj: Vec<Vec<usize>> = (0..self.n).map(|v| self.neighbors(v)).collect();
        let mut dist = vec![None; self.n];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap_or(0);
            for &w in &adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.distances(0).iter().all(Option::is_some)
    }

    /// Longest shortest-path distance; `None` if disconnected.
    pub fn diameter(&self) -> Option<usize> {
        (0..self.n)
            .map(|v| {
                self.distances(v).into_iter().collect::<Option<Vec<_>>>().map(|d| d.into_iter().max().unwrap_or(0))
            })
            .collect::<Option<Vec<_>>>()
            .map(|d| d.into_iter().max().unwrap_or(0))
    }

    /// Embeds the graph into `n_total ≥ n` vertices, relabelling vertex `v` as `position[v]`.
    pub fn relabel(&self, position: &[usize], n_total: usize) -> Result<Self> {
        if position.len() != self.n {
            bail!(Domain, "expected {} positions, got {}", self.n, position.len());
        }
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&(i, j)| (position[i], position[j])).collect();
        Self::new(n_total, &edges)
    }
}

/// True iff the labels, read in `Z_{2m−1}` for a graph with `m` edges,
/// induce every edge length `0..m−1` exactly once.
pub fn is_rho_labeling(g: &LoopGraph, labels: &[usize]) -> Result<bool> {
    let m = g.edge_count();
    if m == 0 {
        bail!(Precondition, "a ρ-labeling needs at least one edge");
    }
    if labels.len() != g.n() {
        bail!(Precondition, "{} labels for {} vertices", labels.len(), g.n());
    }
    let modulus = 2 * m - 1;
    let mut used = vec![false; modulus];
    for (v, &l) in labels.iter().enumerate() {
        if l >= modulus {
            bail!(Precondition, "label {l} of vertex {v} is outside 0..{modulus}");
        }
        if std::mem::replace(&mut used[l], true) {
            bail!(Precondition, "label {l} is used twice");
        }
    }
    let mut seen = vec![false; m];
    for (i, j) in g.edges() {
        let len = edge_length(labels[i], labels[j], modulus);
        if len >= m || std::mem::replace(&mut seen[len], true) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff the vertex numbering itself is a graceful labeling. The graph
/// must have one loop and `n − 1` other edges.
pub fn is_graceful(g: &LoopGraph) -> Result<bool> {
    let loops = g.loops().len();
    if loops != 1 || g.edge_count() != g.n() {
        bail!(
            Domain,
            "graceful check needs one loop and {} other edges; found {loops} loops and {} other edges",
            g.n() - 1,
            g.edge_count() - loops
        );
    }
    let labels: Vec<usize> = (0..g.n()).collect();
    is_rho_labeling(g, &labels)
}

/// True iff `Σ_{i<2n−1} C^i A C^{−i} = J` for a symmetric 0/1 matrix of size `2n−1`.
pub fn cyclic_decomposition_check(a: &CMatrix, n: usize) -> bool {
    let size = 2 * n - 1;
    if n == 0 || a.n() != size {
        return false;
    }
    let mut bits = vec![vec![0u32; size]; size];
    for r in 0..size {
        for s in 0..size {
            let z = a[(r, s)];
            bits[r][s] = if z == ONE {
                1
            } else if z.norm() == 0.0 {
                0
            } else {
                return false;
            };
        }
    }
    for r in 0..size {
        for s in 0..size {
            if bits[r][s] != bits[s][r] {
                return false;
            }
            // (C^i A C^{-i})_{rs} = A_{r−i, s−i}
            let total: u32 = (0..size).map(|i| bits[(r + size - i) % size][(s + size - i) % size]).sum();
            if total != 1 {
                return false;
            }
        }
    }
    true
}
