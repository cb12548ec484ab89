use serde::{Deserialize, Serialize};

use super::graph::{is_graceful, LoopGraph};
use crate::error::{bail, Result};
use crate::linalg::{CMatrix, ONE};

/// A function `Z_n → Z_n` stored as its value table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZnFunction {
    table: Vec<usize>,
}

impl ZnFunction {
    pub fn new(table: Vec<usize>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            bail!(Domain, "a function on Z_n needs n ≥ 1");
        }
        if let Some((i, v)) = table.iter().enumerate().find(|(_, &v)| v >= n) {
            bail!(Domain, "f({i}) = {v} is outside Z_{n}");
        }
        Ok(Self { table })
    }

    pub fn zero(n: usize) -> Self {
        Self { table: vec![0; n.max(1)] }
    }

    pub fn identity(n: usize) -> Self {
        Self { table: (0..n.max(1)).collect() }
    }

    pub fn n(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, i: usize) -> usize {
        self.table[i]
    }

    /// `f(i) ≤ i` for every `i`.
    pub fn is_non_increasing(&self) -> bool {
        self.table.iter().enumerate().all(|(i, &v)| v <= i)
    }

    /// `f(0) = 0` and `f(i) < i` for `i ≠ 0`.
    pub fn is_contracting(&self) -> bool {
        self.table[0] == 0 && self.table.iter().enumerate().skip(1).all(|(i, &v)| v < i)
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|&v| v == 0)
    }

    /// `(self ∘ g)(i) = self(g(i))`.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if g.n() != self.n() {
            bail!(Domain, "cannot compose functions on Z_{} and Z_{}", self.n(), g.n());
        }
        Ok(Self { table: g.table.iter().map(|&x| self.table[x]).collect() })
    }

    /// `π f π⁻¹`, i.e. the same digraph with vertex `v` renamed `π(v)`.
    pub fn conjugate(&self, pi: &[usize]) -> Result<Self> {
        if pi.len() != self.n() || !super::is_permutation(pi) {
            bail!(Domain, "conjugation needs a permutation of Z_{}", self.n());
        }
        let mut table = vec![0; self.n()];
        for (v, &fv) in self.table.iter().enumerate() {
            table[pi[v]] = pi[fv];
        }
        Ok(Self { table })
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.table[i] == i).collect()
    }

    /// Whether some `i ≠ j` has `f(i) = j` and `f(j) = i`.
    pub fn has_two_cycle(&self) -> bool {
        (0..self.n()).any(|i| {
            let j = self.table[i];
            j != i && self.table[j] == i
        })
    }

    pub fn preimage(&self, v: usize) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.table[i] == v).collect()
    }

    /// Directed adjacency with `(A_f)_{i, f(i)} = 1`.
    pub fn adjacency_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n());
        for (i, &v) in self.table.iter().enumerate() {
            m[(i, v)] = ONE;
        }
        m
    }
}

impl std::fmt::Display for ZnFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.table.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All contracting functions on `Z_n` in lexicographic order; there are `(n−1)!`.
pub fn all_contracting(n: usize) -> Vec<ZnFunction> {
    enumerate_bounded(n, |i| if i == 0 { 1 } else { i })
}

/// All non-increasing functions on `Z_n` in lexicographic order; there are `n!`.
pub fn all_non_increasing(n: usize) -> Vec<ZnFunction> {
    enumerate_bounded(n, |i| i + 1)
}

/// Every table with `table[i] < bound(i)`.
fn enumerate_bounded(n: usize, bound: impl Fn(usize) -> usize) -> Vec<ZnFunction> {
    if n == 0 {
        return Vec::new();
    }
    let bounds: Vec<usize> = (0..n).map(bound).collect();
    let mut out = Vec::new();
    let mut table = vec![0; n];
    loop {
        out.push(ZnFunction { table: table.clone() });
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            table[k] += 1;
            if table[k] < bounds[k] {
                break;
            }
            table[k] = 0;
        }
    }
}

/// Arcs `(i, f(i))` of the functional digraph and the loop-graph with edges `{i, f(i)}`.
pub fn underlying_graphs(f: &ZnFunction) -> (Vec<(usize, usize)>, LoopGraph) {
    let arcs: Vec<(usize, usize)> = f.table.iter().copied().enumerate().collect();
    let g = LoopGraph::from_edges_merged(f.n(), arcs.iter().copied());
    (arcs, g)
}

/// Gracefully labelled loop-graph of a non-increasing function: edges
/// `{f(i) + n − 1 − i, f(i)}` for `i < n − 1` and a loop at `f(n − 1)`.
pub fn nif_to_loopgraph(f: &ZnFunction) -> Result<LoopGraph> {
    if !f.is_non_increasing() {
        bail!(Domain, "{f} is not non-increasing");
    }
    let n = f.n();
    let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (f.table[i] + n - 1 - i, f.table[i])).collect();
    edges.push((f.table[n - 1], f.table[n - 1]));
    LoopGraph::new(n, &edges)
}

/// Inverse of [`nif_to_loopgraph`]: the edge `{a > b}` of length `a − b`
/// encodes `f(n − 1 − (a − b)) = b`, and the loop encodes `f(n − 1)`.
pub fn loopgraph_to_nif(g: &LoopGraph) -> Result<ZnFunction> {
    if !is_graceful(g)? {
        bail!(Domain, "loop-graph is not gracefully labelled");
    }
    let n = g.n();
    let mut table = vec![0; n];
    for (b, a) in g.edges() {
        table[n - 1 - (a - b)] = b;
    }
    ZnFunction::new(table)
}
