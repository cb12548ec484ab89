//! Loop-graphs, functions on `Z_n`, ρ- and graceful labelings, and the
//! composition iteration that collapses a contracting function to zero.

mod compose;
mod function;
mod graph;

pub use compose::{compose_iterate, compose_preconditions, compose_step, max_induced_labels, MAX_INDUCED_N};
pub use function::{
    all_contracting, all_non_increasing, loopgraph_to_nif, nif_to_loopgraph, underlying_graphs, ZnFunction,
};
pub use graph::{cyclic_decomposition_check, is_graceful, is_rho_labeling, LoopGraph};

/// Cyclic length `min{|i−j|, n−|i−j|}` of an edge in the complete loop-graph on `n` vertices.
pub fn edge_length(i: usize, j: usize, n: usize) -> usize {
    let d = i.abs_diff(j) % n.max(1);
    d.min(n - d)
}

/// Advances `perm` to its lexicographic successor; returns `false` (leaving
/// `perm` sorted ascending) once the last permutation has been passed.
pub fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        perm.reverse();
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Inverse of a permutation given as a value table.
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// True iff `perm` is a bijection of `0..perm.len()`.
pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&p| p < seen.len() && !std::mem::replace(&mut seen[p], true))
}
