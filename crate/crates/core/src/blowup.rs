//! Cyclic blowups: the block unitary `U_n`, the lifted matrices
//! `U_n (I ⊗ (X ⊕ O)) U_n*`, the permutation group they are conjugated by,
//! and minimization over that finite group.
//!
//! Throughout, `m = 2n − 1` and the ambient dimension is `N = m²`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::labelings::{invert_permutation, is_permutation, is_rho_labeling, next_permutation, LoopGraph, ZnFunction};
use crate::linalg::{is_uniform, omega_pow, CMatrix, C64, ONE, ZERO};
use crate::report::ApportionReport;

/// Largest ambient dimension `(2n−1)²` that will be built.
pub const MAX_BLOWUP_DIM: usize = 400;
/// Exhaustive minimization enumerates at most this many permutations.
pub const MAX_EXHAUSTIVE: usize = 1_000_000;

/// The block unitary `U_n` with `(i, j)` block `C^j diag(w)^i / √m`.
#[derive(Clone, Debug)]
pub struct BlowupOperator {
    n: usize,
    u: CMatrix,
}

impl BlowupOperator {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `2n − 1`.
    pub fn m(&self) -> usize {
        2 * self.n - 1
    }

    /// `(2n − 1)²`.
    pub fn dim(&self) -> usize {
        self.u.n()
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.u
    }

    /// `U_n (I_m ⊗ X) U_n*` for an `m × m` matrix `X`.
    pub fn lift(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.n() != self.m() {
            bail!(Domain, "expected a {0}×{0} matrix, got {1}×{1}", self.m(), x.n());
        }
        let kron = CMatrix::identity(self.m()).kron(x);
        Ok(self.u.conjugate(&kron))
    }

    /// `U_n (I_m ⊗ (X ⊕ O_{m−k})) U_n*` for a `k × k` matrix `X`, `k ≤ n`.
    pub fn lift_padded(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.n() > self.n {
            bail!(Domain, "a {0}×{0} matrix does not fit blowup order {1}", x.n(), self.n);
        }
        self.lift(&x.pad_zeros(self.m() - x.n()))
    }
}

pub fn block_unitary(n: usize) -> Result<BlowupOperator> {
    if n < 2 {
        bail!(Domain, "blowups need n ≥ 2");
    }
    let m = 2 * n - 1;
    if m * m > MAX_BLOWUP_DIM {
        bail!(Size, "dimension {} exceeds the cap {MAX_BLOWUP_DIM}", m * m);
    }
    let s = 1.0 / (m as f64).sqrt();
    // block (i, j), entry (r, c): [r ≡ c + j] ω^{i c} / √m
    let u = CMatrix::from_fn(m * m, |row, col| {
        let (i, r) = (row / m, row % m);
        let (j, c) = (col / m, col % m);
        if r == (c + j) % m {
            omega_pow(m, (i * c) as i64) * s
        } else {
            ZERO
        }
    });
    Ok(BlowupOperator { n, u })
}

/// `H_G = U_n (I ⊗ (A_G ⊕ O)) U_n*` for a loop-graph on at most `n` vertices.
pub fn cyclic_blowup(g: &LoopGraph, n: usize) -> Result<CMatrix> {
    block_unitary(n)?.lift_padded(&g.adjacency_matrix())
}

/// `T_f = U_n (I ⊗ (A_f ⊕ O)) U_n*` with `(A_f)_{i, f(i)} = 1`.
pub fn tf_matrix(f: &ZnFunction) -> Result<CMatrix> {
    block_unitary(f.n())?.lift_padded(&f.adjacency_matrix())
}

/// Permutation matrix `P` with `P e_v = e_{perm[v]}`.
pub fn permutation_matrix(perm: &[usize]) -> Result<CMatrix> {
    if !is_permutation(perm) {
        bail!(Domain, "{perm:?} is not a permutation");
    }
    let mut p = CMatrix::zeros(perm.len());
    for (v, &w) in perm.iter().enumerate() {
        p[(w, v)] = ONE;
    }
    Ok(p)
}

/// Reads back the permutation of a 0/1 permutation matrix.
pub fn permutation_from_matrix(p: &CMatrix) -> Result<Vec<usize>> {
    let n = p.n();
    let mut perm = vec![usize::MAX; n];
    for v in 0..n {
        for w in 0..n {
            let z = p[(w, v)];
            if z == ONE {
                if perm[v] != usize::MAX {
                    bail!(Domain, "column {v} has two nonzero entries");
                }
                perm[v] = w;
            } else if z != ZERO {
                bail!(Domain, "entry ({w}, {v}) is neither 0 nor 1");
            }
        }
    }
    if !is_permutation(&perm) {
        bail!(Domain, "not a permutation matrix");
    }
    Ok(perm)
}

/// `U_n (I ⊗ P) U_n*` for a permutation of `0..2n−1`.
pub fn group_element(perm: &[usize], n: usize) -> Result<CMatrix> {
    let op = block_unitary(n)?;
    if perm.len() != op.m() {
        bail!(Domain, "expected a permutation of {} points, got {}", op.m(), perm.len());
    }
    op.lift(&permutation_matrix(perm)?)
}

/// Extends a permutation of `0..n` by fixing `n..2n−1`.
pub fn restricted_permutation(perm: &[usize]) -> Vec<usize> {
    let n = perm.len();
    perm.iter().copied().chain(n..2 * n - 1).collect()
}

/// Permutation sending vertex `v` to `labeling[v]` and the remaining points,
/// in increasing order, to the unused positions in increasing order.
pub fn labeling_permutation(labeling: &[usize], m: usize) -> Result<Vec<usize>> {
    let mut used = vec![false; m];
    for &l in labeling {
        if l >= m || std::mem::replace(&mut used[l], true) {
            bail!(Domain, "labeling {labeling:?} is not injective into 0..{m}");
        }
    }
    let free: Vec<usize> = (0..m).filter(|&p| !used[p]).collect();
    Ok(labeling.iter().copied().chain(free).collect())
}

/// Conjugates `H_G` by the group element built from a ρ-labeling; the result is
/// uniform with constant `1/(2n−1)`.
pub fn apportion_blowup(g: &LoopGraph, labeling: &[usize]) -> Result<ApportionReport> {
    let n = g.n();
    if g.edge_count() != n || g.loops().len() != 1 {
        bail!(Domain, "the graph needs one loop and {} other edges", n.saturating_sub(1));
    }
    if !is_rho_labeling(g, labeling)? {
        bail!(Domain, "labeling {labeling:?} is not a ρ-labeling");
    }
    let op = block_unitary(n)?;
    let perm = labeling_permutation(labeling, op.m())?;
    let q = op.lift(&permutation_matrix(&perm)?)?;
    let h = op.lift_padded(&g.adjacency_matrix())?;
    let result = q.conjugate(&h);
    Ok(ApportionReport::constructed(q, result, 1.0 / op.m() as f64, 1e-9))
}

/// Searches the restricted group `{U_n (I ⊗ (P ⊕ I_{n−1})) U_n*}` exhaustively for an
/// element that makes `H_G` uniform. Returns the vertex permutation and the report
/// for the first success in lexicographic order.
pub fn apportion_blowup_restricted(g: &LoopGraph) -> Result<Option<(Vec<usize>, ApportionReport)>> {
    let n = g.n();
    let op = block_unitary(n)?;
    let h = op.lift_padded(&g.adjacency_matrix())?;
    let kappa = 1.0 / op.m() as f64;
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let full = restricted_permutation(&perm);
        let q = op.lift(&permutation_matrix(&full)?)?;
        let result = q.conjugate(&h);
        let report = ApportionReport::constructed(q, result, kappa, 1e-9);
        if report.status == crate::Status::Uniform {
            return Ok(Some((perm, report)));
        }
        if !next_permutation(&mut perm) {
            return Ok(None);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum GroupSearch {
    /// Every permutation of `0..2n−1`.
    Exhaustive,
    /// `samples` seeded random permutations plus the identity.
    Sampled { samples: usize, seed: u64 },
}

/// Result of minimizing `‖V A V*‖_max` over the group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupMin {
    pub value: f64,
    pub perm: Vec<usize>,
    pub evaluated: usize,
}

fn factorial_capped(k: usize, cap: usize) -> Option<usize> {
    (1..=k).try_fold(1usize, |acc, x| acc.checked_mul(x).filter(|&v| v <= cap))
}

/// `min_V ‖V A V*‖_max` over `V = U_n (I ⊗ P) U_n*`. Ties go to the
/// lexicographically smallest permutation.
pub fn frak_u_min(a: &CMatrix, n: usize, mode: GroupSearch) -> Result<GroupMin> {
    let op = block_unitary(n)?;
    let m = op.m();
    if a.n() != op.dim() {
        bail!(Domain, "expected a {0}×{0} matrix, got {1}×{1}", op.dim(), a.n());
    }
    let perms: Vec<Vec<usize>> = match mode {
        GroupSearch::Exhaustive => {
            if factorial_capped(m, MAX_EXHAUSTIVE).is_none() {
                bail!(Size, "({m})! permutations exceed the exhaustive cap {MAX_EXHAUSTIVE}");
            }
            let mut all = Vec::new();
            let mut p: Vec<usize> = (0..m).collect();
            loop {
                all.push(p.clone());
                if !next_permutation(&mut p) {
                    break;
                }
            }
            all
        }
        GroupSearch::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut all = vec![(0..m).collect::<Vec<_>>()];
            for _ in 0..samples {
                let mut p: Vec<usize> = (0..m).collect();
                p.shuffle(&mut rng);
                all.push(p);
            }
            all
        }
    };
    // V A V* = U (I ⊗ P) Ã (I ⊗ Pᵀ) U* with Ã = U* A U computed once.
    let inner = op.u.adjoint().conjugate(a);
    let evaluated = perms.len();
    let best = perms
        .into_par_iter()
        .map(|p| {
            let inv = invert_permutation(&p);
            let moved = CMatrix::from_fn(op.dim(), |r, c| {
                let (br, ir) = (r / m, r % m);
                let (bc, ic) = (c / m, c % m);
                // (I⊗P) X (I⊗Pᵀ) at ((br, p[x]), (bc, p[y])) equals X at ((br, x), (bc, y))
                inner[(br * m + inv[ir], bc * m + inv[ic])]
            });
            (op.u.conjugate(&moved).max_abs(), p)
        })
        .reduce_with(|x, y| match x.0.partial_cmp(&y.0) {
            Some(std::cmp::Ordering::Less) => x,
            Some(std::cmp::Ordering::Greater) => y,
            _ => {
                if x.1 <= y.1 {
                    x
                } else {
                    y
                }
            }
        })
        .expect("at least the identity is evaluated");
    Ok(GroupMin { value: best.0, perm: best.1, evaluated })
}

/// The gap `1/(2n−1) − √((2n−1)n)/(2n−1)²` between the group minimum of
/// `T_f` and its Frobenius lower bound, for contracting `f`.
pub fn tf_gap_closed_form(n: usize) -> f64 {
    let m = (2 * n - 1) as f64;
    1.0 / m - (m * n as f64).sqrt() / (m * m)
}

/// Checks that `V T_f V*` and `V U_n (I ⊗ ((A_f − E_00)ᵀ ⊕ O)) U_n* V*` have
/// disjoint supports (entrywise product below `1e-10`).
pub fn orthogonality_check(f: &ZnFunction, perm: &[usize]) -> Result<bool> {
    if !f.is_contracting() {
        bail!(Domain, "{f} is not contracting");
    }
    let n = f.n();
    let op = block_unitary(n)?;
    if perm.len() != op.m() {
        bail!(Domain, "expected a permutation of {} points, got {}", op.m(), perm.len());
    }
    let v = op.lift(&permutation_matrix(perm)?)?;
    let af = f.adjacency_matrix();
    let rest = (&af - &CMatrix::unit(n, 0, 0)).transpose();
    let x = v.conjugate(&op.lift_padded(&af)?);
    let y = v.conjugate(&op.lift_padded(&rest)?);
    Ok(x.hadamard(&y).max_abs() < 1e-10)
}

/// Whether every entry of the conjugated blowup has magnitude `1/(2n−1)`.
pub fn blowup_is_uniform(h: &CMatrix, n: usize, tol: f64) -> bool {
    let (flag, c) = is_uniform(h, tol);
    flag && (c - 1.0 / (2 * n - 1) as f64).abs() <= tol
}

/// `w = (1, ω, …, ω^{m−1})` for `ω = e^{2πi/m}`.
pub fn w_vector(m: usize) -> Vec<C64> {
    (0..m).map(|k| omega_pow(m, k as i64)).collect()
}
