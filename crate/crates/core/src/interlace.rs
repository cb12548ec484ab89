//! Masked copies of a Hermitian matrix driven by a graceful loop-graph, and
//! the eigenvalue bounds they give.
//!
//! The base mask is `J − A_G ∘ (J + I)`: 1 off the graph, 0 on its non-loop
//! edges and −1 at the loop. Mask `k` is the base mask with both indices
//! shifted by `k`, i.e. `mask_k[i][j] = mask_0[i+k][j+k]` (mod `n`).

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::labelings::{is_graceful, LoopGraph};
use crate::linalg::{hermitian_eig, CMatrix, C64};

#[derive(Clone, Debug)]
pub struct MaskFamily {
    pub base: CMatrix,
    pub graph: LoopGraph,
    /// Entries in {−1, 0, 1}.
    pub masks: Vec<Vec<Vec<i8>>>,
    pub members: Vec<CMatrix>,
    /// Eigenvalues of each member, nonincreasing.
    pub spectra: Vec<Vec<f64>>,
    /// All member eigenvalues together, nonincreasing.
    pub thetas: Vec<f64>,
}

impl MaskFamily {
    pub fn n(&self) -> usize {
        self.base.n()
    }
}

/// `J − A_G ∘ (J + I)`.
pub fn base_mask(g: &LoopGraph) -> Vec<Vec<i8>> {
    g.adjacency()
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, &a)| 1 - (a as i8) * if i == j { 2 } else { 1 }).collect())
        .collect()
}

/// Shifted copy `mask[i][j] = base[(i+k) mod n][(j+k) mod n]`.
pub fn shifted_mask(base: &[Vec<i8>], k: usize) -> Vec<Vec<i8>> {
    let n = base.len();
    (0..n).map(|i| (0..n).map(|j| base[(i + k) % n][(j + k) % n]).collect()).collect()
}

pub fn mask_family(m: &CMatrix, g: &LoopGraph) -> Result<MaskFamily> {
    let n = m.n();
    if n < 3 {
        bail!(Domain, "mask families need n ≥ 3");
    }
    if g.n() != n {
        bail!(Domain, "graph has {} vertices but the matrix is {n}×{n}", g.n());
    }
    if !m.is_hermitian(1e-10) {
        bail!(Domain, "matrix is not Hermitian");
    }
    if !is_graceful(g)? {
        bail!(Domain, "loop-graph is not gracefully labelled");
    }
    let base = base_mask(g);
    let masks: Vec<Vec<Vec<i8>>> = (0..n).map(|k| shifted_mask(&base, k)).collect();
    let members: Vec<CMatrix> =
        masks.iter().map(|mask| CMatrix::from_fn(n, |i, j| m[(i, j)] * mask[i][j] as f64)).collect();
    let spectra = members.iter().map(|mk| hermitian_eig(mk).map(|e| e.values)).collect::<Result<Vec<_>>>()?;
    let mut thetas: Vec<f64> = spectra.iter().flatten().copied().collect();
    thetas.sort_by(|a, b| b.total_cmp(a));
    Ok(MaskFamily { base: m.clone(), graph: g.clone(), masks, members, spectra, thetas })
}

fn require_four(fam: &MaskFamily) -> Result<()> {
    if fam.n() < 4 {
        bail!(Domain, "needs n ≥ 4, got {}", fam.n());
    }
    Ok(())
}

/// `‖Σ_k M_k − (n−2) M‖_max`.
pub fn check_sum_identity(fam: &MaskFamily) -> Result<f64> {
    require_four(fam)?;
    let n = fam.n();
    let mut sum = CMatrix::zeros(n);
    for mk in &fam.members {
        sum = &sum + mk;
    }
    Ok(sum.max_diff(&fam.base.scale(C64::new((n - 2) as f64, 0.0))))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterlaceRow {
    pub ell: usize,
    pub lower: f64,
    pub lambda: f64,
    pub upper: f64,
    pub pass: bool,
}

/// For each `ℓ < n`: `(n/(n−2)) θ_{ℓ+n²−n} ≤ λ_ℓ(M) ≤ (n/(n−2)) θ_ℓ`, checked
/// with slack `1e-9·(1 + |λ_ℓ|)`.
pub fn interlacing_bounds(fam: &MaskFamily) -> Result<Vec<InterlaceRow>> {
    require_four(fam)?;
    let n = fam.n();
    let scale = n as f64 / (n - 2) as f64;
    let lambdas = hermitian_eig(&fam.base)?.values;
    Ok(lambdas
        .iter()
        .enumerate()
        .map(|(ell, &lambda)| {
            let lower = scale * fam.thetas[ell + n * n - n];
            let upper = scale * fam.thetas[ell];
            let slack = 1e-9 * (1.0 + lambda.abs());
            InterlaceRow { ell, lower, lambda, upper, pass: lower - slack <= lambda && lambda <= upper + slack }
        })
        .collect())
}
