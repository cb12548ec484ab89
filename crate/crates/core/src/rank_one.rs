//! Unitary apportionment of rank-one matrices.
//!
//! A rank-one `A = xy*` is first brought to `γ e_0 (α e_0ᵀ + β e_1ᵀ)` by two
//! Householder reflections. A DFT finishes the job when `α = 0` or `β = 0`;
//! otherwise a unitary whose first two columns are `𝟙/√n` and a tailored
//! `u_1` makes `u_0 (u_0 + (β/α) u_1)*` uniform.

use serde::Serialize;

use crate::error::{bail, Result};
use crate::linalg::{basis, dft, extend_to_unitary, householder, sgn, singular_values, vnorm, CMatrix, C64, I, ZERO};
use crate::report::ApportionReport;

/// Largest accepted ratio `σ_1/σ_0` for a matrix to count as rank one.
pub const RANK_TOL: f64 = 1e-10;
/// Relative size below which `λ` or `ẑ` is treated as zero.
pub const BRANCH_TOL: f64 = 1e-12;

/// Which closed form finishes the apportionment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `tr A = 0`: the DFT alone.
    Traceless,
    /// `‖A‖_F = |tr A|`: the DFT alone, result `(‖A‖_F/n) J`.
    TraceNorm,
    /// Both `α, β > 0`: the two-column construction.
    General,
}

/// `γ e_0 (α e_0ᵀ + β e_1ᵀ)` together with the unitary `u = H_2 H_1` reaching it.
#[derive(Clone, Debug)]
pub struct RankOneCanonical {
    pub gamma: C64,
    pub alpha: f64,
    pub beta: f64,
    pub u: CMatrix,
}

impl RankOneCanonical {
    pub fn matrix(&self) -> CMatrix {
        let n = self.u.n();
        let mut m = CMatrix::zeros(n);
        m[(0, 0)] = self.gamma * self.alpha;
        if n > 1 {
            m[(0, 1)] = self.gamma * self.beta;
        }
        m
    }

    pub fn branch(&self) -> Branch {
        let scale = self.alpha.hypot(self.beta);
        if self.alpha <= BRANCH_TOL * scale {
            Branch::Traceless
        } else if self.beta <= BRANCH_TOL * scale {
            Branch::TraceNorm
        } else {
            Branch::General
        }
    }
}

/// Numerical rank, capped at 2: 0 for the zero matrix, 1 if `σ_1/σ_0 < RANK_TOL`.
pub fn rank_at_most_two(a: &CMatrix) -> usize {
    let sv = singular_values(a);
    let s0 = sv.first().copied().unwrap_or(0.0);
    if s0 == 0.0 {
        0
    } else if sv.get(1).is_none_or(|&s1| s1 / s0 < RANK_TOL) {
        1
    } else {
        2
    }
}

fn require_rank_one(a: &CMatrix) -> Result<()> {
    match rank_at_most_two(a) {
        1 => Ok(()),
        0 => bail!(Domain, "the zero matrix has rank 0"),
        _ => bail!(Domain, "matrix has numerical rank at least 2"),
    }
}

/// `A = x y*` with `‖x‖ = 1`: `x` is the normalized largest column and `y = A* x`.
pub fn factor_rank_one(a: &CMatrix) -> Result<(Vec<C64>, Vec<C64>)> {
    require_rank_one(a)?;
    let n = a.n();
    let j = (0..n).map(|j| (j, vnorm(&a.col(j)))).fold((0, -1.0), |best, c| if c.1 > best.1 { c } else { best }).0;
    let col = a.col(j);
    let r = vnorm(&col);
    let x: Vec<C64> = col.iter().map(|z| z / r).collect();
    let y = a.adjoint().matvec(&x);
    Ok((x, y))
}

pub fn canonical_rank_one(a: &CMatrix) -> Result<RankOneCanonical> {
    let n = a.n();
    let (x, y) = factor_rank_one(a)?;
    let e0 = basis(n, 0);
    let h1 = householder(&x, &e0)?;
    let z = h1.matvec(&y);
    let z0 = z[0];
    let mut zhat = z.clone();
    zhat[0] = ZERO;
    let beta = vnorm(&zhat);
    let (h2, beta) = if n == 1 || beta < BRANCH_TOL * vnorm(&z) {
        (CMatrix::identity(n), 0.0)
    } else {
        let target: Vec<C64> = basis(n, 1).iter().map(|e| e * sgn(z0) * beta).collect();
        let gap: Vec<C64> = zhat.iter().zip(&target).map(|(p, q)| p - q).collect();
        if vnorm(&gap) <= BRANCH_TOL * beta {
            (CMatrix::identity(n), beta)
        } else {
            (householder(&zhat, &target)?, beta)
        }
    };
    Ok(RankOneCanonical { gamma: sgn(z0.conj()), alpha: z0.norm(), beta, u: &h2 * &h1 })
}

/// Coefficients `(a, b)` of the odd-dimension second column for ratio `r = β/α > 0`.
///
/// `a = (1 − √(r²+1)) / ((n−1)√n r)` is evaluated as `−r / ((1 + √(r²+1))(n−1)√n)`,
/// which is the same number without the cancellation at small `r`.
pub fn odd_branch_coefficients(n: usize, r: f64) -> (f64, f64) {
    let nf = n as f64;
    let a = -r / ((1.0 + r.hypot(1.0)) * (nf - 1.0) * nf.sqrt());
    let b = (1.0 / (nf - 1.0) - nf * a * a).max(0.0).sqrt();
    (a, b)
}

/// The second column `u_1`, orthogonal to `𝟙/√n`, for which `u_0 + r u_1` is uniform.
pub fn second_column(n: usize, r: f64) -> Vec<C64> {
    let nf = n as f64;
    if n.is_multiple_of(2) {
        let s = 1.0 / nf.sqrt();
        (0..n).map(|k| if k % 2 == 0 { I * s } else { -I * s }).collect()
    } else {
        let (a, b) = odd_branch_coefficients(n, r);
        (0..n)
            .map(|k| match k {
                0 => C64::new((1.0 - nf) * a, 0.0),
                k if k % 2 == 1 => C64::new(a, b),
                _ => C64::new(a, -b),
            })
            .collect()
    }
}

/// Unitary `V` with `V A V*` uniform at `κ = ‖A‖_F/n`, for any `A` of rank at most one.
pub fn apportion_rank_one(a: &CMatrix) -> Result<ApportionReport> {
    let n = a.n();
    let kappa = a.frobenius() / n as f64;
    let rank = rank_at_most_two(a);
    if rank == 0 || n == 1 {
        let id = CMatrix::identity(n);
        return Ok(ApportionReport::constructed(id, a.clone(), kappa, 1e-9));
    }
    if rank > 1 {
        bail!(Domain, "matrix has numerical rank at least 2");
    }
    let canon = canonical_rank_one(a)?;
    let outer = match canon.branch() {
        Branch::Traceless | Branch::TraceNorm => dft(n),
        Branch::General => {
            let s = 1.0 / (n as f64).sqrt();
            let u0 = vec![C64::new(s, 0.0); n];
            let u1 = second_column(n, canon.beta / canon.alpha);
            extend_to_unitary(&[u0, u1], n)?
        }
    };
    let v = &outer * &canon.u;
    let b = v.conjugate(a);
    Ok(ApportionReport::constructed(v, b, kappa, 1e-9))
}

/// The exact uniform matrix produced on the `tr A = 0` branch: `(B)_{kj} = γ‖A‖_F ω^{−j}/n`.
pub fn traceless_closed_form(n: usize, gamma: C64, frobenius: f64) -> CMatrix {
    CMatrix::from_fn(n, |_, j| gamma * crate::linalg::omega_pow(n, -(j as i64)) * frobenius / n as f64)
}
