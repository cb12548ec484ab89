//! Eigen- and singular-value routines.
//!
//! Everything here is sized for desk-scale problems: cyclic Jacobi for
//! Hermitian matrices (and one-sided Jacobi for singular values), and a
//! Durand–Kerner root finder on the characteristic polynomial for small
//! general matrices.

use super::matrix::{CMatrix, C64, I, ONE, ZERO};
use crate::error::{bail, Result};

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Largest dimension accepted by [`small_eig`].
pub const SMALL_EIG_MAX_N: usize = 8;

/// Eigen-decomposition `H = V diag(values) V*` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Nonincreasing.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: CMatrix,
}

/// 2×2 unitary `[[c, s], [-s·e^{-iφ}, c·e^{-iφ}]]` that diagonalizes the
/// Hermitian block `[[a, b], [b̄, d]]`.
fn jacobi_rotation(a: f64, d: f64, b: C64) -> [C64; 4] {
    let mag = b.norm();
    let phase = (b / mag).conj();
    let theta = (d - a) / (2.0 * mag);
    let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    [C64::new(c, 0.0), C64::new(s, 0.0), -phase * s, phase * c]
}

/// Right-multiplies columns `p`, `q` of `m` by the 2×2 block `v`.
fn rotate_cols(m: &mut CMatrix, p: usize, q: usize, v: &[C64; 4]) {
    for r in 0..m.n() {
        let (x, y) = (m[(r, p)], m[(r, q)]);
        m[(r, p)] = x * v[0] + y * v[2];
        m[(r, q)] = x * v[1] + y * v[3];
    }
}

/// Left-multiplies rows `p`, `q` of `m` by the adjoint of the 2×2 block `v`.
fn rotate_rows_adj(m: &mut CMatrix, p: usize, q: usize, v: &[C64; 4]) {
    for c in 0..m.n() {
        let (x, y) = (m[(p, c)], m[(q, c)]);
        m[(p, c)] = v[0].conj() * x + v[2].conj() * y;
        m[(q, c)] = v[1].conj() * x + v[3].conj() * y;
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.n();
    let mut s = 0.0;
    for k in 0..n {
        for j in 0..n {
            if k != j {
                s += a[(k, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eig(h: &CMatrix) -> Result<HermitianEig> {
    let defect = h.hermitian_defect();
    if defect >= 1e-10 {
        bail!(Precondition, "matrix is not Hermitian (‖H − H*‖_max = {defect:.3e})");
    }
    let n = h.n();
    // symmetrize exactly so rounding in the input cannot leak into the spectrum
    let mut a = CMatrix::from_fn(n, |k, j| (h[(k, j)] + h[(j, k)].conj()) * 0.5);
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius();
    if scale > 0.0 {
        let mut sweeps = 0;
        while off_diagonal_norm(&a) > JACOBI_TOL * scale {
            if sweeps == JACOBI_MAX_SWEEPS {
                bail!(Numeric, "Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps");
            }
            sweeps += 1;
            for p in 0..n {
                for q in p + 1..n {
                    let b = a[(p, q)];
                    if b.norm() <= f64::MIN_POSITIVE {
                        continue;
                    }
                    let rot = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, b);
                    rotate_cols(&mut a, p, q, &rot);
                    rotate_rows_adj(&mut a, p, q, &rot);
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    a[(p, p)].im = 0.0;
                    a[(q, q)].im = 0.0;
                    rotate_cols(&mut v, p, q, &rot);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, |r, c| v[(r, order[c])]);
    Ok(HermitianEig { values, vectors })
}

/// Singular values (nonincreasing) by one-sided Jacobi on the columns of `a`.
///
/// Unlike square roots of the eigenvalues of `A*A`, this keeps small singular
/// values accurate relative to the largest one, which numerical rank tests need.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let n = a.n();
    let mut g = a.clone();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for r in 0..n {
                    alpha += g[(r, p)].norm_sqr();
                    beta += g[(r, q)].norm_sqr();
                    gamma += g[(r, p)].conj() * g[(r, q)];
                }
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma == ZERO {
                    continue;
                }
                rotated = true;
                let rot = jacobi_rotation(alpha, beta, gamma);
                rotate_cols(&mut g, p, q, &rot);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|c| super::matrix::vnorm(&g.col(c))).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Coefficients `c_0..c_n` (ascending, monic) of `det(λI − A)` by Faddeev–LeVerrier.
pub fn characteristic_polynomial(a: &CMatrix) -> Vec<C64> {
    let n = a.n();
    let mut coeffs = vec![ZERO; n + 1];
    coeffs[n] = ONE;
    let mut m = CMatrix::zeros(n);
    let id = CMatrix::identity(n);
    for k in 1..=n {
        m = &(a * &m) + &id.scale(coeffs[n - k + 1]);
        let am = a * &m;
        coeffs[n - k] = -am.trace() / k as f64;
    }
    coeffs
}

fn horner(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

/// All eigenvalues of a small general matrix (`n ≤ 8`), as the roots of its
/// characteristic polynomial found by Durand–Kerner iteration. Order is unspecified.
pub fn small_eig(a: &CMatrix) -> Result<Vec<C64>> {
    let n = a.n();
    if n > SMALL_EIG_MAX_N {
        bail!(Size, "small_eig supports n ≤ {SMALL_EIG_MAX_N}, got {n}");
    }
    let scale = a.max_abs() * n as f64;
    if scale == 0.0 {
        return Ok(vec![ZERO; n]);
    }
    let coeffs = characteristic_polynomial(&a.scale_real(1.0 / scale));
    if n == 1 {
        return Ok(vec![-coeffs[0] * scale]);
    }
    let radius = 1.0 + coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut z: Vec<C64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    const MAX_ITERS: usize = 5000;
    let mut last_step = f64::INFINITY;
    for _ in 0..MAX_ITERS {
        last_step = 0.0;
        for k in 0..n {
            let mut denom = ONE;
            for j in 0..n {
                if j != k {
                    let d = z[k] - z[j];
                    denom *= if d == ZERO { C64::new(1e-300, 0.0) } else { d };
                }
            }
            let step = horner(&coeffs, z[k]) / denom;
            z[k] -= step;
            last_step = last_step.max(step.norm() / (1.0 + z[k].norm()));
        }
        if last_step < 1e-16 {
            break;
        }
    }
    if !last_step.is_finite() || last_step > 1e-6 {
        bail!(Numeric, "Durand–Kerner did not converge (last relative step {last_step:.3e})");
    }
    Ok(z.into_iter().map(|x| x * scale).collect())
}

/// Eigenvalues of a normal matrix, in the order of a joint eigenbasis.
///
/// Diagonalizes a generic real combination of the Hermitian and skew parts,
/// then reads each eigenvalue off as a Rayleigh quotient. Works at any size,
/// which the DFT multiplicity checks need.
pub fn normal_eig(a: &CMatrix) -> Result<Vec<C64>> {
    let n = a.n();
    let adj = a.adjoint();
    let comm = (&(a * &adj) - &(&adj * a)).max_abs();
    let scale = a.max_abs().max(1.0);
    if comm > 1e-9 * scale * scale * n as f64 {
        bail!(Precondition, "matrix is not normal (‖AA* − A*A‖_max = {comm:.3e})");
    }
    let herm = (a + &adj).scale_real(0.5);
    let skew = (a - &adj).scale(C64::new(0.0, -0.5));
    // golden-ratio weight keeps eigenvalues with different (re, im) apart
    let weight = 0.618_033_988_749_894_9;
    let k = &herm + &skew.scale_real(weight);
    let eig = hermitian_eig(&k)?;
    Ok((0..n)
        .map(|c| {
            let v = eig.vectors.col(c);
            super::matrix::vdot(&v, &a.matvec(&v))
        })
        .collect())
}

/// Largest distance between matched elements of two multisets of equal size.
///
/// Matching is exhaustive for up to 8 elements and greedy nearest-first above that.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets differ in size");
    let n = a.len();
    if n <= 8 {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = f64::INFINITY;
        loop {
            let d = (0..n).map(|k| (a[k] - b[perm[k]]).norm()).fold(0.0, f64::max);
            best = best.min(d);
            if !crate::labelings::next_permutation(&mut perm) {
                break;
            }
        }
        best
    } else {
        let mut used = vec![false; n];
        let mut worst: f64 = 0.0;
        for x in a {
            let (j, d) = (0..n)
                .filter(|&j| !used[j])
                .map(|j| (j, (x - b[j]).norm()))
                .fold((usize::MAX, f64::INFINITY), |acc, y| if y.1 < acc.1 { y } else { acc });
            used[j] = true;
            worst = worst.max(d);
        }
        worst
    }
}

/// Counts eigenvalues snapped to `1, −1, −i, i` (in that order) within `tol`;
/// returns `None` if any eigenvalue is not near one of them.
pub fn fourth_root_multiplicities(values: &[C64], tol: f64) -> Option<[usize; 4]> {
    let targets = [ONE, -ONE, -I, I];
    let mut counts = [0usize; 4];
    for v in values {
        let k = targets.iter().position(|t| (v - t).norm() <= tol)?;
        counts[k] += 1;
    }
    Some(counts)
}
