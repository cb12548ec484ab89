use std::f64::consts::PI;

use super::matrix::{basis, vdot, vnorm, CMatrix, C64, ONE, ZERO};
use crate::error::{bail, Result};

/// Primitive `n`th root of unity `exp(2πi/n)`.
pub fn root_of_unity(n: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI / n as f64)
}

/// `ω^e` with the exponent reduced mod `n` before evaluation, for accuracy.
pub fn omega_pow(n: usize, e: i64) -> C64 {
    let r = e.rem_euclid(n as i64);
    C64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
}

/// Unitary DFT matrix, `(F_n)_{kj} = ω^{kj}/√n`.
pub fn dft(n: usize) -> CMatrix {
    let s = 1.0 / (n as f64).sqrt();
    CMatrix::from_fn(n, |k, j| omega_pow(n, (k * j) as i64) * s)
}

/// Multiplicities of `1, −1, −i, i` as eigenvalues of the DFT with kernel
/// `e^{−2πi kj/n}/√n`, i.e. `conj(dft(n))`. For [`dft`] itself the `±i` counts swap.
pub fn dft_multiplicities(n: usize) -> [usize; 4] {
    let k = n / 4;
    match n % 4 {
        0 => [k + 1, k, k, k.saturating_sub(1)],
        1 => [k + 1, k, k, k],
        2 => [k + 1, k + 1, k, k],
        _ => [k + 1, k + 1, k + 1, k],
    }
}

/// Cyclic shift with `C e_i = e_{(i+1) mod n}`.
pub fn cyclic_shift(n: usize) -> CMatrix {
    CMatrix::from_fn(n, |k, j| if k == (j + 1) % n { ONE } else { ZERO })
}

/// The 2×2 Hadamard matrix `[[1, 1], [1, −1]]`.
pub fn hadamard2() -> CMatrix {
    CMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).expect("static matrix")
}

/// Unitary `U` with `U v = w`.
///
/// When `w*v` is real this is exactly the Householder matrix
/// `I − u u*/(u* v)` with `u = v − w`. Otherwise that matrix is not unitary,
/// so the reflector is built toward `e^{iφ} w` (φ = arg w*v) and followed by
/// a phase rotation on the `w` direction; vectors orthogonal to both `v` and
/// `w` stay fixed in either case.
pub fn householder(v: &[C64], w: &[C64]) -> Result<CMatrix> {
    let n = v.len();
    if w.len() != n || n == 0 {
        bail!(Precondition, "vectors must have the same positive length");
    }
    let (nv, nw) = (vnorm(v), vnorm(w));
    if (nv - nw).abs() > 1e-10 * nv.max(1.0) {
        bail!(Precondition, "‖v‖ = {nv} differs from ‖w‖ = {nw}");
    }
    let diff: Vec<C64> = v.iter().zip(w).map(|(a, b)| a - b).collect();
    if vnorm(&diff) <= 1e-15 * nv.max(1.0) {
        return Ok(CMatrix::identity(n));
    }
    let wv = vdot(w, v);
    let real_inner = wv.im.abs() <= 1e-14 * nv * nv;
    let (phase, target): (C64, Vec<C64>) = if real_inner || wv == ZERO {
        (ONE, w.to_vec())
    } else {
        let p = wv / wv.norm();
        (p, w.iter().map(|z| z * p).collect())
    };
    let u: Vec<C64> = v.iter().zip(&target).map(|(a, b)| a - b).collect();
    let reflector = if vnorm(&u) <= 1e-15 * nv.max(1.0) {
        CMatrix::identity(n)
    } else {
        let denom = vdot(&u, v);
        let outer = CMatrix::outer(&u, &u);
        &CMatrix::identity(n) - &outer.scale(denom.inv())
    };
    if phase == ONE {
        return Ok(reflector);
    }
    let what: Vec<C64> = w.iter().map(|z| z / nw).collect();
    let rot = &CMatrix::identity(n) + &CMatrix::outer(&what, &what).scale(phase.conj() - ONE);
    Ok(&rot * &reflector)
}

/// Completes orthonormal columns to an `n × n` unitary by modified
/// Gram–Schmidt against the standard basis.
pub fn extend_to_unitary(cols: &[Vec<C64>], n: usize) -> Result<CMatrix> {
    if cols.len() > n {
        bail!(Precondition, "{} columns cannot fit in dimension {n}", cols.len());
    }
    for (a, x) in cols.iter().enumerate() {
        if x.len() != n {
            bail!(Precondition, "column {a} has length {}, expected {n}", x.len());
        }
        for (b, y) in cols.iter().enumerate().skip(a) {
            let expect = if a == b { ONE } else { ZERO };
            if (vdot(x, y) - expect).norm() > 1e-10 {
                bail!(Precondition, "columns {a} and {b} are not orthonormal");
            }
        }
    }
    let mut basis_cols: Vec<Vec<C64>> = cols.to_vec();
    for k in 0..n {
        if basis_cols.len() == n {
            break;
        }
        let mut cand = basis(n, k);
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for q in &basis_cols {
                let proj = vdot(q, &cand);
                for (c, qi) in cand.iter_mut().zip(q) {
                    *c -= proj * qi;
                }
            }
        }
        let r = vnorm(&cand);
        if r < 1e-8 {
            continue;
        }
        basis_cols.push(cand.into_iter().map(|z| z / r).collect());
    }
    if basis_cols.len() != n {
        bail!(Numeric, "could not complete a basis");
    }
    let mut u = CMatrix::zeros(n);
    for (j, c) in basis_cols.iter().enumerate() {
        u.set_col(j, c);
    }
    Ok(u)
}
