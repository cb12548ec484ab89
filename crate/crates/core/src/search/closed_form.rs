//! Exact tests and constructions: the DFT membership test, the
//! decomposition identity, 2×2 spectra and uniform matrices with prescribed spectra.

use std::f64::consts::PI;

use crate::error::{bail, Result};
use crate::linalg::{dft, hadamard2, is_uniform, vnorm, CMatrix, C64, ONE, ZERO};
use crate::report::ApportionReport;

/// Relative size below which DFT components of `vec(B ∘ B̄)` count as zero.
pub const ADDITIVE_TOL: f64 = 1e-9;
const SINGULAR_COND: f64 = 1e12;

fn similarity(a: &CMatrix, m: &CMatrix) -> Result<CMatrix> {
    if a.n() != m.n() {
        bail!(Domain, "A is {0}×{0} but M is {1}×{1}", a.n(), m.n());
    }
    if m.condition_estimate() >= SINGULAR_COND {
        bail!(Domain, "M is singular or too ill-conditioned");
    }
    Ok(&(m * a) * &m.inverse()?)
}

/// `M` apportions `A` iff the DFT of `vec((MAM⁻¹) ∘ conj(MAM⁻¹))` is supported
/// on its zeroth component.
pub fn additive_apport_test(a: &CMatrix, m: &CMatrix) -> Result<bool> {
    let b = similarity(a, m)?;
    let v: Vec<C64> = b.hadamard(&b.conj()).vec();
    let norm = vnorm(&v);
    if norm == 0.0 {
        return Ok(true);
    }
    let fv = dft(v.len()).matvec(&v);
    Ok(fv.iter().skip(1).all(|z| z.norm() < ADDITIVE_TOL * norm))
}

/// `‖A − κ² M⁻¹ (conj(MAM⁻¹))^{∘−1} M‖_max`, small exactly when `M`
/// apportions `A` with constant `κ`.
pub fn verify_decomposition(a: &CMatrix, m: &CMatrix, kappa: f64) -> Result<f64> {
    let b = similarity(a, m)?;
    let recip = b.conj().hadamard_inverse()?;
    let rebuilt = (&(&m.inverse()? * &recip) * m).scale_real(kappa * kappa);
    Ok(a.max_diff(&rebuilt))
}

/// Whether the spectrum `{1, r}` belongs to a uniform 2×2 matrix, with a witness.
pub fn realizable_real_pair(r: f64) -> (bool, Option<CMatrix>) {
    if r.abs() <= 1e-12 {
        (true, Some(CMatrix::ones(2).scale_real(0.5)))
    } else if (r + 1.0).abs() <= 1e-12 {
        (true, Some(hadamard2().scale_real(1.0 / 2f64.sqrt())))
    } else {
        (false, None)
    }
}

/// Whether `{λ, λ}` is the spectrum of a uniform 2×2 matrix; only `λ = 0` is.
pub fn constant_spectrum_check(lambda: C64) -> bool {
    lambda.norm() <= 1e-12
}

/// `M diag(1, c) M⁻¹` for `M = [[x, y], [z, (1 + yz)/x]]` (determinant one).
pub fn similarity_2x2(c: C64, x: C64, y: C64, z: C64) -> Result<CMatrix> {
    if x == ZERO {
        bail!(Domain, "x must be nonzero");
    }
    let d = ONE - c;
    let yz = y * z;
    CMatrix::from_rows(&[vec![ONE + d * yz, -d * x * y], vec![d * (ONE + yz) * z / x, c - d * yz]])
}

/// Apportions `diag(2, 0)` with `M = [[a, 1/a], [a, e^{iθ}/a]]`; the constant
/// is `1/|sin(θ/2)|`.
pub fn example_family(a: f64, theta: f64) -> Result<ApportionReport> {
    if a == 0.0 || !a.is_finite() {
        bail!(Domain, "a must be a nonzero real");
    }
    if !(theta > 0.0 && theta < 2.0 * PI) {
        bail!(Domain, "θ = {theta} must lie strictly between 0 and 2π");
    }
    let m = CMatrix::from_rows(&[
        vec![C64::new(a, 0.0), C64::new(1.0 / a, 0.0)],
        vec![C64::new(a, 0.0), C64::from_polar(1.0 / a, theta)],
    ])?;
    let diag = CMatrix::diag_real(&[2.0, 0.0]);
    let result = similarity(&diag, &m)?;
    let kappa = 1.0 / (theta / 2.0).sin().abs();
    Ok(ApportionReport::constructed(m, result, kappa, 1e-10))
}

fn require_uniform(b: &CMatrix, what: &str) -> Result<()> {
    if !is_uniform(b, 1e-9).0 {
        bail!(Domain, "{what} is not uniform");
    }
    Ok(())
}

/// `(F_r ⊗ I_n)(E_00 ⊗ B)(F_r ⊗ I_n)*`: uniform, with spectrum `spec(B)` plus
/// `(r−1)n` zeros.
pub fn spectra_zero_pad(b: &CMatrix, r: usize) -> Result<CMatrix> {
    require_uniform(b, "B")?;
    if r == 0 {
        bail!(Domain, "r must be positive");
    }
    let f = dft(r).kron(&CMatrix::identity(b.n()));
    let inner = CMatrix::unit(r, 0, 0).kron(b);
    Ok(f.conjugate(&inner))
}

/// `B1 ⊗ B2` for uniform factors; its spectrum is the pairwise products.
pub fn kron_uniform(b1: &CMatrix, b2: &CMatrix) -> Result<CMatrix> {
    require_uniform(b1, "first factor")?;
    require_uniform(b2, "second factor")?;
    Ok(b1.kron(b2))
}
