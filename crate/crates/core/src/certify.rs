//! Certificates that a matrix is not unitarily apportionable, and bounds on
//! how close unitary similarity can bring it to uniform.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::linalg::{hermitian_eig, norms, vdot, CMatrix, C64, ONE};

/// A violation must beat the bound by this much (relative to `1 + |c|`).
/// Matrices sitting exactly on the bound, as the equiangular family does at
/// `c = κ`, must not be certified through rounding.
pub const VIOLATION_MARGIN: f64 = 1e-9;

const GRID_ANGLES: usize = 24;
const GRID_RADII: usize = 20;
const REFINE_STARTS: usize = 8;
const REFINE_MAX_ITERS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    TranslationViolation,
    PsdRank,
    /// Inconclusive: no obstruction was found, which proves nothing.
    NoneFound,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// The shift `c` (zero when not applicable).
    pub witness_c: C64,
    /// `|c|` for a translation violation; the rank for a PSD certificate.
    pub lhs: f64,
    /// The bound `|c|` had to exceed; `1` for a PSD certificate.
    pub rhs: f64,
}

impl Certificate {
    pub fn none_found() -> Self {
        Self { kind: CertificateKind::NoneFound, witness_c: C64::new(0.0, 0.0), lhs: 0.0, rhs: 0.0 }
    }

    /// True for every kind except [`CertificateKind::NoneFound`].
    pub fn is_certificate(&self) -> bool {
        self.kind != CertificateKind::NoneFound
    }
}

/// `S/n + √((S/n)² + ‖A − cI‖_F²/(n(n−1)))` with `S = Σ_k |a_kk − c|`.
pub fn translation_rhs(a: &CMatrix, c: C64) -> Result<f64> {
    let n = a.n();
    if n < 2 {
        bail!(Domain, "the translation bound needs n ≥ 2");
    }
    Ok(rhs_unchecked(a, c))
}

fn rhs_unchecked(a: &CMatrix, c: C64) -> f64 {
    let n = a.n() as f64;
    let mut s = 0.0;
    let mut frob2 = 0.0;
    for k in 0..a.n() {
        for j in 0..a.n() {
            let z = if k == j { a[(k, j)] - c } else { a[(k, j)] };
            frob2 += z.norm_sqr();
        }
        s += (a[(k, k)] - c).norm();
    }
    let sn = s / n;
    sn + (sn * sn + frob2 / (n * (n - 1.0))).sqrt()
}

/// Score `|c| − rhs(c)` with the deterministic tie-break key.
#[derive(Clone, Copy)]
struct Probe {
    c: C64,
    score: f64,
}

impl Probe {
    fn new(a: &CMatrix, c: C64) -> Self {
        Self { c, score: c.norm() - rhs_unchecked(a, c) }
    }

    /// Larger score first, then smaller `|c|`, then smaller argument.
    fn better_than(&self, other: &Self) -> bool {
        if self.score != other.score {
            return self.score > other.score;
        }
        let (m1, m2) = (self.c.norm(), other.c.norm());
        if m1 != m2 {
            return m1 < m2;
        }
        self.c.arg() < other.c.arg()
    }

    fn violates(&self, margin: f64) -> bool {
        self.score > margin * (1.0 + self.c.norm())
    }
}

fn certificate_from(a: &CMatrix, p: &Probe) -> Certificate {
    Certificate {
        kind: CertificateKind::TranslationViolation,
        witness_c: p.c,
        lhs: p.c.norm(),
        rhs: rhs_unchecked(a, p.c),
    }
}

/// Compass search on `|c| − rhs(c)` in the complex plane.
fn refine(a: &CMatrix, start: Probe, step0: f64, margin: f64) -> Probe {
    let mut best = start;
    let mut step = step0;
    let floor = 1e-12 * step0.max(1e-300);
    let dirs = [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)];
    for _ in 0..REFINE_MAX_ITERS {
        if step < floor || best.violates(margin) {
            break;
        }
        let mut moved = false;
        for d in dirs {
            let p = Probe::new(a, best.c + d * step);
            if p.score > best.score {
                best = p;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best
}

/// Searches for a shift `c` with `|c| > rhs(c)`, which rules out unitary
/// apportionment. Candidates: the diagonal entries, their mean, and a polar
/// grid of 24 angles × 20 radii up to `4‖A‖_max`; the best few are then refined
/// by compass search. `NoneFound` is inconclusive.
pub fn certify_not_u_apportionable(a: &CMatrix) -> Result<Certificate> {
    certify_with_margin(a, VIOLATION_MARGIN)
}

/// [`certify_not_u_apportionable`] with a caller-chosen strictness margin.
pub fn certify_with_margin(a: &CMatrix, margin: f64) -> Result<Certificate> {
    if !(margin >= 0.0) {
        bail!(Domain, "margin must be nonnegative, got {margin}");
    }
    let n = a.n();
    if n < 2 {
        bail!(Domain, "certification needs n ≥ 2");
    }
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(Certificate::none_found());
    }
    let mut candidates: Vec<C64> = a.diagonal();
    candidates.push(a.trace() / n as f64);
    let rmax = 4.0 * scale;
    for t in 0..GRID_ANGLES {
        let angle = 2.0 * PI * t as f64 / GRID_ANGLES as f64;
        for r in 1..=GRID_RADII {
            candidates.push(C64::from_polar(rmax * r as f64 / GRID_RADII as f64, angle));
        }
    }
    let mut probes: Vec<Probe> = candidates.into_iter().map(|c| Probe::new(a, c)).collect();
    probes.sort_by(|p, q| {
        if p.better_than(q) {
            std::cmp::Ordering::Less
        } else if q.better_than(p) {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
    if probes[0].violates(margin) {
        return Ok(certificate_from(a, &probes[0]));
    }
    let step = rmax / GRID_RADII as f64;
    let mut best: Option<Probe> = None;
    for p in probes.iter().take(REFINE_STARTS) {
        let q = refine(a, *p, step, margin);
        if best.is_none_or(|b| q.better_than(&b)) {
            best = Some(q);
        }
    }
    match best {
        Some(p) if p.violates(margin) => Ok(certificate_from(a, &p)),
        _ => Ok(Certificate::none_found()),
    }
}

/// Outcome of the positive-semidefinite rank test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub rank: usize,
    pub u_apportionable: bool,
    pub eigenvalues: Vec<f64>,
}

impl PsdVerdict {
    pub fn certificate(&self) -> Certificate {
        if self.u_apportionable {
            Certificate::none_found()
        } else {
            Certificate {
                kind: CertificateKind::PsdRank,
                witness_c: C64::new(0.0, 0.0),
                lhs: self.rank as f64,
                rhs: 1.0,
            }
        }
    }
}

/// A positive semidefinite matrix is unitarily apportionable exactly when its
/// rank is at most one. Rank counts eigenvalues above `1e-10·λ_max`.
pub fn psd_apportionability(h: &CMatrix) -> Result<PsdVerdict> {
    psd_apportionability_with_tol(h, PSD_RANK_TOL)
}

/// Relative threshold below which an eigenvalue counts as zero.
pub const PSD_RANK_TOL: f64 = 1e-10;

/// [`psd_apportionability`] with rank threshold `tol·λ_max`.
pub fn psd_apportionability_with_tol(h: &CMatrix, tol: f64) -> Result<PsdVerdict> {
    if !(tol >= 0.0) {
        bail!(Domain, "tolerance must be nonnegative, got {tol}");
    }
    if !h.is_hermitian(1e-10) {
        bail!(Domain, "matrix is not Hermitian");
    }
    let values = hermitian_eig(h)?.values;
    let lmax = values.first().copied().unwrap_or(0.0);
    if let Some(&low) = values.last() {
        if low < -tol * lmax.max(1.0) {
            bail!(Domain, "matrix has negative eigenvalue {low}");
        }
    }
    let rank = values.iter().filter(|&&l| l > tol * lmax && lmax > 0.0).count();
    Ok(PsdVerdict { rank, u_apportionable: rank <= 1, eigenvalues: values })
}

/// Bounds on `u(A) = min_U ‖UAU*‖_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UBounds {
    /// `‖A‖_F / n`.
    pub lower: f64,
    /// `‖A‖_2`.
    pub upper: f64,
    /// `‖A‖_* / n`, only for normal `A`.
    pub normal_upper: Option<f64>,
}

pub fn u_bounds(a: &CMatrix) -> UBounds {
    let r = norms(a);
    let n = a.n() as f64;
    let commutator = &(a * &a.adjoint()) - &(&a.adjoint() * a);
    let normal = commutator.max_abs() < 1e-9;
    UBounds { lower: r.frobenius / n, upper: r.spectral, normal_upper: normal.then_some(r.nuclear / n) }
}

/// `B*B + (cos θ − 1) I` for a frame given by its unit columns. It is
/// unitarily apportionable iff some unitary makes the columns equiangular at angle `θ`.
pub fn equiangular_test_matrix(cols: &[Vec<C64>], theta: f64) -> Result<CMatrix> {
    if cols.is_empty() {
        bail!(Precondition, "frame has no columns");
    }
    if !(theta > 0.0 && theta < PI / 2.0) {
        bail!(Precondition, "angle {theta} is outside (0, π/2)");
    }
    Ok(&gram(cols)? + &CMatrix::identity(cols.len()).scale_real(theta.cos() - 1.0))
}

/// Gram matrix `B*B` of unit columns.
pub fn gram(cols: &[Vec<C64>]) -> Result<CMatrix> {
    let d = cols.first().map_or(0, Vec::len);
    for (j, c) in cols.iter().enumerate() {
        if c.len() != d {
            bail!(Precondition, "column {j} has length {}, expected {d}", c.len());
        }
        if (vdot(c, c).re.sqrt() - 1.0).abs() > 1e-10 {
            bail!(Precondition, "column {j} is not a unit vector");
        }
    }
    Ok(CMatrix::from_fn(cols.len(), |i, j| vdot(&cols[i], &cols[j])))
}

/// `√(‖B*B − I‖_F² / (n(n−1)))`, the constant any equiangular rotation of the frame would have.
pub fn equiangular_kappa(cols: &[Vec<C64>]) -> Result<f64> {
    let n = cols.len() as f64;
    if cols.len() < 2 {
        bail!(Precondition, "need at least two columns");
    }
    let off = &gram(cols)? - &CMatrix::identity(cols.len());
    Ok((off.frobenius().powi(2) / (n * (n - 1.0))).sqrt())
}

/// The equiangular-frame matrix `B*B + (κ − 1)I` at its own constant `κ`.
pub fn equiangular_critical_matrix(cols: &[Vec<C64>]) -> Result<CMatrix> {
    let kappa = equiangular_kappa(cols)?;
    Ok(&gram(cols)? + &CMatrix::identity(cols.len()).scale(ONE * (kappa - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hadamard2, ZERO};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn rhs_hand_values() {
        let a = CMatrix::identity(3).scale_real(0.75);
        assert_eq!(translation_rhs(&a, c(0.75)).unwrap(), 0.0);
        // S = 2, S/n = 1, ‖−I‖_F² / (n(n−1)) = 1
        let v = translation_rhs(&CMatrix::zeros(2), c(1.0)).unwrap();
        assert!((v - (1.0 + 2f64.sqrt())).abs() < 1e-15);
        assert!(translation_rhs(&CMatrix::zeros(1), c(0.0)).is_err());
    }

    #[test]
    fn rhs_at_zero_uses_diagonal_magnitudes() {
        let a = CMatrix::from_real_rows(&[&[1.0, -2.0, 0.5], &[0.0, -3.0, 1.0], &[2.0, 2.0, 0.25]]).unwrap();
        let s: f64 = 1.0 + 3.0 + 0.25;
        let f2: f64 = a.entries().iter().map(|z| z.norm_sqr()).sum();
        let expect = s / 3.0 + ((s / 3.0).powi(2) + f2 / 6.0).sqrt();
        assert!((translation_rhs(&a, ZERO).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn center_of_region_is_certified() {
        let a = CMatrix::identity(3).scale_real(0.75);
        let cert = certify_not_u_apportionable(&a).unwrap();
        assert_eq!(cert.kind, CertificateKind::TranslationViolation);
        assert!(cert.lhs > cert.rhs);
    }

    #[test]
    fn uniform_matrices_are_not_certified() {
        assert!(!certify_not_u_apportionable(&CMatrix::ones(2)).unwrap().is_certificate());
        assert!(!certify_not_u_apportionable(&hadamard2()).unwrap().is_certificate());
        assert!(!certify_not_u_apportionable(&CMatrix::zeros(3)).unwrap().is_certificate());
    }

    #[test]
    fn psd_examples() {
        let v = psd_apportionability(&CMatrix::diag_real(&[0.0, 1.0, 2.0])).unwrap();
        assert_eq!((v.rank, v.u_apportionable), (2, false));
        assert_eq!(v.certificate().kind, CertificateKind::PsdRank);
        assert!(psd_apportionability(&CMatrix::unit(3, 0, 0)).unwrap().u_apportionable);
        let z = psd_apportionability(&CMatrix::zeros(4)).unwrap();
        assert_eq!((z.rank, z.u_apportionable), (0, true));
        assert!(psd_apportionability(&CMatrix::diag_real(&[1.0, -1.0])).is_err());
        assert!(psd_apportionability(&CMatrix::unit(2, 0, 1)).is_err());
    }

    #[test]
    fn bounds_examples() {
        let b = u_bounds(&CMatrix::identity(4));
        assert!((b.lower - 0.5).abs() < 1e-15 && (b.upper - 1.0).abs() < 1e-12);
        assert!((b.normal_upper.unwrap() - 1.0).abs() < 1e-12);
        let h = u_bounds(&hadamard2());
        assert!((h.lower - 1.0).abs() < 1e-15);
        assert!((h.upper - 2f64.sqrt()).abs() < 1e-12);
        assert!((h.normal_upper.unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(u_bounds(&CMatrix::unit(2, 0, 1)).normal_upper.is_none());
    }

    #[test]
    fn equiangular_examples() {
        let e = |k| crate::linalg::basis(2, k);
        let theta = PI / 3.0;
        let m = equiangular_test_matrix(&[e(0), e(1)], theta).unwrap();
        assert!(m.max_diff(&CMatrix::identity(2).scale_real(theta.cos())) < 1e-15);
        let m = equiangular_test_matrix(&[e(0), e(0)], 0.3).unwrap();
        assert_eq!(m[(0, 1)], ONE);
        assert!(equiangular_test_matrix(&[vec![c(2.0), ZERO]], 0.3).is_err());
        assert!(equiangular_test_matrix(&[e(0)], 2.0).is_err());
    }
}
