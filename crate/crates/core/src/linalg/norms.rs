use serde::{Deserialize, Serialize};

use super::eig::hermitian_eig;
use super::matrix::CMatrix;
use crate::error::{bail, Result};

/// Default relative tolerance for uniformity checks.
pub const DEFAULT_UNIFORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub max: f64,
    pub frobenius: f64,
    pub spectral: f64,
    pub nuclear: f64,
}

/// Max, Frobenius, spectral and nuclear norms. Singular values are the
/// square roots of the eigenvalues of `A*A`.
pub fn norms(a: &CMatrix) -> NormReport {
    let gram = &a.adjoint() * a;
    let sv: Vec<f64> = hermitian_eig(&gram)
        .expect("A*A is Hermitian by construction")
        .values
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .collect();
    NormReport {
        max: a.max_abs(),
        frobenius: a.frobenius(),
        spectral: sv.first().copied().unwrap_or(0.0),
        nuclear: sv.iter().sum(),
    }
}

/// `(flag, c)` where `c` is the mean entry magnitude and `flag` holds iff
/// every `|a_kj|` is within `tol·(c + 1)` of `c`.
pub fn is_uniform(a: &CMatrix, tol: f64) -> (bool, f64) {
    let (flag, c, _) = uniform_deviation(a, tol);
    (flag, c)
}

/// Like [`is_uniform`], also returning the largest deviation `max | |a_kj| − c |`.
pub fn uniform_deviation(a: &CMatrix, tol: f64) -> (bool, f64, f64) {
    let mags: Vec<f64> = a.entries().iter().map(|z| z.norm()).collect();
    let c = mags.iter().sum::<f64>() / mags.len() as f64;
    let dev = mags.iter().map(|m| (m - c).abs()).fold(0.0, f64::max);
    (dev <= tol * (c + 1.0), c, dev)
}

/// `max|a_ij| / min|a_ij|`; infinite when zero and nonzero entries mix.
pub fn uniformity_ratio(a: &CMatrix) -> Result<f64> {
    let max = a.max_abs();
    if max == 0.0 {
        bail!(Domain, "uniformity ratio is undefined for the zero matrix");
    }
    let min = a.entries().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::special::hadamard2;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn identity_norms() {
        let r = norms(&CMatrix::identity(3));
        assert!(close(r.max, 1.0) && close(r.frobenius, 3f64.sqrt()));
        assert!(close(r.spectral, 1.0) && close(r.nuclear, 3.0));
    }

    #[test]
    fn ones_norms() {
        let r = norms(&CMatrix::ones(2));
        assert!(close(r.max, 1.0) && close(r.frobenius, 2.0));
        assert!(close(r.spectral, 2.0) && close(r.nuclear, 2.0));
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(is_uniform(&CMatrix::ones(3), 1e-9), (true, 1.0));
        let ex = CMatrix::from_real_rows(&[&[1.0, 1.0, -1.0], &[1.0, 1.0, 1.0], &[-1.0, -1.0, 1.0]]).unwrap();
        assert_eq!(is_uniform(&ex, 1e-9), (true, 1.0));
        assert!(!is_uniform(&CMatrix::identity(2), 1e-9).0);
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(uniformity_ratio(&hadamard2()).unwrap(), 1.0);
        assert_eq!(uniformity_ratio(&CMatrix::identity(2)).unwrap(), f64::INFINITY);
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert_eq!(uniformity_ratio(&a).unwrap(), 4.0);
        assert!(uniformity_ratio(&CMatrix::zeros(2)).is_err());
    }
}
