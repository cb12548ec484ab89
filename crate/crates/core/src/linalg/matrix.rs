use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{bail, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    /// Builds a matrix from `n²` row-major entries, rejecting non-finite values.
    pub fn try_new(n: usize, data: Vec<C64>) -> Result<Self> {
        if n == 0 {
            bail!(Domain, "matrix dimension must be positive");
        }
        if data.len() != n * n {
            bail!(Domain, "expected {} entries for n = {n}, got {}", n * n, data.len());
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            bail!(Domain, "entry ({}, {}) is not finite", k / n, k % n);
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        Self { n, data: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |k, j| if k == j { ONE } else { ZERO })
    }

    /// The all-ones matrix `J_n`.
    pub fn ones(n: usize) -> Self {
        Self::from_fn(n, |_, _| ONE)
    }

    /// The matrix unit `E_kj`.
    pub fn unit(n: usize, k: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(k, j)] = ONE;
        m
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |k, j| if k == j { values[k] } else { ZERO })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(n * n);
        for k in 0..n {
            for j in 0..n {
                data.push(f(k, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            bail!(Domain, "rows must all have length {n}");
        }
        Self::try_new(n, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    /// Outer product `x y*`.
    pub fn outer(x: &[C64], y: &[C64]) -> Self {
        assert_eq!(x.len(), y.len());
        Self::from_fn(x.len(), |k, j| x[k] * y[j].conj())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, k: usize) -> &[C64] {
        &self.data[k * self.n..(k + 1) * self.n]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|k| self[(k, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        for (k, &x) in v.iter().enumerate() {
            self[(k, j)] = x;
        }
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |k, j| self[(j, k)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |k, j| self[(j, k)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|k| self[(k, k)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.n).map(|k| self[(k, k)]).collect()
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect() }
    }

    /// Entrywise inverse; every entry must be nonzero.
    pub fn hadamard_inverse(&self) -> Result<Self> {
        if let Some(k) = self.data.iter().position(|z| *z == ZERO) {
            bail!(Domain, "entry ({}, {}) is zero; no entrywise inverse", k / self.n, k % self.n);
        }
        Ok(self.map(|z| z.inv()))
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.n, other.n);
        Self::from_fn(n * m, |r, c| self[(r / m, c / m)] * other[(r % m, c % m)])
    }

    /// Column-stacking vectorization.
    pub fn vec(&self) -> Vec<C64> {
        (0..self.n).flat_map(|j| (0..self.n).map(move |k| (k, j))).map(|(k, j)| self[(k, j)]).collect()
    }

    /// Block-diagonal `self ⊕ O_extra`.
    pub fn pad_zeros(&self, extra: usize) -> Self {
        let n = self.n;
        Self::from_fn(n + extra, |k, j| if k < n && j < n { self[(k, j)] } else { ZERO })
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        (0..self.n).map(|k| self.row(k).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖self − other‖_max`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.max_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// `‖U*U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).max_diff(&Self::identity(self.n))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    /// Similarity `self · a · self*`.
    pub fn conjugate(&self, a: &Self) -> Self {
        &(self * a) * &self.adjoint()
    }

    /// LU factorization with partial pivoting; returns `(lu, perm, sign)` or `None` when singular.
    fn lu(&self) -> Option<(Vec<C64>, Vec<usize>, f64)> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = self.max_abs();
        if scale == 0.0 {
            return None;
        }
        for col in 0..n {
            let (piv, best) =
                (col..n)
                    .map(|r| (r, a[r * n + col].norm()))
                    .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= scale * 1e-300 {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                }
                perm.swap(piv, col);
                sign = -sign;
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                a[r * n + col] = f;
                for j in col + 1..n {
                    let t = a[col * n + j];
                    a[r * n + j] -= f * t;
                }
            }
        }
        Some((a, perm, sign))
    }

    pub fn determinant(&self) -> C64 {
        match self.lu() {
            None => ZERO,
            Some((a, _, sign)) => {
                let n = self.n;
                (0..n).map(|k| a[k * n + k]).product::<C64>() * sign
            }
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let Some((a, perm, _)) = self.lu() else {
            bail!(Domain, "matrix is singular");
        };
        let mut inv = Self::zeros(n);
        for c in 0..n {
            let mut x: Vec<C64> = (0..n).map(|r| if perm[r] == c { ONE } else { ZERO }).collect();
            for r in 0..n {
                for j in 0..r {
                    let t = a[r * n + j] * x[j];
                    x[r] -= t;
                }
            }
            for r in (0..n).rev() {
                for j in r + 1..n {
                    let t = a[r * n + j] * x[j];
                    x[r] -= t;
                }
                x[r] /= a[r * n + r];
            }
            inv.set_col(c, &x);
        }
        Ok(inv)
    }

    /// Frobenius-norm condition number `‖M‖_F ‖M⁻¹‖_F`.
    pub fn condition_estimate(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.frobenius() * inv.frobenius(),
            Err(_) => f64::INFINITY,
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (k, j): (usize, usize)) -> &C64 {
        &self.data[k * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (k, j): (usize, usize)) -> &mut C64 {
        &mut self.data[k * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        let n = self.n;
        assert_eq!(n, rhs.n, "dimension mismatch");
        let mut out = vec![ZERO; n * n];
        for k in 0..n {
            let orow = &mut out[k * n..(k + 1) * n];
            for (l, &a) in self.row(k).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(rhs.row(l)) {
                    *o += a * b;
                }
            }
        }
        CMatrix { n, data: out }
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        CMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.map(|z| -z)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.n, self.n)?;
        for k in 0..self.n {
            let row: Vec<String> = self.row(k).iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Euclidean norm of a complex vector.
pub fn vnorm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Inner product `x* y`.
pub fn vdot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn basis(n: usize, k: usize) -> Vec<C64> {
    (0..n).map(|i| if i == k { ONE } else { ZERO }).collect()
}

/// Complex sign with `sgn(0) = 1`.
pub fn sgn(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        ONE
    } else {
        z / r
    }
}
