//! Numerical apportionment over `U(n)` and `SL(n)`, the closed-form 2×2
//! results that bound what search can find, and constructions of uniform
//! matrices with prescribed spectra.

mod closed_form;
mod optimize;

pub use closed_form::{
    additive_apport_test, constant_spectrum_check, example_family, kron_uniform, realizable_real_pair, similarity_2x2,
    spectra_zero_pad, verify_decomposition, ADDITIVE_TOL,
};
pub use optimize::{random_unitary, SearchOptions};

use crate::certify::{certify_not_u_apportionable, psd_apportionability};
use crate::error::{bail, Result};
use crate::linalg::{is_uniform, small_eig, uniform_deviation, uniformity_ratio, CMatrix, C64};
use crate::report::{ApportionReport, Status};
use optimize::{is_zero_matrix, multi_restart, Group, Problem, Surrogate};

/// Search tolerance for declaring a numerical result uniform.
pub const SEARCH_TOL: f64 = 1e-6;

fn trivial_report(a: &CMatrix, seed: u64) -> ApportionReport {
    let n = a.n();
    let kappa = a.frobenius() / n as f64;
    ApportionReport::constructed(CMatrix::identity(n), a.clone(), kappa, 1e-12).with_seed(seed)
}

/// Closed-form obstructions to similarity apportionment.
pub fn gl_obstruction(a: &CMatrix) -> Option<String> {
    let n = a.n();
    if n < 2 || is_zero_matrix(a) {
        return None;
    }
    let d = a[(0, 0)];
    let scalar = CMatrix::identity(n).scale(d);
    if a.max_diff(&scalar) == 0.0 {
        return Some("a nonzero scalar matrix is similar only to itself".into());
    }
    if n != 2 {
        return None;
    }
    let ev = small_eig(a).ok()?;
    let (l0, l1) = if ev[0].norm() >= ev[1].norm() { (ev[0], ev[1]) } else { (ev[1], ev[0]) };
    let scale = a.max_abs();
    if (l0 - l1).norm() <= 1e-12 * scale {
        return Some("a 2×2 uniform matrix with a repeated eigenvalue has that eigenvalue zero".into());
    }
    let r = l1 / l0;
    let is = |x: f64| (r - C64::new(x, 0.0)).norm() <= 1e-12;
    if r.im.abs() <= 1e-12 && !is(0.0) && !is(-1.0) {
        return Some(format!(
            "spectrum proportional to {{1, {:.6}}}: a real ratio r is realizable only for r ∈ {{0, −1}}",
            r.re
        ));
    }
    None
}

/// Closed-form obstructions to unitary apportionment: the similarity ones,
/// the semidefinite rank test and a translation certificate.
pub fn u_obstruction(a: &CMatrix) -> Option<String> {
    if let Some(t) = gl_obstruction(a) {
        return Some(t);
    }
    if a.n() < 2 || is_zero_matrix(a) {
        return None;
    }
    if a.is_hermitian(1e-10) {
        for sign in [1.0, -1.0] {
            if let Ok(v) = psd_apportionability(&a.scale_real(sign)) {
                if !v.u_apportionable {
                    return Some(format!("semidefinite of rank {} > 1", v.rank));
                }
            }
        }
    }
    match certify_not_u_apportionable(a) {
        Ok(c) if c.is_certificate() => Some(format!(
            "translation bound violated at c = {}{:+}i ({} > {})",
            c.witness_c.re, c.witness_c.im, c.lhs, c.rhs
        )),
        _ => None,
    }
}

fn finish(mut report: ApportionReport, obstruction: Option<String>) -> ApportionReport {
    if let Some(t) = obstruction {
        report.status = Status::InfeasibleByTheorem;
        report.theorem = Some(t);
    }
    report
}

/// Minimizes `‖UAU*‖_max` over unitaries. `kappa = ‖A‖_F/n`; `residual` is
/// the largest `| |b_kj| − kappa |`.
pub fn search_unitary(a: &CMatrix, opts: &SearchOptions) -> Result<ApportionReport> {
    let n = a.n();
    let frob = a.frobenius();
    if n == 1 || frob == 0.0 {
        return Ok(trivial_report(a, opts.seed));
    }
    let problem = Problem { a: normalized(a), group: Group::Unitary, surrogate: Surrogate::PowerMean };
    let target = 1.0 / n as f64;
    let run = multi_restart(&problem, opts, |b| deviation_from(b, target))?;
    let result = run.transform.conjugate(a);
    let kappa = frob / n as f64;
    let residual = deviation_from(&result, kappa);
    let status = if is_uniform(&result, SEARCH_TOL).0 { Status::Uniform } else { Status::Inconclusive };
    let report = ApportionReport {
        status,
        transform: run.transform,
        result,
        kappa,
        residual,
        iterations: run.iterations,
        seed: opts.seed,
        theorem: None,
    };
    Ok(finish(report, u_obstruction(a)))
}

/// Searches for `M` with `det M = 1` and `MAM⁻¹` uniform. `kappa` is the mean
/// entry magnitude of the result and `residual` the largest deviation from it.
pub fn search_gl(a: &CMatrix, opts: &SearchOptions) -> Result<ApportionReport> {
    let n = a.n();
    let frob = a.frobenius();
    if n == 1 || frob == 0.0 {
        return Ok(trivial_report(a, opts.seed));
    }
    let problem = Problem { a: normalized(a), group: Group::Special, surrogate: Surrogate::PowerMean };
    let run = multi_restart(&problem, opts, |b| uniform_deviation(b, 0.0).2)?;
    let result = &(&run.transform * a) * &run.transform.inverse()?;
    let (flag, kappa, residual) = uniform_deviation(&result, SEARCH_TOL);
    let report = ApportionReport {
        status: if flag { Status::Uniform } else { Status::Inconclusive },
        transform: run.transform,
        result,
        kappa,
        residual,
        iterations: run.iterations,
        seed: opts.seed,
        theorem: None,
    };
    Ok(finish(report, gl_obstruction(a)))
}

/// Estimates `min_U ur(UAU*)`, the smallest achievable ratio of largest to
/// smallest entry magnitude. At least 1.
pub fn uar_estimate(a: &CMatrix, opts: &SearchOptions) -> Result<f64> {
    let frob = a.frobenius();
    if frob == 0.0 {
        bail!(Domain, "the uniformity ratio is undefined for the zero matrix");
    }
    if a.n() == 1 {
        return Ok(1.0);
    }
    let problem = Problem { a: normalized(a), group: Group::Unitary, surrogate: Surrogate::LogRatio };
    let run = multi_restart(&problem, opts, |b| uniformity_ratio(b).unwrap_or(f64::INFINITY))?;
    Ok(uniformity_ratio(&run.transform.conjugate(a))?.max(1.0))
}

/// `A` divided by `‖A‖_F` and by the phase of its first largest entry, so
/// that `γA` and `A` are searched identically (up to rounding).
fn normalized(a: &CMatrix) -> CMatrix {
    let max = a.max_abs();
    let pivot = a.entries().iter().find(|z| z.norm() == max).copied().unwrap_or(C64::new(1.0, 0.0));
    a.scale(pivot.conj() / (pivot.norm() * a.frobenius()))
}

fn deviation_from(b: &CMatrix, kappa: f64) -> f64 {
    b.entries().iter().map(|z| (z.norm() - kappa).abs()).fold(0.0, f64::max)
}
