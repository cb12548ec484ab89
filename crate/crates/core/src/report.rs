use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Uniform,
    Inconclusive,
    /// A closed-form result rules out apportionment; never set from numerics alone.
    InfeasibleByTheorem,
}

/// Outcome of an apportionment attempt.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ApportionReport {
    pub status: Status,
    /// The apportioning matrix (`U` or `M`).
    pub transform: CMatrix,
    /// `transform · A · transform⁻¹`.
    pub result: CMatrix,
    pub kappa: f64,
    /// Largest deviation of an entry magnitude from `kappa`.
    pub residual: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Which closed-form result justified `InfeasibleByTheorem`, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<String>,
}

impl ApportionReport {
    /// Report for a construction that is uniform by design: `kappa` is the
    /// expected constant and `residual` the worst deviation from it.
    pub(crate) fn constructed(transform: CMatrix, result: CMatrix, kappa: f64, tol: f64) -> Self {
        let residual = result.entries().iter().map(|z| (z.norm() - kappa).abs()).fold(0.0, f64::max);
        let status = if residual <= tol * (kappa + 1.0) { Status::Uniform } else { Status::Inconclusive };
        Self { status, transform, result, kappa, residual, iterations: 0, seed: 0, theorem: None }
    }

    pub(crate) fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}
