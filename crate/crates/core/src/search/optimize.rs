//! Seeded multi-restart descent over `U(n)` and `SL(n)`.
//!
//! Each restart anneals a smoothed max (power means with `p` doubling from 2
//! to 64) with finite-difference gradients and backtracking Cayley or
//! multiplicative steps, then polishes with Levenberg–Marquardt on the
//! squared-magnitude residuals `|b_kj|²/mean|b|² − 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::linalg::{vdot, vnorm, CMatrix, C64, ONE, ZERO};

pub(crate) const P_SCHEDULE: [f64; 6] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
const FD_STEP: f64 = 1e-6;
const STEP_FLOOR: f64 = 1e-12;
const LM_FD_STEP: f64 = 1e-7;
const LM_MAX_ITERS: usize = 200;
pub(crate) const COND_CAP: f64 = 1e8;
const COND_PENALTY: f64 = 1e-8;

/// Restart and iteration budget shared by every numerical search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub restarts: usize,
    /// Descent iterations per restart, split evenly over the `p` schedule.
    pub iters: usize,
    pub seed: u64,
    /// Worker threads for restarts; 0 uses the global pool.
    pub jobs: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { restarts: 8, iters: 240, seed: 0, jobs: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Group {
    Unitary,
    /// Determinant-one matrices with a conditioning cap.
    Special,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Surrogate {
    /// `M_p / M_2` of the entry magnitudes.
    PowerMean,
    /// `log M_p − log M_{−p}`.
    LogRatio,
}

pub(crate) struct Problem {
    /// Input scaled to unit Frobenius norm.
    pub a: CMatrix,
    pub group: Group,
    pub surrogate: Surrogate,
}

/// One restart's outcome; `score` is what restarts are ranked by.
#[derive(Clone, Debug)]
pub(crate) struct Run {
    pub transform: CMatrix,
    pub score: f64,
    pub iterations: usize,
}

impl Problem {
    fn n(&self) -> usize {
        self.a.n()
    }

    fn generator_count(&self) -> usize {
        let n = self.n();
        match self.group {
            Group::Unitary => n * n,
            Group::Special => 2 * n * n,
        }
    }

    /// Real basis of the tangent directions: skew-Hermitian matrices, or all
    /// complex matrices (the determinant is fixed afterwards).
    fn generator(&self, q: usize) -> CMatrix {
        let n = self.n();
        let mut g = CMatrix::zeros(n);
        match self.group {
            Group::Unitary => {
                let (k, j) = (q / n, q % n);
                if k == j {
                    g[(k, k)] = C64::new(0.0, 1.0);
                } else if k < j {
                    g[(k, j)] = ONE;
                    g[(j, k)] = -ONE;
                } else {
                    g[(k, j)] = C64::new(0.0, 1.0);
                    g[(j, k)] = C64::new(0.0, 1.0);
                }
            }
            Group::Special => {
                let (cell, imag) = (q / 2, q % 2 == 1);
                g[(cell / n, cell % n)] = if imag { C64::new(0.0, 1.0) } else { ONE };
            }
        }
        g
    }

    fn combine(&self, coeffs: &[f64]) -> CMatrix {
        let n = self.n();
        let mut x = CMatrix::zeros(n);
        for (q, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                x = &x + &self.generator(q).scale_real(c);
            }
        }
        x
    }

    /// `U ← (I − τX)(I + τX)⁻¹ U`, or `M ← (I + τX) M` rescaled to determinant one.
    fn step(&self, t: &CMatrix, x: &CMatrix, tau: f64) -> Option<CMatrix> {
        let n = self.n();
        let id = CMatrix::identity(n);
        let tx = x.scale_real(tau);
        match self.group {
            Group::Unitary => {
                let cayley = &(&id - &tx) * &(&id + &tx).inverse().ok()?;
                Some(&cayley * t)
            }
            Group::Special => normalize_det(&(&(&id + &tx) * t)),
        }
    }

    fn transformed(&self, t: &CMatrix) -> Option<CMatrix> {
        match self.group {
            Group::Unitary => Some(t.conjugate(&self.a)),
            Group::Special => {
                if t.condition_estimate() > COND_CAP {
                    return None;
                }
                Some(&(t * &self.a) * &t.inverse().ok()?)
            }
        }
    }

    fn surrogate(&self, t: &CMatrix, p: f64) -> f64 {
        let Some(b) = self.transformed(t) else {
            return f64::INFINITY;
        };
        let mags: Vec<f64> = b.entries().iter().map(|z| z.norm()).collect();
        let base = match self.surrogate {
            Surrogate::PowerMean => power_mean(&mags, p) / power_mean(&mags, 2.0),
            Surrogate::LogRatio => power_mean(&mags, p).ln() - power_mean(&mags, -p).ln(),
        };
        match self.group {
            Group::Unitary => base,
            Group::Special => base + COND_PENALTY * t.condition_estimate().powi(2),
        }
    }

    fn residuals(&self, t: &CMatrix) -> Option<Vec<f64>> {
        let b = self.transformed(t)?;
        let sq: Vec<f64> = b.entries().iter().map(|z| z.norm_sqr()).collect();
        let mean = sq.iter().sum::<f64>() / sq.len() as f64;
        if mean == 0.0 {
            return None;
        }
        Some(sq.iter().map(|s| s / mean - 1.0).collect())
    }

    fn gradient(&self, t: &CMatrix, p: f64) -> Vec<f64> {
        (0..self.generator_count())
            .map(|q| {
                let g = self.generator(q);
                let up = self.step(t, &g, FD_STEP).map_or(f64::INFINITY, |s| self.surrogate(&s, p));
                let down = self.step(t, &g, -FD_STEP).map_or(f64::INFINITY, |s| self.surrogate(&s, p));
                let d = (up - down) / (2.0 * FD_STEP);
                if d.is_finite() {
                    d
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Backtracking descent on the annealed surrogate; only decreasing steps are taken.
    fn descend(&self, mut t: CMatrix, iters: usize) -> (CMatrix, usize, Vec<Vec<f64>>) {
        let per_stage = (iters / P_SCHEDULE.len()).max(1);
        let mut used = 0;
        let mut trace = Vec::with_capacity(P_SCHEDULE.len());
        for &p in &P_SCHEDULE {
            let mut f = self.surrogate(&t, p);
            let mut accepted = vec![f];
            let mut tau: f64 = 0.5;
            for _ in 0..per_stage {
                let g = self.gradient(&t, p);
                let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
                if gn < 1e-12 || !f.is_finite() {
                    break;
                }
                used += 1;
                let dir = self.combine(&g.iter().map(|v| -v / gn).collect::<Vec<_>>());
                tau = (2.0 * tau).min(1.0);
                let mut moved = false;
                while tau >= STEP_FLOOR {
                    if let Some(cand) = self.step(&t, &dir, tau) {
                        let fc = self.surrogate(&cand, p);
                        if fc < f {
                            t = cand;
                            f = fc;
                            moved = true;
                            break;
                        }
                    }
                    tau *= 0.5;
                }
                if !moved {
                    break;
                }
                accepted.push(f);
            }
            trace.push(accepted);
        }
        (t, used, trace)
    }

    /// Levenberg–Marquardt on the squared-magnitude residuals.
    fn polish(&self, mut t: CMatrix) -> (CMatrix, usize) {
        let Some(mut r) = self.residuals(&t) else {
            return (t, 0);
        };
        let np = self.generator_count();
        let gens: Vec<CMatrix> = (0..np).map(|q| self.generator(q)).collect();
        let mut cost = sumsq(&r);
        let mut mu = 1e-3;
        let mut used = 0;
        for _ in 0..LM_MAX_ITERS {
            if cost < 1e-30 {
                break;
            }
            used += 1;
            let mut jac = vec![vec![0.0; np]; r.len()];
            for (q, g) in gens.iter().enumerate() {
                let up = self.step(&t, g, LM_FD_STEP).and_then(|s| self.residuals(&s));
                let down = self.step(&t, g, -LM_FD_STEP).and_then(|s| self.residuals(&s));
                if let (Some(up), Some(down)) = (up, down) {
                    for (row, (u, d)) in jac.iter_mut().zip(up.iter().zip(&down)) {
                        row[q] = (u - d) / (2.0 * LM_FD_STEP);
                    }
                }
            }
            let mut jtj = vec![vec![0.0; np]; np];
            let mut jtr = vec![0.0; np];
            for (row, &ri) in jac.iter().zip(&r) {
                for a in 0..np {
                    if row[a] == 0.0 {
                        continue;
                    }
                    jtr[a] += row[a] * ri;
                    for b in 0..np {
                        jtj[a][b] += row[a] * row[b];
                    }
                }
            }
            let mut improved = false;
            while mu < 1e12 {
                let mut sys = jtj.clone();
                for (a, row) in sys.iter_mut().enumerate() {
                    row[a] += mu * (1.0 + jtj[a][a]);
                }
                let Some(delta) = cholesky_solve(&sys, &jtr.iter().map(|v| -v).collect::<Vec<_>>()) else {
                    mu *= 10.0;
                    continue;
                };
                let cand = self.step(&t, &combine_with(&gens, &delta), 1.0);
                if let Some((cand, rc)) = cand.and_then(|c| self.residuals(&c).map(|rc| (c, rc))) {
                    let cc = sumsq(&rc);
                    if cc < cost {
                        t = cand;
                        r = rc;
                        cost = cc;
                        mu = (mu / 3.0).max(1e-12);
                        improved = true;
                        break;
                    }
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (t, used)
    }

    pub fn run(&self, start: CMatrix, iters: usize, score: impl Fn(&CMatrix) -> f64) -> Run {
        let (t, d_used, _) = self.descend(start, iters);
        let (t, p_used) = self.polish(t);
        let score = self.transformed(&t).map_or(f64::INFINITY, |b| score(&b));
        Run { score, transform: t, iterations: d_used + p_used }
    }

    pub fn start(&self, restart: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let n = self.n();
        if restart == 0 {
            return CMatrix::identity(n);
        }
        match self.group {
            Group::Unitary => random_unitary(n, rng),
            Group::Special => loop {
                let g = gaussian_matrix(n, rng);
                if let Some(m) = normalize_det(&g) {
                    if m.condition_estimate() < 1e3 {
                        break m;
                    }
                }
            },
        }
    }
}

fn combine_with(gens: &[CMatrix], coeffs: &[f64]) -> CMatrix {
    let n = gens[0].n();
    let mut x = CMatrix::zeros(n);
    for (g, &c) in gens.iter().zip(coeffs) {
        x = &x + &g.scale_real(c);
    }
    x
}

fn sumsq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// `(mean xᵖ)^{1/p}`, evaluated relative to the extreme entry to avoid overflow.
pub(crate) fn power_mean(x: &[f64], p: f64) -> f64 {
    let floor = 1e-300;
    let pivot =
        if p > 0.0 { x.iter().copied().fold(0.0, f64::max) } else { x.iter().copied().fold(f64::INFINITY, f64::min) }
            .max(floor);
    let mean = x.iter().map(|&v| (v.max(floor) / pivot).powf(p)).sum::<f64>() / x.len() as f64;
    pivot * mean.powf(1.0 / p)
}

/// Rescales to determinant one; `None` for (near-)singular input.
pub(crate) fn normalize_det(m: &CMatrix) -> Option<CMatrix> {
    let det = m.determinant();
    if det.norm() < 1e-300 || !det.is_finite() {
        return None;
    }
    let root = (det.ln() / m.n() as f64).exp();
    Some(m.scale(root.inv()))
}

fn cholesky_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        y[i] = (b[i] - (0..i).map(|k| l[i][k] * y[k]).sum::<f64>()) / l[i][i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = (y[i] - (i + 1..n).map(|k| l[k][i] * x[k]).sum::<f64>()) / l[i][i];
    }
    Some(x)
}

pub(crate) fn gaussian_matrix(n: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-like unitary from Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    loop {
        let g = gaussian_matrix(n, rng);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut v = g.col(j);
            for _ in 0..2 {
                for c in &cols {
                    let proj = vdot(c, &v);
                    for (vi, ci) in v.iter_mut().zip(c) {
                        *vi -= proj * ci;
                    }
                }
            }
            let norm = vnorm(&v);
            if norm < 1e-8 {
                break;
            }
            cols.push(v.iter().map(|z| z / norm).collect());
        }
        if cols.len() == n {
            let mut u = CMatrix::zeros(n);
            for (j, c) in cols.iter().enumerate() {
                u.set_col(j, c);
            }
            return u;
        }
    }
}

/// Runs every restart, in parallel when allowed, and keeps the lowest score
/// (ties by restart index).
pub(crate) fn multi_restart(
    problem: &Problem,
    opts: &SearchOptions,
    score: impl Fn(&CMatrix) -> f64 + Sync,
) -> Result<Run> {
    if opts.restarts == 0 {
        bail!(Precondition, "at least one restart is required");
    }
    let work = || {
        (0..opts.restarts)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(k as u64);
                let start = problem.start(k, &mut rng);
                (k, problem.run(start, opts.iters, &score))
            })
            .reduce_with(|x, y| if y.1.score < x.1.score || (y.1.score == x.1.score && y.0 < x.0) { y } else { x })
            .map(|(_, run)| run)
            .expect("restarts ≥ 1")
    };
    if opts.jobs == 0 {
        Ok(work())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| crate::Error::Numeric(format!("thread pool: {e}")))?;
        Ok(pool.install(work))
    }
}

/// Identity-like check used by callers that short-circuit trivial inputs.
pub(crate) fn is_zero_matrix(a: &CMatrix) -> bool {
    a.entries().iter().all(|&z| z == ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_mean_basics() {
        let x = [1.0, 1.0, 1.0];
        assert!((power_mean(&x, 7.0) - 1.0).abs() < 1e-15);
        assert!((power_mean(&[1.0, 3.0], 1.0) - 2.0).abs() < 1e-15);
        assert!(power_mean(&[0.0, 2.0], -4.0) < 1e-200);
        assert!(power_mean(&[1.0, 2.0], 64.0) <= 2.0);
    }

    #[test]
    fn cayley_step_stays_unitary() {
        let p = Problem { a: CMatrix::identity(3), group: Group::Unitary, surrogate: Surrogate::PowerMean };
        let x = p.combine(&[0.3, -1.0, 0.2, 0.5, 0.1, 0.0, 0.7, 0.4, -0.9]);
        assert!(x.max_diff(&x.adjoint().scale_real(-1.0)) < 1e-15);
        let u = p.step(&CMatrix::identity(3), &x, 0.8).unwrap();
        assert!(u.is_unitary(1e-12));
    }

    #[test]
    fn special_step_has_unit_determinant() {
        let p = Problem { a: CMatrix::identity(2), group: Group::Special, surrogate: Surrogate::PowerMean };
        let x = p.combine(&[0.3, -1.0, 0.2, 0.5, 0.1, 0.0, 0.7, 0.4]);
        let m = p.step(&CMatrix::identity(2), &x, 0.5).unwrap();
        assert!((m.determinant() - ONE).norm() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..6 {
            assert!(random_unitary(n, &mut rng).is_unitary(1e-12));
        }
    }

    #[test]
    fn accepted_steps_decrease_surrogate() {
        let a = CMatrix::from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, -1.0, 0.5], &[0.3, 0.0, 0.2]]).unwrap();
        let a = a.scale_real(1.0 / a.frobenius());
        let p = Problem { a, group: Group::Unitary, surrogate: Surrogate::PowerMean };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let start = random_unitary(3, &mut rng);
        let (_, _, trace) = p.descend(start, 60);
        for stage in trace {
            assert!(stage.windows(2).all(|w| w[1] < w[0]), "{stage:?}");
        }
    }

    #[test]
    fn cholesky_small() {
        let a = vec![vec![4.0, 2.0], vec![2.0, 3.0]];
        let x = cholesky_solve(&a, &[2.0, 1.0]).unwrap();
        assert!((4.0 * x[0] + 2.0 * x[1] - 2.0).abs() < 1e-14);
        assert!((2.0 * x[0] + 3.0 * x[1] - 1.0).abs() < 1e-14);
        assert!(cholesky_solve(&[vec![-1.0]], &[1.0]).is_none());
    }
}
