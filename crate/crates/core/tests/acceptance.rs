//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use apportion::blowup::{
    apportion_blowup_restricted, frak_u_min, orthogonality_check, tf_gap_closed_form, tf_matrix, GroupSearch,
};
use apportion::certify::{certify_not_u_apportionable, psd_apportionability};
use apportion::interlace::{check_sum_identity, interlacing_bounds, mask_family};
use apportion::labelings::{
    all_contracting, next_permutation, nif_to_loopgraph, underlying_graphs, LoopGraph, ZnFunction,
};
use apportion::linalg::{
    dft, dft_multiplicities, fourth_root_multiplicities, is_uniform, multiset_distance, normal_eig, small_eig, vdot,
    CMatrix, C64,
};
use apportion::rank_one::{apportion_rank_one, canonical_rank_one, Branch};
use apportion::recovery::{edge_labeling_factors, recover_function, recover_graph};
use apportion::search::{
    additive_apport_test, example_family, gl_obstruction, realizable_real_pair, search_gl, verify_decomposition,
    SearchOptions,
};
use apportion::Status;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn gaussian_vec(n: usize, rng: &mut impl Rng) -> Vec<C64> {
    (0..n).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
}

fn gaussian_matrix(n: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn random_hermitian(n: usize, rng: &mut impl Rng) -> CMatrix {
    let g = gaussian_matrix(n, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

fn max_dev(b: &CMatrix, kappa: f64) -> f64 {
    b.entries().iter().map(|z| (z.norm() - kappa).abs()).fold(0.0, f64::max)
}

/// Random rank-one `x y*` scaled to `‖A‖_F = n`, so that `κ = 1`.
/// `kind` 0 is generic, 1 makes `y ⟂ x` (zero trace), 2 makes `y ∥ x`.
fn rank_one(n: usize, kind: usize, rng: &mut impl Rng) -> CMatrix {
    let x = gaussian_vec(n, rng);
    let mut y = gaussian_vec(n, rng);
    match kind {
        1 => {
            let p = vdot(&x, &y) / vdot(&x, &x);
            for (yi, xi) in y.iter_mut().zip(&x) {
                *yi -= p * xi;
            }
        }
        2 => {
            let s = c(rng.sample(StandardNormal), rng.sample(StandardNormal));
            y = x.iter().map(|xi| xi * s).collect();
        }
        _ => {}
    }
    let a = CMatrix::outer(&x, &y);
    a.scale_real(n as f64 / a.frobenius())
}

/// Rank-one apportionment on 200 seeded matrices, all branches, n = 2..12.
fn rank_one_apportionment(decomp: &mut Vec<(String, f64)>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11);
    let mut seen = [0usize; 3];
    let mut parities = [0usize; 2];
    for t in 0..200 {
        let n = 2 + t % 11;
        let kind = match t % 10 {
            0 | 1 => 1,
            2 | 3 => 2,
            _ => 0,
        };
        let a = rank_one(n, kind, &mut rng);
        let branch = canonical_rank_one(&a).map_err(|e| e.to_string())?.branch();
        seen[branch as usize] += 1;
        if branch == Branch::General {
            parities[n % 2] += 1;
        }
        let r = apportion_rank_one(&a).map_err(|e| format!("case {t}: {e}"))?;
        let dev = max_dev(&r.result, 1.0);
        ensure!(dev <= 1e-9, "case {t} (n = {n}): entry deviation {dev:e}");
        let u = r.transform.unitarity_defect();
        ensure!(u <= 1e-10, "case {t}: unitarity defect {u:e}");
        ensure!((r.kappa - a.frobenius() / n as f64).abs() <= 1e-9, "case {t}: κ = {}", r.kappa);
        let v = r.transform.adjoint();
        let d = verify_decomposition(&a, &r.transform, r.kappa).map_err(|e| e.to_string())?;
        ensure!(d < 1e-8, "case {t}: decomposition residual {d:e}");
        ensure!((&(&v * &r.result) * &r.transform).max_diff(&a) < 1e-9, "case {t}: V*BV ≠ A");
        decomp.push((format!("rank-one case {t}"), d));
    }
    ensure!(seen.iter().all(|&s| s > 0), "branch coverage {seen:?}");
    ensure!(parities.iter().all(|&s| s > 0), "general-branch parity coverage {parities:?}");
    Ok(())
}

/// Multiplicities of ±1, ±i for the DFT, n = 4..16. The table is stated for
/// the `e^{−2πi kj/n}` kernel, which is `conj(dft(n))` here.
fn dft_spectra() -> Check {
    for n in 4..=16 {
        let f = dft(n).conj();
        let ev = normal_eig(&f).map_err(|e| e.to_string())?;
        let got = fourth_root_multiplicities(&ev, 1e-8).ok_or(format!("n = {n}: eigenvalue off the fourth roots"))?;
        ensure!(got == dft_multiplicities(n), "n = {n}: {got:?} vs table {:?}", dft_multiplicities(n));
    }
    Ok(())
}

/// Matrices within `1/4` of `(3/4) I` in max norm are certified; uniform ones are not.
fn certificates() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xCE47);
    for t in 0..100 {
        let n = 2 + t % 5;
        let a = CMatrix::from_fn(n, |k, j| {
            let r = 0.25 * rng.random::<f64>().sqrt();
            let z = C64::from_polar(r, 2.0 * PI * rng.random::<f64>());
            if k == j {
                z + 0.75
            } else {
                z
            }
        });
        let cert = certify_not_u_apportionable(&a).map_err(|e| e.to_string())?;
        ensure!(cert.is_certificate(), "case {t} (n = {n}) not certified");
        ensure!(cert.lhs > cert.rhs, "case {t}: |c| ≤ rhs");
    }
    ensure!(
        !certify_not_u_apportionable(&CMatrix::ones(2)).map_err(|e| e.to_string())?.is_certificate(),
        "J_2 certified"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(0xCE48);
    for t in 0..60 {
        let n = 2 + t % 7;
        let a = rank_one(n, t % 3, &mut rng);
        let b = apportion_rank_one(&a).map_err(|e| e.to_string())?.result;
        let cert = certify_not_u_apportionable(&b).map_err(|e| e.to_string())?;
        ensure!(!cert.is_certificate(), "rank-one output {t} (n = {n}) certified at c = {}", cert.witness_c);
    }
    Ok(())
}

/// `diag(0, 1, 2)` is not unitarily apportionable but is similar to a uniform matrix.
fn psd_versus_similarity(decomp: &mut Vec<(String, f64)>) -> Check {
    let d = CMatrix::diag_real(&[0.0, 1.0, 2.0]);
    let v = psd_apportionability(&d).map_err(|e| e.to_string())?;
    ensure!(v.rank == 2 && !v.u_apportionable, "PSD test gave rank {}", v.rank);
    let witness = CMatrix::from_real_rows(&[&[1.0, 1.0, -1.0], &[1.0, 1.0, 1.0], &[-1.0, -1.0, 1.0]]).unwrap();
    ensure!(is_uniform(&witness, 1e-15).0, "witness not uniform");
    let ev = small_eig(&witness).map_err(|e| e.to_string())?;
    ensure!(multiset_distance(&ev, &[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]) < 1e-8, "witness spectrum {ev:?}");
    let opts = SearchOptions { restarts: 8, iters: 240, seed: 24, jobs: 0 };
    let r = search_gl(&d, &opts).map_err(|e| e.to_string())?;
    ensure!(r.status == Status::Uniform && r.residual < 1e-6, "search_gl residual {:e}", r.residual);
    let ev = small_eig(&r.result).map_err(|e| e.to_string())?;
    ensure!(multiset_distance(&ev, &[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]) < 1e-6, "conjugate spectrum {ev:?}");
    let res = verify_decomposition(&d, &r.transform, r.kappa).map_err(|e| e.to_string())?;
    decomp.push(("diag(0,1,2) via search_gl".into(), res));
    Ok(())
}

/// Restricted-group apportionment of `H_{G_f}` and the group minimum of `T_f`.
fn blowups(decomp: &mut Vec<(String, f64)>) -> Check {
    for n in 2..=3 {
        for f in all_contracting(n) {
            let (_, g) = underlying_graphs(&f);
            let found = apportion_blowup_restricted(&g).map_err(|e| e.to_string())?;
            let (perm, r) = found.ok_or(format!("{f}: no restricted element apportions"))?;
            let kappa = 1.0 / (2 * n - 1) as f64;
            ensure!((r.kappa - kappa).abs() <= 1e-9, "{f}: κ = {}", r.kappa);
            ensure!(max_dev(&r.result, kappa) <= 1e-9, "{f} via {perm:?}: deviation {:e}", r.residual);
            let h = r.transform.adjoint().conjugate(&r.result);
            let res = verify_decomposition(&h, &r.transform, kappa).map_err(|e| e.to_string())?;
            decomp.push((format!("blowup of {f}"), res));
        }
    }
    let f = ZnFunction::new(vec![0, 0]).unwrap();
    let tf = tf_matrix(&f).map_err(|e| e.to_string())?;
    let best = frak_u_min(&tf, 2, GroupSearch::Exhaustive).map_err(|e| e.to_string())?;
    ensure!(best.evaluated == 6, "evaluated {} elements", best.evaluated);
    ensure!((best.value - 1.0 / 3.0).abs() <= 1e-10, "group minimum {}", best.value);
    let gap = best.value - tf.frobenius() / 9.0;
    let expect = 1.0 / 3.0 - 6f64.sqrt() / 9.0;
    ensure!((gap - expect).abs() <= 1e-10, "gap {gap} vs {expect}");
    ensure!((tf_gap_closed_form(2) - expect).abs() <= 1e-10, "closed form {}", tf_gap_closed_form(2));
    Ok(())
}

/// `T_f T_g = T_{g∘f}` and the support disjointness at `n = 2`.
fn antihomomorphism() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7F);
    for t in 0..50 {
        let n = 2 + t % 3;
        let f = ZnFunction::new((0..n).map(|_| rng.random_range(0..n)).collect()).unwrap();
        let g = ZnFunction::new((0..n).map(|_| rng.random_range(0..n)).collect()).unwrap();
        let lhs = &tf_matrix(&f).map_err(|e| e.to_string())? * &tf_matrix(&g).map_err(|e| e.to_string())?;
        let rhs = tf_matrix(&g.compose(&f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let d = lhs.max_diff(&rhs);
        ensure!(d <= 1e-10, "f = {f}, g = {g}: difference {d:e}");
    }
    let f = ZnFunction::new(vec![0, 0]).unwrap();
    let mut p = vec![0, 1, 2];
    let mut count = 0;
    loop {
        ensure!(orthogonality_check(&f, &p).map_err(|e| e.to_string())?, "supports overlap for {p:?}");
        count += 1;
        if !next_permutation(&mut p) {
            break;
        }
    }
    ensure!(count == 6, "checked {count} elements");
    Ok(())
}

/// The worked mask example, the sum identity and the interlacing bounds.
fn interlacing() -> Check {
    let g = LoopGraph::new(4, &[(0, 2), (0, 3), (1, 2), (2, 2)]).unwrap();
    let fam = mask_family(&CMatrix::ones(4), &g).map_err(|e| e.to_string())?;
    let expected: [[[i8; 4]; 4]; 4] = [
        [[1, 1, 0, 0], [1, 1, 0, 1], [0, 0, -1, 1], [0, 1, 1, 1]],
        [[1, 0, 1, 1], [0, -1, 1, 0], [1, 1, 1, 0], [1, 0, 0, 1]],
        [[-1, 1, 0, 0], [1, 1, 0, 1], [0, 0, 1, 1], [0, 1, 1, 1]],
        [[1, 0, 1, 1], [0, 1, 1, 0], [1, 1, 1, 0], [1, 0, 0, -1]],
    ];
    for (k, mask) in expected.iter().enumerate() {
        let got: Vec<Vec<i8>> = fam.masks[k].clone();
        ensure!(got == mask.map(|r| r.to_vec()).to_vec(), "mask {k}: {got:?}");
        let member = CMatrix::from_fn(4, |i, j| c(mask[i][j] as f64, 0.0));
        ensure!(fam.members[k] == member, "member {k} differs");
    }
    let s = check_sum_identity(&fam).map_err(|e| e.to_string())?;
    ensure!(s < 1e-12, "J_4 sum identity residual {s:e}");

    let mut rng = ChaCha8Rng::seed_from_u64(0x1E7);
    for t in 0..100 {
        let n = 4 + t % 5;
        let f = ZnFunction::new((0..n).map(|i| rng.random_range(0..=i)).collect()).unwrap();
        let g = nif_to_loopgraph(&f).map_err(|e| e.to_string())?;
        let m = random_hermitian(n, &mut rng);
        let fam = mask_family(&m, &g).map_err(|e| format!("case {t}: {e}"))?;
        let s = check_sum_identity(&fam).map_err(|e| e.to_string())?;
        ensure!(s < 1e-12, "case {t} (n = {n}): sum identity residual {s:e}");
        for row in interlacing_bounds(&fam).map_err(|e| e.to_string())? {
            ensure!(
                row.pass,
                "case {t} (n = {n}): ℓ = {} bound {} ≤ {} ≤ {} fails",
                row.ell,
                row.lower,
                row.lambda,
                row.upper
            );
        }
    }
    Ok(())
}

/// `f → factors → (G_f, f)` for every contracting `f` with `n ≤ 6`, and the path example.
fn recovery() -> Check {
    let mut total = 0;
    for n in 1..=6 {
        let all = all_contracting(n);
        if n == 6 {
            ensure!(all.len() == 120, "{} contracting functions at n = 6", all.len());
        }
        for f in all {
            let fac = edge_labeling_factors(&f);
            ensure!(fac.total() == n * (n - 1), "{f}: {} factors", fac.total());
            let r = recover_graph(&fac).map_err(|e| format!("{f}: {e}"))?;
            let (_, g) = underlying_graphs(&f);
            ensure!(r.graph.non_loop_edges() == g.non_loop_edges(), "{f}: edges differ");
            ensure!(r.has_fixed_point == (n > 1), "{f}: fixed point flag");
            let back = recover_function(&r.graph, 0).map_err(|e| format!("{f}: {e}"))?;
            ensure!(back == f, "{f} recovered as {back}");
            total += 1;
        }
    }
    ensure!(total == 1 + 1 + 2 + 6 + 24 + 120, "covered {total} functions");
    let path = ZnFunction::new(vec![0, 0, 1, 2]).unwrap();
    let r = recover_graph(&edge_labeling_factors(&path)).map_err(|e| e.to_string())?;
    ensure!(r.graph.non_loop_edges() == vec![(0, 1), (1, 2), (2, 3)], "not the path: {:?}", r.graph.non_loop_edges());
    ensure!(recover_function(&r.graph, 0).map_err(|e| e.to_string())? == path, "path function not recovered");
    Ok(())
}

/// Which `{1, r}` are spectra of uniform 2×2 matrices, and two worked spectra.
fn two_by_two_spectra() -> Check {
    for r in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        let (flag, witness) = realizable_real_pair(r);
        ensure!(flag == (r == 0.0 || r == -1.0), "r = {r}: flag {flag}");
        ensure!(flag == gl_obstruction(&CMatrix::diag_real(&[1.0, r])).is_none(), "r = {r}: obstruction disagrees");
        if let Some(w) = witness {
            ensure!(is_uniform(&w, 1e-12).0, "r = {r}: witness not uniform");
            let ev = small_eig(&w).map_err(|e| e.to_string())?;
            ensure!(multiset_distance(&ev, &[c(1.0, 0.0), c(r, 0.0)]) < 1e-8, "r = {r}: spectrum {ev:?}");
        }
    }
    let b = CMatrix::from_rows(&[vec![c(0.5, 0.5), c(-0.5, 0.5)], vec![c(-0.5, 0.5), c(0.5, 0.5)]]).unwrap();
    ensure!(is_uniform(&b, 1e-15).0, "B not uniform");
    let ev = small_eig(&b).map_err(|e| e.to_string())?;
    ensure!(multiset_distance(&ev, &[c(1.0, 0.0), c(0.0, 1.0)]) < 1e-8, "spectrum {ev:?}");
    let a =
        CMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.5, 3f64.sqrt() / 2.0)]]).unwrap();
    let ev = small_eig(&a).map_err(|e| e.to_string())?;
    let expect = [c(1.69244, 0.318148), c(-0.19244, 0.547877)];
    ensure!(multiset_distance(&ev, &expect) < 1e-5, "decimals {ev:?}");
    Ok(())
}

/// The DFT membership test against direct uniformity, the decomposition
/// identity, and the two-parameter family's constants.
fn solver_consistency(decomp: &mut Vec<(String, f64)>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x50);
    let (mut positives, mut negatives) = (0, 0);
    for t in 0..200 {
        let n = 2 + t % 4;
        let (a, m) = if t % 2 == 0 {
            let a = rank_one(n, t % 3, &mut rng);
            let m = apportion_rank_one(&a).map_err(|e| e.to_string())?.transform;
            (a, m)
        } else {
            (gaussian_matrix(n, &mut rng), gaussian_matrix(n, &mut rng))
        };
        let additive = additive_apport_test(&a, &m).map_err(|e| format!("case {t}: {e}"))?;
        let b = &(&m * &a) * &m.inverse().map_err(|e| e.to_string())?;
        let direct = is_uniform(&b, 1e-9).0;
        ensure!(additive == direct, "case {t}: additive {additive} vs direct {direct}");
        if direct {
            positives += 1;
        } else {
            negatives += 1;
        }
    }
    ensure!(positives > 0 && negatives > 0, "only one outcome seen: {positives} / {negatives}");
    let d12 = CMatrix::diag_real(&[1.0, 2.0]);
    for t in 0..100 {
        let m = gaussian_matrix(2, &mut rng);
        ensure!(!additive_apport_test(&d12, &m).map_err(|e| e.to_string())?, "diag(1,2) apportioned by case {t}");
    }
    let a = CMatrix::diag_real(&[2.0, 0.0]);
    for theta in [PI / 3.0, PI / 2.0, PI] {
        let r = example_family(1.0, theta).map_err(|e| e.to_string())?;
        let kappa = 1.0 / (theta / 2.0).sin().abs();
        ensure!(r.status == Status::Uniform, "θ = {theta}: not uniform");
        ensure!((r.kappa - kappa).abs() <= 1e-10, "θ = {theta}: κ = {}", r.kappa);
        ensure!(max_dev(&r.result, kappa) <= 1e-10, "θ = {theta}: entries off κ");
        let d = verify_decomposition(&a, &r.transform, r.kappa).map_err(|e| e.to_string())?;
        decomp.push((format!("two-parameter family at θ = {theta:.4}"), d));
    }
    for (what, res) in decomp.iter() {
        ensure!(*res < 1e-8, "{what}: decomposition residual {res:e}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut decomp: Vec<(String, f64)> = Vec::new();
    let mut failed = 0;
    let mut report = |k: usize, name: &str, outcome: Check| match outcome {
        Ok(()) => println!("criterion {k:>2} {name}: PASS"),
        Err(why) => {
            failed += 1;
            println!("criterion {k:>2} {name}: FAIL ({why})");
        }
    };
    report(1, "rank-one apportionment", rank_one_apportionment(&mut decomp));
    report(2, "DFT spectra", dft_spectra());
    report(3, "certificates", certificates());
    report(4, "PSD versus similarity", psd_versus_similarity(&mut decomp));
    report(5, "blowups", blowups(&mut decomp));
    report(6, "antihomomorphism and orthogonality", antihomomorphism());
    report(7, "interlacing", interlacing());
    report(8, "recovery", recovery());
    report(9, "2x2 spectra", two_by_two_spectra());
    report(10, "solver consistency", solver_consistency(&mut decomp));
    println!("acceptance: {} of 10 passed in {:.1?}", 10 - failed, start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
