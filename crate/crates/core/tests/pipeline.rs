//! Cross-module consistency: certificates against numerical search, blowups
//! against the decomposition identity, masked families against traces.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use apportion::blowup::{apportion_blowup_restricted, frak_u_min, orthogonality_check, tf_matrix, GroupSearch};
use apportion::certify::{certify_not_u_apportionable, psd_apportionability};
use apportion::interlace::mask_family;
use apportion::io::{matrix_from_str, matrix_to_string};
use apportion::labelings::{
    all_contracting, cyclic_decomposition_check, next_permutation, nif_to_loopgraph, underlying_graphs, ZnFunction,
};
use apportion::linalg::{is_uniform, CMatrix, C64};
use apportion::rank_one::apportion_rank_one;
use apportion::search::{search_gl, search_unitary, uar_estimate, verify_decomposition, SearchOptions};
use apportion::Status;

fn gaussian(n: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(n, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn opts(restarts: usize, iters: usize, seed: u64) -> SearchOptions {
    SearchOptions { restarts, iters, seed, jobs: 0 }
}

#[test]
fn certified_matrices_resist_unitary_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut certified = 0;
    while certified < 50 {
        let n = 2 + certified % 3;
        let a = &CMatrix::identity(n) + &gaussian(n, &mut rng).scale_real(0.2);
        if !certify_not_u_apportionable(&a).unwrap().is_certificate() {
            continue;
        }
        certified += 1;
        let r = search_unitary(&a, &opts(2, 60, certified as u64)).unwrap();
        assert!(r.residual >= 1e-6, "certified matrix reached residual {}", r.residual);
        assert_eq!(r.status, Status::InfeasibleByTheorem);
    }
}

#[test]
fn psd_rank_two_congruences_are_never_uniform() {
    let h = CMatrix::diag_real(&[0.0, 1.0, 2.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let c = gaussian(3, &mut rng);
        let congruent = &(&c.adjoint() * &h) * &c;
        assert!(!is_uniform(&congruent, 1e-9).0);
        assert!(!psd_apportionability(&congruent).unwrap().u_apportionable);
    }
}

#[test]
fn unitary_search_matches_rank_one_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for n in 2..=4 {
        let x = gaussian(n, &mut rng);
        let a = CMatrix::outer(&x.col(0), &x.col(1));
        let r = search_unitary(&a, &opts(4, 120, n as u64)).unwrap();
        assert_eq!(r.status, Status::Uniform, "n = {n}: residual {}", r.residual);
        assert!(r.residual < 1e-6 && r.residual >= -1e-12);
        assert!((r.kappa - apportion_rank_one(&a).unwrap().kappa).abs() < 1e-12);
        assert!(verify_decomposition(&a, &r.transform, r.kappa).unwrap() < 1e-6);
    }
}

#[test]
fn unitary_search_respects_frobenius_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for n in 2..=4 {
        let a = gaussian(n, &mut rng);
        let r = search_unitary(&a, &opts(2, 60, 0)).unwrap();
        assert!(r.transform.is_unitary(1e-9));
        assert!(r.result.max_abs() - a.frobenius() / n as f64 >= -1e-12);
    }
}

#[test]
fn scaling_scales_reports() {
    let a = CMatrix::from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, -1.0, 0.5], &[0.3, 0.0, 0.2]]).unwrap();
    let gamma = C64::new(0.0, -2.5);
    let o = opts(3, 60, 99);
    let r1 = search_unitary(&a, &o).unwrap();
    let r2 = search_unitary(&a.scale(gamma), &o).unwrap();
    assert!((r2.kappa - 2.5 * r1.kappa).abs() < 1e-12);
    assert!((r2.residual - 2.5 * r1.residual).abs() < 1e-6);
    // transforms may differ by a symmetry of the objective; entry magnitudes may not
    for (x, y) in r1.result.entries().iter().zip(r2.result.entries()) {
        assert!((y.norm() - 2.5 * x.norm()).abs() < 1e-6, "{x} vs {y}");
    }
}

#[test]
fn gl_search_rejects_real_pair_by_theorem() {
    let r = search_gl(&CMatrix::diag_real(&[1.0, 2.0]), &opts(4, 120, 5)).unwrap();
    assert_eq!(r.status, Status::InfeasibleByTheorem);
    assert!(r.theorem.is_some());
    assert!((r.transform.determinant() - C64::new(1.0, 0.0)).norm() < 1e-9);
}

#[test]
fn gl_search_is_reproducible() {
    let a = CMatrix::diag_real(&[0.0, 1.0, 2.0]);
    let r1 = search_gl(&a, &opts(3, 60, 7)).unwrap();
    let r2 = search_gl(&a, &SearchOptions { jobs: 1, ..opts(3, 60, 7) }).unwrap();
    assert_eq!(matrix_to_string(&r1.transform), matrix_to_string(&r2.transform));
    let back = matrix_from_str(&matrix_to_string(&r1.result)).unwrap();
    assert_eq!(back, r1.result);
}

#[test]
fn uar_near_one_for_rank_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let x = gaussian(3, &mut rng);
    let a = CMatrix::outer(&x.col(0), &x.col(2));
    let ratio = uar_estimate(&a, &opts(4, 120, 1)).unwrap();
    assert!((1.0..1.0 + 1e-6).contains(&ratio), "{ratio}");
}

#[test]
fn restricted_blowups_at_four() {
    for f in all_contracting(4) {
        let (_, g) = underlying_graphs(&f);
        let (perm, r) = apportion_blowup_restricted(&g).unwrap().expect("some element apportions");
        assert!((r.kappa - 1.0 / 7.0).abs() < 1e-15);
        assert!(r.residual < 1e-9);
        // the relabelled graph satisfies the cyclic decomposition
        let relabelled = g.relabel(&perm, 7).unwrap();
        assert!(cyclic_decomposition_check(&relabelled.adjacency_matrix(), 4), "{f} via {perm:?}");
    }
}

#[test]
fn group_minimum_is_constant_on_contracting() {
    for n in 2..=3 {
        let values: Vec<f64> = all_contracting(n)
            .iter()
            .map(|f| frak_u_min(&tf_matrix(f).unwrap(), n, GroupSearch::Exhaustive).unwrap().value)
            .collect();
        for v in &values {
            assert!((v - 1.0 / (2 * n - 1) as f64).abs() < 1e-10, "{values:?}");
        }
    }
}

#[test]
fn support_overlap_at_three_for_the_zero_map() {
    // The entrywise products vanish for (0,0,1) but not for every element with (0,0,0).
    let count = |f: &ZnFunction| {
        let mut p: Vec<usize> = (0..5).collect();
        let mut overlap = 0;
        loop {
            if !orthogonality_check(f, &p).unwrap() {
                overlap += 1;
            }
            if !next_permutation(&mut p) {
                return overlap;
            }
        }
    };
    assert_eq!(count(&ZnFunction::new(vec![0, 0, 1]).unwrap()), 0);
    assert_eq!(count(&ZnFunction::zero(3)), 40);
}

#[test]
fn theta_order_and_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for t in 0..40 {
        let n = 4 + t % 4;
        let f = ZnFunction::new((0..n).map(|i| rng.random_range(0..=i)).collect()).unwrap();
        let g = nif_to_loopgraph(&f).unwrap();
        let m = gaussian(n, &mut rng);
        let h = (&m + &m.adjoint()).scale_real(0.5);
        let fam = mask_family(&h, &g).unwrap();
        assert!(fam.thetas.windows(2).all(|w| w[0] >= w[1]));
        let sum: f64 = fam.thetas.iter().sum();
        let member_traces: f64 = fam.members.iter().map(|mk| mk.trace().re).sum();
        assert!((sum - member_traces).abs() < 1e-9);
        assert!((sum - (n as f64 - 2.0) * h.trace().re).abs() < 1e-9);
    }
}
