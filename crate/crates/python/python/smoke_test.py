"""Smoke test for the pyapportion extension.

Build and install first:  pip install --no-build-isolation -e crates/python
Then run:                 python crates/python/python/smoke_test.py
"""

import math
import random

import pyapportion as pa


def rank_one():
    rng = random.Random(3)
    x = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(5)]
    y = [complex(rng.gauss(0, 1), rng.gauss(0, 1)) for _ in range(5)]
    a = pa.Matrix([[xi * yj.conjugate() for yj in y] for xi in x])
    r = pa.apportion_rank_one(a)
    assert r.status == "uniform", r
    assert r.transform.is_unitary(1e-10)
    assert abs(r.kappa - a.frobenius() / 5) < 1e-12
    flag, c = r.result.is_uniform(1e-9)
    assert flag and abs(c - r.kappa) < 1e-9
    # the result is the conjugate of the input
    assert r.transform.conjugate(a).max_diff(r.result) < 1e-12


def certificates():
    ok, c, lhs, rhs = pa.certify(pa.Matrix([[0.75, 0, 0], [0, 0.75, 0], [0, 0, 0.75]]))
    assert ok and c == 0.75 and rhs == 0.0
    ok, *_ = pa.certify(pa.Matrix.ones(2))
    assert not ok
    rank, apportionable, eig = pa.psd_check(pa.Matrix([[0, 0, 0], [0, 1, 0], [0, 0, 2]]))
    assert rank == 2 and not apportionable and eig == [2.0, 1.0, 0.0]


def searches():
    d = pa.Matrix([[0, 0, 0], [0, 1, 0], [0, 0, 2]])
    u = pa.search_unitary(d, restarts=2, iters=60, seed=1)
    assert u.status == "infeasible-by-theorem" and u.theorem
    g = pa.search_gl(d, restarts=6, iters=240, seed=3)
    assert g.status == "uniform" and g.residual < 1e-6, g
    again = pa.search_gl(d, restarts=6, iters=240, seed=3, jobs=1)
    assert again.transform.to_json() == g.transform.to_json()
    ratio = pa.uar_estimate(d, restarts=2, iters=60, seed=0)
    assert ratio > 1.0


def labelings():
    f = pa.Function([0, 0, 1, 2])
    g = f.loopgraph()
    assert g.is_graceful() and g.to_function() == f
    perm, report = pa.apportion_blowup(g)
    assert report.status == "uniform" and abs(report.kappa - 1 / 7) < 1e-12
    graph, back = pa.recover(f)
    assert back == f and sorted(graph.edges) == [(0, 1), (1, 2), (2, 3)]
    graph2, _ = pa.recover(f.edge_factors())
    assert graph2.edges == graph.edges
    tf = pa.Function([0, 0]).tf()
    value, best, evaluated = pa.group_min(tf, 2)
    assert evaluated == 6 and abs(value - 1 / 3) < 1e-10
    gap = value - tf.frobenius() / 9
    assert abs(gap - (1 / 3 - math.sqrt(6) / 9)) < 1e-10
    assert len(pa.Function.all_contracting(4)) == 6


def interlacing():
    residual, rows = pa.interlace(pa.Matrix.ones(4), pa.Function([0, 0, 1, 2]).loopgraph())
    assert residual < 1e-12 and all(r[4] for r in rows)


def spectra():
    for n in range(4, 17):
        counts = pa.dft_eigenvalue_counts(n)
        assert sum(counts) == n
    m = pa.Matrix.from_json(pa.Matrix.dft(8).to_json())
    assert m.max_diff(pa.Matrix.dft(8)) == 0.0
    assert (m @ m.adjoint()).max_diff(pa.Matrix.identity(8)) < 1e-12


def errors():
    for bad in (lambda: pa.Matrix([[1, 2]]), lambda: pa.certify(pa.Matrix([[1]])), lambda: pa.Function([5])):
        try:
            bad()
        except ValueError:
            continue
        raise AssertionError("expected ValueError")


if __name__ == "__main__":
    for check in (rank_one, certificates, searches, labelings, interlacing, spectra, errors):
        check()
        print(f"{check.__name__}: ok")
    print("smoke test passed")
