"""Acceptance gate: one test (or group of tests) per criterion at its stated tolerance."""

import cmath
import math
import time

import numpy as np

from cases import (
    ORDER3_DISC,
    ORDER3_EIGS,
    ORDER4_FLAT,
    ORDER4_FLAT_EIGS,
    ORDER4_NESTED,
    ORDER4_NESTED_EIGS,
    ORDER4_WHOLE,
    ORDER5_DISC,
    ORDER6_B3ZERO,
    ORDER6_CUBICS,
    dense,
    match_sets,
    random_spec,
    sextic,
)
from kreinrange.core import Metric, j_adjoint, random_j_unitary
from kreinrange.geometry import classify_range
from kreinrange.hyperbola import Shape, fit_quadratic
from kreinrange.oracle import factor_check6, sample_both
from kreinrange.spectra import eig_dense, eigvals, support_bounds, support_sweep, theta_grid, validity_windows
from kreinrange.tridiag import certified_hyperbolas, certify

CASES = 200


def _report(line):
    print(f"\n{line}")


def test_criterion1_order3_disc():
    """order-3 disc: certificate, eigenvalues, support fit over the validity window, runtime"""
    t0 = time.perf_counter()
    cert = certify(ORDER3_DISC)
    A, J = dense(ORDER3_DISC)
    eig_err = match_sets(eigvals(A), ORDER3_EIGS)
    # fit over a dense grid inside the validity window only
    lo, hi = validity_windows(A, J)[0]
    grid = np.linspace(lo, hi, 402)[1:-1]
    _, residual = fit_quadratic(A, J, grid)
    elapsed = time.perf_counter() - t0
    _report(f"verdict {cert.verdict}, Delta {cert.Delta}, eigenvalue error {eig_err:.2e}, "
            f"fit residual {residual:.2e}, runtime {elapsed:.3f} s")
    assert cert.verdict
    assert abs(cert.Delta - (3 - 2j)) <= 1e-9
    assert eig_err <= 1e-9
    assert residual <= 1e-8
    assert elapsed < 1.0


def test_criterion2_order5_disc():
    """order-5 disc: certificate, foci of both hyperbolas, trace identity"""
    cert = certify(ORDER5_DISC)
    r2 = cmath.sqrt(30 + 10j)
    err2 = match_sets(cert.H2.foci, [r2, -r2])
    err1 = match_sets(cert.H1.foci, [math.sqrt(30), -math.sqrt(30)])
    A, J = dense(ORDER5_DISC)
    lhs = float(np.sum(np.abs(eigvals(A)) ** 2) - np.trace(j_adjoint(A, J) @ A).real)
    rhs = 2 * abs(cert.Delta1) - cert.M1 + 2 * abs(cert.Delta2) - cert.M2
    _report(f"verdict {cert.verdict}, focus errors {err2:.2e} / {err1:.2e}, identity gap {abs(lhs - rhs):.2e}")
    assert cert.verdict
    assert err2 <= 1e-9 and err1 <= 1e-9
    assert abs(lhs - rhs) <= 1e-9


def _support_oracle_axes(A, J):
    """Axis lengths from a direct least-squares read of the support lines (no classifier code)."""
    rows = [s for s in support_sweep(A, J, theta_grid(720)) if s.valid and s.split.min_abs_j_norm >= 1e-3]
    th = np.array([s.theta for s in rows])
    lo = np.array([s.lambda_L for s in rows])
    hi = np.array([s.lambda_R for s in rows])
    C = np.column_stack([np.cos(th), np.sin(th)])
    center, *_ = np.linalg.lstsq(C, (lo + hi) / 2, rcond=None)
    X = np.column_stack([np.ones_like(th), np.cos(2 * th), np.sin(2 * th)])
    (p, q, t), *_ = np.linalg.lstsq(X, ((hi - lo) / 2) ** 2, rcond=None)
    m = math.hypot(q, t)
    return complex(*center), 2 * math.sqrt(m + p), 2 * math.sqrt(m - p)


def test_criterion3_order4_nested():
    """order-4 nested: eigenvalues, classification, outer hyperbola against the support oracle"""
    A, J = dense(ORDER4_NESTED)
    eig_err = match_sets(eigvals(A), ORDER4_NESTED_EIGS)
    res = classify_range(A, J)
    outer = res.outer
    center, ta, nta = _support_oracle_axes(A, J)
    dev = max(abs(outer.transverse_length - ta), abs(outer.nontransverse_length - nta))
    _report(f"{res.kind.value}, outer center {outer.center}, focal distance {2 * outer.focal_half_distance!r}, "
            f"axes {outer.transverse_length!r} x {outer.nontransverse_length!r}, oracle deviation {dev:.2e}")
    assert eig_err <= 1e-9
    assert res.kind == Shape.BIHYPERBOLIC_NESTED
    assert abs(outer.center - 1) <= 1e-9
    assert abs(2 * outer.focal_half_distance - 2 * math.sqrt(23)) <= 1e-9
    assert abs(center - outer.center) <= 1e-6
    assert dev <= 1e-6


def test_criterion4_order4_flat():
    """order-4 flat: classification, corners at eigenvalues, eigenvalues"""
    A, J = dense(ORDER4_FLAT)
    mu = eigvals(A)
    eig_err = match_sets(mu, ORDER4_FLAT_EIGS)
    res = classify_range(A, J)
    corner_err = max((min(abs(c - m) for m in mu) for c in res.corners), default=0.0)
    _report(f"{res.kind.value}, {len(res.corners)} corner(s) (worst distance {corner_err:.2e}), "
            f"{len(res.flats)} flat piece(s), eigenvalue error {eig_err:.2e}")
    assert res.kind == Shape.BIHYPERBOLIC_FLAT
    assert corner_err <= 1e-6
    assert eig_err <= 1e-9


def test_criterion5_order4_whole_plane():
    """order-4 whole plane: classification with interlacing evidence, runtime"""
    A, J = dense(ORDER4_WHOLE)
    t0 = time.perf_counter()
    res = classify_range(A, J)
    elapsed = time.perf_counter() - t0
    _report(f"{res.kind.value} in {elapsed:.3f} s; {res.evidence[0]}")
    assert res.kind == Shape.WHOLE_PLANE
    assert res.curve.reasons.get("interlacing", 0) > 0
    assert elapsed < 1.0


def test_criterion6_order6_b3_zero():
    """order-6 with b3 = 0: certificate, foci and non-transverse length"""
    cert = certify(ORDER6_B3ZERO)
    r = math.sqrt(29)
    ferr = match_sets(cert.K.foci, [r, -r])
    lerr = abs(cert.K.nontransverse_length - 6 * math.sqrt(2))
    _report(f"verdict {cert.verdict}, focus error {ferr:.2e}, length error {lerr:.2e}")
    assert cert.verdict
    assert ferr <= 1e-9 and lerr <= 1e-9


def test_criterion7_order6_factorization():
    """order-6 factorization: curve polynomial against the explicit cubic product"""
    err = factor_check6(ORDER6_CUBICS, trials=100, seed=0, reference=sextic)
    _report(f"worst relative error {err:.2e} over 100 triples")
    assert err <= 1e-8


# -- criterion 8: property suites ------------------------------------------

def _random_metric(rng, n):
    signs = [1, -1] + [int(s) for s in rng.choice([1, -1], size=n - 2)]
    return Metric(tuple(int(s) for s in rng.permutation(signs)))


def _random_matrix(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def test_criterion8_j_adjoint_involution():
    """property suites (200 cases each) and full-suite runtime"""
    rng = np.random.default_rng(801)
    worst = 0.0
    for _ in range(CASES):
        n = int(rng.integers(2, 7))
        A, J = _random_matrix(rng, n), _random_metric(rng, n)
        worst = max(worst, float(np.abs(j_adjoint(j_adjoint(A, J), J) - A).max()))
    _report(f"J-adjoint involution: {CASES} cases, worst {worst:.2e}")
    assert worst <= 1e-12


def test_criterion8_support_affine_covariance():
    rng = np.random.default_rng(802)
    worst, done = 0.0, 0
    while done < CASES:
        A, J = dense(random_spec(rng, int(rng.integers(3, 7))))
        U = random_j_unitary(J, rng, spread=0.3)
        A = np.linalg.solve(U, A @ U)
        r, phi = float(rng.uniform(0.2, 3)), float(rng.uniform(-np.pi, np.pi))
        beta = complex(rng.normal(), rng.normal())
        B = r * np.exp(1j * phi) * A + beta * np.eye(J.n)
        for th0 in rng.permutation(theta_grid(48)):
            sd0 = support_bounds(A, J, th0)
            if sd0.valid and sd0.split.min_abs_j_norm > 1e-4:
                break
        else:
            continue
        sd1 = support_bounds(B, J, th0 + phi)
        shift = (beta * cmath.exp(-1j * (th0 + phi))).real
        assert sd1.valid and sd1.plus_right == sd0.plus_right
        scale = max(1.0, float(np.abs(B).max()))
        worst = max(worst, abs(sd1.lambda_L - (r * sd0.lambda_L + shift)) / scale,
                    abs(sd1.lambda_R - (r * sd0.lambda_R + shift)) / scale)
        done += 1
    _report(f"affine covariance of support data: {done} cases, worst scaled deviation {worst:.2e}")
    assert worst <= 1e-8


def test_criterion8_j_unitary_invariance():
    rng = np.random.default_rng(803)
    kinds = {}
    for k in range(CASES):
        A, J = dense(random_spec(rng, 3 + k % 4, b3zero=k % 8 == 3, b2zero=k % 8 == 1))
        U = random_j_unitary(J, rng, spread=0.3)
        B = np.linalg.solve(U, A @ U)
        r0, r1 = classify_range(A, J, 180), classify_range(B, J, 180)
        assert r0.kind == r1.kind, k
        scale = max(1.0, float(np.linalg.norm(A, 2)))
        for h0 in r0.hyperbolas:
            assert min(h0.distance_to(h1) for h1 in r1.hyperbolas) <= 1e-6 * scale, k
        kinds[r0.kind.value] = kinds.get(r0.kind.value, 0) + 1
    _report(f"J-unitary invariance of classifications: {CASES} cases, kinds {dict(sorted(kinds.items()))}")


def _closed_subset(rng, m):
    groups = {}
    for j in range(m - 1):
        groups.setdefault(min(j, m - 2 - j), set()).update({j, m - 2 - j})
    chosen = [g for g in groups.values() if rng.random() < 0.5]
    return sorted(set().union(*chosen)) if chosen else []


def test_criterion8_swap_invariance():
    rng = np.random.default_rng(804)
    certified = 0
    for k in range(CASES):
        m = 3 + k % 4
        spec = random_spec(rng, m, b3zero=k % 8 == 3, b2zero=k % 8 == 1)
        pos = [j for j in range(2) if rng.random() < 0.5] if m == 3 else _closed_subset(rng, m)
        c0, c1 = certify(spec), certify(spec.swapped(pos))
        assert c0.verdict is c1.verdict, k
        certified += bool(c0.verdict)
    _report(f"swap invariance of certificates: {CASES} cases ({certified} certified), verdicts identical")


def test_criterion8_eigen_residuals():
    rng = np.random.default_rng(805)
    worst = 0.0
    for _ in range(CASES):
        n = int(rng.integers(1, 7))
        A = _random_matrix(rng, n)
        norm = float(np.linalg.norm(A, 2))
        for p in eig_dense(A):
            worst = max(worst, float(np.linalg.norm(A @ p.vector - p.value * p.vector)) / norm)
    _report(f"eigen-residuals: {CASES} cases, worst ||Av - lv|| / ||A|| = {worst:.2e}")
    assert worst <= 1e-10


def test_criterion8_monte_carlo_containment():
    rng = np.random.default_rng(806)
    plan = [(3, {}), (5, {}), (6, {"b3zero": True}), (4, {"b2zero": True})]
    worst, done, tries = 0.0, 0, 0
    while done < CASES:
        order, kw = plan[tries % len(plan)]
        tries += 1
        spec = random_spec(rng, order, **kw)
        cert = certify(spec)
        hyps = certified_hyperbolas(cert)
        if not cert.verdict or len({id(h) for h in hyps}) != 1:
            continue
        A, J = dense(spec)
        cloud = sample_both(A, J, N=100_000, seed=tries)
        viol = float(max(0.0, -hyps[0].membership(cloud.values).min()))
        worst = max(worst, viol)
        done += 1
    _report(f"Monte Carlo containment: {done} certified instances at N = 100000 per sign, "
            f"worst violation {worst:.2e}")
    assert worst <= 1e-6
