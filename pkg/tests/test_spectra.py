import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cases import ORDER3_DISC, ORDER3_EIGS, ORDER4_WHOLE, dense, match_sets, random_spec
from kreinrange.core import DimensionError, KreinError, Metric, h_theta, random_j_unitary
from kreinrange.hyperbola import HyperbolaFitParams
from kreinrange.spectra import (
    ConvergenceError,
    curve_poly_eval,
    eig_dense,
    knr_poly_eval,
    split_spectrum,
    support_bounds,
    support_sweep,
    theta_grid,
    validity_windows,
)


def test_eigenvalues_of_order3_disc():
    A, _ = dense(ORDER3_DISC)
    got = [p.value for p in eig_dense(A)]
    assert match_sets(got, ORDER3_EIGS) <= 1e-9


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_eigen_residuals_are_small(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 7))
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    if seed % 3 == 0:
        A = np.triu(A)  # repeated structure, exact eigenvalues on the diagonal
    norm = np.linalg.norm(A, 2)
    for p in eig_dense(A):
        assert np.linalg.norm(A @ p.vector - p.value * p.vector) <= 1e-10 * norm
        assert np.linalg.norm(p.vector) == pytest.approx(1.0)


def test_eig_dense_limits():
    with pytest.raises(DimensionError):
        eig_dense(np.eye(17))
    with pytest.raises(ConvergenceError):
        eig_dense(np.array([[1.0, 1e8], [0.0, 2.0]]) + 1e-3, tol=1e-300)


def test_split_of_diagonal_matrix():
    sp = split_spectrum(np.diag([2.0, -3.0]), Metric((1, -1)))
    assert sp.sigma_plus == (2.0,) and sp.sigma_minus == (-3.0,)
    assert sp.in_class_J and not sp.neutral


def test_split_detects_interlacing_and_neutral_vectors():
    sp = split_spectrum(np.diag([1.0, 2.0, 3.0]), Metric((1, -1, 1)))
    assert not sp.in_class_J and sp.all_real
    jordan = np.array([[1.0, 1.0], [-1.0, -1.0]])  # J-Hermitian, neutral eigenvector (1, -1)
    sp = split_spectrum(jordan, Metric((1, -1)))
    assert sp.neutral and not sp.in_class_J


def test_split_requires_j_hermitian():
    with pytest.raises(KreinError):
        split_spectrum(np.array([[0, 1], [0, 0]]), Metric((1, -1)))


def test_support_bounds_of_order3_disc_at_zero():
    A, J = dense(ORDER3_DISC)
    sd = support_bounds(A, J, 0.0)
    assert sd.valid and sd.plus_right
    assert sd.lambda_L == pytest.approx(-1.5, abs=1e-12)
    assert sd.lambda_R == pytest.approx(1.5, abs=1e-12)
    assert sd.split.sigma_plus == pytest.approx((4.0, 1.5))
    assert sd.split.sigma_minus == pytest.approx((-1.5,))


def test_support_bounds_need_indefinite_metric():
    with pytest.raises(KreinError):
        support_bounds(np.eye(2), Metric((1, 1)), 0.0)


def test_whole_plane_example_has_no_valid_angle():
    A, J = dense(ORDER4_WHOLE)
    reasons = {s.reason for s in support_sweep(A, J, theta_grid(720))}
    assert "ok" not in reasons and "interlacing" in reasons
    assert validity_windows(A, J) == []


def test_validity_windows_match_the_fitted_window():
    A, J = dense(ORDER3_DISC)
    params = HyperbolaFitParams(0.75, 1.5, -1.0)
    lo, hi = params.window
    windows = validity_windows(A, J)
    assert len(windows) == 2
    want = sorted(((lo + k * math.pi) % (2 * math.pi), (lo + k * math.pi) % (2 * math.pi) + (hi - lo))
                  for k in (0, 1))
    for (a, b), (c, d) in zip(windows, want):
        assert a == pytest.approx(c, abs=1e-8) and b == pytest.approx(d, abs=1e-8)


def _valid_angle(A, J, rng):
    for th in rng.permutation(theta_grid(48)):
        sd = support_bounds(A, J, th)
        if sd.valid and sd.split.min_abs_j_norm > 1e-4:
            return th, sd
    return None, None


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_support_data_is_affine_covariant(seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, int(rng.integers(3, 7)))
    J = spec.metric
    U = random_j_unitary(J, rng, spread=0.3)
    A = np.linalg.solve(U, spec.matrix() @ U)
    r, phi = float(rng.uniform(0.2, 3)), float(rng.uniform(-np.pi, np.pi))
    beta = complex(rng.normal(), rng.normal())
    B = r * np.exp(1j * phi) * A + beta * np.eye(J.n)
    th0, sd0 = _valid_angle(A, J, rng)
    if th0 is None:
        return
    theta = th0 + phi
    sd1 = support_bounds(B, J, theta)
    shift = (beta * cmath.exp(-1j * theta)).real
    scale = max(1.0, np.abs(B).max())
    assert sd1.valid
    assert sd1.plus_right == sd0.plus_right
    assert abs(sd1.lambda_L - (r * sd0.lambda_L + shift)) <= 1e-8 * scale
    assert abs(sd1.lambda_R - (r * sd0.lambda_R + shift)) <= 1e-8 * scale


def test_polynomials_agree_and_vanish_on_the_spectrum():
    A, J = dense(ORDER3_DISC)
    th = 0.4
    for lam in np.linalg.eigvals(h_theta(A, J, th)):
        assert abs(knr_poly_eval(A, J, lam, th)) <= 1e-9
    z = 0.3 - 0.2j
    val = curve_poly_eval(A, J, math.cos(th), math.sin(th), -z)
    assert val == pytest.approx(knr_poly_eval(A, J, z, th), rel=1e-12)
