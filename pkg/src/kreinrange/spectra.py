"""Eigenvalues of small dense matrices and their J-sign structure.

For a J-Hermitian ``H`` the real eigenvalues split into ``sigma_plus`` and
``sigma_minus`` according to the sign of ``[v, v]_J`` of their eigenvectors.
``H`` belongs to the class used throughout this package when all its
eigenvalues are real, none is neutral and the two sign classes do not
interlace.  In that case the two innermost eigenvalues give the support
lines ``lambda_L`` and ``lambda_R`` of the Krein-space numerical range.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import (
    DEFAULT_TOL,
    MAX_ORDER,
    DimensionError,
    KreinError,
    Metric,
    as_matrix,
    cartesian_decompose,
    h_theta,
    is_j_hermitian,
)

REAL_TOL = 1e-8
SPLIT_TOL = 1e-9
CLUSTER_TOL = 1e-8
WINDOW_BISECT_TOL = 1e-10


class ConvergenceError(KreinError):
    """The eigensolver failed or returned eigenpairs with a large residual."""

    def __init__(self, msg, matrix=None, iterations=None):
        super().__init__(msg)
        self.matrix = matrix
        self.iterations = iterations


@dataclass(frozen=True)
class EigenPair:
    value: complex
    vector: np.ndarray
    j_norm: Optional[float] = None

    def with_metric(self, J: Metric) -> "EigenPair":
        v = self.vector
        return EigenPair(self.value, v, float(np.vdot(v, J.apply(v)).real))


@dataclass(frozen=True)
class SignedPair:
    """An eigenpair with its J-sign resolved (``sign`` is 0 for neutral)."""

    value: complex
    vector: np.ndarray
    j_norm: float
    sign: int


@dataclass(frozen=True)
class SpectrumSplit:
    sigma_plus: tuple[float, ...]
    sigma_minus: tuple[float, ...]
    neutral: tuple[tuple[complex, float], ...]
    all_real: bool
    in_class_J: bool
    pairs: tuple[SignedPair, ...] = field(default=(), repr=False)

    @property
    def min_abs_j_norm(self) -> float:
        vals = [abs(p.j_norm) for p in self.pairs if p.sign != 0]
        return min(vals) if vals else 0.0


@dataclass(frozen=True)
class SupportData:
    """Support-line data of ``H_theta(A)``.

    When ``plus_right`` is true the positive part ``W_+`` lies in the half
    plane ``Re(exp(-i theta) z) >= lambda_R`` and ``-W_-`` in
    ``Re(exp(-i theta) z) <= lambda_L``; otherwise the roles are swapped.
    """

    theta: float
    lambda_L: float
    lambda_R: float
    valid: bool
    plus_right: Optional[bool] = None
    reason: str = "ok"
    split: Optional[SpectrumSplit] = field(default=None, repr=False, compare=False)


def _norm2(M: np.ndarray) -> float:
    """Frobenius norm, a cheap upper bound for the spectral norm."""
    return float(np.linalg.norm(M)) if M.size else 0.0


def eig_dense(M, tol: float = DEFAULT_TOL) -> list[EigenPair]:
    """All eigenpairs of ``M`` (with multiplicity), vectors of unit length.

    LAPACK's Hessenberg reduction and shifted QR do the work; every pair is
    re-checked against ``||M v - lambda v|| <= tol * ||M||``.
    """
    M = as_matrix(M, "M")
    n = M.shape[0]
    if n > MAX_ORDER:
        raise DimensionError(f"order {n} exceeds the supported maximum {MAX_ORDER}")
    if tol <= 0:
        raise KreinError("tol must be positive")
    try:
        w, V = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"QR iteration did not converge: {exc}", matrix=M) from exc
    V = V / np.linalg.norm(V, axis=0)
    scale = max(_norm2(M), np.finfo(float).tiny)
    res = np.linalg.norm(M @ V - V * w, axis=0)
    worst = float(res.max())
    if worst > tol * scale:
        raise ConvergenceError(f"eigen-residual {worst:.3e} exceeds {tol:.1e}*||M||", matrix=M)
    return [EigenPair(complex(w[k]), V[:, k].copy()) for k in range(n)]


def eigvals(M) -> np.ndarray:
    return np.array([p.value for p in eig_dense(M)])


def _clusters(values: np.ndarray, tol: float) -> list[list[int]]:
    order = np.argsort(values)
    groups: list[list[int]] = []
    for k in order:
        if groups and values[k] - values[groups[-1][-1]] <= tol:
            groups[-1].append(int(k))
        else:
            groups.append([int(k)])
    return groups


def split_spectrum(H, J: Metric, tol: float = SPLIT_TOL) -> SpectrumSplit:
    """Partition the spectrum of the J-Hermitian ``H`` by eigenvector J-sign.

    Repeated eigenvalues are classified by the inertia of the J-Gram matrix
    of their eigenvectors; a (near) singular Gram matrix or an ill-conditioned
    eigenvector basis makes the whole cluster neutral.
    """
    H = as_matrix(H, "H")
    if H.shape[0] != J.n:
        raise DimensionError(f"matrix of order {H.shape[0]} with metric of order {J.n}")
    if not is_j_hermitian(H, J, max(tol, 1e-12)):
        raise KreinError("split_spectrum requires a J-Hermitian matrix")
    pairs = eig_dense(H)
    scale = max(1.0, _norm2(H))
    w = np.array([p.value for p in pairs])
    V = np.column_stack([p.vector for p in pairs])
    real = np.abs(w.imag) <= REAL_TOL * scale
    all_real = bool(real.all())

    d = J.diag
    jnorms = np.einsum("ij,i,ij->j", V.conj(), d, V).real
    signed: list[SignedPair] = []
    neutral: list[tuple[complex, float]] = []
    for k in np.flatnonzero(~real):
        jn = float(jnorms[k])
        signed.append(SignedPair(complex(w[k]), V[:, k], jn, 0))
        neutral.append((complex(w[k]), abs(jn)))

    idx = np.flatnonzero(real)
    wr = w.real[idx]
    for group in _clusters(wr, CLUSTER_TOL * scale):
        cols = idx[group]
        lam = float(wr[group].mean())
        if len(cols) == 1:
            # a simple eigenvalue: the Gram matrix is the J-norm itself
            c = int(cols[0])
            jn = float(jnorms[c])
            if abs(jn) >= tol:
                signed.append(SignedPair(complex(lam), V[:, c], jn, 1 if jn > 0 else -1))
            else:
                signed.append(SignedPair(complex(lam), V[:, c], jn, 0))
                neutral.append((complex(lam), abs(jn)))
            continue
        B = V[:, cols]
        G = B.conj().T @ J.apply(B)
        G = (G + G.conj().T) / 2
        gval, gvec = np.linalg.eigh(G)
        basis_ok = np.linalg.svd(B, compute_uv=False).min() > 1e-6
        if basis_ok and np.abs(gval).min() >= tol:
            # J-orthogonal basis of the cluster's eigenspace
            Bd = B @ gvec
            Bd = Bd / np.linalg.norm(Bd, axis=0)
            for k in range(len(cols)):
                jn = float(np.vdot(Bd[:, k], J.apply(Bd[:, k])).real)
                signed.append(SignedPair(complex(lam), Bd[:, k], jn, 1 if jn > 0 else -1))
        else:
            for c in cols:
                jn = float(jnorms[c])
                signed.append(SignedPair(complex(lam), V[:, c], jn, 0))
                neutral.append((complex(lam), abs(jn)))

    plus = tuple(sorted((p.value.real for p in signed if p.sign > 0), reverse=True))
    minus = tuple(sorted((p.value.real for p in signed if p.sign < 0), reverse=True))
    in_class = all_real and not neutral
    if in_class and plus and minus:
        in_class = plus[-1] > minus[0] or minus[-1] > plus[0]
    signed.sort(key=lambda p: (-p.value.real, -p.sign))
    return SpectrumSplit(plus, minus, tuple(neutral), all_real, bool(in_class), tuple(signed))


def support_from_split(theta: float, sp: SpectrumSplit) -> SupportData:
    nan = float("nan")
    if not sp.all_real:
        return SupportData(theta, nan, nan, False, None, "nonreal", sp)
    if sp.neutral:
        return SupportData(theta, nan, nan, False, None, "neutral", sp)
    plus, minus = sp.sigma_plus, sp.sigma_minus
    if plus[-1] > minus[0]:
        return SupportData(theta, minus[0], plus[-1], True, True, "ok", sp)
    if minus[-1] > plus[0]:
        return SupportData(theta, plus[0], minus[-1], True, False, "ok", sp)
    return SupportData(theta, nan, nan, False, None, "interlacing", sp)


def support_bounds(A, J: Metric, theta: float, tol: float = SPLIT_TOL) -> SupportData:
    """Support bounds ``lambda_L``, ``lambda_R`` of ``H_theta(A)``.

    ``valid`` is false when the spectrum is non-real, has a neutral
    eigenvector, or the two sign classes interlace (ties included).
    """
    A = as_matrix(A)
    if not J.is_indefinite:
        raise KreinError("support bounds need an indefinite metric (0 < r < n)")
    sp = split_spectrum(h_theta(A, J, theta), J, tol)
    return support_from_split(float(theta), sp)


def theta_grid(size: int) -> np.ndarray:
    return 2 * np.pi * np.arange(size) / size


def support_sweep(A, J: Metric, thetas: Sequence[float], tol: float = SPLIT_TOL) -> list[SupportData]:
    A = as_matrix(A)
    if not J.is_indefinite:
        raise KreinError("support bounds need an indefinite metric (0 < r < n)")
    re, im = cartesian_decompose(A, J)
    out = []
    for t in thetas:
        sp = split_spectrum(re * np.cos(t) + im * np.sin(t), J, tol)
        out.append(support_from_split(float(t), sp))
    return out


def knr_poly_eval(A, J: Metric, z: complex, theta: float) -> complex:
    """``det(H_theta(A) - z I)``."""
    H = h_theta(A, J, theta)
    return complex(np.linalg.det(H - z * np.eye(H.shape[0])))


def curve_poly_eval(A, J: Metric, u: float, v: float, w: float) -> complex:
    """``det(u Re^J(A) + v Im^J(A) + w I)``, homogeneous of degree n."""
    re, im = cartesian_decompose(A, J)
    return complex(np.linalg.det(u * re + v * im + w * np.eye(re.shape[0])))


def validity_windows(A, J: Metric, grid_size: int = 720, tol: float = SPLIT_TOL,
                     xtol: float = WINDOW_BISECT_TOL) -> list[tuple[float, float]]:
    """Maximal open angle intervals on which ``H_theta(A)`` is in the class.

    The grid is scanned and each window edge refined by bisection to ``xtol``.
    Intervals are returned with ``start`` in ``[0, 2 pi)``; ``end`` may exceed
    ``2 pi`` for a window wrapping through zero.  A grid that is valid
    everywhere yields ``[(0, 2 pi)]``.
    """
    A = as_matrix(A)
    thetas = theta_grid(grid_size)
    ok = np.array([s.valid for s in support_sweep(A, J, thetas, tol)])
    if ok.all():
        return [(0.0, 2 * np.pi)]
    if not ok.any():
        return []

    def valid(t):
        return support_bounds(A, J, t, tol).valid

    def edge(t_in, t_out):
        while abs(t_out - t_in) > xtol:
            mid = (t_in + t_out) / 2
            if valid(mid):
                t_in = mid
            else:
                t_out = mid
        return t_in

    step = 2 * np.pi / grid_size
    n = grid_size
    first_bad = int(np.flatnonzero(~ok)[0])
    windows = []
    k = first_bad + 1
    while k < first_bad + n:
        if not ok[k % n]:
            k += 1
            continue
        j = k
        while ok[j % n]:
            j += 1
        # grid points k .. j-1 are valid, k-1 and j are not
        lo = edge(k * step, (k - 1) * step)
        hi = edge((j - 1) * step, j * step)
        shift = 2 * np.pi * np.floor(lo / (2 * np.pi))
        windows.append((lo - shift, hi - shift))
        k = j
    windows.sort()
    return windows


def omega_window(A, J: Metric, grid_size: int = 720, tol: float = SPLIT_TOL) -> Optional[tuple[float, float]]:
    """The widest validity window, or ``None`` if there is none on the grid."""
    ws = validity_windows(A, J, grid_size, tol)
    if not ws:
        return None
    return max(ws, key=lambda w: w[1] - w[0])
