"""Krein-space algebra on small dense complex matrices.

A metric is a diagonal signature matrix ``J`` with entries +1/-1; it induces
the indefinite inner product ``[x, y]_J = y^* J x``.  Everything here works on
plain ``numpy`` arrays of dtype ``complex128``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_TOL = 1e-10
MAX_ORDER = 16


class KreinError(ValueError):
    """Base class for errors raised by this package."""


class DimensionError(KreinError):
    """Operands have incompatible shapes."""


class StructureError(KreinError):
    """Input lacks the matrix structure an operation requires."""


class DegenerateError(KreinError):
    """The requested object degenerates (zero axis, coincident points, ...)."""


@dataclass(frozen=True)
class Metric:
    """Signature matrix ``J``, stored as its diagonal of +1/-1 entries."""

    signs: tuple[int, ...]

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if not signs:
            raise KreinError("metric must have at least one entry")
        if any(s not in (1, -1) for s in signs):
            raise KreinError("metric entries must be ±1")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def of(cls, signs: Iterable[float]) -> "Metric":
        vals = list(signs)
        if any(v not in (1, -1) for v in vals):
            raise KreinError("metric entries must be ±1")
        return cls(tuple(int(v) for v in vals))

    @property
    def n(self) -> int:
        return len(self.signs)

    @property
    def r(self) -> int:
        """Number of positive entries."""
        return sum(1 for s in self.signs if s > 0)

    @property
    def is_indefinite(self) -> bool:
        return 0 < self.r < self.n

    @property
    def diag(self) -> np.ndarray:
        return np.array(self.signs, dtype=float)

    def matrix(self) -> np.ndarray:
        return np.diag(self.diag).astype(complex)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Return ``J x`` (``x`` may be a vector or a matrix of column vectors)."""
        x = np.asarray(x)
        if x.shape[0] != self.n:
            raise DimensionError(f"metric of order {self.n} applied to shape {x.shape}")
        d = self.diag
        return d * x if x.ndim == 1 else d[:, None] * x

    def __neg__(self) -> "Metric":
        return Metric(tuple(-s for s in self.signs))

    def permuted(self, perm: Sequence[int]) -> "Metric":
        """Metric ``P^T J P`` for the permutation taking index ``i`` to ``perm[i]``."""
        return Metric(tuple(self.signs[p] for p in perm))


def as_matrix(A, name: str = "A") -> np.ndarray:
    """Validate a square finite complex matrix and return it as complex128."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise KreinError(f"{name} has non-finite entries")
    return M


def as_vector(x, name: str = "x") -> np.ndarray:
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"{name} must be a non-empty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise KreinError(f"{name} has non-finite entries")
    return v


def _check(A: np.ndarray, J: Metric):
    if A.shape[0] != J.n:
        raise DimensionError(f"matrix of order {A.shape[0]} with metric of order {J.n}")


def indefinite_inner(x, y, J: Metric) -> complex:
    """``[x, y]_J = y^* J x``."""
    x = as_vector(x, "x")
    y = as_vector(y, "y")
    if x.shape != y.shape or x.size != J.n:
        raise DimensionError(f"vectors of length {x.size}, {y.size} with metric of order {J.n}")
    return complex(np.vdot(y, J.apply(x)))


def j_norm(x, J: Metric) -> float:
    """The real number ``[x, x]_J``."""
    return indefinite_inner(x, x, J).real


def j_adjoint(A, J: Metric) -> np.ndarray:
    """``A^# = J A^* J``."""
    A = as_matrix(A)
    _check(A, J)
    d = J.diag
    return d[:, None] * A.conj().T * d[None, :]


def is_j_hermitian(A, J: Metric, tol: float = DEFAULT_TOL) -> bool:
    A = as_matrix(A)
    scale = max(1.0, np.abs(A).max())
    return bool(np.abs(A - j_adjoint(A, J)).max() <= tol * scale)


def cartesian_decompose(A, J: Metric) -> tuple[np.ndarray, np.ndarray]:
    """Split ``A = Re^J(A) + i Im^J(A)`` into two J-Hermitian parts."""
    A = as_matrix(A)
    Ah = j_adjoint(A, J)
    return (A + Ah) / 2, (A - Ah) / 2j


def h_theta(A, J: Metric, theta: float) -> np.ndarray:
    """``H_theta(A) = Re^J(A) cos(theta) + Im^J(A) sin(theta)``."""
    re, im = cartesian_decompose(A, J)
    return re * np.cos(theta) + im * np.sin(theta)


def is_j_unitary(U, J: Metric, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``max |U U^# - I| <= tol``."""
    if tol <= 0:
        raise KreinError("tol must be positive")
    U = as_matrix(U, "U")
    _check(U, J)
    return bool(np.abs(U @ j_adjoint(U, J) - np.eye(J.n)).max() <= tol)


def exchange(k: int) -> np.ndarray:
    """Exchange matrix ``E_k`` (identity with its columns reversed)."""
    return np.eye(k)[::-1].copy()


def hyperbolic_rotation(J: Metric, i: int, j: int, t: float) -> np.ndarray:
    """J-unitary rotation acting on coordinates ``i`` and ``j``.

    Indices of opposite sign get a hyperbolic rotation (cosh/sinh), indices of
    equal sign an ordinary one.
    """
    U = np.eye(J.n, dtype=complex)
    if J.signs[i] == J.signs[j]:
        c, s = np.cos(t), np.sin(t)
        U[i, i], U[i, j], U[j, i], U[j, j] = c, -s, s, c
    else:
        c, s = np.cosh(t), np.sinh(t)
        U[i, i], U[i, j], U[j, i], U[j, j] = c, s, s, c
    return U


def random_j_unitary(J: Metric, rng: np.random.Generator, steps: int = 6, spread: float = 0.6) -> np.ndarray:
    """Product of random phases and (hyperbolic) plane rotations."""
    n = J.n
    U = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, n)))
    for _ in range(steps if n > 1 else 0):
        i, j = rng.choice(n, size=2, replace=False)
        U = U @ hyperbolic_rotation(J, int(i), int(j), rng.uniform(-spread, spread))
        U = U @ np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, n)))
    return U


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def format_matrix(A) -> str:
    """Row-major text form for logs, entries ``a+bi`` with 17 significant digits."""
    A = as_matrix(A)
    return "\n".join(" ".join(format_complex(z) for z in row) for row in A)
