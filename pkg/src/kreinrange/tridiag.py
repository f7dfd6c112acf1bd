"""Entry-wise hyperbolicity certificates for structured tridiagonal matrices.

Matrices here are ``T_m(c, a, b)``: tridiagonal, first superdiagonal ``b``,
first subdiagonal ``c`` and a real main diagonal ``a * signature(m)``, where
``signature(m)`` is also the metric ``J`` used with them:

* odd ``m``:  ``(1, -1, 1, ..., -1, 1)``
* even ``m``: ``(1, -1, ...)`` on the first half, mirrored on the second,
  e.g. ``(1, -1, -1, 1)`` and ``(1, -1, 1, 1, -1, 1)``.

Orders 4, 5 and 6 need centrosymmetric data (``c_j = b_{m-j}``).  Those
matrices are J-orthogonally similar to block-diagonal ones and the
certificates below read off the shape of ``W^J`` from the blocks.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .core import (
    DegenerateError,
    Metric,
    StructureError,
    as_matrix,
    cartesian_decompose,
    exchange,
    j_adjoint,
)
from .hyperbola import Hyperbola, Shape, hyperbola_2x2

CENTRO_TOL = 1e-12
GUARD = 1e-12


def signature(m: int) -> tuple[int, ...]:
    if m < 1:
        raise StructureError("order must be positive")
    if m % 2:
        return tuple(1 if k % 2 == 0 else -1 for k in range(m))
    half = tuple(1 if k % 2 == 0 else -1 for k in range(m // 2))
    return half + half[::-1]


@dataclass(frozen=True)
class TridiagonalSpec:
    """Data ``(c, a, b)`` of ``T_m``."""

    order: int
    a: float
    b: tuple[complex, ...]
    c: tuple[complex, ...]

    def __post_init__(self):
        b = tuple(complex(x) for x in self.b)
        c = tuple(complex(x) for x in self.c)
        if self.order < 2:
            raise StructureError("order must be at least 2")
        if len(b) != self.order - 1 or len(c) != self.order - 1:
            raise StructureError(f"order {self.order} needs {self.order - 1} off-diagonal entries, "
                                 f"got {len(b)} and {len(c)}")
        a = float(self.a)
        if not all(map(math.isfinite, [a] + [z.real for z in b + c] + [z.imag for z in b + c])):
            raise StructureError("non-finite entries")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @classmethod
    def centrosymmetric(cls, a: float, b: Sequence[complex]) -> "TridiagonalSpec":
        b = tuple(complex(x) for x in b)
        return cls(len(b) + 1, a, b, b[::-1])

    @property
    def parity(self) -> str:
        return "odd" if self.order % 2 else "even"

    @property
    def metric(self) -> Metric:
        return Metric(signature(self.order))

    @property
    def diagonal(self) -> np.ndarray:
        return self.a * np.array(signature(self.order), dtype=float)

    def matrix(self) -> np.ndarray:
        T = np.diag(self.diagonal.astype(complex))
        idx = np.arange(self.order - 1)
        T[idx, idx + 1] = self.b
        T[idx + 1, idx] = self.c
        return T

    def is_centrosymmetric(self, tol: float = CENTRO_TOL) -> bool:
        scale = max([1.0] + [abs(z) for z in self.b + self.c])
        return all(abs(self.c[j] - self.b[-1 - j]) <= tol * scale for j in range(self.order - 1))

    def swapped(self, positions) -> "TridiagonalSpec":
        """Exchange ``b_j`` and ``c_j`` at the given (0-based) positions."""
        b, c = list(self.b), list(self.c)
        for j in positions:
            b[j], c[j] = c[j], b[j]
        return TridiagonalSpec(self.order, self.a, tuple(b), tuple(c))

    def as_dict(self) -> dict:
        pair = lambda z: [z.real, z.imag]
        return {"kind": "tridiagonal", "order": self.order, "a": self.a,
                "b": [pair(z) for z in self.b], "c": [pair(z) for z in self.c]}


@dataclass(frozen=True)
class NormalForm:
    """``A = exp(i tau) T + delta I``."""

    T: TridiagonalSpec
    tau: float
    delta: complex

    def matrix(self) -> np.ndarray:
        m = self.T.order
        return np.exp(1j * self.tau) * self.T.matrix() + self.delta * np.eye(m)

    def to_original(self, h: Hyperbola) -> Hyperbola:
        return h.transform(cmath.exp(1j * self.tau), self.delta)

    def point_to_original(self, z: complex) -> complex:
        return cmath.exp(1j * self.tau) * complex(z) + self.delta


def normal_form(A, J: Optional[Metric] = None, tol: float = 1e-12) -> NormalForm:
    """Write a tridiagonal ``A`` as ``exp(i tau) T_m(c, a, b) + delta I``.

    The diagonal must have the form ``kappa * signature + delta``; ``kappa``
    and ``delta`` come from ``Tr(JA)`` and ``Tr(A)`` by solving the 2x2
    system they satisfy, ``a = |kappa|`` and ``tau = arg kappa`` (0 when
    ``kappa = 0``).
    """
    A = as_matrix(A)
    m = A.shape[0]
    if m < 2:
        raise StructureError("order must be at least 2")
    sig = np.array(signature(m), dtype=float)
    if J is not None and tuple(J.signs) != tuple(int(s) for s in sig):
        raise StructureError(f"metric {J.signs} does not match the order-{m} signature {tuple(map(int, sig))}")
    scale = max(1.0, float(np.abs(A).max()))
    i, j = np.indices(A.shape)
    if np.abs(A[np.abs(i - j) > 1]).max(initial=0.0) > tol * scale:
        raise StructureError("matrix is not tridiagonal")

    trJA = complex(np.sum(sig * np.diag(A)))
    trA = complex(np.trace(A))
    s_j = float(sig.sum())
    det = m * m - s_j * s_j
    kappa = (m * trJA - s_j * trA) / det
    delta = (m * trA - s_j * trJA) / det
    if abs(kappa) <= tol * scale:
        kappa = 0j
    resid = np.abs(np.diag(A) - kappa * sig - delta).max()
    if resid > 1e-10 * scale:
        raise StructureError(f"diagonal is not (quasi-)biperiodic after the shift (residual {resid:.3e})")
    tau = cmath.phase(kappa) if kappa != 0 else 0.0
    rot = cmath.exp(-1j * tau)
    b = tuple(complex(A[k, k + 1] * rot) for k in range(m - 1))
    c = tuple(complex(A[k + 1, k] * rot) for k in range(m - 1))
    return NormalForm(TridiagonalSpec(m, abs(kappa), b, c), tau, complex(delta))


def _strict(lo: float, x: float, hi: float, scale: float) -> bool:
    g = GUARD * max(1.0, scale)
    return lo + g < x < hi - g


def _hyperbola_or_none(f1, f2, length_sq):
    try:
        return Hyperbola.from_foci(f1, f2, math.sqrt(max(length_sq, 0.0)))
    except DegenerateError:
        return None


# -- order 3 ---------------------------------------------------------------

@dataclass(frozen=True)
class Certificate3:
    Delta: complex
    traceAdjA: float
    verdict: bool
    hyperbola: Optional[Hyperbola]
    third_eigenvalue: float
    p: float
    q: float
    t: float
    note: str = ""

    @property
    def foci(self) -> tuple[complex, complex]:
        r = cmath.sqrt(self.Delta)
        return r, -r


def _need(spec: TridiagonalSpec, order: int, centro: bool = False):
    if spec.order != order:
        raise StructureError(f"expected an order-{order} tridiagonal spec, got order {spec.order}")
    if centro and not spec.is_centrosymmetric():
        raise StructureError(f"order-{order} certificate needs centrosymmetric data (c_j = b_(m-j))")


def certify_order3(spec: TridiagonalSpec) -> Certificate3:
    """Hyperbolic-disc test ``a^2 - 2|D| < Tr(A^# A) < a^2 + 2|D|`` with ``D = a^2 + b1 c1 + b2 c2``."""
    _need(spec, 3)
    a = spec.a
    (b1, b2), (c1, c2) = spec.b, spec.c
    delta = a * a + b1 * c1 + b2 * c2
    offsq = abs(b1) ** 2 + abs(b2) ** 2 + abs(c1) ** 2 + abs(c2) ** 2
    tr = 3 * a * a - offsq
    p = (tr - a * a) / 4
    verdict = _strict(a * a - 2 * abs(delta), tr, a * a + 2 * abs(delta), a * a + 2 * abs(delta) + offsq)
    h = None
    note = ""
    if verdict:
        r = cmath.sqrt(delta)
        h = Hyperbola.from_foci(r, -r, math.sqrt(2 * abs(delta) - 2 * a * a + offsq))
    elif abs(abs(tr - a * a) - 2 * abs(delta)) <= GUARD * max(1.0, a * a + 2 * abs(delta) + offsq):
        note = "at boundary"
    return Certificate3(complex(delta), float(tr), verdict, h, a, p, delta.real / 2, delta.imag / 2, note)


# -- order 5 ---------------------------------------------------------------

SQ2 = math.sqrt(2.0)


def q_matrix(m: int) -> np.ndarray:
    """The real J-orthogonal matrix block-diagonalizing centrosymmetric ``T_m``."""
    s = SQ2 / 2
    if m == 5:
        E = exchange(2)
        Q = np.zeros((5, 5))
        Q[:2, :2], Q[:2, 3:] = np.eye(2), E
        Q[2, 2] = SQ2
        Q[3:, :2], Q[3:, 3:] = -E, np.eye(2)
        return s * Q
    if m in (4, 6):
        k = m // 2
        E = exchange(k)
        return s * np.block([[np.eye(k), E], [-E, np.eye(k)]])
    raise StructureError(f"no block reduction for order {m}")


def block_residual(spec: TridiagonalSpec, blocks: Sequence[np.ndarray]) -> float:
    A = spec.matrix()
    Q = q_matrix(spec.order)
    B = j_adjoint(Q, spec.metric) @ A @ Q
    D = np.zeros_like(B)
    k = 0
    for blk in blocks:
        n = blk.shape[0]
        D[k:k + n, k:k + n] = blk
        k += n
    return float(np.abs(B - D).max())


def block_reduce5(spec: TridiagonalSpec) -> tuple[np.ndarray, np.ndarray]:
    """Blocks ``R`` (2x2, metric diag(1,-1)) and ``S`` (3x3, metric diag(1,-1,1)) of ``Q^# A Q``."""
    _need(spec, 5, centro=True)
    a = spec.a
    b1, b2, b3, b4 = spec.b
    R = np.array([[a, b1], [b4, -a]], dtype=complex)
    S = np.array([[a, SQ2 * b3, 0], [SQ2 * b2, -a, b4], [0, b1, a]], dtype=complex)
    return R, S


@dataclass(frozen=True)
class Certificate5:
    Delta1: complex
    Delta2: complex
    M1: float
    M2: float
    H1: Union[Hyperbola, tuple[complex, complex]]
    H2: Optional[Hyperbola]
    verdict: bool
    note: str = ""

    @property
    def H1_degenerate(self) -> bool:
        return not isinstance(self.H1, Hyperbola)


def certify_order5(spec: TridiagonalSpec) -> Certificate5:
    """Bounded by the hyperbola with foci ``+-sqrt(D2)`` iff ``|M2| < 2|D2|``."""
    _need(spec, 5, centro=True)
    a = spec.a
    b1, b2, b3, b4 = spec.b
    d1 = a * a + b1 * b4
    d2 = d1 + 2 * b2 * b3
    m1 = 2 * a * a - abs(b1) ** 2 - abs(b4) ** 2
    m2 = m1 - 2 * abs(b2) ** 2 - 2 * abs(b3) ** 2
    scale = a * a + sum(abs(z) ** 2 for z in spec.b)
    verdict = _strict(-2 * abs(d2), m2, 2 * abs(d2), scale)
    r1, r2 = cmath.sqrt(d1), cmath.sqrt(d2)
    h1 = None
    if _strict(-2 * abs(d1), m1, 2 * abs(d1), scale):
        h1 = _hyperbola_or_none(r1, -r1, 2 * abs(d1) - m1)
    h2 = _hyperbola_or_none(r2, -r2, 2 * abs(d2) - m2) if verdict else None
    note = ""
    if not verdict and abs(abs(m2) - 2 * abs(d2)) <= GUARD * max(1.0, scale):
        note = "at boundary"
    return Certificate5(complex(d1), complex(d2), float(m1), float(m2),
                        h1 if h1 is not None else (r1, -r1), h2, verdict, note)


# -- order 4 ---------------------------------------------------------------

def block_reduce4(spec: TridiagonalSpec) -> tuple[np.ndarray, np.ndarray]:
    """The 2x2 matrices ``S_+`` and ``S_-`` (metric diag(1,-1)).

    ``Q^# A Q = S_- (+) R`` where ``R`` carries metric ``-diag(1,-1)`` and
    ``E_2 R E_2 = S_+``, so the two blocks have the ranges of ``S_+``, ``S_-``.
    """
    _need(spec, 4, centro=True)
    a = spec.a
    b1, b2, b3 = spec.b
    sp = np.array([[a, b1], [b3, b2 - a]], dtype=complex)
    sm = np.array([[a, b1], [b3, -b2 - a]], dtype=complex)
    return sp, sm


def block_reduce4_r(spec: TridiagonalSpec) -> np.ndarray:
    a = spec.a
    b1, b2, b3 = spec.b
    return np.array([[b2 - a, b3], [b1, a]], dtype=complex)


@dataclass(frozen=True)
class Certificate4:
    Delta: complex
    DeltaPlus: complex
    DeltaMinus: complex
    M: float
    MPlus: float
    MMinus: float
    HPlus: Optional[Hyperbola]
    HMinus: Optional[Hyperbola]
    verdict: bool
    subcase: str
    MPlus_alt: float = 0.0
    MMinus_alt: float = 0.0
    verdict_alt: bool = False
    pairing: str = ""
    nontransverse_entrywise: tuple[float, float] = (float("nan"), float("nan"))
    notes: tuple[str, ...] = ()

    @property
    def foci_plus(self) -> tuple[complex, complex]:
        h = self._half_b2
        r = cmath.sqrt(self.DeltaPlus)
        return h + r, h - r

    @property
    def foci_minus(self) -> tuple[complex, complex]:
        h = self._half_b2
        r = cmath.sqrt(self.DeltaMinus)
        return -h + r, -h - r

    _half_b2: complex = field(default=0j, repr=False)


def certify_order4(spec: TridiagonalSpec) -> Certificate4:
    """Bihyperbolic test for centrosymmetric ``T_4``.

    ``D = a^2 + b1 b3``, ``D_pm = D -+ a b2 + b2^2/4``, ``M = 2a^2 - |b1|^2 - |b3|^2``
    and ``M_pm = M + |b2|^2/2 -+ 2a Re(b2)``.  Two sign pairings of the
    ``2a Re(b2)`` term are in circulation; the one reproducing
    ``|l1|^2 + |l2|^2 - Tr(J S^* J S) = 2|D_pm| - M_pm`` on the 2x2 blocks
    ``S_pm`` is used and the other is kept in ``*_alt`` fields.
    """
    _need(spec, 4, centro=True)
    a = spec.a
    b1, b2, b3 = spec.b
    d = a * a + b1 * b3
    dp = d - a * b2 + b2 * b2 / 4
    dm = d + a * b2 + b2 * b2 / 4
    m = 2 * a * a - abs(b1) ** 2 - abs(b3) ** 2
    cross = 2 * a * b2.real
    m_minus_sign = (m + abs(b2) ** 2 / 2 - cross, m + abs(b2) ** 2 / 2 + cross)
    m_plus_sign = (m + abs(b2) ** 2 / 2 + cross, m + abs(b2) ** 2 / 2 - cross)
    scale = a * a + sum(abs(z) ** 2 for z in spec.b)

    sp, sm = block_reduce4(spec)
    J1 = Metric((1, -1))
    half = abs(b2) ** 2 / 2
    direct = tuple(float(np.trace(j_adjoint(S, J1) @ S).real) - half for S in (sp, sm))
    err_minus = max(abs(direct[0] - m_minus_sign[0]), abs(direct[1] - m_minus_sign[1]))
    err_plus = max(abs(direct[0] - m_plus_sign[0]), abs(direct[1] - m_plus_sign[1]))
    notes = []
    if err_minus <= err_plus:
        (mp, mm), (mp_alt, mm_alt), pairing = m_minus_sign, m_plus_sign, "M_pm = M + |b2|^2/2 -+ 2a Re(b2)"
    else:
        (mp, mm), (mp_alt, mm_alt), pairing = m_plus_sign, m_minus_sign, "M_pm = M + |b2|^2/2 +- 2a Re(b2)"
    if abs(cross) > GUARD * max(1.0, scale):
        notes.append(f"sign pairing chosen by the direct 2x2 computation: {pairing}; "
                     f"opposite pairing gives M_+ = {mp_alt:.17g}, M_- = {mm_alt:.17g}")

    def both(mplus, mminus):
        return (_strict(-2 * abs(dp), mplus, 2 * abs(dp), scale)
                and _strict(-2 * abs(dm), mminus, 2 * abs(dm), scale))

    if abs(b2) <= GUARD * max(1.0, math.sqrt(scale)):
        verdict = _strict(-2 * abs(d), m, 2 * abs(d), scale)
        r = cmath.sqrt(d)
        h = _hyperbola_or_none(r, -r, 2 * abs(d) - m) if verdict else None
        return Certificate4(complex(d), complex(dp), complex(dm), float(m), float(m), float(m), h, h, verdict,
                            "b2zero-disc", float(m), float(m), verdict,
                            pairing, (math.sqrt(max(2 * abs(d) - m, 0)),) * 2, tuple(notes), b2 / 2)

    verdict = both(mp, mm)
    verdict_alt = both(mp_alt, mm_alt)
    if verdict != verdict_alt:
        notes.append(f"verdict depends on the sign pairing (opposite pairing gives {verdict_alt})")
    hp = hm = None
    if verdict:
        cp, cm = hyperbola_2x2(sp, J1), hyperbola_2x2(sm, J1)
        hp = cp.hyperbola if cp.kind == Shape.HYPERBOLIC_DISC else None
        hm = cm.hyperbola if cm.kind == Shape.HYPERBOLIC_DISC else None
    entry = (math.sqrt(max(2 * abs(dp) - mp, 0.0)), math.sqrt(max(2 * abs(dm) - mm, 0.0)))
    return Certificate4(complex(d), complex(dp), complex(dm), float(m), float(mp), float(mm), hp, hm, verdict,
                        "bihyperbolic-a" if verdict else "not-certified", float(mp_alt), float(mm_alt),
                        verdict_alt, pairing, entry, tuple(notes), b2 / 2)


# -- order 6 ---------------------------------------------------------------

def block_reduce6(spec: TridiagonalSpec) -> tuple[np.ndarray, np.ndarray]:
    """The two 3x3 blocks of ``Q^# A Q`` (both with metric diag(1,-1,1)).

    The first carries ``a - b3`` in its last diagonal entry, the second
    ``a + b3`` in its first; for ``b3 = 0`` they are exchange-similar.
    """
    _need(spec, 6, centro=True)
    a = spec.a
    b1, b2, b3, b4, b5 = spec.b
    S = np.array([[a, b1, 0], [b5, -a, b2], [0, b4, a - b3]], dtype=complex)
    Rp = np.array([[a + b3, b4, 0], [b2, -a, b5], [0, b1, a]], dtype=complex)
    return S, Rp


CUBIC_MONOMIALS = tuple((i, j, 3 - i - j) for i in range(3, -1, -1) for j in range(3 - i, -1, -1))


def _monomial_name(e) -> str:
    parts = []
    for var, k in zip("uvw", e):
        if k:
            parts.append(var if k == 1 else f"{var}^{k}")
    return "*".join(parts)


def cubic_coefficients(B, J: Metric, rng: Optional[np.random.Generator] = None) -> dict[str, float]:
    """Coefficients of ``det(u Re^J(B) + v Im^J(B) + w I)`` for a 3x3 block."""
    rng = rng or np.random.default_rng(0)
    re, im = cartesian_decompose(B, J)
    pts = rng.normal(size=(30, 3))
    vals = np.array([np.linalg.det(u * re + v * im + w * np.eye(3)).real for u, v, w in pts])
    X = np.column_stack([np.prod(pts ** np.array(e), axis=1) for e in CUBIC_MONOMIALS])
    coef, *_ = np.linalg.lstsq(X, vals, rcond=None)
    coef[np.abs(coef) <= 1e-13 * np.abs(coef).max()] = 0.0
    return {_monomial_name(e): float(c) for e, c in zip(CUBIC_MONOMIALS, coef)}


def eval_cubic(coef: dict[str, float], u, v, w):
    total = 0.0
    for e in CUBIC_MONOMIALS:
        total = total + coef.get(_monomial_name(e), 0.0) * u ** e[0] * v ** e[1] * w ** e[2]
    return total


@dataclass(frozen=True)
class Certificate6:
    b3zero: bool
    focus_sq: complex
    traceS: float
    verdict: bool
    K: Optional[Hyperbola]
    cubic_factors: Optional[tuple[dict, dict]]
    note: str = ""


def certify_order6(spec: TridiagonalSpec) -> Certificate6:
    """Hyperbolic-disc test for centrosymmetric ``T_6``; only ``b3 = 0`` can pass.

    With ``b3 = 0`` the range is that of the 3x3 block ``S`` and is the disc of
    the hyperbola with foci ``+-sqrt(a^2 + b1 b5 + b2 b4)`` iff
    ``|Tr(J2 S^* J2 S) - a^2| < 2|a^2 + b1 b5 + b2 b4|``.
    """
    _need(spec, 6, centro=True)
    a = spec.a
    b1, b2, b3, b4, b5 = spec.b
    J2 = Metric((1, -1, 1))
    S, Rp = block_reduce6(spec)
    fsq = a * a + b1 * b5 + b2 * b4
    trS = float(np.trace(j_adjoint(S, J2) @ S).real)
    scale = a * a + sum(abs(z) ** 2 for z in spec.b)
    b3zero = abs(b3) <= GUARD * max(1.0, math.sqrt(scale))
    if not b3zero:
        factors = (cubic_coefficients(S, J2), cubic_coefficients(Rp, J2))
        return Certificate6(False, complex(fsq), trS, False, None, factors,
                            "b3 != 0: the blocks carry two cubic factors")
    verdict = _strict(-2 * abs(fsq), trS - a * a, 2 * abs(fsq), scale)
    K = None
    if verdict:
        r = cmath.sqrt(fsq)
        K = _hyperbola_or_none(r, -r, 2 * abs(fsq) - 2 * a * a + abs(b1) ** 2 + abs(b2) ** 2
                               + abs(b4) ** 2 + abs(b5) ** 2)
    return Certificate6(True, complex(fsq), trS, verdict, K, None)


# -- dispatch --------------------------------------------------------------

def certify(spec: TridiagonalSpec):
    """Run the certificate matching the order of the tridiagonal data (3 to 6)."""
    fn = {3: certify_order3, 4: certify_order4, 5: certify_order5, 6: certify_order6}.get(spec.order)
    if fn is None:
        raise StructureError(f"unsupported order {spec.order}")
    return fn(spec)


def certified_hyperbolas(cert) -> list[Hyperbola]:
    """Hyperbolas a certificate asserts to bound (part of) the range."""
    if isinstance(cert, Certificate3):
        return [cert.hyperbola] if cert.verdict else []
    if isinstance(cert, Certificate5):
        return [cert.H2] if cert.verdict and cert.H2 is not None else []
    if isinstance(cert, Certificate4):
        return [h for h in (cert.HPlus, cert.HMinus) if h is not None] if cert.verdict else []
    if isinstance(cert, Certificate6):
        return [cert.K] if cert.verdict and cert.K is not None else []
    return []


def certificate_dict(cert) -> dict:
    """JSON-ready dump of a certificate (complex numbers as ``[re, im]``)."""

    def conv(x):
        if isinstance(x, Hyperbola):
            return x.as_dict()
        if isinstance(x, complex):
            return [x.real, x.imag]
        if isinstance(x, (tuple, list)):
            return [conv(y) for y in x]
        if isinstance(x, dict):
            return {k: conv(v) for k, v in x.items()}
        if isinstance(x, float) and not math.isfinite(x):
            return None
        return x

    out = {k: conv(v) for k, v in cert.__dict__.items() if not k.startswith("_")}
    out["type"] = type(cert).__name__
    return out
