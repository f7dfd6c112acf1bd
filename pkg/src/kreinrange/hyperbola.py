"""Hyperbolas as boundaries of Krein-space numerical ranges.

A hyperbola is stored by its center, the direction ``gamma`` of the
transverse axis and the two semi-axes.  Its *disc* is the union of the two
convex regions on the focal side of each branch; ``membership`` is positive
there and negative between the branches.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .core import DegenerateError, KreinError, Metric, as_matrix, j_adjoint
from .spectra import SPLIT_TOL, support_sweep


def _reduce_angle(gamma: float) -> float:
    """Map an axis direction to (-pi/2, pi/2]."""
    g = math.remainder(gamma, math.pi)
    return math.pi / 2 if g <= -math.pi / 2 else g


@dataclass(frozen=True)
class Hyperbola:
    center: complex
    gamma: float
    semi_transverse: float
    semi_nontransverse: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "gamma", _reduce_angle(float(self.gamma)))
        if self.semi_transverse < 0 or self.semi_nontransverse < 0:
            raise KreinError("semi-axes must be non-negative")

    @classmethod
    def from_foci(cls, f1: complex, f2: complex, nontransverse_length: float) -> "Hyperbola":
        """Hyperbola with the given foci and full non-transverse axis length."""
        f1, f2 = complex(f1), complex(f2)
        c = abs(f1 - f2) / 2
        b = nontransverse_length / 2
        if c == 0 or not 0 < b < c:
            raise DegenerateError(f"no non-degenerate hyperbola with focal half-distance {c} and semi-axis {b}")
        return cls((f1 + f2) / 2, cmath.phase(f1 - f2), math.sqrt(c * c - b * b), b)

    @property
    def focal_half_distance(self) -> float:
        return math.hypot(self.semi_transverse, self.semi_nontransverse)

    @property
    def foci(self) -> tuple[complex, complex]:
        d = self.focal_half_distance * cmath.exp(1j * self.gamma)
        return self.center + d, self.center - d

    @property
    def vertices(self) -> tuple[complex, complex]:
        d = self.semi_transverse * cmath.exp(1j * self.gamma)
        return self.center + d, self.center - d

    @property
    def transverse_length(self) -> float:
        return 2 * self.semi_transverse

    @property
    def nontransverse_length(self) -> float:
        return 2 * self.semi_nontransverse

    @property
    def is_degenerate(self) -> bool:
        return not (self.semi_transverse > 0 and self.semi_nontransverse > 0)

    def canonical(self, z):
        """Coordinates of ``z`` after centering and rotating by ``-gamma``."""
        w = (np.asarray(z, dtype=complex) - self.center) * np.exp(-1j * self.gamma)
        return w.real, w.imag

    def membership(self, z):
        """Signed horizontal distance (in canonical frame) into the nearer branch.

        Positive on the focal side of a branch, zero on the curve, negative
        between the branches.
        """
        if self.is_degenerate:
            raise DegenerateError("membership is undefined for a degenerate hyperbola")
        X, Y = self.canonical(z)
        return np.abs(X) - self.semi_transverse * np.sqrt(1 + (Y / self.semi_nontransverse) ** 2)

    def branch(self, z):
        """+1 for the branch towards ``exp(i gamma)``, -1 for the other one."""
        X, _ = self.canonical(z)
        return np.where(X >= 0, 1, -1)

    def support(self, theta, branch: int):
        """Infimum of ``Re(exp(-i theta) z)`` over one branch region (``-inf`` if unbounded)."""
        theta = np.asarray(theta, dtype=float)
        phi = theta - self.gamma
        c = np.cos(phi) * branch
        s = np.sin(phi)
        a, b = self.semi_transverse, self.semi_nontransverse
        rad = (a * c) ** 2 - (b * s) ** 2
        base = np.real(np.exp(-1j * theta) * self.center)
        with np.errstate(invalid="ignore"):
            out = np.where((c > 0) & (rad > 0), base + np.sqrt(np.maximum(rad, 0)), -np.inf)
        return out

    def points(self, t, branch: int):
        """Points ``center + e^{i gamma}(+-a cosh t + i b sinh t)``."""
        t = np.asarray(t, dtype=float)
        w = branch * self.semi_transverse * np.cosh(t) + 1j * self.semi_nontransverse * np.sinh(t)
        return self.center + np.exp(1j * self.gamma) * w

    def transform(self, alpha: complex, beta: complex = 0) -> "Hyperbola":
        """Image under ``z -> alpha z + beta``."""
        alpha = complex(alpha)
        if alpha == 0:
            raise DegenerateError("alpha must be non-zero")
        m = abs(alpha)
        return Hyperbola(alpha * self.center + beta, self.gamma + cmath.phase(alpha),
                         m * self.semi_transverse, m * self.semi_nontransverse)

    def distance_to(self, other: "Hyperbola") -> float:
        """Max deviation of center, foci and semi-axes (foci unordered)."""
        f1, f2 = self.foci
        g1, g2 = other.foci
        dfoc = min(max(abs(f1 - g1), abs(f2 - g2)), max(abs(f1 - g2), abs(f2 - g1)))
        return max(abs(self.center - other.center), dfoc,
                   abs(self.semi_transverse - other.semi_transverse),
                   abs(self.semi_nontransverse - other.semi_nontransverse))

    def as_dict(self) -> dict:
        f1, f2 = self.foci
        return {
            "center": [self.center.real, self.center.imag],
            "gamma": self.gamma,
            "semi_transverse": self.semi_transverse,
            "semi_nontransverse": self.semi_nontransverse,
            "transverse_length": self.transverse_length,
            "nontransverse_length": self.nontransverse_length,
            "foci": [[f1.real, f1.imag], [f2.real, f2.imag]],
        }


@dataclass(frozen=True)
class HyperbolaFitParams:
    """Coefficients of ``z^2 = p + q cos(2 theta) + t sin(2 theta)``."""

    p: float
    q: float
    t: float

    @property
    def s(self) -> complex:
        return complex(self.q, self.t)

    @property
    def gamma(self) -> float:
        return cmath.phase(self.s) / 2

    @property
    def is_degenerate(self) -> bool:
        return not self.p ** 2 < abs(self.s) ** 2

    @property
    def theta0(self) -> float:
        if self.is_degenerate:
            raise DegenerateError("p^2 >= q^2 + t^2")
        m = abs(self.s)
        return math.atan(math.sqrt((m + self.p) / (m - self.p)))

    @property
    def window(self) -> tuple[float, float]:
        return self.gamma - self.theta0, self.gamma + self.theta0

    def value(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.p + self.q * np.cos(2 * theta) + self.t * np.sin(2 * theta)


def hyperbola_from_fit(params: HyperbolaFitParams, center: complex = 0) -> Hyperbola:
    """Hyperbola with semi-axes ``sqrt(|s| + p)``, ``sqrt(|s| - p)`` along ``arg(s)/2``."""
    if params.is_degenerate:
        raise DegenerateError(f"degenerate parameters: p^2 = {params.p ** 2} >= |s|^2 = {abs(params.s) ** 2}")
    m = abs(params.s)
    return Hyperbola(center, params.gamma, math.sqrt(m + params.p), math.sqrt(m - params.p))


def fit_params_of(h: Hyperbola) -> HyperbolaFitParams:
    """Inverse of :func:`hyperbola_from_fit` (center dropped)."""
    a2, b2 = h.semi_transverse ** 2, h.semi_nontransverse ** 2
    s = (a2 + b2) / 2 * cmath.exp(2j * h.gamma)
    return HyperbolaFitParams((a2 - b2) / 2, s.real, s.imag)


# -- shape classification payload ------------------------------------------

class Shape(str, Enum):
    HYPERBOLIC_DISC = "HyperbolicDisc"
    BIHYPERBOLIC_NESTED = "BihyperbolicNested"
    BIHYPERBOLIC_FLAT = "BihyperbolicFlat"
    WHOLE_PLANE = "WholePlane"
    DEGENERATE_RAYS = "DegenerateRays"
    REAL_LINE = "RealLine"
    POINT = "Point"
    NUMERIC_ONLY = "NumericOnly"


@dataclass
class RangeClassification:
    """Shape verdict for ``W^J(A)`` plus the trail of evidence behind it.

    ``hyperbolas`` holds one hyperbola for a disc, ``(outer, inner)`` for the
    nested case and the two generating hyperbolas for the flat case.
    ``points`` holds ray endpoints or the single point; ``line`` is
    ``(point, direction)`` for a line.
    """

    kind: Shape
    hyperbolas: tuple[Hyperbola, ...] = ()
    points: tuple[complex, ...] = ()
    line: Optional[tuple[complex, complex]] = None
    curve: Optional[object] = None
    corners: tuple[complex, ...] = ()
    flats: tuple[tuple[complex, complex], ...] = ()
    evidence: list[str] = field(default_factory=list)

    @property
    def hyperbola(self) -> Optional[Hyperbola]:
        return self.hyperbolas[0] if self.hyperbolas else None

    @property
    def outer(self) -> Optional[Hyperbola]:
        return self.hyperbolas[0] if self.kind == Shape.BIHYPERBOLIC_NESTED else None

    @property
    def inner(self) -> Optional[Hyperbola]:
        return self.hyperbolas[1] if self.kind == Shape.BIHYPERBOLIC_NESTED else None

    def as_dict(self) -> dict:
        pt = lambda z: [complex(z).real, complex(z).imag]
        out = {
            "kind": self.kind.value,
            "hyperbolas": [h.as_dict() for h in self.hyperbolas],
            "points": [pt(z) for z in self.points],
            "corners": [pt(z) for z in self.corners],
            "flats": [[pt(a), pt(b)] for a, b in self.flats],
            "evidence": list(self.evidence),
        }
        if self.line is not None:
            out["line"] = {"point": pt(self.line[0]), "direction": pt(self.line[1])}
        return out


def _is_scalar(A: np.ndarray, tol: float) -> bool:
    return bool(np.abs(A - A[0, 0] * np.eye(A.shape[0])).max() <= tol * max(1.0, np.abs(A).max()))


def hyperbola_2x2(A, J: Optional[Metric] = None, tol: float = 1e-10) -> RangeClassification:
    """Shape of ``W^J(A)`` for a 2x2 matrix and an indefinite 2x2 metric.

    Non-degenerate hyperbola with foci at the eigenvalues iff
    ``2 Re(conj(l1) l2) < Tr(A^# A) < |l1|^2 + |l2|^2``; half-rays or a line
    for (rotated, shifted) J-Hermitian matrices; a point for scalars.  Anything
    else is reported as ``NumericOnly``.
    """
    A = as_matrix(A)
    J = J or Metric((1, -1))
    if A.shape != (2, 2) or J.n != 2 or not J.is_indefinite:
        raise KreinError("hyperbola_2x2 needs a 2x2 matrix and J = diag(1,-1) up to permutation")
    if J.signs[0] < 0:
        E = np.array([[0, 1], [1, 0]], dtype=complex)
        A, J = E @ A @ E, Metric((1, -1))

    if _is_scalar(A, tol):
        return RangeClassification(Shape.POINT, points=(complex(A[0, 0]),), evidence=["A is scalar"])

    l1, l2 = np.linalg.eigvals(A)
    tr = complex(np.trace(j_adjoint(A, J) @ A)).real
    lo = 2 * (np.conj(l1) * l2).real
    hi = abs(l1) ** 2 + abs(l2) ** 2
    scale = max(1.0, hi)
    if lo + tol * scale < tr < hi - tol * scale:
        h = Hyperbola.from_foci(l1, l2, math.sqrt(hi - tr))
        ev = [f"2Re(conj(l1) l2) = {lo:.17g} < Tr(A^#A) = {tr:.17g} < |l1|^2+|l2|^2 = {hi:.17g}"]
        return RangeClassification(Shape.HYPERBOLIC_DISC, hyperbolas=(h,), evidence=ev)

    # rays or a line when A = mid I + e^{i phi} K with K J-Hermitian,
    # i.e. B = e^{2 i phi} B^# for the traceless part B
    mid = (l1 + l2) / 2
    B = A - mid * np.eye(2)
    Bh = j_adjoint(B, J)
    rot2 = np.vdot(Bh, B) / np.vdot(Bh, Bh)
    if abs(abs(rot2) - 1) <= 1e-9 and np.abs(B - rot2 * Bh).max() <= 1e-9 * max(1.0, np.abs(B).max()):
        rot = cmath.exp(0.5j * cmath.phase(rot2))
        mu = np.linalg.eigvals(B / rot)
        if np.abs(mu.imag).max() <= 1e-9 * max(1.0, np.abs(mu).max()):
            ends = tuple(sorted((complex(mid + rot * m.real) for m in mu), key=lambda z: (z.real, z.imag)))
            return RangeClassification(Shape.DEGENERATE_RAYS, points=ends,
                                       evidence=["A is a rotated and shifted J-Hermitian matrix with real spectrum"])
        return RangeClassification(Shape.REAL_LINE, line=(complex(mid), rot),
                                   evidence=["A is a rotated and shifted J-Hermitian matrix with non-real spectrum"])
    return RangeClassification(
        Shape.NUMERIC_ONLY,
        evidence=[f"hyperbola condition fails: {lo:.17g} < {tr:.17g} < {hi:.17g} is false"],
    )


# -- support-line fits -----------------------------------------------------

def _usable(sd, guard: float) -> bool:
    return sd.valid and sd.split is not None and sd.split.min_abs_j_norm >= guard


FIT_GUARD = 1e-6


def fit_quadratic(A, J: Metric, grid: Sequence[float], tol: float = SPLIT_TOL,
                  guard: float = FIT_GUARD) -> tuple[HyperbolaFitParams, float]:
    """Least-squares fit of ``lambda_R(theta)^2`` to ``p + q cos 2theta + t sin 2theta``.

    Only valid angles whose eigenvectors have ``|[v,v]_J| >= guard`` enter
    (at the window edges two eigenvalues coalesce and are ill-conditioned).
    The residual is the worst deviation of ``lambda_R^2`` from the fitted
    curve together with the worst ``|lambda_L + lambda_R|``.
    """
    sweep = support_sweep(A, J, grid, tol)
    use = [s for s in sweep if _usable(s, guard)]
    return fit_support_rows([s.theta for s in use], [s.lambda_L for s in use], [s.lambda_R for s in use])


def fit_support_rows(theta, lam_l, lam_r) -> tuple[HyperbolaFitParams, float]:
    """The least-squares core of :func:`fit_quadratic` on precomputed support values."""
    th = np.asarray(theta, dtype=float)
    ll = np.asarray(lam_l, dtype=float)
    lr = np.asarray(lam_r, dtype=float)
    if th.size < 3:
        raise DegenerateError(f"only {th.size} valid support samples; need at least 3")
    X = np.column_stack([np.ones_like(th), np.cos(2 * th), np.sin(2 * th)])
    coef, *_ = np.linalg.lstsq(X, lr ** 2, rcond=None)
    params = HyperbolaFitParams(*map(float, coef))
    residual = float(max(np.abs(lr ** 2 - X @ coef).max(), np.abs(ll + lr).max()))
    if params.is_degenerate:
        raise DegenerateError(f"fit is degenerate: p^2 >= q^2 + t^2 (p={params.p}, s={params.s})")
    return params, residual


def fit_center(sweep, guard: float = FIT_GUARD) -> tuple[complex, float]:
    """Center ``c`` with ``(lambda_L + lambda_R)/2 = Re(exp(-i theta) c)`` (least squares)."""
    use = [s for s in sweep if _usable(s, guard)]
    if len(use) < 2:
        raise DegenerateError("need at least 2 valid support samples to locate a center")
    th = np.array([s.theta for s in use])
    mid = np.array([(s.lambda_L + s.lambda_R) / 2 for s in use])
    X = np.column_stack([np.cos(th), np.sin(th)])
    coef, *_ = np.linalg.lstsq(X, mid, rcond=None)
    return complex(coef[0], coef[1]), float(np.abs(X @ coef - mid).max())


def hyperbola_membership(H: Hyperbola, z: complex) -> float:
    """Signed containment of ``z`` in the hyperbolic disc of ``H`` (see :meth:`Hyperbola.membership`)."""
    return float(H.membership(z))


def nested_in(inner: Hyperbola, outer: Hyperbola, tol: float = 1e-8) -> bool:
    """Vertices of ``inner`` lie strictly inside the disc of ``outer``.

    Besides the two vertices, the points at canonical parameter ``t = +-1``
    on both branches are tested so that the opening angle is seen too.
    """
    pts = list(inner.vertices)
    for br in (1, -1):
        pts.extend(inner.points([-1.0, 1.0], br))
    scale = max(1.0, outer.focal_half_distance)
    return bool(min(outer.membership(p) for p in pts) > tol * scale)
