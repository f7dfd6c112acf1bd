"""Boundary generating curves and shape classification of ``W^J(A)``.

The curve is sampled from the eigenvectors of ``H_theta(A)``: an eigenpair
``(lam, v)`` with ``[v, v]_J != 0`` gives the point ``[Av, v]_J / [v, v]_J``,
tagged with the sign of ``[v, v]_J``, on the support line
``cos(theta) Re z + sin(theta) Im z = lam``.

Classification splits the curve into hyperbola and point components (foci
and points are eigenvalues of ``A``), fits the support function over the
angles where it exists and decides between a hyperbolic disc, nested or flat
bihyperbolic boundaries, the whole plane and a numeric-only fallback.
"""

from __future__ import annotations

import cmath
import io
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import DegenerateError, KreinError, Metric, as_matrix, cartesian_decompose, h_theta
from .hyperbola import (
    FIT_GUARD,
    Hyperbola,
    HyperbolaFitParams,
    RangeClassification,
    Shape,
    _is_scalar,
    fit_params_of,
    fit_support_rows,
    hyperbola_2x2,
    hyperbola_from_fit,
    nested_in,
)
from .spectra import SPLIT_TOL, eig_dense, split_spectrum, support_from_split, theta_grid

DEFAULT_GRID = 720
CONTACT_TOL = 1e-8
ON_CURVE_TOL = 1e-7
CORNER_TOL = 1e-7
FLAT_RATIO = 10.0


class InvalidAngleError(KreinError):
    """``H_theta(A)`` is not in the class with well-defined support lines."""

    def __init__(self, msg, reason: str = ""):
        super().__init__(msg)
        self.reason = reason


@dataclass(frozen=True)
class TaggedPoint:
    z: complex
    sign: int
    theta: float
    lam: float = float("nan")


@dataclass
class BoundaryCurve:
    """Sampled curve.

    ``support`` has one row ``(theta, lambda_L, lambda_R, plus_right, min |[v,v]_J|)``
    per valid angle.
    """

    points: list[TaggedPoint]
    invalid_thetas: list[float]
    support: list[tuple] = field(default_factory=list)
    reasons: dict = field(default_factory=dict)

    def values(self, sign: Optional[int] = None) -> np.ndarray:
        return np.array([p.z for p in self.points if sign is None or p.sign == sign], dtype=complex)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("theta,re,im,sign\n")
        for p in self.points:
            buf.write(f"{p.theta:.17g},{p.z.real:.17g},{p.z.imag:.17g},{p.sign:d}\n")
        return buf.getvalue()


def _quotients(A: np.ndarray, J: Metric, pairs, theta: float) -> list[TaggedPoint]:
    out = []
    for sp in pairs:
        v = sp.vector
        jn = float(np.vdot(v, J.apply(v)).real)
        z = complex(np.vdot(v, J.apply(A @ v))) / jn
        out.append(TaggedPoint(z, 1 if jn > 0 else -1, float(theta), float(sp.value.real)))
    return out


def boundary_points(A, J: Metric, theta: float, tol: float = SPLIT_TOL) -> list[TaggedPoint]:
    """Tagged points ``[Av,v]_J/[v,v]_J`` for the eigenvectors of ``H_theta(A)``.

    A scalar ``H_theta`` (all support lines coincide) yields the diagonal
    entries of ``A`` tagged with the metric's signs.
    """
    A = as_matrix(A)
    H = h_theta(A, J, theta)
    if _is_scalar(H, 1e-12):
        return [TaggedPoint(complex(A[k, k]), J.signs[k], float(theta), float(H[0, 0].real))
                for k in range(J.n)]
    sp = split_spectrum(H, J, tol)
    if J.is_indefinite:
        sd = support_from_split(float(theta), sp)
        if not sd.valid:
            raise InvalidAngleError(f"H_theta is not in the class at theta={theta:.17g} ({sd.reason})", sd.reason)
    elif not sp.all_real or sp.neutral:
        raise InvalidAngleError(f"unexpected spectrum at theta={theta:.17g}", "nonreal")
    return _quotients(A, J, [p for p in sp.pairs if p.sign != 0], theta)


def sweep_boundary(A, J: Metric, grid_size: int = DEFAULT_GRID, tol: float = SPLIT_TOL) -> BoundaryCurve:
    """``boundary_points`` over a uniform grid of ``[0, 2 pi)``; invalid angles are recorded."""
    if grid_size < 16:
        raise KreinError("grid_size must be at least 16")
    A = as_matrix(A)
    re, im = cartesian_decompose(A, J)
    pts: list[TaggedPoint] = []
    bad: list[float] = []
    support = []
    reasons: dict[str, int] = {}
    for th in theta_grid(grid_size):
        th = float(th)
        H = re * np.cos(th) + im * np.sin(th)
        if _is_scalar(H, 1e-12):
            pts.extend(TaggedPoint(complex(A[k, k]), J.signs[k], th, float(H[0, 0].real)) for k in range(J.n))
            continue
        sp = split_spectrum(H, J, tol)
        if J.is_indefinite:
            sd = support_from_split(th, sp)
            if not sd.valid:
                bad.append(th)
                reasons[sd.reason] = reasons.get(sd.reason, 0) + 1
                continue
            support.append((th, sd.lambda_L, sd.lambda_R, bool(sd.plus_right), sp.min_abs_j_norm))
        elif not sp.all_real or sp.neutral:
            bad.append(th)
            continue
        pts.extend(_quotients(A, J, [p for p in sp.pairs if p.sign != 0], th))
    pts.sort(key=lambda p: p.theta)
    return BoundaryCurve(pts, bad, support, reasons)


# -- pseudo-convex joins ---------------------------------------------------

@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex

    def contains(self, z: complex, tol: float = 1e-12) -> bool:
        d = self.end - self.start
        t = ((complex(z) - self.start) * d.conjugate()).real / abs(d) ** 2
        return -tol <= t <= 1 + tol and abs(self.start + t * d - z) <= tol * max(1.0, abs(d))


@dataclass(frozen=True)
class RayPair:
    """``{t z1 + (1 - t) z2 : t <= 0 or t >= 1}``."""

    z1: complex
    z2: complex

    def contains(self, z: complex, tol: float = 1e-12) -> bool:
        d = self.z1 - self.z2
        t = ((complex(z) - self.z2) * d.conjugate()).real / abs(d) ** 2
        on_line = abs(self.z2 + t * d - z) <= tol * max(1.0, abs(d))
        return on_line and (t <= tol or t >= 1 - tol)


def pseudo_convex_join(p1: TaggedPoint, p2: TaggedPoint, tol: float = 1e-14):
    """Segment for equal signs, the complementary ray pair for opposite signs."""
    if p1.sign not in (1, -1) or p2.sign not in (1, -1):
        raise KreinError("signs must be +1 or -1")
    if abs(p1.z - p2.z) <= tol * max(1.0, abs(p1.z), abs(p2.z)):
        if p1.sign != p2.sign:
            raise DegenerateError("coincident points with opposite signs")
        raise DegenerateError("coincident points")
    if p1.sign == p2.sign:
        return Segment(p1.z, p2.z)
    return RayPair(p1.z, p2.z)


# -- curve components ------------------------------------------------------

@dataclass
class CurveComponents:
    hyperbolas: list[tuple[Hyperbola, int]]
    points: list[tuple[complex, int]]
    residual_degree: int
    evidence: list[str]


def _test_angles(k: int = 11) -> np.ndarray:
    return 0.1234567 + 2 * np.pi * np.arange(k) / k


def decompose_curve(A, J: Metric, tol: float = ON_CURVE_TOL) -> CurveComponents:
    """Hyperbola and point components of the boundary generating curve.

    A hyperbola with foci at two eigenvalues ``mu_i``, ``mu_j`` of ``A`` is a
    component when ``mid(theta) +- sqrt(p + Re(s exp(-2i theta)))`` are
    eigenvalues of ``H_theta(A)`` at every test angle, with
    ``mid(theta) = Re(exp(-i theta)(mu_i + mu_j)/2)`` and
    ``s = ((mu_i - mu_j)/2)^2 / 2``; the real ``p`` is read off one angle.
    An eigenvalue ``mu`` is a point component when ``Re(exp(-i theta) mu)``
    is an eigenvalue of every ``H_theta(A)``.  Multiplicities are eigenvalue
    counts of ``H_theta`` at the predicted roots (minimum over test angles).
    """
    A = as_matrix(A)
    n = A.shape[0]
    re, im = cartesian_decompose(A, J)
    scale = max(1.0, float(np.linalg.norm(A, 2)))
    thetas = _test_angles()
    spectra = [np.linalg.eigvals(re * np.cos(t) + im * np.sin(t)) for t in thetas]
    mu = np.array([p.value for p in eig_dense(A)])
    near = 1e-5 * scale

    def count(k, z):
        return int(np.sum(np.abs(spectra[k] - z) <= near))

    def on_curve(k, z):
        H = re * np.cos(thetas[k]) + im * np.sin(thetas[k])
        return np.linalg.svd(H - z * np.eye(n), compute_uv=False)[-1] <= tol * scale

    evidence = []
    hyps: list[tuple[Hyperbola, int]] = []
    for i in range(n):
        for j in range(i + 1, n):
            f = (mu[i] - mu[j]) / 2
            if abs(f) <= 1e-6 * scale:
                continue
            c = (mu[i] + mu[j]) / 2
            s = f * f / 2
            mids = [(np.exp(-1j * t) * c).real for t in thetas]
            waves = [(s * np.exp(-2j * t)).real for t in thetas]
            cands = set()
            for z in spectra[0]:
                p = (z - mids[0]) ** 2 - waves[0]
                if abs(p.imag) <= 1e-6 * scale ** 2 and abs(p.real) < abs(s) * (1 - 1e-9):
                    cands.add(round(float(p.real), 9))
            for p in sorted(cands):
                roots = [(mids[k] + cmath.sqrt(p + waves[k]), mids[k] - cmath.sqrt(p + waves[k]))
                         for k in range(len(thetas))]
                if not all(on_curve(k, r) for k, pair in enumerate(roots) for r in pair):
                    continue
                # refine p from all angles (the rounding above is only for de-duplication)
                pvals = [((roots[k][0] - mids[k]) ** 2).real - waves[k] for k in range(len(thetas))]
                h = hyperbola_from_fit(HyperbolaFitParams(float(np.mean(pvals)), s.real, s.imag), c)
                if any(h.distance_to(g) <= 1e-6 * scale for g, _ in hyps):
                    continue
                mult = min(min(count(k, roots[k][0]), count(k, roots[k][1])) if abs(roots[k][0] - roots[k][1]) > near
                           else count(k, roots[k][0]) // 2 for k in range(len(thetas)))
                hyps.append((h, max(mult, 1)))

    pts: list[tuple[complex, int]] = []
    for m in mu:
        if any(abs(m - q) <= 1e-6 * scale for q, _ in pts):
            continue
        vals = [(np.exp(-1j * t) * m).real for t in thetas]
        if all(on_curve(k, v) for k, v in enumerate(vals)):
            # roots shared with hyperbola components are not counted twice
            mult = []
            for k, v in enumerate(vals):
                taken = sum(mh for h, mh in hyps for r in _hyp_roots(h, thetas[k]) if abs(r - v) <= near)
                mult.append(count(k, v) - taken)
            pts.append((complex(m), max(min(mult), 1)))

    resid = n - sum(2 * m for _, m in hyps) - sum(m for _, m in pts)
    evidence.append(f"curve components: {len(hyps)} hyperbola(s), {len(pts)} point(s), "
                    f"unexplained degree {resid} of {n}")
    return CurveComponents(hyps, pts, resid, evidence)


def _hyp_roots(h: Hyperbola, theta: float) -> tuple[complex, complex]:
    fp = fit_params_of(h)
    mid = (np.exp(-1j * theta) * h.center).real
    r = cmath.sqrt(fp.value(theta))
    return mid + r, mid - r


# -- flats and corners -----------------------------------------------------

def _contact_runs(curve: BoundaryCurve, A: np.ndarray, J: Metric) -> list[list[tuple[float, complex, complex]]]:
    """Runs of consecutive valid angles with the two support contact points."""
    by_theta: dict[float, list[TaggedPoint]] = {}
    for p in curve.points:
        by_theta.setdefault(p.theta, []).append(p)
    runs: list[list[tuple[float, complex, complex]]] = []
    step = None
    prev = None
    for th, lam_l, lam_r, plus_right, _ in curve.support:
        pts = by_theta.get(th, [])
        right_sign = 1 if plus_right else -1
        zr = [p.z for p in pts if p.sign == right_sign and abs(p.lam - lam_r) <= CONTACT_TOL * max(1, abs(lam_r))]
        zl = [p.z for p in pts if p.sign == -right_sign and abs(p.lam - lam_l) <= CONTACT_TOL * max(1, abs(lam_l))]
        if not zr or not zl:
            prev = None
            continue
        if prev is not None and step is not None and th - prev > 1.5 * step:
            runs.append([])
        if prev is not None and step is None:
            step = th - prev
        if not runs or prev is None:
            runs.append([])
        runs[-1].append((th, zr[0], zl[0]))
        prev = th
    return [r for r in runs if r]


def detect_flats_and_corners(curve: BoundaryCurve, A, J: Metric, scale: float):
    """Flat pieces and corners of the boundary from the support contact points.

    Along a run of valid angles the contact point of each support line moves
    continuously; a jump larger than ``FLAT_RATIO`` times the neighbouring
    steps is a flat piece, and a contact point that stays put while the
    direction changes is a corner.
    """
    A = as_matrix(A)
    flats, corners = [], []
    for run in _contact_runs(curve, A, J):
        for side in (1, 2):
            zs = [r[side] for r in run]
            gaps = [abs(zs[k + 1] - zs[k]) for k in range(len(zs) - 1)]
            for k, g in enumerate(gaps):
                nb = [gaps[i] for i in (k - 2, k - 1, k + 1, k + 2) if 0 <= i < len(gaps)]
                if nb and g > 1e-6 * scale and g > FLAT_RATIO * max(nb):
                    flats.append((zs[k], zs[k + 1]))
            for k, g in enumerate(gaps):
                if g <= CORNER_TOL * scale and not any(abs(zs[k] - c) <= 1e-6 * scale for c in corners):
                    corners.append(zs[k])
    return flats, corners


# -- region membership -----------------------------------------------------

def region_slack(curve: BoundaryCurve, z, sign: Optional[int] = None) -> np.ndarray:
    """Signed slack of ``z`` in the region cut out by the sampled support lines.

    With ``sign`` given (+1 for ``W_+``, -1 for ``-W_-``) the point must lie on
    that sign's side of every support line; without it, outside every open
    strip ``lambda_L < Re(exp(-i theta) z) < lambda_R``.  Positive means
    inside; values are distances in the plane.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if not curve.support:
        raise KreinError("no valid support angles")
    sup = np.array([s[:3] for s in curve.support], dtype=float)
    pr = np.array([s[3] for s in curve.support], dtype=bool)
    th, lo, hi = sup[:, 0], sup[:, 1], sup[:, 2]
    proj = np.cos(th)[None, :] * z.real[:, None] + np.sin(th)[None, :] * z.imag[:, None]
    if sign is None:
        slack = np.maximum(lo[None, :] - proj, proj - hi[None, :])
    else:
        right = pr if sign > 0 else ~pr
        slack = np.where(right[None, :], proj - hi[None, :], lo[None, :] - proj)
    return slack.min(axis=1)


# -- classification --------------------------------------------------------

def _pick_outer(comps: Sequence[Hyperbola], fitted: Hyperbola, tol: float):
    best = min(comps, key=lambda h: h.distance_to(fitted), default=None)
    if best is not None and best.distance_to(fitted) <= tol:
        return best
    return None


def classify_range(A, J: Metric, grid_size: int = DEFAULT_GRID, tol: float = SPLIT_TOL) -> RangeClassification:
    """Shape of ``W^J(A)`` with an evidence trail.

    WholePlane is reported when no grid angle gives ``H_theta`` real,
    non-neutral and non-interlacing spectra (a grid verdict).  Otherwise the
    curve is decomposed, the support function is fitted by a single
    hyperbola where possible (disc, or nested when a second hyperbola's
    vertices sit inside it), and two hyperbola components whose support
    functions alternate along the boundary give the flat case.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if J.n != n:
        raise KreinError(f"matrix of order {n} with metric of order {J.n}")
    scale = max(1.0, float(np.linalg.norm(A, 2)))
    if _is_scalar(A, 1e-12):
        return RangeClassification(Shape.POINT, points=(complex(A[0, 0]),), evidence=["A is scalar"])
    if not J.is_indefinite:
        curve = sweep_boundary(A, J, grid_size, tol)
        return RangeClassification(Shape.NUMERIC_ONLY, curve=curve,
                                   evidence=["definite metric: classical numerical range (up to sign), curve only"])
    if n == 2:
        res = hyperbola_2x2(A, J)
        if res.kind != Shape.NUMERIC_ONLY:
            return res

    curve = sweep_boundary(A, J, grid_size, tol)
    evidence = [f"grid of {grid_size} angles: {len(curve.support)} valid, "
                + ", ".join(f"{v} {k}" for k, v in sorted(curve.reasons.items()))]
    if not curve.support:
        if curve.reasons.get("interlacing"):
            evidence.append("interlacing sigma_+/sigma_- found; no angle admits support lines")
        evidence.append("grid-based verdict: no valid angle among the samples")
        return RangeClassification(Shape.WHOLE_PLANE, curve=curve, evidence=evidence)
    if curve.reasons.get("interlacing"):
        evidence.append(f"interlacing at {curve.reasons['interlacing']} grid angle(s)")
    evidence.append("valid angles exist; the whole-plane test is one-sided on a finite grid")

    comps = decompose_curve(A, J)
    evidence.extend(comps.evidence)
    hyps = [h for h, _ in comps.hyperbolas]
    _certificate_evidence(A, J, evidence)

    fitted = None
    try:
        center, cres = fit_center_from_support(curve)
        params, fres = fit_support_rows(*_shifted_rows(curve, center))
        evidence.append(f"support fit: center {center:.17g}, center residual {cres:.3e}, "
                        f"quadratic residual {fres:.3e}")
        if cres <= 1e-7 * scale and fres <= 1e-7 * scale ** 2:
            fitted = hyperbola_from_fit(params, center)
    except DegenerateError as exc:
        evidence.append(f"support fit failed: {exc}")

    if fitted is not None:
        outer = _pick_outer(hyps, fitted, 1e-6 * scale) or fitted
        inner = [h for h in hyps if h is not outer and h.distance_to(outer) > 1e-6 * scale]
        nested = [h for h in inner if nested_in(h, outer)]
        if nested:
            evidence.append("inner hyperbola vertices lie inside the outer hyperbolic disc")
            return RangeClassification(Shape.BIHYPERBOLIC_NESTED, hyperbolas=(outer, nested[0]), curve=curve,
                                       points=tuple(z for z, _ in comps.points), evidence=evidence)
        evidence.append("support function is that of a single hyperbola")
        return RangeClassification(Shape.HYPERBOLIC_DISC, hyperbolas=(outer,), curve=curve,
                                   points=tuple(z for z, _ in comps.points), evidence=evidence)

    flats, corners = detect_flats_and_corners(curve, A, J, scale)
    mu = [p.value for p in eig_dense(A)]
    for c in corners:
        d = min(abs(c - m) for m in mu)
        evidence.append(f"corner {c:.17g}: distance {d:.3e} to the nearest eigenvalue")
    if len(hyps) >= 2:
        g, h = hyps[0], hyps[1]
        if nested_in(g, h) or nested_in(h, g):
            evidence.append("vertex test nests one hyperbola in the other, but their branches cross "
                            "on the boundary (the support function is not that of a single hyperbola)")
        evidence.append(f"two hyperbola components share the boundary; {len(flats)} flat piece(s), "
                        f"{len(corners)} corner(s) on the sampled boundary")
        return RangeClassification(Shape.BIHYPERBOLIC_FLAT, hyperbolas=(g, h), curve=curve,
                                   corners=tuple(corners), flats=tuple(flats),
                                   points=tuple(z for z, _ in comps.points), evidence=evidence)
    evidence.append("no analytic shape matched; boundary known only through the sampled curve")
    return RangeClassification(Shape.NUMERIC_ONLY, curve=curve, corners=tuple(corners), flats=tuple(flats),
                               hyperbolas=tuple(hyps), evidence=evidence)


def _usable_rows(curve: BoundaryCurve, guard: float = FIT_GUARD) -> np.ndarray:
    rows = [r[:3] for r in curve.support if r[4] >= guard]
    return np.array(rows, dtype=float).reshape(-1, 3)


def _shifted_rows(curve: BoundaryCurve, center: complex):
    sup = _usable_rows(curve)
    th = sup[:, 0]
    shift = np.cos(th) * center.real + np.sin(th) * center.imag
    return th, sup[:, 1] - shift, sup[:, 2] - shift


def fit_center_from_support(curve: BoundaryCurve) -> tuple[complex, float]:
    """Center ``c`` with ``(lambda_L + lambda_R)/2 = Re(exp(-i theta) c)`` over a sweep's support table."""
    sup = _usable_rows(curve)
    if len(sup) < 2:
        raise DegenerateError("need at least 2 valid support samples to locate a center")
    th, mid = sup[:, 0], (sup[:, 1] + sup[:, 2]) / 2
    X = np.column_stack([np.cos(th), np.sin(th)])
    coef, *_ = np.linalg.lstsq(X, mid, rcond=None)
    return complex(coef[0], coef[1]), float(np.abs(X @ coef - mid).max())


def _certificate_evidence(A: np.ndarray, J: Metric, evidence: list[str]):
    from .tridiag import certified_hyperbolas, certify, normal_form, signature

    n = A.shape[0]
    if not 3 <= n <= 6 or tuple(J.signs) != signature(n):
        return
    try:
        nf = normal_form(A, J)
        cert = certify(nf.T)
    except KreinError:
        return
    name = type(cert).__name__
    hs = [nf.to_original(h) for h in certified_hyperbolas(cert)]
    evidence.append(f"{name}: verdict {cert.verdict}"
                    + "".join(f"; certified hyperbola foci {h.foci[0]:.17g}, {h.foci[1]:.17g}" for h in hs))
