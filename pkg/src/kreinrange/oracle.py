"""Brute-force checks straight from the definition of ``W^J(A)``.

``W_+(A) = {[Ax,x]_J : [x,x]_J = 1}`` and ``-W_-(A)`` are sampled with random
vectors and compared against classifications, support lines and the
factorization of the order-6 curve polynomial.  A passing check is evidence,
not proof; a failing one is a genuine counterexample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import KreinError, Metric, as_matrix
from .geometry import BoundaryCurve, region_slack
from .hyperbola import RangeClassification, Shape
from .spectra import curve_poly_eval, support_sweep
from .tridiag import TridiagonalSpec, block_reduce6

NEUTRAL_REJECT = 1e-6
CLIP_FACTOR = 1e3
MAX_REJECTION = 0.99
DEFAULT_SAMPLES = 100_000
DEFAULT_SEED = 42


@dataclass
class SampleCloud:
    """Values ``[Ax,x]_J`` (negated for sign -1) with their signs."""

    values: np.ndarray
    signs: np.ndarray
    seed: int
    count: int
    rejected: int = 0
    clipped: int = 0
    vectors: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def points(self) -> list[tuple[complex, int]]:
        return [(complex(z), int(s)) for z, s in zip(self.values, self.signs)]

    def __add__(self, other: "SampleCloud") -> "SampleCloud":
        vec = None
        if self.vectors is not None and other.vectors is not None:
            vec = np.vstack([self.vectors, other.vectors])
        return SampleCloud(np.concatenate([self.values, other.values]), np.concatenate([self.signs, other.signs]),
                           self.seed, self.count + other.count, self.rejected + other.rejected,
                           self.clipped + other.clipped, vec)

    def to_csv(self) -> str:
        rows = ["re,im,sign"]
        rows.extend(f"{z.real:.17g},{z.imag:.17g},{int(s):d}" for z, s in zip(self.values, self.signs))
        return "\n".join(rows) + "\n"


def _draw(A, J: Metric, N: int, signs: Sequence[int], seed: int, keep_vectors: bool) -> dict[int, SampleCloud]:
    """One Gaussian stream split by the sign of ``[x,x]_J``; ``N`` samples for each requested sign."""
    A = as_matrix(A)
    n = A.shape[0]
    if J.n != n:
        raise KreinError(f"matrix of order {n} with metric of order {J.n}")
    for sign in signs:
        if sign not in (1, -1):
            raise KreinError("sign must be +1 or -1")
        if (sign > 0 and J.r == 0) or (sign < 0 and J.r == n):
            raise KreinError(f"the {'positive' if sign > 0 else 'negative'} sign class of the metric is empty")
    if N < 1:
        raise KreinError("N must be at least 1")
    rng = np.random.default_rng(seed)
    d = J.diag
    limit = CLIP_FACTOR * max(float(np.linalg.norm(A, 2)), np.finfo(float).tiny)
    vals = {s: [] for s in signs}
    vecs = {s: [] for s in signs}
    kept = dict.fromkeys(signs, 0)
    accepted = dict.fromkeys(signs, 0)
    clipped = dict.fromkeys(signs, 0)
    drawn = 0
    rate = 0.5
    while min(kept.values()) < N:
        # size the batch from the slowest sign's acceptance rate so far
        need = max(N - kept[s] for s in signs)
        batch = int(min(max(1.1 * need / rate, 1024), 400_000))
        # real and imaginary parts side by side, viewed as complex (scale is irrelevant after normalizing)
        X = rng.standard_normal((batch, 2 * n)).view(np.complex128)
        drawn += batch
        sq = X.real ** 2 + X.imag ** 2
        jn = sq @ d
        far = np.abs(jn) >= NEUTRAL_REJECT * sq.sum(axis=1)
        for sign in signs:
            ok = far & (sign * jn > 0)
            accepted[sign] += int(np.count_nonzero(ok))
            if drawn - accepted[sign] > MAX_REJECTION * drawn:
                raise KreinError(f"rejection rate above {MAX_REJECTION:.0%} for sign {sign:+d}")
            if kept[sign] >= N:
                continue
            Y = X[ok] / np.sqrt(np.abs(jn[ok]))[:, None]
            # [Ay, y]_J = y^* J A y
            z = np.einsum("ij,ij->i", Y.conj() * d, Y @ A.T) * sign
            inside = np.abs(z) <= limit
            clipped[sign] += int((~inside).sum())
            vals[sign].append(z[inside])
            if keep_vectors:
                vecs[sign].append(Y[inside])
            kept[sign] += int(inside.sum())
        rate = max(min(accepted.values()) / drawn, 1e-3)
    out = {}
    for sign in signs:
        vec = np.vstack(vecs[sign])[:N] if keep_vectors else None
        out[sign] = SampleCloud(np.concatenate(vals[sign])[:N], np.full(N, sign, dtype=int), seed, N,
                                drawn - accepted[sign], clipped[sign], vec)
    return out


def sample_range(A, J: Metric, N: int = DEFAULT_SAMPLES, sign: int = 1, seed: int = DEFAULT_SEED,
                 keep_vectors: bool = False) -> SampleCloud:
    """``N`` samples of ``W_+(A)`` (``sign=1``) or ``-W_-(A)`` (``sign=-1``).

    Standard complex Gaussian vectors are kept when ``sign [x,x]_J`` exceeds
    ``1e-6 ||x||^2`` and scaled to ``[x,x]_J = sign``.  Values beyond
    ``1e3 ||A||`` are dropped and counted in ``clipped``.
    """
    return _draw(A, J, N, (sign,), seed, keep_vectors)[sign]


def sample_both(A, J: Metric, N: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED,
                keep_vectors: bool = False) -> SampleCloud:
    """``N`` samples of every non-empty sign class, split from one Gaussian stream.

    Each draw goes to the class of its own sign, so the positive part equals
    ``sample_range(..., sign=1, seed=seed)`` only in distribution.
    """
    signs = tuple(s for s in (1, -1) if (s > 0 and J.r > 0) or (s < 0 and J.r < J.n))
    clouds = _draw(A, J, N, signs, seed, keep_vectors)
    out = clouds[signs[0]]
    for s in signs[1:]:
        out = out + clouds[s]
    return out


# -- containment -----------------------------------------------------------

@dataclass
class ContainmentReport:
    worst_violation: float
    violating_samples: list
    verdict: bool
    checked: int = 0
    method: str = ""
    note: str = "containment is evidence only; a violation is a counterexample"


def _distance_to_rays(z: np.ndarray, ends: Sequence[complex]) -> np.ndarray:
    a, b = sorted((complex(e) for e in ends), key=lambda w: (w.real, w.imag))
    d = b - a
    t = ((z - a) * np.conj(d)).real / abs(d) ** 2
    between = (t > 0) & (t < 1)
    foot = np.where(between, np.where(t < 0.5, a, b), a + t * d)
    return np.abs(z - foot)


def classification_slack(cls: RangeClassification, values: np.ndarray, signs: Optional[np.ndarray] = None,
                         curve: Optional[BoundaryCurve] = None) -> tuple[np.ndarray, str]:
    """Signed slack (positive inside) of points in a classified region."""
    z = np.asarray(values, dtype=complex)
    kind = cls.kind
    if kind in (Shape.HYPERBOLIC_DISC, Shape.BIHYPERBOLIC_NESTED):
        return np.asarray(cls.hyperbolas[0].membership(z), dtype=float), "hyperbolic-disc membership"
    if kind == Shape.POINT:
        return -np.abs(z - cls.points[0]), "distance to the point"
    if kind == Shape.REAL_LINE:
        p, d = cls.line
        return -np.abs(((z - p) * np.conj(d / abs(d))).imag), "distance to the line"
    if kind == Shape.DEGENERATE_RAYS:
        return -_distance_to_rays(z, cls.points), "distance to the rays"
    curve = curve if curve is not None else cls.curve
    if curve is None or not curve.support:
        raise KreinError(f"no support data to test containment for {kind.value}")
    if signs is None:
        return region_slack(curve, z), "outside every sampled support strip"
    out = np.empty(len(z))
    for s in (1, -1):
        mask = np.asarray(signs) == s
        if mask.any():
            out[mask] = region_slack(curve, z[mask], s)
    return out, "sign-wise side of every sampled support line"


def containment_check(cloud: SampleCloud, classification: RangeClassification, tol: float = 1e-6,
                      max_report: int = 20) -> ContainmentReport:
    """Worst amount by which samples leave the classified region."""
    if classification.kind == Shape.WHOLE_PLANE:
        return ContainmentReport(0.0, [], True, cloud.count, "whole plane", "trivially contained")
    slack, method = classification_slack(classification, cloud.values, cloud.signs)
    worst = float(max(0.0, -slack.min())) if slack.size else 0.0
    bad = np.flatnonzero(slack < -tol)
    order = bad[np.argsort(slack[bad])][:max_report]
    viol = [(complex(cloud.values[k]), int(cloud.signs[k]), float(-slack[k])) for k in order]
    return ContainmentReport(worst, viol, worst <= tol, int(slack.size), method)


# -- support lines ---------------------------------------------------------

def support_residuals(A, J: Metric, grid: Sequence[float], N: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED):
    """Per valid angle: ``(theta, violation_plus, violation_minus)``.

    A violation is how far the cloud reaches past its support line (positive
    means a sample crossed it; negative is the gap left by the samples).
    """
    A = as_matrix(A)
    sweep = [s for s in support_sweep(A, J, grid) if s.valid]
    if not sweep:
        raise KreinError("no valid angle in the grid")
    plus = sample_range(A, J, N, 1, seed)
    minus = sample_range(A, J, N, -1, seed + 1)
    rows = []
    for s in sweep:
        fp = np.cos(s.theta) * plus.values.real + np.sin(s.theta) * plus.values.imag
        fm = np.cos(s.theta) * minus.values.real + np.sin(s.theta) * minus.values.imag
        if s.plus_right:
            rows.append((s.theta, s.lambda_R - fp.min(), fm.max() - s.lambda_L))
        else:
            rows.append((s.theta, fp.max() - s.lambda_L, s.lambda_R - fm.min()))
    return rows


def support_consistency(A, J: Metric, grid: Sequence[float], N: int = DEFAULT_SAMPLES,
                        seed: int = DEFAULT_SEED) -> float:
    """Worst signed support-line residual over the valid angles of ``grid``.

    Positive values mean some sample lies strictly beyond a support line.
    """
    rows = support_residuals(A, J, grid, N, seed)
    return float(max(max(r[1], r[2]) for r in rows))


# -- order-6 factorization -------------------------------------------------

def _relative(f: np.ndarray, g: np.ndarray, size: np.ndarray) -> np.ndarray:
    return np.abs(f - g) / np.maximum(np.maximum(np.abs(f), np.abs(g)), 1e-12 * size)


def factor_check6(spec: TridiagonalSpec, trials: int = 100, seed: int = 0,
                  reference: Optional[Callable[[float, float, float], float]] = None) -> float:
    """Largest relative mismatch of the order-6 curve polynomial against its factors.

    ``det(u Re^J(A) + v Im^J(A) + w I)`` is compared with the product of the
    two block cubics at random ``(u, v, w)``, and with ``reference`` when given.
    """
    if spec.order != 6:
        raise KreinError("factor_check6 needs order-6 tridiagonal data")
    A = spec.matrix()
    J = spec.metric
    J2 = Metric((1, -1, 1))
    blocks = block_reduce6(spec)
    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.linalg.norm(A, 2)))
    worst = 0.0
    for _ in range(trials):
        u, v, w = rng.standard_normal(3)
        size = np.array((abs(u) + abs(v)) * scale + abs(w)) ** 6
        full = curve_poly_eval(A, J, u, v, w).real
        prod = np.prod([curve_poly_eval(B, J2, u, v, w).real for B in blocks])
        worst = max(worst, float(_relative(np.array(full), np.array(prod), size)))
        if reference is not None:
            ref = float(reference(u, v, w))
            worst = max(worst, float(_relative(np.array(full), np.array(ref), size)))
    return worst


# -- pseudo-convexity witnesses --------------------------------------------

@dataclass
class WitnessReport:
    checked: int
    skipped: int
    worst_target_error: float
    worst_violation: float


def _midpoint_vector(A: np.ndarray, J: Metric, x: np.ndarray, y: np.ndarray, iters: int = 200):
    """A vector ``w`` with ``[w,w]_J = 1`` and ``[Aw,w]_J`` the midpoint of the values at ``x`` and ``y``.

    Needs ``[x,x]_J = [y,y]_J = 1`` and a J-positive span (``|[x,y]_J| < 1``);
    returns ``None`` otherwise.  Works in a J-orthonormal basis of the span,
    where the values form an ordinary numerical range of a 2x2 matrix, and
    follows a path between the two vectors along which the value stays on
    the segment.
    """
    g = complex(np.vdot(x, J.apply(y)))  # [y, x]_J
    if abs(g) >= 1 - 1e-9:
        return None
    e1 = x
    e2 = y - g * x
    e2 = e2 / math.sqrt(float(np.vdot(e2, J.apply(e2)).real))
    E = np.column_stack([e1, e2])
    B = E.conj().T @ J.apply(A @ E)
    c1 = np.array([1.0, 0.0], dtype=complex)
    c2 = np.array([g, math.sqrt(1 - abs(g) ** 2)], dtype=complex)
    z1 = complex(c1.conj() @ B @ c1)
    z2 = complex(c2.conj() @ B @ c2)
    if abs(z2 - z1) <= 1e-14 * max(1.0, abs(z1)):
        return E @ c1, z1
    Bn = (B - z1 * np.eye(2)) / (z2 - z1)
    K = (Bn - Bn.conj().T) / 2j
    k12 = complex(c1.conj() @ K @ c2)
    psi = math.pi / 2 - np.angle(k12) if abs(k12) > 0 else 0.0
    c2p = np.exp(1j * psi) * c2

    def q(s):
        u = (1 - s) * c1 + s * c2p
        return (u.conj() @ Bn @ u).real / (u.conj() @ u).real, u

    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = (lo + hi) / 2
        if q(mid)[0] < 0.5:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    u = q((lo + hi) / 2)[1]
    w = E @ u
    w = w / math.sqrt(float(np.vdot(w, J.apply(w)).real))
    return w, (z1 + z2) / 2


def midpoint_witness(A, J: Metric, classification: RangeClassification, pairs: int = 200,
                     seed: int = DEFAULT_SEED, tol: float = 1e-6) -> WitnessReport:
    """Midpoints of random same-sign sample pairs, regenerated from explicit vectors.

    Each midpoint value ``[Aw,w]_J`` is recomputed from its vector and tested
    for membership in the classified region.
    """
    A = as_matrix(A)
    rng = np.random.default_rng(seed)
    checked = skipped = 0
    err = viol = 0.0
    for sign in (1, -1):
        if (sign > 0 and J.r == 0) or (sign < 0 and J.r == J.n):
            continue
        cloud = sample_range(A, J, 2 * pairs, sign, int(rng.integers(2 ** 31)), keep_vectors=True)
        K = J if sign > 0 else -J
        vals = []
        for k in range(pairs):
            x, y = cloud.vectors[2 * k], cloud.vectors[2 * k + 1]
            res = _midpoint_vector(A, K, x, y)
            if res is None:
                skipped += 1
                continue
            w, target = res
            z = complex(np.vdot(w, K.apply(A @ w)))
            err = max(err, abs(z - target) / max(1.0, abs(target)))
            vals.append(z)
            checked += 1
        if vals and classification.kind != Shape.WHOLE_PLANE:
            slack, _ = classification_slack(classification, np.array(vals), np.full(len(vals), sign))
            viol = max(viol, float(-slack.min()))
    return WitnessReport(checked, skipped, err, max(viol, 0.0))
