"""Worked examples shared by the test modules, named by their structure."""

import cmath
import math


from kreinrange import Metric, TridiagonalSpec

ORDER3_DISC = TridiagonalSpec(3, 4, (3 + 1j, 1), (-4 + 1j, -1j))
ORDER5_DISC = TridiagonalSpec.centrosymmetric(6, (-3, 5, 1j, 2))
ORDER4_NESTED = TridiagonalSpec.centrosymmetric(5, (1, 2, 7))
ORDER4_FLAT = TridiagonalSpec.centrosymmetric(6, (1j, 2 + 1j, 2))
ORDER4_WHOLE = TridiagonalSpec.centrosymmetric(1, (3, 5, 0.5))
ORDER6_CUBICS = TridiagonalSpec.centrosymmetric(4, (1, 2, -2, 4, 5))
ORDER6_B3ZERO = TridiagonalSpec.centrosymmetric(4, (1, 2, 0, 4, 5))

J2 = Metric((1, -1))


def dense(spec):
    return spec.matrix(), spec.metric


def cubic_upper(u, v, w):
    return w ** 3 - 68 * u ** 3 - 11 * u ** 2 * w + 3 * u * (30 * v ** 2 + 2 * w ** 2) + 18 * v ** 2 * w


def cubic_lower(u, v, w):
    return w ** 3 - 20 * u ** 3 - 11 * u ** 2 * w + 2 * u * (27 * v ** 2 + w ** 2) + 18 * v ** 2 * w


def sextic(u, v, w):
    return cubic_upper(u, v, w) * cubic_lower(u, v, w)


ORDER3_EIGS = [4, cmath.sqrt(3 - 2j), -cmath.sqrt(3 - 2j)]
ORDER4_NESTED_EIGS = [-1 + math.sqrt(43), -1 - math.sqrt(43), 1 + math.sqrt(23), 1 - math.sqrt(23)]
ORDER4_FLAT_EIGS = [((-2 - 1j) + cmath.sqrt(195 + 36j)) / 2, ((-2 - 1j) - cmath.sqrt(195 + 36j)) / 2,
                    ((2 + 1j) + cmath.sqrt(99 - 12j)) / 2, ((2 + 1j) - cmath.sqrt(99 - 12j)) / 2]
ORDER4_WHOLE_EIGS = [(-5 + math.sqrt(55)) / 2, (-5 - math.sqrt(55)) / 2,
                     (5 + math.sqrt(15)) / 2, (5 - math.sqrt(15)) / 2]


def match_sets(got, want):
    """Largest distance in the best one-to-one matching of two small point sets."""
    got = list(got)
    worst = 0.0
    for w in want:
        k = min(range(len(got)), key=lambda i: abs(got[i] - w))
        worst = max(worst, abs(got[k] - w))
        got.pop(k)
    return worst


def random_spec(rng, order, b3zero=False, b2zero=False):
    """Random data for ``T_order``; centrosymmetric for orders 4 to 6."""
    a = 2 * abs(rng.normal())
    z = lambda k: rng.normal(size=k) + 1j * rng.normal(size=k)
    if order == 3:
        return TridiagonalSpec(3, a, tuple(z(2)), tuple(z(2)))
    b = z(order - 1)
    if order == 6 and b3zero:
        b[2] = 0
    if order == 4 and b2zero:
        b[1] = 0
    return TridiagonalSpec.centrosymmetric(a, b)
