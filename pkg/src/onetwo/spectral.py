"""Characteristic polynomial of the decorated torus and the phase
classifier built on its real zeros.

P(z, w) = a^4 + b^4 + c^4 + 6(a^2 b^2 + a^2 c^2 + b^2 c^2)
          - 2ab (z + 1/z)(a^2 + b^2 - c^2)
          - 2ac (w + 1/w)(a^2 + c^2 - b^2)
          - 2bc (z/w + w/z)(b^2 + c^2 - a^2)

On the unit torus |z| = |w| = 1 the polynomial is real and nonnegative;
it has a zero iff sqrt of one weight equals the sum of the square roots
of the other two, which is the critical surface.  At (z, w) = (1, 1) it
collapses to (a^2 + b^2 + c^2 - 2ab - 2bc - 2ca)^2.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstraintError, NumericalError
from .model import ModelParams


def eval_characteristic(params, z, w):
    """Closed-form characteristic polynomial; z, w nonzero complex."""
    if z == 0 or w == 0:
        raise ConstraintError("characteristic polynomial needs z, w != 0")
    a, b, c = ModelParams.coerce(params).as_tuple
    return (a ** 4 + b ** 4 + c ** 4
            + 6 * (a * a * b * b + a * a * c * c + b * b * c * c)
            - 2 * a * b * (z + 1 / z) * (a * a + b * b - c * c)
            - 2 * a * c * (w + 1 / w) * (a * a + c * c - b * b)
            - 2 * b * c * (z / w + w / z) * (b * b + c * c - a * a))


def critical_margin(params):
    """Scale-invariant distance proxy to the critical surface: the smallest
    |sqrt a +- sqrt b +- sqrt c| over sign choices, normalised by the sum
    of the roots."""
    a, b, c = ModelParams.coerce(params).as_tuple
    ra, rb, rc = math.sqrt(a), math.sqrt(b), math.sqrt(c)
    vals = [abs(ra + s1 * rb + s2 * rc)
            for s1, s2 in itertools.product((1, -1), repeat=2)
            if not (s1 == 1 and s2 == 1)]
    return min(vals) / (ra + rb + rc)


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    max_rel_dev: float
    monomial: tuple      # (alpha, beta): det K1 = sign * z^alpha w^beta * P
    sign: float
    n_points: int


def verify_characteristic(params, rtol=1e-9, n_unit=50, n_off=50, seed=0):
    """Compare det K1(z, w) of the oriented fundamental domain against the
    closed form at random points on and off the unit torus.

    Any monomial gauge z^alpha w^beta and global sign between the two is
    discovered at axis points and divided out; the report carries it.
    """
    from .lattice import build_decorated, build_torus
    from .pfaffian import kasteleyn_orient

    p = ModelParams.coerce(params)
    system = kasteleyn_orient(build_decorated(build_torus(2), p.as_tuple))

    def det_at(z, w):
        return complex(np.linalg.det(system.symbol(z, w)))

    # gauge extraction at real axis points; skip any candidate where the
    # closed form itself vanishes (the curve does cross the real axes for
    # some weights, and P(1, 1) = 0 on the critical surface)
    scale = (p.a + p.b + p.c) ** 4

    def axis_ratios(axis):
        got = []
        for t in (2.0, 3.0, 2.5, 3.5, 1.8):
            z, w = (t, 1.0) if axis == 0 else (1.0, t)
            pv = eval_characteristic(p, z, w)
            if abs(pv) > 1e-7 * scale * t ** 2:
                got.append((t, det_at(z, w) / pv))
                if len(got) == 2:
                    return got
        raise NumericalError(
            "no usable axis points for gauge extraction")

    (t1, r1), (t2, r2) = axis_ratios(0)
    (u1, s1), (u2, s2) = axis_ratios(1)
    alpha = round(math.log(abs(r2 / r1)) / math.log(t2 / t1))
    beta = round(math.log(abs(s2 / s1)) / math.log(u2 / u1))
    sign = 1.0 if (r1 / t1 ** alpha).real >= 0 else -1.0

    rng = np.random.default_rng(seed)
    worst = 0.0
    pts = []
    for _ in range(n_unit):
        zt, wt = rng.uniform(0, 2 * math.pi, 2)
        pts.append((np.exp(1j * zt), np.exp(1j * wt)))
    for _ in range(n_off):
        zt, wt = rng.uniform(0, 2 * math.pi, 2)
        rz, rw = rng.uniform(0.6, 1.6, 2)
        pts.append((rz * np.exp(1j * zt), rw * np.exp(1j * wt)))
    for z, w in pts:
        d = det_at(z, w)
        expected = sign * z ** alpha * w ** beta * eval_characteristic(p, z, w)
        denom = max(abs(expected), abs(d), 1e-9 * scale)
        worst = max(worst, abs(d - expected) / denom)
    return VerifyReport(ok=worst < rtol, max_rel_dev=worst,
                        monomial=(int(alpha), int(beta)), sign=sign,
                        n_points=len(pts))


@dataclass(frozen=True)
class SpectralIntersection:
    kind: str            # "empty" or "real_point"
    point: tuple | None  # the (z, w) corner where P vanishes, if any
    min_value: float     # smallest normalised |P| over the real corners


def torus_intersection(params, tol=1e-12) -> SpectralIntersection:
    """Intersection of the spectral curve P(z, w) = 0 with the unit torus.

    Off the critical surface the intersection is empty; on it the curve
    touches the torus at a single real point (z, w) in {+-1}^2.
    """
    p = ModelParams.coerce(params)
    scale = sum(p.as_tuple) ** 4
    best = None
    for z, w in itertools.product((1.0, -1.0), repeat=2):
        v = abs(eval_characteristic(p, z, w)) / scale
        if best is None or v < best[0]:
            best = (v, (z, w))
    if best[0] <= tol:
        return SpectralIntersection(kind="real_point", point=best[1],
                                    min_value=best[0])
    return SpectralIntersection(kind="empty", point=None, min_value=best[0])


@dataclass(frozen=True)
class PhaseClassification:
    region: str          # "supercritical_a" | ... | "subcritical" | "critical"
    margins: dict        # kind -> sqrt(kind) - sum of the other two roots
    margin: float        # scale-invariant distance to criticality


def classify_phase(params, tol=1e-12) -> PhaseClassification:
    """Classify the parameter point by the sub/super-additivity of the
    square roots of the weights."""
    p = ModelParams.coerce(params)
    a, b, c = p.as_tuple
    ra, rb, rc = math.sqrt(a), math.sqrt(b), math.sqrt(c)
    total = ra + rb + rc
    margins = {
        "a": (ra - rb - rc) / total,
        "b": (rb - ra - rc) / total,
        "c": (rc - ra - rb) / total,
    }
    margin = critical_margin(p.as_tuple)
    if margin <= tol:
        region = "critical"
    else:
        dominant = max(margins, key=lambda k: margins[k])
        if margins[dominant] > 0:
            region = f"supercritical_{dominant}"
        else:
            region = "subcritical"
    return PhaseClassification(region=region, margins=margins, margin=margin)
