import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from onetwo.errors import ConstraintError
from onetwo.spectral import (
    classify_phase, critical_margin, eval_characteristic, torus_intersection,
    verify_characteristic,
)
from conftest import load_golden

pos_weight = st.floats(min_value=0.05, max_value=5.0,
                       allow_nan=False, allow_infinity=False)


def test_eval_spot_values():
    assert eval_characteristic((1, 1, 1), 1, 1) == pytest.approx(9.0)
    assert eval_characteristic((4, 1, 1), 1, 1) == pytest.approx(0.0, abs=1e-12)


def test_eval_rejects_zero_argument():
    with pytest.raises(ConstraintError):
        eval_characteristic((1, 1, 1), 0.0, 1.0)
    with pytest.raises(ConstraintError):
        eval_characteristic((1, 1, 1), 1.0, 0.0)


def test_eval_golden_samples():
    for row in load_golden("characteristic.json"):
        z = complex(*row["z"])
        w = complex(*row["w"])
        ref = complex(*row["value"])
        v = eval_characteristic((row["a"], row["b"], row["c"]), z, w)
        assert cmath.isclose(v, ref, rel_tol=1e-12, abs_tol=1e-12)


@given(a=pos_weight, b=pos_weight, c=pos_weight)
@settings(max_examples=100, deadline=None)
def test_central_value_identity(a, b, c):
    lhs = eval_characteristic((a, b, c), 1.0, 1.0)
    rhs = (a * a + b * b + c * c - 2 * a * b - 2 * b * c - 2 * a * c) ** 2
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@given(a=pos_weight, b=pos_weight, c=pos_weight,
       zr=st.floats(min_value=-2, max_value=2),
       zi=st.floats(min_value=-2, max_value=2),
       wr=st.floats(min_value=-2, max_value=2),
       wi=st.floats(min_value=-2, max_value=2))
@settings(max_examples=60, deadline=None)
def test_joint_inversion_symmetry(a, b, c, zr, zi, wr, wi):
    z = complex(zr, zi)
    w = complex(wr, wi)
    if abs(z) < 0.1 or abs(w) < 0.1:
        return
    v1 = eval_characteristic((a, b, c), z, w)
    v2 = eval_characteristic((a, b, c), 1 / z, 1 / w)
    assert cmath.isclose(v1, v2, rel_tol=1e-9, abs_tol=1e-9)


def test_margin_zero_on_surface():
    assert critical_margin((4.0, 1.0, 1.0)) == pytest.approx(0.0, abs=1e-15)
    # the surface is symmetric in the three weights
    assert critical_margin((1.0, 4.0, 1.0)) == pytest.approx(0.0, abs=1e-15)
    assert critical_margin((1.0, 1.0, 4.0)) == pytest.approx(0.0, abs=1e-15)


@given(a=pos_weight, b=pos_weight, c=pos_weight,
       lam=st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=60, deadline=None)
def test_margin_scale_invariant(a, b, c, lam):
    m1 = critical_margin((a, b, c))
    m2 = critical_margin((lam * a, lam * b, lam * c))
    assert m2 == pytest.approx(m1, rel=1e-9, abs=1e-12)


def test_verify_characteristic_on_assorted_triples():
    for p in [(1, 1, 1), (2, 1, 1), (1.3, 0.7, 1.1), (0.3, 2.2, 0.9)]:
        rep = verify_characteristic(p)
        assert rep.ok, (p, rep)
        assert rep.monomial == (0, 0)
        assert rep.sign == 1.0
        assert rep.max_rel_dev < 1e-9
        assert rep.n_points == 100


def test_verify_characteristic_seeded_reproducible():
    r1 = verify_characteristic((1.2, 0.8, 1.0), seed=3)
    r2 = verify_characteristic((1.2, 0.8, 1.0), seed=3)
    assert r1.max_rel_dev == r2.max_rel_dev


def test_torus_intersection_cases():
    crit = torus_intersection((4.0, 1.0, 1.0))
    assert crit.kind == "real_point"
    zc, wc = crit.point
    assert zc == pytest.approx(1.0) and wc == pytest.approx(1.0)

    for p in [(2.0, 1.0, 1.0), (6.0, 1.0, 1.0), (1.0, 1.0, 6.0)]:
        off = torus_intersection(p)
        assert off.kind == "empty"
        assert off.min_value > 0.0


def test_classify_phase_regions():
    assert classify_phase((4.0, 1.0, 1.0)).region == "critical"
    assert classify_phase((6.0, 1.0, 1.0)).region == "supercritical_a"
    assert classify_phase((1.0, 6.0, 1.0)).region == "supercritical_b"
    assert classify_phase((1.0, 1.0, 6.0)).region == "supercritical_c"
    assert classify_phase((2.0, 1.0, 1.0)).region == "subcritical"
    assert classify_phase((1.0, 1.0, 1.0)).region == "subcritical"


@given(a=pos_weight, b=pos_weight, c=pos_weight)
@settings(max_examples=150, deadline=None)
def test_classify_phase_matches_inequalities(a, b, c):
    """Region assignment must reproduce the bare square-root arithmetic."""
    ra, rb, rc = math.sqrt(a), math.sqrt(b), math.sqrt(c)
    cls = classify_phase((a, b, c))
    margin = critical_margin((a, b, c))
    if margin < 1e-9:
        return  # too close to the surface for a clean oracle
    if ra > rb + rc:
        assert cls.region == "supercritical_a"
    elif rb > ra + rc:
        assert cls.region == "supercritical_b"
    elif rc > ra + rb:
        assert cls.region == "supercritical_c"
    else:
        assert cls.region == "subcritical"


@given(a=pos_weight, b=pos_weight, c=pos_weight,
       lam=st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=60, deadline=None)
def test_classify_phase_scale_invariant(a, b, c, lam):
    r1 = classify_phase((a, b, c)).region
    r2 = classify_phase((lam * a, lam * b, lam * c)).region
    assert r1 == r2


def test_classification_agrees_with_torus_intersection():
    """The curve touches the unit torus exactly on the critical surface."""
    for p in [(4.0, 1.0, 1.0), (2.0, 1.0, 1.0), (6.0, 1.0, 1.0),
              ((math.sqrt(2) + 1) ** 2, 2.0, 1.0)]:
        is_crit = classify_phase(p).region == "critical"
        assert (torus_intersection(p).kind == "real_point") == is_crit
