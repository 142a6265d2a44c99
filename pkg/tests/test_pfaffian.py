import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from onetwo.errors import (
    ConstraintError, NearCriticalError, NumericalError, SizeError,
)
from onetwo.lattice import KIND_B, build_decorated, build_torus
from onetwo.model import enumerate_partition, exact_measure
from onetwo.pfaffian import (
    FiniteKernel, InfiniteKernel, block_y, correlation_limit, correlation_pf,
    kasteleyn_orient, make_kernel, partition_via_pfaffian, path_probability,
    pfaffian,
)
from conftest import load_golden
from helpers import assert_rel, random_skew


# ------------------------------------------------------------ pfaffian core

def test_pfaffian_base_cases():
    assert pfaffian(np.array([[0.0, 1.0], [-1.0, 0.0]])) == pytest.approx(1.0)
    for k in range(1, 6):
        assert pfaffian(block_y(2 * k)) == pytest.approx(1.0)
    # empty matrix: Pf = 1 by convention
    assert pfaffian(np.zeros((0, 0))) == pytest.approx(1.0)


def test_pfaffian_shape_and_symmetry_guards():
    with pytest.raises(ConstraintError):
        pfaffian(np.zeros((3, 3)))
    M = np.ones((4, 4))
    with pytest.raises(ConstraintError):
        pfaffian(M)


@given(m=st.sampled_from([2, 4, 6, 8, 10, 12, 14, 16]),
       seed=st.integers(min_value=0, max_value=2 ** 31))
@settings(max_examples=60, deadline=None)
def test_pfaffian_squares_to_determinant(m, seed):
    M = random_skew(np.random.default_rng(seed), m)
    pf = pfaffian(M)
    det = np.linalg.det(M)
    assert pf * pf == pytest.approx(det, rel=1e-9, abs=1e-30)


@given(seed=st.integers(min_value=0, max_value=2 ** 31))
@settings(max_examples=40, deadline=None)
def test_pfaffian_permutation_sign(seed):
    rng = np.random.default_rng(seed)
    M = random_skew(rng, 6)
    perm = rng.permutation(6)
    P = np.eye(6)[perm]
    # sign of the permutation via its own determinant
    sign = np.linalg.det(P)
    assert pfaffian(P.T @ M @ P) == pytest.approx(
        sign * pfaffian(M), rel=1e-9)


def test_pfaffian_complex_input():
    rng = np.random.default_rng(5)
    A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    M = A - A.T
    pf = pfaffian(M)
    assert pf * pf == pytest.approx(np.linalg.det(M), rel=1e-9)


# ------------------------------------------------------ partition function

def test_partition_matches_golden_n2():
    for row in load_golden("partition_enum.json"):
        if row["n"] != 2 or "count" in row:
            continue
        z = partition_via_pfaffian(2, (row["a"], row["b"], row["c"]))
        assert_rel(z, row["z"], 1e-9, "n=2 partition")


def test_partition_matches_golden_n3():
    """Odd sizes exercise the other torus sign pattern; the reference
    values were frozen from the exhaustive scan."""
    for row in load_golden("partition_enum.json"):
        if row["n"] != 3 or "count" in row:
            continue
        z = partition_via_pfaffian(3, (row["a"], row["b"], row["c"]))
        assert_rel(z, row["z"], 1e-9, "n=3 partition")


def test_partition_random_triples_vs_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(5):
        p = tuple(rng.uniform(0.1, 2.0, size=3))
        assert_rel(partition_via_pfaffian(2, p), enumerate_partition(2, p),
                   1e-9, f"p={p}")


def test_partition_scaling():
    p = (1.1, 0.6, 0.9)
    z = partition_via_pfaffian(2, p)
    z2 = partition_via_pfaffian(2, tuple(2.0 * v for v in p))
    assert z2 == pytest.approx(2.0 ** 8 * z, rel=1e-9)


def test_partition_size_guard():
    with pytest.raises(SizeError):
        partition_via_pfaffian(1, (1, 1, 1))


def test_twist_magnitudes_match_dense_pfaffians():
    """The momentum-block product used at large n must agree with dense
    Pfaffians of the four twisted matrices where both are computable."""
    from onetwo.pfaffian import TWISTS

    sys_ = kasteleyn_orient(build_decorated(build_torus(2), (1.3, 0.7, 1.1)))
    dense = sys_.twisted_pfaffians()
    mags = sys_.twist_log_magnitudes()
    for tw, d in zip(TWISTS, dense):
        assert math.log(abs(d)) == pytest.approx(mags[tw], abs=1e-8)


def test_partition_larger_sizes_positive_and_consistent():
    """Free energy per site settles as n grows (crude sanity for n >= 4)."""
    p = (1.3, 0.7, 1.1)
    f = [math.log(partition_via_pfaffian(n, p)) / (2 * n * n)
         for n in (4, 6, 8)]
    assert abs(f[2] - f[1]) < abs(f[1] - f[0]) + 1e-12
    assert f[2] == pytest.approx(f[1], abs=5e-3)


# ------------------------------------------------------------- the kernels

def test_infinite_kernel_self_convergence():
    k_loose = InfiniteKernel((2, 1, 1), rtol=1e-6)
    k_tight = InfiniteKernel((2, 1, 1), rtol=1e-12)
    for probe in [(0, 0, 0, 1), (1, 0, 2, 5), (0, 1, 3, 4)]:
        assert k_loose.entry(*probe) == pytest.approx(
            k_tight.entry(*probe), abs=1e-9)


def test_finite_kernel_approaches_infinite():
    ki = InfiniteKernel((2, 1, 1))
    kf = FiniteKernel(kasteleyn_orient(
        build_decorated(build_torus(16), (2, 1, 1))))
    for probe in [(0, 0, 0, 1), (0, 1, 0, 3), (1, 0, 1, 0)]:
        assert abs(kf.entry(*probe) - ki.entry(*probe)) < 1e-6


def test_kernel_submatrix_skew():
    kern = make_kernel((2, 1, 1))
    sites = [(0, 1, 0), (0, 1, 2), (0, 1, 1), (-1, 2, 5)]
    M = kern.submatrix(sites)
    assert np.abs(M + M.T).max() < 1e-12


@pytest.mark.filterwarnings("ignore:quadrature not converged")
def test_near_critical_refusal_and_warning():
    with pytest.raises(NearCriticalError):
        make_kernel((4.0, 1.0, 1.0))
    a_band = (2.0 + 2e-3) ** 2
    with pytest.warns(UserWarning, match="critical surface"):
        make_kernel((a_band, 1.0, 1.0))


def test_make_kernel_mode_validation():
    with pytest.raises(ConstraintError):
        make_kernel((2, 1, 1), mode="exact")


# ------------------------------------------------------------ probabilities

def test_single_edge_probability_is_half():
    """Complementation is a weight-preserving involution exchanging
    'present' and 'absent', so every edge is present with probability 1/2;
    the contour formula reproduces this exactly."""
    L = build_torus(4)
    for kind in range(3):
        e = L.edge_id(1, 1, kind)
        assert path_probability(L, [e], (1.3, 0.7, 1.1)) == pytest.approx(0.5)
    # and exactly in the finite-volume measure
    table = exact_measure(2, (1.3, 0.7, 1.1))
    L2 = build_torus(2)
    e = L2.edge_id(0, 0, KIND_B)
    p_present = sum(
        float(pr) for code, pr in zip(table.codes, table.probs)
        if (int(code) >> e) & 1)
    assert p_present == pytest.approx(0.5, rel=1e-12)


def test_path_probability_monotone():
    L = build_torus(4)
    p = (1.0, 1.0, 1.0)
    e1 = L.edge_id(1, 1, KIND_B)
    e2 = L.edge_id(1, 2, 0)   # continue through the a-edge above
    single = path_probability(L, [e1], p)
    double = path_probability(L, [e1, e2], p)
    assert 0.0 < double <= single < 1.0


def test_path_probability_rejects_disconnected():
    L = build_torus(4)
    with pytest.raises(ConstraintError):
        path_probability(L, [0, 0], (1, 1, 1))


# ------------------------------------------------------------- correlations

def test_correlation_coincident_pair(L2):
    e = L2.edge_id(0, 0, KIND_B)
    assert correlation_pf(L2, e, e, (2, 1, 1)) == 1.0


def test_correlation_golden_infinite():
    L = build_torus(8)
    e0 = L.edge_id(0, 0, KIND_B)
    kernels = {}
    for row in load_golden("correlation_infinite.json"):
        p = (row["a"], row["b"], row["c"])
        if p not in kernels:
            kernels[p] = make_kernel(p)
        f = L.edge_id(0, row["k"], KIND_B)
        v = correlation_pf(L, e0, f, p, kernel=kernels[p])
        assert v == pytest.approx(row["value"], abs=1e-8)


def test_correlation_free_fermion_point():
    """At weights (2, 1, 1) the infinite-volume diagonal correlations
    collapse to the closed value 4^(-k)."""
    L = build_torus(8)
    e0 = L.edge_id(0, 0, KIND_B)
    kern = make_kernel((2, 1, 1))
    for k in (1, 2, 3):
        v = correlation_pf(L, e0, L.edge_id(0, k, KIND_B), (2, 1, 1),
                           kernel=kern)
        assert v == pytest.approx(0.25 ** k, abs=1e-10)


def test_correlation_against_exact_within_finite_size_envelope():
    """The limit-formula value differs from the n = 2 exact average by no
    more than the drift seen between the n = 2 and n = 16 finite-torus
    variants (up to a modest factor)."""
    from onetwo.model import exact_correlation

    p = (2.0, 1.0, 1.0)
    L2, L16 = build_torus(2), build_torus(16)
    e2, f2 = L2.edge_id(0, 0, KIND_B), L2.edge_id(0, 1, KIND_B)
    e16, f16 = L16.edge_id(0, 0, KIND_B), L16.edge_id(0, 1, KIND_B)
    exact2 = exact_correlation(2, p, e2, f2)
    v2 = correlation_pf(L2, e2, f2, p, mode="finite")
    v16 = correlation_pf(L16, e16, f16, p, mode="finite")
    v_inf = correlation_pf(L16, e16, f16, p, mode="infinite")
    envelope = abs(v2 - v16)
    assert abs(v_inf - exact2) <= 1.25 * envelope + 1e-9


def test_correlation_both_modes_agree_off_criticality():
    L = build_torus(16)
    e0 = L.edge_id(0, 0, KIND_B)
    f = L.edge_id(0, 2, KIND_B)
    p = (6.0, 1.0, 1.0)
    vi = correlation_pf(L, e0, f, p, mode="infinite")
    vf = correlation_pf(L, e0, f, p, mode="finite")
    assert vf == pytest.approx(vi, abs=5e-4)   # finite-size envelope


@pytest.mark.filterwarnings("ignore:quadrature not converged")
def test_correlation_near_deterministic_limit():
    L = build_torus(8)
    e0 = L.edge_id(0, 0, KIND_B)
    f = L.edge_id(0, 1, KIND_B)
    v = correlation_pf(L, e0, f, (1.0, 1.0, 1e-4))
    assert abs(v - 1.0) < 1e-2


def test_correlation_limit_tails():
    dec_plateau = correlation_limit((6, 1, 1), k_max=12)
    assert dec_plateau.tail == "plateau"
    assert dec_plateau.phase_label == "supercritical_a"
    assert (dec_plateau.squares[7:] > 1e-3).all()

    dec_decay = correlation_limit((2, 1, 1), k_max=12)
    assert dec_decay.tail == "decay"
    assert dec_decay.squares[-1] < 1e-3

    dec_c = correlation_limit((1, 1, 6), k_max=8)
    assert dec_c.tail == "plateau"
    assert dec_c.phase_label == "supercritical_c"


def test_correlation_limit_metadata():
    dec = correlation_limit((6, 1, 1), k_max=3, mode="finite", n=8)
    assert dec.mode == "finite" and dec.grid == 8
    assert dec.separations == [1, 2, 3]
    dec_inf = correlation_limit((6, 1, 1), k_max=2)
    assert dec_inf.mode == "infinite" and dec_inf.grid >= 32
    with pytest.raises(ConstraintError):
        correlation_limit((6, 1, 1), k_max=0)


def test_correlation_limit_refuses_critical():
    with pytest.raises(NearCriticalError):
        correlation_limit((4.0, 1.0, 1.0), k_max=4)
