import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from onetwo.errors import ConstraintError, ResourceError, SizeError
from onetwo.lattice import KIND_A, KIND_B, build_torus
from onetwo.model import (
    ModelParams, cluster_decompose, code_from_states, config_weight,
    enumerate_count, enumerate_partition, exact_correlation, exact_measure,
    is_valid, states_from_code, vertex_signature,
)
from conftest import load_golden

pos_weight = st.floats(min_value=0.05, max_value=4.0,
                       allow_nan=False, allow_infinity=False)


def test_params_reject_nonpositive():
    for bad in [(0.0, 1, 1), (1, -1, 1), (1, 1, float("nan"))]:
        with pytest.raises(ConstraintError):
            ModelParams.coerce(bad)


def test_params_iter_and_lut():
    p = ModelParams.coerce((1.5, 2.0, 0.5))
    assert tuple(p) == (1.5, 2.0, 0.5)
    lut = p.weight_lut()
    assert lut[0] == lut[7] == 0.0
    assert lut[1] == lut[6] == 1.5
    assert lut[2] == lut[5] == 2.0
    assert lut[3] == lut[4] == 0.5


def test_golden_partition_values():
    for row in load_golden("partition_enum.json"):
        if row["n"] != 2:
            continue
        if "count" in row:
            assert enumerate_count(2) == row["count"]
        else:
            z = enumerate_partition(2, (row["a"], row["b"], row["c"]))
            assert z == pytest.approx(row["z"], rel=1e-12)


@pytest.mark.slow
def test_golden_partition_values_n3():
    for row in load_golden("partition_enum.json"):
        if row["n"] != 3:
            continue
        if "count" in row:
            assert enumerate_count(3) == row["count"]
        else:
            z = enumerate_partition(3, (row["a"], row["b"], row["c"]))
            assert z == pytest.approx(row["z"], rel=1e-12)


def test_count_symmetric_point(L2):
    # at unit weights the partition function counts configurations
    assert enumerate_partition(2, (1, 1, 1)) == enumerate_count(2) == 450


def test_enum_guards():
    with pytest.raises(SizeError):
        enumerate_partition(1, (1, 1, 1))
    with pytest.raises(ResourceError):
        enumerate_partition(4, (1, 1, 1))


def test_code_roundtrip(L2):
    for code in (0, 1, 4095, 2731):
        states = states_from_code(L2, code)
        assert set(np.unique(states)) <= {-1, 1}
        assert code_from_states(L2, states) == code


def test_validity_matches_degree_rule(L2):
    rng = np.random.default_rng(7)
    for code in rng.integers(0, 1 << 12, size=200):
        states = states_from_code(L2, int(code))
        present = states > 0
        deg = np.zeros(L2.n_vertices, dtype=int)
        for e in np.flatnonzero(present):
            deg[L2.edge_endpoints[e]] += 1
        assert is_valid(L2, states) == bool(((deg == 1) | (deg == 2)).all())


def test_signature_strings(L2):
    states = np.full(L2.n_edges, -1, dtype=np.int8)
    states[L2.vertex_edges[0, KIND_A]] = 1
    s = vertex_signature(L2, states, 0)
    assert isinstance(s, str) and len(s) == 3


@given(lam=st.floats(min_value=0.2, max_value=3.0, allow_nan=False),
       a=pos_weight, b=pos_weight, c=pos_weight)
@settings(max_examples=25, deadline=None)
def test_partition_homogeneity(lam, a, b, c):
    """Each configuration has exactly 2 n^2 vertices, each contributing one
    weight factor, so Z scales as lambda^(2 n^2)."""
    z1 = enumerate_partition(2, (a, b, c))
    z2 = enumerate_partition(2, (lam * a, lam * b, lam * c))
    assert z2 == pytest.approx(lam ** 8 * z1, rel=1e-9)


@given(code=st.integers(min_value=0, max_value=4095))
@settings(max_examples=80, deadline=None)
def test_weight_flip_invariance(code):
    L = build_torus(2)
    states = states_from_code(L, code)
    w = config_weight(L, states, (1.7, 0.4, 0.9))
    w_flip = config_weight(L, -states, (1.7, 0.4, 0.9))
    assert w_flip == pytest.approx(w, rel=1e-12)


def test_exact_measure_normalised(L2):
    table = exact_measure(2, (1.3, 0.7, 1.1))
    assert table.probs.sum() == pytest.approx(1.0, rel=1e-12)
    assert len(table.codes) == 450
    assert table.prob(0) == 0.0  # empty configuration is invalid
    # codes ascend, probabilities positive
    assert (np.diff(table.codes) > 0).all()
    assert (table.probs > 0).all()


def test_exact_correlation_basics(L2):
    p = (1.2, 1.0, 1.0)
    e = L2.edge_id(0, 0, KIND_B)
    f = L2.edge_id(0, 1, KIND_B)
    v = exact_correlation(2, p, e, f)
    assert -1.0 <= v <= 1.0
    assert exact_correlation(2, p, f, e) == pytest.approx(v, rel=1e-12)
    assert exact_correlation(2, p, e, e) == pytest.approx(1.0)


def test_golden_exact_correlations(L2):
    for row in load_golden("correlation_exact_n2.json"):
        p = (row["a"], row["b"], row["c"])
        for key, ref in row["pairs"].items():
            e, f = (int(t) for t in key.split(","))
            assert exact_correlation(2, p, e, f) == pytest.approx(
                ref, rel=1e-12, abs=1e-15)


def test_cluster_decompose_all_bc(L2):
    """b- and c-edges present everywhere: a single spanning word cluster
    and cycle components only."""
    states = np.full(L2.n_edges, 1, dtype=np.int8)
    states[L2.edge_kind == KIND_A] = -1
    assert is_valid(L2, states)
    dec = cluster_decompose(L2, states)
    assert all(comp.shape == "cycle" for comp in dec.components)
    # the b/c edges split into disjoint winding cycles; each carries one
    # homogeneous cluster of word 110 (a absent, kind a by complementarity)
    assert all(wc.word == 6 and wc.kind == "a" for wc in dec.word_clusters)
    assert all(wc.spanning for wc in dec.word_clusters)
    assert sum(wc.size for wc in dec.word_clusters) == L2.n_vertices
    assert dec.spans_kind("a")


def test_cluster_decompose_all_a(L2):
    states = np.full(L2.n_edges, -1, dtype=np.int8)
    states[L2.edge_kind == KIND_A] = 1
    assert is_valid(L2, states)
    dec = cluster_decompose(L2, states)
    assert all(comp.shape == "path" for comp in dec.components)
    assert len(dec.components) == L2.n_faces  # one dimer per cell
    assert not any(wc.spanning for wc in dec.word_clusters)
    assert all(wc.size == 2 for wc in dec.word_clusters)


def test_cluster_shapes_count(L2):
    states = np.full(L2.n_edges, 1, dtype=np.int8)
    states[L2.edge_kind == KIND_A] = -1
    dec = cluster_decompose(L2, states)
    counts = dec.shape_counts
    counts = counts() if callable(counts) else counts
    assert counts.get("cycle", 0) == len(dec.components)
