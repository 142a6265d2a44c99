import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from onetwo.errors import ConstraintError, SizeError
from onetwo.lattice import (
    KIND_A, KIND_B, KIND_C, WORD_KIND,
    bisector_edge_id, build_decorated, build_half_edge, build_torus,
    config_to_dimer, diagonal_path, gadget_extension_table, signature_words,
)
from onetwo.model import states_from_code, is_valid, config_weight


def test_counts(L2, L3):
    for L in (L2, L3):
        n = L.n
        assert L.n_vertices == 2 * n * n
        assert L.n_edges == 3 * n * n
        assert L.n_faces == n * n
        assert L.vertex_edges.shape == (2 * n * n, 3)
        assert L.face_edges.shape == (n * n, 6)


def test_size_guard():
    with pytest.raises(SizeError):
        build_torus(1)


def test_every_vertex_sees_one_edge_of_each_kind(L3):
    L = L3
    for v in range(L.n_vertices):
        kinds = sorted(L.edge_kind[e] for e in L.vertex_edges[v])
        assert kinds == [KIND_A, KIND_B, KIND_C]
    # and the column index IS the kind
    for v in range(L.n_vertices):
        for k in range(3):
            assert L.edge_kind[L.vertex_edges[v, k]] == k


def test_edges_are_bipartite(L3):
    L = L3
    tails = L.edge_endpoints[:, 0]
    heads = L.edge_endpoints[:, 1]
    assert (tails % 2 != heads % 2).all()


def test_incidence_is_symmetric(L2):
    L = L2
    for e in range(L.n_edges):
        u, v = L.edge_endpoints[e]
        assert e in L.vertex_edges[u]
        assert e in L.vertex_edges[v]


def test_face_boundaries_close_up(L3):
    """Each hexagon's 6 edges touch exactly its 6 vertices, twice each."""
    L = L3
    for f in range(L.n_faces):
        verts = set()
        touch = {}
        for e in L.face_edges[f]:
            for v in L.edge_endpoints[e]:
                touch[v] = touch.get(v, 0) + 1
                verts.add(int(v))
        assert verts == set(int(v) for v in L.face_vertices[f])
        assert all(c == 2 for c in touch.values())


def test_wrap_displacement_consistency(L3):
    L = L3
    n = L.n
    for e in range(L.n_edges):
        u, v = L.edge_endpoints[e]
        (xu, yu), (xv, yv) = L.vertex_xy(u), L.vertex_xy(v)
        dx, dy = L.edge_cell_disp[e]
        assert ((xu + dx) % n, (yu + dy) % n) == (xv, yv)
        # crossing flags fire exactly when the step leaves the domain
        assert bool(L.edge_crosses[e, 0]) == (xu + dx not in range(n))
        assert bool(L.edge_crosses[e, 1]) == (yu + dy not in range(n))


def test_word_kind_table():
    assert list(WORD_KIND) == [-1, 0, 1, 2, 2, 1, 0, -1]
    # complement symmetry: word and its bit-complement share a kind
    for w in range(8):
        assert WORD_KIND[w] == WORD_KIND[w ^ 7]


def test_gadget_extension_table_is_even_complete():
    """Every even subset of the six boundary bisectors extends to a unique
    gadget matching; odd subsets to none (validated at construction)."""
    import itertools

    table = gadget_extension_table()
    assert len(table) == 32
    for r in range(7):
        for S in itertools.combinations(range(6), r):
            assert (frozenset(S) in table) == (r % 2 == 0)


def test_decorated_counts(L2):
    D = build_decorated(L2, (1.0, 1.0, 1.0))
    n = L2.n
    assert D.n_vertices == 14 * n * n
    assert D.n_edges == 21 * n * n
    deg = np.zeros(D.n_vertices, dtype=int)
    np.add.at(deg, D.edges_u, 1)
    np.add.at(deg, D.edges_v, 1)
    assert deg.min() >= 3  # every decorated vertex has at least 3 options


def test_decorated_weights_follow_kind(L2):
    D = build_decorated(L2, (1.5, 0.5, 2.5))
    w = {KIND_A: 1.5, KIND_B: 0.5, KIND_C: 2.5}
    for e in range(D.n_edges):
        k = int(D.edge_kind[e])
        expected = 1.0 if k < 0 else w[k]
        assert D.edge_weight[e] == expected


def test_decorated_param_guard(L2):
    with pytest.raises(ConstraintError):
        build_decorated(L2, (1.0, -2.0, 1.0))


def test_half_edge_counts(L2):
    H = build_half_edge(L2)
    assert H.n_midpoints == L2.n_edges
    assert H.n_aug_vertices == L2.n_vertices + L2.n_edges
    assert H.n_half_edges == 2 * L2.n_edges


@given(code=st.integers(min_value=0, max_value=(1 << 12) - 1))
@settings(max_examples=60, deadline=None)
def test_config_to_dimer_on_valid_configs(code):
    L = build_torus(2)
    states = states_from_code(L, code)
    if not is_valid(L, states):
        return
    D = build_decorated(L, (1.3, 0.7, 1.1))
    cover = config_to_dimer(D, states)
    assert cover.is_perfect()
    words = signature_words(L, states)
    assert (WORD_KIND[words] >= 0).all()
    # the cover carries the configuration weight, and the complementary
    # configuration (all edge states flipped) lands on the same cover --
    # that degeneracy is the source of the factor 2 in the partition sum
    assert cover.weight() == pytest.approx(
        config_weight(L, states, (1.3, 0.7, 1.1)), rel=1e-12)
    flipped = config_to_dimer(D, -states)
    assert (flipped.edge_mask == cover.edge_mask).all()


def test_diagonal_path_shapes(L2):
    L = L2
    e = L.edge_id(0, 0, KIND_B)
    f = L.edge_id(0, 1, KIND_B)
    path = diagonal_path(L, e, f)
    assert path.k == 1
    assert len(path.pf_sites) == 4
    assert len(path.bisector_edges) == 2
    same = diagonal_path(L, e, e)
    assert same.k == 0 and same.pf_sites == []


def test_diagonal_path_takes_short_way_round():
    L = build_torus(4)
    e = L.edge_id(1, 0, KIND_B)
    f = L.edge_id(1, 3, KIND_B)
    path = diagonal_path(L, e, f)
    assert path.k == 1  # wrap distance, not 3


def test_diagonal_path_rejects_other_kinds(L2):
    L = L2
    with pytest.raises(ConstraintError):
        diagonal_path(L, L.edge_id(0, 0, KIND_A), L.edge_id(0, 1, KIND_B))
    with pytest.raises(ConstraintError):
        diagonal_path(L, L.edge_id(0, 0, KIND_B), L.edge_id(1, 0, KIND_B))


def test_bisector_ids_cover_all_base_edges(L2):
    """Each base edge owns exactly two bisectors (one per endpoint)."""
    L = L2
    D = build_decorated(L, (1.0, 1.0, 1.0))
    seen = {}
    for v in range(L.n_vertices):
        for k in range(3):
            eid = bisector_edge_id(L, v, k)
            assert D.edge_kind[eid] == k
            seen.setdefault(int(L.vertex_edges[v, k]), []).append(eid)
    assert set(seen) == set(range(L.n_edges))
    for base_edge, bisectors in seen.items():
        assert len(bisectors) == 2 and bisectors[0] != bisectors[1]


def test_json_export_roundtrip(tmp_path, L2):
    path = tmp_path / "lattice.json"
    doc = L2.to_json(params=(1.0, 2.0, 3.0), path=str(path))
    assert path.exists()
    assert doc["n"] == 2
    assert len(doc["edges"]) == L2.n_edges
    D = build_decorated(L2, (1.0, 2.0, 3.0))
    ddoc = D.to_json()
    assert len(ddoc["vertices"]) == D.n_vertices
