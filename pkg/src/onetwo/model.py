"""Configurations of the 1-2 model, exact enumeration, and cluster
decomposition.

A configuration assigns +1 (present) or -1 (absent) to every edge; it is
valid when each vertex touches one or two present edges.  The weight is a
product over vertices of a, b, or c according to the signature type, where
the type of a valid word is the unique edge kind whose two companion bits
agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConstraintError, ResourceError, SizeError
from .lattice import (KIND_NAMES, WORD_KIND, TorusLattice, build_torus,
                      signature_words)

ENUM_MAX_N = 3
EXACT_MAX_N = 2

# word -> weight slot: lut[w] indexes into (a, b, c), -1 forbidden
_WORD_LUT = WORD_KIND


@dataclass(frozen=True)
class ModelParams:
    """Positive signature weights (a, b, c)."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name, v in zip("abc", (self.a, self.b, self.c)):
            if not (isinstance(v, (int, float)) and math.isfinite(v)) or v <= 0:
                raise ConstraintError(f"weight {name} must be positive and "
                                      f"finite, got {v!r}")

    @classmethod
    def coerce(cls, p):
        if isinstance(p, cls):
            return p
        return cls(*[float(v) for v in p])

    @property
    def as_tuple(self):
        return (self.a, self.b, self.c)

    def weight_lut(self):
        """Word (0..7) -> vertex weight, with forbidden words mapped to 0."""
        vals = np.array(self.as_tuple)
        lut = np.zeros(8)
        ok = _WORD_LUT >= 0
        lut[ok] = vals[_WORD_LUT[ok]]
        return lut

    def __iter__(self):
        return iter(self.as_tuple)


def states_from_code(L: TorusLattice, code) -> np.ndarray:
    """Decode a 3n^2-bit integer into a +/-1 state vector (bit i = edge i)."""
    bits = (int(code) >> np.arange(L.n_edges)) & 1
    return (2 * bits - 1).astype(np.int8)


def code_from_states(L: TorusLattice, states) -> int:
    bits = (np.asarray(states) > 0).astype(np.int64)
    return int((bits << np.arange(L.n_edges, dtype=np.int64)).sum())


def is_valid(L: TorusLattice, states) -> bool:
    """Every vertex incident to one or two present edges."""
    deg = (np.asarray(states)[L.vertex_edges] > 0).sum(axis=1)
    return bool(((deg == 1) | (deg == 2)).all())


def vertex_signature(L: TorusLattice, states, v) -> str:
    """Signature word at vertex v as a 3-character string, most significant
    bit first (NE/SW edge, NW/SE edge, horizontal edge)."""
    if not 0 <= v < L.n_vertices:
        raise ConstraintError(f"vertex id {v} out of range")
    word = int(signature_words(L, states)[v])
    return format(word, "03b")


def config_weight(L: TorusLattice, states, params) -> float:
    """Product of vertex weights; 0.0 for invalid configurations."""
    p = ModelParams.coerce(params)
    words = signature_words(L, states)
    lut = p.weight_lut()
    return float(np.prod(lut[words]))


# ------------------------------------------------------------- enumeration
@lru_cache(maxsize=4)
def _valid_table(n):
    """Exhaustive scan of all 2^(3n^2) configurations of the size-n torus.

    Returns (codes, counts) where counts[:, t] is the number of vertices of
    type t for each valid configuration.  Codes ascend.  The scan is chunked
    so the n = 3 case (2^27 codes) stays within a modest memory envelope.
    """
    L = build_torus(n)
    m = L.n_edges
    chunk_bits = min(m, 22)
    csize = 1 << chunk_bits
    ve = L.vertex_edges
    codes_out = []
    counts_out = []
    for start in range(0, 1 << m, csize):
        codes = np.arange(start, start + csize, dtype=np.int64)
        valid = np.ones(codes.shape, dtype=bool)
        counts = np.zeros((csize, 3), dtype=np.int16)
        for v in range(L.n_vertices):
            ba = (codes >> int(ve[v, 0])) & 1
            bb = (codes >> int(ve[v, 1])) & 1
            bc = (codes >> int(ve[v, 2])) & 1
            deg = ba + bb + bc
            valid &= (deg == 1) | (deg == 2)
            counts[:, 0] += bb == bc
            counts[:, 1] += ba == bc
            counts[:, 2] += ba == bb
        codes_out.append(codes[valid])
        counts_out.append(counts[valid])
    return np.concatenate(codes_out), np.concatenate(counts_out)


def _weights_from_counts(counts, params):
    a, b, c = ModelParams.coerce(params).as_tuple
    return (a ** counts[:, 0].astype(np.float64)
            * b ** counts[:, 1].astype(np.float64)
            * c ** counts[:, 2].astype(np.float64))


def enumerate_partition(n, params) -> float:
    """Partition function by exhaustive enumeration (n <= 3)."""
    if n > ENUM_MAX_N:
        raise ResourceError(
            f"exhaustive enumeration supports n <= {ENUM_MAX_N}, got {n}")
    if n < 2:
        raise SizeError(f"lattice size must be at least 2, got {n}")
    _, counts = _valid_table(n)
    w = _weights_from_counts(counts, params)
    return math.fsum(w) if len(w) < 10 ** 5 else float(w.sum())


def enumerate_count(n) -> int:
    """Number of valid configurations of the size-n torus (n <= 3)."""
    if n > ENUM_MAX_N:
        raise ResourceError(
            f"exhaustive enumeration supports n <= {ENUM_MAX_N}, got {n}")
    codes, _ = _valid_table(n)
    return len(codes)


@dataclass(eq=False)
class MeasureTable:
    """Exact probabilities over the valid configurations, codes ascending."""

    n: int
    params: ModelParams
    codes: np.ndarray
    probs: np.ndarray
    partition: float

    def prob(self, code):
        i = np.searchsorted(self.codes, code)
        if i < len(self.codes) and self.codes[i] == code:
            return float(self.probs[i])
        return 0.0


def exact_measure(n, params) -> MeasureTable:
    """Full probability table of the size-n torus (n <= 2)."""
    if n > EXACT_MAX_N:
        raise ResourceError(
            f"exact measure tables support n <= {EXACT_MAX_N}, got {n}")
    if n < 2:
        raise SizeError(f"lattice size must be at least 2, got {n}")
    p = ModelParams.coerce(params)
    codes, counts = _valid_table(n)
    w = _weights_from_counts(counts, p)
    Z = math.fsum(w)
    return MeasureTable(n=n, params=p, codes=codes, probs=w / Z, partition=Z)


def _edge_states_of_codes(codes, e):
    return (2 * ((codes >> int(e)) & 1) - 1).astype(np.float64)


def exact_correlation(n, params, e, f) -> float:
    """Two-edge correlation <state(e) state(f)> by enumeration (n <= 2)."""
    mt = exact_measure(n, params)
    se = _edge_states_of_codes(mt.codes, e)
    sf = _edge_states_of_codes(mt.codes, f)
    return float(np.dot(mt.probs, se * sf))


# ---------------------------------------------------------------- clusters
@dataclass(eq=False)
class Component:
    """Connected component of the present edges."""

    vertices: list
    edges: list
    shape: str          # "path", "cycle", or "other"
    winding: tuple      # net (gx, gy) winding parity flags
    spanning: bool


@dataclass(eq=False)
class WordCluster:
    """Connected vertex set with a common signature word, joined by
    present edges."""

    word: int
    vertices: list
    winding: tuple
    spanning: bool

    @property
    def kind(self):
        k = int(_WORD_LUT[self.word])
        return KIND_NAMES[k] if k >= 0 else "?"

    @property
    def size(self):
        return len(self.vertices)


@dataclass(eq=False)
class ClusterDecomposition:
    components: list
    word_clusters: list

    def spanning_words(self):
        return sorted({wc.word for wc in self.word_clusters if wc.spanning})

    def spans_kind(self, kind_name):
        return any(wc.spanning and wc.kind == kind_name
                   for wc in self.word_clusters)

    def largest_of_kind(self, kind_name):
        sizes = [wc.size for wc in self.word_clusters
                 if wc.kind == kind_name]
        return max(sizes) if sizes else 0

    def shape_counts(self):
        out = {"path": 0, "cycle": 0, "other": 0}
        for comp in self.components:
            out[comp.shape] += 1
        return out


def _trace_components(L, adj, vertices, edge_filter):
    """BFS over ``vertices`` along present edges accepted by edge_filter,
    tracking lifted cell coordinates to detect torus winding."""
    n = L.n
    seen = {}
    comps = []
    for v0 in vertices:
        if v0 in seen:
            continue
        lift = {v0: (0, 0)}
        queue = [v0]
        comp_vs = []
        comp_es = set()
        wind = [False, False]
        seen[v0] = len(comps)
        while queue:
            u = queue.pop()
            comp_vs.append(u)
            ux, uy = lift[u]
            for e, w in adj[u]:
                if not edge_filter(e, u, w):
                    continue
                comp_es.add(e)
                tail = int(L.edge_endpoints[e, 0])
                ddx, ddy = (int(L.edge_cell_disp[e, 0]),
                            int(L.edge_cell_disp[e, 1]))
                if u != tail:
                    ddx, ddy = -ddx, -ddy
                wx, wy = ux + ddx, uy + ddy
                if w not in lift:
                    lift[w] = (wx, wy)
                    seen[w] = len(comps)
                    queue.append(w)
                else:
                    ex, ey = lift[w]
                    if (wx - ex) % n or (wy - ey) % n:
                        raise AssertionError("lift mismatch off-lattice")
                    if wx != ex:
                        wind[0] = True
                    if wy != ey:
                        wind[1] = True
        comps.append((comp_vs, sorted(comp_es), (wind[0], wind[1])))
    return comps


def cluster_decompose(L: TorusLattice, states) -> ClusterDecomposition:
    """Split the present edges into paths/cycles and group vertices into
    homogeneous signature-word clusters.

    A component or cluster is *spanning* when its lift winds the torus in
    at least one direction.
    """
    states = np.asarray(states)
    present = states > 0
    adj = [[] for _ in range(L.n_vertices)]
    for e in np.flatnonzero(present):
        u, v = int(L.edge_endpoints[e, 0]), int(L.edge_endpoints[e, 1])
        adj[u].append((int(e), v))
        adj[v].append((int(e), u))
    deg = np.array([len(a) for a in adj])

    touched = [v for v in range(L.n_vertices) if deg[v] > 0]
    raw = _trace_components(L, adj, touched, lambda e, u, w: True)
    comps = []
    for vs, es, wind in raw:
        degs = deg[vs]
        if (degs > 2).any():
            shape = "other"
        elif len(es) == len(vs):
            shape = "cycle"
        else:
            shape = "path"
        comps.append(Component(vertices=sorted(vs), edges=es, shape=shape,
                               winding=wind, spanning=wind[0] or wind[1]))

    words = signature_words(L, states)
    same_word = lambda e, u, w: words[u] == words[w]  # noqa: E731
    raw_wc = _trace_components(L, adj, list(range(L.n_vertices)), same_word)
    clusters = [WordCluster(word=int(words[vs[0]]), vertices=sorted(vs),
                            winding=wind, spanning=wind[0] or wind[1])
                for vs, es, wind in raw_wc]
    return ClusterDecomposition(components=comps, word_clusters=clusters)
