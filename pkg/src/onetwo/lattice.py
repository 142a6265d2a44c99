"""Toroidal hexagonal lattice, half-edge augmentation, and the dimer
decoration used by the Pfaffian machinery.

Indexing conventions (fixed throughout the package):

* cells (x, y) with 0 <= x, y < n, cell id = (y % n) * n + (x % n)
* each cell holds one white vertex W(x, y) = 2*cell and one black vertex
  B(x, y) = 2*cell + 1
* each cell holds three edges, ids 3*cell + t with t in {0: a, 1: b, 2: c}:
    a(x, y): W(x, y) -- B(x, y)        (horizontal)
    b(x, y): B(x, y) -- W(x, y+1)      (NW/SE direction)
    c(x, y): B(x, y) -- W(x+1, y)      (NE/SW direction)
* W(x, y) is incident to a(x, y), b(x, y-1), c(x-1, y);
  B(x, y) is incident to a(x, y), b(x, y), c(x, y).

The decoration replaces every hexagonal face by a fixed 12-vertex gadget
whose perfect matchings realise the even-subset indicator on the six
attachment slots.  Decorated edge ids are 21*cell + j where j in 0..5 is a
bisector (one per face attachment position) and j in 6..20 is an internal
gadget edge.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConstraintError, SizeError

KIND_A, KIND_B, KIND_C = 0, 1, 2
KIND_NAMES = ("a", "b", "c")

# signature word (int 0..7, bits c,b,a) -> vertex type, -1 for forbidden words
WORD_KIND = np.array([-1, 0, 1, 2, 2, 1, 0, -1], dtype=np.int8)

SQ3 = math.sqrt(3.0)
# lattice translation vectors and face-centre offset of the planar embedding
LATTICE_V1 = np.array([1.5, SQ3 / 2])
LATTICE_V2 = np.array([1.5, -SQ3 / 2])
FACE_CENTER = np.array([0.5, SQ3 / 2])

# ---------------------------------------------------------------- gadget
# Internal edges of the face gadget.  Slots 0..5 are the attachment points
# (one per face position), 6..11 are interior: two bridged triangle cities
# whose matchings extend exactly the even attachment sets.
GADGET_EDGES = [
    (0, 1), (0, 8), (1, 8), (2, 6), (2, 9), (6, 9), (8, 9),
    (7, 3), (7, 10), (3, 10), (4, 5), (4, 11), (5, 11), (10, 11),
    (6, 7),
]

# polar placement (degrees, radius) of the 12 gadget vertices inside a face;
# chosen so that all incident-edge directions are distinct at every vertex
SLOT_POLAR = [
    (240, 0.62), (300, 0.62), (0, 0.62), (60, 0.62), (120, 0.62), (180, 0.62),
    (20, 0.45), (40, 0.45),
    (270, 0.34), (345, 0.30), (75, 0.30), (150, 0.34),
]
SLOT_REL = [r * np.array([math.cos(math.radians(t)), math.sin(math.radians(t))])
            for t, r in SLOT_POLAR]

# face position j = 0..5: owning base vertex at cell offset (dx, dy) and
# class s relative to the face cell, and the edge kind whose bisector
# attaches there
FACE_POS_OFFSET = [(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, -1, 1), (1, -1, 0),
                   (0, -1, 1)]
FACE_POS_KIND = [KIND_C, KIND_B, KIND_A, KIND_C, KIND_B, KIND_A]

# base vertex class s and edge kind t -> (face cell offset, face position);
# inverse of the table above
_BISECTOR_FACE = {
    (0, KIND_A): (-1, 0, 2),
    (0, KIND_B): (-1, 1, 4),
    (0, KIND_C): (0, 0, 0),
    (1, KIND_A): (0, 1, 5),
    (1, KIND_B): (0, 0, 1),
    (1, KIND_C): (-1, 1, 3),
}

N_SYMBOL_SLOTS = 14  # 2 base classes + 12 gadget slots per cell


def _gadget_matchings(cover_set):
    """All perfect matchings of the gadget induced on ``cover_set``."""
    out = []

    def extend(remaining, used_edges):
        if not remaining:
            out.append(frozenset(used_edges))
            return
        v = remaining[0]
        for i, (p, q) in enumerate(GADGET_EDGES):
            if v == p:
                other = q
            elif v == q:
                other = p
            else:
                continue
            if other in remaining:
                rest = [u for u in remaining if u not in (v, other)]
                extend(rest, used_edges + [i])

    extend(sorted(cover_set), [])
    return out


@lru_cache(maxsize=1)
def gadget_extension_table():
    """Map even attachment set S (frozenset of slots 0..5) to the unique
    interior matching covering ({0..5} \\ S) + {6..11}.

    Validates the defining property of the gadget: even sets extend in
    exactly one way, odd sets in none.
    """
    table = {}
    for r in range(7):
        for S in itertools.combinations(range(6), r):
            cover = (set(range(6)) - set(S)) | set(range(6, 12))
            ms = _gadget_matchings(cover)
            if r % 2 == 0:
                if len(ms) != 1:
                    raise ConstraintError(
                        f"gadget defect: even set {S} has {len(ms)} extensions")
                table[frozenset(S)] = tuple(sorted(ms[0]))
            elif ms:
                raise ConstraintError(
                    f"gadget defect: odd set {S} has an extension")
    return table


# ---------------------------------------------------------------- base torus
@dataclass(eq=False)
class TorusLattice:
    """The n x n toroidal hexagonal lattice (2n^2 vertices, 3n^2 edges)."""

    n: int
    edge_endpoints: np.ndarray = field(repr=False)  # (3n^2, 2) tail, head
    edge_kind: np.ndarray = field(repr=False)       # (3n^2,)
    edge_crosses: np.ndarray = field(repr=False)    # (3n^2, 2) wraps gx, gy
    edge_cell_disp: np.ndarray = field(repr=False)  # (3n^2, 2) head - tail cell
    vertex_edges: np.ndarray = field(repr=False)    # (2n^2, 3), column = kind
    face_edges: np.ndarray = field(repr=False)      # (n^2, 6)
    face_vertices: np.ndarray = field(repr=False)   # (n^2, 6)

    @property
    def n_vertices(self):
        return 2 * self.n * self.n

    @property
    def n_edges(self):
        return 3 * self.n * self.n

    @property
    def n_faces(self):
        return self.n * self.n

    def cell(self, x, y):
        return (y % self.n) * self.n + (x % self.n)

    def w_vertex(self, x, y):
        return 2 * self.cell(x, y)

    def b_vertex(self, x, y):
        return 2 * self.cell(x, y) + 1

    def edge_id(self, x, y, kind):
        return 3 * self.cell(x, y) + kind

    def vertex_xy(self, v):
        c = v // 2
        return c % self.n, c // self.n

    def vertex_class(self, v):
        """0 for white, 1 for black."""
        return v % 2

    def edge_xy(self, e):
        c = e // 3
        return c % self.n, c // self.n

    def shift_vertex(self, v, dx, dy):
        x, y = self.vertex_xy(v)
        return 2 * self.cell(x + dx, y + dy) + (v % 2)

    def shift_edge(self, e, dx, dy):
        x, y = self.edge_xy(e)
        return 3 * self.cell(x + dx, y + dy) + (e % 3)

    def to_json(self, params=None, path=None):
        """JSON adjacency description; optionally written to ``path``."""
        weights = [1.0, 1.0, 1.0] if params is None else [float(v) for v in params]
        doc = {
            "n": self.n,
            "vertices": [
                {"id": int(v), "cell_x": int(self.vertex_xy(v)[0]),
                 "cell_y": int(self.vertex_xy(v)[1]),
                 "class": "W" if v % 2 == 0 else "B"}
                for v in range(self.n_vertices)
            ],
            "edges": [
                {"id": int(e),
                 "u": int(self.edge_endpoints[e, 0]),
                 "v": int(self.edge_endpoints[e, 1]),
                 "kind": KIND_NAMES[self.edge_kind[e]],
                 "weight": weights[self.edge_kind[e]],
                 "crosses_gx": bool(self.edge_crosses[e, 0]),
                 "crosses_gy": bool(self.edge_crosses[e, 1])}
                for e in range(self.n_edges)
            ],
        }
        if path is not None:
            with open(path, "w") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
        return doc


def build_torus(n) -> TorusLattice:
    """Construct the n x n toroidal hexagonal lattice.  Requires n >= 2."""
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise SizeError(f"lattice size must be an integer, got {n!r}")
    if n < 2:
        raise SizeError(f"lattice size must be at least 2, got {n}")
    n = int(n)
    ne = 3 * n * n
    endpoints = np.zeros((ne, 2), dtype=np.int32)
    kind = np.zeros(ne, dtype=np.int8)
    crosses = np.zeros((ne, 2), dtype=np.int8)
    disp = np.zeros((ne, 2), dtype=np.int8)

    def cell(x, y):
        return (y % n) * n + (x % n)

    for y in range(n):
        for x in range(n):
            c = cell(x, y)
            e = 3 * c
            endpoints[e] = (2 * c, 2 * c + 1)                   # a: W -- B
            kind[e] = KIND_A
            endpoints[e + 1] = (2 * c + 1, 2 * cell(x, y + 1))  # b: B -- W
            kind[e + 1] = KIND_B
            crosses[e + 1, 1] = 1 if y == n - 1 else 0
            disp[e + 1] = (0, 1)
            endpoints[e + 2] = (2 * c + 1, 2 * cell(x + 1, y))  # c: B -- W
            kind[e + 2] = KIND_C
            crosses[e + 2, 0] = 1 if x == n - 1 else 0
            disp[e + 2] = (1, 0)

    vertex_edges = np.zeros((2 * n * n, 3), dtype=np.int32)
    for y in range(n):
        for x in range(n):
            c = cell(x, y)
            vertex_edges[2 * c] = (3 * c, 3 * cell(x, y - 1) + 1,
                                   3 * cell(x - 1, y) + 2)
            vertex_edges[2 * c + 1] = (3 * c, 3 * c + 1, 3 * c + 2)

    face_edges = np.zeros((n * n, 6), dtype=np.int32)
    face_vertices = np.zeros((n * n, 6), dtype=np.int32)
    for y in range(n):
        for x in range(n):
            f = cell(x, y)
            face_edges[f] = (3 * f, 3 * f + 2,
                             3 * cell(x + 1, y - 1) + 1,
                             3 * cell(x + 1, y - 1),
                             3 * cell(x, y - 1) + 2,
                             3 * cell(x, y - 1) + 1)
            face_vertices[f] = (2 * f, 2 * f + 1,
                                2 * cell(x + 1, y),
                                2 * cell(x + 1, y - 1) + 1,
                                2 * cell(x + 1, y - 1),
                                2 * cell(x, y - 1) + 1)

    return TorusLattice(n=n, edge_endpoints=endpoints, edge_kind=kind,
                        edge_crosses=crosses, edge_cell_disp=disp,
                        vertex_edges=vertex_edges, face_edges=face_edges,
                        face_vertices=face_vertices)


# ---------------------------------------------------------------- half edges
@dataclass(eq=False)
class HalfEdgeGraph:
    """Base lattice with every edge subdivided by a midpoint.

    Augmented vertex ids: base vertices keep their ids, the midpoint of edge
    e gets id 2n^2 + e.  Half-edge h = 2*e + side where side 0 attaches the
    tail endpoint of e and side 1 the head.
    """

    base: TorusLattice
    half_endpoints: np.ndarray = field(repr=False)  # (6n^2, 2) vertex, midpoint

    @property
    def n_midpoints(self):
        return self.base.n_edges

    @property
    def n_aug_vertices(self):
        return self.base.n_vertices + self.base.n_edges

    @property
    def n_half_edges(self):
        return 2 * self.base.n_edges

    def midpoint(self, e):
        return self.base.n_vertices + e

    def adjacency(self):
        """Augmented-graph adjacency: list of (neighbour, half_edge_id)."""
        adj = [[] for _ in range(self.n_aug_vertices)]
        for h in range(self.n_half_edges):
            v, m = self.half_endpoints[h]
            adj[v].append((int(m), h))
            adj[m].append((int(v), h))
        return adj


def build_half_edge(L: TorusLattice) -> HalfEdgeGraph:
    ne = L.n_edges
    he = np.zeros((2 * ne, 2), dtype=np.int32)
    for e in range(ne):
        he[2 * e] = (L.edge_endpoints[e, 0], L.n_vertices + e)
        he[2 * e + 1] = (L.edge_endpoints[e, 1], L.n_vertices + e)
    return HalfEdgeGraph(base=L, half_endpoints=he)


# ---------------------------------------------------------------- decoration
@dataclass(eq=False)
class DecoratedGraph:
    """Dimer graph obtained by replacing every face with the gadget.

    14n^2 vertices: base ids unchanged, gadget vertex (cell, slot) gets id
    2n^2 + 12*cell + slot.  21n^2 edges, ids 21*cell + j (j = 0..5 the
    bisectors by face position, j = 6..20 the internal gadget edges).
    Bisector j of face f carries the weight of its edge kind; internal
    edges carry weight 1.
    """

    base: TorusLattice
    params: tuple
    edges_u: np.ndarray = field(repr=False)
    edges_v: np.ndarray = field(repr=False)
    edge_weight: np.ndarray = field(repr=False)
    edge_kind: np.ndarray = field(repr=False)    # -1 internal, else 0/1/2
    edge_orbit: np.ndarray = field(repr=False)   # 0..20, = edge id mod 21
    edge_cross: np.ndarray = field(repr=False)   # (E, 2) wraps gx, gy
    edge_disp: np.ndarray = field(repr=False)    # (E, 2) cell(v) - cell(u)
    edge_pu: np.ndarray = field(repr=False)      # (E, 2) planar tail position
    edge_pv: np.ndarray = field(repr=False)
    bisector_of: np.ndarray = field(repr=False)  # (2n^2, 3) vertex, kind -> eid

    @property
    def n(self):
        return self.base.n

    @property
    def n_vertices(self):
        return 14 * self.n * self.n

    @property
    def n_edges(self):
        return 21 * self.n * self.n

    def gadget_vertex(self, cell, slot):
        return self.base.n_vertices + 12 * cell + slot

    def vertex_symbol_slot(self, vid):
        """Symbol-matrix slot of a vertex: 0 = W, 1 = B, 2 + k for gadget."""
        nb = self.base.n_vertices
        if vid < nb:
            return vid % 2
        return 2 + (vid - nb) % 12

    def vertex_cell(self, vid):
        nb = self.base.n_vertices
        if vid < nb:
            return vid // 2
        return (vid - nb) // 12

    def weight_of(self, edge_sel):
        """Product of edge weights over a boolean mask or index array."""
        return float(np.prod(self.edge_weight[edge_sel]))

    def to_json(self, path=None):
        doc = {
            "n": self.n,
            "vertices": [
                {"id": int(v),
                 "cell": int(self.vertex_cell(v)),
                 "slot": int(self.vertex_symbol_slot(v))}
                for v in range(self.n_vertices)
            ],
            "edges": [
                {"id": int(e), "u": int(self.edges_u[e]),
                 "v": int(self.edges_v[e]),
                 "kind": ("internal" if self.edge_kind[e] < 0
                          else KIND_NAMES[self.edge_kind[e]]),
                 "weight": float(self.edge_weight[e]),
                 "crosses_gx": bool(self.edge_cross[e, 0]),
                 "crosses_gy": bool(self.edge_cross[e, 1])}
                for e in range(self.n_edges)
            ],
        }
        if path is not None:
            with open(path, "w") as fh:
                json.dump(doc, fh, indent=2, sort_keys=True)
        return doc


@lru_cache(maxsize=8)
def _decoration_structure(n):
    """Parameter-independent part of the decorated graph for size n."""
    L = build_torus(n)
    nb = L.n_vertices
    ne = 21 * n * n
    eu = np.zeros(ne, dtype=np.int32)
    ev = np.zeros(ne, dtype=np.int32)
    kind = np.full(ne, -1, dtype=np.int8)
    cross = np.zeros((ne, 2), dtype=np.int8)
    disp = np.zeros((ne, 2), dtype=np.int8)
    pu = np.zeros((ne, 2))
    pv = np.zeros((ne, 2))
    bisector_of = np.full((nb, 3), -1, dtype=np.int32)

    def vpos(x, y, s):
        base = x * LATTICE_V1 + y * LATTICE_V2
        return base + np.array([1.0, 0.0]) if s else base

    def gpos(x, y, slot):
        return x * LATTICE_V1 + y * LATTICE_V2 + FACE_CENTER + SLOT_REL[slot]

    for y in range(n):
        for x in range(n):
            f = L.cell(x, y)
            for j in range(6):
                dx, dy, s = FACE_POS_OFFSET[j]
                e = 21 * f + j
                u = 2 * L.cell(x + dx, y + dy) + s
                eu[e] = u
                ev[e] = nb + 12 * f + j
                kind[e] = FACE_POS_KIND[j]
                cross[e, 0] = 1 if (x + dx) // n != 0 else 0
                cross[e, 1] = 1 if (y + dy) // n != 0 else 0
                disp[e] = (-dx, -dy)
                pu[e] = vpos(x + dx, y + dy, s)
                pv[e] = gpos(x, y, j)
                bisector_of[u, FACE_POS_KIND[j]] = e
            for k, (su, sv) in enumerate(GADGET_EDGES):
                e = 21 * f + 6 + k
                eu[e] = nb + 12 * f + su
                ev[e] = nb + 12 * f + sv
                pu[e] = gpos(x, y, su)
                pv[e] = gpos(x, y, sv)

    if (bisector_of < 0).any():
        raise ConstraintError("decoration defect: missing bisector")
    return L, eu, ev, kind, cross, disp, pu, pv, bisector_of


def build_decorated(L: TorusLattice, params) -> DecoratedGraph:
    """Decorate the lattice and stamp edge weights from the parameters.

    The even-extension property of the gadget is validated on first use;
    the exhaustive two-to-one correspondence with configurations and the
    match of the symbol determinant with the closed-form characteristic
    polynomial are exercised by the test suite.
    """
    gadget_extension_table()  # validates the gadget on first call
    p = tuple(float(v) for v in params)
    if len(p) != 3 or any(v <= 0 for v in p) or any(math.isnan(v) for v in p):
        raise ConstraintError(
            f"parameters must be three positive weights, got {params!r}")
    base, eu, ev, kind, cross, disp, pu, pv, bis = _decoration_structure(L.n)
    w = np.ones(len(eu))
    sel = kind >= 0
    w[sel] = np.asarray(p)[kind[sel]]
    return DecoratedGraph(base=base, params=p, edges_u=eu, edges_v=ev,
                          edge_weight=w, edge_kind=kind,
                          edge_orbit=(np.arange(len(eu)) % 21).astype(np.int8),
                          edge_cross=cross, edge_disp=disp,
                          edge_pu=pu, edge_pv=pv, bisector_of=bis)


def bisector_face_site(L: TorusLattice, v, kind):
    """Face cell, face position, and symbol slot of the kind-``kind``
    bisector attached to base vertex v.  Cell coordinates are unwrapped."""
    x, y = L.vertex_xy(v)
    dfx, dfy, pos = _BISECTOR_FACE[(v % 2, kind)]
    return (x + dfx, y + dfy), pos, 2 + pos


def bisector_edge_id(L: TorusLattice, v, kind):
    (fx, fy), pos, _ = bisector_face_site(L, v, kind)
    return 21 * L.cell(fx, fy) + pos


# ---------------------------------------------------------------- dimers
@dataclass(eq=False)
class DimerCover:
    graph: DecoratedGraph
    edge_mask: np.ndarray  # boolean over decorated edges

    @property
    def edge_ids(self):
        return np.flatnonzero(self.edge_mask)

    def weight(self):
        return self.graph.weight_of(self.edge_mask)

    def is_perfect(self):
        deg = np.zeros(self.graph.n_vertices, dtype=np.int32)
        ids = self.edge_ids
        np.add.at(deg, self.graph.edges_u[ids], 1)
        np.add.at(deg, self.graph.edges_v[ids], 1)
        return bool((deg == 1).all())


def signature_words(L: TorusLattice, states):
    """Per-vertex signature words as ints (bit 0 = a edge, 1 = b, 2 = c)."""
    states = np.asarray(states)
    bits = (states[L.vertex_edges] > 0).astype(np.int8)
    return bits[:, 0] | (bits[:, 1] << 1) | (bits[:, 2] << 2)


def config_to_dimer(D: DecoratedGraph, states) -> DimerCover:
    """Map a valid configuration to its dimer cover.

    The present bisector at each base vertex is the one matching the
    vertex's signature type; gadget interiors extend by the even-set
    table.  A configuration and its global flip map to the same cover.
    """
    L = D.base
    words = signature_words(L, states)
    kinds = WORD_KIND[words]
    if (kinds < 0).any():
        bad = int(np.flatnonzero(kinds < 0)[0])
        raise ConstraintError(
            f"invalid configuration: vertex {bad} has signature word "
            f"{words[bad]:03b}")
    mask = np.zeros(D.n_edges, dtype=bool)
    mask[D.bisector_of[np.arange(L.n_vertices), kinds]] = True

    table = gadget_extension_table()
    per_face = mask[: 21 * L.n_faces].reshape(L.n_faces, 21)[:, :6]
    for f in range(L.n_faces):
        attached = frozenset(np.flatnonzero(per_face[f]).tolist())
        for k in table[attached]:
            mask[21 * f + 6 + k] = True
    return DimerCover(graph=D, edge_mask=mask)


# ---------------------------------------------------------------- paths
@dataclass(eq=False)
class DiagonalPath:
    """Shortest NW/SE ladder between two b-kind edges on a common column.

    ``pf_sites`` lists, per interior step j = 1..k, the four decorated
    vertices of the two crossed bisectors in the fixed order
    (W base, W gadget, B base, B gadget), as unwrapped (x, y, slot)
    symbol coordinates.
    """

    e: int
    f: int
    x: int
    y0: int
    k: int
    edges: list
    interior_vertices: list
    bisector_edges: list
    pf_sites: list

    @property
    def length(self):
        return len(self.edges)


def diagonal_path(L: TorusLattice, e, f) -> DiagonalPath:
    """Canonical short diagonal path between b-kind edges e and f."""
    for g in (e, f):
        if not 0 <= g < L.n_edges:
            raise ConstraintError(f"edge id {g} out of range")
        if L.edge_kind[g] != KIND_B:
            raise ConstraintError(
                f"edge {g} has kind {KIND_NAMES[L.edge_kind[g]]}; diagonal "
                f"correlations are defined for kind-b edge pairs")
    xe, ye = L.edge_xy(e)
    xf, yf = L.edge_xy(f)
    if xe != xf:
        raise ConstraintError(
            f"edges {e} and {f} do not lie on a common NW/SE diagonal")
    if e == f:
        return DiagonalPath(e=e, f=f, x=xe, y0=ye, k=0, edges=[e],
                            interior_vertices=[], bisector_edges=[],
                            pf_sites=[])
    n = L.n
    dy = (yf - ye) % n
    if dy <= n - dy:
        y0, k = ye, dy
    else:
        y0, k = yf, n - dy

    edges = [L.edge_id(xe, y0, KIND_B)]
    interior = []
    bis_edges = []
    sites = []
    for j in range(1, k + 1):
        edges.append(L.edge_id(xe, y0 + j, KIND_A))
        edges.append(L.edge_id(xe, y0 + j, KIND_B))
        wv = L.w_vertex(xe, y0 + j)
        bv = L.b_vertex(xe, y0 + j)
        interior.extend([wv, bv])
        bis_edges.append(bisector_edge_id(L, wv, KIND_C))
        bis_edges.append(bisector_edge_id(L, bv, KIND_C))
        sites.extend([
            (xe, y0 + j, 0), (xe, y0 + j, 2),
            (xe, y0 + j, 1), (xe - 1, y0 + j + 1, 5),
        ])
    return DiagonalPath(e=e, f=f, x=xe, y0=y0, k=k, edges=edges,
                        interior_vertices=interior, bisector_edges=bis_edges,
                        pf_sites=sites)


def path_interior_bisectors(L: TorusLattice, edge_seq):
    """Interior vertices and crossed bisectors of a self-avoiding edge path.

    Returns a list of (vertex, bisector_kind, base_site, gadget_site,
    bisector_edge_id) tuples, one per interior vertex, where the sites are
    (x, y, symbol_slot) triples.
    """
    edge_seq = [int(e) for e in edge_seq]
    if not edge_seq:
        raise ConstraintError("empty path")
    if len(set(edge_seq)) != len(edge_seq):
        raise ConstraintError("path repeats an edge")
    out = []
    seen_vertices = set()
    for ei, ej in zip(edge_seq[:-1], edge_seq[1:]):
        shared = set(L.edge_endpoints[ei]) & set(L.edge_endpoints[ej])
        if len(shared) != 1:
            raise ConstraintError(
                f"edges {ei} and {ej} are not consecutive on a path")
        v = int(shared.pop())
        if v in seen_vertices:
            raise ConstraintError(f"path revisits vertex {v}")
        seen_vertices.add(v)
        t = 3 - int(L.edge_kind[ei]) - int(L.edge_kind[ej])
        x, y = L.vertex_xy(v)
        (fx, fy), pos, slot = bisector_face_site(L, v, t)
        out.append((v, t, (x, y, v % 2), (fx, fy, slot),
                    bisector_edge_id(L, v, t)))
    return out
