"""Mixed Ising reformulation on the half-edge graph and the polygon
(even-subgraph) expansion derived from it.

With S = a + b + c the reduced couplings are

    A = (a - b - c)/S,  B = (b - a - c)/S,  C = (c - a - b)/S,

so A + B + C = -1, and the half-edge couplings are

    eps_a = sqrt(B C / A),  eps_b = sqrt(A C / B),  eps_c = sqrt(A B / C)

(principal square roots; purely imaginary in the acute regime where all
of A, B, C are negative).  Products recover the reduced couplings:
eps_a eps_b = C, eps_a eps_c = B, eps_b eps_c = A.

The joint Ising weight on vertex spins s_v and midpoint spins s_e is

    prod_v prod_(t in a,b,c) (1 + eps_t s_v s_(v,t)).

Summing out midpoints yields 2^(3n^2) prod_edges (1 + eps_e^2 s_u s_v);
summing out vertex spins yields 2^(2n^2) prod_v (1 + A s_b s_c
+ B s_a s_c + C s_a s_b), which is proportional to the 1-2 model weight.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (ConstraintError, DegenerateCouplingError, NumericalError,
                     ResourceError)
from .lattice import TorusLattice, build_half_edge, build_torus
from .model import ModelParams, _valid_table

EXACT_MAX_N = 2
_IMAG_TOL = 1e-9


@dataclass(frozen=True)
class IsingCouplings:
    params: tuple
    A: float
    B: float
    C: float
    eps_a: complex
    eps_b: complex
    eps_c: complex

    @property
    def eps(self):
        return (self.eps_a, self.eps_b, self.eps_c)

    @property
    def eps_sq(self):
        """Real squared couplings (eps_t^2 is real by construction)."""
        return tuple(complex(e * e).real for e in self.eps)

    @property
    def acute(self):
        """All squared couplings in (-1, 0); equivalent to the triple
        (a, b, c) satisfying the strict triangle-like acuteness
        a^2 < b^2 + c^2 and cyclic."""
        return all(-1.0 < v < 0.0 for v in self.eps_sq)


def derive_couplings(params) -> IsingCouplings:
    p = ModelParams.coerce(params)
    a, b, c = p.as_tuple
    S = a + b + c
    A = (a - b - c) / S
    B = (b - a - c) / S
    C = (c - a - b) / S
    if min(abs(A), abs(B), abs(C)) < 1e-12:
        raise DegenerateCouplingError(
            f"degenerate couplings for weights {p.as_tuple}: one of the "
            f"signature combinations vanishes (A={A:.3e}, B={B:.3e}, "
            f"C={C:.3e})")
    eps_a = cmath.sqrt(B * C / A)
    eps_b = cmath.sqrt(A * C / B)
    eps_c = cmath.sqrt(A * B / C)
    return IsingCouplings(params=p.as_tuple, A=A, B=B, C=C,
                          eps_a=eps_a, eps_b=eps_b, eps_c=eps_c)


def _spin_array(spins, size, what):
    s = np.asarray(spins)
    if s.shape != (size,) or not np.isin(s, (-1, 1)).all():
        raise ConstraintError(f"{what} must be +-1 of shape ({size},)")
    return s.astype(np.float64)


def ising_weight(L: TorusLattice, vertex_spins, midpoint_spins,
                 coup: IsingCouplings) -> complex:
    """Joint weight of a (vertex spins, midpoint spins) pair."""
    sv = _spin_array(vertex_spins, L.n_vertices, "vertex spins")
    se = _spin_array(midpoint_spins, L.n_edges, "midpoint spins")
    w = 1.0 + 0.0j
    for v in range(L.n_vertices):
        for t, eps in enumerate(coup.eps):
            w *= 1.0 + eps * sv[v] * se[L.vertex_edges[v, t]]
    return w


def marginal_on_vertices(L: TorusLattice, vertex_spins,
                         coup: IsingCouplings) -> float:
    """Sum of the joint weight over all midpoint spins, in closed form:
    2^(3n^2) prod_edges (1 + eps_kind^2 s_u s_v)."""
    sv = _spin_array(vertex_spins, L.n_vertices, "vertex spins")
    es = np.asarray(coup.eps_sq)[L.edge_kind]
    su = sv[L.edge_endpoints[:, 0]]
    swv = sv[L.edge_endpoints[:, 1]]
    return float(2.0 ** L.n_edges * np.prod(1.0 + es * su * swv))


def marginal_on_midpoints(L: TorusLattice, midpoint_spins,
                          coup: IsingCouplings) -> float:
    """Sum of the joint weight over all vertex spins, in closed form:
    2^(2n^2) prod_v (1 + A s_b s_c + B s_a s_c + C s_a s_b).

    Proportional to the 1-2 model weight of the configuration given by
    the midpoint spins: the product equals (4/S)^(2n^2) w(sigma)."""
    se = _spin_array(midpoint_spins, L.n_edges, "midpoint spins")
    sa = se[L.vertex_edges[:, 0]]
    sb = se[L.vertex_edges[:, 1]]
    sc = se[L.vertex_edges[:, 2]]
    factors = (1.0 + coup.A * sb * sc + coup.B * sa * sc
               + coup.C * sa * sb)
    return float(2.0 ** L.n_vertices * np.prod(factors))


def _all_vertex_spin_weights(L: TorusLattice, coup: IsingCouplings):
    """Vertex-marginal weights prod_edges(1 + eps^2 s_u s_v) for all
    2^(2n^2) vertex-spin assignments (the 2^(3n^2) prefactor is dropped;
    it cancels in every ratio).  Returns (spins matrix, weights)."""
    nv = L.n_vertices
    codes = np.arange(1 << nv, dtype=np.int64)
    spins = 2.0 * ((codes[:, None] >> np.arange(nv)) & 1) - 1.0
    es = np.asarray(coup.eps_sq)[L.edge_kind]
    w = np.ones(len(codes))
    for e in range(L.n_edges):
        u, v = L.edge_endpoints[e]
        w *= 1.0 + es[e] * spins[:, u] * spins[:, v]
    return spins, w


def correlation_ising(n, params, e, f) -> float:
    """Two-edge correlation through the vertex-spin marginal (n <= 2).

    <s_e s_f> = sum_sv D_ef(sv) w(sv) / sum_sv w(sv) where
    D_ef = eps_e (s_u + s_v) eps_f (s_x + s_y)
           / ((1 + eps_e^2)(1 + eps_f^2)).
    """
    if n > EXACT_MAX_N:
        raise ResourceError(
            f"Ising-marginal correlations support n <= {EXACT_MAX_N}")
    L = build_torus(n)
    coup = derive_couplings(params)
    if e == f:
        return 1.0  # s_e^2 = 1; the pair estimator assumes distinct edges
    spins, w = _all_vertex_spin_weights(L, coup)
    denom = w.sum()
    if abs(denom) < 1e-12 * max(np.abs(w).max(), 1.0):
        raise DegenerateCouplingError(
            "vertex-spin marginal normalisation vanishes")
    eps = coup.eps
    te, tf = int(L.edge_kind[e]), int(L.edge_kind[f])
    ue, ve = L.edge_endpoints[e]
    uf, vf = L.edge_endpoints[f]
    de = eps[te] * (spins[:, ue] + spins[:, ve])
    df = eps[tf] * (spins[:, uf] + spins[:, vf])
    norm = (1.0 + eps[te] ** 2) * (1.0 + eps[tf] ** 2)
    num = complex((de * df * w).sum() / norm)
    val = num / denom
    if abs(val.imag) > _IMAG_TOL * max(abs(val), 1.0):
        raise NumericalError(f"correlation has imaginary residue {val.imag}")
    return float(val.real)


# ---------------------------------------------------------------- polygons
def _cycle_space_masks(L: TorusLattice):
    """Basis of the cycle space of the base lattice as edge bitmasks
    (spanning tree + fundamental cycles), dimension n^2 + 1."""
    parent = {0: (None, None)}
    order = [0]
    tree = set()
    queue = [0]
    adj = [[] for _ in range(L.n_vertices)]
    for e in range(L.n_edges):
        u, v = int(L.edge_endpoints[e, 0]), int(L.edge_endpoints[e, 1])
        adj[u].append((e, v))
        adj[v].append((e, u))
    while queue:
        u = queue.pop(0)
        for e, v in adj[u]:
            if v not in parent:
                parent[v] = (u, e)
                tree.add(e)
                order.append(v)
                queue.append(v)
    if len(parent) != L.n_vertices:
        raise ConstraintError("lattice is not connected")

    def path_to_root(v):
        mask = 0
        while parent[v][0] is not None:
            u, e = parent[v]
            mask ^= 1 << e
            v = u
        return mask

    basis = []
    for e in range(L.n_edges):
        if e in tree:
            continue
        u, v = int(L.edge_endpoints[e, 0]), int(L.edge_endpoints[e, 1])
        basis.append((1 << e) ^ path_to_root(u) ^ path_to_root(v))
    return basis


def _halfedge_mask_of_edges(edge_mask_int, n_edges):
    """Lift a base-edge bitmask to the half-edge bitmask using both halves
    (half-edge h = 2e + side)."""
    m = 0
    for e in range(n_edges):
        if (edge_mask_int >> e) & 1:
            m |= 0b11 << (2 * e)
    return m


def _popcount_by_kind(mask, kind_masks):
    return tuple(bin(mask & km).count("1") for km in kind_masks)


def _halfedge_kind_masks(L: TorusLattice):
    masks = [0, 0, 0]
    for e in range(L.n_edges):
        masks[int(L.edge_kind[e])] |= 0b11 << (2 * e)
    return masks


def _coset_sum(members, kind_masks, eps):
    tot = 0.0 + 0.0j
    for m in members:
        ca, cb, cc = _popcount_by_kind(m, kind_masks)
        tot += eps[0] ** ca * eps[1] ** cb * eps[2] ** cc
    return tot


def _span(basis, offset=0):
    out = [offset]
    for b in basis:
        out.extend([m ^ b for m in out])
    return out


def polygon_partition(n, params) -> float:
    """Polygon-expansion partition sum: over even half-edge subgraphs,
    weight eps_t^(number of present half-edges of kind t).  Even subgraphs
    use both halves of each edge, so full edges count twice (n <= 2)."""
    if n > EXACT_MAX_N:
        raise ResourceError(
            f"polygon sums support n <= {EXACT_MAX_N}, got {n}")
    L = build_torus(n)
    coup = derive_couplings(params)
    basis = [_halfedge_mask_of_edges(b, L.n_edges)
             for b in _cycle_space_masks(L)]
    kind_masks = _halfedge_kind_masks(L)
    tot = _coset_sum(_span(basis), kind_masks, coup.eps)
    if abs(tot.imag) > _IMAG_TOL * max(abs(tot), 1.0):
        raise NumericalError(f"polygon sum has imaginary part {tot.imag}")
    return float(tot.real)


def _halfedge_join_path(L: TorusLattice, e, f):
    """Half-edge bitmask of a path between the midpoints of e and f in the
    half-edge graph (odd degree exactly at the two midpoints)."""
    if e == f:
        return 0
    H = build_half_edge(L)
    adj = H.adjacency()
    src, dst = H.midpoint(e), H.midpoint(f)
    prev = {src: (None, None)}
    queue = [src]
    while queue and dst not in prev:
        u = queue.pop(0)
        for v, h in adj[u]:
            if v not in prev:
                prev[v] = (u, h)
                queue.append(v)
    if dst not in prev:
        raise ConstraintError("midpoints not connected")
    mask = 0
    v = dst
    while prev[v][0] is not None:
        u, h = prev[v]
        mask ^= 1 << h
        v = u
    return mask


def polygon_twopoint(n, params, e, f) -> float:
    """Two-point polygon ratio: configurations with odd degree exactly at
    the midpoints of e and f, summed with the same half-edge kind weights,
    normalised by the closed polygon sum.  Equals the two-edge correlation
    of the 1-2 model (n <= 2)."""
    if n > EXACT_MAX_N:
        raise ResourceError(
            f"polygon sums support n <= {EXACT_MAX_N}, got {n}")
    L = build_torus(n)
    coup = derive_couplings(params)
    basis = [_halfedge_mask_of_edges(b, L.n_edges)
             for b in _cycle_space_masks(L)]
    kind_masks = _halfedge_kind_masks(L)
    closed = _coset_sum(_span(basis), kind_masks, coup.eps)
    if abs(closed) < 1e-12:
        raise DegenerateCouplingError("polygon partition sum vanishes")
    joined = _coset_sum(_span(basis, _halfedge_join_path(L, e, f)),
                        kind_masks, coup.eps)
    val = joined / closed
    if abs(val.imag) > _IMAG_TOL * max(abs(val), 1.0):
        raise NumericalError(f"polygon ratio has imaginary part {val.imag}")
    return float(val.real)


# ------------------------------------------------------------ diagnostics
def midpoint_marginal_ratio(n, params, n_configs=16, seed=0):
    """Constant of proportionality between the midpoint marginal and the
    1-2 model weight, checked over random valid configurations.

    Returns (constant, max relative spread).  The closed form predicts
    (8/S)^(2n^2) with S = a + b + c.
    """
    from .model import states_from_code, config_weight

    if n > EXACT_MAX_N:
        raise ResourceError(f"supported for n <= {EXACT_MAX_N}")
    L = build_torus(n)
    p = ModelParams.coerce(params)
    coup = derive_couplings(p)
    codes, _ = _valid_table(n)
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(codes), size=min(n_configs, len(codes)),
                       replace=False)
    ratios = []
    for i in picks:
        st = states_from_code(L, int(codes[i]))
        w = config_weight(L, st, p)
        m = marginal_on_midpoints(L, st, coup)
        ratios.append(m / w)
    ratios = np.array(ratios)
    mid = float(np.median(ratios))
    spread = float(np.abs(ratios / mid - 1.0).max())
    return mid, spread
