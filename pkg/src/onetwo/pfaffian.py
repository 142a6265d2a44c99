"""Pfaffians, the oriented dimer matrices of the decorated torus, their
twisted inverses, and the correlation formulas built on them.

The orientation is the periodic clockwise-odd one: every contractible face
of the decorated graph has an odd number of edges oriented against the
clockwise traversal.  The four matrices K^(theta, tau) negate the edges
crossing the horizontal / vertical homology cuts.

Partition function: Z = 1/2 |sum_i s_i Pf K^i| over the four twists in the
order (0,0), (0,1), (1,0), (1,1), with sign vector s = (+,+,+,+) for even n
and (+,-,-,+) for odd n.  The parity rule reflects which winding sector the
genuine edge-configuration covers occupy; it is validated against
exhaustive enumeration at n = 2 and n = 3 in the test suite.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (ConstraintError, NearCriticalError, NumericalError,
                     StateError)
from .lattice import (KIND_C, N_SYMBOL_SLOTS, DecoratedGraph, TorusLattice,
                      build_decorated, build_torus, diagonal_path,
                      path_interior_bisectors)
from .model import ModelParams
from .spectral import critical_margin

TWISTS = ((0, 0), (0, 1), (1, 0), (1, 1))

# quadrature sizes tried by the infinite-volume kernel and the probe
# entries used to decide convergence
_QUAD_SIZES = (32, 64, 128, 256, 512)
_QUAD_PROBES = ((0, 0, 0, 1), (0, 1, 0, 3), (1, 0, 1, 0), (2, 1, 5, 7),
                (0, 0, 2, 3))

REFUSE_MARGIN = 1e-6
WARN_MARGIN = 1e-3


def pfaffian(M):
    """Pfaffian of an even-dimensional skew-symmetric matrix.

    Parlett-Reid tridiagonalisation with partial pivoting; O(m^3).
    Real input gives a float, complex input a complex number.
    """
    A = np.asarray(M)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConstraintError(f"expected a square matrix, got {A.shape}")
    m = A.shape[0]
    if m % 2:
        raise ConstraintError(f"Pfaffian needs even dimension, got {m}")
    scale = np.abs(A).max() if m else 0.0
    if m and np.abs(A + A.T).max() > 1e-9 * max(scale, 1.0):
        raise ConstraintError("matrix is not skew-symmetric")
    if m == 0:
        return 1.0
    was_real = not np.iscomplexobj(A)
    A = A.astype(complex)
    val = 1.0 + 0.0j
    for k in range(0, m - 2, 2):
        kp = k + 1 + int(np.argmax(np.abs(A[k, k + 1:])))
        if A[k, kp] == 0:
            return 0.0 if was_real else 0.0 + 0.0j
        if kp != k + 1:
            A[[k + 1, kp]] = A[[kp, k + 1]]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            val = -val
        piv = A[k, k + 1]
        val *= piv
        tau = A[k, k + 2:] / piv
        row = A[k + 1, k + 2:]
        A[k + 2:, k + 2:] += np.outer(row, tau) - np.outer(tau, row)
    val *= A[m - 2, m - 1]
    return val.real if was_real else val


def block_y(m):
    """Direct sum of m copies of [[0, 1], [-1, 0]]; Pf = 1."""
    Y = np.zeros((2 * m, 2 * m))
    for i in range(0, 2 * m, 2):
        Y[i, i + 1] = 1.0
        Y[i + 1, i] = -1.0
    return Y


# ------------------------------------------------------------ orientation
def _solve_gf2(A, b):
    A = A.copy() % 2
    b = b.copy() % 2
    m, k = A.shape
    piv = []
    r = 0
    for col in range(k):
        rows = [i for i in range(r, m) if A[i, col]]
        if not rows:
            continue
        A[[r, rows[0]]] = A[[rows[0], r]]
        b[[r, rows[0]]] = b[[rows[0], r]]
        for i in range(m):
            if i != r and A[i, col]:
                A[i] ^= A[r]
                b[i] ^= b[r]
        piv.append(col)
        r += 1
    for i in range(r, m):
        if b[i]:
            raise NumericalError("inconsistent orientation constraints")
    x = np.zeros(k, dtype=np.uint8)
    for i, col in enumerate(piv):
        x[col] = b[i]
    return x


def _rotation_system(D: DecoratedGraph):
    inc = [[] for _ in range(D.n_vertices)]
    for e in range(D.n_edges):
        du = D.edge_pv[e] - D.edge_pu[e]
        ang = math.atan2(du[1], du[0])
        rev = math.atan2(-du[1], -du[0])
        inc[int(D.edges_u[e])].append((ang, e, 0))
        inc[int(D.edges_v[e])].append((rev, e, 1))
    rot = []
    for v in range(D.n_vertices):
        inc[v].sort()
        angs = [a for a, _, _ in inc[v]]
        if len(angs) != len(set(angs)):
            raise NumericalError(f"embedding angle clash at vertex {v}")
        rot.append([(e, d) for _, e, d in inc[v]])
    return rot


def _trace_faces(D: DecoratedGraph, rot):
    pos = {}
    for v in range(D.n_vertices):
        for idx, dart in enumerate(rot[v]):
            pos[dart] = (v, idx)
    unused = set((e, d) for e in range(D.n_edges) for d in (0, 1))
    faces = []
    while unused:
        start = min(unused)
        face = []
        dart = start
        while True:
            face.append(dart)
            unused.discard(dart)
            e, d = dart
            head = int(D.edges_v[e]) if d == 0 else int(D.edges_u[e])
            rev = (e, 1 - d)
            _, idx = pos[rev]
            dart = rot[head][(idx + 1) % len(rot[head])]
            if dart == start:
                break
        faces.append(face)
    return faces


def _face_geometry(D: DecoratedGraph, face):
    """Lifted polygon of a traced face: (signed area, closure defect)."""
    pt = np.zeros(2)
    area = 0.0
    defect_start = pt.copy()
    for e, d in face:
        vec = D.edge_pv[e] - D.edge_pu[e]
        nxt = pt + (vec if d == 0 else -vec)
        area += pt[0] * nxt[1] - nxt[0] * pt[1]
        pt = nxt
    return 0.5 * area, float(np.linalg.norm(pt - defect_start))


@lru_cache(maxsize=8)
def _orientation_flips(n):
    """Orbit flips (21 values in {0,1}) making every face clockwise-odd.

    The constraint system is translate-invariant, so faces collapse onto a
    handful of distinct orbit constraints; consistency across translates is
    asserted.
    """
    D = build_decorated(build_torus(n), (1.0, 1.0, 1.0))
    rot = _rotation_system(D)
    faces = _trace_faces(D, rot)
    if len(faces) != 7 * n * n:
        raise NumericalError(
            f"face tracing found {len(faces)} faces, expected {7 * n * n}")
    rows = {}
    for face in faces:
        area, defect = _face_geometry(D, face)
        if defect > 1e-9:
            raise NumericalError("non-contractible face in tracing")
        if area >= 0:  # normalise traversal to clockwise
            darts = [(e, 1 - d) for e, d in reversed(face)]
        else:
            darts = face
        vec = np.zeros(21, dtype=np.uint8)
        for e, _ in darts:
            vec[int(D.edge_orbit[e])] ^= 1
        L = len(darts)
        sf = sum(d for _, d in darts) % 2
        rhs = (1 + L + sf) % 2
        key = tuple(sorted(int(D.edge_orbit[e]) for e, _ in darts))
        prior = rows.get(key)
        if prior is None:
            rows[key] = (vec, rhs)
        elif not (prior[0] == vec).all() or prior[1] != rhs:
            raise NumericalError("orientation constraints not "
                                 "translate-invariant")
    A = np.array([v for v, _ in rows.values()], dtype=np.uint8)
    b = np.array([r for _, r in rows.values()], dtype=np.uint8)
    return _solve_gf2(A, b)


@dataclass(eq=False)
class KasteleynSystem:
    """Clockwise-odd orientation of a decorated torus plus the machinery
    derived from it: twisted matrices, the fundamental-domain symbol, and
    the calibrated partition combination."""

    graph: DecoratedGraph
    flips: np.ndarray = field(repr=False)
    edge_sign: np.ndarray = field(repr=False)
    pfaffians: tuple | None = None
    dominant: tuple | None = None
    calibrated: bool = False

    @property
    def n(self):
        return self.graph.n

    @property
    def params(self):
        return self.graph.params

    def _signed_weights(self, theta, tau):
        sw = self.edge_sign * self.graph.edge_weight
        if theta:
            sw = sw * (1 - 2 * self.graph.edge_cross[:, 0])
        if tau:
            sw = sw * (1 - 2 * self.graph.edge_cross[:, 1])
        return sw

    def matrix(self, theta, tau):
        """Dense skew matrix K^(theta, tau) of the decorated torus."""
        D = self.graph
        K = np.zeros((D.n_vertices, D.n_vertices))
        sw = self._signed_weights(theta, tau)
        np.add.at(K, (D.edges_u, D.edges_v), sw)
        np.add.at(K, (D.edges_v, D.edges_u), -sw)
        return K

    def symbol_grid(self, zs, ws):
        """Fundamental-domain symbol K1 evaluated on a grid: the (j, l)
        entry is K1(zs[j], ws[l]).  Phase convention: an edge with cell
        displacement (dx, dy) carries z^dy w^dx."""
        D = self.graph
        Z = np.asarray(zs, dtype=complex)[:, None]
        W = np.asarray(ws, dtype=complex)[None, :]
        out = np.zeros((Z.shape[0], W.shape[1],
                        N_SYMBOL_SLOTS, N_SYMBOL_SLOTS), dtype=complex)
        for e in range(21):
            su = D.vertex_symbol_slot(int(D.edges_u[e]))
            sv = D.vertex_symbol_slot(int(D.edges_v[e]))
            s = float(self.edge_sign[e]) * float(D.edge_weight[e])
            dx, dy = int(D.edge_disp[e, 0]), int(D.edge_disp[e, 1])
            ph = (Z ** dy) * (W ** dx)
            out[:, :, su, sv] += s * ph
            out[:, :, sv, su] -= s / ph
        return out

    def symbol(self, z, w):
        if z == 0 or w == 0:
            raise ConstraintError("symbol arguments must be nonzero")
        return self.symbol_grid([z], [w])[0, 0]

    def twist_momenta(self, theta, tau):
        n = self.n
        zs = [cmath.exp(1j * math.pi * (2 * j + tau) / n) for j in range(n)]
        ws = [cmath.exp(1j * math.pi * (2 * l + theta) / n) for l in range(n)]
        return zs, ws

    def twist_log_magnitudes(self):
        """log |Pf K^(theta, tau)| for all twists via the symbol-determinant
        product; avoids dense Pfaffians."""
        out = {}
        for theta, tau in TWISTS:
            zs, ws = self.twist_momenta(theta, tau)
            dets = np.linalg.det(self.symbol_grid(zs, ws))
            out[(theta, tau)] = 0.5 * float(np.log(np.abs(dets)).sum())
        return out

    def dominant_twist(self):
        mags = self.twist_log_magnitudes()
        best = max(mags.values())
        for tw in TWISTS:  # deterministic tie-break in twist order
            if mags[tw] >= best - 1e-12 * max(abs(best), 1.0):
                return tw
        return TWISTS[0]

    def twisted_pfaffians(self):
        """Signed Pfaffians of the four twisted matrices (dense, O(n^6))."""
        return tuple(pfaffian(self.matrix(th, ta)) for th, ta in TWISTS)

    def parity_signs(self):
        return (1.0, 1.0, 1.0, 1.0) if self.n % 2 == 0 else \
            (1.0, -1.0, -1.0, 1.0)

    def calibrate(self):
        """Attach the twisted Pfaffians and the dominant twist."""
        pfs = self.twisted_pfaffians()
        if not all(math.isfinite(v) for v in pfs):
            raise NumericalError(f"non-finite twisted Pfaffians: {pfs}")
        self.pfaffians = pfs
        idx = int(np.argmax(np.abs(pfs)))
        self.dominant = TWISTS[idx]
        self.calibrated = True
        return self

    def partition(self):
        if not self.calibrated:
            raise StateError("call calibrate() before partition()")
        signs = self.parity_signs()
        return 0.5 * abs(sum(s * v for s, v in zip(signs, self.pfaffians)))


def kasteleyn_orient(D: DecoratedGraph) -> KasteleynSystem:
    """Clockwise-odd orientation of the decorated graph (cached per size)."""
    flips = _orientation_flips(D.n)
    sign = np.where(flips[D.edge_orbit] == 1, -1.0, 1.0)
    return KasteleynSystem(graph=D, flips=flips, edge_sign=sign)


def partition_via_pfaffian(n, params) -> float:
    """Partition function of the size-n torus from the four twisted
    Pfaffians of the decorated graph."""
    p = ModelParams.coerce(params)
    D = build_decorated(build_torus(n), p.as_tuple)
    return kasteleyn_orient(D).calibrate().partition()


# ------------------------------------------------------------ inverses
class _KernelBase:
    """Entries of an inverse dimer matrix addressed by unwrapped symbol
    coordinates (x, y, slot)."""

    def entry(self, dx, dy, su, sv):
        raise NotImplementedError

    def submatrix(self, sites):
        """Skew matrix of inverse entries over a site list; validated real.

        Site coordinates must stay unwrapped: the displacements fed to
        ``entry`` are raw differences, so a cluster near a fundamental-domain
        seam keeps its local geometry under every boundary twist."""
        m = len(sites)
        M = np.zeros((m, m), dtype=complex)
        if m == 0:
            return M.real
        for i in range(m):
            xi, yi, si = sites[i]
            for j in range(i + 1, m):
                xj, yj, sj = sites[j]
                M[i, j] = self.entry(xj - xi, yj - yi, si, sj)
                M[j, i] = -M[i, j]
        imax = float(np.abs(M.imag).max()) if m else 0.0
        scale = max(float(np.abs(M).max()), 1e-30)
        if imax > 1e-9 * max(scale, 1.0):
            raise NumericalError(
                f"inverse entries have imaginary residue {imax:.2e}")
        return M.real.copy()


class FiniteKernel(_KernelBase):
    """Inverse of the dominant-twist matrix on the size-n torus, evaluated
    through the momentum-block diagonalisation.

    Entry (u, v) = (1/n^2) sum_(j,l) [K1(z_j, w_l)^-1]_(su, sv)
                   z_j^-(yv - yu) w_l^-(xv - xu)
    with z twisted by tau and w twisted by theta.
    """

    def __init__(self, system: KasteleynSystem, twist=None):
        self.system = system
        self.n = system.n
        self.twist = twist if twist is not None else system.dominant_twist()
        zs, ws = system.twist_momenta(*self.twist)
        grid = system.symbol_grid(zs, ws)
        try:
            self.blocks = np.linalg.inv(grid)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(
                f"singular symbol at twist {self.twist}: {exc}") from exc
        self.zs = np.asarray(zs)
        self.ws = np.asarray(ws)

    def entry(self, dx, dy, su, sv):
        pz = self.zs ** (-dy)
        pw = self.ws ** (-dx)
        acc = (self.blocks[:, :, su, sv] * pz[:, None] * pw[None, :]).sum()
        return acc / (self.n * self.n)


class InfiniteKernel(_KernelBase):
    """Infinite-volume inverse via trapezoid quadrature over the unit
    torus; spectrally accurate away from the critical surface.

    The default half-integer grid (offset 0.5) keeps every node away from
    (z, w) = (1, 1), the one point of the unit torus the characteristic
    polynomial can reach zero at, so accuracy degrades gracefully toward
    the critical surface and toward the degenerate edges of parameter
    space.  Construction refuses within ``REFUSE_MARGIN`` of the critical
    surface (normalised margin) and warns within ``WARN_MARGIN``.
    """

    def __init__(self, params, rtol=1e-10, grid_offset=0.5):
        p = ModelParams.coerce(params)
        self.params = p
        margin = critical_margin(p.as_tuple)
        if margin < REFUSE_MARGIN:
            raise NearCriticalError(
                f"weights {p.as_tuple} lie on or within {margin:.2e} of the "
                f"critical surface sqrt(a) = sqrt(b) + sqrt(c) (in some "
                f"ordering); the quadrature inverse is not trustworthy there")
        if margin < WARN_MARGIN:
            warnings.warn(
                f"weights are within {margin:.2e} of the critical surface "
                f"sqrt(a) = sqrt(b) + sqrt(c); quadrature entries converge "
                f"slowly", stacklevel=2)
        system = kasteleyn_orient(
            build_decorated(build_torus(2), p.as_tuple))
        self._sys = system
        prev = None
        chosen = None
        for N in _QUAD_SIZES:
            ph = np.exp(2j * math.pi * (np.arange(N) + grid_offset) / N)
            try:
                grid = np.linalg.inv(system.symbol_grid(ph, ph))
            except np.linalg.LinAlgError as exc:
                raise NumericalError(
                    "symbol is singular on the quadrature grid; retry with "
                    "a different grid_offset") from exc
            self.N, self.ph, self.blocks = N, ph, grid
            probes = np.array([self.entry(*pr) for pr in _QUAD_PROBES])
            if prev is not None and np.abs(probes - prev).max() < rtol:
                chosen = N
                break
            prev = probes
        if chosen is None:
            warnings.warn(
                f"quadrature not converged to {rtol:.1e} at N = {self.N}; "
                f"entries may be under-resolved", stacklevel=2)

    def entry(self, dx, dy, su, sv):
        pz = self.ph ** (-dy)
        pw = self.ph ** (-dx)
        return (self.blocks[:, :, su, sv] * pz[:, None] * pw[None, :]).mean()


def inverse_submatrix(kernel, sites):
    """Skew matrix of inverse entries over (x, y, slot) sites."""
    return kernel.submatrix(sites)


def make_kernel(params, mode="infinite", n=None, **kw):
    if mode == "infinite":
        return InfiniteKernel(params, **kw)
    if mode == "finite":
        if n is None:
            raise ConstraintError("finite mode needs a lattice size n")
        p = ModelParams.coerce(params)
        system = kasteleyn_orient(build_decorated(build_torus(n), p.as_tuple))
        return FiniteKernel(system)
    raise ConstraintError(f"unknown kernel mode {mode!r}")


# ------------------------------------------------------------ correlations
def path_probability(L: TorusLattice, edge_seq, params, mode="infinite",
                     kernel=None) -> float:
    """Probability that a self-avoiding edge path is fully present.

    Value = 1/2 * (product of crossed-bisector weights) * |Pf| of the
    inverse matrix restricted to the bisector endpoints.  A single edge
    gives exactly 1/2.
    """
    p = ModelParams.coerce(params)
    interior = path_interior_bisectors(L, edge_seq)
    if kernel is None:
        kernel = make_kernel(p, mode=mode, n=L.n)
    sites = []
    wprod = 1.0
    for _, t, base_site, gadget_site, _ in interior:
        sites.extend([base_site, gadget_site])
        wprod *= p.as_tuple[t]
    M = kernel.submatrix(sites)
    return 0.5 * wprod * abs(pfaffian(M))


def correlation_pf(L: TorusLattice, e, f, params, mode="infinite",
                   kernel=None) -> float:
    """Two-edge correlation for b-kind edges on a common NW/SE diagonal,
    via the bordered-Pfaffian formula.

    M = Y + 2c K^-1 restricted to the 4k bisector endpoints of the short
    ladder between e and f, in the fixed (base, gadget) pair order; the
    correlation is Pf M.
    """
    p = ModelParams.coerce(params)
    path = diagonal_path(L, e, f)
    if path.k == 0:
        return 1.0
    if kernel is None:
        kernel = make_kernel(p, mode=mode, n=L.n)
    Kin = kernel.submatrix(path.pf_sites)
    M = block_y(2 * path.k) + 2.0 * p.c * Kin
    val = pfaffian(M)
    return float(val)


@dataclass(eq=False)
class CorrelationDecay:
    params: tuple
    separations: list
    values: np.ndarray
    mode: str
    grid: int            # torus size n (finite) or quadrature N (infinite)
    tail: str            # "plateau" or "decay"
    phase_label: str

    @property
    def squares(self):
        return self.values ** 2


def correlation_limit(params, k_max, mode="infinite", n=None) -> CorrelationDecay:
    """Diagonal correlations at separations 1..k_max and the classified
    tail behaviour: "plateau" (long-range order) or "decay"."""
    from .spectral import classify_phase

    if k_max < 1:
        raise ConstraintError(f"k_max must be >= 1, got {k_max}")
    p = ModelParams.coerce(params)
    if mode == "finite":
        size = n if n is not None else max(2, 2 * k_max + 2)
        kernel = make_kernel(p, mode="finite", n=size)
    else:
        size = None
        kernel = make_kernel(p, mode="infinite")
    vals = []
    for k in range(1, k_max + 1):
        sites = []
        for j in range(1, k + 1):
            sites.extend([(0, j, 0), (0, j, 2), (0, j, 1), (-1, j + 1, 5)])
        Kin = kernel.submatrix(sites)
        M = block_y(2 * k) + 2.0 * p.c * Kin
        vals.append(float(pfaffian(M)))
    values = np.array(vals)

    window = values[-min(5, len(values)):]
    ks = np.arange(len(values) - len(window), len(values)) + 1.0
    if np.any(np.abs(window) < 1e-300):
        tail = "decay"
    else:
        slope = np.polyfit(ks, np.log(np.abs(window)), 1)[0] \
            if len(window) > 1 else 0.0
        tail = "plateau" if (window[-1] ** 2 > 1e-3 and slope > -0.02) \
            else "decay"
    label = classify_phase(p.as_tuple).region
    grid = size if mode == "finite" else kernel.N
    return CorrelationDecay(params=p.as_tuple,
                            separations=list(range(1, k_max + 1)),
                            values=values, mode=mode, grid=grid,
                            tail=tail, phase_label=label)
