"""Metropolis sampler for the 1-2 model.

Moves: single-edge flips (probability 0.7) and whole-face flips of the six
boundary edges of a hexagon (probability 0.3).  Face flips change each
boundary word in two bits, so they hop between configurations that single
flips connect only through low-weight valleys.  Proposals leaving the
valid-configuration set are rejected outright.

Randomness comes from a splitmix64 stream, fixed so runs are reproducible
across platforms and across the numba / pure-python kernels; the two
kernels are bit-identical (asserted in the test suite).  One sweep is
3n^2 move attempts.  The uniform in [0, 1) is (x >> 11) * 2^-53.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConstraintError, SampleSizeError
from .lattice import TorusLattice, build_torus
from .model import ModelParams, cluster_decompose, is_valid

U64 = np.uint64
_GOLD = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_S30, _S27, _S31, _S11 = U64(30), U64(27), U64(31), U64(11)
_INV53 = 2.0 ** -53

DEFAULT_SINGLE_PROB = 0.7


def _kernel_py(states, rng, nsweeps, record_every, rec,
               vertex_edges, edge_endpoints, face_edges, face_vertices,
               lut, nedges_u, nfaces_u, p_single):
    """Run sweeps in place; returns the advanced rng state.

    Written with uint64 discipline throughout so the numba-compiled and
    interpreted versions produce identical streams.
    """
    nedges = int(nedges_u)
    rowi = 0
    for sweep in range(nsweeps):
        for _ in range(nedges):
            rng = rng + _GOLD
            z = rng
            z = (z ^ (z >> _S30)) * _MIX1
            z = (z ^ (z >> _S27)) * _MIX2
            z = z ^ (z >> _S31)
            u1 = (z >> _S11) * _INV53

            rng = rng + _GOLD
            z = rng
            z = (z ^ (z >> _S30)) * _MIX1
            z = (z ^ (z >> _S27)) * _MIX2
            z = z ^ (z >> _S31)

            if u1 < p_single:
                e = int(z % nedges_u)
                u = edge_endpoints[e, 0]
                v = edge_endpoints[e, 1]
                wu = 0
                if states[vertex_edges[u, 0]] > 0:
                    wu += 1
                if states[vertex_edges[u, 1]] > 0:
                    wu += 2
                if states[vertex_edges[u, 2]] > 0:
                    wu += 4
                wv = 0
                if states[vertex_edges[v, 0]] > 0:
                    wv += 1
                if states[vertex_edges[v, 1]] > 0:
                    wv += 2
                if states[vertex_edges[v, 2]] > 0:
                    wv += 4
                den = lut[wu] * lut[wv]
                states[e] = -states[e]
                wu2 = 0
                if states[vertex_edges[u, 0]] > 0:
                    wu2 += 1
                if states[vertex_edges[u, 1]] > 0:
                    wu2 += 2
                if states[vertex_edges[u, 2]] > 0:
                    wu2 += 4
                wv2 = 0
                if states[vertex_edges[v, 0]] > 0:
                    wv2 += 1
                if states[vertex_edges[v, 1]] > 0:
                    wv2 += 2
                if states[vertex_edges[v, 2]] > 0:
                    wv2 += 4
                num = lut[wu2] * lut[wv2]
                if num == 0.0:
                    states[e] = -states[e]
                else:
                    ratio = num / den
                    if ratio < 1.0:
                        rng = rng + _GOLD
                        z = rng
                        z = (z ^ (z >> _S30)) * _MIX1
                        z = (z ^ (z >> _S27)) * _MIX2
                        z = z ^ (z >> _S31)
                        u3 = (z >> _S11) * _INV53
                        if u3 >= ratio:
                            states[e] = -states[e]
            else:
                f = int(z % nfaces_u)
                den = 1.0
                for i in range(6):
                    vv = face_vertices[f, i]
                    w = 0
                    if states[vertex_edges[vv, 0]] > 0:
                        w += 1
                    if states[vertex_edges[vv, 1]] > 0:
                        w += 2
                    if states[vertex_edges[vv, 2]] > 0:
                        w += 4
                    den *= lut[w]
                for i in range(6):
                    ee = face_edges[f, i]
                    states[ee] = -states[ee]
                num = 1.0
                for i in range(6):
                    vv = face_vertices[f, i]
                    w = 0
                    if states[vertex_edges[vv, 0]] > 0:
                        w += 1
                    if states[vertex_edges[vv, 1]] > 0:
                        w += 2
                    if states[vertex_edges[vv, 2]] > 0:
                        w += 4
                    num *= lut[w]
                accept = True
                if num == 0.0:
                    accept = False
                else:
                    ratio = num / den
                    if ratio < 1.0:
                        rng = rng + _GOLD
                        z = rng
                        z = (z ^ (z >> _S30)) * _MIX1
                        z = (z ^ (z >> _S27)) * _MIX2
                        z = z ^ (z >> _S31)
                        u3 = (z >> _S11) * _INV53
                        if u3 >= ratio:
                            accept = False
                if not accept:
                    for i in range(6):
                        ee = face_edges[f, i]
                        states[ee] = -states[ee]
        if record_every > 0 and (sweep + 1) % record_every == 0:
            if rowi < rec.shape[0]:
                for e in range(nedges):
                    rec[rowi, e] = states[e]
                rowi += 1
    return rng


_FORCE_PY = os.environ.get("ONETWO_NO_NUMBA", "") not in ("", "0")
_kernel_nb = None
if not _FORCE_PY:
    try:
        import numba

        _kernel_nb = numba.njit(cache=True)(_kernel_py)
    except ImportError:
        _kernel_nb = None

HAVE_NUMBA = _kernel_nb is not None


@dataclass(eq=False)
class Chain:
    """Metropolis chain state.  ``states`` is the live +-1 edge vector."""

    lattice: TorusLattice
    params: ModelParams
    states: np.ndarray
    rng_state: np.uint64
    sweeps_done: int = 0
    p_single: float = DEFAULT_SINGLE_PROB
    force_python: bool = False
    _lut: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self._lut is None:
            self._lut = self.params.weight_lut()

    @property
    def n(self):
        return self.lattice.n


def init_chain(n, params, seed=0) -> Chain:
    """Fresh chain: all NW/SE and NE/SW edges present, horizontals absent
    (every signature word is 110, a valid starting point for any weights)."""
    L = build_torus(n)
    p = ModelParams.coerce(params)
    states = np.ones(L.n_edges, dtype=np.int8)
    states[L.edge_kind == 0] = -1
    return Chain(lattice=L, params=p, states=states,
                 rng_state=U64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def run_sweeps(chain: Chain, nsweeps, record_every=0):
    """Advance the chain; optionally record the state every ``record_every``
    sweeps.  Returns the recorded block (possibly empty)."""
    L = chain.lattice
    nrec = nsweeps // record_every if record_every > 0 else 0
    rec = np.empty((nrec, L.n_edges), dtype=np.int8)
    kernel = _kernel_py if (chain.force_python or _kernel_nb is None) \
        else _kernel_nb
    with np.errstate(over="ignore"):
        chain.rng_state = kernel(
            chain.states, chain.rng_state, int(nsweeps), int(record_every),
            rec, L.vertex_edges, L.edge_endpoints, L.face_edges,
            L.face_vertices, chain._lut, U64(L.n_edges), U64(L.n_faces),
            float(chain.p_single))
    chain.rng_state = U64(chain.rng_state)
    chain.sweeps_done += int(nsweeps)
    return rec


def sweep(chain: Chain):
    """One sweep of 3n^2 move attempts."""
    run_sweeps(chain, 1)


@dataclass(frozen=True)
class CorrelationEstimate:
    e: int
    f: int
    mean: float
    stderr: float
    n_samples: int
    n_batches: int


def estimate_correlation(chain: Chain, e, f, sweeps, burnin,
                         thin=None) -> CorrelationEstimate:
    """Monte Carlo estimate of <state(e) state(f)> with batch-means error.

    Discards ``burnin`` sweeps, then records every ``thin`` sweeps
    (default: the lattice size).  Requires at least 1000 retained samples.
    """
    L = chain.lattice
    for g in (e, f):
        if not 0 <= g < L.n_edges:
            raise ConstraintError(f"edge id {g} out of range")
    if burnin >= sweeps:
        raise SampleSizeError(
            f"burnin {burnin} must be smaller than sweeps {sweeps}")
    if thin is None:
        thin = L.n
    thin = max(1, int(thin))
    n_samples = (sweeps - burnin) // thin
    if n_samples < 1000:
        raise SampleSizeError(
            f"{n_samples} post-burnin samples; need at least 1000 "
            f"(sweeps={sweeps}, burnin={burnin}, thin={thin})")
    run_sweeps(chain, burnin)
    rec = run_sweeps(chain, n_samples * thin, record_every=thin)
    prod = rec[:, e].astype(np.float64) * rec[:, f].astype(np.float64)
    nb = 32
    per = len(prod) // nb
    batches = prod[: nb * per].reshape(nb, per).mean(axis=1)
    stderr = float(batches.std(ddof=1) / np.sqrt(nb))
    return CorrelationEstimate(e=int(e), f=int(f), mean=float(prod.mean()),
                               stderr=stderr, n_samples=len(prod),
                               n_batches=nb)


_WORDS = (1, 2, 3, 4, 5, 6)   # the six realizable signature words


@dataclass(eq=False)
class ClusterStats:
    """Homogeneous-cluster summary over thinned samples.

    ``per_word`` maps each realizable signature word (the three-bit int,
    1..6) to its spanning frequency, mean largest cluster size, and mean
    number of distinct clusters.  Kind-level entries merge the two words
    sharing a weight.  Path lengths count edges.
    """

    n_samples: int
    per_word: dict             # word -> {"spanning_freq", "mean_largest",
                               #          "mean_count"}
    spanning_freq_kind: dict   # "a"/"b"/"c" -> fraction of samples
    mean_largest_kind: dict
    path_length_freq: dict     # length -> mean count per sample
    mean_cycle_count: float
    shape_counts: dict         # "path"/"cycle"/"other" -> mean per sample
    all_paths_or_cycles: bool


def cluster_stats(chain: Chain, n_samples, thin, burnin=0) -> ClusterStats:
    """Decompose thinned samples into present-edge components and
    signature-word clusters, and average the summaries."""
    if n_samples < 1:
        raise SampleSizeError("need at least one sample")
    L = chain.lattice
    if burnin > 0:
        run_sweeps(chain, burnin)
    rec = run_sweeps(chain, n_samples * thin, record_every=thin)
    span_w = {w: 0 for w in _WORDS}
    largest_w = {w: 0.0 for w in _WORDS}
    count_w = {w: 0.0 for w in _WORDS}
    span_k = {k: 0 for k in "abc"}
    largest_k = {k: 0.0 for k in "abc"}
    shapes = {"path": 0.0, "cycle": 0.0, "other": 0.0}
    path_lengths = {}
    cycles = 0.0
    clean = True
    for row in rec:
        dec = cluster_decompose(L, row)
        by_word = {w: [] for w in _WORDS}
        for wc in dec.word_clusters:
            by_word[wc.word].append(wc)
        for w in _WORDS:
            group = by_word[w]
            count_w[w] += len(group)
            if group:
                largest_w[w] += max(wc.size for wc in group)
                if any(wc.spanning for wc in group):
                    span_w[w] += 1
        for k in "abc":
            if dec.spans_kind(k):
                span_k[k] += 1
            largest_k[k] += dec.largest_of_kind(k)
        sc = dec.shape_counts()
        for s in shapes:
            shapes[s] += sc[s]
        for comp in dec.components:
            if comp.shape == "path":
                le = len(comp.edges)
                path_lengths[le] = path_lengths.get(le, 0.0) + 1.0
            elif comp.shape == "cycle":
                cycles += 1.0
        if sc["other"]:
            clean = False
    m = float(len(rec))
    return ClusterStats(
        n_samples=len(rec),
        per_word={w: {"spanning_freq": span_w[w] / m,
                      "mean_largest": largest_w[w] / m,
                      "mean_count": count_w[w] / m} for w in _WORDS},
        spanning_freq_kind={k: v / m for k, v in span_k.items()},
        mean_largest_kind={k: v / m for k, v in largest_k.items()},
        path_length_freq={le: v / m for le, v in sorted(path_lengths.items())},
        mean_cycle_count=cycles / m,
        shape_counts={k: v / m for k, v in shapes.items()},
        all_paths_or_cycles=clean)


def config_codes(L: TorusLattice, rec):
    """Pack recorded +-1 rows into integer configuration codes (bit i of
    the code is edge i; arbitrary precision, any lattice size)."""
    bits = (np.asarray(rec) > 0).astype(np.uint8)
    return [int.from_bytes(np.packbits(row, bitorder="little").tobytes(),
                           "little") for row in bits]


def dump_samples(L: TorusLattice, rec, fh, start_index=0, thin=1):
    """One line per sample: sweep index and the configuration as a base-64
    bitmask (little-endian bytes of the code)."""
    import base64

    codes = config_codes(L, rec)
    nbytes = (L.n_edges + 7) // 8
    for i, code in enumerate(codes):
        blob = int(code).to_bytes(nbytes, "little")
        fh.write(f"{start_index + (i + 1) * thin} "
                 f"{base64.b64encode(blob).decode('ascii')}\n")


def check_valid(chain: Chain) -> bool:
    return is_valid(chain.lattice, chain.states)
