"""Shared oracles for the test suite.

The matching enumerator here is deliberately independent of the library's
own configuration-to-dimer machinery: it walks the decorated graph edge
list with plain backtracking, so it can serve as an oracle for the
two-to-one correspondence and the torus sector bookkeeping.
"""

from collections import Counter

import numpy as np


def enumerate_matchings(D):
    """All perfect matchings of a decorated graph, grouped by wrap parity.

    Returns {(gx, gy): [count, weight_sum]} where gx, gy are the parities
    of the number of chosen edges crossing the two fundamental cuts.
    Backtracking on the lowest-id unmatched vertex; fine up to n = 2
    (56 vertices).
    """
    nv = D.n_vertices
    adj = [[] for _ in range(nv)]
    for e in range(D.n_edges):
        u, v = int(D.edges_u[e]), int(D.edges_v[e])
        adj[u].append((e, v))
        adj[v].append((e, u))
    cross = D.edge_cross.astype(int)
    wts = D.edge_weight
    matched = bytearray(nv)
    sectors = {}

    def rec(weight, gx, gy):
        v = matched.find(0)
        if v == -1:
            ent = sectors.setdefault((gx & 1, gy & 1), [0, 0.0])
            ent[0] += 1
            ent[1] += weight
            return
        matched[v] = 1
        for e, u in adj[v]:
            if not matched[u]:
                matched[u] = 1
                rec(weight * wts[e], gx + cross[e, 0], gy + cross[e, 1])
                matched[u] = 0
        matched[v] = 0

    rec(1.0, 0, 0)
    return sectors


def empirical_tv(codes, table):
    """Total-variation distance between sampled codes and an exact table."""
    counts = Counter(int(c) for c in codes)
    total = sum(counts.values())
    tv = 0.0
    seen = set(counts)
    for code, cnt in counts.items():
        tv += abs(cnt / total - table.prob(code))
    for code, p in zip(table.codes, table.probs):
        if int(code) not in seen:
            tv += float(p)
    return 0.5 * tv


def random_skew(rng, m):
    A = rng.normal(size=(m, m))
    return A - A.T


def assert_rel(value, reference, rtol, label=""):
    denom = max(abs(reference), 1e-300)
    rel = abs(value - reference) / denom
    assert rel < rtol, f"{label}: {value!r} vs {reference!r} (rel {rel:.3e})"
    return rel
