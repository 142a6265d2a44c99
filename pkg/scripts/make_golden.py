#!/usr/bin/env python3
"""Regenerate the frozen fixtures under tests/golden/.

Everything in the golden files is computed from scratch here, by the
slowest and most direct route available (exhaustive enumeration where it
exists), so the test suite can pin the fast code paths against values that
do not depend on them.  Re-run after any intentional change to the model
conventions and commit the diff.

    python3 scripts/make_golden.py            # n = 2 fixtures (seconds)
    python3 scripts/make_golden.py --full     # adds n = 3 enumeration (~1 min)
"""

import argparse
import json
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from onetwo.lattice import build_torus
from onetwo.model import enumerate_count, enumerate_partition, exact_correlation
from onetwo.pfaffian import correlation_pf, make_kernel
from onetwo.spectral import eval_characteristic

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden"

PARTITION_TRIPLES_N2 = [
    (1.0, 1.0, 1.0),
    (2.0, 1.0, 1.0),
    (1.3, 0.7, 1.1),
    (0.8, 1.7, 0.5),
    (1.9, 0.3, 1.2),
]
PARTITION_TRIPLES_N3 = [
    (1.0, 1.0, 1.0),
    (1.3, 0.7, 1.1),
]

# acute triples: all of A, B, C nonzero and the Ising image lies in the
# antiferromagnetic square (-1, 0) for every squared coupling
CORRELATION_TRIPLES = [
    (1.2, 1.0, 1.0),
    (1.0, 1.0, 1.0),
    (0.9, 1.1, 0.8),
]

INFINITE_ANCHORS = [
    ((2.0, 1.0, 1.0), 3),
    ((1.0, 1.0, 1.0), 3),
    ((6.0, 1.0, 1.0), 4),
    ((0.001, 0.001, 1.0), 1),
]

CHARACTERISTIC_POINTS = [
    (1.0 + 0.0j, 1.0 + 0.0j),
    (-1.0 + 0.0j, 1.0 + 0.0j),
    (0.6 + 0.8j, -0.8 + 0.6j),
    (1.5 + 0.0j, 0.25 + 0.0j),
    (0.3 - 0.4j, 2.0 + 1.0j),
]
CHARACTERISTIC_TRIPLES = [
    (1.0, 1.0, 1.0),
    (1.3, 0.7, 1.1),
    (4.0, 1.0, 1.0),
]


def partition_fixture(full):
    rows = []
    for a, b, c in PARTITION_TRIPLES_N2:
        z = enumerate_partition(2, (a, b, c))
        rows.append({"n": 2, "a": a, "b": b, "c": c, "z": z})
        print(f"  n=2 ({a}, {b}, {c}): Z = {z!r}")
    rows.append({"n": 2, "count": enumerate_count(2)})
    if full:
        t0 = time.monotonic()
        for a, b, c in PARTITION_TRIPLES_N3:
            z = enumerate_partition(3, (a, b, c))
            rows.append({"n": 3, "a": a, "b": b, "c": c, "z": z})
            print(f"  n=3 ({a}, {b}, {c}): Z = {z!r}"
                  f"  [{time.monotonic() - t0:.0f}s]")
        rows.append({"n": 3, "count": enumerate_count(3)})
    return rows


def correlation_fixture():
    L = build_torus(2)
    b_edges = [e for e in range(L.n_edges) if e % 3 == 1]
    rows = []
    for a, b, c in CORRELATION_TRIPLES:
        pairs = {}
        for i, e in enumerate(b_edges):
            for f in b_edges[i + 1:]:
                pairs[f"{e},{f}"] = exact_correlation(2, (a, b, c), e, f)
        rows.append({"a": a, "b": b, "c": c, "pairs": pairs})
        print(f"  n=2 ({a}, {b}, {c}): {len(pairs)} pair correlations")
    return rows


def infinite_fixture():
    L = build_torus(8)
    e0 = L.edge_id(0, 0, 1)
    rows = []
    for (a, b, c), kmax in INFINITE_ANCHORS:
        kern = make_kernel((a, b, c), mode="infinite")
        for k in range(1, kmax + 1):
            f = L.edge_id(0, k, 1)
            v = correlation_pf(L, e0, f, (a, b, c), kernel=kern)
            rows.append({"a": a, "b": b, "c": c, "k": k, "value": v})
        print(f"  ({a}, {b}, {c}): k = 1..{kmax}, N = {kern.N}")
    return rows


def characteristic_fixture():
    rows = []
    for a, b, c in CHARACTERISTIC_TRIPLES:
        for z, w in CHARACTERISTIC_POINTS:
            v = eval_characteristic((a, b, c), z, w)
            rows.append({"a": a, "b": b, "c": c,
                         "z": [z.real, z.imag], "w": [w.real, w.imag],
                         "value": [v.real, v.imag]})
    print(f"  {len(rows)} characteristic-polynomial samples")
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--full", action="store_true",
                    help="include the n = 3 enumeration (slow)")
    args = ap.parse_args()

    GOLDEN.mkdir(parents=True, exist_ok=True)
    fixtures = {
        "partition_enum.json": partition_fixture(args.full),
        "correlation_exact_n2.json": correlation_fixture(),
        "correlation_infinite.json": infinite_fixture(),
        "characteristic.json": characteristic_fixture(),
    }
    for name, data in fixtures.items():
        path = GOLDEN / name
        with open(path, "w") as fh:
            json.dump(data, fh, indent=1, sort_keys=True)
            fh.write("\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
