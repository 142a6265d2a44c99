"""Command-line interface.

Subcommands:
  partition    Z_n via the twisted-Pfaffian formula, cross-checked by
               enumeration for n <= 2 (JSON report).
  correlate    diagonal two-edge correlation table (CSV).
  phase-scan   classify points of parameter space, CSV + SVG heat map.
  sample       run the Metropolis chain, dump thinned samples,
               render the final configuration as SVG.
  crosscheck   n=2 three-way correlation comparison (enumeration vs the
               two spin reformulations), prints the max deviation.

Exit codes: 0 ok, 2 invalid input, 3 numerical failure, 4 refusal near
the critical surface sqrt(a) = sqrt(b) + sqrt(c).

Flags may come from the command line or from a ``--json-spec FILE``
document whose keys mirror the long flag names (underscored); explicit
flags win over the document.  Reruns with the same inputs produce
byte-identical CSV/JSON/SVG.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .errors import (ConstraintError, DegenerateCouplingError,
                     NearCriticalError, NumericalError, ResourceError,
                     SampleSizeError, SizeError, StateError)
from .lattice import LATTICE_V1, LATTICE_V2, KIND_NAMES, build_torus
from .mcmc import cluster_stats, dump_samples, init_chain, run_sweeps
from .model import (ModelParams, cluster_decompose, enumerate_partition,
                    exact_correlation, is_valid)
from .pfaffian import correlation_limit, partition_via_pfaffian
from .spectral import classify_phase
from .transforms import correlation_ising, derive_couplings, polygon_twopoint


def _fmt(x):
    return "%.17g" % float(x)


def _write_text(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _emit(text, path):
    if path:
        _write_text(path, text)
    else:
        sys.stdout.write(text)


def _json_report(report, path):
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if path:
        _write_text(path, text)
    return text


# ---------------------------------------------------------------- SVG bits

_CLASS_COLORS = {
    "subcritical": "#4878a8",
    "critical": "#202020",
    "supercritical_a": "#c44e52",
    "supercritical_b": "#dd8452",
    "supercritical_c": "#b77fc4",
}
_KIND_COLORS = {"a": "#d62728", "b": "#1f77b4", "c": "#2ca02c"}


def _svg_doc(width, height, body):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">\n'
            f'<rect width="{width}" height="{height}" fill="#ffffff"/>\n')
    return head + body + "</svg>\n"


def _svg_line(x1, y1, x2, y2, color, width, cap="round"):
    return (f'<line x1="{x1:.4f}" y1="{y1:.4f}" x2="{x2:.4f}" '
            f'y2="{y2:.4f}" stroke="{color}" stroke-width="{width:.4f}" '
            f'stroke-linecap="{cap}"/>\n')


def _svg_text(x, y, s, size=12, color="#202020"):
    return (f'<text x="{x:.1f}" y="{y:.1f}" font-family="sans-serif" '
            f'font-size="{size}" fill="{color}">{s}</text>\n')


def _vertex_pos(x, y, cls):
    q = x * LATTICE_V1 + y * LATTICE_V2
    if cls == 1:
        q = q + np.array([1.0, 0.0])
    return q


def _config_svg(L, states):
    """Draw the +-1 configuration: present edges colored by kind, absent
    edges faint; wrap edges drawn as stubs out of both sides."""
    n = L.n
    segs = []
    for e in range(L.n_edges):
        u, v = L.edge_endpoints[e]
        xu, yu = int(u // 2) % n, int(u // 2) // n
        xv, yv = int(v // 2) % n, int(v // 2) // n
        dx, dy = L.edge_cell_disp[e]
        pu = _vertex_pos(xu, yu, int(u) % 2)
        pv_un = _vertex_pos(xu + int(dx), yu + int(dy), int(v) % 2)
        segs.append((e, pu, pv_un))
        if L.edge_crosses[e, 0] or L.edge_crosses[e, 1]:
            pv = _vertex_pos(xv, yv, int(v) % 2)
            pu_un = _vertex_pos(xv - int(dx), yv - int(dy), int(u) % 2)
            segs.append((e, pu_un, pv))
    allp = np.array([q for _, p, q in segs for q in (p, q)])
    lo = allp.min(axis=0) - 0.8
    hi = allp.max(axis=0) + 0.8
    scale = 720.0 / max(hi - lo)
    width = (hi[0] - lo[0]) * scale
    height = (hi[1] - lo[1]) * scale

    def T(p):
        return ((p[0] - lo[0]) * scale, height - (p[1] - lo[1]) * scale)

    body = []
    for e, p, q in segs:
        if states[e] <= 0:
            x1, y1 = T(p)
            x2, y2 = T(q)
            body.append(_svg_line(x1, y1, x2, y2, "#dddddd", 0.035 * scale))
    for e, p, q in segs:
        if states[e] > 0:
            x1, y1 = T(p)
            x2, y2 = T(q)
            color = _KIND_COLORS[KIND_NAMES[L.edge_kind[e]]]
            body.append(_svg_line(x1, y1, x2, y2, color, 0.12 * scale))
    for v in range(L.n_vertices):
        x, y = T(L.vertex_xy(v))
        if v % 2 == 0:
            body.append(f'<circle cx="{x:.4f}" cy="{y:.4f}" '
                        f'r="{0.09 * scale:.4f}" fill="#ffffff" '
                        f'stroke="#333333" stroke-width="1"/>\n')
        else:
            body.append(f'<circle cx="{x:.4f}" cy="{y:.4f}" '
                        f'r="{0.09 * scale:.4f}" fill="#333333"/>\n')
    return _svg_doc(int(width) + 1, int(height) + 1, "".join(body))


# ------------------------------------------------------------- subcommands

def cmd_partition(cfg):
    n = int(cfg["n"])
    p = ModelParams(cfg["a"], cfg["b"], cfg["c"])
    zpf = partition_via_pfaffian(n, p)
    report = {"command": "partition", "n": n,
              "a": p.a, "b": p.b, "c": p.c,
              "z_pfaffian": zpf}
    print(f"Z[{n}]({p.a:g}, {p.b:g}, {p.c:g}) = {_fmt(zpf)}  (pfaffian)")
    if n <= 2:
        ze = enumerate_partition(n, p)
        rel = abs(zpf - ze) / ze
        report["z_enumeration"] = ze
        report["rel_difference"] = rel
        print(f"Z[{n}]({p.a:g}, {p.b:g}, {p.c:g}) = {_fmt(ze)}  (enumeration)")
        print(f"relative difference = {rel:.3e}")
    if cfg["out"]:
        _json_report(report, cfg["out"])
        print(f"wrote {cfg['out']}")
    return 0


def cmd_correlate(cfg):
    p = ModelParams(cfg["a"], cfg["b"], cfg["c"])
    mode = cfg["mode"]
    if mode not in ("finite", "infinite"):
        raise ConstraintError(f"mode must be finite or infinite, got {mode!r}")
    kmax = int(cfg["kmax"])
    n = int(cfg["n"]) if mode == "finite" else None
    dec = correlation_limit(p.as_tuple, k_max=kmax, mode=mode, n=n)
    lines = ["separation,value,value_squared,mode,n_or_N"]
    for k, v in zip(dec.separations, dec.values):
        lines.append(f"{k},{_fmt(v)},{_fmt(v * v)},{mode},{dec.grid}")
    _emit("\n".join(lines) + "\n", cfg["out"])
    print(f"tail: {dec.tail}  (classification: {dec.phase_label})",
          file=sys.stderr)
    return 0


def _disc_min(a, b, c):
    ra, rb, rc = math.sqrt(a), math.sqrt(b), math.sqrt(c)
    return min(abs(ra - rb - rc), abs(rb - ra - rc), abs(rc - ra - rb))


def _scan_points(cfg):
    b, c = float(cfg["b"]), float(cfg["c"])
    lo, hi, step = (float(cfg["a_min"]), float(cfg["a_max"]),
                    float(cfg["a_step"]))
    grid = int(cfg["grid"])
    if grid > 0:
        vals = [lo + (hi - lo) * (i + 0.5) / grid for i in range(grid)]
        return [(av, bv, c) for bv in vals for av in vals], True
    if step <= 0:
        raise ConstraintError("a-step must be positive")
    count = int(round((hi - lo) / step)) + 1
    return [(lo + i * step, b, c) for i in range(count)], False


def _scan_svg_1d(rows, cfg):
    lo, hi = float(cfg["a_min"]), float(cfg["a_max"])
    b, c = float(cfg["b"]), float(cfg["c"])
    x0, w, y0, h = 20.0, 600.0, 30.0, 60.0
    body = []
    npts = len(rows)
    for i, (a, _, _, _, cls) in enumerate(rows):
        color = _CLASS_COLORS.get(cls, "#999999")
        body.append(f'<rect x="{x0 + w * i / npts:.4f}" y="{y0:.4f}" '
                    f'width="{w / npts + 0.5:.4f}" height="{h:.4f}" '
                    f'fill="{color}"/>\n')
    astar = (math.sqrt(b) + math.sqrt(c)) ** 2
    if lo <= astar <= hi:
        x = x0 + w * (astar - lo) / (hi - lo)
        body.append(_svg_line(x, y0 - 8, x, y0 + h + 8, "#000000", 1.5,
                              cap="butt"))
        body.append(_svg_text(x + 4, y0 - 10, f"a = {astar:g}"))
    body.append(_svg_text(x0, y0 + h + 24, f"{lo:g}"))
    body.append(_svg_text(x0 + w - 20, y0 + h + 24, f"{hi:g}"))
    body.append(_svg_text(x0, 18, f"phase along a  (b={b:g}, c={c:g})"))
    return _svg_doc(640, 140, "".join(body))


def _scan_svg_2d(rows, cfg):
    lo, hi = float(cfg["a_min"]), float(cfg["a_max"])
    c = float(cfg["c"])
    grid = int(cfg["grid"])
    x0, y0, side = 50.0, 30.0, 480.0
    cell = side / grid
    body = []
    for idx, (a, b, _, _, cls) in enumerate(rows):
        i, j = idx % grid, idx // grid
        color = _CLASS_COLORS.get(cls, "#999999")
        body.append(f'<rect x="{x0 + i * cell:.4f}" '
                    f'y="{y0 + side - (j + 1) * cell:.4f}" '
                    f'width="{cell + 0.5:.4f}" height="{cell + 0.5:.4f}" '
                    f'fill="{color}"/>\n')

    def to_xy(a, b):
        return (x0 + side * (a - lo) / (hi - lo),
                y0 + side - side * (b - lo) / (hi - lo))

    # critical locus: each parameter's root equal to the sum of the others
    branches = []
    ts = [lo + (hi - lo) * i / 400 for i in range(401)]
    branches.append([(t, (math.sqrt(t) + math.sqrt(c)) ** 2)
                     for t in ts])                       # sqrt b largest
    branches.append([((math.sqrt(t) + math.sqrt(c)) ** 2, t)
                     for t in ts])                       # sqrt a largest
    branches.append([(t, (math.sqrt(c) - math.sqrt(t)) ** 2)
                     for t in ts if t <= c])             # sqrt c largest
    for br in branches:
        pts = [to_xy(a, b) for a, b in br
               if lo <= a <= hi and lo <= b <= hi]
        if len(pts) > 1:
            d = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
            body.append(f'<polyline points="{d}" fill="none" '
                        f'stroke="#000000" stroke-width="1.5"/>\n')
    body.append(_svg_text(x0, 20, f"phase over (a, b), c = {c:g}"))
    body.append(_svg_text(x0, y0 + side + 18, f"a: {lo:g} .. {hi:g}"))
    body.append(_svg_text(4, y0 + side / 2, "b", size=13))
    return _svg_doc(580, 560, "".join(body))


def cmd_phase_scan(cfg):
    points, is_2d = _scan_points(cfg)
    kmax = int(cfg["kmax"])
    header = "a,b,c,disc_min,classification"
    if kmax > 0:
        header += ",tail"
    rows = []
    lines = [header]
    for (a, b, c) in points:
        cls = classify_phase((a, b, c)).region
        disc = _disc_min(a, b, c)
        rows.append((a, b, c, disc, cls))
        line = f"{_fmt(a)},{_fmt(b)},{_fmt(c)},{_fmt(disc)},{cls}"
        if kmax > 0:
            try:
                tail = correlation_limit((a, b, c), k_max=kmax).tail
            except NearCriticalError:
                tail = "refused"
            line += f",{tail}"
        lines.append(line)
    csv_text = "\n".join(lines) + "\n"
    out = cfg["out"]
    svg = _scan_svg_2d(rows, cfg) if is_2d else _scan_svg_1d(rows, cfg)
    svg_path = (out.rsplit(".", 1)[0] if out and out.endswith(".csv")
                else (out or "phase_scan")) + ".svg"
    _emit(csv_text, out)
    _write_text(svg_path, svg)
    print(f"{len(points)} points scanned; wrote {svg_path}", file=sys.stderr)
    return 0


def cmd_sample(cfg):
    n = int(cfg["n"])
    p = ModelParams(cfg["a"], cfg["b"], cfg["c"])
    seed = int(cfg["seed"])
    sweeps = int(cfg["sweeps"])
    burnin = int(cfg["burnin"]) if cfg["burnin"] is not None else 10 * n * n
    thin = int(cfg["thin"]) if cfg["thin"] is not None else n
    if burnin >= sweeps:
        raise ConstraintError(
            f"burnin {burnin} must be smaller than sweeps {sweeps}")
    chain = init_chain(n, p, seed=seed)
    run_sweeps(chain, burnin)
    rec = run_sweeps(chain, sweeps - burnin, record_every=thin)
    base = cfg["out"] or "sample"
    with open(base + ".samples", "w", encoding="utf-8") as fh:
        dump_samples(chain.lattice, rec, fh, start_index=burnin, thin=thin)
    _write_text(base + ".svg", _config_svg(chain.lattice, chain.states))
    dec = cluster_decompose(chain.lattice, chain.states)
    sc = dec.shape_counts()
    report = {"command": "sample", "n": n, "a": p.a, "b": p.b, "c": p.c,
              "seed": seed, "sweeps": sweeps, "burnin": burnin,
              "thin": thin, "n_samples": int(rec.shape[0]),
              "final_valid": bool(is_valid(chain.lattice, chain.states)),
              "final_components": sc,
              "final_spanning_kinds": sorted(
                  {KIND_NAMES[w.kind] for w in dec.spanning_words()})}
    _json_report(report, base + ".json")
    print(f"wrote {base}.samples ({rec.shape[0]} samples), "
          f"{base}.svg, {base}.json")
    print(f"final configuration: {sc['path']} paths, {sc['cycle']} cycles, "
          f"{sc['other']} other")
    return 0


def cmd_crosscheck(cfg):
    p = ModelParams(cfg["a"], cfg["b"], cfg["c"])
    derive_couplings(p.as_tuple)   # raises if a coupling degenerates
    L = build_torus(2)
    b_edges = [e for e in range(L.n_edges) if L.edge_kind[e] == 1]
    pairs = [(e, f) for i, e in enumerate(b_edges)
             for f in b_edges[i + 1:]]
    results = []
    max_dev = 0.0
    for e, f in pairs:
        exact = exact_correlation(2, p, e, f)
        ising = correlation_ising(2, p.as_tuple, e, f)
        poly = polygon_twopoint(2, p.as_tuple, e, f)
        dev = max(abs(exact - ising), abs(exact - poly))
        max_dev = max(max_dev, dev)
        results.append({"e": e, "f": f, "exact": exact, "ising": ising,
                        "polygon": poly, "deviation": dev})
        print(f"pair ({e:2d},{f:2d}): exact {_fmt(exact)}  "
              f"ising {_fmt(ising)}  polygon {_fmt(poly)}")
    print(f"max deviation = {max_dev:.3e}")
    report = {"command": "crosscheck", "a": p.a, "b": p.b, "c": p.c,
              "pairs": results, "max_deviation": max_dev}
    if cfg["out"]:
        _json_report(report, cfg["out"])
        print(f"wrote {cfg['out']}")
    return 0


# ------------------------------------------------------------------ driver

_DEFAULTS = {
    "partition": dict(n=2, a=1.0, b=1.0, c=1.0, out=None),
    "correlate": dict(a=1.0, b=1.0, c=1.0, kmax=12, mode="infinite",
                      n=16, out=None),
    "phase-scan": dict(b=1.0, c=1.0, a_min=1.0, a_max=9.0, a_step=0.25,
                       grid=0, kmax=0, out=None),
    "sample": dict(n=10, a=1.0, b=1.0, c=1.0, seed=0, sweeps=50000,
                   burnin=None, thin=None, out=None),
    "crosscheck": dict(a=1.2, b=1.0, c=1.0, out=None),
}

_HANDLERS = {
    "partition": cmd_partition,
    "correlate": cmd_correlate,
    "phase-scan": cmd_phase_scan,
    "sample": cmd_sample,
    "crosscheck": cmd_crosscheck,
}


def build_parser():
    ap = argparse.ArgumentParser(
        prog="onetwo",
        description="Exact and Monte Carlo computations for the 1-2 model "
                    "on the toroidal hexagonal lattice.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, n_flag=True):
        sp.add_argument("-a", type=float, default=None,
                        help="horizontal-signature weight a > 0")
        sp.add_argument("-b", type=float, default=None,
                        help="NW/SE-signature weight b > 0")
        sp.add_argument("-c", type=float, default=None,
                        help="NE/SW-signature weight c > 0")
        if n_flag:
            sp.add_argument("-n", type=int, default=None,
                            help="torus size (n x n cells)")
        sp.add_argument("--out", default=None, help="output path")
        sp.add_argument("--json-spec", default=None, metavar="FILE",
                        help="JSON document supplying any of the flags "
                             "(underscored keys); explicit flags win")

    sp = sub.add_parser("partition",
                        help="partition function via twisted Pfaffians")
    common(sp)

    sp = sub.add_parser("correlate",
                        help="two-edge correlations along a NW/SE diagonal")
    common(sp)
    sp.add_argument("--kmax", type=int, default=None,
                    help="largest separation (default 12)")
    sp.add_argument("--mode", choices=("finite", "infinite"), default=None,
                    help="finite torus of size n, or infinite volume")

    sp = sub.add_parser("phase-scan",
                        help="classify a sweep of parameter points")
    common(sp, n_flag=False)
    sp.add_argument("--a-min", type=float, default=None, dest="a_min")
    sp.add_argument("--a-max", type=float, default=None, dest="a_max")
    sp.add_argument("--a-step", type=float, default=None, dest="a_step")
    sp.add_argument("--grid", type=int, default=None,
                    help="N for an NxN scan over (a, b) with c fixed "
                         "(default: 1-D scan over a)")
    sp.add_argument("--kmax", type=int, default=None,
                    help="if > 0, append a correlation-tail column")

    sp = sub.add_parser("sample", help="Metropolis sampling + SVG snapshot")
    common(sp)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--sweeps", type=int, default=None)
    sp.add_argument("--burnin", type=int, default=None,
                    help="sweeps to discard (default 10 n^2)")
    sp.add_argument("--thin", type=int, default=None,
                    help="sweeps between samples (default n)")

    sp = sub.add_parser("crosscheck",
                        help="n=2 correlation agreement across methods")
    common(sp, n_flag=False)
    return ap


def _resolve(args):
    cmd = args.command
    cfg = dict(_DEFAULTS[cmd])
    if getattr(args, "json_spec", None):
        try:
            with open(args.json_spec, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConstraintError(f"cannot read json-spec: {exc}") from exc
        if not isinstance(doc, dict):
            raise ConstraintError("json-spec must hold a JSON object")
        if "command" in doc and doc["command"] != cmd:
            raise ConstraintError(
                f"json-spec is for {doc['command']!r}, not {cmd!r}")
        for k, v in doc.items():
            if k == "command":
                continue
            if k not in cfg:
                raise ConstraintError(f"json-spec key {k!r} not understood "
                                      f"by {cmd}")
            cfg[k] = v
    for k, v in vars(args).items():
        if k in cfg and v is not None:
            cfg[k] = v
    return cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](_resolve(args))
    except NearCriticalError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 4
    except (SizeError, ConstraintError, DegenerateCouplingError,
            SampleSizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, ResourceError, StateError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
