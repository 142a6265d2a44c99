#!/usr/bin/env python3
"""Phase diagram over the (a, b) plane at fixed c.

Classifies each grid point against the square-root surface and writes a
CSV plus a PNG heat map with the three critical branches drawn on top.

    python3 scripts/phase_diagram.py --grid 160 --c 1.0 --out phase_diagram
"""

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from onetwo.spectral import classify_phase, critical_margin

REGIONS = ["subcritical", "critical", "supercritical_a", "supercritical_b",
           "supercritical_c"]
COLORS = {
    "subcritical": "#4878a8",
    "critical": "#202020",
    "supercritical_a": "#c44e52",
    "supercritical_b": "#dd8452",
    "supercritical_c": "#b77fc4",
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=160)
    ap.add_argument("--a-max", type=float, default=9.0)
    ap.add_argument("--b-max", type=float, default=9.0)
    ap.add_argument("--c", type=float, default=1.0)
    ap.add_argument("--out", default="phase_diagram")
    args = ap.parse_args()

    N = args.grid
    aa = (np.arange(N) + 0.5) * args.a_max / N
    bb = (np.arange(N) + 0.5) * args.b_max / N
    label = np.zeros((N, N), dtype=int)
    rows = []
    for i, b in enumerate(bb):
        for j, a in enumerate(aa):
            cls = classify_phase((a, b, args.c))
            label[i, j] = REGIONS.index(cls.region)
            rows.append((a, b, args.c, critical_margin((a, b, args.c)),
                         cls.region))

    csv_path = args.out + ".csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a", "b", "c", "margin", "classification"])
        w.writerows(rows)
    print(f"wrote {csv_path} ({len(rows)} points)")

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.colors import ListedColormap

    fig, ax = plt.subplots(figsize=(6.0, 5.4))
    cmap = ListedColormap([COLORS[r] for r in REGIONS])
    ax.imshow(label, origin="lower", cmap=cmap, vmin=0, vmax=4,
              extent=(0, args.a_max, 0, args.b_max), aspect="auto",
              interpolation="nearest")
    # critical branches: sqrt(a) = sqrt(b) + sqrt(c) and permutations
    rc = math.sqrt(args.c)
    t = np.linspace(0, math.sqrt(args.b_max), 400)
    ax.plot((t + rc) ** 2, t ** 2, color="white", lw=1.2)
    ok = t > rc
    ax.plot((t[ok] - rc) ** 2, t[ok] ** 2, color="white", lw=1.2)
    s = np.linspace(0, math.sqrt(args.a_max), 400)
    ok = s > rc
    ax.plot(s[ok] ** 2, (s[ok] - rc) ** 2, color="white", lw=1.2,
            linestyle="--")
    ax.set_xlim(0, args.a_max)
    ax.set_ylim(0, args.b_max)
    ax.set_xlabel("a")
    ax.set_ylabel("b")
    ax.set_title(f"phase regions at c = {args.c:g}")
    fig.tight_layout()
    png = args.out + ".png"
    fig.savefig(png, dpi=150)
    print(f"wrote {png}")


if __name__ == "__main__":
    main()
