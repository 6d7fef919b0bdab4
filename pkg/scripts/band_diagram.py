"""Band diagrams E(K) of the periodic chain for several particle numbers.

    python scripts/band_diagram.py --n 16 --u 100 --m 1 2 3 4 --out bands.png

Writes one CSV per M next to the figure and a multi-panel PNG.
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from fmft.bethe import ChainParams, assemble_band_diagram
from fmft.io import write_band_csv


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--u", type=float, default=100.0)
    ap.add_argument("--j", type=float, default=1.0)
    ap.add_argument("--m", type=int, nargs="+", default=[1, 2, 3, 4])
    ap.add_argument("--out", default="bands.png")
    args = ap.parse_args()

    out = Path(args.out)
    fig, axes = plt.subplots(1, len(args.m), figsize=(3.2 * len(args.m), 3.6), squeeze=False)
    for ax, m in zip(axes[0], args.m):
        bd = assemble_band_diagram(ChainParams(args.n, m, args.j, args.u))
        write_band_csv(bd, out.with_name(f"{out.stem}_m{m}.csv"))
        for e in bd.entries:
            ax.plot([e.K] * len(e.energies), e.energies, "k.", ms=2)
        sizes = [len(c) for c in bd.clusters()]
        print(f"M={m}: {len(bd.all_energies())} states, clusters {sizes}")
        ax.set_title(f"M={m}")
        ax.set_xlabel("K")
    axes[0][0].set_ylabel("Energy")
    fig.suptitle(f"N={args.n}, U={args.u:g}")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
