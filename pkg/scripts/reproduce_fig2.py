"""Two-qubit fidelity of the m-family of inputs under the isotropic Gaussian field.

Writes fig2.csv with the closed form and the Uhlmann fidelity side by side for
m = 1, 0.9, 0.7, 0.4, 0 and reports the curve ordering and the m = 0 limit.
"""

import argparse
import csv
import sys
from collections import defaultdict
from pathlib import Path

from zbdepol.cli import main


def run(outdir: Path) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    out = outdir / "fig2.csv"
    status = main(["fidelity", "--preset", "fig2", "--out", str(out), "--gnuplot"])
    curves = defaultdict(list)
    with out.open() as fh:
        for row in csv.DictReader(line for line in fh if not line.startswith("#")):
            curves[float(row["m"])].append(float(row["F_closed"]))
    order = sorted(curves)[::-1]  # m = 1 first: the lowest curve
    ordered = all(
        all(lo < hi for lo, hi in zip(curves[a][1:], curves[b][1:])) for a, b in zip(order, order[1:])
    )
    print(f"strict ordering m={order} bottom to top for t > 0: {ordered}")
    print(f"F(m=0, t={5:g}) = {curves[0.0][-1]:.6f}  (limit 5/9 = {5 / 9:.6f})")
    return status if ordered else 1


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--outdir", default="figures", type=Path)
    sys.exit(run(p.parse_args().outdir))
