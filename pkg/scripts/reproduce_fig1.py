"""Kraus coefficients k0..k3 against time for the two Gaussian field laws.

Writes fig1-upper.csv (d = 1, 1, 1) and fig1-lower.csv (d = 1, 2, 3) plus
gnuplot scripts, and prints the large-t plateaus next to the values
predicted from the angular moments of the field distribution.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from zbdepol.channel import kraus_from_lambda
from zbdepol.cli import main
from zbdepol.noise import GaussianAniso, asymptotic_lambda


def run(outdir: Path) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    status = 0
    for preset, d in (("fig1-upper", (1, 1, 1)), ("fig1-lower", (1, 2, 3))):
        out = outdir / f"{preset}.csv"
        status |= main(["kraus", "--preset", preset, "--out", str(out), "--gnuplot"])
        last = np.loadtxt(out, delimiter=",", comments="#", skiprows=3)[-1]
        plateau = kraus_from_lambda(asymptotic_lambda(GaussianAniso(d))).k
        print(f"{preset}: k(t={last[0]:g}) = {np.round(last[1:], 5)}  plateau = {np.round(plateau, 5)}")
    return status


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--outdir", default="figures", type=Path)
    sys.exit(run(p.parse_args().outdir))
