"""Rescaled survival curves sharpening into a step at t*, written as CSV."""

import sys
from pathlib import Path

from wordcollector.cli import main

out = Path(sys.argv[1] if len(sys.argv) > 1 else "psi_out")
ks = "3,6,9,12,15,18,21"
for label, weights in (("uniform", "a=1,b=1"), ("weighted", "a=1,b=1.5")):
    main(["psi", "--language", "sigma-star", "--weights", weights, "--n-list", ks,
          "--grid", "0:2:0.01", "--out", str(out / label / "psi_n{n}.csv")])
    print(f"{label}: wrote {len(list((out / label).glob('*.csv')))} curves to {out / label}")
