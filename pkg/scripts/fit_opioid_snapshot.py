#!/usr/bin/env python3
"""Fit the drug-overdose snapshot under three prior means and emit plot data.

Runs the concentration sampler on data/opioid_deaths.csv with prior means
1/(3K), 1/(2K) and 1/K, then draws the posterior predictive for each fit.
Outputs land in out/opioid/<prior-tag>/ as samples.csv, summary.json,
plot_data.csv and predictive.csv, ready for external histogram/density
rendering.
"""

import argparse
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from polyaig.cli import main as cli  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parents[1]
DATA = ROOT / "data" / "opioid_deaths.csv"
K = 6


def run(seed, iters, burnin, thin, outroot):
    for tag, mean in (("mean_1_over_3K", 1 / (3 * K)),
                      ("mean_1_over_2K", 1 / (2 * K)),
                      ("mean_1_over_K", 1 / K)):
        out = outroot / tag
        code = cli(["fit-dirichlet", "--data", str(DATA), "--id-cols", "2",
                    "--mean-alpha", str(mean), "--iters", str(iters),
                    "--burnin", str(burnin), "--thin", str(thin),
                    "--seed", str(seed), "--out", str(out)])
        if code:
            return code
        code = cli(["predict", "--samples", str(out / "samples.csv"),
                    "--draws-per-sample", "2", "--seed", str(seed + 1),
                    "--out", str(out)])
        if code:
            return code
        print(f"prior mean {mean:.4f}: outputs in {out}")
    return 0


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--iters", type=int, default=6000)
    ap.add_argument("--burnin", type=int, default=1000)
    ap.add_argument("--thin", type=int, default=5)
    ap.add_argument("--out", type=str, default=str(ROOT / "out" / "opioid"))
    args = ap.parse_args()
    raise SystemExit(run(args.seed, args.iters, args.burnin, args.thin,
                         pathlib.Path(args.out)))
