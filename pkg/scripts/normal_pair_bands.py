"""Export every band type for two normal arms of different spread.

Arm A has 300 draws and arm B 600 draws, both centred at 0. The CSV has the
same layout as `seqcanary bands`, with two extra columns holding the exact
normal CDF (cdf rows) or quantile (quantile rows) for plotting alongside.
"""
import argparse
import csv
import math
import sys

import numpy as np
from scipy import stats

from seqcanary.bounds import EpsilonSpec, Method
from seqcanary.cli import BAND_COLUMNS, band_rows
from seqcanary.empirical import ArmSample


def main(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("--sd-a", type=float, default=math.sqrt(2))
    p.add_argument("--sd-b", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=2023)
    args = p.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    a = ArmSample(rng.normal(0, args.sd_a, 300))
    b = ArmSample(rng.normal(0, args.sd_b, 600))
    truth = {"a": stats.norm(0, args.sd_a), "b": stats.norm(0, args.sd_b)}
    rows = band_rows(a, b, EpsilonSpec(Method.FIXED_DKWM, args.alpha))

    w = csv.writer(sys.stdout)
    w.writerow(BAND_COLUMNS + ["true"])
    missed = 0
    for kind, g, lo, hi, alpha, n_a, n_b in rows:
        true = ""
        if kind in ("cdf_a", "cdf_b"):
            true = truth[kind[-1]].cdf(g)
        elif kind in ("quantile_a", "quantile_b"):
            true = truth[kind[-1]].ppf(g)
        if true != "" and not lo <= true <= hi:
            missed += 1
        w.writerow([kind, "" if g is None or np.isinf(g) else g, lo, hi, alpha, n_a, n_b, true])
    print(f"# grid points outside their band: {missed}", file=sys.stderr)


if __name__ == "__main__":
    main()
