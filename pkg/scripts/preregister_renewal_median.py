"""Pre-run for the median decision time of the 10/s vs 5/s renewal test.

Uses a from-scratch decision path (full diff band rebuilt at every event,
no pooled index) so the frozen value does not rest on the monitoring loop
it is later compared against.
"""
import argparse
import heapq

import numpy as np

from seqcanary.empirical import ArmSample
from seqcanary.renewal import poisson_stream
from seqcanary.testing import Hypothesis, TestConfig
from seqcanary.twosample import diff_band, supnorm_interval


def first_rejection(a, b, cfg):
    ga, gb = [], []
    last = {"a": None, "b": None}
    for ts, arm in heapq.merge(((t, "a") for t in a.timestamps), ((t, "b") for t in b.timestamps)):
        if last[arm] is not None:
            (ga if arm == "a" else gb).append(ts - last[arm])
        last[arm] = ts
        if len(ga) < 2 or len(gb) < 2:
            continue
        iv = supnorm_interval(diff_band(ArmSample(ga), ArmSample(gb), cfg.epsilon))
        if iv.lo > 0:
            return ts
        if iv.hi < cfg.tau:
            return None
    return None


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=10)
    args = ap.parse_args()
    cfg = TestConfig(Hypothesis.EQUAL, alpha=0.05, tau=0.1)
    rng = np.random.default_rng(args.seed)
    times = []
    for _ in range(args.runs):
        t = first_rejection(poisson_stream("a", 10, 600, rng), poisson_stream("b", 5, 600, rng), cfg)
        times.append(np.inf if t is None else t)
    times = np.array(times)
    print(f"runs {args.runs} seed {args.seed} rejected {np.isfinite(times).sum()} "
          f"median {np.median(times):.6f} q25 {np.quantile(times, .25):.3f} q75 {np.quantile(times, .75):.3f}")


if __name__ == "__main__":
    main()
