"""Median stopping time of the sequential equality test under the Gamma alternative.

Recomputes every run through the general monitoring engine (ArmSample plus
testing.update after every pair) rather than the vectorised simulation path,
so the frozen value in tests/test_acceptance.py has an independent source.
"""
import argparse
import math

import numpy as np

from seqcanary.empirical import ArmSample
from seqcanary.simulation import StudyConfig, draw_pair
from seqcanary.testing import Hypothesis, TestConfig, TestState, Verdict, update
from seqcanary.twosample import PooledSample


def stop_time(x, y, alpha):
    # tau tiny: only the rejection rule can stop the run
    state = TestState(TestConfig(Hypothesis.EQUAL, alpha, tau=1e-12))
    a, b, pooled = ArmSample(), ArmSample(), PooledSample()
    for t in range(len(x)):
        a.add(x[t]); pooled.add("a", x[t])
        b.add(y[t]); pooled.add("b", y[t])
        update(state, a, b, pooled=pooled)
        if state.decision is Verdict.REJECT_NULL:
            return t + 1
    return None


def main(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=2023)
    args = p.parse_args(argv)
    cfg = StudyConfig(runs=args.runs, seed=args.seed)
    stops = []
    for run in range(cfg.runs):
        x, y = draw_pair(cfg, cfg.rate_b_alt, 1, run)
        stops.append(stop_time(x, y, cfg.alpha))
    vals = [math.inf if s is None else s for s in stops]
    print(f"rejected {sum(s is not None for s in stops)}/{cfg.runs}")
    print(f"median_stop {np.median(vals)}")


if __name__ == "__main__":
    main()
