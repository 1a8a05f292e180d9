"""Write a synthetic two-arm event stream (newline-delimited JSON) to stdout.

Measurement mode draws log-normal values with arm B scaled by --shift;
count mode draws Poisson arrival times at --rate-a / --rate-b.
"""
import argparse
import json
import sys

import numpy as np


def main(argv=None):
    p = argparse.ArgumentParser()
    p.add_argument("--mode", choices=["measurement", "count"], default="measurement")
    p.add_argument("--n", type=int, default=5000, help="events per arm (measurement mode)")
    p.add_argument("--shift", type=float, default=0.0, help="relative scale shift of arm B")
    p.add_argument("--rate-a", type=float, default=10.0)
    p.add_argument("--rate-b", type=float, default=10.0)
    p.add_argument("--horizon", type=float, default=600.0)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    out = sys.stdout
    if args.mode == "measurement":
        for i in range(args.n):
            ts = i * 0.01
            a = float(rng.lognormal(6.0, 0.5))
            b = float(rng.lognormal(6.0, 0.5)) * (1 + args.shift)
            out.write(json.dumps({"arm": "a", "value": a, "ts": ts}) + "\n")
            out.write(json.dumps({"arm": "b", "value": b, "ts": ts + 0.005}) + "\n")
    else:
        events = []
        for arm, rate in (("a", args.rate_a), ("b", args.rate_b)):
            t = 0.0
            while True:
                t += rng.exponential(1 / rate)
                if t > args.horizon:
                    break
                events.append((t, arm))
        for t, arm in sorted(events):
            out.write(json.dumps({"arm": arm, "ts": t}) + "\n")


if __name__ == "__main__":
    main()
