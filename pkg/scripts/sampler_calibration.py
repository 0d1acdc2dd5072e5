#!/usr/bin/env python3
"""Check empirical scheduling frequencies against their expectations.

Draws a large number of plans, then prints one line per transform with
the expected probability, the realized frequency, and the z-score, plus
one line per parameter with the realized extremes against the configured
range. Ends nonzero if any frequency drifts past four sigma.

    python3 scripts/sampler_calibration.py --draws 100000
"""

import argparse
import sys

from mriaug.cli import sampler_report
from mriaug.config import TRANSFORMS, AugmentationConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--draws", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--p-aug", type=float, default=None,
                        help="override the default 1/3 inclusion probability")
    parser.add_argument("--level", type=int, default=3, choices=(1, 2, 3, 4, 5))
    args = parser.parse_args()

    config = AugmentationConfig(magnitude_level=args.level)
    if args.p_aug is not None:
        config = config.with_probability(args.p_aug)

    report = sampler_report(config, args.draws, args.seed)

    print(f"draws: {report['draws']}  seed: {report['seed']}  "
          f"level: {report['magnitude_level']}")
    print(f"{'transform':<22}{'expected':>10}{'observed':>10}{'z':>8}")
    for t in TRANSFORMS:
        p = report["expected"][t]
        f = report["frequency"][t]
        sigma = (p * (1 - p) / args.draws) ** 0.5
        z = (f - p) / sigma if sigma > 0 else 0.0
        print(f"{t:<22}{p:>10.4f}{f:>10.4f}{z:>8.2f}")

    print()
    print(f"{'parameter':<34}{'min':>12}{'max':>12}{'mean':>12}")
    for t in TRANSFORMS:
        for key, stats in report["parameters"].get(t, {}).items():
            name = f"{t}.{key}"
            print(f"{name:<34}{stats['min']:>12.5g}{stats['max']:>12.5g}"
                  f"{stats['mean']:>12.5g}")

    if report["flags"]:
        print(f"\nfrequency drift past 4 sigma: {', '.join(report['flags'])}")
        sys.exit(1)
    print("\nall frequencies within 4 sigma")


if __name__ == "__main__":
    main()
