#!/usr/bin/env python3
"""Sweep symmetric-channel pairs through the degradedness decision.

For each flip pair (p, q) the linear program either recovers an explicit
garbling kernel taking the p-channel to the q-channel or reports the best
achievable residual.  The full p <= q upper triangle should come out
feasible and everything below it infeasible:

    python scripts/garbling_sweep.py --flips 0.05 0.1 0.2 0.3 0.4
"""

import argparse

from mmse_lab import binary_symmetric_channel, is_degraded


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--flips", type=float, nargs="+",
                        default=[0.05, 0.1, 0.2, 0.3, 0.4])
    args = parser.parse_args(argv)

    flips = sorted(args.flips)
    corner = "p \\ q"
    print(f"{corner:>8}  " + "  ".join(f"{q:>12.3f}" for q in flips))
    for p in flips:
        cells = []
        for q in flips:
            cert = is_degraded(binary_symmetric_channel(p),
                               binary_symmetric_channel(q))
            if cert.feasible:
                # recovered garbling flip g solves p + g - 2 p g = q
                cells.append(f"g={cert.garbling_matrix[0, 1]:>10.6f}")
            else:
                cells.append(f"r={cert.residual:>10.2e}")
        print(f"{p:>8.3f}  " + "  ".join(cells))
    print("\ng: recovered garbling flip (feasible)   r: residual (infeasible)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
