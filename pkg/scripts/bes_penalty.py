"""Rate penalty over R(d) for the binary erasure source, by blocklength and eps.

Prints R_ach/R(d) - 1 and the achievability/converse gap in bits.

    python scripts/bes_penalty.py [--delta 0.1] [--d 0.1] [--eps 0.1 0.05 0.01]
"""

import argparse
import math

from lossy_fbl.errors import LossyFBLError
from lossy_fbl.families import bound_families
from lossy_fbl.sources import BES, rate_distortion


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--d", type=float, default=0.1)
    ap.add_argument("--eps", type=float, nargs="+", default=[0.1, 0.05, 0.01])
    ap.add_argument("--n", type=int, nargs="+", default=[200, 300, 400, 500, 700, 1000])
    args = ap.parse_args()

    src = BES(args.delta)
    fam = bound_families(src)
    R = rate_distortion(src, args.d)
    print(f"R(d) = {R / math.log(2):.6f} bits")
    print(f"{'eps':>6} {'n':>6} {'penalty':>9} {'gap bits':>9}")
    for eps in args.eps:
        for n in args.n:
            try:
                ach = fam["ach"].rate(n, args.d, eps).log_M_nats / n
                conv = fam["converse"].rate(n, args.d, eps).log_M_nats / n
            except LossyFBLError as err:
                print(f"{eps:>6g} {n:>6} {'-':>9} {'-':>9}  {err}")
                continue
            print(f"{eps:>6g} {n:>6} {ach / R - 1:>9.4f} {(ach - conv) / math.log(2):>9.5f}")


if __name__ == "__main__":
    main()
