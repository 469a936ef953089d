"""Disc search accuracy against the closed form on the unit ball, by disc degree."""
import argparse
import time

from squeezebound.discs import DiscSearchConfig
from squeezebound.domain import builtin
from squeezebound.kobayashi import ball_exact, kobayashi_upper


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=0.5, help="basepoint (a, 0, 0)")
    ap.add_argument("--degrees", default="1,2,3,4,6,8,10")
    args = ap.parse_args()
    ball = builtin("ball")
    p = [args.a, 0, 0]
    exact = ball_exact(1.0, p, [1, 0, 0])
    print(f"exact K = {exact:.6f}")
    for N in (int(x) for x in args.degrees.split(",")):
        t = time.time()
        est = kobayashi_upper(ball, p, [1, 0, 0], DiscSearchConfig(max_degree=N))
        print(f"N={N:2d}  K_upper={est.value:.6f}  excess={est.value / exact - 1:.2e}  "
              f"({time.time() - t:.1f} s)")


if __name__ == "__main__":
    main()
