"""Axis direction: explicit linear disc versus the disc search, with log-log slopes."""
import argparse

import numpy as np

from squeezebound.discs import DiscSearchConfig, lemma10_disc, lemma10_epsilon0
from squeezebound.domain import builtin
from squeezebound.experiment import fit_slope, parse_delta_range
from squeezebound.kobayashi import kobayashi_upper


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--deltas", default="1e-2:1e-8:7")
    ap.add_argument("--k", type=int, default=2)
    args = ap.parse_args()
    dom = builtin("model", k=args.k)
    cfg = DiscSearchConfig()
    deltas = parse_delta_range(args.deltas)
    eps = lemma10_epsilon0(dom) / 2
    explicit, searched = [], []
    for d in deltas:
        explicit.append(1 / abs(lemma10_disc(dom, d, eps, cfg=cfg).derivative[0]))
        searched.append(kobayashi_upper(dom, [0, 0, -d], np.array([1, 0, 0]), cfg).value)
        print(f"delta={d:.1e}  K_explicit={explicit[-1]:.5f}  K_search={searched[-1]:.5f}")
    print(f"slope explicit {fit_slope(deltas, explicit):.6f}, search {fit_slope(deltas, searched):.6f}, "
          f"predicted {-1 / (4 * args.k + 1):.6f}")


if __name__ == "__main__":
    main()
