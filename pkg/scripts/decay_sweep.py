"""Squeezing-bound decay over a depth grid, in both modes, with a negative control.

    python3 scripts/decay_sweep.py --deltas 1e-2:1e-6:5 --out results/
"""
import argparse
import os

from squeezebound.discs import DiscSearchConfig
from squeezebound.domain import builtin
from squeezebound.experiment import decay_experiment, parse_delta_range


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--deltas", default="1e-2:1e-6:5")
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    deltas = parse_delta_range(args.deltas)
    cfg = DiscSearchConfig()
    runs = [("model", builtin("model", k=args.k), "closed_form"),
            ("model", builtin("model", k=args.k), "numeric"),
            ("herbort", builtin("herbort"), "closed_form"),
            ("convex_control", builtin("convex_control"), "numeric")]
    for name, dom, mode in runs:
        table = decay_experiment(dom, deltas, cfg, mode, jobs=args.jobs)
        path = os.path.join(args.out, f"decay_{name}_{mode}.csv")
        with open(path, "w") as fh:
            fh.write(table.to_csv())
        s = table.summary()
        print(f"{name:15s} {mode:12s} slope={s['slope']} exponent={s['theoretical_exponent']} "
              f"verdict={s['verdict']!r} -> {path}")
        for r in table.rows:
            print(f"    delta={r.delta:.1e}  lambda={r.lam:.5g}  r_d={r.r_d:.5g}  "
                  f"3eps={3 * r.epsilon:.5g}  bound={r.bound:.5g}")


if __name__ == "__main__":
    main()
