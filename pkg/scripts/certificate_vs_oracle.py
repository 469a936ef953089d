"""Diagonal lower certificate against the brute-force grid oracle and the disc search.

For each depth prints the largest certified beta found by the oracle, the
beta achieved by the disc search, and the two certificate limits 1/value.
"""
import argparse

import numpy as np

from squeezebound.discs import DiscSearchConfig
from squeezebound.domain import builtin
from squeezebound.kobayashi import (DIAGONAL, DomainNotInCertifiedForm, diag_lower_certificate,
                                    grid_oracle, kobayashi_upper)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", default="model", choices=("model", "herbort"))
    ap.add_argument("--deltas", default="1e-2,1e-3")
    ap.add_argument("--beta-steps", type=int, default=64)
    ap.add_argument("--c2-steps", type=int, default=5)
    ap.add_argument("--c2-span", type=float, default=0.1)
    args = ap.parse_args()
    dom = builtin(args.family, k=2) if args.family == "model" else builtin(args.family)
    cfg = DiscSearchConfig()
    print("delta      oracle_beta  search_beta  1/cert_std  1/cert_pt")
    for d in (float(x) for x in args.deltas.split(",")):
        p = np.array([0, 0, -d])
        res = grid_oracle(dom, p, DIAGONAL, degree=2, beta_steps=args.beta_steps,
                          c2_steps=args.c2_steps, c2_span=args.c2_span, cfg=cfg)
        search = 1 / kobayashi_upper(dom, p, DIAGONAL, cfg).value
        lims = []
        for variant in ("standard", "positive_terms"):
            try:
                lims.append(1 / diag_lower_certificate(dom, d, variant).value)
            except DomainNotInCertifiedForm:
                lims.append(float("nan"))
        print(f"{d:<10.1e} {res.beta_max:<12.5f} {search:<12.5f} {lims[0]:<11.5f} {lims[1]:.5f}")


if __name__ == "__main__":
    main()
