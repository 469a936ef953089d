"""Fast property checks run by ``squeezebound verify``."""
from __future__ import annotations

import math
import sys
from fractions import Fraction

import numpy as np

from .discs import DiscSearchConfig, circle_average, lemma10_disc, lemma10_epsilon0
from .domain import builtin
from .experiment import decay_experiment
from .hermitian import HermitianPolynomial
from .jet import Jet
from .kobayashi import DIAGONAL, kobayashi_upper, lower_estimates
from .normal_form import NORMALIZED, VIOLATION, reduce_to_normal_form
from .squeezing import (StarShapedSet, exponent_composition, no_linear_map_check,
                        obstruction_epsilon)


def _exponents():
    return all(exponent_composition(k) * 4 * k * (4 * k + 1) == 1 for k in range(1, 9)) and \
        exponent_composition(3, "positive_terms") == Fraction(1, 42)


def _closed_form_slope():
    t = decay_experiment(builtin("model", k=2), [1e-2, 1e-3, 1e-4, 1e-5, 1e-6], mode="closed_form")
    return abs(t.slope - 1 / 72) <= 1e-12


def _quadrature():
    rng = np.random.default_rng(0)
    theta = 2 * np.pi * np.arange(32) / 32
    tau = np.exp(1j * theta)
    for _ in range(20):
        c = rng.normal(size=11) + 1j * rng.normal(size=11)
        vals = np.polyval(c[::-1], tau).real
        if abs(circle_average(vals) - c[0].real) > 1e-10:
            return False
    return True


def _normal_form_examples():
    n = 2
    z = (0,) * n
    base = Jet(n, {(z, z, 1, 0): 1, (z, z, 2, 0): 1, (z, z, 0, 2): 1,
                   ((1, 1), (1, 1), 0, 0): 1})
    re_z = Jet(n, {((1, 0), z, 0, 1): 0.5, (z, (1, 0), 0, 1): 0.5})
    abs_z = Jet(n, {((1, 0), (1, 0), 0, 1): 1.0})
    return (reduce_to_normal_form(base, 2).status == NORMALIZED
            and reduce_to_normal_form(base + re_z, 2).status == NORMALIZED
            and reduce_to_normal_form(base + abs_z, 2).status == VIOLATION)


def _obstruction():
    D = StarShapedSet.pinched([1.0, 1.0], 0.2)
    eps = obstruction_epsilon(0.9, 0.2, [1, 0], [0, 1])
    return no_linear_map_check(D, [1, 0], [0, 1], 0.9, eps, trials=1000)


def _ball_disc_search():
    v = kobayashi_upper(builtin("ball", r=1), [0, 0, 0], [1, 0, 0]).value
    return 1.0 <= v <= 1.002


def _consistency():
    dom = builtin("model", k=2)
    p = dom.point_at_depth(1e-3)
    cfg = DiscSearchConfig(max_degree=1)
    for zeta in (np.array([1, 0, 0]), DIAGONAL):
        up = kobayashi_upper(dom, p, zeta, cfg).value
        if any(m.value > up for m in lower_estimates(dom, p, zeta)):
            return False
    disc = lemma10_disc(dom, 1e-4, lemma10_epsilon0(dom) / 2)
    return disc is not None


CHECKS = [("exponent identity", _exponents, False),
          ("closed-form slope", _closed_form_slope, False),
          ("circle quadrature", _quadrature, False),
          ("normal form statuses", _normal_form_examples, False),
          ("obstruction oracle", _obstruction, False),
          ("ball disc search", _ball_disc_search, True),
          ("lower <= upper", _consistency, True)]


def run_checks(quick: bool = False, out=sys.stdout) -> bool:
    ok = True
    for name, fn, slow in CHECKS:
        if quick and slow:
            continue
        try:
            good = bool(fn())
        except Exception as exc:  # a crashing check is a failing check
            good = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        print(f"{'PASS' if good else 'FAIL'} {name}", file=out)
        ok &= good
    return ok
