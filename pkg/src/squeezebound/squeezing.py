"""Squeezing-function upper bounds from the shape of the Kobayashi indicatrix.

If ``lam*zeta1`` and ``lam*zeta2`` lie in the indicatrix ``D`` but
``eps*(lam*zeta1 + lam*zeta2)`` does not, then no linear map ``L`` satisfies
``B(3 eps) ⊆ L(D) ⊆ B(1)``, and the squeezing function at the basepoint is at
most ``3 eps``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

import numpy as np

from .discs import DiscSearchConfig, lemma10_disc, lemma10_epsilon0
from .domain import CERTIFIED_FAMILIES, DomainError, DomainSpec
from .hermitian import as_point
from .kobayashi import (DIAGONAL, MetricEstimate, diag_lower_certificate, kobayashi_upper,
                        lower_estimates, UPPER)

DEFAULT_MARGIN = 1e-3
NO_CERTIFICATE = "no certificate"


class DegenerateDirections(ValueError):
    pass


class HypothesisNotSatisfied(ValueError):
    """The obstruction check does not apply to the given set and scale."""


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def obstruction_epsilon(lam: float, r_d: float, zeta1: Sequence[complex], zeta2: Sequence[complex],
                        margin: float = DEFAULT_MARGIN) -> float:
    """``eps = r_d (1 + margin) / (lam |zeta1 + zeta2|)``: the smallest scale (up to the
    margin) putting ``eps*lam*(zeta1 + zeta2)`` outside a set of radius ``r_d`` along
    the sum direction."""
    if not (lam > 0 and r_d > 0):
        raise ValueError("lam and r_d must be positive")
    if margin < 0:
        raise ValueError("margin must be non-negative")
    z1 = np.asarray(zeta1, dtype=complex)
    z2 = np.asarray(zeta2, dtype=complex)
    sv = np.linalg.svd(np.stack([z1, z2]), compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise DegenerateDirections("directions are linearly dependent")
    return r_d * (1 + margin) / (lam * float(np.linalg.norm(z1 + z2)))


# -- balanced star-shaped sets ---------------------------------------------------------

@dataclass
class StarShapedSet:
    """Balanced set ``{v : |v| < radius(v/|v|)}`` given by its radial function.

    ``radius`` takes an array of unit vectors of shape (..., n) and returns (...,).
    """
    dimension: int
    radius: Callable[[np.ndarray], np.ndarray]

    def radii(self, directions) -> np.ndarray:
        return np.asarray(self.radius(_unit(directions)), dtype=float)

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=complex)
        n = float(np.linalg.norm(v))
        return n == 0 or n < float(self.radii(v[None, :])[0])

    @classmethod
    def ball(cls, n: int, r: float = 1.0) -> "StarShapedSet":
        return cls(n, lambda u: np.full(u.shape[:-1], float(r)))

    @classmethod
    def pinched(cls, axis_radii: Sequence[float], diag_radius: float,
                power: float = 1.0) -> "StarShapedSet":
        """Ellipsoid-like radii ``axis_radii`` along the coordinate axes, pinched to
        ``diag_radius`` on the diagonal of the first two coordinates.

        Gauge ``g(u) = sqrt(sum |u_i|^2 / a_i^2) + kappa (2 |u_1| |u_2|)^power`` and
        radius ``1/g``; ``kappa`` is fixed by the diagonal radius.
        """
        a = np.asarray(axis_radii, dtype=float)
        if a.ndim != 1 or a.shape[0] < 2 or np.any(a <= 0):
            raise ValueError("need at least two positive axis radii")
        base = math.sqrt(0.5 / a[0] ** 2 + 0.5 / a[1] ** 2)
        kappa = 1.0 / diag_radius - base
        if kappa < 0:
            raise ValueError("diag_radius exceeds the unpinched diagonal radius")

        def radius(u):
            m = np.abs(u)
            g = np.sqrt(np.sum(m ** 2 / a ** 2, axis=-1))
            return 1.0 / (g + kappa * (2 * m[..., 0] * m[..., 1]) ** power)

        return cls(a.shape[0], radius)


def random_unit_vectors(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=(count, n)) + 1j * rng.normal(size=(count, n))
    return _unit(v)


def no_linear_map_check(D: StarShapedSet, zeta1: Sequence[complex], zeta2: Sequence[complex],
                        lam: float, eps: float, trials: int = 10_000, seed: int = 0,
                        grid: int = 256, boundary: int = 512, batch: int = 1000) -> bool:
    """Sample linear maps ``L`` with ``L(D) ⊆ B(1)`` and look for one with ``B(3 eps) ⊆ L(D)``.

    ``L`` is normalised so the largest ``|L v|`` over boundary samples of ``D``
    (including ``r(zeta_i) zeta_i``) is 1.  The radius of ``L(D)`` along a unit
    ``w`` is ``r(u) / |L^-1 w|`` with ``u = L^-1 w / |L^-1 w|``; it is tested on a
    direction grid plus the direction of ``L(zeta1 + zeta2)``.  Returns True when no
    sampled map realises the inclusion.
    """
    n = D.dimension
    z1 = _unit(as_point(zeta1, n))
    z2 = _unit(as_point(zeta2, n))
    if not (D.contains(lam * z1) and D.contains(lam * z2)):
        raise HypothesisNotSatisfied("lam*zeta1 or lam*zeta2 is not inside D")
    if D.contains(eps * lam * (z1 + z2)):
        raise HypothesisNotSatisfied("eps*lam*(zeta1 + zeta2) is inside D")
    rng = np.random.default_rng(seed)
    dirs = np.concatenate([np.eye(n, dtype=complex), _unit(z1 + z2)[None],
                           random_unit_vectors(n, boundary, rng)])
    bpts = dirs * D.radii(dirs)[:, None]
    bpts = np.concatenate([bpts, D.radii(z1[None])[:, None] * z1, D.radii(z2[None])[:, None] * z2])
    wgrid = np.concatenate([np.eye(n, dtype=complex), random_unit_vectors(n, grid, rng)])
    s = z1 + z2
    done = 0
    while done < trials:
        T = min(batch, trials - done)
        L = rng.normal(size=(T, n, n)) + 1j * rng.normal(size=(T, n, n))
        images = np.einsum("tij,sj->tsi", L, bpts)
        L /= np.linalg.norm(images, axis=-1).max(axis=-1)[:, None, None]
        Linv = np.linalg.inv(L)
        wit = _unit(np.einsum("tij,j->ti", L, s))
        W = np.concatenate([np.broadcast_to(wgrid, (T,) + wgrid.shape), wit[:, None, :]], axis=1)
        pre = np.einsum("tij,tgj->tgi", Linv, W)
        pn = np.linalg.norm(pre, axis=-1)
        rad = D.radii(pre) / pn
        if np.any(rad.min(axis=-1) >= 3 * eps):
            return False
        done += T
    return True


# -- the pipeline ------------------------------------------------------------------

@dataclass
class SqueezingBound:
    basepoint: np.ndarray
    delta: float
    zeta1: np.ndarray
    zeta2: np.ndarray
    lam: float
    r_d: float
    epsilon: float
    bound: float
    mode: str = "numeric"
    diagnostic: str = ""
    trace: List[MetricEstimate] = field(default_factory=list)

    @property
    def vacuous(self) -> bool:
        return self.bound >= 1.0

    @property
    def K_axis_upper(self) -> float:
        return 1.0 / self.lam if self.lam > 0 else math.nan

    @property
    def K_diag_lower(self) -> float:
        return 1.0 / self.r_d if self.r_d > 0 else math.nan


E1 = np.array([1, 0, 0], complex)
E2 = np.array([0, 1, 0], complex)


def _vacuous(dom, delta, mode, diagnostic) -> SqueezingBound:
    nan = math.nan
    return SqueezingBound(dom.point_at_depth(delta), delta, E1.copy(), E2.copy(), nan, nan, nan,
                          1.0, mode, diagnostic)


def _axis_upper_closed_form(dom: DomainSpec, delta: float, cfg: DiscSearchConfig,
                            axis: int) -> MetricEstimate:
    eps0 = lemma10_epsilon0(dom)
    disc = lemma10_disc(dom, delta, eps0, axis=axis, cfg=cfg)
    direction = E1 if axis == 0 else E2
    beta = float(abs(disc.derivative[axis]))
    return MetricEstimate(disc.basepoint, direction.copy(), 1.0 / beta, UPPER, witness=disc,
                          config_hash=cfg.config_hash(), seed=cfg.seed)


def squeezing_upper(dom: DomainSpec, delta: float, cfg: DiscSearchConfig | None = None,
                    mode: str = "numeric", margin: float = DEFAULT_MARGIN) -> SqueezingBound:
    """Upper bound for the squeezing function at ``q + (0, 0, -delta)``.

    ``numeric``: ``lam`` from disc searches along both axes, ``r_d`` from the largest
    available lower estimate along the diagonal.  ``closed_form``: ``lam`` from the
    explicit axis disc at its largest uniform scale and ``r_d`` from the family
    certificate alone, so every quantity is a monomial in ``delta``.
    """
    if mode not in ("numeric", "closed_form"):
        raise ValueError(f"unknown mode {mode!r}")
    if not delta > 0:
        raise DomainError("delta must be positive")
    cfg = cfg or DiscSearchConfig()
    if dom.family_tag not in CERTIFIED_FAMILIES:
        return _vacuous(dom, delta, mode, NO_CERTIFICATE)
    if not delta < dom.locality_radius ** 2:
        raise DomainError("need delta < locality_radius^2")
    p = dom.point_at_depth(delta)
    if mode == "numeric":
        ups = [kobayashi_upper(dom, p, E1, cfg), kobayashi_upper(dom, p, E2, cfg)]
        lows = lower_estimates(dom, p, DIAGONAL)
    else:
        ups = [_axis_upper_closed_form(dom, delta, cfg, 0), _axis_upper_closed_form(dom, delta, cfg, 1)]
        lows = [diag_lower_certificate(dom, delta)]
    low = max(lows, key=lambda m: m.value)
    lam = min(1.0 / u.value for u in ups)
    r_d = 1.0 / low.value
    eps = obstruction_epsilon(lam, r_d, E1, E2, margin)
    bound = min(1.0, 3.0 * eps)
    return SqueezingBound(p, delta, E1.copy(), E2.copy(), lam, r_d, eps, bound, mode,
                          "" if bound < 1 else "vacuous: 3*epsilon >= 1", ups + [low])


def exponent_composition(k: int, variant: str = "standard") -> Fraction:
    """Decay exponent of the squeezing bound: axis exponent subtracted from the diagonal one."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if variant == "standard":
        return Fraction(1, 4 * k) - Fraction(1, 4 * k + 1)
    if variant == "positive_terms":
        return Fraction(1, 2 * k) - Fraction(1, 2 * k + 1)
    raise ValueError(f"unknown variant {variant!r}")


def family_variant(dom: DomainSpec) -> str:
    return "standard" if dom.family_tag == "model" else "positive_terms"
