"""Polynomial analytic discs and their admissibility in a working domain."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, asdict, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .domain import DomainSpec, DomainError, axis_restriction
from .hermitian import HermitianPolynomial, as_point


@dataclass(frozen=True)
class DiscSearchConfig:
    max_degree: int = 3
    boundary_samples: int = 256
    interior_rings: int = 8
    safety_margin: float = 1e-9
    optimizer_budget: int = 2000
    bisection_rel_tol: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        for name in ("max_degree", "boundary_samples", "interior_rings", "optimizer_budget"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be positive")
        if not (self.safety_margin > 0 and self.bisection_rel_tol > 0):
            raise ValueError("safety_margin and bisection_rel_tol must be positive")
        M = self.boundary_samples
        if M & (M - 1):
            raise ValueError("boundary_samples must be a power of two")

    def to_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class AnalyticDisc:
    """``phi(tau) = basepoint + sum_j coefficients[j-1] * tau**j``."""
    basepoint: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        p = as_point(self.basepoint)
        C = np.atleast_2d(np.asarray(self.coefficients, dtype=complex))
        if C.shape[0] < 1 or C.shape[1] != p.shape[0]:
            raise ValueError("need at least one coefficient vector of the basepoint's dimension")
        object.__setattr__(self, "basepoint", p)
        object.__setattr__(self, "coefficients", C)

    @property
    def degree(self) -> int:
        return self.coefficients.shape[0]

    @property
    def derivative(self) -> np.ndarray:
        return self.coefficients[0]

    def __call__(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=complex)
        powers = tau[..., None] ** np.arange(1, self.degree + 1)
        return self.basepoint + powers @ self.coefficients

    def derivative_bound(self) -> float:
        """``sum_j j |c_j|``, a bound for ``|phi'|`` on the closed unit disc."""
        return float(sum((j + 1) * np.linalg.norm(c) for j, c in enumerate(self.coefficients)))

    def __eq__(self, other):
        return (isinstance(other, AnalyticDisc)
                and np.array_equal(self.basepoint, other.basepoint)
                and np.array_equal(self.coefficients, other.coefficients))


@dataclass
class AdmissibilityReport:
    admissible: bool
    reason: str
    max_rho: float
    max_locality: float
    gap_rho: float
    gap_locality: float
    gap_method: str
    exits_bounding_box: bool = False

    def __bool__(self):
        return self.admissible


def lipschitz_bound(rho: HermitianPolynomial, radius: float) -> float:
    """Euclidean Lipschitz constant of ``rho`` on the ball of the given radius.

    Uses ``|grad rho| = 2 |d rho / d conj z|`` and ``|z^a conj(z)^b| <= radius^deg``.
    """
    comps = np.zeros(rho.dimension)
    for (a, b), c in rho.terms.items():
        deg = sum(a) + sum(b)
        for j in range(rho.dimension):
            if b[j]:
                comps[j] += abs(c) * b[j] * radius ** (deg - 1)
    return 2.0 * float(np.linalg.norm(comps))


def _spectral_gap(values: np.ndarray, samples: int) -> np.ndarray:
    """Bound on how far the maximum of a trigonometric polynomial exceeds its sampled maximum.

    ``values`` holds exact samples (last axis) of a trigonometric polynomial
    of degree below ``samples/2``; the FFT recovers its coefficients ``G_m``.
    With ``h = pi/samples`` the nearest sample to a maximiser lies within
    ``h``, and the derivative vanishes there, so the excess is at most
    ``min(h sum |m||G_m|, h^2/2 sum m^2 |G_m|)``.
    """
    G = np.abs(np.fft.fft(values, axis=-1)) / samples
    freqs = np.abs(np.fft.fftfreq(samples, d=1.0 / samples))
    h = math.pi / samples
    first = (G * freqs).sum(axis=-1) * h
    second = (G * freqs ** 2).sum(axis=-1) * h * h / 2
    return np.minimum(first, second)


class BoundaryEvaluator:
    """Vectorised margins of many discs on the boundary circle."""

    def __init__(self, dom: DomainSpec, degree: int, cfg: DiscSearchConfig):
        self.dom = dom
        self.cfg = cfg
        self.M = cfg.boundary_samples
        theta = 2 * np.pi * np.arange(self.M) / self.M
        self.E = np.exp(1j * np.outer(theta, np.arange(1, degree + 1)))   # (M, N)
        self.degree = degree
        self.spectral = self.M > 2 * max(dom.rho.degree, 1) * degree
        self.lip = None if self.spectral else lipschitz_bound(dom.rho, dom.bounding_radius)

    def margins(self, p: np.ndarray, coeffs: np.ndarray):
        """``coeffs``: (..., N, n).  Returns certified bounds (rho_max + gap, loc_max + gap, box)."""
        pts = p + np.einsum("mj,...jk->...mk", self.E, coeffs)
        rho = self.dom.rho_values(pts)
        d2 = np.sum(np.abs(pts - self.dom.q) ** 2, axis=-1) - self.dom.locality_radius ** 2
        box = np.sum(np.abs(pts) ** 2, axis=-1).max(axis=-1) - self.dom.bounding_radius ** 2
        if self.spectral:
            g_rho = _spectral_gap(rho, self.M)
        else:
            dsum = (np.arange(1, self.degree + 1) * np.linalg.norm(coeffs, axis=-1)).sum(axis=-1)
            g_rho = self.lip * dsum * math.pi / self.M
        g_loc = _spectral_gap(d2, self.M)
        return rho.max(axis=-1) + g_rho, d2.max(axis=-1) + g_loc, box, g_rho, g_loc

    def samples(self, p: np.ndarray, coeffs: np.ndarray):
        """Raw boundary samples: ``rho`` and squared-distance excess, each (..., M)."""
        pts = p + np.einsum("mj,...jk->...mk", self.E, coeffs)
        d2 = np.sum(np.abs(pts - self.dom.q) ** 2, axis=-1) - self.dom.locality_radius ** 2
        return self.dom.rho_values(pts), d2

    def score(self, p: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
        """Negative exactly when the boundary circle is certified inside the domain."""
        r, l, box, _, _ = self.margins(p, coeffs)
        return np.maximum(np.maximum(r + self.cfg.safety_margin, l), box)


def disc_admissible(dom: DomainSpec, disc: AnalyticDisc, cfg: DiscSearchConfig) -> AdmissibilityReport:
    """Sample-and-certify check that ``disc`` maps the unit disc into the working domain.

    Samples ``rho`` on ``interior_rings`` circles of radius ``j/interior_rings``;
    every sample must be ``< -safety_margin`` and inside the locality ball.  On
    the outer circle the sampled maxima plus an inter-sample bound must stay
    negative: the bound is spectral (exact trigonometric coefficients from an
    FFT) when ``boundary_samples > 2 * deg(rho) * deg(disc)``, otherwise the
    coarse ``Lipschitz(rho) * sum j|c_j| * pi/M``.  For plurisubharmonic
    ``rho`` (every built-in) the maximum principle then covers the interior.
    """
    if disc.basepoint.shape[0] != dom.dimension:
        raise ValueError("disc dimension does not match the domain")
    M, rings = cfg.boundary_samples, cfg.interior_rings
    theta = 2 * np.pi * np.arange(M) / M
    radii = np.arange(1, rings + 1) / rings
    tau = radii[:, None] * np.exp(1j * theta)[None, :]
    pts = disc(tau)                                                   # (rings, M, n)
    if np.any(np.sum(np.abs(pts) ** 2, axis=-1) >= dom.bounding_radius ** 2):
        return AdmissibilityReport(False, "exits_bounding_box", math.inf, math.inf,
                                   math.nan, math.nan, "none", True)
    rho = dom.rho_values(pts)
    d2 = np.sum(np.abs(pts - dom.q) ** 2, axis=-1) - dom.locality_radius ** 2
    ev = BoundaryEvaluator(dom, disc.degree, cfg)
    r_cert, l_cert, _, g_rho, g_loc = ev.margins(disc.basepoint, disc.coefficients)
    method = "spectral" if ev.spectral else "lipschitz"
    report = AdmissibilityReport(False, "", float(rho.max()), float(d2.max()),
                                 float(g_rho), float(g_loc), method)
    if rho.max() >= -cfg.safety_margin:
        report.reason = "rho_not_negative"
    elif d2.max() >= 0:
        report.reason = "leaves_locality_ball"
    elif r_cert >= -cfg.safety_margin or l_cert >= 0:
        report.reason = "gap_not_certified"
    else:
        report.admissible, report.reason = True, "certified"
    return report


def circle_average(samples: Sequence[float]) -> float:
    """Trapezoid mean over equispaced samples on a circle."""
    s = np.asarray(samples, dtype=float)
    if s.ndim != 1 or s.shape[0] < 16:
        raise ValueError("need at least 16 equispaced samples")
    return float(np.mean(s))


# -- the explicit axis disc ----------------------------------------------------------

def axis_exponent(dom: DomainSpec) -> float:
    """``1/(4k+1)`` for the model family, ``1/(2k+1)`` for positive-term domains."""
    k = dom.declared_k
    if dom.family_tag == "model":
        return 1.0 / (4 * k + 1)
    if dom.family_tag == "herbort":
        return 1.0 / (2 * k + 1)
    raise DomainError(f"no axis-disc construction for family {dom.family_tag!r}")


def lemma10_epsilon0(dom: DomainSpec, axis: int | None = None) -> float:
    """Largest uniform scale so that ``(eps * delta^e * tau, 0, -delta)`` is admissible
    for every ``0 < delta < locality_radius^2``; computed from the axis restriction
    of ``rho`` with a 1% safety factor."""
    e = axis_exponent(dom)
    loc = dom.locality_radius
    dmax = loc * loc
    axes = (0, 1) if axis is None else (axis,)
    bounds = [math.sqrt((loc * loc - dmax * dmax) / dmax ** (2 * e))]
    for ax in axes:
        restr = axis_restriction(dom, ax)
        powers = []
        for (a, b), c in restr.terms.items():
            if a != b or c.real <= 0 or c.imag != 0:
                raise DomainError("axis restriction is not a positive sum of |z|^2n terms")
            powers.append((a[ax], c.real))
        for n2, _ in powers:
            if 2 * n2 * e <= 1:
                raise DomainError("order of contact along the axis is too low for a uniform scale")
        if not powers:
            continue

        def excess(eps):
            return sum(c * eps ** (2 * n) * dmax ** (2 * n * e - 1) for n, c in powers) - 1.0

        hi = 1.0
        while excess(hi) < 0:
            hi *= 2
        bounds.append(brentq(excess, 0.0, hi, xtol=1e-15))
    return 0.99 * min(bounds)


def lemma10_disc(dom: DomainSpec, delta: float, eps: float, axis: int = 0,
                 cfg: DiscSearchConfig | None = None) -> AnalyticDisc:
    """Linear disc ``tau -> (0,0,-delta) + eps * delta^e * tau * e_axis``, checked admissible."""
    if dom.family_tag not in ("model", "herbort"):
        raise DomainError("axis disc is only available for model and herbort domains")
    if not 0 < delta < dom.locality_radius ** 2:
        raise DomainError("need 0 < delta < locality_radius^2")
    eps0 = lemma10_epsilon0(dom)
    if not 0 < eps <= eps0:
        raise DomainError(f"eps = {eps} outside (0, eps0 = {eps0:.6g}]")
    beta = eps * delta ** axis_exponent(dom)
    c1 = np.zeros(dom.dimension, complex)
    c1[axis] = beta
    disc = AnalyticDisc(dom.point_at_depth(delta), c1[None, :])
    report = disc_admissible(dom, disc, cfg or DiscSearchConfig())
    if not report:
        raise DomainError(f"axis disc not admissible: {report.reason}")
    return disc
