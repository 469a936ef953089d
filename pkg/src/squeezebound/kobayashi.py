"""Upper and lower estimates of the Kobayashi metric.

Upper bounds come from explicit admissible discs: a disc with
``phi(0) = p`` and ``phi'(0) = beta * zeta_hat`` gives
``K(p, zeta) <= |zeta| / beta``.  Lower bounds come from ball inclusions and,
for the model and herbort families, from a closed-form averaging certificate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .discs import (AnalyticDisc, BoundaryEvaluator, DiscSearchConfig, disc_admissible)
from .domain import (CERTIFIED_FAMILIES, DomainError, DomainSpec, has_positive_terms,
                     leading_part)
from .hermitian import HermitianPolynomial, as_point

UPPER = "upper_witness"
LOWER_CERT = "lower_certificate"
LOWER_BALL = "lower_trivial_ball"
BETA_FLOOR = 1e-8
DIAGONAL = np.array([1, 1, 0], dtype=complex) / math.sqrt(2)


class DomainNotInCertifiedForm(DomainError):
    pass


class SearchFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class CertificateRecord:
    k: int
    delta: float
    constant: float
    exponent: float          # value = constant * delta ** exponent
    variant: str
    delta_cap: float
    derivation: str


@dataclass
class MetricEstimate:
    basepoint: np.ndarray
    direction: np.ndarray
    value: float
    kind: str
    witness: Optional[AnalyticDisc] = None
    certificate: Optional[CertificateRecord] = None
    config_hash: Optional[str] = None
    seed: Optional[int] = None


@dataclass
class IndicatrixEntry:
    direction: np.ndarray
    r_lo: float
    r_hi: float
    upper: MetricEstimate
    lower: MetricEstimate


@dataclass
class IndicatrixData:
    basepoint: np.ndarray
    entries: List[IndicatrixEntry] = field(default_factory=list)

    def radii(self) -> np.ndarray:
        return np.array([[e.r_lo, e.r_hi] for e in self.entries])


# -- balls -------------------------------------------------------------------------

def ball_automorphism(a: Sequence[complex]):
    """Automorphism of the unit ball swapping ``a`` and 0, with its derivative at ``a``.

    ``phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>)`` with ``s_a = sqrt(1 - |a|^2)``.
    """
    a = as_point(a)
    n = a.shape[0]
    na2 = float(np.vdot(a, a).real)
    if na2 >= 1:
        raise DomainError("point outside the unit ball")
    s = math.sqrt(1 - na2)
    P = np.outer(a, np.conj(a)) / na2 if na2 > 0 else np.zeros((n, n), complex)
    Q = np.eye(n) - P

    def phi(z):
        z = np.asarray(z, dtype=complex)
        return (a - P @ z - s * (Q @ z)) / (1 - np.vdot(a, z))

    deriv = -(P + s * Q) / (1 - na2)
    return phi, deriv


def ball_exact(r: float, p: Sequence[complex], zeta: Sequence[complex]) -> float:
    """Kobayashi metric of the origin-centred ball ``B(r)`` at ``p``."""
    p = as_point(p)
    zeta = as_point(zeta, p.shape[0])
    if not np.linalg.norm(p) < r:
        raise DomainError("point outside the ball")
    _, D = ball_automorphism(p / r)
    return float(np.linalg.norm(D @ (zeta / r)))


def trivial_lower(dom: DomainSpec, p: Sequence[complex], zeta: Sequence[complex]) -> MetricEstimate:
    """Best of two ball inclusions: ``Omega ∩ U ⊆ B(0, R)`` and
    ``Omega ∩ U ⊆ B(p, locality_radius + |p - q|)``."""
    p = as_point(p, dom.dimension)
    zeta = as_point(zeta, dom.dimension)
    vals = [float(np.linalg.norm(zeta)) / (dom.locality_radius + float(np.linalg.norm(p - dom.q)))]
    if np.linalg.norm(p) < dom.bounding_radius:
        vals.append(ball_exact(dom.bounding_radius, p, zeta))
    return MetricEstimate(p, zeta, max(vals), LOWER_BALL)


# -- disc search ---------------------------------------------------------------------

class _Found(Exception):
    def __init__(self, x):
        self.x = x


def _linear_coeffs(beta, zhat, N):
    C = np.zeros((N, zhat.shape[0]), complex)
    C[0] = beta * zhat
    return C


def _unpack(x, beta, zhat, N, n):
    C = np.zeros((N, n), complex)
    C[0] = beta * zhat
    m = (N - 1) * n
    C[1:] = (x[:m] + 1j * x[m:]).reshape(N - 1, n)
    return C


def _pack(C, N, n):
    rest = C[1:].reshape(-1)
    return np.concatenate([rest.real, rest.imag])


def _minimax(ev, p, beta, zhat, N, x0, budget):
    """SLSQP on ``min s`` subject to every boundary sample being ``<= s``.

    Jacobians are forward differences evaluated as one batch of discs.  Returns
    the number of disc evaluations spent; raises ``_Found`` on a certified disc.
    """
    n = p.shape[0]
    dim = x0.shape[0]
    h = 1e-7 * max(beta, 1e-3)
    used = 0
    cache = {}

    def sample(X):
        nonlocal used
        C = np.stack([_unpack(x, beta, zhat, N, n) for x in X])
        used += len(X)
        if used > budget:
            raise StopIteration
        rho, d2 = ev.samples(p, C)
        return np.concatenate([rho, d2], axis=-1)

    def values(y):
        key = y.tobytes()
        if key not in cache:
            x = y[:dim]
            X = np.vstack([x, x + h * np.eye(dim)])
            V = sample(X)
            cache.clear()
            cache[key] = (V[0], (V[1:] - V[0]) / h)
            if float(ev.score(p, _unpack(x, beta, zhat, N, n))) < 0:
                raise _Found(x.copy())
        return cache[key]

    def cons(y):
        return y[dim] - values(y)[0]

    def cons_jac(y):
        J = -values(y)[1].T
        return np.hstack([J, np.ones((J.shape[0], 1))])

    s0 = float(sample(x0[None])[0].max())
    y0 = np.concatenate([x0, [s0]])
    try:
        minimize(lambda y: y[dim], y0, jac=lambda y: np.eye(dim + 1)[dim], method="SLSQP",
                 constraints=[{"type": "ineq", "fun": cons, "jac": cons_jac}],
                 options={"maxiter": 200, "ftol": 1e-14})
    except StopIteration:
        pass
    return used


def _search_corrections(ev, p, beta, zhat, N, cfg, rng, warm):
    """Minimax SLSQP then Nelder-Mead restarts over ``c_2..c_N``, looking for a certified disc."""
    n = p.shape[0]
    dim = 2 * (N - 1) * n
    budget = cfg.optimizer_budget
    try:
        used = _minimax(ev, p, beta, zhat, N, np.zeros(dim) if warm is None else warm, budget // 2)
    except _Found as hit:
        return _unpack(hit.x, beta, zhat, N, n)

    def f(x):
        nonlocal used
        used += 1
        s = float(ev.score(p, _unpack(x, beta, zhat, N, n)))
        if s < 0:
            raise _Found(x.copy())
        return s

    starts = []
    if warm is not None:
        starts.append(warm)
    starts.append(np.zeros(dim))
    scale = 0.25 * beta
    while used < budget:
        x0 = starts.pop(0) if starts else rng.normal(scale=scale, size=dim)
        simplex = np.vstack([x0] + [x0 + scale * e for e in np.eye(dim)])
        try:
            minimize(f, x0, method="Nelder-Mead",
                     options={"maxfev": max(budget - used, 1), "initial_simplex": simplex,
                              "xatol": 1e-10 * max(beta, 1e-12), "fatol": 1e-14, "adaptive": True})
        except _Found as hit:
            return _unpack(hit.x, beta, zhat, N, n)
    return None


def kobayashi_upper(dom: DomainSpec, p: Sequence[complex], zeta: Sequence[complex],
                    cfg: DiscSearchConfig | None = None) -> MetricEstimate:
    """Upper bound ``|zeta| / beta`` from the largest certified disc found.

    Geometric bisection over ``beta`` in ``[1e-8, bounding_radius]``: first for
    linear discs (cheap and monotone for plurisubharmonic ``rho``), then with
    corrections ``c_2..c_N`` searched by seeded Nelder-Mead restarts.
    """
    cfg = cfg or DiscSearchConfig()
    p = as_point(p, dom.dimension)
    zeta = as_point(zeta, dom.dimension)
    norm = float(np.linalg.norm(zeta))
    if norm == 0:
        raise ValueError("direction must be nonzero")
    if not dom.contains(p):
        raise DomainError("basepoint is not in the working domain")
    zhat = zeta / norm
    N = cfg.max_degree
    ev = BoundaryEvaluator(dom, N, cfg)
    rng = np.random.default_rng(cfg.seed)

    def linear_ok(beta):
        return float(ev.score(p, _linear_coeffs(beta, zhat, N))) < 0

    lo, hi = BETA_FLOOR, float(dom.bounding_radius)
    if not linear_ok(lo):
        raise SearchFailure("no admissible disc even at the smallest beta: basepoint too "
                            "close to the boundary for this sampling resolution")
    best = _linear_coeffs(lo, zhat, N)
    if linear_ok(hi):
        lo, best = hi, _linear_coeffs(hi, zhat, N)
    while hi / lo - 1 > cfg.bisection_rel_tol:
        mid = math.sqrt(lo * hi)
        if linear_ok(mid):
            lo, best = mid, _linear_coeffs(mid, zhat, N)
        else:
            hi = mid
    if N >= 2:
        hi = float(dom.bounding_radius)
        warm = None
        while hi / lo - 1 > cfg.bisection_rel_tol:
            mid = math.sqrt(lo * hi)
            guess = None if warm is None else warm * (mid / lo)
            found = _search_corrections(ev, p, mid, zhat, N, cfg, rng, guess)
            if found is not None:
                lo, best = mid, found
                warm = _pack(found, N, dom.dimension)
            else:
                hi = mid
    disc = AnalyticDisc(p, best)
    report = disc_admissible(dom, disc, cfg)
    shrink = 0
    while not report:
        # the full ring check is stricter than the boundary search; back off
        shrink += 1
        if shrink > 60:
            raise SearchFailure(f"witness failed final certification: {report.reason}")
        best = best * (1 - cfg.bisection_rel_tol)
        disc = AnalyticDisc(p, best)
        report = disc_admissible(dom, disc, cfg)
    beta = float(abs(np.vdot(zhat, disc.derivative)))
    return MetricEstimate(p, zeta, norm / beta, UPPER, witness=disc,
                          config_hash=cfg.config_hash(), seed=cfg.seed)


# -- certificates ------------------------------------------------------------------

def _diagonal_leading_constant(dom: DomainSpec) -> float:
    """Checks the certified form and returns ``sum_gamma c_gamma`` of the
    leading part ``P = sum c_gamma |z^gz w^gw|^2``."""
    if dom.family_tag not in CERTIFIED_FAMILIES:
        raise DomainNotInCertifiedForm(f"no certificate for family {dom.family_tag!r}")
    n = dom.dimension
    P = leading_part(dom)
    if not has_positive_terms(P):
        raise DomainNotInCertifiedForm("leading part is not a positive sum of |monomial|^2")
    for (a, _b) in P.terms:
        if a[0] == 0 or a[1] == 0:
            raise DomainNotInCertifiedForm("leading part does not vanish on both axes")
    rest = HermitianPolynomial(n, {k: c for k, c in dom.rho.terms.items()
                                   if k[0][n - 1] == 0 and k[1][n - 1] == 0})
    if not has_positive_terms(rest):
        raise DomainNotInCertifiedForm("t-free part of rho is not a positive sum of |monomial|^2")
    t_part = dom.rho - rest
    if t_part != HermitianPolynomial.variable(n, n - 1).real_part():
        raise DomainNotInCertifiedForm("rho is not Re t plus a t-free part")
    return float(sum(c.real for c in P.terms.values()))


_DERIVATION = (
    "disc phi with phi(0) = (0,0,-delta), phi'(0) = beta*(1,1,0)/sqrt2; circle mean of rho(phi) "
    "over |tau| = r is -delta + mean|P(phi)| + mean(higher positive terms) >= "
    "-delta + C_P (beta/sqrt2)^(2k) r^(2k) (tau^k coefficient of each monomial); letting r -> 1 "
    "gives beta <= sqrt2 (delta/C_P)^(1/(2k)).")


def diag_lower_certificate(dom: DomainSpec, delta: float,
                           variant: str | None = None) -> MetricEstimate:
    """Closed-form lower bound for ``K(p, (1,1,0)/sqrt2)`` at ``p = (0, 0, -delta)``.

    ``positive_terms``: ``(C_P/delta)^(1/(2k)) / sqrt2``, valid for every delta.
    ``standard``: ``c * delta^(-1/(4k))`` with ``c`` the largest constant that
    stays below the positive-term bound for all ``delta < locality_radius^2``.
    """
    C_P = _diagonal_leading_constant(dom)
    k = dom.declared_k
    cap = dom.locality_radius ** 2
    if not 0 < delta < cap:
        raise DomainError("need 0 < delta < locality_radius^2")
    if variant is None:
        variant = "standard" if dom.family_tag == "model" else "positive_terms"
    c_pt = C_P ** (1.0 / (2 * k)) / math.sqrt(2)
    if variant == "positive_terms":
        const, expo = c_pt, -1.0 / (2 * k)
        text = _DERIVATION
    elif variant == "standard":
        const, expo = c_pt * cap ** (-1.0 / (4 * k)), -1.0 / (4 * k)
        text = _DERIVATION + (f" Then c*delta^(-1/(4k)) <= that bound for delta <= {cap!r} "
                              "with c = c_pt * cap^(-1/(4k)).")
    else:
        raise ValueError(f"unknown variant {variant!r}")
    rec = CertificateRecord(k, delta, const, expo, variant, cap, text)
    p = dom.point_at_depth(delta)
    return MetricEstimate(p, DIAGONAL.copy(), const * delta ** expo, LOWER_CERT, certificate=rec)


def best_diag_certificate(dom: DomainSpec, delta: float) -> MetricEstimate:
    return max((diag_lower_certificate(dom, delta, v) for v in ("standard", "positive_terms")),
               key=lambda m: m.value)


def _depth_of(dom: DomainSpec, p: np.ndarray) -> Optional[float]:
    off = p - dom.q
    if np.allclose(off[:-1], 0, atol=0) and off[-1].imag == 0 and off[-1].real < 0:
        return -off[-1].real
    return None


def _is_diagonal(zhat: np.ndarray) -> bool:
    return abs(abs(np.vdot(DIAGONAL, zhat)) - 1) < 1e-12


def lower_estimates(dom: DomainSpec, p: Sequence[complex],
                    zeta: Sequence[complex]) -> List[MetricEstimate]:
    p = as_point(p, dom.dimension)
    zeta = as_point(zeta, dom.dimension)
    out = [trivial_lower(dom, p, zeta)]
    norm = float(np.linalg.norm(zeta))
    delta = _depth_of(dom, p)
    if (dom.family_tag in CERTIFIED_FAMILIES and delta is not None
            and delta < dom.locality_radius ** 2 and _is_diagonal(zeta / norm)):
        for variant in ("standard", "positive_terms"):
            cert = diag_lower_certificate(dom, delta, variant)
            cert.value *= norm
            cert.direction = zeta
            out.append(cert)
    return out


# -- indicatrix ----------------------------------------------------------------------

def indicatrix_radii(dom: DomainSpec, p: Sequence[complex], directions: Sequence[Sequence[complex]],
                     cfg: DiscSearchConfig | None = None) -> IndicatrixData:
    cfg = cfg or DiscSearchConfig()
    p = as_point(p, dom.dimension)
    data = IndicatrixData(p)
    for d in directions:
        d = as_point(d, dom.dimension)
        d = d / np.linalg.norm(d)
        up = kobayashi_upper(dom, p, d, cfg)
        low = max(lower_estimates(dom, p, d), key=lambda m: m.value)
        if low.value > up.value * (1 + 1e-12):
            raise AssertionError(f"lower estimate {low.value} exceeds upper {up.value}")
        # radius = |d| / K(p, d); dividing by |d| cancels rounding from the normalisation
        norm = float(np.linalg.norm(d))
        data.entries.append(IndicatrixEntry(d, norm / up.value, norm / low.value, up, low))
    return data


# -- brute-force oracle -------------------------------------------------------------

@dataclass
class OracleResult:
    beta_max: float
    disc: Optional[AnalyticDisc]
    evaluated: int
    grid_size: int


def grid_oracle(dom: DomainSpec, p: Sequence[complex], zeta: Sequence[complex], degree: int = 2,
                beta_steps: int = 64, c2_steps: int = 5, c2_span: float | None = None,
                cfg: DiscSearchConfig | None = None, budget: int = 10 ** 6,
                chunk: int = 2048) -> OracleResult:
    """Exhaustive search over ``beta`` on a uniform grid of ``(0, R]`` and ``c_2`` on a
    ``c2_steps``-point grid per real component; returns the largest certified ``beta``.

    Scans ``beta`` downwards and stops at the first level with a certified disc.
    """
    cfg = cfg or DiscSearchConfig()
    if degree not in (1, 2):
        raise ValueError("grid oracle supports degree 1 or 2")
    p = as_point(p, dom.dimension)
    zeta = as_point(zeta, dom.dimension)
    zhat = zeta / np.linalg.norm(zeta)
    n = dom.dimension
    R = float(dom.bounding_radius)
    if degree == 1:
        c2_grid = np.zeros((1, 0, n), complex)
    else:
        span = 0.5 * R if c2_span is None else c2_span
        axis = np.linspace(-span, span, c2_steps)
        mesh = np.stack(np.meshgrid(*([axis] * (2 * n)), indexing="ij"), -1).reshape(-1, 2 * n)
        c2_grid = (mesh[:, :n] + 1j * mesh[:, n:])[:, None, :]
    G = c2_grid.shape[0]
    grid_size = G * beta_steps
    if grid_size > budget:
        raise ValueError(f"grid of {grid_size} discs exceeds the budget {budget}")
    ev = BoundaryEvaluator(dom, degree, cfg)
    evaluated = 0
    for i in range(beta_steps, 0, -1):
        beta = R * i / beta_steps
        c1 = np.broadcast_to(beta * zhat, (G, 1, n))
        coeffs = np.concatenate([c1, c2_grid], axis=1)
        for s in range(0, G, chunk):
            block = coeffs[s:s + chunk]
            scores = ev.score(p, block)
            evaluated += block.shape[0]
            hits = np.flatnonzero(scores < 0)
            for h in hits:
                disc = AnalyticDisc(p, block[h])
                if disc_admissible(dom, disc, cfg):
                    return OracleResult(beta, disc, evaluated, grid_size)
    return OracleResult(0.0, None, evaluated, grid_size)
