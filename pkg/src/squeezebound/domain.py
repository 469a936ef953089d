"""Defining functions, Levi forms, order of contact and the built-in domains."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .hermitian import (HermitianPolynomial, DimensionMismatch, MAX_DEGREE,
                        DegreeCapError, as_point)

FAMILIES = ("model", "herbort", "convex_control", "ball", "custom")
CERTIFIED_FAMILIES = ("model", "herbort")
IMAG_TOL = 1e-12


class DomainError(ValueError):
    """Invalid domain data or parameters."""


@dataclass(frozen=True)
class DomainSpec:
    """Bounded working domain ``{rho < 0} ∩ B(q, locality_radius)``.

    ``bounding_radius`` is a radius with the working domain inside the
    origin-centred ball of that radius.
    """
    rho: HermitianPolynomial
    boundary_point: np.ndarray
    locality_radius: float
    bounding_radius: float
    declared_k: Optional[int] = None
    declared_d: Optional[int] = None
    family_tag: str = "custom"
    params: dict = field(default_factory=dict)
    # (base rho, M, s) with rho(Z) = base(M Z + s): cheap evaluation of affine images
    pullback: Optional[tuple] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        q = as_point(self.boundary_point, self.rho.dimension)
        object.__setattr__(self, "boundary_point", q)
        if self.family_tag not in FAMILIES:
            raise DomainError(f"unknown family {self.family_tag!r}")
        if not self.locality_radius > 0 or not self.bounding_radius > 0:
            raise DomainError("radii must be positive")
        if self.rho.degree > MAX_DEGREE:
            raise DegreeCapError(f"defining function degree {self.rho.degree} > {MAX_DEGREE}")
        if not self.rho.is_hermitian():
            raise DomainError("defining function is not real-valued")
        val = evaluate(self.rho, q)
        if abs(val) > 1e-12:
            raise DomainError(f"rho(q) = {val:.3e}, boundary point not on the boundary")
        if np.allclose(wirtinger_gradient(self.rho, q), 0, atol=1e-14, rtol=0):
            raise DomainError("gradient of rho vanishes at the boundary point")
        if self.declared_k is not None and self.declared_d is not None:
            if self.declared_d != 2 * self.declared_k:
                raise DomainError("declared d must equal 2k")

    @property
    def dimension(self) -> int:
        return self.rho.dimension

    @property
    def q(self) -> np.ndarray:
        return self.boundary_point

    def contains(self, p: Sequence[complex]) -> bool:
        p = as_point(p, self.dimension)
        return (evaluate(self.rho, p) < 0
                and float(np.linalg.norm(p - self.q)) < self.locality_radius)

    def with_locality(self, radius: float) -> "DomainSpec":
        return replace(self, locality_radius=radius,
                       bounding_radius=min(self.bounding_radius,
                                           float(np.linalg.norm(self.q)) + radius))

    def rho_values(self, points: np.ndarray) -> np.ndarray:
        """Real values of ``rho`` at an array of points (trailing axis = dimension)."""
        if self.pullback is None:
            return self.rho.evaluate_many(points).real
        base, M, shift = self.pullback
        return base.evaluate_many(np.asarray(points, dtype=complex) @ M.T + shift).real

    def point_at_depth(self, delta: float) -> np.ndarray:
        """``q + (0, .., 0, -delta)``: inner normal offset along Re of the last coordinate."""
        p = self.q.copy()
        p[-1] -= delta
        return p


# -- pointwise operations ------------------------------------------------------

def evaluate(rho: HermitianPolynomial, p: Sequence[complex]) -> float:
    p = as_point(p, rho.dimension)
    return float(rho(p).real)


def wirtinger_gradient(rho: HermitianPolynomial, p: Sequence[complex]) -> np.ndarray:
    """``(d rho / d z_j)(p)`` for each coordinate."""
    p = as_point(p, rho.dimension)
    return np.array([rho.d_dz(j)(p) for j in range(rho.dimension)], dtype=complex)


def levi_matrix_at(rho: HermitianPolynomial, p: Sequence[complex]) -> np.ndarray:
    p = as_point(p, rho.dimension)
    n = rho.dimension
    H = np.empty((n, n), dtype=complex)
    for j in range(n):
        dj = rho.d_dz(j)
        for k in range(n):
            H[j, k] = dj.d_dzbar(k)(p)
    return H


def levi_form(rho: HermitianPolynomial, point: Sequence[complex],
              sigma: Sequence[complex]) -> float:
    """``sum_{j,k} rho_{j kbar}(point) sigma_j conj(sigma_k)``."""
    s = as_point(sigma, rho.dimension)
    if not np.any(s):
        raise ValueError("tangent vector must be nonzero")
    H = levi_matrix_at(rho, point)
    val = complex(s @ H @ np.conj(s))
    if abs(val.imag) > 1e-9 * max(1.0, abs(val.real)):
        raise DomainError("Levi form not real: defining function is not Hermitian")
    return val.real


def complex_tangent_complete(rho: HermitianPolynomial, point: Sequence[complex],
                             xi: Sequence[complex]) -> np.ndarray:
    """Extend ``xi`` (first n-1 components) to a complex tangent vector.

    Solves ``sum_j rho_j xi_j + rho_t lam = 0`` for the last component.
    """
    grad = wirtinger_gradient(rho, point)
    xi = np.asarray(xi, dtype=complex)
    if xi.shape[0] != rho.dimension - 1:
        raise DimensionMismatch("partial tangent must have n-1 components")
    if grad[-1] == 0:
        raise DomainError("degenerate normal derivative: d rho / d t vanishes")
    lam = -(grad[:-1] @ xi) / grad[-1]
    return np.concatenate([xi, [lam]])


def restrict_to_line(rho: HermitianPolynomial, base: Sequence[complex],
                     direction: Sequence[complex]) -> HermitianPolynomial:
    """``tau -> rho(base + tau * direction)`` as a polynomial in ``tau, conj(tau)``."""
    base = as_point(base, rho.dimension)
    d = as_point(direction, rho.dimension)
    tau = HermitianPolynomial.variable(1, 0)
    maps = [HermitianPolynomial.constant(1, base[j]) + tau * d[j] for j in range(rho.dimension)]
    return rho.compose(maps)


def order_of_contact_along(rho: HermitianPolynomial, direction: Sequence[complex],
                           q: Sequence[complex] | None = None) -> float:
    """Lowest total degree in ``(tau, conj tau)`` of ``rho(q + tau*direction)``.

    Returns ``math.inf`` when the restriction vanishes identically.
    """
    d = as_point(direction, rho.dimension)
    if not np.any(d):
        raise ValueError("direction must be nonzero")
    if q is None:
        q = np.zeros(rho.dimension, dtype=complex)
    line = restrict_to_line(rho, q, d)
    scale = max(1.0, rho.coefficient_sup()) * max(1.0, float(np.abs(d).max())) ** max(rho.degree, 0)
    line = line.chop(1e-12 * scale)
    return line.min_degree


# -- built-in domains ------------------------------------------------------------

def _re_t(n: int = 3) -> HermitianPolynomial:
    return HermitianPolynomial.variable(n, n - 1).real_part()


def _monomial_abs(n: int, exps: Sequence[int], c: float = 1.0) -> HermitianPolynomial:
    """``c * prod |z_j|^(2 exps_j)``."""
    e = tuple(exps)
    return HermitianPolynomial(n, {(e, e): c})


def model_rho(k: int, m: int, a: int, b: int) -> HermitianPolynomial:
    return (_re_t() + _monomial_abs(3, (a, b, 0)) + _monomial_abs(3, (m, 0, 0))
            + _monomial_abs(3, (0, m, 0)))


def builtin(family_tag: str, **params) -> DomainSpec:
    """Construct one of the built-in domains.

    ``model``: ``Re t + |z^a w^b|^2 + |z|^(2m) + |w|^(2m)`` (``k = a + b``);
    ``herbort``: ``Re t + |z|^12 + |w|^12 + |z|^2|w|^4 + |z|^6|w|^2``;
    ``convex_control``: ``|t|^2 + |z|^2 + |w|^6 - 1`` at ``q = (0, 0, 1)``;
    ``ball``: ``|z|^2 + |w|^2 + |t|^2 - r^2`` at ``q = (0, 0, r)``.
    """
    tag = family_tag.replace("-", "_")
    loc = params.pop("locality_radius", None)
    if tag == "model":
        k = int(params.pop("k", 2))
        if k < 2:
            raise DomainError("model family needs k >= 2 (no admissible P exists for k = 1)")
        m = int(params.pop("m", 2 * k + 1))
        a = params.pop("a", None)
        b = params.pop("b", None)
        if a is None and b is None:
            a = k // 2
            b = k - a
        elif a is None:
            a = k - int(b)
        elif b is None:
            b = k - int(a)
        a, b = int(a), int(b)
        if a < 1 or b < 1 or a + b != k:
            raise DomainError(f"split (a, b) = ({a}, {b}) must satisfy a, b >= 1 and a + b = k")
        if 2 * m <= 4 * k:
            raise DomainError(f"axis exponent 2m = {2 * m} must exceed 4k = {4 * k}")
        if 2 * m > MAX_DEGREE:
            raise DegreeCapError(f"axis exponent 2m = {2 * m} exceeds degree cap {MAX_DEGREE}")
        loc = 0.5 if loc is None else float(loc)
        rho = model_rho(k, m, a, b)
        spec = DomainSpec(rho, np.zeros(3, complex), loc, loc, k, 2 * k, "model",
                          {"k": k, "m": m, "a": a, "b": b, "locality_radius": loc})
    elif tag == "herbort":
        loc = 0.5 if loc is None else float(loc)
        rho = (_re_t() + _monomial_abs(3, (6, 0, 0)) + _monomial_abs(3, (0, 6, 0))
               + _monomial_abs(3, (1, 2, 0)) + _monomial_abs(3, (3, 1, 0)))
        spec = DomainSpec(rho, np.zeros(3, complex), loc, loc, 3, 6, "herbort",
                          {"locality_radius": loc})
    elif tag == "convex_control":
        loc = 0.5 if loc is None else float(loc)
        rho = (_monomial_abs(3, (0, 0, 1)) + _monomial_abs(3, (1, 0, 0))
               + _monomial_abs(3, (0, 3, 0)) - 1.0)
        q = np.array([0, 0, 1], complex)
        spec = DomainSpec(rho, q, loc, 1.0 + loc, 1, 2, "convex_control",
                          {"locality_radius": loc})
    elif tag == "ball":
        r = float(params.pop("r", 1.0))
        if not r > 0:
            raise DomainError("ball radius must be positive")
        loc = 3.0 * r if loc is None else float(loc)
        rho = HermitianPolynomial.norm_squared(3) - r * r
        q = np.array([0, 0, r], complex)
        spec = DomainSpec(rho, q, loc, min(r, r + loc), 1, 2, "ball",
                          {"r": r, "locality_radius": loc})
    else:
        raise DomainError(f"unknown built-in family {family_tag!r}")
    if params:
        raise DomainError(f"unused parameters for {tag}: {sorted(params)}")
    return spec


def custom(rho: HermitianPolynomial, q: Sequence[complex], locality_radius: float,
           bounding_radius: float | None = None, k: int | None = None,
           d: int | None = None) -> DomainSpec:
    q = as_point(q, rho.dimension)
    if bounding_radius is None:
        bounding_radius = float(np.linalg.norm(q)) + locality_radius
    if d is None and k is not None:
        d = 2 * k
    if k is None and d is not None:
        k = d // 2
    return DomainSpec(rho, q, locality_radius, bounding_radius, k, d, "custom")


def transform_affine(dom: DomainSpec, unitary: np.ndarray, shift: Sequence[complex]) -> DomainSpec:
    """Image of the domain under ``Z -> U Z + b`` with ``U`` unitary."""
    U = np.asarray(unitary, dtype=complex)
    b = as_point(shift, dom.dimension)
    if not np.allclose(U.conj().T @ U, np.eye(dom.dimension), atol=1e-12):
        raise DomainError("matrix is not unitary")
    Uinv = U.conj().T
    # rho'(Z) = rho(U^* (Z - b))
    rho = dom.rho.compose_affine(Uinv, -(Uinv @ b)).chop(1e-13)
    q = U @ dom.q + b
    base, M0, s0 = dom.pullback or (dom.rho, np.eye(dom.dimension, dtype=complex),
                                    np.zeros(dom.dimension, complex))
    pullback = (base, M0 @ Uinv, s0 - M0 @ (Uinv @ b))
    return replace(dom, rho=rho, boundary_point=q, pullback=pullback,
                   bounding_radius=dom.bounding_radius + float(np.linalg.norm(b)),
                   family_tag="custom",
                   params={**dom.params, "transformed_from": dom.family_tag})


def axis_restriction(dom: DomainSpec, axis: int) -> HermitianPolynomial:
    """The part of ``rho`` depending only on coordinate ``axis`` (other coordinates zero)."""
    keep = {}
    for (a, b), c in dom.rho.terms.items():
        if all(a[j] == 0 and b[j] == 0 for j in range(dom.dimension) if j != axis):
            keep[(a, b)] = c
    return HermitianPolynomial(dom.dimension, keep)


def leading_part(dom: DomainSpec) -> HermitianPolynomial:
    """Lowest homogeneous part of the t-independent terms of ``rho``."""
    n = dom.dimension
    zpart = HermitianPolynomial(n, {k: c for k, c in dom.rho.terms.items()
                                    if k[0][n - 1] == 0 and k[1][n - 1] == 0})
    zpart = zpart - HermitianPolynomial.constant(n, zpart.coefficient((0,) * n, (0,) * n))
    if not zpart:
        return zpart
    return zpart.homogeneous_part(int(zpart.min_degree))


def has_positive_terms(p: HermitianPolynomial) -> bool:
    """True when ``p`` is a positive combination of ``|monomial|^2`` terms."""
    return bool(p.terms) and all(a == b and c.real > 0 and c.imag == 0
                                 for (a, b), c in p.terms.items())
