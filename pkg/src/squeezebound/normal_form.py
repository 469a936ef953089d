"""Reduction of a defining-function jet to the normal form

    u + P(z) + Q(z) + v R(z) + u^2 + v^2 + (higher order)

with ``P`` homogeneous of degree ``2k``, plurisubharmonic and not
pluriharmonic, ``deg Q >= 2k+1`` and ``deg R >= k+1``.

Every coordinate change or unit multiplication is appended to a transform
log; :func:`replay` re-applies a log to the starting jet and reproduces the
output bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .domain import DomainSpec, DomainError, wirtinger_gradient
from .hermitian import HermitianPolynomial
from .jet import Jet, ZERO_TOL, DEFAULT_TRUNCATION

NORMALIZED = "normalized"
VIOLATION = "pseudoconvexity_violation"


class NormalFormError(ValueError):
    pass


# -- z-polynomial helpers --------------------------------------------------------

def homogeneous_parts(p: HermitianPolynomial) -> List[HermitianPolynomial]:
    degrees = sorted({sum(a) + sum(b) for a, b in p.terms})
    return [p.homogeneous_part(s) for s in degrees]


def is_pluriharmonic(p: HermitianPolynomial, tol: float = ZERO_TOL) -> bool:
    n = p.dimension
    for i in range(n):
        di = p.d_dz(i)
        for j in range(n):
            if not di.d_dzbar(j).is_zero(tol):
                return False
    return True


def pluriharmonic_companion(b: HermitianPolynomial) -> HermitianPolynomial:
    """Holomorphic ``F`` with ``Im F = -b`` for a real pluriharmonic ``b``.

    Writing ``b = c0 + 2 Re h`` with ``h`` holomorphic and ``h(0) = 0`` gives
    ``F = -i (2h + c0)``.
    """
    if not is_pluriharmonic(b):
        raise NormalFormError("input is not pluriharmonic")
    if not b.is_hermitian():
        raise NormalFormError("input is not real-valued")
    n = b.dimension
    zero = (0,) * n
    F = {}
    for (a, bb), c in b.terms.items():
        if a == zero and bb == zero:
            F[(zero, zero)] = -1j * c.real
        elif bb == zero:
            F[(a, zero)] = -2j * c
    return HermitianPolynomial(n, F)


def is_plurisubharmonic(p: HermitianPolynomial, samples: int = 400, seed: int = 0,
                        tol: float = 1e-10) -> bool:
    """Sampled check that the Levi matrix of ``p`` is positive semidefinite
    on the unit polydisc."""
    n = p.dimension
    H = p.levi_matrix()
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(size=(samples, n)))
    pts = r * np.exp(2j * np.pi * rng.uniform(size=(samples, n)))
    M = np.empty((samples, n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            M[:, j, k] = H[j][k].evaluate_many(pts)
    M = 0.5 * (M + np.conj(np.swapaxes(M, 1, 2)))
    return bool(np.linalg.eigvalsh(M).min() >= -tol)


# -- log entries and primitive steps -------------------------------------------------

def _unit_u(j: Jet, e: float) -> Jet:
    return j * (Jet.constant(j.n, 1.0, j.truncation_degree) + Jet.uv(j.n, 1, 0, e, j.truncation_degree))


def _substitute_quadratic(j: Jet, d: complex) -> Jet:
    """``t -> t + d t^2``."""
    T, n = j.truncation_degree, j.n
    dr, di = d.real, d.imag
    u = Jet.uv(n, 1, 0, 1.0, T)
    v = Jet.uv(n, 0, 1, 1.0, T)
    u2, v2, uv = Jet.uv(n, 2, 0, 1.0, T), Jet.uv(n, 0, 2, 1.0, T), Jet.uv(n, 1, 1, 1.0, T)
    U = u + (u2 - v2) * dr - uv * (2 * di)
    V = v + (u2 - v2) * di + uv * (2 * dr)
    return j.substitute(U, V)


def _multiply_z_unit(j: Jet, A: HermitianPolynomial) -> Jet:
    """Multiply by ``1 - A(z)``."""
    return j * (Jet.constant(j.n, 1.0, j.truncation_degree) - Jet.from_z(A, 0, 0, j.truncation_degree))


def _inverse_series(F: HermitianPolynomial, degree: int) -> HermitianPolynomial:
    """``1 / (1 + F)`` truncated at ``degree`` for holomorphic ``F`` with ``F(0) = 0``."""
    n = F.dimension
    G = HermitianPolynomial.constant(n, 1.0)
    if F.is_zero():
        return G
    term = HermitianPolynomial.constant(n, 1.0)
    negF = -F
    for _ in range(int(degree // max(F.min_degree, 1))):
        term = HermitianPolynomial(n, (term * negF).filter_degree(0, degree).terms, max_degree=10 ** 6)
        if term.is_zero():
            break
        G = HermitianPolynomial(n, (G + term).terms, max_degree=10 ** 6)
    return G


def _absorb(j: Jet, F: HermitianPolynomial) -> Jet:
    """Coordinate change ``t_new = t (1 + F(z))``, i.e. substitute ``t -> t G`` with ``G = 1/(1+F)``."""
    T, n = j.truncation_degree, j.n
    G = _inverse_series(F, T)
    re_g = Jet.from_z(G.real_part(), 0, 0, T)
    im_g = Jet.from_z(G.imag_part(), 0, 0, T)
    u = Jet.uv(n, 1, 0, 1.0, T)
    v = Jet.uv(n, 0, 1, 1.0, T)
    U = u * re_g - v * im_g
    V = u * im_g + v * re_g
    return j.substitute(U, V)


def _apply(j: Jet, entry: dict) -> Jet:
    kind = entry["kind"]
    if kind == "multiply_unit_u":
        return _unit_u(j, entry["e"])
    if kind == "substitute_quadratic":
        return _substitute_quadratic(j, entry["d"])
    if kind == "multiply_z_unit":
        return _multiply_z_unit(j, entry["A"])
    if kind == "absorb":
        return _absorb(j, entry["F"])
    raise NormalFormError(f"unknown transformation {kind!r}")


def replay(j: Jet, log: List[dict]) -> Jet:
    for entry in log:
        j = _apply(j, entry)
    return j


def _record(j: Jet, log: Optional[list], entry: dict) -> Jet:
    out = _apply(j, entry)
    if log is not None:
        log.append(entry)
    return out


# -- reduction steps -------------------------------------------------------------

def _u_coefficient_ok(j: Jet) -> bool:
    return abs(j.coefficient(1, 0) - 1) <= ZERO_TOL


def quadratic_normalize(j: Jet, log: Optional[list] = None) -> Jet:
    """Make the ``(u^2, uv, v^2)`` coefficients ``(1, 0, 1)``.

    Multiplication by ``1 + e u`` fixes ``a + c = 2``; the substitution
    ``t -> t + d t^2`` then moves ``a - c`` and the ``uv`` coefficient.
    """
    if not _u_coefficient_ok(j):
        raise NormalFormError("coefficient of u must be 1")
    a = j.coefficient(2, 0).real
    b = j.coefficient(1, 1).real
    c = j.coefficient(0, 2).real
    e = 2.0 - (a + c)
    if abs(e) > ZERO_TOL:
        j = _record(j, log, {"kind": "multiply_unit_u", "e": e})
        a = j.coefficient(2, 0).real
    d = complex(1.0 - a, b / 2.0)
    if abs(d) > ZERO_TOL:
        j = _record(j, log, {"kind": "substitute_quadratic", "d": d})
    return j


def u_linear_part(j: Jet) -> HermitianPolynomial:
    """``A(z)``: the non-constant ``z``-coefficient of ``u``."""
    A = j.z_coefficient(1, 0)
    return A.filter_degree(1)


def eliminate_uA(j: Jet, k: int, log: Optional[list] = None) -> Jet:
    """Remove ``u * A(z)`` terms of ``z``-degree ``<= 2k`` by multiplying with ``1 - A``."""
    limit = math.ceil(math.log2(2 * k)) + 1
    passes = 0
    while True:
        A_low = u_linear_part(j).filter_degree(1, 2 * k)
        if A_low.is_zero():
            return j
        passes += 1
        if passes > limit:
            raise NormalFormError(f"u*A elimination did not terminate in {limit} passes")
        j = _record(j, log, {"kind": "multiply_z_unit", "A": A_low})


@dataclass
class NormalFormResult:
    jet: Jet
    P: HermitianPolynomial
    Q: HermitianPolynomial
    R: HermitianPolynomial
    k: int
    transform_log: List[dict] = field(default_factory=list)
    status: str = NORMALIZED
    violation: Optional[HermitianPolynomial] = None

    def degrees(self) -> dict:
        def deg(p):
            m = p.min_degree
            return None if m == math.inf else int(m)
        return {"P": deg(self.P), "Q": deg(self.Q), "R": deg(self.R)}


def _validate_leading(j: Jet, k: int) -> HermitianPolynomial:
    if abs(j.coefficient(0, 0)) > ZERO_TOL:
        raise NormalFormError("jet has a nonzero constant term")
    if abs(j.coefficient(0, 1)) > ZERO_TOL:
        raise NormalFormError("jet has a linear v term; rotate t first")
    if not _u_coefficient_ok(j):
        raise NormalFormError("coefficient of u must be 1")
    zpart = j.z_coefficient(0, 0)
    if zpart.is_zero():
        raise NormalFormError("P is zero")
    if zpart.min_degree != 2 * k:
        raise NormalFormError(f"lowest z-degree is {zpart.min_degree}, expected 2k = {2 * k}")
    P = zpart.homogeneous_part(2 * k)
    if is_pluriharmonic(P):
        raise NormalFormError("P is pluriharmonic")
    if not is_plurisubharmonic(P):
        raise NormalFormError("P is not plurisubharmonic")
    return P


def split_components(j: Jet, k: int):
    zpart = j.z_coefficient(0, 0)
    P = HermitianPolynomial(j.n, zpart.homogeneous_part(2 * k).terms)
    Q = HermitianPolynomial(j.n, zpart.filter_degree(2 * k + 1).terms, max_degree=10 ** 6)
    R = HermitianPolynomial(j.n, j.z_coefficient(0, 1).terms, max_degree=10 ** 6)
    return P, Q, R


def reduce_to_normal_form(j: Jet, k: int | None = None) -> NormalFormResult:
    """Run the full reduction; see the module docstring for the target shape."""
    if k is None:
        k = infer_k(j)
    _validate_leading(j, k)
    log: list = []
    j = quadratic_normalize(j, log)
    j = eliminate_uA(j, k, log)
    status, offending = NORMALIZED, None
    rounds = 0
    while True:
        B = j.z_coefficient(0, 1)
        if B.is_zero() or B.min_degree >= k + 1:
            break
        B_s = HermitianPolynomial(j.n, B.homogeneous_part(int(B.min_degree)).terms)
        if not is_pluriharmonic(B_s):
            status, offending = VIOLATION, B_s
            break
        rounds += 1
        if rounds > 4 * k:
            raise NormalFormError(f"absorption did not terminate in {4 * k} rounds")
        F = pluriharmonic_companion(B_s)
        j = _record(j, log, {"kind": "absorb", "F": F})
        j = quadratic_normalize(j, log)
        j = eliminate_uA(j, k, log)
    P, Q, R = split_components(j, k)
    return NormalFormResult(j, P, Q, R, k, log, status, offending)


def infer_k(j: Jet) -> int:
    zpart = j.z_coefficient(0, 0)
    if zpart.is_zero():
        raise NormalFormError("P is zero")
    d = int(zpart.min_degree)
    if d % 2:
        raise NormalFormError(f"lowest z-degree {d} is odd")
    return d // 2


def detect_model_type(result: NormalFormResult) -> int:
    if result.status != NORMALIZED:
        raise NormalFormError("model type needs a normalized result")
    d = result.P.min_degree
    if d == math.inf:
        raise NormalFormError("P is zero")
    d = int(d)
    if d % 2:
        raise NormalFormError(f"odd leading degree {d}: not pseudoconvex or invalid input")
    return d


def check_normal_shape(result: NormalFormResult, tol: float = 1e-10) -> List[str]:
    """List of violated shape constraints (empty when the result is in normal form)."""
    j, k = result.jet, result.k
    problems = []
    for (i, jj), want in (((1, 0), 1.0), ((2, 0), 1.0), ((0, 2), 1.0), ((1, 1), 0.0)):
        if abs(j.coefficient(i, jj) - want) > tol:
            problems.append(f"coefficient of u^{i} v^{jj} is {j.coefficient(i, jj)}, expected {want}")
    if not u_linear_part(j).filter_degree(1, 2 * k).is_zero():
        problems.append("u*A(z) terms of degree <= 2k remain")
    if result.P.min_degree != 2 * k or is_pluriharmonic(result.P):
        problems.append("P is not a non-pluriharmonic form of degree 2k")
    if result.Q.min_degree < 2 * k + 1:
        problems.append("deg Q < 2k+1")
    if result.R.min_degree < k + 1:
        problems.append("deg R < k+1")
    return problems


def jet_from_domain(dom: DomainSpec, truncation_degree: int = DEFAULT_TRUNCATION) -> Jet:
    """Jet of ``rho`` at ``q`` in coordinates where the linear part is ``u``.

    The ``z``-gradient must vanish at ``q`` (tangent plane ``t = const``);
    ``t`` is rotated and ``rho`` rescaled so that the linear term is exactly ``u``.
    """
    q = dom.q
    grad = wirtinger_gradient(dom.rho, q)
    if np.max(np.abs(grad[:-1])) > 1e-12:
        raise DomainError("tangent plane at q is not {t = const}; change coordinates first")
    g = grad[-1]
    omega = np.conj(g) / abs(g)
    n = dom.dimension
    M = np.eye(n, dtype=complex)
    M[-1, -1] = omega
    rho = dom.rho.compose_affine(M, q) * (1.0 / (2 * abs(g)))
    rho = rho.chop(ZERO_TOL)
    j = Jet.from_hermitian(rho, truncation_degree)
    # exact cleanup of the rounding in the constant and linear terms
    z = (0,) * (n - 1)
    terms = dict(j.terms)
    terms.pop((z, z, 0, 0), None)
    terms.pop((z, z, 0, 1), None)
    terms[(z, z, 1, 0)] = 1.0
    return Jet(j.n, terms, truncation_degree)
