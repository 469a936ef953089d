"""Truncated jets of real functions of ``(z, conj z, u, v)``.

Keys are ``(alpha, beta, i, j)`` for ``z^alpha conj(z)^beta u^i v^j``; the
``z``-block has ``n`` complex variables.  Coefficients are complex with the
Hermitian pairing ``c(alpha, beta, i, j) = conj(c(beta, alpha, i, j))`` so
that the jet is real-valued.  Every operation re-truncates to
``truncation_degree`` and drops coefficients below ``ZERO_TOL``.
"""
from __future__ import annotations

from typing import Dict, Iterable, Tuple

from .hermitian import HermitianPolynomial

ZERO_TOL = 1e-12
DEFAULT_TRUNCATION = 24

JetKey = Tuple[Tuple[int, ...], Tuple[int, ...], int, int]


def _deg(key: JetKey) -> int:
    a, b, i, j = key
    return sum(a) + sum(b) + i + j


class Jet:
    __slots__ = ("n", "terms", "truncation_degree")

    def __init__(self, n: int, terms: Dict[JetKey, complex] | None = None,
                 truncation_degree: int = DEFAULT_TRUNCATION):
        self.n = n
        self.truncation_degree = truncation_degree
        self.terms = {k: complex(c) for k, c in (terms or {}).items()
                      if abs(c) > ZERO_TOL and _deg(k) <= truncation_degree}

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n: int, truncation_degree: int = DEFAULT_TRUNCATION) -> "Jet":
        return cls(n, {}, truncation_degree)

    @classmethod
    def constant(cls, n: int, c: complex, truncation_degree: int = DEFAULT_TRUNCATION) -> "Jet":
        z = (0,) * n
        return cls(n, {(z, z, 0, 0): c}, truncation_degree)

    @classmethod
    def uv(cls, n: int, i: int, j: int, c: float = 1.0,
           truncation_degree: int = DEFAULT_TRUNCATION) -> "Jet":
        z = (0,) * n
        return cls(n, {(z, z, i, j): c}, truncation_degree)

    @classmethod
    def from_z(cls, p: HermitianPolynomial, i: int = 0, j: int = 0,
               truncation_degree: int = DEFAULT_TRUNCATION) -> "Jet":
        """Embed a ``z``-polynomial, multiplied by ``u^i v^j``."""
        return cls(p.dimension, {(a, b, i, j): c for (a, b), c in p.terms.items()},
                   truncation_degree)

    @classmethod
    def from_hermitian(cls, rho: HermitianPolynomial,
                       truncation_degree: int = DEFAULT_TRUNCATION) -> "Jet":
        """Rewrite a polynomial in ``(z_1..z_n, t)`` with ``t = u + iv``."""
        n = rho.dimension - 1
        u = cls.uv(n, 1, 0, 1.0, truncation_degree)
        v = cls.uv(n, 0, 1, 1.0, truncation_degree)
        t = u + v * 1j
        tb = u - v * 1j
        cache_t = [cls.constant(n, 1.0, truncation_degree)]
        cache_tb = [cls.constant(n, 1.0, truncation_degree)]
        out = cls.zero(n, truncation_degree)
        for (a, b), c in rho.terms.items():
            while len(cache_t) <= a[-1]:
                cache_t.append(cache_t[-1] * t)
            while len(cache_tb) <= b[-1]:
                cache_tb.append(cache_tb[-1] * tb)
            zpart = cls(n, {(a[:-1], b[:-1], 0, 0): c}, truncation_degree)
            out = out + zpart * cache_t[a[-1]] * cache_tb[b[-1]]
        return out

    # -- structure ----------------------------------------------------------
    def __repr__(self):
        return f"Jet(n={self.n}, terms={len(self.terms)}, trunc={self.truncation_degree})"

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def allclose(self, other: "Jet", tol: float = 1e-10) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) <= tol for k in keys)

    def coefficient(self, i: int, j: int, alpha=None, beta=None) -> complex:
        z = (0,) * self.n
        return self.terms.get((alpha or z, beta or z, i, j), 0j)

    def z_coefficient(self, i: int, j: int) -> HermitianPolynomial:
        """The ``z``-polynomial multiplying ``u^i v^j``."""
        return HermitianPolynomial(self.n, {(a, b): c for (a, b, ii, jj), c in self.terms.items()
                                            if ii == i and jj == j}, max_degree=10 ** 6)

    def without(self, i: int, j: int) -> "Jet":
        return Jet(self.n, {k: c for k, c in self.terms.items() if (k[2], k[3]) != (i, j)},
                   self.truncation_degree)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        for (a, b, i, j), c in self.terms.items():
            if abs(c - self.terms.get((b, a, i, j), 0j).conjugate()) > tol:
                return False
        return True

    @property
    def degree(self) -> int:
        return max((_deg(k) for k in self.terms), default=-1)

    def truncate(self, degree: int) -> "Jet":
        return Jet(self.n, {k: c for k, c in self.terms.items() if _deg(k) <= degree},
                   min(degree, self.truncation_degree))

    # -- arithmetic ---------------------------------------------------------
    def _like(self, terms):
        return Jet(self.n, terms, self.truncation_degree)

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(self.n, other, self.truncation_degree)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return Jet(self.n, out, min(self.truncation_degree, other.truncation_degree))

    __radd__ = __add__

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self._like({k: c * other for k, c in self.terms.items()})
        T = min(self.truncation_degree, other.truncation_degree)
        out: Dict[JetKey, complex] = {}
        by_deg = sorted(other.terms.items(), key=lambda kv: _deg(kv[0]))
        for k1, c1 in self.terms.items():
            d1 = _deg(k1)
            a1, b1, i1, j1 = k1
            for k2, c2 in by_deg:
                if d1 + _deg(k2) > T:
                    break
                a2, b2, i2, j2 = k2
                k = (tuple(x + y for x, y in zip(a1, a2)),
                     tuple(x + y for x, y in zip(b1, b2)), i1 + i2, j1 + j2)
                out[k] = out.get(k, 0) + c1 * c2
        return Jet(self.n, out, T)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = Jet.constant(self.n, 1.0, self.truncation_degree)
        for _ in range(e):
            out = out * self
        return out

    def substitute(self, U: "Jet", V: "Jet") -> "Jet":
        """Replace ``u -> U`` and ``v -> V`` (``z`` unchanged), truncated."""
        T = min(self.truncation_degree, U.truncation_degree, V.truncation_degree)
        one = Jet.constant(self.n, 1.0, T)
        upow, vpow = [one], [one]
        groups: Dict[Tuple[int, int], Dict] = {}
        for (a, b, i, j), c in self.terms.items():
            groups.setdefault((i, j), {})[(a, b, 0, 0)] = c
        out = Jet.zero(self.n, T)
        for (i, j) in sorted(groups):
            while len(upow) <= i:
                upow.append(upow[-1] * U)
            while len(vpow) <= j:
                vpow.append(vpow[-1] * V)
            zj = Jet(self.n, groups[(i, j)], T)
            out = out + zj * (upow[i] * vpow[j])
        return out

    def to_hermitian(self) -> HermitianPolynomial:
        """Back to a polynomial in ``(z_1..z_n, t)`` with ``u = Re t``, ``v = Im t``."""
        dim = self.n + 1
        t = HermitianPolynomial.variable(dim, dim - 1)
        u = t.real_part()
        v = t.imag_part()
        out = HermitianPolynomial.zero(dim)
        upow, vpow = {0: HermitianPolynomial.constant(dim, 1.0)}, {0: HermitianPolynomial.constant(dim, 1.0)}
        for (a, b, i, j), c in self.terms.items():
            for cache, base, e in ((upow, u, i), (vpow, v, j)):
                while max(cache) < e:
                    cache[max(cache) + 1] = cache[max(cache)] * base
            z = HermitianPolynomial(dim, {(a + (0,), b + (0,)): c})
            out = out + z * upow[i] * vpow[j]
        return out.chop(ZERO_TOL)

    def items(self) -> Iterable:
        return self.terms.items()
