"""Polynomials in complex coordinates and their conjugates.

A term is stored as ``(alpha, beta) -> c`` meaning ``c * z**alpha * conj(z)**beta``
with multi-indices over the ambient coordinates.  Real-valued (Hermitian)
polynomials satisfy ``c[alpha, beta] == conj(c[beta, alpha])``.
"""
from __future__ import annotations

import math
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

MAX_DEGREE = 24
HERMITIAN_TOL = 1e-12

MultiIndex = Tuple[int, ...]
Key = Tuple[MultiIndex, MultiIndex]


class DegreeCapError(ValueError):
    """A polynomial term exceeds the supported total degree."""


class DimensionMismatch(ValueError):
    pass


def _add_idx(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


class HermitianPolynomial:
    """Sparse polynomial in ``z_1..z_n`` and ``conj(z_1)..conj(z_n)``.

    Despite the name, non-real polynomials (e.g. holomorphic ones) are allowed;
    :meth:`is_hermitian` tells the two apart.  Instances are treated as
    immutable.
    """

    __slots__ = ("dimension", "terms", "max_degree", "_packed")

    def __init__(self, dimension: int, terms: Mapping[Key, complex] | None = None,
                 max_degree: int = MAX_DEGREE):
        self.dimension = int(dimension)
        self.max_degree = max_degree
        clean: Dict[Key, complex] = {}
        for (a, b), c in (terms or {}).items():
            a, b = tuple(int(x) for x in a), tuple(int(x) for x in b)
            if len(a) != self.dimension or len(b) != self.dimension:
                raise DimensionMismatch(f"multi-index length != {self.dimension}")
            if min(a + b, default=0) < 0:
                raise ValueError("negative exponent")
            c = complex(c)
            if c == 0:
                continue
            if sum(a) + sum(b) > max_degree:
                raise DegreeCapError(
                    f"term of degree {sum(a) + sum(b)} exceeds cap {max_degree}")
            clean[(a, b)] = clean.get((a, b), 0) + c
        self.terms = {k: c for k, c in clean.items() if c != 0}
        self._packed = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, dimension: int) -> "HermitianPolynomial":
        return cls(dimension)

    @classmethod
    def constant(cls, dimension: int, c: complex) -> "HermitianPolynomial":
        z = (0,) * dimension
        return cls(dimension, {(z, z): c})

    @classmethod
    def monomial(cls, dimension: int, alpha: Sequence[int], beta: Sequence[int],
                 c: complex = 1.0) -> "HermitianPolynomial":
        return cls(dimension, {(tuple(alpha), tuple(beta)): c})

    @classmethod
    def variable(cls, dimension: int, j: int, conjugate: bool = False) -> "HermitianPolynomial":
        e = tuple(1 if i == j else 0 for i in range(dimension))
        z = (0,) * dimension
        return cls(dimension, {(z, e) if conjugate else (e, z): 1.0})

    @classmethod
    def abs_power(cls, dimension: int, j: int, m: int, c: float = 1.0) -> "HermitianPolynomial":
        """``c * |z_j|^(2m)``."""
        e = tuple(m if i == j else 0 for i in range(dimension))
        return cls(dimension, {(e, e): c})

    @classmethod
    def norm_squared(cls, dimension: int) -> "HermitianPolynomial":
        out = cls.zero(dimension)
        for j in range(dimension):
            out = out + cls.abs_power(dimension, j, 1)
        return out

    # -- basic structure ----------------------------------------------------
    def __repr__(self) -> str:
        return f"HermitianPolynomial(dim={self.dimension}, terms={len(self.terms)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, HermitianPolynomial):
            return NotImplemented
        return self.dimension == other.dimension and self.terms == other.terms

    def __hash__(self):
        return hash((self.dimension, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    @property
    def degree(self) -> int:
        """Highest total degree (-1 for the zero polynomial)."""
        return max((sum(a) + sum(b) for a, b in self.terms), default=-1)

    @property
    def min_degree(self) -> float:
        """Lowest total degree of a nonzero term (``inf`` for zero)."""
        return min((sum(a) + sum(b) for a, b in self.terms), default=math.inf)

    def coefficient(self, alpha: Sequence[int], beta: Sequence[int]) -> complex:
        return self.terms.get((tuple(alpha), tuple(beta)), 0j)

    def chop(self, tol: float = HERMITIAN_TOL) -> "HermitianPolynomial":
        return HermitianPolynomial(
            self.dimension, {k: c for k, c in self.terms.items() if abs(c) > tol},
            self.max_degree)

    def homogeneous_part(self, s: int) -> "HermitianPolynomial":
        return HermitianPolynomial(
            self.dimension,
            {k: c for k, c in self.terms.items() if sum(k[0]) + sum(k[1]) == s},
            self.max_degree)

    def filter_degree(self, lo: float = 0, hi: float = math.inf) -> "HermitianPolynomial":
        return HermitianPolynomial(
            self.dimension,
            {k: c for k, c in self.terms.items() if lo <= sum(k[0]) + sum(k[1]) <= hi},
            self.max_degree)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        for (a, b), c in self.terms.items():
            if abs(c - self.terms.get((b, a), 0j).conjugate()) > tol:
                return False
        return True

    def is_holomorphic(self) -> bool:
        return all(not any(b) for _, b in self.terms)

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "HermitianPolynomial"):
        if other.dimension != self.dimension:
            raise DimensionMismatch(f"{self.dimension} vs {other.dimension}")

    def __add__(self, other):
        if not isinstance(other, HermitianPolynomial):
            other = HermitianPolynomial.constant(self.dimension, other)
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return HermitianPolynomial(self.dimension, out, max(self.max_degree, other.max_degree))

    __radd__ = __add__

    def __neg__(self):
        return HermitianPolynomial(self.dimension, {k: -c for k, c in self.terms.items()},
                                   self.max_degree)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, HermitianPolynomial):
            return HermitianPolynomial(self.dimension,
                                       {k: c * other for k, c in self.terms.items()},
                                       self.max_degree)
        self._check(other)
        cap = max(self.max_degree, other.max_degree)
        out: Dict[Key, complex] = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (_add_idx(a1, a2), _add_idx(b1, b2))
                out[k] = out.get(k, 0) + c1 * c2
        return HermitianPolynomial(self.dimension, out, cap)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (1.0 / other)

    def __pow__(self, n: int):
        out = HermitianPolynomial.constant(self.dimension, 1.0)
        for _ in range(n):
            out = out * self
        return out

    def conj(self) -> "HermitianPolynomial":
        return HermitianPolynomial(
            self.dimension, {(b, a): c.conjugate() for (a, b), c in self.terms.items()},
            self.max_degree)

    def real_part(self) -> "HermitianPolynomial":
        return (self + self.conj()) * 0.5

    def imag_part(self) -> "HermitianPolynomial":
        return (self - self.conj()) * (-0.5j)

    # -- Wirtinger calculus --------------------------------------------------
    def d_dz(self, j: int) -> "HermitianPolynomial":
        out = {}
        for (a, b), c in self.terms.items():
            if a[j]:
                a2 = a[:j] + (a[j] - 1,) + a[j + 1:]
                out[(a2, b)] = out.get((a2, b), 0) + c * a[j]
        return HermitianPolynomial(self.dimension, out, self.max_degree)

    def d_dzbar(self, j: int) -> "HermitianPolynomial":
        out = {}
        for (a, b), c in self.terms.items():
            if b[j]:
                b2 = b[:j] + (b[j] - 1,) + b[j + 1:]
                out[(a, b2)] = out.get((a, b2), 0) + c * b[j]
        return HermitianPolynomial(self.dimension, out, self.max_degree)

    def levi_matrix(self) -> list:
        """Mixed second derivatives ``H[j][k] = d^2 p / dz_j dconj(z_k)``."""
        n = self.dimension
        return [[self.d_dz(j).d_dzbar(k) for k in range(n)] for j in range(n)]

    # -- evaluation ---------------------------------------------------------
    def _pack(self):
        if self._packed is None:
            keys = list(self.terms)
            n = self.dimension
            A = np.array([k[0] for k in keys], dtype=np.int64).reshape(len(keys), n)
            B = np.array([k[1] for k in keys], dtype=np.int64).reshape(len(keys), n)
            C = np.array([self.terms[k] for k in keys], dtype=complex)
            emax = int(max(A.max(initial=0), B.max(initial=0)))
            self._packed = (A, B, C, emax)
        return self._packed

    def evaluate_many(self, points: np.ndarray) -> np.ndarray:
        """Complex values at an array of points with trailing axis = dimension."""
        Z = np.asarray(points, dtype=complex)
        if Z.shape[-1] != self.dimension:
            raise DimensionMismatch(f"point dimension {Z.shape[-1]} != {self.dimension}")
        lead = Z.shape[:-1]
        Z = Z.reshape(-1, self.dimension)
        A, B, C, emax = self._pack()
        if not len(C):
            return np.zeros(lead, dtype=complex)
        vals = np.ones((Z.shape[0], len(C)), dtype=complex)
        for j in range(self.dimension):
            aj, bj = A[:, j], B[:, j]
            if not (aj.any() or bj.any()):
                continue
            zj = Z[:, j]
            pw = np.ones((Z.shape[0], emax + 1), dtype=complex)
            for e in range(1, emax + 1):
                pw[:, e] = pw[:, e - 1] * zj
            vals *= pw[:, aj] * np.conj(pw[:, bj])
        return (vals @ C).reshape(lead)

    def __call__(self, point: Sequence[complex]) -> complex:
        return complex(self.evaluate_many(np.asarray(point, dtype=complex)[None, :])[0])

    def evaluate_real(self, points: np.ndarray) -> np.ndarray:
        return self.evaluate_many(points).real

    # -- composition ----------------------------------------------------------
    def compose(self, maps: Sequence["HermitianPolynomial"]) -> "HermitianPolynomial":
        """Substitute ``z_j -> maps[j]`` and ``conj(z_j) -> conj(maps[j])``.

        ``maps`` are polynomials in a common (possibly different) dimension;
        holomorphic maps give the pullback under a holomorphic change of
        variables.
        """
        if len(maps) != self.dimension:
            raise DimensionMismatch("need one map per variable")
        m = maps[0].dimension
        for f in maps:
            if f.dimension != m:
                raise DimensionMismatch("maps disagree on dimension")
        cap = max(self.max_degree, *(f.max_degree for f in maps))
        hol_cache: Dict[Tuple[int, int], HermitianPolynomial] = {}
        anti_cache: Dict[Tuple[int, int], HermitianPolynomial] = {}
        conj_maps = [f.conj() for f in maps]
        one = HermitianPolynomial.constant(m, 1.0)

        def power(cache, base, j, e):
            if e == 0:
                return one
            if (j, e) not in cache:
                cache[(j, e)] = power(cache, base, j, e - 1) * base[j]
            return cache[(j, e)]

        acc: Dict[Key, complex] = {}
        for (a, b), c in self.terms.items():
            term = HermitianPolynomial.constant(m, c)
            for j in range(self.dimension):
                if a[j]:
                    term = term * power(hol_cache, maps, j, a[j])
                if b[j]:
                    term = term * power(anti_cache, conj_maps, j, b[j])
            for k, v in term.terms.items():
                acc[k] = acc.get(k, 0) + v
        return HermitianPolynomial(m, acc, cap)

    def compose_affine(self, matrix: np.ndarray, shift: Sequence[complex]) -> "HermitianPolynomial":
        """Pullback under ``z -> matrix @ z + shift`` (complex affine)."""
        M = np.asarray(matrix, dtype=complex)
        n = self.dimension
        maps = []
        for j in range(n):
            f = HermitianPolynomial.constant(n, shift[j])
            for k in range(n):
                if M[j, k] != 0:
                    f = f + HermitianPolynomial.variable(n, k) * M[j, k]
            maps.append(f)
        return self.compose(maps)

    # -- misc -----------------------------------------------------------------
    def embed(self, dimension: int, positions: Sequence[int]) -> "HermitianPolynomial":
        """Re-express in a larger coordinate system, variable ``j -> positions[j]``."""
        out = {}
        for (a, b), c in self.terms.items():
            a2, b2 = [0] * dimension, [0] * dimension
            for j, p in enumerate(positions):
                a2[p], b2[p] = a[j], b[j]
            out[(tuple(a2), tuple(b2))] = c
        return HermitianPolynomial(dimension, out, self.max_degree)

    def coefficient_sup(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def sorted_terms(self) -> Iterable[Tuple[Key, complex]]:
        return sorted(self.terms.items(),
                      key=lambda kv: (sum(kv[0][0]) + sum(kv[0][1]), kv[0]))


def as_point(coords: Sequence[complex], dimension: int | None = None) -> np.ndarray:
    """Validate a point: finite complex entries, optional length check."""
    p = np.asarray(coords, dtype=complex).reshape(-1)
    if dimension is not None and p.shape[0] != dimension:
        raise DimensionMismatch(f"point has {p.shape[0]} coordinates, expected {dimension}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite coordinates")
    return p
