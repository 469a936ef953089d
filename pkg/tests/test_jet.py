import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from squeezebound.hermitian import HermitianPolynomial as HP
from squeezebound.jet import Jet

z, zb, w, wb, u, v = sp.symbols("z zb w wb u v")


def jet_to_sympy(j: Jet):
    expr = 0
    for (a, b, i, k), c in j.terms.items():
        coef = sp.nsimplify(c.real) + sp.I * sp.nsimplify(c.imag)
        expr += coef * z ** a[0] * w ** a[1] * zb ** b[0] * wb ** b[1] * u ** i * v ** k
    return sp.expand(expr)


def truncate_sympy(expr, T):
    poly = sp.Poly(sp.expand(expr), z, w, zb, wb, u, v)
    return sum((c * sp.Mul(*[s ** e for s, e in zip((z, w, zb, wb, u, v), m)])
                for m, c in poly.terms() if sum(m) <= T), sp.Integer(0))


def assert_same(j: Jet, expr, tol=1e-10):
    diff = sp.expand(jet_to_sympy(j) - expr)
    if diff == 0:
        return
    coeffs = sp.Poly(diff, z, w, zb, wb, u, v).coeffs()
    assert max(abs(complex(c)) for c in coeffs) <= tol


@st.composite
def jets(draw, T=8, max_terms=4, max_deg=3):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        a = (draw(st.integers(0, max_deg)), draw(st.integers(0, max_deg)))
        b = (draw(st.integers(0, max_deg)), draw(st.integers(0, max_deg)))
        i, k = draw(st.integers(0, 2)), draw(st.integers(0, 2))
        terms[(a, b, i, k)] = draw(st.integers(-3, 3)) + 0.5 * draw(st.integers(-2, 2))
    return Jet(2, terms, T)


def test_from_hermitian_matches_sympy(model):
    j = Jet.from_hermitian(model.rho, 12)
    t, tb = u + sp.I * v, u - sp.I * v
    want = sp.expand((t + tb) / 2 + z * zb * w * wb + (z * zb) ** 5 + (w * wb) ** 5)
    assert_same(j, truncate_sympy(want, 12))


def test_from_hermitian_with_t_powers():
    rho = HP.abs_power(3, 2, 2) + HP.monomial(3, (1, 0, 2), (0, 0, 0), 0.5 + 0.25j)
    rho = rho + rho.conj()
    j = Jet.from_hermitian(rho, 10)
    t, tb = u + sp.I * v, u - sp.I * v
    c = sp.Rational(1, 2) + sp.I / 4
    want = 2 * (t * tb) ** 2 + c * z * t ** 2 + sp.conjugate(c) * zb * tb ** 2
    assert_same(j, sp.expand(want))
    assert j.is_hermitian()
    assert (j.to_hermitian() - rho).is_zero(1e-12)


@given(jets(), jets())
@settings(max_examples=40, deadline=None)
def test_product_matches_sympy_truncated(a, b):
    assert_same(a * b, truncate_sympy(jet_to_sympy(a) * jet_to_sympy(b), 8))


@given(jets(T=12), jets(T=12), jets(T=12))
@settings(max_examples=30, deadline=None)
def test_product_associative(a, b, c):
    assert ((a * b) * c).allclose(a * (b * c), 1e-9)


@given(jets(T=24), jets(T=24))
@settings(max_examples=30, deadline=None)
def test_multiply_then_truncate_equals_truncate_then_multiply(a, b):
    assert (a * b).truncate(8).allclose(a.truncate(8) * b.truncate(8), 1e-9)


@given(jets(T=8, max_terms=3, max_deg=2))
@settings(max_examples=25, deadline=None)
def test_substitute_matches_sympy(a):
    U = Jet.uv(2, 1, 0, 1.0, 8) + Jet.uv(2, 2, 0, 0.5, 8) + Jet.from_z(HP.abs_power(2, 0, 1), 1, 0, 8)
    V = Jet.uv(2, 0, 1, 1.0, 8) - Jet.uv(2, 1, 1, 2.0, 8)
    got = a.substitute(U, V)
    want = jet_to_sympy(a).subs({u: jet_to_sympy(U), v: jet_to_sympy(V)}, simultaneous=True)
    assert_same(got, truncate_sympy(want, 8))


@given(jets(T=10, max_terms=3, max_deg=2))
@settings(max_examples=20, deadline=None)
def test_substitution_composes(a):
    T = 10
    u1, v1 = Jet.uv(2, 1, 0, 1.0, T), Jet.uv(2, 0, 1, 1.0, T)
    U1, V1 = u1 + Jet.uv(2, 0, 2, 0.3, T), v1 + Jet.uv(2, 1, 1, -0.7, T)
    U2, V2 = u1 - Jet.uv(2, 2, 0, 0.4, T), v1 + Jet.from_z(HP.variable(2, 0), 1, 0, T)
    # (a o S1) o S2 == a o (S1 o S2)
    lhs = a.substitute(U1, V1).substitute(U2, V2)
    rhs = a.substitute(U1.substitute(U2, V2), V1.substitute(U2, V2))
    assert lhs.allclose(rhs, 1e-9)


def test_truncation_drops_high_degrees():
    j = Jet.uv(1, 3, 0, 1.0, 4) * Jet.uv(1, 2, 0, 1.0, 4)
    assert not j.terms
    assert Jet.uv(1, 5, 0, 1.0, 4).terms == {}
