import numpy as np
import pytest
import sympy as sp

from squeezebound.domain import builtin
from squeezebound.hermitian import HermitianPolynomial as HP
from squeezebound.jet import Jet
from squeezebound.normal_form import (NORMALIZED, VIOLATION, NormalFormError, check_normal_shape,
                                      detect_model_type, eliminate_uA, homogeneous_parts,
                                      is_pluriharmonic, jet_from_domain, pluriharmonic_companion,
                                      quadratic_normalize, reduce_to_normal_form, replay, u_linear_part)

Z0 = (0, 0)


def zpoly(terms):
    return HP(2, terms)


def abs2(i, j):
    """``|z|^(2i) |w|^(2j)``."""
    return zpoly({((i, j), (i, j)): 1.0})


def re_mono(a, c=1.0):
    return zpoly({(a, Z0): c / 2, (Z0, a): np.conj(c) / 2})


def base_jet(P=None, T=12):
    P = abs2(1, 1) if P is None else P
    return Jet(2, {(Z0, Z0, 1, 0): 1, (Z0, Z0, 2, 0): 1, (Z0, Z0, 0, 2): 1}, T) + Jet.from_z(P, 0, 0, T)


# -- helpers ----------------------------------------------------------------------

def test_homogeneous_parts():
    p = abs2(1, 0) + re_mono((3, 0))
    assert [q.degree for q in homogeneous_parts(p)] == [2, 3]
    assert homogeneous_parts(zpoly({})) == []
    herb = builtin("herbort")
    P = HP(3, {k: c for k, c in herb.rho.terms.items() if k[0][2] == 0 and k[1][2] == 0})
    assert [q.degree for q in homogeneous_parts(P)] == [6, 8, 12]


def test_is_pluriharmonic():
    assert is_pluriharmonic(re_mono((3, 0)))
    assert not is_pluriharmonic(abs2(1, 0))
    im_zw = zpoly({((1, 1), Z0): -0.5j, (Z0, (1, 1)): 0.5j})
    assert is_pluriharmonic(im_zw)


def test_companion_examples():
    c = 0.7
    assert pluriharmonic_companion(zpoly({(Z0, Z0): c})) == zpoly({(Z0, Z0): -1j * c})
    im_z2 = zpoly({((2, 0), Z0): -0.5j, (Z0, (2, 0)): 0.5j})
    F = pluriharmonic_companion(im_z2)
    assert (F - zpoly({((2, 0), Z0): -1.0})).is_zero(1e-15)
    F = pluriharmonic_companion(re_mono((1, 0)))
    assert (F - zpoly({((1, 0), Z0): -1j})).is_zero(1e-15)
    with pytest.raises(NormalFormError):
        pluriharmonic_companion(abs2(1, 0))


def test_companion_random(rng):
    for _ in range(100):
        h = {}
        for _ in range(4):
            a = tuple(int(x) for x in rng.integers(0, 4, size=2))
            if a != Z0:
                h[(a, Z0)] = complex(rng.normal(), rng.normal())
        hp = zpoly(h)
        B = (hp + hp.conj()) * 0.5 + rng.normal()
        F = pluriharmonic_companion(B)
        assert F.is_holomorphic()
        assert (F.imag_part() + B).is_zero(1e-12)


# -- quadratic normalisation and u*A elimination ----------------------------------------

def test_quadratic_normalize_fixed_point():
    j = base_jet()
    log = []
    assert quadratic_normalize(j, log) == j
    assert log == []


def _oracle_quadratic(a, b, c):
    """Independent sympy computation of the two-step normalisation."""
    u_, v_ = sp.symbols("u v", real=True)
    f = u_ + a * u_ ** 2 + b * u_ * v_ + c * v_ ** 2
    e = 2 - (a + c)
    f = sp.expand(f * (1 + e * u_))
    a1 = f.coeff(u_, 2).subs(v_, 0)
    d = (1 - a1) + sp.I * sp.Rational(b) / 2
    t = u_ + sp.I * v_
    tn = sp.expand(t + d * t ** 2)
    f = sp.expand(f.subs({u_: sp.re(tn), v_: sp.im(tn)}, simultaneous=True))
    p = sp.Poly(f, u_, v_)
    return [p.coeff_monomial(m) for m in (u_ ** 2, u_ * v_, v_ ** 2)]


def test_quadratic_normalize_example():
    j = Jet(2, {(Z0, Z0, 1, 0): 1, (Z0, Z0, 2, 0): 2, (Z0, Z0, 0, 2): 3, (Z0, Z0, 1, 1): 1}, 8)
    j = j + Jet.from_z(abs2(2, 0), 0, 0, 8)
    out = quadratic_normalize(j)
    got = [out.coefficient(2, 0), out.coefficient(1, 1), out.coefficient(0, 2)]
    np.testing.assert_allclose(got, [1, 0, 1], atol=1e-12)
    np.testing.assert_allclose(got, [complex(x) for x in _oracle_quadratic(2, 1, 3)], atol=1e-12)
    assert out.coefficient(1, 0) == 1
    assert out.z_coefficient(0, 0) == abs2(2, 0)


def test_quadratic_normalize_u_alone():
    out = quadratic_normalize(Jet.uv(2, 1, 0, 1.0, 6))
    got = [out.coefficient(2, 0), out.coefficient(1, 1), out.coefficient(0, 2)]
    np.testing.assert_allclose(got, [1, 0, 1], atol=1e-12)
    np.testing.assert_allclose(got, [complex(x) for x in _oracle_quadratic(0, 0, 0)], atol=1e-12)


def test_eliminate_uA():
    assert eliminate_uA(base_jet(P=abs2(2, 0)), 2) == base_jet(P=abs2(2, 0))
    j = base_jet(P=abs2(2, 0)) + Jet.from_z(re_mono((1, 0)), 1, 0, 12)
    out = eliminate_uA(j, 2)
    A = u_linear_part(out)
    assert A.filter_degree(1, 4).is_zero(1e-12)
    assert A.min_degree >= 5


def test_eliminate_uA_two_passes_quadruple_degree():
    j = base_jet(P=abs2(2, 0), T=16) + Jet.from_z(re_mono((1, 0)), 1, 0, 16)
    log = []
    out = eliminate_uA(j, 2, log)
    assert len(log) <= 4
    after_two = replay(j, log[:2])
    assert u_linear_part(after_two).min_degree >= 4
    assert u_linear_part(out).min_degree >= 5


# -- full reduction -----------------------------------------------------------------------

def test_already_normal_is_unchanged():
    j = base_jet()
    res = reduce_to_normal_form(j, 2)
    assert res.status == NORMALIZED
    assert res.jet == j
    assert res.R.is_zero()
    assert res.transform_log == []


def test_absorption_example():
    j = base_jet(T=16) + Jet.from_z(re_mono((1, 0)), 0, 1, 16)
    res = reduce_to_normal_form(j, 2)
    assert res.status == NORMALIZED
    assert any(e["kind"] == "absorb" for e in res.transform_log)
    assert res.R.min_degree >= 3
    assert check_normal_shape(res) == []
    assert replay(j, res.transform_log) == res.jet


def test_violation_example():
    j = base_jet() + Jet.from_z(abs2(1, 0), 0, 1, 12)
    res = reduce_to_normal_form(j, 2)
    assert res.status == VIOLATION
    assert res.violation == abs2(1, 0)


def test_invalid_leading_parts():
    with pytest.raises(NormalFormError):
        reduce_to_normal_form(base_jet(P=re_mono((2, 2))), 2)
    with pytest.raises(NormalFormError):
        reduce_to_normal_form(base_jet(P=abs2(1, 1) * -1.0), 2)
    with pytest.raises(NormalFormError):
        reduce_to_normal_form(base_jet(P=abs2(2, 0)), 1)


def test_detect_model_type():
    assert detect_model_type(reduce_to_normal_form(jet_from_domain(builtin("model", k=2), 12))) == 4
    assert detect_model_type(reduce_to_normal_form(jet_from_domain(builtin("herbort"), 14))) == 6
    assert detect_model_type(reduce_to_normal_form(jet_from_domain(builtin("ball"), 8))) == 2


def random_jet(rng, T=10):
    """A random jet in normal shape, pushed through random equivalences.

    Multiplying by a unit and substituting ``t -> t (1 + F(z))`` preserve the
    domain up to biholomorphism, so the reduction must succeed on the result.
    """
    j = base_jet(P=abs2(1, 1) * rng.uniform(0.5, 2) + abs2(2, 0) * rng.uniform(0, 1), T=T)
    for _ in range(2):
        a = (int(rng.integers(0, 3)), int(rng.integers(0, 3)))
        if sum(a) >= 3:
            j = j + Jet.from_z(zpoly({(a, (1, 1)): 0.2, ((1, 1), a): 0.2}), 0, 0, T)
    log = []
    for _ in range(3):
        a = (int(rng.integers(0, 2)), int(rng.integers(0, 2)))
        if a == Z0:
            a = (1, 0)
        c = complex(rng.normal(), rng.normal()) * 0.3
        kind = rng.integers(3)
        if kind == 0:
            log.append({"kind": "multiply_z_unit", "A": re_mono(a, c)})
        elif kind == 1:
            log.append({"kind": "absorb", "F": zpoly({(a, Z0): c})})
        else:
            log.append({"kind": "multiply_unit_u", "e": float(rng.normal())})
    return replay(j, log)


def test_idempotent_on_random_normalized_jets(rng):
    count = 0
    for _ in range(50):
        j = random_jet(rng)
        res = reduce_to_normal_form(j, 2)
        assert res.status == NORMALIZED
        again = reduce_to_normal_form(res.jet, 2)
        assert again.jet == res.jet
        assert again.transform_log == []
        assert replay(j, res.transform_log) == res.jet
        assert check_normal_shape(res) == []
        count += 1
    assert count == 50
