import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from squeezebound.domain import builtin
from squeezebound.hermitian import HermitianPolynomial as HP
from squeezebound.specfile import (SpecParseError, format_rho, format_spec, load_spec, parse_rho,
                                   parse_spec)

MODEL_TEXT = """\
# model domain, k = 2
dim = 3
q = (0, 0, 0)
locality_radius = 0.5
rho = Re(t) + |z|^2*|w|^2 + |z|^10 + |w|^10
"""


def test_parse_model_text(model):
    dom = parse_spec(MODEL_TEXT)
    assert dom.rho == model.rho
    assert dom.locality_radius == 0.5
    assert dom.family_tag == "custom"


def test_parse_rho_factors():
    rho = parse_rho("2*Im(z^2*conj(w)) - 0.5*|t|^2 + Re(z)")
    z = np.array([0.3 + 0.1j, -0.2 + 0.4j, 0.7j])
    want = 2 * (z[0] ** 2 * np.conj(z[1])).imag - 0.5 * abs(z[2]) ** 2 + z[0].real
    assert rho(z) == pytest.approx(want, abs=1e-15)


@pytest.mark.parametrize("builtin_args", [("model", dict(k=2)), ("model", dict(k=3, a=2, b=1)),
                                          ("herbort", {}), ("ball", dict(r=2.0)),
                                          ("convex_control", {})])
def test_format_round_trip(builtin_args):
    name, params = builtin_args
    dom = builtin(name, **params)
    back = parse_spec(format_spec(dom))
    assert back.rho == dom.rho
    assert np.array_equal(back.q, dom.q)
    assert back.locality_radius == dom.locality_radius
    assert back.bounding_radius == dom.bounding_radius


coef = st.floats(-3, 3, allow_nan=False).filter(lambda x: abs(x) > 1e-3)


@given(st.lists(st.tuples(st.tuples(*[st.integers(0, 2)] * 3), st.tuples(*[st.integers(0, 2)] * 3),
                          coef, coef), min_size=1, max_size=5))
@settings(max_examples=60, deadline=None)
def test_random_real_polynomials_round_trip(items):
    terms = {}
    for a, b, x, y in items:
        c = complex(x, y) if a != b else complex(x, 0)
        terms[(a, b)] = terms.get((a, b), 0) + c
        if a != b:
            terms[(b, a)] = terms.get((b, a), 0) + c.conjugate()
    p = HP(3, terms)
    back = parse_rho(format_rho(p))
    assert (back - p).is_zero(1e-12)


def test_format_is_readable():
    assert format_rho(builtin("ball").rho) == "-1.0 + |t|^2 + |w|^2 + |z|^2"
    assert format_rho(builtin("model", k=2).rho) == "Re(t) + |z|^2*|w|^2 + |w|^10 + |z|^10"


@pytest.mark.parametrize("text,line,column", [
    ("dim = 3\nq = (0, 0, 0)\nlocality_radius = 0.5\nrho = Re(t) + |z|^3\n", 4, 19),
    ("dim = 3\nq = (0, 0)\nlocality_radius = 0.5\nrho = Re(t)\n", 2, None),
    ("dim = 3\nq = (0, 0, 0)\nlocality_radius = abc\nrho = Re(t)\n", 3, None),
    ("dim = 3\nq = (0, 0, 0)\nlocality_radius = 0.5\nrho = Re(t) + $\n", 4, None),
    ("dim = 2\nq = (0, 0, 0)\nlocality_radius = 0.5\nrho = Re(t)\n", 1, None),
    ("dim = 3\nq = (0, 0, 0)\nlocality_radius = 0.5\n", 4, 1),
    ("dim = 3\ndim = 3\n", 2, 1),
    ("dim = 3\nq = (0, 0, 0)\nlocality_radius = 0.5\nrho = Re(t)\ncolour = 3\n", 5, 1),
])
def test_errors_report_line_and_column(text, line, column):
    with pytest.raises(SpecParseError) as info:
        parse_spec(text)
    assert info.value.line == line
    if column is not None:
        assert info.value.column == column
    assert f"line {line}" in str(info.value)


def test_load_spec(tmp_path, model):
    path = tmp_path / "m.spec"
    path.write_text(MODEL_TEXT)
    assert load_spec(str(path)).rho == model.rho
