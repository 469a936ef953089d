import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from squeezebound.discs import (AnalyticDisc, DiscSearchConfig, circle_average, disc_admissible,
                                lemma10_disc, lemma10_epsilon0, lipschitz_bound)
from squeezebound.domain import DomainError, builtin


def linear(p, c1):
    return AnalyticDisc(np.asarray(p, complex), np.asarray(c1, complex)[None, :])


def test_config_validation():
    with pytest.raises(ValueError):
        DiscSearchConfig(boundary_samples=300)
    with pytest.raises(ValueError):
        DiscSearchConfig(safety_margin=0)
    with pytest.raises(ValueError):
        DiscSearchConfig(max_degree=0)
    assert DiscSearchConfig().config_hash() == DiscSearchConfig().config_hash()
    assert DiscSearchConfig(seed=1).config_hash() != DiscSearchConfig().config_hash()


def test_disc_evaluation():
    d = AnalyticDisc(np.array([1, 0, 0], complex), np.array([[1, 0, 0], [0, 2, 0]], complex))
    np.testing.assert_allclose(d(0.5j), [1 + 0.5j, -0.5, 0])
    assert d.degree == 2
    np.testing.assert_array_equal(d.derivative, [1, 0, 0])
    assert d.derivative_bound() == 5
    with pytest.raises(ValueError):
        AnalyticDisc(np.zeros(3), np.zeros((1, 2)))


def test_ball_discs(ball1, cfg):
    assert disc_admissible(ball1, linear([0, 0, 0], [0.9, 0, 0]), cfg)
    rep = disc_admissible(ball1, linear([0, 0, 0], [1.1, 0, 0]), cfg)
    assert not rep
    assert disc_admissible(ball1, linear([0, 0, 0], [1 - 1e-3, 0, 0]), cfg)
    assert disc_admissible(ball1, linear([0, 0, 0], [1 - 1e-3, 0, 0]), cfg).gap_method == "spectral"


def test_bounding_box_exit_reported(model, cfg):
    rep = disc_admissible(model, linear([0, 0, -1e-2], [0, 0, 50.0]), cfg)
    assert not rep
    assert rep.exits_bounding_box and rep.reason == "exits_bounding_box"


def test_locality_is_enforced(model, cfg):
    rep = disc_admissible(model, linear([0, 0, -1e-2], [0, 0.6, 0]), cfg)
    assert not rep


def test_coarse_gap_is_used_when_spectral_resolution_is_insufficient(ball1):
    cfg = DiscSearchConfig(boundary_samples=2)
    rep = disc_admissible(ball1, linear([0, 0, 0], [0.5, 0, 0]), cfg)
    assert rep.gap_method == "lipschitz"
    assert not rep and rep.reason == "gap_not_certified"


def test_lipschitz_bound_of_ball(ball1):
    # |grad(|z|^2 - 1)| = 2|z| <= 2R, and the bound must dominate it
    assert lipschitz_bound(ball1.rho, 1.0) >= 2.0 - 1e-12


def test_lemma10_disc_example(model, cfg):
    disc = lemma10_disc(model, 1e-4, 0.1)
    beta = 0.1 * 1e-4 ** (1 / 9)
    assert beta == pytest.approx(0.035938, abs=5e-7)
    np.testing.assert_allclose(disc.derivative, [beta, 0, 0], rtol=1e-15)
    np.testing.assert_array_equal(disc.basepoint, [0, 0, -1e-4])
    assert disc_admissible(model, disc, cfg)
    sym = lemma10_disc(model, 1e-4, 0.1, axis=1)
    np.testing.assert_allclose(sym.derivative, [0, beta, 0], rtol=1e-15)
    assert disc_admissible(model, sym, cfg)


def test_lemma10_epsilon_threshold(model, cfg):
    eps0 = lemma10_epsilon0(model)
    with pytest.raises(DomainError):
        lemma10_disc(model, 1e-4, eps0 * 1.01)
    # bisect the true admissibility threshold at a few depths; eps0 sits below each
    for delta in (1e-2, 1e-4, 1e-6):
        lo, hi = eps0, 50.0
        assert disc_admissible(model, linear([0, 0, -delta], [lo * delta ** (1 / 9), 0, 0]), cfg)
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            ok = disc_admissible(model, linear([0, 0, -delta], [mid * delta ** (1 / 9), 0, 0]), cfg)
            lo, hi = (mid, hi) if ok else (lo, mid)
        assert eps0 <= lo


def test_lemma10_rejects_other_families(ball1, convex):
    with pytest.raises(DomainError):
        lemma10_disc(ball1, 1e-4, 0.1)
    with pytest.raises(DomainError):
        lemma10_disc(convex, 1e-4, 0.1)


def test_lemma10_depth_range(model):
    with pytest.raises(DomainError):
        lemma10_disc(model, 0.3, 0.1)


def test_circle_average_examples(model, cfg):
    th = 2 * np.pi * np.arange(64) / 64
    assert circle_average(np.cos(2 * th) + 5) == pytest.approx(5, abs=1e-14)
    assert circle_average(-np.ones(32)) == -1
    with pytest.raises(ValueError):
        circle_average(np.ones(8))
    disc = lemma10_disc(model, 1e-4, 0.1)
    vals = model.rho_values(disc(0.9 * np.exp(1j * th)))
    assert circle_average(vals) < 0


def test_circle_average_mean_value_property(rng):
    M = 64
    tau = np.exp(2j * np.pi * np.arange(M) / M)
    for _ in range(100):
        deg = int(rng.integers(0, 11))
        c = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
        h = np.polyval(c[::-1], tau)
        assert abs(circle_average(h.real) - c[0].real) < 1e-10


def _random_admissible(dom, p, rng, cfg, scale):
    while True:
        C = scale * (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        C[1:] *= 0.3
        d = AnalyticDisc(np.asarray(p, complex), C)
        if disc_admissible(dom, d, cfg):
            return d


@pytest.mark.parametrize("name", ["ball", "model"])
def test_refinement_never_flips_a_certified_verdict(name, rng):
    dom = builtin(name, k=2) if name == "model" else builtin(name)
    cfg = DiscSearchConfig()
    fine = DiscSearchConfig(boundary_samples=4 * cfg.boundary_samples)
    p, scale = ([0.1, 0, -0.2], 0.2) if name == "ball" else ([0, 0, -1e-2], 0.03)
    for _ in range(50):
        d = _random_admissible(dom, p, rng, cfg, scale)
        rep = disc_admissible(dom, d, fine)
        assert rep, rep.reason


@given(st.floats(0.05, 0.95), st.floats(0, 2 * math.pi))
@settings(max_examples=40, deadline=None)
def test_linear_ball_discs_match_geometry(r, angle):
    ball = builtin("ball")
    c = r * np.exp(1j * angle)
    assert disc_admissible(ball, linear([0, 0, 0], [0, c, 0]), DiscSearchConfig())
    assert not disc_admissible(ball, linear([0, 0, 0], [0, c / r * 1.02, 0]), DiscSearchConfig())
