import math

import pytest

import weakmix


def test_moments_of_two_component_mixture():
    mean, var = weakmix.mixture_moments("gaussian", [0.65, 0.35], [-8.0, -0.5], [2.0, 1.0])
    assert mean == pytest.approx(-5.375, abs=1e-12)
    assert var == pytest.approx(15.746875, abs=1e-12)


def test_angular_round_trip():
    w, l, s = [0.27, 0.4, 0.33], [-4.5, 10.0, 3.0], [1.0, 1.5, 0.5]
    a = weakmix.to_angular(w, l, s)
    w2, l2, s2 = weakmix.from_angular(a["mu"], a["sigma"], w, a["phi"], a["varpi"], a["xi"])
    assert l2 == pytest.approx(l, abs=1e-9)
    assert s2 == pytest.approx(s, abs=1e-9)


def test_prior_draws_are_standardised():
    for w, l, s in weakmix.sample_prior(4, 50, seed=3):
        mean = sum(p * m for p, m in zip(w, l))
        var = sum(p * (sd * sd + m * m) for p, m, sd in zip(w, l, s)) - mean * mean
        assert abs(mean) < 1e-10
        assert abs(var - 1.0) < 1e-10


def test_pair_oracle_and_probe():
    assert weakmix.pair_closed(0.5, 0.5, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0) == pytest.approx(0.125)
    value, _ = weakmix.pair_quad(0.5, 0.5, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0)
    assert value == pytest.approx(0.125, abs=1e-6)
    assert weakmix.n1_divergence_probe(math.e ** 2) == pytest.approx(4.0)


def test_fit_poisson_runs_and_rejects_zero_data():
    chains = weakmix.fit("poisson", [0, 1, 2, 5, 4, 1, 0, 6], 2, iterations=600, burnin=100, seed=2)
    assert len(chains) == 1
    assert len(chains[0]["weights"]) == 500
    with pytest.raises(ValueError):
        weakmix.fit("poisson", [0, 0, 0], 2, iterations=200, burnin=10)


def test_gelman_rubin_identical_chains():
    assert weakmix.gelman_rubin([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]) == 1.0
