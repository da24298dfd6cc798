import numpy as np
import pytest

from occusim.bn import (
    Cpt,
    NetworkSpec,
    RejectionCapExceeded,
    VariableSpec,
    infer_posterior,
    sample_assignment,
    sample_indices,
)
from oracles import random_network


def prior_net(p):
    return NetworkSpec((VariableSpec("A", ("a0", "a1")),), (Cpt("A", (), {(): p}),))


def test_degenerate_prior_always_same():
    net = prior_net((1.0, 0.0))
    rng = np.random.default_rng(0)
    assert all(sample_assignment(net, {}, rng) == {"A": "a0"} for _ in range(200))


def test_frequency_matches_prior():
    net = prior_net((0.3, 0.7))
    idx = sample_indices(net, 100_000, np.random.default_rng(1))
    assert np.mean(idx["A"] == 0) == pytest.approx(0.3, abs=0.01)


def test_single_sampler_frequency():
    net = prior_net((0.3, 0.7))
    rng = np.random.default_rng(2)
    draws = [sample_assignment(net, {}, rng)["A"] for _ in range(20_000)]
    assert draws.count("a0") / len(draws) == pytest.approx(0.3, abs=0.015)


def test_same_seed_same_assignment():
    net = random_network(np.random.default_rng(5), 6)
    a = sample_assignment(net, {}, np.random.default_rng(77))
    b = sample_assignment(net, {}, np.random.default_rng(77))
    assert a == b
    assert set(a) == set(net.names)


def test_evidence_is_clamped_and_posterior_recovered(ab_net):
    rng = np.random.default_rng(9)
    draws = [sample_assignment(ab_net, {"B": "b1"}, rng) for _ in range(20_000)]
    assert all(d["B"] == "b1" for d in draws)
    freq = sum(d["A"] == "a1" for d in draws) / len(draws)
    assert freq == pytest.approx(infer_posterior(ab_net, {"B": "b1"}, ["A"])["a1"], abs=0.015)


def test_rejection_cap():
    A = VariableSpec("A", ("a0", "a1"))
    net = NetworkSpec((A,), (Cpt("A", (), {(): (1.0, 0.0)}),))
    with pytest.raises(RejectionCapExceeded):
        sample_assignment(net, {"A": "a1"}, np.random.default_rng(0), max_attempts=50)


def test_sampler_requires_generator(ab_net):
    with pytest.raises(ValueError):
        sample_assignment(ab_net, {})


@pytest.mark.parametrize("seed", range(3))
def test_marginals_of_random_networks(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng, 6)
    idx = sample_indices(net, 100_000, rng)
    for n in net.names:
        exact = infer_posterior(net, {}, [n]).to_array([net.domain(n)])
        emp = np.bincount(idx[n], minlength=len(net.domain(n))) / 100_000
        assert np.abs(emp - exact).sum() <= 0.02
