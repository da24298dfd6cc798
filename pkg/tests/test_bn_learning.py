import numpy as np
import pytest

from occusim.bn import (
    Cpt,
    LabelOutOfDomain,
    NetworkSpec,
    VariableSpec,
    learn_cpts,
    sample_records,
)
from oracles import random_network


def structure_a():
    return NetworkSpec((VariableSpec("A", ("a0", "a1")),), (Cpt("A", ()),))


def test_mle_degenerate():
    net = learn_cpts(structure_a(), [{"A": "a0"}] * 5, prior_strength=0)
    assert net.cpt("A").table[()] == (1.0, 0.0)


def test_laplace_smoothing():
    obs = [{"A": "a0"}] * 3 + [{"A": "a1"}]
    net = learn_cpts(structure_a(), obs, prior_strength=1)
    assert net.cpt("A").table[()][0] == pytest.approx((3 + 1) / (4 + 2), abs=1e-15)


def test_no_data_gives_uniform():
    net = random_network(np.random.default_rng(0), 4, max_labels=3)
    learned = learn_cpts(net, [], prior_strength=1)
    for c in learned.cpts:
        k = len(learned.domain(c.child))
        assert all(row == pytest.approx((1 / k,) * k) for row in c.table.values())


def test_zero_prior_empty_row_uniform(caplog):
    A = VariableSpec("A", ("a0", "a1"))
    B = VariableSpec("B", ("b0", "b1", "b2"))
    structure = NetworkSpec((A, B), (Cpt("A", ()), Cpt("B", ("A",))))
    learned = learn_cpts(structure, [{"A": "a0", "B": "b1"}], prior_strength=0)
    assert learned.cpt("B").table[("a1",)] == pytest.approx((1 / 3,) * 3)
    assert "no data" in caplog.text


def test_label_out_of_domain_names_record():
    with pytest.raises(LabelOutOfDomain) as exc:
        learn_cpts(structure_a(), [{"A": "a0"}, {"A": "zz"}], 1)
    assert exc.value.record == 1 and exc.value.name == "A"


def test_negative_prior_rejected():
    with pytest.raises(ValueError):
        learn_cpts(structure_a(), [], -1)


def test_recovery_from_samples():
    rng = np.random.default_rng(21)
    truth = random_network(rng, 4, max_labels=2, max_parents=1)
    data = sample_records(truth, 10_000, rng)
    learned = learn_cpts(truth, data, prior_strength=1)
    for c in truth.cpts:
        for key, row in c.table.items():
            assert np.abs(np.array(row) - learned.cpt(c.child).table[key]).sum() <= 0.05
