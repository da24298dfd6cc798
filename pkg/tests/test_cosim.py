import json
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from occusim.cosim import (
    BoundarySeries,
    EnsembleSummary,
    RaggedTraces,
    StepRecord,
    nearest_rank,
    run_ensemble,
    run_monte_carlo,
    run_seed,
    run_simulation,
    splitmix64,
    summarize,
)
from occusim.io import format_trace, load_config
from occusim.occupant import BehaviourConfig, DoorState
from helpers import forced_door_dbn, simple_config
from oracles import nearest_rank_by_hand

DATA = __import__("pathlib").Path(__file__).parent / "data"
NO_VISITORS = BehaviourConfig(visitor_probability={"free": 0.0, "busy": 0.0})


def rec(step, door="always_closed", co2=400.0, hour=None, activity="busy"):
    return StepRecord(step, step if hour is None else hour, activity, door, 0.0, True, False, 0.0, 0.0, co2)


def test_splitmix64_reference_values():
    # first outputs of the SplitMix64 generator seeded with 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(0x9E3779B97F4A7C15) == 0x6E789E6AA1B965F4


def test_run_seed_rule():
    assert run_seed(42, 0) == splitmix64(42)
    assert run_seed(42, 3) == splitmix64(42 ^ 3)
    assert len({run_seed(7, i) for i in range(1000)}) == 1000


def test_closed_empty_office_keeps_initial_co2():
    cfg = simple_config("out_of_working_time", horizon=1, dbn=forced_door_dbn(DoorState.ALWAYS_CLOSED), initial_co2=555.0)
    (r,) = run_simulation(cfg)
    assert r.co2 == 555.0 and r.q_in == 0.0 and r.q_out == 0.0


def test_occupied_closed_office_accumulates():
    cfg = simple_config("busy", dbn=forced_door_dbn(DoorState.ALWAYS_CLOSED), behaviour=NO_VISITORS)
    trace = run_simulation(cfg)
    co2 = [cfg.physics.initial_co2] + [r.co2 for r in trace]
    assert all(b > a for a, b in zip(co2, co2[1:]))
    # one person, closed, sealed: linear growth
    assert trace[0].co2 == pytest.approx(400 + 1e6 * 5.2e-6 * 3600 / 36, rel=1e-12)


def test_empty_open_office_relaxes_toward_corridor():
    cfg = simple_config("out_of_working_time", dbn=forced_door_dbn(DoorState.ALWAYS_OPENED), initial_co2=1500.0)
    trace = run_simulation(cfg)
    co2 = [r.co2 for r in trace]
    assert all(b <= a for a, b in zip(co2, co2[1:]))
    # mass balance fixes q_in / q_out = rho_zone / rho_corridor = T_corridor / T_zone
    limit = 420.0 * (19.0 + 273.15) / (22.0 + 273.15)
    assert co2[-1] == pytest.approx(limit, rel=1e-5)  # neutral plane is bisected to 1e-6 m


def test_same_seed_same_trace():
    cfg = simple_config("free", seed=9)
    assert run_simulation(cfg) == run_simulation(cfg)
    assert run_simulation(cfg) != run_simulation(cfg.with_seed(10))


def test_golden_trace(scenarios_dir):
    cfg = load_config(scenarios_dir / "workday1.json")
    assert format_trace(run_simulation(cfg)) == (DATA / "workday1_seed42.csv").read_text()


def test_visitor_seed_pins_presence_stream():
    def people(seed):
        cfg = replace(simple_config("free", seed=seed), visitor_seed=99)
        return [(r.occupied, r.visitor_present) for r in run_simulation(cfg)]

    assert people(1) == people(2)
    assert any(v for _, v in people(1))


def test_boundary_must_cover_horizon():
    with pytest.raises(ValueError):
        replace(simple_config(), boundary=BoundarySeries((19.0,) * 10, (22.0,), (420.0,)))


def test_single_run_frequencies_are_one_hot():
    s = run_monte_carlo(simple_config("free", seed=4), runs=1)
    for i in range(len(s.hours)):
        col = [s.door_frequency[d.value][i] for d in DoorState]
        assert sorted(col) == [0.0, 0.0, 0.0, 1.0]


def test_frequencies_sum_to_one():
    s = run_monte_carlo(simple_config("free", seed=4), runs=20)
    for i in range(len(s.hours)):
        assert sum(s.door_frequency[d.value][i] for d in DoorState) == pytest.approx(1.0, abs=1e-12)


def test_workers_do_not_change_results():
    cfg = simple_config("free", seed=11)
    assert run_ensemble(cfg, 16, workers=1) == run_ensemble(cfg, 16, workers=8)


def test_nearest_rank_fixture():
    traces = [[rec(0, co2=c)] for c in (500.0, 400.0, 600.0)]
    s = summarize(traces)
    # n = 3: ranks ceil(0.15)=1, ceil(1.5)=2, ceil(2.85)=3
    assert (s.co2_quantiles["p5"][0], s.co2_quantiles["p50"][0], s.co2_quantiles["p95"][0]) == (400.0, 500.0, 600.0)


@given(st.lists(st.floats(0, 5000), min_size=1, max_size=60), st.sampled_from([5, 50, 95]))
def test_nearest_rank_matches_by_hand(values, pct):
    assert nearest_rank(sorted(values), pct) == nearest_rank_by_hand(values, pct)


def test_identical_traces_collapse_quantiles():
    trace = run_simulation(simple_config("free", seed=2))
    s = summarize([trace] * 5)
    assert s.co2_quantiles["p5"] == s.co2_quantiles["p50"] == s.co2_quantiles["p95"]


def test_ragged_traces_rejected():
    with pytest.raises(RaggedTraces):
        summarize([[rec(0)], [rec(0), rec(1)]])


def test_summary_permutation_invariant():
    traces = run_ensemble(simple_config("free", seed=5), 6)
    rng = np.random.default_rng(0)
    shuffled = [traces[i] for i in rng.permutation(len(traces))]
    assert summarize(traces) == summarize(shuffled)


def test_mixed_activity_label():
    s = summarize([[rec(0, activity="busy")], [rec(0, activity="free")]])
    assert s.activities == ("mixed",)


def test_summary_dict_round_trip():
    s = run_monte_carlo(simple_config("free", seed=5), runs=5)
    assert EnsembleSummary.from_dict(json.loads(json.dumps(s.to_dict()))) == s


def test_summary_from_dict_strict():
    doc = run_monte_carlo(simple_config("free", seed=5), runs=2).to_dict()
    doc["extra"] = 1
    with pytest.raises(ValueError):
        EnsembleSummary.from_dict(doc)


def test_runs_must_be_positive():
    with pytest.raises(ValueError):
        run_ensemble(simple_config(), 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(1, 30), st.sampled_from([600.0, 1800.0, 3600.0]))
def test_sub_hourly_steps_keep_clock(seed, horizon, dt):
    cfg = replace(simple_config("free", seed=seed), horizon=horizon, dt=dt)
    trace = run_simulation(cfg)
    assert [r.step for r in trace] == list(range(horizon))
    assert [r.hour for r in trace] == [int(i * dt // 3600) % 24 for i in range(horizon)]
