"""Fixed-step co-simulation loop and Monte Carlo ensembles.

Within a step the physics side orchestrates: it publishes start-of-step
perceptions, the occupant answers with an action record, and the zone is
advanced over the step with the averaged door opening.

Seed splitting: run ``i`` of an ensemble with master seed ``m`` uses
``splitmix64(m XOR i)``, where ``splitmix64`` is the standard SplitMix64
finalizer taken modulo 2**64::

    z = (x + 0x9E3779B97F4A7C15)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z ^ (z >> 31)

Inside a run, the door stream and the presence/visitor stream are two
children of ``numpy.random.SeedSequence(run_seed)`` (spawn keys 0 and 1).
A config-level ``visitor_seed`` replaces the second stream's root.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import physics
from .bn import TwoSliceSpec
from .occupant import (
    BehaviourConfig,
    Calendar,
    DoorState,
    OccupantState,
    PerceptionSet,
    occupant_step,
)

MASK64 = (1 << 64) - 1
SECONDS_PER_HOUR = 3600.0
QUANTILES = (5, 50, 95)


class SimulationError(RuntimeError):
    def __init__(self, step, cause):
        self.step = step
        self.cause = cause
        super().__init__(f"step {step}: {cause}")


class RaggedTraces(ValueError):
    pass


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def run_seed(master: int, index: int) -> int:
    return splitmix64((master & MASK64) ^ index)


@dataclass(frozen=True)
class PhysicsParams:
    volume: float = 36.0
    door: physics.OpeningGeometry = field(default_factory=lambda: physics.OpeningGeometry(0.9, 2.0, 0.6))
    leakage: float = 0.0
    per_person_rate: float = physics.DEFAULT_CO2_PER_PERSON
    initial_co2: float = 400.0

    def __post_init__(self):
        if not self.volume > 0:
            raise ValueError("volume must be positive")
        if self.leakage < 0 or self.per_person_rate < 0 or self.initial_co2 < 0:
            raise ValueError("leakage, per-person rate and initial CO2 must be >= 0")


@dataclass(frozen=True)
class BoundarySeries:
    """Hourly piecewise-constant exogenous conditions; index 0 is the first simulated hour."""

    corridor_temperature: Tuple[float, ...]  # degC
    office_temperature: Tuple[float, ...]  # degC
    corridor_co2: Tuple[float, ...]  # ppm
    humidity: Tuple[float, ...] = (0.5,)

    def __post_init__(self):
        for name in ("corridor_temperature", "office_temperature", "corridor_co2", "humidity"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals:
                raise ValueError(f"boundary series {name} is empty")
            object.__setattr__(self, name, vals)
        if min(self.corridor_co2) < 0:
            raise ValueError("corridor CO2 must be >= 0")
        if min(self.humidity) < 0 or max(self.humidity) > 1:
            raise ValueError("humidity must be in [0, 1]")

    def hours(self) -> int:
        """Hours covered; a one-element series is treated as constant."""
        lens = [len(s) for s in (self.corridor_temperature, self.office_temperature, self.corridor_co2, self.humidity) if len(s) > 1]
        return min(lens) if lens else math.inf

    @staticmethod
    def _at(series, i):
        return series[0] if len(series) == 1 else series[i]

    def at(self, hour_index: int) -> Tuple[float, float, float, float]:
        return tuple(
            self._at(s, hour_index)
            for s in (self.corridor_temperature, self.office_temperature, self.corridor_co2, self.humidity)
        )


@dataclass(frozen=True)
class ScenarioConfig:
    calendar: Calendar
    dbn: TwoSliceSpec
    boundary: BoundarySeries
    physics: PhysicsParams = field(default_factory=PhysicsParams)
    behaviour: BehaviourConfig = field(default_factory=BehaviourConfig)
    dt: float = SECONDS_PER_HOUR
    horizon: int = 24
    seed: int = 0
    start_hour: int = 0
    visitor_seed: Optional[int] = None
    name: str = "scenario"
    sources: Tuple[Tuple[str, str], ...] = ()  # (role, path) pairs, for bookkeeping only

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if not 0 <= self.start_hour < 24:
            raise ValueError("start_hour must be in 0..23")
        if self.boundary.hours() < self.hours_covered:
            raise ValueError(
                f"boundary series cover {self.boundary.hours()} h, horizon needs {self.hours_covered} h"
            )

    @property
    def hours_covered(self) -> int:
        return int(math.ceil(self.horizon * self.dt / SECONDS_PER_HOUR - 1e-9))

    def with_seed(self, seed: int) -> "ScenarioConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class StepRecord:
    step: int
    hour: int
    activity: str
    door_state: str
    door_open_ratio: float
    occupied: bool
    visitor_present: bool
    q_in: float
    q_out: float
    co2: float

    def __post_init__(self):
        if self.co2 < 0:
            raise ValueError(f"negative concentration at step {self.step}")
        if not 0 <= self.door_open_ratio <= 1:
            raise ValueError(f"door ratio out of range at step {self.step}")
        if self.q_in < 0 or self.q_out < 0:
            raise ValueError(f"negative flow at step {self.step}")


def _streams(cfg: ScenarioConfig) -> Tuple[np.random.Generator, np.random.Generator]:
    door_ss, ctx_ss = np.random.SeedSequence(cfg.seed & MASK64).spawn(2)
    if cfg.visitor_seed is not None:
        ctx_ss = np.random.SeedSequence(cfg.visitor_seed & MASK64)
    return np.random.default_rng(door_ss), np.random.default_rng(ctx_ss)


def run_simulation(cfg: ScenarioConfig) -> List[StepRecord]:
    """One seeded run; records hold end-of-step concentrations."""
    door_rng, ctx_rng = _streams(cfg)
    occupant = OccupantState(cfg.dbn, cfg.calendar, cfg.behaviour)
    p = cfg.physics
    co2 = p.initial_co2
    records = []
    for step in range(cfg.horizon):
        try:
            elapsed_h = int(step * cfg.dt // SECONDS_PER_HOUR)
            hour = (cfg.start_hour + elapsed_h) % 24
            t_corr, t_office, c_corr, humidity = cfg.boundary.at(elapsed_h)

            perceptions = PerceptionSet(operative_temperature=t_office, mean_humidity=humidity, co2=co2)
            answer = occupant_step(occupant, hour, perceptions, door_rng, ctx_rng)
            act = answer.actions

            sides = physics.AirSides.from_temperatures(
                physics.celsius_to_kelvin(t_office), physics.celsius_to_kelvin(t_corr)
            )
            flows = physics.door_flows(p.door.with_ratio(act.door_open_ratio), sides, p.leakage)
            zone = physics.ZoneState(co2, p.volume, p.initial_co2)
            source = physics.Co2Source(act.occupant_count, p.per_person_rate)
            co2 = physics.co2_step(zone, flows, source, c_corr, cfg.dt)

            records.append(
                StepRecord(
                    step=step,
                    hour=hour,
                    activity=answer.activity.value,
                    door_state=answer.door_state.value,
                    door_open_ratio=act.door_open_ratio,
                    occupied=act.occupied,
                    visitor_present=answer.visitor_present,
                    q_in=flows.q_in,
                    q_out=flows.q_out,
                    co2=co2,
                )
            )
        except Exception as e:
            raise SimulationError(step, e) from e
    return records


def nearest_rank(sorted_values: Sequence[float], pct: float) -> float:
    """Nearest-rank percentile: the value at rank ceil(pct/100 * n), ranks from 1."""
    n = len(sorted_values)
    rank = max(1, int(math.ceil(pct / 100.0 * n - 1e-12)))
    return sorted_values[min(rank, n) - 1]


@dataclass(frozen=True)
class EnsembleSummary:
    runs: int
    hours: Tuple[int, ...]
    activities: Tuple[str, ...]
    door_frequency: Dict[str, Tuple[float, ...]]
    co2_quantiles: Dict[str, Tuple[float, ...]]

    def door_use(self) -> Tuple[float, ...]:
        """Per-hour frequency of any state other than always_closed."""
        closed = self.door_frequency[DoorState.ALWAYS_CLOSED.value]
        return tuple(1.0 - c for c in closed)

    def to_dict(self) -> dict:
        return {
            "runs": self.runs,
            "hours": list(self.hours),
            "activities": list(self.activities),
            "door_frequency": {k: list(v) for k, v in self.door_frequency.items()},
            "co2_quantiles": {k: list(v) for k, v in self.co2_quantiles.items()},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "EnsembleSummary":
        expected = {"runs", "hours", "activities", "door_frequency", "co2_quantiles"}
        if set(doc) != expected:
            raise ValueError(f"summary must have exactly the fields {sorted(expected)}")
        n = len(doc["hours"])
        labels = [d.value for d in DoorState]
        if sorted(doc["door_frequency"]) != sorted(labels):
            raise ValueError("summary door_frequency must list every door state")
        qkeys = [f"p{q}" for q in QUANTILES]
        if sorted(doc["co2_quantiles"]) != sorted(qkeys):
            raise ValueError(f"summary co2_quantiles must be {qkeys}")
        cols = list(doc["door_frequency"].values()) + list(doc["co2_quantiles"].values()) + [doc["activities"]]
        if any(len(c) != n for c in cols):
            raise ValueError("summary columns have inconsistent lengths")
        return cls(
            runs=int(doc["runs"]),
            hours=tuple(int(h) for h in doc["hours"]),
            activities=tuple(doc["activities"]),
            door_frequency={k: tuple(float(x) for x in doc["door_frequency"][k]) for k in labels},
            co2_quantiles={k: tuple(float(x) for x in doc["co2_quantiles"][k]) for k in qkeys},
        )


def summarize(traces: Sequence[Sequence[StepRecord]]) -> EnsembleSummary:
    """Pool records by clock hour across runs; quantiles by nearest rank."""
    if not traces:
        raise ValueError("no traces to summarize")
    length = len(traces[0])
    if any(len(t) != length for t in traces):
        raise RaggedTraces(f"trace lengths differ: {sorted({len(t) for t in traces})}")
    labels = [d.value for d in DoorState]
    counts: Dict[int, Dict[str, int]] = {}
    co2: Dict[int, List[float]] = {}
    acts: Dict[int, set] = {}
    for trace in traces:
        for r in trace:
            counts.setdefault(r.hour, dict.fromkeys(labels, 0))[r.door_state] += 1
            co2.setdefault(r.hour, []).append(r.co2)
            acts.setdefault(r.hour, set()).add(r.activity)
    hours = tuple(sorted(counts))
    freq = {}
    for lab in labels:
        freq[lab] = tuple(counts[h][lab] / sum(counts[h].values()) for h in hours)
    quant = {}
    for q in QUANTILES:
        quant[f"p{q}"] = tuple(nearest_rank(sorted(co2[h]), q) for h in hours)
    activities = tuple(next(iter(acts[h])) if len(acts[h]) == 1 else "mixed" for h in hours)
    return EnsembleSummary(len(traces), hours, activities, freq, quant)


def ensemble_configs(cfg: ScenarioConfig, runs: int) -> List[ScenarioConfig]:
    out = []
    for i in range(runs):
        vs = None if cfg.visitor_seed is None else run_seed(cfg.visitor_seed, i)
        out.append(replace(cfg, seed=run_seed(cfg.seed, i), visitor_seed=vs))
    return out


def run_ensemble(cfg: ScenarioConfig, runs: int, workers: int = 1) -> List[List[StepRecord]]:
    """Traces of ``runs`` independent simulations, always in run-index order."""
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    configs = ensemble_configs(cfg, runs)
    if workers <= 1:
        return [run_simulation(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_simulation, configs, chunksize=max(1, runs // (4 * workers))))


def run_monte_carlo(cfg: ScenarioConfig, runs: int, workers: int = 1) -> EnsembleSummary:
    return summarize(run_ensemble(cfg, runs, workers))
