"""Occupant behaviour: activity calendars, the door-movement DBN and the step method.

Each step the occupant receives the zone perceptions, samples who is in the
room, advances the door DBN one slice with the hour's evidence, samples the
averaged door state and answers with a complete action record.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from .bn import Cpt, Distribution, NetworkSpec, TwoSliceSpec, VariableSpec, filter_step, validate_two_slice
from .bn.sampling import draw_index

HOURS = 24


class Activity(str, Enum):
    OUT_OF_WORKING_TIME = "out_of_working_time"
    FREE = "free"
    BUSY = "busy"
    LUNCH = "lunch"


class DoorState(str, Enum):
    ALWAYS_CLOSED = "always_closed"
    MOSTLY_CLOSED = "mostly_closed"
    MOSTLY_OPENED = "mostly_opened"
    ALWAYS_OPENED = "always_opened"


DOOR_RATIOS = {
    DoorState.ALWAYS_CLOSED: 0.0,
    DoorState.MOSTLY_CLOSED: 0.3,
    DoorState.MOSTLY_OPENED: 0.7,
    DoorState.ALWAYS_OPENED: 1.0,
}

PERIODS = ("night", "morning", "midday", "afternoon", "evening")


def door_ratio(state) -> float:
    """Average open fraction of the time step for an averaged door state."""
    return DOOR_RATIOS[DoorState(state)]


def period_of_day(hour: int) -> str:
    if 7 <= hour <= 11:
        return "morning"
    if 12 <= hour <= 13:
        return "midday"
    if 14 <= hour <= 17:
        return "afternoon"
    if 18 <= hour <= 20:
        return "evening"
    return "night"


# --- calendars -------------------------------------------------------------


class CalendarError(ValueError):
    pass


class MissingHour(CalendarError):
    def __init__(self, hour):
        self.hour = hour
        super().__init__(f"calendar has no entry for hour {hour}")


class DuplicateHour(CalendarError):
    def __init__(self, hour, row):
        self.hour = hour
        self.row = row
        super().__init__(f"row {row}: hour {hour} listed twice")


class UnknownActivityLabel(CalendarError):
    def __init__(self, label, row):
        self.label = label
        self.row = row
        super().__init__(f"row {row}: unknown activity {label!r}")


def parse_activity(label: str) -> Activity:
    """Case- and separator-insensitive: 'Lunch', 'Out of working time' are accepted."""
    key = "_".join(label.strip().lower().replace("-", " ").split())
    return Activity(key)


@dataclass(frozen=True)
class Calendar:
    name: str
    entries: Tuple[Activity, ...]

    def __post_init__(self):
        entries = tuple(Activity(e) for e in self.entries)
        if len(entries) != HOURS:
            raise CalendarError(f"calendar needs {HOURS} entries, got {len(entries)}")
        object.__setattr__(self, "entries", entries)

    def activity_at(self, hour: int) -> Activity:
        return self.entries[hour % HOURS]


def parse_calendar(text: str, name: str = "calendar") -> Calendar:
    """Read a ``hour,activity`` CSV with one row per hour 0..23."""
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows or [c.strip().lower() for c in rows[0]] != ["hour", "activity"]:
        raise CalendarError("calendar CSV must start with header 'hour,activity'")
    slots: Dict[int, Activity] = {}
    for row_no, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise CalendarError(f"row {row_no}: expected 2 columns, got {len(row)}")
        try:
            hour = int(row[0])
        except ValueError:
            raise CalendarError(f"row {row_no}: bad hour {row[0]!r}") from None
        if not 0 <= hour < HOURS:
            raise CalendarError(f"row {row_no}: hour {hour} outside 0..23")
        try:
            act = parse_activity(row[1])
        except ValueError:
            raise UnknownActivityLabel(row[1], row_no) from None
        if hour in slots:
            raise DuplicateHour(hour, row_no)
        slots[hour] = act
    for h in range(HOURS):
        if h not in slots:
            raise MissingHour(h)
    return Calendar(name, tuple(slots[h] for h in range(HOURS)))


def serialize_calendar(cal: Calendar) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["hour", "activity"])
    for h, a in enumerate(cal.entries):
        w.writerow([h, a.value])
    return buf.getvalue()


# --- perceptions and actions ------------------------------------------------


class NonMonotonicThresholds(ValueError):
    pass


@dataclass(frozen=True)
class PerceptionSet:
    operative_temperature: float  # degC
    mean_humidity: float  # fraction
    co2: float  # ppm

    def __post_init__(self):
        if self.co2 < 0:
            raise ValueError(f"co2 must be >= 0, got {self.co2}")
        if not 0 <= self.mean_humidity <= 1:
            raise ValueError(f"humidity must be in [0, 1], got {self.mean_humidity}")


@dataclass(frozen=True)
class Co2Bins:
    """Upper edges (inclusive) of every bin but the last."""

    thresholds: Tuple[float, ...] = (800.0, 1200.0)
    labels: Tuple[str, ...] = ("low", "medium", "high")

    def __post_init__(self):
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))
        object.__setattr__(self, "labels", tuple(self.labels))
        if any(b <= a for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise NonMonotonicThresholds(f"thresholds must be strictly increasing: {self.thresholds}")
        if len(self.labels) != len(self.thresholds) + 1:
            raise ValueError("need exactly one more label than thresholds")

    def label(self, value: float) -> str:
        for edge, lab in zip(self.thresholds, self.labels):
            if value <= edge:
                return lab
        return self.labels[-1]


def discretize_perceptions(p: PerceptionSet, bins: Co2Bins = Co2Bins()) -> Dict[str, str]:
    return {"co2_level": bins.label(p.co2)}


@dataclass(frozen=True)
class ActionSet:
    occupied: bool
    occupant_count: int
    metabolic_gain: float  # W
    appliance_gain: float  # W
    metabolic_humidity_gain: float  # kg/s
    setpoint_temperature: float  # degC
    heating_cooling_active: bool
    window_open_ratio: float
    door_open_ratio: float

    def __post_init__(self):
        for name in ("window_open_ratio", "door_open_ratio"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        for name in ("metabolic_gain", "appliance_gain", "metabolic_humidity_gain"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.occupant_count < 0:
            raise ValueError("occupant_count must be >= 0")


DEFAULT_VISITOR_PROBABILITY = {"out_of_working_time": 0.0, "free": 0.2, "busy": 0.1, "lunch": 0.0}


@dataclass(frozen=True)
class BehaviourConfig:
    lunch_out_probability: float = 0.8
    visitor_probability: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_VISITOR_PROBABILITY))
    metabolic_gain_per_person: float = 100.0
    appliance_gain_occupied: float = 120.0
    appliance_gain_standby: float = 10.0
    humidity_gain_per_person: float = 1.4e-5  # kg/s, about 50 g/h
    setpoint_occupied: float = 21.0
    setpoint_unoccupied: float = 16.0
    co2_bins: Co2Bins = field(default_factory=Co2Bins)
    initial_door_state: DoorState = DoorState.ALWAYS_CLOSED

    def __post_init__(self):
        # activities left out keep their default
        probs = dict(DEFAULT_VISITOR_PROBABILITY)
        probs.update({parse_activity(k).value: float(v) for k, v in self.visitor_probability.items()})
        object.__setattr__(self, "visitor_probability", probs)
        object.__setattr__(self, "initial_door_state", DoorState(self.initial_door_state))
        for p in [self.lunch_out_probability, *probs.values()]:
            if not 0 <= p <= 1:
                raise ValueError(f"probability out of range: {p}")

    def presence_probability(self, activity: Activity) -> float:
        if activity is Activity.OUT_OF_WORKING_TIME:
            return 0.0
        if activity is Activity.LUNCH:
            return 1.0 - self.lunch_out_probability
        return 1.0


# --- the default door DBN ---------------------------------------------------

DOOR = "door_state"
DOOR_PARENTS = ("activity", "occupant_present", "visitor_present", "period_of_day", "co2_level")

# Illustrative expert defaults: tendency to move the door away from
# always_closed, given who is in the room and what the occupant is doing.
_ACTIVITY_USE = {"out_of_working_time": 0.03, "free": 0.55, "busy": 0.2, "lunch": 0.12}
_PERIOD_FACTOR = {"night": 0.6, "morning": 1.1, "midday": 1.0, "afternoon": 1.0, "evening": 0.9}
_CO2_BONUS = {"low": 0.0, "medium": 0.05, "high": 0.15}
_VISITOR_BONUS = 0.25
_ABSENT_USE = 0.03
_OPEN_SPLIT = (0.4, 0.35, 0.25)  # mostly_closed, mostly_opened, always_opened
_PERSISTENCE = 0.25  # weight on repeating the previous state while present

_ACTIVITY_PRIOR = {"out_of_working_time": 0.4, "free": 0.25, "busy": 0.3, "lunch": 0.05}
_PERIOD_PRIOR = {"night": 10 / 24, "morning": 5 / 24, "midday": 2 / 24, "afternoon": 4 / 24, "evening": 3 / 24}
_CO2_PRIOR = (0.6, 0.3, 0.1)


def _door_row(activity, present, visitor, period, co2, previous=None) -> Tuple[float, ...]:
    if present == "yes":
        use = _ACTIVITY_USE[activity] * _PERIOD_FACTOR[period] + _CO2_BONUS[co2]
        if visitor == "yes":
            use += _VISITOR_BONUS
        use = min(max(use, 0.01), 0.95)
        persistence = _PERSISTENCE
    else:
        use = _ABSENT_USE
        persistence = 0.0
    row = np.array([1.0 - use] + [use * s for s in _OPEN_SPLIT])
    if previous is not None and persistence:
        hold = np.zeros(4)
        hold[[d.value for d in DoorState].index(previous)] = 1.0
        row = (1.0 - persistence) * row + persistence * hold
    row = row / row.sum()
    return tuple(float(x) for x in row)


def build_default_door_dbn(behaviour: BehaviourConfig = BehaviourConfig()) -> TwoSliceSpec:
    """Door-movement model with six parents, including the previous door state.

    Presence and visitor CPTs mirror ``behaviour`` so that exact inference
    on the network agrees with the sampling done in ``occupant_step``.
    """
    yes_no = ("no", "yes")
    activities = tuple(a.value for a in Activity)
    doors = tuple(d.value for d in DoorState)
    co2_levels = behaviour.co2_bins.labels
    if len(co2_levels) != 3:
        raise ValueError("the default door model expects three CO2 levels")
    co2_prior = dict(zip(co2_levels, _CO2_PRIOR))
    variables = (
        VariableSpec("activity", activities),
        VariableSpec("period_of_day", PERIODS),
        VariableSpec("occupant_present", yes_no),
        VariableSpec("visitor_present", yes_no),
        VariableSpec("co2_level", co2_levels),
        VariableSpec(DOOR, doors),
    )
    presence = {}
    visitor = {}
    for a in Activity:
        p = behaviour.presence_probability(a)
        presence[(a.value,)] = (1.0 - p, p)
        v = behaviour.visitor_probability[a.value] if p > 0 else 0.0
        visitor[(a.value,)] = (1.0 - v, v)
    roots = [
        Cpt("activity", (), {(): tuple(_ACTIVITY_PRIOR[a] for a in activities)}),
        Cpt("period_of_day", (), {(): tuple(_PERIOD_PRIOR[p] for p in PERIODS)}),
        Cpt("occupant_present", ("activity",), presence),
        Cpt("visitor_present", ("activity",), visitor),
        Cpt("co2_level", (), {(): tuple(co2_prior[c] for c in co2_levels)}),
    ]
    domains = [activities, yes_no, yes_no, PERIODS, co2_levels]
    # co2 labels are mapped positionally onto the low/medium/high bonuses
    co2_key = dict(zip(co2_levels, ("low", "medium", "high")))

    door0 = {}
    door_t = {}
    for combo in itertools.product(*domains):
        a, pres, vis, per, co2 = combo
        door0[combo] = _door_row(a, pres, vis, per, co2_key[co2], previous=DoorState.ALWAYS_CLOSED.value)
        for prev in doors:
            door_t[combo + (prev,)] = _door_row(a, pres, vis, per, co2_key[co2], previous=prev)
    prior = NetworkSpec(variables, tuple(roots) + (Cpt(DOOR, DOOR_PARENTS, door0),))
    transition = tuple(roots) + (Cpt(DOOR, DOOR_PARENTS + ("previous:" + DOOR,), door_t),)
    return validate_two_slice(TwoSliceSpec(prior, transition))


def door_model_errors(dbn: TwoSliceSpec, behaviour: BehaviourConfig = BehaviourConfig()) -> list:
    """Mismatches between a door DBN and the evidence ``occupant_step`` feeds it."""
    required = {
        "activity": {a.value for a in Activity},
        "period_of_day": set(PERIODS),
        "occupant_present": {"no", "yes"},
        "visitor_present": {"no", "yes"},
        "co2_level": set(behaviour.co2_bins.labels),
        DOOR: {d.value for d in DoorState},
    }
    errors = []
    for name, labels in required.items():
        if name not in dbn.names:
            errors.append(f"door model lacks variable {name!r}")
        elif set(dbn.domain(name)) != labels:
            errors.append(f"variable {name!r} must have domain {sorted(labels)}, has {list(dbn.domain(name))}")
    return errors


# --- step -------------------------------------------------------------------


@dataclass
class OccupantState:
    """Per-run occupant: immutable model plus the mutable door belief."""

    dbn: TwoSliceSpec
    calendar: Calendar
    behaviour: BehaviourConfig = field(default_factory=BehaviourConfig)
    belief: Optional[Distribution] = None

    def __post_init__(self):
        if self.belief is None:
            self.belief = Distribution.point_mass({DOOR: self.behaviour.initial_door_state.value})


@dataclass(frozen=True)
class OccupantAnswer:
    actions: ActionSet
    belief: Distribution
    activity: Activity
    door_state: DoorState
    occupant_present: bool
    visitor_present: bool


def hour_evidence(activity: Activity, hour: int, present: bool, visitor: bool, co2_level: str) -> Dict[str, str]:
    return {
        "activity": activity.value,
        "period_of_day": period_of_day(hour),
        "occupant_present": "yes" if present else "no",
        "visitor_present": "yes" if visitor else "no",
        "co2_level": co2_level,
    }


def occupant_step(
    state: OccupantState,
    hour: int,
    perceptions: PerceptionSet,
    rng: np.random.Generator,
    context_rng: Optional[np.random.Generator] = None,
) -> OccupantAnswer:
    """Answer one physics query and advance ``state.belief``.

    ``context_rng`` drives presence and visitor draws (defaults to ``rng``);
    ``rng`` drives the door draw. Both consume exactly one uniform per call
    so streams stay aligned whatever the outcome.
    """
    if not 0 <= hour < HOURS:
        raise ValueError(f"hour must be in 0..23, got {hour}")
    ctx = context_rng if context_rng is not None else rng
    cfg = state.behaviour
    activity = state.calendar.activity_at(hour)

    present = ctx.random() < cfg.presence_probability(activity)
    visitor = bool(ctx.random() < cfg.visitor_probability[activity.value]) and present

    evidence = hour_evidence(activity, hour, present, visitor, discretize_perceptions(perceptions, cfg.co2_bins)["co2_level"])
    predicted = filter_step(state.dbn, state.belief, evidence)
    labels = state.dbn.domain(DOOR)
    door = DoorState(labels[draw_index([predicted[(lab,)] for lab in labels], rng)])
    # the drawn door state is what actually happened: it becomes the next "previous"
    if state.dbn.interface == (DOOR,):
        state.belief = Distribution.point_mass({DOOR: door.value})
    else:
        state.belief = filter_step(state.dbn, state.belief, {**evidence, DOOR: door.value})

    persons = int(present) + int(visitor)
    actions = ActionSet(
        occupied=present,
        occupant_count=persons,
        metabolic_gain=cfg.metabolic_gain_per_person * persons,
        appliance_gain=cfg.appliance_gain_occupied if present else cfg.appliance_gain_standby,
        metabolic_humidity_gain=cfg.humidity_gain_per_person * persons,
        setpoint_temperature=cfg.setpoint_occupied if present else cfg.setpoint_unoccupied,
        heating_cooling_active=present,
        window_open_ratio=0.0,
        door_open_ratio=door_ratio(door),
    )
    return OccupantAnswer(actions, state.belief, activity, door, present, visitor)
