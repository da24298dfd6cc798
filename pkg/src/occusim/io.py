"""Scenario configs, trace and summary files, run manifests and plot data.

Scenario config (JSON; every key below is accepted, nothing else)::

    {
      "name": "workday-1",
      "dbn": "door_dbn.json",           # path relative to this file, or "builtin:door"
      "calendar": "workday1.csv",       # path relative to this file
      "seed": 42,
      "visitor_seed": null,             # optional separate presence/visitor stream
      "horizon": 24,                    # steps
      "dt": 3600,                       # s
      "start_hour": 0,
      "physics": {"volume": 36, "door": {"width": 0.9, "height": 2.0, "discharge_coefficient": 0.6},
                  "leakage": 0.0, "per_person_rate": 5.2e-6, "initial_co2": 400},
      "boundary": {"corridor_temperature": 19, "office_temperature": [...],
                   "corridor_co2": 400, "humidity": 0.5},
      "behaviour": {"lunch_out_probability": 0.8, "visitor_probability": {"free": 0.2, "busy": 0.1},
                    "metabolic_gain_per_person": 100, "appliance_gain_occupied": 120,
                    "appliance_gain_standby": 10, "humidity_gain_per_person": 1.4e-5,
                    "setpoint_occupied": 21, "setpoint_unoccupied": 16,
                    "co2_thresholds": [800, 1200], "co2_labels": ["low", "medium", "high"],
                    "initial_door_state": "always_closed"}
    }

Boundary entries are hourly; a single number means constant. Temperatures
are in degC, CO2 in ppm.

Trace CSV columns, in order: ``step, hour, activity, door_state,
door_open_ratio, occupied, visitor_present, q_in, q_out, co2``. Booleans are
0/1; floats use 6 significant digits.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence

from . import __version__
from .bn import TwoSliceSpec, load_network, network_to_dict, two_slice_errors
from .bn.errors import BNError
from .cosim import BoundarySeries, EnsembleSummary, PhysicsParams, ScenarioConfig, StepRecord
from .occupant import (
    BehaviourConfig,
    Co2Bins,
    DoorState,
    build_default_door_dbn,
    door_model_errors,
    parse_calendar,
)
from .physics import OpeningGeometry

TRACE_COLUMNS = (
    "step", "hour", "activity", "door_state", "door_open_ratio",
    "occupied", "visitor_present", "q_in", "q_out", "co2",
)
BUILTIN_DOOR = "builtin:door"


class ConfigError(ValueError):
    pass


def _strict(obj, allowed, where, required=()):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown field(s) {unknown}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ConfigError(f"{where}: missing field(s) {missing}")


def _series(value, where):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (float(value),)
    if isinstance(value, list) and value and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return tuple(float(v) for v in value)
    raise ConfigError(f"{where}: expected a number or a non-empty list of numbers")


def _int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer")
    return value


def _behaviour(doc) -> BehaviourConfig:
    keys = {
        "lunch_out_probability", "visitor_probability", "metabolic_gain_per_person",
        "appliance_gain_occupied", "appliance_gain_standby", "humidity_gain_per_person",
        "setpoint_occupied", "setpoint_unoccupied", "co2_thresholds", "co2_labels", "initial_door_state",
    }
    _strict(doc, keys, "behaviour")
    kwargs: Dict[str, Any] = {k: v for k, v in doc.items() if k not in ("co2_thresholds", "co2_labels")}
    if "co2_thresholds" in doc or "co2_labels" in doc:
        bins = Co2Bins()
        kwargs["co2_bins"] = Co2Bins(
            tuple(doc.get("co2_thresholds", bins.thresholds)), tuple(doc.get("co2_labels", bins.labels))
        )
    return BehaviourConfig(**kwargs)


def load_dbn(ref: str, base: Path, behaviour: BehaviourConfig = BehaviourConfig()) -> TwoSliceSpec:
    if ref == BUILTIN_DOOR:
        return build_default_door_dbn(behaviour)
    model = load_network(base / ref)
    if not isinstance(model, TwoSliceSpec):
        raise ConfigError(f"{ref}: the occupant model must be a two-slice network (needs 'transition')")
    errors = two_slice_errors(model)
    if errors:
        raise ConfigError(f"{ref}: " + "; ".join(str(e) for e in errors))
    errors = door_model_errors(model, behaviour)
    if errors:
        raise ConfigError(f"{ref}: " + "; ".join(errors))
    return model


def config_from_dict(doc: Mapping[str, Any], base: Path = Path(".")) -> ScenarioConfig:
    """Build a ScenarioConfig; referenced files resolve against ``base``.

    Raises ConfigError for schema problems and FileNotFoundError for missing files.
    """
    top = {"name", "dbn", "calendar", "seed", "visitor_seed", "horizon", "dt", "start_hour",
           "physics", "boundary", "behaviour"}
    _strict(doc, top, "config", ("dbn", "calendar", "seed", "boundary"))
    try:
        behaviour = _behaviour(doc.get("behaviour", {}))

        pdoc = doc.get("physics", {})
        _strict(pdoc, {"volume", "door", "leakage", "per_person_rate", "initial_co2"}, "physics")
        ddoc = pdoc.get("door", {})
        _strict(ddoc, {"width", "height", "discharge_coefficient"}, "physics.door")
        defaults = PhysicsParams()
        door = OpeningGeometry(
            float(ddoc.get("width", defaults.door.width)),
            float(ddoc.get("height", defaults.door.height)),
            float(ddoc.get("discharge_coefficient", defaults.door.discharge_coefficient)),
        )
        phys = PhysicsParams(
            volume=float(pdoc.get("volume", defaults.volume)),
            door=door,
            leakage=float(pdoc.get("leakage", defaults.leakage)),
            per_person_rate=float(pdoc.get("per_person_rate", defaults.per_person_rate)),
            initial_co2=float(pdoc.get("initial_co2", defaults.initial_co2)),
        )

        bdoc = doc["boundary"]
        _strict(bdoc, {"corridor_temperature", "office_temperature", "corridor_co2", "humidity"}, "boundary",
                ("corridor_temperature", "office_temperature", "corridor_co2"))
        boundary = BoundarySeries(
            _series(bdoc["corridor_temperature"], "boundary.corridor_temperature"),
            _series(bdoc["office_temperature"], "boundary.office_temperature"),
            _series(bdoc["corridor_co2"], "boundary.corridor_co2"),
            _series(bdoc.get("humidity", 0.5), "boundary.humidity"),
        )
    except ConfigError:
        raise
    except (ValueError, TypeError) as e:
        raise ConfigError(str(e)) from None

    cal_path = base / doc["calendar"]
    try:
        calendar = parse_calendar(cal_path.read_text(encoding="utf-8"), name=Path(doc["calendar"]).stem)
    except FileNotFoundError:
        raise
    except ValueError as e:
        raise ConfigError(f"{doc['calendar']}: {e}") from None
    try:
        dbn = load_dbn(doc["dbn"], base, behaviour)
    except BNError as e:
        raise ConfigError(f"{doc['dbn']}: {e}") from None

    visitor_seed = doc.get("visitor_seed")
    try:
        return ScenarioConfig(
            calendar=calendar,
            dbn=dbn,
            boundary=boundary,
            physics=phys,
            behaviour=behaviour,
            dt=float(doc.get("dt", 3600.0)),
            horizon=_int(doc.get("horizon", 24), "horizon"),
            seed=_int(doc["seed"], "seed"),
            start_hour=_int(doc.get("start_hour", 0), "start_hour"),
            visitor_seed=None if visitor_seed is None else _int(visitor_seed, "visitor_seed"),
            name=str(doc.get("name", "scenario")),
            sources=(("calendar", str(cal_path)), ("dbn", doc["dbn"] if doc["dbn"] == BUILTIN_DOOR else str(base / doc["dbn"]))),
        )
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from None


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from None
    return config_from_dict(doc, path.parent)


def canonical_config(cfg: ScenarioConfig) -> Dict[str, Any]:
    """Semantic content of a config: referenced files by value, names and paths dropped."""
    b = cfg.behaviour
    return {
        "seed": cfg.seed,
        "visitor_seed": cfg.visitor_seed,
        "horizon": cfg.horizon,
        "dt": float(cfg.dt),
        "start_hour": cfg.start_hour,
        "physics": {
            "volume": cfg.physics.volume,
            "door": [cfg.physics.door.width, cfg.physics.door.height, cfg.physics.door.discharge_coefficient],
            "leakage": cfg.physics.leakage,
            "per_person_rate": cfg.physics.per_person_rate,
            "initial_co2": cfg.physics.initial_co2,
        },
        "boundary": {
            "corridor_temperature": list(cfg.boundary.corridor_temperature),
            "office_temperature": list(cfg.boundary.office_temperature),
            "corridor_co2": list(cfg.boundary.corridor_co2),
            "humidity": list(cfg.boundary.humidity),
        },
        "behaviour": {
            "lunch_out_probability": b.lunch_out_probability,
            "visitor_probability": dict(sorted(b.visitor_probability.items())),
            "metabolic_gain_per_person": b.metabolic_gain_per_person,
            "appliance_gain_occupied": b.appliance_gain_occupied,
            "appliance_gain_standby": b.appliance_gain_standby,
            "humidity_gain_per_person": b.humidity_gain_per_person,
            "setpoint_occupied": b.setpoint_occupied,
            "setpoint_unoccupied": b.setpoint_unoccupied,
            "co2_thresholds": list(b.co2_bins.thresholds),
            "co2_labels": list(b.co2_bins.labels),
            "initial_door_state": b.initial_door_state.value,
        },
        "calendar": [a.value for a in cfg.calendar.entries],
        "dbn": network_to_dict(cfg.dbn),
    }


def config_hash(cfg: ScenarioConfig) -> str:
    blob = json.dumps(canonical_config(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


# --- traces -----------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(x, ".6g")


def format_trace(records: Sequence[StepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for r in records:
        w.writerow([
            r.step, r.hour, r.activity, r.door_state, _fmt(r.door_open_ratio),
            int(r.occupied), int(r.visitor_present), _fmt(r.q_in), _fmt(r.q_out), _fmt(r.co2),
        ])
    return buf.getvalue()


def write_trace(records: Sequence[StepRecord], path) -> None:
    Path(path).write_text(format_trace(records), encoding="utf-8")


def parse_trace(text: str) -> List[StepRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != TRACE_COLUMNS:
        raise ValueError(f"trace header must be {','.join(TRACE_COLUMNS)}")
    out = []
    for line_no, row in enumerate(reader, start=2):
        if len(row) != len(TRACE_COLUMNS):
            raise ValueError(f"trace line {line_no}: expected {len(TRACE_COLUMNS)} fields")
        try:
            out.append(StepRecord(
                step=int(row[0]), hour=int(row[1]), activity=row[2], door_state=DoorState(row[3]).value,
                door_open_ratio=float(row[4]), occupied=_flag(row[5]), visitor_present=_flag(row[6]),
                q_in=float(row[7]), q_out=float(row[8]), co2=float(row[9]),
            ))
        except ValueError as e:
            raise ValueError(f"trace line {line_no}: {e}") from None
    return out


def _flag(s: str) -> bool:
    if s not in ("0", "1"):
        raise ValueError(f"expected 0 or 1, got {s!r}")
    return s == "1"


def read_trace(path) -> List[StepRecord]:
    return parse_trace(Path(path).read_text(encoding="utf-8"))


# --- summaries and manifests ------------------------------------------------


def format_summary(summary: EnsembleSummary) -> str:
    return json.dumps(summary.to_dict(), indent=2) + "\n"


def write_summary(summary: EnsembleSummary, path) -> None:
    Path(path).write_text(format_summary(summary), encoding="utf-8")


def read_summary(path) -> EnsembleSummary:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise ValueError("summary must be a JSON object")
    return EnsembleSummary.from_dict(doc)


def manifest(cfg: ScenarioConfig, started_at: str, outputs: Sequence[str], **extra) -> Dict[str, Any]:
    doc = {
        "tool": "occusim",
        "version": __version__,
        "config_hash": config_hash(cfg),
        "master_seed": cfg.seed,
        "started_at": started_at,
        "finished_at": None,
        "outputs": list(outputs),
    }
    doc.update(extra)
    return doc


def write_json(doc, path) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


# --- plot data --------------------------------------------------------------

SUMMARY_PLOT_COLUMNS = ("hour",) + tuple(d.value for d in DoorState) + ("co2_p5", "co2_p50", "co2_p95")
TRACE_PLOT_COLUMNS = ("step", "hour", "quantity", "value")
TRACE_PLOT_QUANTITIES = ("door_open_ratio", "occupied", "visitor_present", "q_in", "q_out", "co2")


def summary_plot_data(summary: EnsembleSummary) -> str:
    """One row per hour: hour, four door-state frequencies, CO2 p5/p50/p95."""
    lines = ["# " + " ".join(SUMMARY_PLOT_COLUMNS)]
    for i, h in enumerate(summary.hours):
        cols = [str(h)]
        cols += [_fmt(summary.door_frequency[d.value][i]) for d in DoorState]
        cols += [_fmt(summary.co2_quantiles[q][i]) for q in ("p5", "p50", "p95")]
        lines.append(" ".join(cols))
    return "\n".join(lines) + "\n"


def trace_plot_data(records: Sequence[StepRecord]) -> str:
    """Long format: one row per (step, quantity)."""
    lines = ["# " + " ".join(TRACE_PLOT_COLUMNS)]
    for r in records:
        for q in TRACE_PLOT_QUANTITIES:
            v = getattr(r, q)
            lines.append(f"{r.step} {r.hour} {q} {_fmt(float(v))}")
    return "\n".join(lines) + "\n"


def parse_plot_data(text: str) -> tuple:
    """(column names, rows) with numeric fields converted to float."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# "):
        raise ValueError("plot data must start with a '# ' header line")
    columns = tuple(lines[0][2:].split())
    rows = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != len(columns):
            raise ValueError(f"bad plot-data row: {ln!r}")
        rows.append(tuple(p if c == "quantity" else float(p) for c, p in zip(columns, parts)))
    return columns, rows


# --- observations -----------------------------------------------------------


class ColumnMismatch(ValueError):
    def __init__(self, missing, extra):
        self.missing = tuple(missing)
        self.extra = tuple(extra)
        super().__init__(f"observation columns differ from structure: missing {list(self.missing)}, extra {list(self.extra)}")


def read_observations(path, names: Sequence[str]) -> List[Dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [n for n in names if n not in header]
        extra = [h for h in header if h not in names]
        if missing or extra:
            raise ColumnMismatch(missing, extra)
        return [dict(row) for row in reader]
