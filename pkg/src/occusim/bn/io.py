"""JSON file format for networks and two-slice networks.

Network document::

    {
      "description": "optional free text",
      "variables": [{"name": "A", "domain": ["a0", "a1"]}, ...],
      "cpts": [
        {"child": "A", "parents": [], "rows": {"": [0.3, 0.7]}},
        {"child": "B", "parents": ["A"], "rows": {"a0": [0.8, 0.2], "a1": [0.1, 0.9]}}
      ]
    }

Row keys are the parent labels joined with ``|`` in the order of
``parents``; a root uses the empty key ``""``. Probability vectors follow
the child's ``domain`` order.

A two-slice document adds ``"transition"``, a list of CPTs in the same
shape whose parents may carry the ``previous:`` prefix. ``"cpts"`` then
describes slice 0. Any other key, at any level, is rejected.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Union

from .dbn import TwoSliceSpec, strip_previous
from .errors import BNError
from .network import Cpt, NetworkSpec, VariableSpec

ROW_SEP = "|"


class FormatError(BNError):
    pass


_TOP_KEYS = {"description", "variables", "cpts", "transition"}
_VAR_KEYS = {"name", "domain"}
_CPT_KEYS = {"child", "parents", "rows"}


def _check_keys(obj, allowed, where, required=()):
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise FormatError(f"{where}: unknown field(s) {unknown}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise FormatError(f"{where}: missing field(s) {missing}")


def split_key(key: str, n_parents: int) -> tuple:
    if n_parents == 0:
        if key != "":
            raise FormatError(f"root CPT row key must be empty, got {key!r}")
        return ()
    parts = tuple(key.split(ROW_SEP))
    if len(parts) != n_parents:
        raise FormatError(f"row key {key!r} has {len(parts)} labels, expected {n_parents}")
    return parts


def join_key(labels) -> str:
    return ROW_SEP.join(labels)


def _parse_cpt(obj, where, require_rows) -> Cpt:
    _check_keys(obj, _CPT_KEYS, where, ("child", "parents") + (("rows",) if require_rows else ()))
    parents = obj["parents"]
    if not isinstance(parents, list) or not all(isinstance(p, str) for p in parents):
        raise FormatError(f"{where}: parents must be a list of names")
    rows = obj.get("rows", {})
    if not isinstance(rows, dict):
        raise FormatError(f"{where}: rows must be an object")
    table = {}
    for key, vec in rows.items():
        if not isinstance(vec, list) or not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in vec):
            raise FormatError(f"{where}: row {key!r} must be a list of numbers")
        table[split_key(key, len(parents))] = tuple(float(p) for p in vec)
    return Cpt(obj["child"], tuple(parents), table)


def network_from_dict(doc: Dict[str, Any], require_rows: bool = True) -> Union[NetworkSpec, TwoSliceSpec]:
    """Parse a network or two-slice document. Structural checks only; call a validator afterwards."""
    _check_keys(doc, _TOP_KEYS, "document", ("variables", "cpts"))
    variables = []
    for i, v in enumerate(doc["variables"]):
        _check_keys(v, _VAR_KEYS, f"variables[{i}]", ("name", "domain"))
        if not isinstance(v["domain"], list):
            raise FormatError(f"variables[{i}]: domain must be a list")
        variables.append(VariableSpec(v["name"], tuple(v["domain"])))
    cpts = [_parse_cpt(c, f"cpts[{i}]", require_rows) for i, c in enumerate(doc["cpts"])]
    for c in cpts:
        if any(p != strip_previous(p) for p in c.parents):
            raise FormatError(f"slice-0 CPT of {c.child!r} may not use 'previous:' parents")
    net = NetworkSpec(tuple(variables), tuple(cpts))
    if "transition" not in doc:
        return net
    trans = [_parse_cpt(c, f"transition[{i}]", require_rows) for i, c in enumerate(doc["transition"])]
    return TwoSliceSpec(net, tuple(trans))


def _cpt_to_dict(c: Cpt) -> Dict[str, Any]:
    return {
        "child": c.child,
        "parents": list(c.parents),
        "rows": {join_key(k): list(v) for k, v in c.table.items()},
    }


def network_to_dict(model: Union[NetworkSpec, TwoSliceSpec], description: str | None = None) -> Dict[str, Any]:
    net = model.prior if isinstance(model, TwoSliceSpec) else model
    doc: Dict[str, Any] = {}
    if description:
        doc["description"] = description
    doc["variables"] = [{"name": v.name, "domain": list(v.domain)} for v in net.variables]
    doc["cpts"] = [_cpt_to_dict(c) for c in net.cpts]
    if isinstance(model, TwoSliceSpec):
        doc["transition"] = [_cpt_to_dict(c) for c in model.transition]
    return doc


def load_network(path, require_rows: bool = True) -> Union[NetworkSpec, TwoSliceSpec]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from None
    return network_from_dict(doc, require_rows=require_rows)


def dump_network(model, path, description: str | None = None) -> None:
    Path(path).write_text(json.dumps(network_to_dict(model, description), indent=2) + "\n", encoding="utf-8")
