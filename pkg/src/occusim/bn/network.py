"""Discrete Bayesian network representation and validation.

A network is a list of categorical variables plus one conditional
probability table per variable. Tables are keyed by the tuple of parent
labels (in the order the parents are listed) and hold one probability
vector over the child's domain. Root variables use the empty tuple as key.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

from .errors import (
    BNError,
    CycleDetected,
    DuplicateVariable,
    IncompleteCpt,
    InvalidDomain,
    InvalidEvidence,
    InvalidNetwork,
    MalformedRow,
    MissingCpt,
    RowNotNormalized,
    UnknownVariable,
)

NORMALIZATION_TOL = 1e-9
RESERVED_CHARS = (":", "|")

Evidence = Dict[str, str]
Row = Tuple[str, ...]


@dataclass(frozen=True)
class VariableSpec:
    name: str
    domain: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))

    @property
    def size(self) -> int:
        return len(self.domain)

    def index(self, label: str) -> int:
        return self.domain.index(label)


@dataclass(frozen=True)
class Cpt:
    child: str
    parents: Tuple[str, ...]
    table: Mapping[Row, Tuple[float, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(
            self, "table", {tuple(k): tuple(float(p) for p in v) for k, v in self.table.items()}
        )

    def row(self, parent_labels: Sequence[str]) -> Tuple[float, ...]:
        return self.table[tuple(parent_labels)]


@dataclass(frozen=True)
class NetworkSpec:
    variables: Tuple[VariableSpec, ...]
    cpts: Tuple[Cpt, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "cpts", tuple(self.cpts))

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @cached_property
    def _var_index(self) -> Dict[str, VariableSpec]:
        return {v.name: v for v in self.variables}

    @cached_property
    def _cpt_index(self) -> Dict[str, Cpt]:
        return {c.child: c for c in self.cpts}

    def variable(self, name: str) -> VariableSpec:
        try:
            return self._var_index[name]
        except KeyError:
            raise UnknownVariable(name) from None

    def cpt(self, name: str) -> Cpt:
        try:
            return self._cpt_index[name]
        except KeyError:
            raise MissingCpt(name) from None

    def domain(self, name: str) -> Tuple[str, ...]:
        return self.variable(name).domain

    def parents(self, name: str) -> Tuple[str, ...]:
        return self.cpt(name).parents

    @cached_property
    def topological_order(self) -> Tuple[str, ...]:
        """Parents before children; ties broken by declaration order."""
        indegree = {n: len(self.parents(n)) for n in self.names}
        children: Dict[str, list] = {n: [] for n in self.names}
        for n in self.names:
            for p in self.parents(n):
                children[p].append(n)
        position = {n: i for i, n in enumerate(self.names)}
        ready = sorted((n for n, d in indegree.items() if d == 0), key=position.get)
        order = []
        while ready:
            n = ready.pop(0)
            order.append(n)
            for c in children[n]:
                indegree[c] -= 1
                if indegree[c] == 0:
                    ready.append(c)
            ready.sort(key=position.get)
        if len(order) != len(self.names):
            raise CycleDetected(_find_cycle(self.names, lambda n: self.parents(n)) or ())
        return tuple(order)

    def cpt_array(self, name: str) -> np.ndarray:
        """Dense table with axes (*parents, child)."""
        return self._arrays[name]

    @cached_property
    def _arrays(self) -> Dict[str, np.ndarray]:
        out = {}
        for cpt in self.cpts:
            out[cpt.child] = cpt_to_array(cpt, [self.domain(p) for p in cpt.parents], self.domain(cpt.child))
        return out


def cpt_to_array(cpt: Cpt, parent_domains: Sequence[Sequence[str]], child_domain: Sequence[str]) -> np.ndarray:
    shape = tuple(len(d) for d in parent_domains) + (len(child_domain),)
    arr = np.empty(shape, dtype=float)
    for idx in itertools.product(*(range(len(d)) for d in parent_domains)):
        key = tuple(d[i] for d, i in zip(parent_domains, idx))
        arr[idx] = cpt.table[key]
    return arr


@dataclass(frozen=True)
class Distribution:
    """Joint distribution over ``variables`` keyed by label tuples."""

    variables: Tuple[str, ...]
    probabilities: Mapping[Row, float]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "probabilities", {tuple(k): float(v) for k, v in self.probabilities.items()})

    def __getitem__(self, labels) -> float:
        if isinstance(labels, str):
            labels = (labels,)
        return self.probabilities.get(tuple(labels), 0.0)

    def marginal(self, name: str) -> Dict[str, float]:
        i = self.variables.index(name)
        out: Dict[str, float] = {}
        for k, p in self.probabilities.items():
            out[k[i]] = out.get(k[i], 0.0) + p
        return out

    def total(self) -> float:
        return math.fsum(self.probabilities.values())

    @classmethod
    def point_mass(cls, assignment: Mapping[str, str]) -> "Distribution":
        names = tuple(assignment)
        return cls(names, {tuple(assignment[n] for n in names): 1.0})

    @classmethod
    def from_array(cls, variables: Sequence[str], domains: Sequence[Sequence[str]], values: np.ndarray) -> "Distribution":
        probs = {}
        for idx in itertools.product(*(range(len(d)) for d in domains)):
            probs[tuple(d[i] for d, i in zip(domains, idx))] = float(values[idx])
        return cls(tuple(variables), probs)

    def to_array(self, domains: Sequence[Sequence[str]]) -> np.ndarray:
        arr = np.zeros(tuple(len(d) for d in domains))
        for k, p in self.probabilities.items():
            arr[tuple(d.index(lab) for d, lab in zip(domains, k))] = p
        return arr


def check_name(name: str) -> None:
    if not isinstance(name, str) or not name:
        raise InvalidDomain(str(name), "name must be a non-empty string")
    if any(c in name for c in RESERVED_CHARS):
        raise InvalidDomain(name, f"name may not contain any of {RESERVED_CHARS}")


def network_errors(spec: NetworkSpec) -> list:
    """Every invariant violation in ``spec``; empty when the network is valid."""
    errors: list = []
    seen: Dict[str, VariableSpec] = {}
    for v in spec.variables:
        try:
            check_name(v.name)
        except BNError as e:
            errors.append(e)
        if v.name in seen:
            errors.append(DuplicateVariable(v.name))
            continue
        seen[v.name] = v
        if len(v.domain) < 2:
            errors.append(InvalidDomain(v.name, "domain needs at least two labels"))
        if len(set(v.domain)) != len(v.domain):
            errors.append(InvalidDomain(v.name, "domain labels must be distinct"))
        for lab in v.domain:
            if not isinstance(lab, str) or not lab or "|" in lab:
                errors.append(InvalidDomain(v.name, f"bad label {lab!r}"))

    cpts: Dict[str, Cpt] = {}
    for c in spec.cpts:
        if c.child not in seen:
            errors.append(UnknownVariable(c.child, "CPT child"))
            continue
        if c.child in cpts:
            errors.append(MalformedRow(c.child, (), "duplicate CPT"))
            continue
        cpts[c.child] = c
    for name in seen:
        if name not in cpts:
            errors.append(MissingCpt(name))

    graph_ok = True
    for c in cpts.values():
        for p in c.parents:
            if p not in seen:
                errors.append(UnknownVariable(p, f"parent of {c.child!r}"))
                graph_ok = False
        if len(set(c.parents)) != len(c.parents) or c.child in c.parents:
            errors.append(MalformedRow(c.child, (), "repeated or self parent"))
            graph_ok = False
    if graph_ok:
        cycle = _find_cycle(list(cpts), lambda n: cpts[n].parents)
        if cycle:
            errors.append(CycleDetected(cycle))

    for c in cpts.values():
        if any(p not in seen for p in c.parents):
            continue
        errors.extend(_table_errors(c, [seen[p].domain for p in c.parents], seen[c.child].domain))
    return errors


def _table_errors(cpt: Cpt, parent_domains, child_domain) -> list:
    errors = []
    expected = set(itertools.product(*parent_domains))
    for key in itertools.product(*parent_domains):
        if key not in cpt.table:
            errors.append(IncompleteCpt(cpt.child, key))
    for key, row in cpt.table.items():
        if key not in expected:
            errors.append(MalformedRow(cpt.child, key, "parent assignment outside parent domains"))
            continue
        if len(row) != len(child_domain):
            errors.append(MalformedRow(cpt.child, key, f"expected {len(child_domain)} entries, got {len(row)}"))
            continue
        if any(not (0.0 <= p <= 1.0) for p in row):
            errors.append(MalformedRow(cpt.child, key, "entries must lie in [0, 1]"))
            continue
        total = math.fsum(row)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            errors.append(RowNotNormalized(cpt.child, key, total))
    return errors


def validate_network(spec: NetworkSpec) -> NetworkSpec:
    """Return ``spec`` unchanged if valid, else raise InvalidNetwork listing every violation."""
    errors = network_errors(spec)
    if errors:
        raise InvalidNetwork(errors)
    return spec


def check_evidence(spec: NetworkSpec, evidence: Mapping[str, str]) -> None:
    for name, label in evidence.items():
        if label not in spec.domain(name):
            raise InvalidEvidence(name, label)


def _find_cycle(nodes: Iterable[str], parents_of) -> Tuple[str, ...] | None:
    """Return one directed cycle (in parent -> child order) or None."""
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {n: WHITE for n in nodes}
    stack: list = []

    def visit(n):
        colour[n] = GREY
        stack.append(n)
        for p in parents_of(n):
            if p not in colour:
                continue
            if colour[p] == GREY:
                cyc = stack[stack.index(p):]
                # stack walks child -> parent; reverse into edge direction
                return tuple(reversed(cyc))
            if colour[p] == WHITE:
                found = visit(p)
                if found:
                    return found
        stack.pop()
        colour[n] = BLACK
        return None

    for n in list(colour):
        if colour[n] == WHITE:
            found = visit(n)
            if found:
                return found
    return None
