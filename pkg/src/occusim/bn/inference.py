"""Exact inference: chain-rule joint, variable elimination, brute-force enumeration."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from .errors import (
    PartialAssignment,
    QueryEvidenceOverlap,
    UnknownVariable,
    ZeroProbabilityEvidence,
)
from .network import Distribution, NetworkSpec, check_evidence


@dataclass(frozen=True)
class Factor:
    scope: Tuple[str, ...]
    values: np.ndarray

    def aligned(self, scope: Sequence[str]) -> np.ndarray:
        """Values transposed to ``scope`` order with singleton axes for missing variables."""
        present = [v for v in scope if v in self.scope]
        arr = np.transpose(self.values, [self.scope.index(v) for v in present])
        shape = []
        it = iter(arr.shape)
        for v in scope:
            shape.append(next(it) if v in self.scope else 1)
        return arr.reshape(shape)

    def __mul__(self, other: "Factor") -> "Factor":
        scope = self.scope + tuple(v for v in other.scope if v not in self.scope)
        return Factor(scope, self.aligned(scope) * other.aligned(scope))

    def sum_out(self, var: str) -> "Factor":
        axis = self.scope.index(var)
        return Factor(self.scope[:axis] + self.scope[axis + 1:], self.values.sum(axis=axis))

    def reduce(self, var: str, index: int) -> "Factor":
        axis = self.scope.index(var)
        return Factor(self.scope[:axis] + self.scope[axis + 1:], np.take(self.values, index, axis=axis))


def network_factors(net: NetworkSpec, rename=None) -> List[Factor]:
    rename = rename or (lambda n: n)
    out = []
    for name in net.names:
        cpt = net.cpt(name)
        scope = tuple(rename(p) for p in cpt.parents) + (rename(name),)
        out.append(Factor(scope, net.cpt_array(name)))
    return out


def reduce_evidence(factors: Iterable[Factor], evidence_idx: Mapping[str, int]) -> List[Factor]:
    out = []
    for f in factors:
        for var in [v for v in f.scope if v in evidence_idx]:
            f = f.reduce(var, evidence_idx[var])
        out.append(f)
    return out


def _elimination_var(hidden: List[str], factors: List[Factor], position: Mapping[str, int]) -> str:
    """Min-degree choice; ties go to the variable declared first."""
    best = None
    for var in hidden:
        neighbours = set()
        for f in factors:
            if var in f.scope:
                neighbours.update(f.scope)
        key = (len(neighbours) - 1 if neighbours else 0, position.get(var, len(position)))
        if best is None or key < best[0]:
            best = (key, var)
    return best[1]


def eliminate(factors: List[Factor], keep: Sequence[str], order: Sequence[str]) -> np.ndarray:
    """Sum out every variable not in ``keep``; return the unnormalized table over ``keep``."""
    position = {v: i for i, v in enumerate(order)}
    factors = list(factors)
    hidden = []
    for f in factors:
        for v in f.scope:
            if v not in keep and v not in hidden:
                hidden.append(v)
    while hidden:
        var = _elimination_var(hidden, factors, position)
        hidden.remove(var)
        touching = [f for f in factors if var in f.scope]
        if not touching:
            continue
        factors = [f for f in factors if var not in f.scope]
        prod = touching[0]
        for f in touching[1:]:
            prod = prod * f
        factors.append(prod.sum_out(var))
    result = Factor((), np.array(1.0))
    for f in factors:
        result = result * f
    missing = [v for v in keep if v not in result.scope]
    if missing:
        raise UnknownVariable(missing[0], "query variable absent from every factor")
    return np.array(result.aligned(tuple(keep)), dtype=float)


def joint_probability(net: NetworkSpec, assignment: Mapping[str, str]) -> float:
    missing = [n for n in net.names if n not in assignment]
    if missing:
        raise PartialAssignment(missing)
    for name in assignment:
        net.variable(name)
    check_evidence(net, assignment)
    p = 1.0
    for name in net.names:
        cpt = net.cpt(name)
        row = cpt.row(tuple(assignment[q] for q in cpt.parents))
        p *= row[net.domain(name).index(assignment[name])]
    return p


def _check_query(net: NetworkSpec, evidence: Mapping[str, str], query: Sequence[str]) -> Tuple[str, ...]:
    query = tuple(query)
    for name in query:
        net.variable(name)
    for name in evidence:
        net.variable(name)
    check_evidence(net, evidence)
    overlap = [q for q in query if q in evidence]
    if overlap:
        raise QueryEvidenceOverlap(overlap)
    return query


def infer_posterior(net: NetworkSpec, evidence: Mapping[str, str], query: Sequence[str]) -> Distribution:
    """Exact P(query | evidence) by variable elimination."""
    query = _check_query(net, evidence, query)
    idx = {n: net.domain(n).index(lab) for n, lab in evidence.items()}
    factors = reduce_evidence(network_factors(net), idx)
    table = eliminate(factors, query, net.names)
    return _normalized(table, query, [net.domain(q) for q in query], evidence)


def _normalized(table: np.ndarray, query, domains, evidence) -> Distribution:
    total = float(table.sum())
    if total == 0.0:
        raise ZeroProbabilityEvidence(evidence)
    return Distribution.from_array(query, domains, table / total)


def enumerate_posterior(net: NetworkSpec, evidence: Mapping[str, str], query: Sequence[str]) -> Distribution:
    """Brute-force P(query | evidence) by summing the chain-rule joint. Exponential; for checking only."""
    query = _check_query(net, evidence, query)
    free = [n for n in net.names if n not in evidence]
    sums: Dict[tuple, float] = {tuple(k): 0.0 for k in itertools.product(*(net.domain(q) for q in query))}
    for labels in itertools.product(*(net.domain(n) for n in free)):
        full = dict(evidence)
        full.update(zip(free, labels))
        p = joint_probability(net, full)
        if p:
            sums[tuple(full[q] for q in query)] += p
    total = math.fsum(sums.values())
    if total == 0.0:
        raise ZeroProbabilityEvidence(evidence)
    return Distribution(query, {k: v / total for k, v in sums.items()})
