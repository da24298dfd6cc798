"""Two-slice dynamic Bayesian networks: unrolling and exact forward filtering.

A two-slice model pairs a slice-0 network with a transition CPT for every
slice variable. A transition parent written ``previous:X`` refers to X in
the preceding slice; plain names refer to the current slice. The variables
that appear as ``previous:`` parents form the interface, and filtering
carries a joint belief over exactly those variables from step to step.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from .errors import BeliefMismatch, InvalidDomain, InvalidNetwork, MalformedRow, MissingCpt, NoInterSliceEdge, UnknownVariable
from .inference import Factor, _normalized, eliminate, network_factors
from .network import Cpt, Distribution, NetworkSpec, VariableSpec, check_evidence, cpt_to_array, network_errors

PREVIOUS = "previous:"


def is_previous(parent: str) -> bool:
    return parent.startswith(PREVIOUS)


def strip_previous(parent: str) -> str:
    return parent[len(PREVIOUS):] if is_previous(parent) else parent


def slice_name(name: str, t: int) -> str:
    return f"{name}@{t}"


@dataclass(frozen=True)
class TwoSliceSpec:
    prior: NetworkSpec
    transition: Tuple[Cpt, ...]

    def __post_init__(self):
        object.__setattr__(self, "transition", tuple(self.transition))

    @property
    def variables(self) -> Tuple[VariableSpec, ...]:
        return self.prior.variables

    @property
    def names(self) -> Tuple[str, ...]:
        return self.prior.names

    def domain(self, name: str) -> Tuple[str, ...]:
        return self.prior.domain(name)

    @cached_property
    def _transition_index(self) -> Dict[str, Cpt]:
        return {c.child: c for c in self.transition}

    def transition_cpt(self, name: str) -> Cpt:
        try:
            return self._transition_index[name]
        except KeyError:
            raise MissingCpt(name) from None

    @cached_property
    def interface(self) -> Tuple[str, ...]:
        """Slice variables referenced as ``previous:`` parents, in declaration order."""
        used = {strip_previous(p) for c in self.transition for p in c.parents if is_previous(p)}
        return tuple(n for n in self.names if n in used)

    @cached_property
    def _transition_arrays(self) -> Dict[str, np.ndarray]:
        return {
            c.child: cpt_to_array(c, [self.domain(strip_previous(p)) for p in c.parents], self.domain(c.child))
            for c in self.transition
        }

    def transition_factors(self, prev_suffix: str = "@prev") -> List[Factor]:
        out = []
        for name in self.names:
            cpt = self.transition_cpt(name)
            scope = tuple(strip_previous(p) + prev_suffix if is_previous(p) else p for p in cpt.parents)
            out.append(Factor(scope + (name,), self._transition_arrays[name]))
        return out


def two_slice_errors(ts: TwoSliceSpec) -> list:
    errors = network_errors(ts.prior)
    if errors:
        return errors
    names = set(ts.names)
    for n in ts.names:
        if "@" in n:
            errors.append(InvalidDomain(n, "slice variable names may not contain '@'"))
    seen = set()
    for c in ts.transition:
        if c.child not in names:
            errors.append(UnknownVariable(c.child, "transition CPT child"))
        elif c.child in seen:
            errors.append(MalformedRow(c.child, (), "duplicate transition CPT"))
        seen.add(c.child)
        for p in c.parents:
            if strip_previous(p) not in names:
                errors.append(UnknownVariable(p, f"transition parent of {c.child!r}"))
    for n in names - seen:
        errors.append(MissingCpt(n))
    if errors:
        return errors
    if not ts.interface:
        return [NoInterSliceEdge()]
    # every intra/inter-slice rule is checked on the two-step unrolling
    return network_errors(_unroll_unchecked(ts, 2))


def validate_two_slice(ts: TwoSliceSpec) -> TwoSliceSpec:
    errors = two_slice_errors(ts)
    if errors:
        raise InvalidNetwork(errors)
    return ts


def _unroll_unchecked(ts: TwoSliceSpec, horizon: int) -> NetworkSpec:
    variables = []
    cpts = []
    for t in range(horizon):
        for v in ts.variables:
            variables.append(VariableSpec(slice_name(v.name, t), v.domain))
            if t == 0:
                c = ts.prior.cpt(v.name)
                parents = tuple(slice_name(p, 0) for p in c.parents)
            else:
                c = ts.transition_cpt(v.name)
                parents = tuple(
                    slice_name(strip_previous(p), t - 1) if is_previous(p) else slice_name(p, t) for p in c.parents
                )
            cpts.append(Cpt(slice_name(v.name, t), parents, c.table))
    return NetworkSpec(tuple(variables), tuple(cpts))


def unroll_dbn(ts: TwoSliceSpec, horizon: int) -> NetworkSpec:
    """Static network with ``horizon`` copies of the slice, variables renamed ``name@t``."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    net = _unroll_unchecked(ts, horizon)
    errors = network_errors(net)
    if errors:
        raise InvalidNetwork(errors)
    return net


def _posterior(factors, domains: Mapping[str, Sequence[str]], evidence, query, order) -> Distribution:
    # evidence on a query variable becomes an indicator so the result is a point mass
    reduced = []
    for f in factors:
        for var in [v for v in f.scope if v in evidence and v not in query]:
            f = f.reduce(var, domains[var].index(evidence[var]))
        reduced.append(f)
    for q in query:
        if q in evidence:
            ind = np.zeros(len(domains[q]))
            ind[domains[q].index(evidence[q])] = 1.0
            reduced.append(Factor((q,), ind))
    table = eliminate(reduced, query, order)
    return _normalized(table, query, [domains[q] for q in query], evidence)


def initial_belief(ts: TwoSliceSpec, evidence: Mapping[str, str] | None = None) -> Distribution:
    """Belief over the interface after observing slice 0."""
    evidence = dict(evidence or {})
    for n in evidence:
        ts.prior.variable(n)
    check_evidence(ts.prior, evidence)
    domains = {n: ts.domain(n) for n in ts.names}
    return _posterior(network_factors(ts.prior), domains, evidence, ts.interface, ts.names)


def filter_step(ts: TwoSliceSpec, belief: Distribution, evidence: Mapping[str, str] | None = None) -> Distribution:
    """Advance an interface belief one slice and condition on that slice's evidence."""
    evidence = dict(evidence or {})
    interface = ts.interface
    if set(belief.variables) != set(interface) or len(belief.variables) != len(interface):
        raise BeliefMismatch(interface, belief.variables)
    for n in evidence:
        ts.prior.variable(n)
    check_evidence(ts.prior, evidence)

    prev = tuple(n + "@prev" for n in interface)
    domains: Dict[str, Sequence[str]] = {n: ts.domain(n) for n in ts.names}
    domains.update({p: ts.domain(n) for p, n in zip(prev, interface)})
    belief_arr = belief.to_array([ts.domain(n) for n in belief.variables])
    belief_factor = Factor(tuple(n + "@prev" for n in belief.variables), belief_arr)
    factors = [belief_factor] + ts.transition_factors("@prev")
    return _posterior(factors, domains, evidence, interface, prev + ts.names)


def filter_sequence(ts: TwoSliceSpec, evidence_seq: Sequence[Mapping[str, str]]) -> List[Distribution]:
    """Interface beliefs after each slice of ``evidence_seq``."""
    beliefs = [initial_belief(ts, evidence_seq[0] if evidence_seq else {})]
    for ev in evidence_seq[1:]:
        beliefs.append(filter_step(ts, beliefs[-1], ev))
    return beliefs
