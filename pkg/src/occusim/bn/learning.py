"""CPT estimation from complete observations with a symmetric Dirichlet prior."""

from __future__ import annotations

import itertools
import logging
from typing import Mapping, Sequence

import numpy as np

from .errors import LabelOutOfDomain, PartialAssignment
from .network import Cpt, NetworkSpec, validate_network

log = logging.getLogger(__name__)


def learn_cpts(
    structure: NetworkSpec,
    observations: Sequence[Mapping[str, str]],
    prior_strength: float = 1.0,
) -> NetworkSpec:
    """Fill every CPT of ``structure`` from counts.

    Each row is ``(count + k) / (row_total + k * |domain|)`` where ``k`` is
    ``prior_strength``; ``k = 0`` gives maximum likelihood. A row with no
    observations and no prior falls back to uniform and is logged.
    """
    if prior_strength < 0:
        raise ValueError(f"prior_strength must be >= 0, got {prior_strength}")
    names = structure.names
    index = {n: {lab: i for i, lab in enumerate(structure.domain(n))} for n in names}
    coded = np.empty((len(observations), len(names)), dtype=np.int64)
    for r, rec in enumerate(observations):
        for j, n in enumerate(names):
            if n not in rec:
                raise PartialAssignment([n])
            try:
                coded[r, j] = index[n][rec[n]]
            except KeyError:
                raise LabelOutOfDomain(r, n, rec[n]) from None

    column = {n: j for j, n in enumerate(names)}
    cpts = []
    for n in names:
        parents = structure.parents(n)
        shape = tuple(structure.variable(p).size for p in parents) + (structure.variable(n).size,)
        counts = np.zeros(shape)
        cols = [column[p] for p in parents] + [column[n]]
        np.add.at(counts, tuple(coded[:, c] for c in cols), 1.0)
        table = {}
        for idx in itertools.product(*(range(s) for s in shape[:-1])):
            row = counts[idx] + prior_strength
            total = row.sum()
            key = tuple(structure.domain(p)[i] for p, i in zip(parents, idx))
            if total == 0:
                log.warning("CPT %s row %s has no data and no prior; using uniform", n, key)
                row = np.ones(shape[-1])
                total = float(shape[-1])
            table[key] = tuple(row / total)
        cpts.append(Cpt(n, parents, table))
    return validate_network(NetworkSpec(structure.variables, tuple(cpts)))
