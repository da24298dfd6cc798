"""Ancestral sampling with rejection for evidence."""

from __future__ import annotations

from typing import Dict, List, Mapping, Optional

import numpy as np

from .errors import RejectionCapExceeded
from .network import NetworkSpec, check_evidence

DEFAULT_REJECTION_CAP = 100_000


def draw_index(probs, rng: np.random.Generator) -> int:
    """Inverse-CDF draw from one probability vector using a single uniform."""
    cdf = np.cumsum(probs)
    i = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(i, len(cdf) - 1)


def sample_assignment(
    net: NetworkSpec,
    evidence: Optional[Mapping[str, str]] = None,
    rng: Optional[np.random.Generator] = None,
    max_attempts: int = DEFAULT_REJECTION_CAP,
) -> Dict[str, str]:
    """Draw one full assignment in topological order.

    Evidence is enforced by rejection: a draw that disagrees with an observed
    variable restarts the whole sweep, which keeps the result an exact sample
    of the posterior.
    """
    if rng is None:
        raise ValueError("a seeded numpy Generator is required")
    evidence = dict(evidence or {})
    for name in evidence:
        net.variable(name)
    check_evidence(net, evidence)
    order = net.topological_order
    for _ in range(max_attempts):
        out: Dict[str, str] = {}
        for name in order:
            cpt = net.cpt(name)
            row = cpt.row(tuple(out[p] for p in cpt.parents))
            label = net.domain(name)[draw_index(row, rng)]
            if name in evidence and label != evidence[name]:
                break
            out[name] = label
        else:
            return {n: out[n] for n in net.names}
    raise RejectionCapExceeded(max_attempts)


def sample_indices(net: NetworkSpec, n: int, rng: np.random.Generator) -> Dict[str, np.ndarray]:
    """Vectorized ancestral sampling of ``n`` unconditioned records, as label indices."""
    out: Dict[str, np.ndarray] = {}
    for name in net.topological_order:
        arr = net.cpt_array(name)
        parents = net.parents(name)
        rows = arr[tuple(out[p] for p in parents)] if parents else np.broadcast_to(arr, (n, arr.shape[-1]))
        cdf = np.cumsum(rows, axis=1)
        u = rng.random(n)[:, None] * cdf[:, -1:]
        idx = (u >= cdf).sum(axis=1)
        out[name] = np.minimum(idx, arr.shape[-1] - 1)
    return {k: out[k] for k in net.names}


def sample_records(net: NetworkSpec, n: int, rng: np.random.Generator) -> List[Dict[str, str]]:
    idx = sample_indices(net, n, rng)
    domains = {k: net.domain(k) for k in net.names}
    return [{k: domains[k][idx[k][i]] for k in net.names} for i in range(n)]
