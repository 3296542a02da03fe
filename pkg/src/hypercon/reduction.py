"""Candidate-vertex reduction: which pins can be skipped before solving.

If every edge through vertex i also passes through vertex j (incidence
containment E(i) <= E(j)), the pinned minimum at i is no larger than at j,
so j never attains the overall minimum strictly and can be dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hypergraph import Hypergraph, degrees

__all__ = ["CandidateSet", "dominance_prune", "candidate_vertices", "STRATEGIES"]

STRATEGIES = ("all", "dominance", "min_degree")


@dataclass(frozen=True)
class CandidateSet:
    """Vertices (0-based, ascending) that still need a pinned solve."""

    vertices: tuple[int, ...]
    provenance: tuple[str, ...]

    def __post_init__(self):
        if len(self.vertices) != len(self.provenance):
            raise ValueError("provenance must be parallel to vertices")
        if not self.vertices:
            raise ValueError("candidate set may not be empty")
        if list(self.vertices) != sorted(set(self.vertices)):
            raise ValueError("vertices must be ascending and unique")


def dominance_prune(H: Hypergraph) -> CandidateSet:
    """Drop vertex j when some vertex i has E(i) contained in E(j).

    Equal incidence sets keep only their smallest index. O(n^2) set
    comparisons; fine for the instance sizes this solver targets.
    """
    inc = [frozenset(lst) for lst in degrees(H).incidence]
    n = H.n
    kept = []
    for j in range(n):
        dominated = False
        for i in range(n):
            if i == j:
                continue
            if inc[i] < inc[j] or (inc[i] == inc[j] and i < j):
                dominated = True
                break
        if not dominated:
            kept.append(j)
    return CandidateSet(tuple(kept), ("dominance",) * len(kept))


def candidate_vertices(H: Hypergraph, strategy: str = "dominance") -> CandidateSet:
    """Candidate pins for the given strategy.

    "all" is exact; "dominance" is exact (incidence containment); and
    "min_degree" is a heuristic outside the structured classes where
    minimum-degree attainment is proven.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    if strategy == "all":
        verts = tuple(range(H.n))
        return CandidateSet(verts, ("all",) * len(verts))
    if strategy == "dominance":
        return dominance_prune(H)
    prof = degrees(H)
    verts = tuple(int(v) for v in np.flatnonzero(prof.degrees == prof.min_degree))
    return CandidateSet(verts, ("min_degree",) * len(verts))
