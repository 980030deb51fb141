"""Camera tuples and their grouping into vertex-disjoint batches."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CameraTuple:
    ids: tuple[int, ...]
    overlap: float | None = None

    def __post_init__(self):
        if len(set(self.ids)) != len(self.ids):
            raise ValueError(f"camera ids must be distinct: {self.ids}")


def neighbours(n_cameras: int, edges, ring: int = 1) -> list[set[int]]:
    """Adjacency within ``ring`` hops of the camera graph."""
    adj = [set() for _ in range(n_cameras)]
    for a, b in edges:
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    if ring == 1:
        return adj
    out = [set(s) for s in adj]
    frontier = [set(s) for s in adj]
    for _ in range(ring - 1):
        nxt = []
        for v in range(n_cameras):
            reach = set().union(*(adj[u] for u in frontier[v])) if frontier[v] else set()
            reach -= out[v] | {v}
            out[v] |= reach
            nxt.append(reach)
        frontier = nxt
    return out


def candidate_tuples(n_cameras: int, edges, k: int, ring: int = 1) -> list[tuple[int, ...]]:
    adj = neighbours(n_cameras, edges, ring)
    if k == 1:
        return [(c,) for c in range(n_cameras)]
    if k == 2:
        return sorted({(a, b) for a in range(n_cameras) for b in adj[a] if a < b})
    if k == 3:
        # connected triples: a centre with two of its neighbours
        triples = set()
        for v in range(n_cameras):
            nb = sorted(adj[v])
            for i in range(len(nb)):
                for j in range(i + 1, len(nb)):
                    triples.add(tuple(sorted((nb[i], nb[j], v))))
        return sorted(triples)
    raise ValueError("tuples larger than 3 are not supported")


def independent_tuple_schedule(n_cameras: int, edges, k: int, ring: int = 1,
                               visibility=None) -> list[list[CameraTuple]]:
    """Greedy first-fit colouring of tuples by shared cameras.

    Each colour class is a batch whose tuples share no camera; for k = 2 this
    is a proper edge colouring, so every edge appears in exactly one batch.
    """
    if k == 1:
        return [[CameraTuple((c,)) for c in range(n_cameras)]]
    used: list[set[int]] = []
    batches: list[list[CameraTuple]] = []
    for ids in candidate_tuples(n_cameras, edges, k, ring):
        overlap = measure_overlap(ids, visibility) if visibility is not None else None
        for b, cams in enumerate(used):
            if cams.isdisjoint(ids):
                cams.update(ids)
                batches[b].append(CameraTuple(ids, overlap))
                break
        else:
            used.append(set(ids))
            batches.append([CameraTuple(ids, overlap)])
    return batches


def measure_overlap(ids, visibility) -> float:
    """Share of samples seen by every camera in ``ids`` among those seen by any."""
    matrix = visibility.matrix if hasattr(visibility, "matrix") else np.asarray(visibility)
    rows = matrix[list(ids)]
    union = np.count_nonzero(rows.any(axis=0))
    if union == 0:
        return 0.0
    return np.count_nonzero(rows.all(axis=0)) / union
