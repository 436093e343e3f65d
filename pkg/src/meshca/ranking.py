"""Multi-criterion node scoring and the descending link schedule.

Nodes are scored on four criteria: hop count to the nearest gateway,
Euclidean proximity to the nearest gateway, usage frequency (how many
nodes route through this node on some shortest path toward a gateway),
and radio capacity. Each criterion is min-max normalized, inverted where
smaller is better, and averaged. A link's rank is the sum of its
endpoint scores; the schedule orders links by descending rank and drives
the greedy channel assignment.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import NoGateway
from .topology import Topology

CRITERIA = ("hops", "proximity", "usage", "capacity")
DEFAULT_WEIGHTS = {c: 1.0 for c in CRITERIA}


@dataclass(frozen=True)
class NodeScore:
    node_id: int
    hops: int
    proximity: float
    usage: int
    capacity: int
    normalized: dict[str, float]
    score: float


@dataclass(frozen=True)
class LinkRankTable:
    """Per-link rank values and the rank-descending schedule.

    ``ranks`` is indexed by link id; ``schedule`` is a permutation of all
    link ids, ties broken by lower link id.
    """

    ranks: np.ndarray
    schedule: np.ndarray


def _bfs_hops(t: Topology, sources: list[int]) -> np.ndarray:
    hops = np.full(t.node_count, -1, dtype=np.int64)
    q = deque()
    for s in sources:
        hops[s] = 0
        q.append(s)
    while q:
        v = q.popleft()
        for w, _ in t.adjacency[v]:
            if hops[w] < 0:
                hops[w] = hops[v] + 1
                q.append(w)
    return hops


def _minmax(values: np.ndarray, invert: bool) -> np.ndarray:
    """Min-max scale to [0, 1]; all-equal inputs map to 1.0 for every
    node (avoids 0/0 and keeps equal nodes equally ranked)."""
    values = np.asarray(values, dtype=float)
    lo, hi = values.min(), values.max()
    if hi == lo:
        return np.ones_like(values)
    scaled = (values - lo) / (hi - lo)
    return 1.0 - scaled if invert else scaled


def score_nodes(t: Topology,
                weights: dict[str, float] | None = None) -> list[NodeScore]:
    """Score every node on the four ranking criteria.

    Hops and proximity are computed against the nearest gateway; usage
    frequency counts, for each node v, how many nodes u have v on at
    least one shortest path from u to u's nearest gateway (endpoints
    included). Smaller hops/proximity and larger usage/capacity all map
    to higher normalized values. ``weights`` reweights the criteria
    (default equal).

    Raises
    ------
    NoGateway
        If the topology has no gateway node.
    """
    if not t.gateways:
        raise NoGateway("topology has no gateway node")
    w = dict(DEFAULT_WEIGHTS)
    if weights:
        w.update(weights)

    gw = list(t.gateways)
    hops = _bfs_hops(t, gw)
    gw_pos = t.positions[gw]
    proximity = np.min(
        np.linalg.norm(t.positions[:, None, :] - gw_pos[None, :, :], axis=-1),
        axis=1,
    )
    # v lies on a shortest path from u toward the gateway set iff
    # d(u, v) + hops(v) == hops(u)
    n = t.node_count
    usage = np.zeros(n, dtype=np.int64)
    for u in range(n):
        d_u = _bfs_hops(t, [u])
        usage += (d_u + hops == hops[u]).astype(np.int64)

    capacity = t.radios
    norm = {
        "hops": _minmax(hops, invert=True),
        "proximity": _minmax(proximity, invert=True),
        "usage": _minmax(usage, invert=False),
        "capacity": _minmax(capacity, invert=False),
    }
    total_w = sum(w[c] for c in CRITERIA)
    scores = sum(w[c] * norm[c] for c in CRITERIA) / total_w
    return [
        NodeScore(
            node_id=i,
            hops=int(hops[i]),
            proximity=float(proximity[i]),
            usage=int(usage[i]),
            capacity=int(capacity[i]),
            normalized={c: float(norm[c][i]) for c in CRITERIA},
            score=float(scores[i]),
        )
        for i in range(n)
    ]


def rank_links(t: Topology, scores: list[NodeScore]) -> LinkRankTable:
    """Rank links by the sum of their endpoint scores and order the
    schedule by descending rank, lower link id first on ties."""
    by_id = {s.node_id: s.score for s in scores}
    ranks = np.array(
        [by_id[l.a] + by_id[l.b] for l in t.links], dtype=float
    )
    schedule = np.array(
        sorted(range(t.link_count), key=lambda lid: (-ranks[lid], lid)),
        dtype=np.int64,
    )
    return LinkRankTable(ranks=ranks, schedule=schedule)
