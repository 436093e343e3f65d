"""Random mesh topologies and the derived conflict graph.

A topology is a connected random geometric graph: nodes are placed
uniformly in the area and any two nodes closer than the communication
range share a link. Placement is retried until the link graph comes out
connected. The conflict graph lifts links to vertices and joins two
links whenever the closest pair of their endpoints is within the
interference distance, which is the protocol interference model used by
every downstream computation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .errors import ConnectivityUnreachable, ParseError

PLACEMENT_ATTEMPTS = 1000


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    radios: int
    is_gateway: bool = False


@dataclass(frozen=True)
class Link:
    """Undirected link between nodes ``a`` and ``b`` (one record per pair)."""

    id: int
    a: int
    b: int
    length: float
    required_rate: float


class Topology:
    """Immutable node/link structure plus cached adjacency.

    Safe to share across threads; all mutation happens during
    construction.
    """

    def __init__(self, nodes: list[Node], links: list[Link],
                 params: ScenarioConfig, seed: int):
        self.nodes = tuple(nodes)
        self.links = tuple(links)
        self.params = params
        self.seed = seed
        self.positions = np.array([(n.x, n.y) for n in nodes], dtype=float)
        self.radios = np.array([n.radios for n in nodes], dtype=np.int64)
        self.gateways = tuple(n.id for n in nodes if n.is_gateway)
        # endpoint arrays indexed by link id
        self.link_a = np.array([l.a for l in links], dtype=np.int64)
        self.link_b = np.array([l.b for l in links], dtype=np.int64)
        self.lengths = np.array([l.length for l in links], dtype=float)
        self.required_rates = np.array([l.required_rate for l in links], dtype=float)
        self.adjacency: list[list[tuple[int, int]]] = [[] for _ in nodes]
        self.incident_links: list[list[int]] = [[] for _ in nodes]
        for l in links:
            self.adjacency[l.a].append((l.b, l.id))
            self.adjacency[l.b].append((l.a, l.id))
            self.incident_links[l.a].append(l.id)
            self.incident_links[l.b].append(l.id)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def link_count(self) -> int:
        return len(self.links)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "params": self.params.to_dict(),
            "nodes": [
                {"id": n.id, "x": n.x, "y": n.y, "radios": n.radios,
                 "gateway": n.is_gateway}
                for n in self.nodes
            ],
            "links": [
                {"id": l.id, "a": l.a, "b": l.b, "required_rate": l.required_rate}
                for l in self.links
            ],
        }


class ConflictGraph:
    """Link-conflict structure: vertices are link ids, edges join links
    whose closest endpoints are within the interference distance."""

    def __init__(self, link_count: int, edges: np.ndarray):
        self.link_count = link_count
        self.edges = edges  # (E, 2) with edges[:, 0] < edges[:, 1]
        self.neighbors: list[np.ndarray] = [
            np.empty(0, dtype=np.int64) for _ in range(link_count)
        ]
        nbr: list[list[int]] = [[] for _ in range(link_count)]
        for a, b in edges:
            nbr[a].append(b)
            nbr[b].append(a)
        for i, lst in enumerate(nbr):
            self.neighbors[i] = np.array(sorted(lst), dtype=np.int64)
        self.degrees = np.array([len(n) for n in self.neighbors], dtype=np.int64)
        # directed edge arrays (both orientations), sorted by source, for
        # vectorized per-link accumulation
        if len(edges):
            src = np.concatenate([edges[:, 0], edges[:, 1]])
            dst = np.concatenate([edges[:, 1], edges[:, 0]])
            order = np.argsort(src, kind="stable")
            self.src = src[order]
            self.dst = dst[order]
        else:
            self.src = np.empty(0, dtype=np.int64)
            self.dst = np.empty(0, dtype=np.int64)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


def _euclid(ax: float, ay: float, bx: float, by: float) -> float:
    # single scalar formula so generator and loader agree bit-for-bit
    return math.sqrt((ax - bx) ** 2 + (ay - by) ** 2)


def _pairwise_link_distances(positions: np.ndarray, link_a: np.ndarray,
                             link_b: np.ndarray) -> np.ndarray:
    """(L, L) matrix of minimum endpoint distances between links."""
    node_dist = np.linalg.norm(
        positions[:, None, :] - positions[None, :, :], axis=-1
    )
    d = np.minimum(
        np.minimum(node_dist[np.ix_(link_a, link_a)],
                   node_dist[np.ix_(link_a, link_b)]),
        np.minimum(node_dist[np.ix_(link_b, link_a)],
                   node_dist[np.ix_(link_b, link_b)]),
    )
    return d


def min_link_distance(a: Link, b: Link, t: Topology) -> float:
    """Shortest Euclidean distance between any endpoint of ``a`` and any
    endpoint of ``b``."""
    p = t.positions
    return min(
        float(np.linalg.norm(p[i] - p[j]))
        for i in (a.a, a.b)
        for j in (b.a, b.b)
    )


def build_conflict_graph(t: Topology) -> ConflictGraph:
    """Conflict edges join distinct links whose minimum endpoint distance
    is strictly below the interference distance.

    Links sharing a node are always in conflict (distance zero). The
    result is symmetric and irreflexive.
    """
    L = t.link_count
    if L == 0:
        return ConflictGraph(0, np.empty((0, 2), dtype=np.int64))
    d = _pairwise_link_distances(t.positions, t.link_a, t.link_b)
    mask = d < t.params.interference_distance
    np.fill_diagonal(mask, False)
    ia, ib = np.nonzero(np.triu(mask, k=1))
    edges = np.stack([ia, ib], axis=1).astype(np.int64)
    return ConflictGraph(L, edges)


def _connected(n: int, pairs: np.ndarray) -> bool:
    if n == 0:
        return False
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in pairs:
        adj[a].append(b)
        adj[b].append(a)
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if not seen[w]:
                seen[w] = True
                stack.append(w)
    return bool(seen.all())


def _prune_to_degree_cap(n: int, pairs: list[tuple[int, int]],
                         lengths: dict[tuple[int, int], float],
                         cap: int) -> list[tuple[int, int]]:
    """Drop each over-connected node's longest links while the graph stays
    connected. The cap is a target, not a guarantee: a removal that would
    disconnect the graph is skipped."""
    kept = set(pairs)
    degree = [0] * n
    for a, b in pairs:
        degree[a] += 1
        degree[b] += 1
    for v in range(n):
        if degree[v] <= cap:
            continue
        incident = sorted(
            (p for p in kept if v in p),
            key=lambda p: (-lengths[p], p),
        )
        for p in incident:
            if degree[v] <= cap:
                break
            trial = kept - {p}
            if _connected(n, np.array(sorted(trial), dtype=np.int64)):
                kept = trial
                degree[p[0]] -= 1
                degree[p[1]] -= 1
    return sorted(kept)


def _zero_interference_rate(length: float, cfg: ScenarioConfig) -> float:
    rm = cfg.radio_model
    snr = rm.tss / (10.0 * rm.path_loss_exp
                    * math.log10(max(length, rm.min_distance)))
    return rm.bandwidth * math.log2(1.0 + snr)


def generate_topology(config: ScenarioConfig, seed: int) -> Topology:
    """Generate a connected random topology for the given scenario.

    Placement is rejection-sampled: node positions are drawn uniformly in
    the area until the induced link graph (pairs within the communication
    range) is connected, up to ``PLACEMENT_ATTEMPTS`` draws. Degrees are
    then pruned toward the configured cap, the ``gateway_count`` nodes
    nearest the area center are marked gateways, and each link gets a
    required rate drawn uniformly from ``[rate_lo, rate_hi]`` times its
    zero-interference rate.

    Deterministic for a given ``(config, seed)`` pair.

    Raises
    ------
    InvalidConfig
        If the configuration fails validation.
    ConnectivityUnreachable
        If no connected placement is found within the attempt budget.
    """
    config.validate()
    rng = np.random.default_rng(seed)
    n = config.node_count
    for _ in range(PLACEMENT_ATTEMPTS):
        xs = rng.uniform(0.0, config.area_w, size=n)
        ys = rng.uniform(0.0, config.area_h, size=n)
        positions = np.stack([xs, ys], axis=1)
        dist = np.linalg.norm(positions[:, None, :] - positions[None, :, :],
                              axis=-1)
        ia, ib = np.nonzero(np.triu(dist <= config.comm_range, k=1))
        pairs = list(zip(ia.tolist(), ib.tolist()))
        if not pairs:
            continue
        if _connected(n, np.array(pairs, dtype=np.int64)):
            break
    else:
        raise ConnectivityUnreachable(
            f"no connected placement for {n} nodes in "
            f"{config.area_w}x{config.area_h} with range {config.comm_range} "
            f"after {PLACEMENT_ATTEMPTS} attempts"
        )

    lengths = {
        (int(a), int(b)): _euclid(xs[a], ys[a], xs[b], ys[b])
        for a, b in pairs
    }
    pairs = _prune_to_degree_cap(n, pairs, lengths, config.degree_cap)

    center = np.array([config.area_w / 2.0, config.area_h / 2.0])
    center_dist = np.linalg.norm(positions - center, axis=1)
    gateway_ids = set(np.argsort(center_dist, kind="stable")
                      [: config.gateway_count].tolist())

    nodes = [
        Node(id=i, x=float(xs[i]), y=float(ys[i]), radios=config.radios,
             is_gateway=i in gateway_ids)
        for i in range(n)
    ]
    links = []
    for lid, (a, b) in enumerate(pairs):
        length = lengths[(a, b)]
        cap_rate = _zero_interference_rate(length, config)
        required = float(rng.uniform(config.rate_lo, config.rate_hi) * cap_rate)
        links.append(Link(id=lid, a=a, b=b, length=length,
                          required_rate=required))
    return Topology(nodes, links, config, seed)


def save_topology(t: Topology, path: str | Path) -> None:
    Path(path).write_text(json.dumps(t.to_dict(), indent=1) + "\n")


def load_topology(path: str | Path) -> Topology:
    """Load a topology document written by :func:`save_topology`.

    Link lengths are recomputed from node coordinates, so a save/load
    round trip is bit-exact.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except (json.JSONDecodeError, OSError) as exc:
        raise ParseError(f"cannot read topology file {path}: {exc}") from exc
    try:
        params = ScenarioConfig.from_dict(doc["params"])
        nodes = [
            Node(id=nd["id"], x=nd["x"], y=nd["y"], radios=nd["radios"],
                 is_gateway=nd["gateway"])
            for nd in doc["nodes"]
        ]
        pos = {nd.id: (nd.x, nd.y) for nd in nodes}
        links = []
        for ld in doc["links"]:
            ax, ay = pos[ld["a"]]
            bx, by = pos[ld["b"]]
            links.append(Link(
                id=ld["id"], a=ld["a"], b=ld["b"],
                length=_euclid(ax, ay, bx, by),
                required_rate=ld["required_rate"],
            ))
        return Topology(nodes, links, params, doc["seed"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed topology file {path}: {exc}") from exc
