"""Chromosomes, channel overlap, interference indices, and the greedy
multi-criterion channel assignment that seeds the genetic search.

A chromosome is one channel gene per link. A link's interference index
is the sum of channel-overlap ratios against its conflict-graph
neighbors, so orthogonal channels contribute nothing and a shared
channel contributes 1. Every operation here preserves the radio
constraint: the number of distinct channels on links incident to a node
never exceeds that node's radio count.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidConfig, NoFeasibleChannel, ParseError
from .topology import ConflictGraph, Topology
from .ranking import LinkRankTable

UNASSIGNED = -1


@dataclass
class ChannelAssignment:
    """One channel gene per link id.

    Genes may hold ``UNASSIGNED`` (-1) only while an assignment is under
    construction; finished assignments keep every gene in
    ``[0, channel_count)``.
    """

    genes: np.ndarray
    channel_count: int

    def __post_init__(self):
        self.genes = np.asarray(self.genes, dtype=np.int64)

    def copy(self) -> "ChannelAssignment":
        return ChannelAssignment(self.genes.copy(), self.channel_count)

    def __eq__(self, other) -> bool:
        return (isinstance(other, ChannelAssignment)
                and self.channel_count == other.channel_count
                and np.array_equal(self.genes, other.genes))


class OverlapMatrix:
    """Symmetric channel-overlap ratios in [0, 1] with unit diagonal."""

    def __init__(self, ratio: np.ndarray):
        ratio = np.asarray(ratio, dtype=float)
        if ratio.ndim != 2 or ratio.shape[0] != ratio.shape[1]:
            raise InvalidConfig("overlap matrix must be square")
        if not np.allclose(ratio, ratio.T):
            raise InvalidConfig("overlap matrix must be symmetric")
        if not np.allclose(np.diag(ratio), 1.0):
            raise InvalidConfig("overlap matrix diagonal must be 1.0")
        if ratio.min() < 0.0 or ratio.max() > 1.0:
            raise InvalidConfig("overlap ratios must lie in [0, 1]")
        self.ratio = ratio

    @property
    def channel_count(self) -> int:
        return self.ratio.shape[0]

    @classmethod
    def orthogonal(cls, channel_count: int) -> "OverlapMatrix":
        """Fully orthogonal channels: ratio 1 on the diagonal, 0 elsewhere."""
        return cls(np.eye(channel_count))

    @classmethod
    def graded(cls, channel_count: int, span: int = 5) -> "OverlapMatrix":
        """2.4 GHz style partial overlap: ratio(i, j) = max(0, 1 - |i-j|/span)."""
        idx = np.arange(channel_count)
        return cls(np.maximum(0.0, 1.0 - np.abs(idx[:, None] - idx[None, :]) / span))


def overlap_for_config(cfg) -> OverlapMatrix:
    """Overlap matrix selected by a scenario config."""
    if cfg.overlap_kind == "graded":
        return OverlapMatrix.graded(cfg.channels, span=cfg.overlap_span)
    return OverlapMatrix.orthogonal(cfg.channels)


# ---------------------------------------------------------------------------
# interference


def interference_matrix(genes: np.ndarray, cg: ConflictGraph,
                        m: OverlapMatrix) -> np.ndarray:
    """Per-link interference indices for one chromosome or a batch.

    ``genes`` is (L,) or (P, L); the result has the same shape. Each
    link's index sums ``ratio[gene(l), gene(n)]`` over its conflict
    neighbors n.
    """
    genes = np.asarray(genes)
    squeeze = genes.ndim == 1
    g = np.atleast_2d(genes)
    out = np.zeros(g.shape, dtype=float)
    if cg.edge_count:
        contrib = m.ratio[g[:, cg.src], g[:, cg.dst]]
        starts = np.flatnonzero(np.r_[True, cg.src[1:] != cg.src[:-1]])
        sums = np.add.reduceat(contrib, starts, axis=1)
        out[:, cg.src[starts]] = sums
    return out[0] if squeeze else out


def link_interference_index(l: int, a: ChannelAssignment, cg: ConflictGraph,
                            m: OverlapMatrix) -> float:
    """Interference index of link ``l``: the sum of overlap ratios with
    its assigned conflict neighbors (unassigned neighbors contribute 0)."""
    return _channel_interference(l, int(a.genes[l]), a.genes, cg, m)


def _channel_interference(l: int, channel: int, genes: np.ndarray,
                          cg: ConflictGraph, m: OverlapMatrix) -> float:
    nbr_genes = genes[cg.neighbors[l]]
    nbr_genes = nbr_genes[nbr_genes >= 0]
    if not len(nbr_genes):
        return 0.0
    return float(m.ratio[channel, nbr_genes].sum())


def _channel_interference_all(l: int, genes: np.ndarray, cg: ConflictGraph,
                              m: OverlapMatrix) -> np.ndarray:
    """Interference index of link ``l`` for every candidate channel."""
    nbr_genes = genes[cg.neighbors[l]]
    nbr_genes = nbr_genes[nbr_genes >= 0]
    if not len(nbr_genes):
        return np.zeros(m.channel_count)
    return m.ratio[:, nbr_genes].sum(axis=1)


# ---------------------------------------------------------------------------
# radio constraint


class _RadioBook:
    """Per-node counts of channels in use by assigned incident links."""

    def __init__(self, t: Topology):
        self.t = t
        self.counts: list[dict[int, int]] = [{} for _ in range(t.node_count)]

    def add(self, lid: int, channel: int) -> None:
        for v in (self.t.link_a[lid], self.t.link_b[lid]):
            c = self.counts[v]
            c[channel] = c.get(channel, 0) + 1

    def remove(self, lid: int, channel: int) -> None:
        for v in (self.t.link_a[lid], self.t.link_b[lid]):
            c = self.counts[v]
            c[channel] -= 1
            if not c[channel]:
                del c[channel]

    def used(self, v: int) -> set[int]:
        return set(self.counts[v])

    def candidates(self, lid: int, channel_count: int) -> list[int]:
        """Channels assignable to ``lid`` without breaking either
        endpoint's radio budget, given the links recorded so far."""
        t = self.t
        allowed = None
        for v in (t.link_a[lid], t.link_b[lid]):
            used = self.used(v)
            if len(used) >= t.radios[v]:
                allowed = used if allowed is None else allowed & used
        if allowed is None:
            return list(range(channel_count))
        return sorted(c for c in allowed if c < channel_count)


def radio_constraint_binding(t: Topology, channel_count: int) -> bool:
    """False when no node can exceed its radio budget (channel count at
    most the smallest radio count), enabling unconstrained fast paths."""
    return channel_count > int(t.radios.min())


def _genes_within_budget(genes: np.ndarray, t: Topology) -> bool:
    for v in range(t.node_count):
        incident = t.incident_links[v]
        if len(incident) <= t.radios[v]:
            continue
        used = {int(genes[l]) for l in incident if genes[l] >= 0}
        if len(used) > t.radios[v]:
            return False
    return True


def radio_violations(a: ChannelAssignment, t: Topology) -> list[tuple[int, int]]:
    """Nodes whose incident links use more distinct channels than they
    have radios, as (node_id, distinct_channel_count) pairs."""
    out = []
    for v in range(t.node_count):
        channels = {int(a.genes[l]) for l in t.incident_links[v]
                    if a.genes[l] >= 0}
        if len(channels) > t.radios[v]:
            out.append((v, len(channels)))
    return out


def is_valid_assignment(a: ChannelAssignment, t: Topology) -> bool:
    """Gene bounds plus the radio constraint."""
    g = a.genes
    if len(g) != t.link_count:
        return False
    if g.min(initial=0) < 0 or g.max(initial=0) >= a.channel_count:
        return False
    return not radio_violations(a, t)


def feasible_channels(lid: int, genes: np.ndarray, t: Topology,
                      channel_count: int) -> list[int]:
    """Channels link ``lid`` could switch to, keeping both endpoints
    within their radio budgets given every other gene. The link's own
    current channel is always feasible, so the result is never empty for
    a valid assignment."""
    allowed = None
    for v in (t.link_a[lid], t.link_b[lid]):
        used = {int(genes[l]) for l in t.incident_links[v]
                if l != lid and genes[l] >= 0}
        if len(used) >= t.radios[v]:
            allowed = used if allowed is None else allowed & used
    if allowed is None:
        return list(range(channel_count))
    own = int(genes[lid])
    if own >= 0:
        allowed = allowed | {own}
    return sorted(c for c in allowed if 0 <= c < channel_count)


def _assign_stuck(lid: int, genes: np.ndarray, book: _RadioBook,
                  t: Topology, cg: ConflictGraph, m: OverlapMatrix) -> None:
    """Both endpoints are at budget with disjoint palettes: merge them.

    The link takes the least-interfering channel already used at either
    endpoint, and every endpoint pushed over budget has all its assigned
    links collapsed onto that channel, cascading until no node exceeds
    its budget. Reachable only under tight radio budgets; in the worst
    case a region degrades to a common channel, which is always valid.
    """
    u, v = int(t.link_a[lid]), int(t.link_b[lid])
    pool = sorted(book.used(u) | book.used(v))
    per_channel = _channel_interference_all(lid, genes, cg, m)
    c = min(pool, key=lambda ch: (per_channel[ch], ch))
    genes[lid] = c
    book.add(lid, c)
    queue = [u, v]
    while queue:
        x = queue.pop()
        if len(book.used(x)) <= t.radios[x]:
            continue
        for l2 in t.incident_links[x]:
            old = int(genes[l2])
            if old >= 0 and old != c:
                book.remove(l2, old)
                genes[l2] = c
                book.add(l2, c)
                queue.extend((int(t.link_a[l2]), int(t.link_b[l2])))


def repair_radio_constraint(genes: np.ndarray, t: Topology, cg: ConflictGraph,
                            m: OverlapMatrix,
                            channel_count: int) -> np.ndarray:
    """Rebuild an assignment link by link, keeping each requested gene
    when the radio budgets allow it and otherwise substituting the
    least-interfering feasible channel (reusing an endpoint channel).

    Already-valid assignments are returned unchanged (the rebuild would
    keep every gene anyway, since a valid assignment stays within budget
    on every prefix)."""
    if not radio_constraint_binding(t, channel_count):
        return genes
    if _genes_within_budget(genes, t):
        return genes
    out = np.full(t.link_count, UNASSIGNED, dtype=np.int64)
    book = _RadioBook(t)
    for lid in range(t.link_count):
        cand = book.candidates(lid, channel_count)
        if not cand:
            _assign_stuck(lid, out, book, t, cg, m)
            continue
        if genes[lid] in cand:
            c = int(genes[lid])
        else:
            per_channel = _channel_interference_all(lid, out, cg, m)
            c = min(cand, key=lambda ch: (per_channel[ch], ch))
        out[lid] = c
        book.add(lid, c)
    return out


# ---------------------------------------------------------------------------
# greedy assignment


def least_interfering_channel(l: int, a: ChannelAssignment, cg: ConflictGraph,
                              m: OverlapMatrix, t: Topology) -> int:
    """Channel minimizing link ``l``'s interference index against its
    assigned conflict neighbors, restricted to channels the radio budgets
    at both endpoints allow. Ties break toward the lower channel index.

    Raises
    ------
    NoFeasibleChannel
        If the radio constraint leaves no candidate, signalling the
        caller to reuse an endpoint's existing channel.
    """
    cand = feasible_channels(l, a.genes, t, a.channel_count)
    if not cand:
        raise NoFeasibleChannel(
            f"link {l}: endpoint radio budgets leave no channel"
        )
    per_channel = _channel_interference_all(l, a.genes, cg, m)
    return min(cand, key=lambda ch: (per_channel[ch], ch))


def mclr_assign(t: Topology, cg: ConflictGraph, rt: LinkRankTable,
                m: OverlapMatrix, channels: int,
                theta: float | None = None) -> ChannelAssignment:
    """Greedy rank-ordered channel assignment (the primary chromosome).

    Links are visited in descending rank order. Each link takes the
    lowest-index channel that is non-overlapping with every assigned
    conflict neighbor when one is feasible; otherwise it takes the
    least-interfering feasible channel, falling back to the common
    channel 0 when even that exceeds the acceptance threshold ``theta``.
    The default threshold is each link's conflict degree, the
    interference it would suffer in a single-channel network, so the
    fallback never makes a link worse than the common channel would.
    """
    if channels < 1:
        raise InvalidConfig(f"channels must be >= 1, got {channels}")
    genes = np.full(t.link_count, UNASSIGNED, dtype=np.int64)
    book = _RadioBook(t)
    for lid in rt.schedule:
        lid = int(lid)
        cand = book.candidates(lid, channels)
        if not cand:
            _assign_stuck(lid, genes, book, t, cg, m)
            continue
        per_channel = _channel_interference_all(lid, genes, cg, m)
        zero = [c for c in cand if per_channel[c] == 0.0]
        if zero:
            c = zero[0]
        else:
            c = min(cand, key=lambda ch: (per_channel[ch], ch))
            limit = float(cg.degrees[lid]) if theta is None else theta
            if per_channel[c] > limit and 0 in cand:
                c = 0
        genes[lid] = c
        book.add(lid, c)
    return ChannelAssignment(genes, channels)


# ---------------------------------------------------------------------------
# file format

_HEADER_RE = re.compile(r"^#\s*(\w+)\s*:\s*(.+?)\s*$")


def save_assignment(a: ChannelAssignment, path: str | Path,
                    algorithm: str = "unknown", seed: int = 0) -> None:
    """Write the ``link_id,channel`` table with algorithm/seed/channel
    metadata in comment headers."""
    lines = [
        "# meshca assignment",
        f"# algorithm: {algorithm}",
        f"# seed: {seed}",
        f"# channels: {a.channel_count}",
        "link_id,channel",
    ]
    lines += [f"{lid},{int(c)}" for lid, c in enumerate(a.genes)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_assignment(path: str | Path) -> tuple[ChannelAssignment, dict]:
    """Parse an assignment file into (assignment, metadata).

    Metadata holds the ``algorithm`` and ``seed`` headers. Channels out
    of range, duplicate or missing link ids, and malformed rows raise
    ``ParseError`` naming the offending entry.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read assignment file {path}: {exc}") from exc
    meta: dict = {"algorithm": "unknown", "seed": 0}
    channels = None
    rows: dict[int, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            match = _HEADER_RE.match(line)
            if match:
                key, value = match.groups()
                if key == "channels":
                    channels = int(value)
                elif key == "seed":
                    meta["seed"] = int(value)
                elif key == "algorithm":
                    meta["algorithm"] = value
            continue
        if line == "link_id,channel":
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"{path}:{lineno}: expected 'link_id,channel'")
        try:
            lid, c = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: non-integer row") from exc
        if lid in rows:
            raise ParseError(f"{path}:{lineno}: duplicate link id {lid}")
        rows[lid] = c
    if channels is None or channels < 1:
        raise ParseError(f"{path}: missing or invalid '# channels:' header")
    if not rows:
        raise ParseError(f"{path}: no assignment rows")
    if sorted(rows) != list(range(len(rows))):
        raise ParseError(f"{path}: link ids are not contiguous from 0")
    genes = np.empty(len(rows), dtype=np.int64)
    for lid, c in rows.items():
        if not 0 <= c < channels:
            raise ParseError(
                f"{path}: link {lid} channel {c} out of range [0, {channels})"
            )
        genes[lid] = c
    return ChannelAssignment(genes, channels), meta
