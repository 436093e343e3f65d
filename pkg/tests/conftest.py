import numpy as np
import pytest

from meshca import (
    Link,
    Node,
    ScenarioConfig,
    Topology,
    build_conflict_graph,
)


def make_topology(positions, link_pairs=None, radios=3, gateways=(0,),
                  comm_range=252.0, interference=514.0, channels=3,
                  required=None, area=None):
    """Hand-built topology with explicit geometry.

    ``link_pairs`` defaults to every node pair within the communication
    range; ``required`` is a scalar or per-link list of required rates
    (default 1.0, generous under the default radio model).
    """
    positions = np.asarray(positions, dtype=float)
    n = len(positions)
    if area is None:
        area = max(1000.0, float(positions.max(initial=0.0)) + 1.0)
    params = ScenarioConfig(
        name="manual",
        node_count=max(n, 2),
        area_w=area,
        area_h=area,
        comm_range=comm_range,
        interference_distance=interference,
        radios=radios,
        channels=channels,
    )
    nodes = [
        Node(id=i, x=float(positions[i][0]), y=float(positions[i][1]),
             radios=radios, is_gateway=i in set(gateways))
        for i in range(n)
    ]
    if link_pairs is None:
        link_pairs = [
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if np.linalg.norm(positions[i] - positions[j]) <= comm_range
        ]
    if required is None:
        required = 1.0
    if np.isscalar(required):
        required = [float(required)] * len(link_pairs)
    links = [
        Link(id=k, a=a, b=b,
             length=float(np.linalg.norm(positions[a] - positions[b])),
             required_rate=required[k])
        for k, (a, b) in enumerate(link_pairs)
    ]
    return Topology(nodes, links, params, seed=0)


def line_topology(n=4, spacing=100.0, **kwargs):
    """Nodes on a horizontal line, gateway at node 0, chain links only."""
    positions = [(i * spacing, 0.0) for i in range(n)]
    pairs = [(i, i + 1) for i in range(n - 1)]
    return make_topology(positions, link_pairs=pairs, **kwargs)


@pytest.fixture
def small_random_topology():
    from meshca import generate_topology

    cfg = ScenarioConfig(name="small", node_count=12)
    return generate_topology(cfg, seed=5)


@pytest.fixture
def small_conflict(small_random_topology):
    return build_conflict_graph(small_random_topology)
