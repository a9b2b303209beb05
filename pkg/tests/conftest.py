import pytest

from corealg.graph import Graph, bouquet, cycle


@pytest.fixture
def o2():
    return bouquet(2)


@pytest.fixture
def o3():
    return bouquet(3)


@pytest.fixture
def two_cycle():
    return cycle(2)


@pytest.fixture
def single_edge():
    """One edge x from source a to range b; a receives nothing, b emits nothing."""
    return Graph(["a", "b"], [("x", "a", "b")])


def two_vertex_graphs(max_edges=4):
    """All graphs on <=2 vertices with every vertex emitting and receiving,
    up to max_edges edges total.  Returned as a list of (label, Graph)."""
    out = []
    for n in range(1, max_edges + 1):
        out.append(("bouquet%d" % n, bouquet(n)))
    # Edge-count matrices m[i][j] = number of edges with source v_i, range v_j.
    rng = range(0, max_edges + 1)
    for aa in rng:
        for ab in rng:
            for ba in rng:
                for bb in rng:
                    total = aa + ab + ba + bb
                    if total == 0 or total > max_edges:
                        continue
                    if aa + ab == 0 or ba + bb == 0:
                        continue  # a vertex that emits nothing
                    if aa + ba == 0 or ab + bb == 0:
                        continue  # a vertex that receives nothing
                    edges = []
                    counts = {("a", "a"): aa, ("a", "b"): ab,
                              ("b", "a"): ba, ("b", "b"): bb}
                    for (src, rngv), k in counts.items():
                        for i in range(k):
                            edges.append(("%s%s%d" % (src, rngv, i), src, rngv))
                    label = "m%d%d%d%d" % (aa, ab, ba, bb)
                    out.append((label, Graph(["a", "b"], edges)))
    return out
