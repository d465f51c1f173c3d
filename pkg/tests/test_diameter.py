import random

from hypothesis import given
from hypothesis import strategies as st

from beepnet.codec import int_bits
from beepnet.protocols import blue_round, run_diam_est
from beepnet.topology import Graph, bfs, diameter, eccentricity, generate


def run(g, z, N, red=20):
    return run_diam_est(g, z, bfs(g, z), red, N)


def test_path_of_three():
    g = generate("path", 3)
    res = run(g, 0, 3, red=20)
    assert res.rho == 2 and res.d_star == [4] * 3
    heard = res.trace.heard(0)
    # probe echoes at r+1 and r+4, first silent probe at r+7
    assert 21 in heard and 24 in heard and 27 not in heard
    assert res.blue == [blue_round(20, 3, 4)] * 3


def test_star_leaf_leader():
    g = generate("star", 6)
    res = run(g, 3, 6)
    assert res.rho == 2 == eccentricity(g, 3)
    assert diameter(g) == 2 and res.d_star == [4] * 6


def test_single_node():
    res = run(Graph.from_edges(1, []), 0, 1)
    assert res.rho == 0 and res.d_star == [1]


def test_blue_round_formula():
    r, N = 100, 7
    for d_star in (1, 2, 4, 9):
        rho = d_star // 2
        m = len(int_bits(d_star))
        assert blue_round(r, N, d_star) == r + rho * N + d_star + 6 * m + 12


@given(st.integers(2, 20), st.integers(0, 10**6), st.integers(0, 5))
def test_estimate_is_linear_in_diameter(n, seed, extra):
    g = generate("random_connected", n, seed, p=0.05)
    z = random.Random(seed).randrange(n)
    N = n + extra
    red = 3
    res = run(g, z, N, red)
    rho = eccentricity(g, z)
    D = diameter(g)
    assert res.rho == rho
    assert set(res.d_star) == {2 * rho}
    assert D <= 2 * rho <= 2 * D
    assert res.blue == [blue_round(red, N, 2 * rho)] * n
    # probing: a node keeps probing while the level below it echoes, so it beeps
    # in window j iff a chain of strictly deeper neighbours of length j - 1 hangs off it
    dist = bfs(g, z)
    depth = [0] * n
    for v in sorted(range(n), key=lambda u: -dist[u]):
        deeper = [depth[u] + 1 for u in g.adj[v] if dist[u] == dist[v] + 1]
        depth[v] = max(deeper, default=0)
    want = {(red + (j - 1) * N + dist[v], v) for j in range(1, rho + 1) for v in range(n)
            if dist[v] >= 1 and depth[v] >= j - 1}
    got = {(r, v) for r, v in res.trace.beep_set() if r <= red + rho * N + 1}
    assert got == want
    # every prober sits within the distance range the window allows, and level 1 is
    # represented exactly while windows remain
    for r, v in got:
        j = (r - red - 1) // N + 1
        assert 1 <= dist[v] <= rho + 1 - j
    assert {(r - red - 1) // N + 1 for r, v in got if dist[v] == 1} == set(range(1, rho + 1))
