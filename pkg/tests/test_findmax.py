import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from beepnet.codec import ceil_log2
from beepnet.engine import random_schedule
from beepnet.protocols import findmax_length, run_find_max, run_modified_find_max
from beepnet.topology import Graph, diameter, generate


def two_nodes():
    return Graph.from_edges(2, [(0, 1)], labels=[5, 6], L=8)


def test_two_node_tie_in_first_stage():
    res = run_find_max(two_nodes(), None, {0: 0, 1: 0}, N=2)
    assert res.winner == 1
    assert res.decoded == [6, 6]
    # stage 1 centre is 0 + 1 * (4N + 1) = 9; both labels have a leading 1
    assert 9 in res.trace.beeps(0) and 9 in res.trace.beeps(1)
    assert res.end == [3 * 9 + 4] * 2


def test_modified_two_nodes():
    res = run_modified_find_max(two_nodes(), None, xi=0, d_star=1)
    assert res.winner == 1 and res.decoded == [6, 6]
    assert res.end == [3 * 5 + 2] * 2


def test_no_participants():
    g = generate("path", 4, seed=None)
    res = run_find_max(g, [], {0: 0}, N=4)
    assert res.winner is None and res.decoded == [0] * 4
    for v in range(4):
        # only the wake-wave beep
        assert len(res.trace.beeps(v)) == 1
    res = run_modified_find_max(g, [], xi=3, d_star=3)
    assert res.winner is None and res.decoded == [0] * 4


@pytest.mark.parametrize("n", range(1, 7))
def test_single_participant_any_label(n):
    g = generate("path", n)
    for label in range(16):
        others = [x for x in range(16) if x != label][: n - 1]
        for v in {0, n - 1}:
            labels = others[:v] + [label] + others[v:]
            h = g.relabel(labels, 16)
            res = run_find_max(h, [v], {n - 1 - v: 0}, N=n)
            assert res.winner == v and res.decoded == [label] * n
            res = run_modified_find_max(h, [v], xi=1, d_star=max(1, n - 1))
            assert res.winner == v and res.decoded == [label] * n


def test_path_of_three_permutations():
    g = generate("path", 3)
    for labels in itertools.permutations(range(3)):
        h = g.relabel(labels, 3)
        res = run_find_max(h, None, {0: 0}, N=3)
        assert h.labels[res.winner] == 2


@given(st.integers(1, 12), st.integers(0, 10**6), st.integers(4, 64), st.data())
def test_winner_is_max_participant(n, seed, L, data):
    L = max(L, n)
    rng = random.Random(seed)
    g = generate("random_connected", n, seed, L=L)
    part = data.draw(st.sets(st.integers(0, n - 1)))
    sched = random_schedule(n, rng)
    N = n + data.draw(st.integers(0, 4))
    res = run_find_max(g, part, sched, N, L)
    if part:
        best = max(part, key=lambda v: g.labels[v])
        assert res.winner == best
        assert res.decoded == [g.labels[best]] * n
    else:
        assert res.winner is None and res.decoded == [0] * n
    lam = ceil_log2(L)
    assert res.end == [w + findmax_length(lam, N) for w in res.wake]


@given(st.integers(1, 10), st.integers(0, 10**6), st.data())
def test_modified_matches_max(n, seed, data):
    g = generate("random_connected", n, seed, L=32)
    part = data.draw(st.sets(st.integers(0, n - 1)))
    d_star = max(1, diameter(g)) + data.draw(st.integers(0, n))
    res = run_modified_find_max(g, part, xi=2, d_star=d_star)
    want = max((g.labels[v] for v in part), default=0)
    assert res.decoded == [want] * n
    assert res.end == [2 + findmax_length(5, d_star)] * n


def test_n_must_bound_size():
    with pytest.raises(ValueError):
        run_find_max(generate("path", 4), None, {0: 0}, N=3)
