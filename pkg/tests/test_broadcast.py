import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from beepnet.codec import encode
from beepnet.protocols import BroadcastRelay, ProtocolError, run_broadcast
from beepnet.topology import bfs, generate


def finish_round(t, i, m):
    return t + i - 1 + 3 * (2 * m + 4) - 2


def test_path_of_three_single_bit():
    res = run_broadcast(generate("path", 3), 0, "1", t=0)
    assert res.decoded == [(1,)] * 3
    assert res.finish[2] == 0 + 2 - 1 + 3 * 6 - 2 == 17
    # the distance-1 node finishes by the same formula, i = 1
    assert res.finish[1] == 16


def test_star_centre_three_bits():
    res = run_broadcast(generate("star", 6), 0, (0, 1, 1), t=4)
    assert all(f == 4 + 28 for f in res.finish[1:])
    assert all(d == (0, 1, 1) for d in res.decoded)


def test_star_two_bits_leaves():
    res = run_broadcast(generate("star", 6), 0, (0, 1), t=0)
    assert res.finish[1:] == [22] * 5


def test_source_beeps_exactly_the_frame():
    res = run_broadcast(generate("path", 2), 0, "10", t=3)
    frame = encode((1, 0))
    assert res.trace.beeps(0) == [3 + 3 * k for k, c in enumerate(frame) if c == "b"]


@given(st.sampled_from(["path", "cycle", "star", "complete", "random_tree", "random_connected"]),
       st.integers(3, 24), st.integers(0, 10**6), st.lists(st.integers(0, 1), min_size=1, max_size=10),
       st.integers(0, 9))
def test_layers_repeat_the_frame(kind, n, seed, msg, t):
    g = generate(kind, n, seed if kind.startswith("random") else None)
    src = random.Random(seed).randrange(n)
    res = run_broadcast(g, src, msg, t)
    dist = bfs(g, src)
    frame = encode(msg)
    for v in range(n):
        assert res.decoded[v] == tuple(msg)
        want = [t + 3 * k + dist[v] for k, c in enumerate(frame) if c == "b"]
        assert res.trace.beeps(v) == want
        assert all((r - t - dist[v]) % 3 == 0 for r in res.trace.beeps(v))
        if v != src:
            assert res.wake[v] == t + dist[v] - 1
            assert res.finish[v] == finish_round(t, dist[v], len(msg))


def test_relay_cannot_be_woken_by_adversary():
    with pytest.raises(ProtocolError):
        BroadcastRelay().wake(by_beep=False)


def test_source_out_of_range():
    with pytest.raises(ValueError):
        run_broadcast(generate("path", 3), 5, "1")


def test_result_dict():
    d = run_broadcast(generate("path", 2), 0, "01").to_dict()
    assert d["decoded"] == ["01", "01"] and d["wake"] == [0, 0]


def test_reported_rounds_agree_with_trace():
    g = generate("random_connected", 15, seed=8)
    res = run_broadcast(g, 4, "0110", t=2)
    done = {v: r for r, v in res.trace.events("done")}
    assert res.finish == [done[v] for v in range(g.n)]
    assert res.wake == [res.trace.wake_rounds()[v] for v in range(g.n)]
