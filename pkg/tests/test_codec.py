import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from beepnet.codec import (
    B,
    S,
    DecodeError,
    Decoder,
    Phase,
    as_bits,
    bits_to_int,
    ceil_log2,
    decode,
    encode,
    fixed_bin,
    int_bits,
    num_frame,
)

bitstrings = st.lists(st.integers(0, 1), min_size=1, max_size=24).map(tuple)


def syms(text):
    return tuple(text.replace(",", ""))


def test_encode_two_bits():
    assert encode((1, 0)) == syms("b,b,b,s,s,b,b,b")


def test_encode_one_bit():
    assert encode((1,)) == syms("bbbsbb")


def test_encode_rejects_empty():
    with pytest.raises(ValueError):
        encode(())


def test_roundtrip_up_to_8_bits():
    for k in range(1, 9):
        for msg in itertools.product((0, 1), repeat=k):
            assert decode(encode(msg)) == msg


@given(bitstrings)
def test_frame_length_and_markers(msg):
    frame = encode(msg)
    assert len(frame) == 2 * len(msg) + 4
    assert frame[:2] == (B, B) and frame[-2:] == (B, B)
    pairs = [frame[i:i + 2] for i in range(2, len(frame) - 2, 2)]
    assert all(p in ((B, S), (S, B)) for p in pairs)


@given(bitstrings, st.integers(0, 10))
def test_leading_silence_is_skipped(msg, pad):
    assert decode((S,) * pad + encode(msg)) == msg


@given(bitstrings, st.integers(1, 5))
def test_lone_beep_before_frame_resyncs(msg, gap):
    # a single b followed by silence must not be taken for the opening marker
    assert decode((B,) + (S,) * gap + encode(msg)) == msg


def test_feed_sequence_to_done():
    dec = Decoder()
    for sym in syms("bbbssbbb"):
        dec = dec.feed(sym)
    assert dec.done and dec.bits == (1, 0)


def test_silent_segment_is_error():
    dec = Decoder()
    for sym in "bbss":
        dec = dec.feed(sym)
    assert dec.phase is Phase.ERROR
    with pytest.raises(DecodeError):
        decode("bbss")


def test_empty_payload_is_error():
    with pytest.raises(DecodeError):
        decode("bbbb")


def test_feed_after_done_raises():
    dec = Decoder()
    for sym in encode((1,)):
        dec = dec.feed(sym)
    with pytest.raises(ValueError):
        dec.feed(S)


def test_unknown_symbol():
    with pytest.raises(ValueError):
        Decoder().feed("x")


def test_truncated_stream():
    with pytest.raises(DecodeError):
        decode(encode((1, 1))[:-1])


@given(bitstrings, st.integers(0, 11))
def test_ss_anywhere_in_payload_errors(msg, at):
    frame = list(encode(msg))
    k = 2 + 2 * (at % len(msg))
    frame[k:k + 2] = [S, S]
    with pytest.raises(DecodeError):
        decode(frame)


def test_fixed_bin_examples():
    assert fixed_bin(0, 2) == (0, 0)
    assert fixed_bin(5, 4) == (0, 1, 0, 1)
    with pytest.raises(ValueError):
        fixed_bin(4, 2)
    with pytest.raises(ValueError):
        fixed_bin(-1, 3)


def test_num_frame_zero():
    frame = num_frame(0, 2)
    assert frame == syms("b,b,s,b,s,b,b,b")
    assert len(frame) == 2 * 2 + 4


@given(st.integers(0, 255), st.integers(0, 255))
def test_fixed_width_order_matches_numeric(a, b):
    assert (fixed_bin(a, 8) < fixed_bin(b, 8)) == (a < b)


@given(st.integers(0, 10**6))
def test_int_bits_roundtrip(i):
    assert bits_to_int(int_bits(i)) == i
    assert len(int_bits(i)) == max(1, i.bit_length())


def test_ceil_log2():
    assert [ceil_log2(x) for x in (1, 2, 3, 4, 5, 8, 9, 1024)] == [1, 1, 2, 2, 3, 3, 4, 10]


def test_as_bits():
    assert as_bits("101") == (1, 0, 1)
    assert as_bits([0, 1]) == (0, 1)
    for bad in ("", "102", [2]):
        with pytest.raises(ValueError):
            as_bits(bad)
