"""Canonical beep framing of bit strings.

A message ``(a_1, ..., a_m)`` is sent as ``2m + 4`` round symbols: ``bb``
opens and closes the frame, a 1 bit is ``bs`` and a 0 bit is ``sb``.  ``b``
is a round with a beep, ``s`` a silent round.
"""

from __future__ import annotations

import enum
from typing import Iterable, NamedTuple, Sequence

B = "b"
S = "s"

Bits = tuple[int, ...]
Symbols = tuple[str, ...]


class DecodeError(ValueError):
    """Raised when a symbol stream is not a canonical sequence."""


def as_bits(value: str | Iterable[int]) -> Bits:
    """Normalise ``"101"`` or ``[1, 0, 1]`` into a tuple of ints."""
    if isinstance(value, str):
        if not value or set(value) - {"0", "1"}:
            raise ValueError(f"not a bit string: {value!r}")
        return tuple(int(c) for c in value)
    bits = tuple(int(b) for b in value)
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"not a bit sequence: {bits!r}")
    return bits


def bits_str(bits: Sequence[int]) -> str:
    return "".join(str(b) for b in bits)


def encode(bits: Sequence[int]) -> Symbols:
    bits = as_bits(bits)
    if not bits:
        raise ValueError("cannot encode an empty message")
    out = [B, B]
    for bit in bits:
        out.extend((B, S) if bit else (S, B))
    out.extend((B, B))
    return tuple(out)


class Phase(enum.Enum):
    AWAIT_FIRST = "await_first"
    AWAIT_SECOND = "await_second"
    PAYLOAD = "payload"
    DONE = "done"
    ERROR = "error"


class Decoder(NamedTuple):
    """Incremental canonical decoder; ``feed`` returns a new decoder.

    Silence before the opening ``bb`` is skipped, and a lone ``b`` followed
    by ``s`` re-arms the search for the opening pair.  Inside the payload an
    ``ss`` segment, or a closing ``bb`` with no payload at all, is an error.
    """

    phase: Phase = Phase.AWAIT_FIRST
    bits: Bits = ()
    half: str | None = None

    @property
    def done(self) -> bool:
        return self.phase is Phase.DONE

    @property
    def error(self) -> bool:
        return self.phase is Phase.ERROR

    @property
    def finished(self) -> bool:
        return self.phase in (Phase.DONE, Phase.ERROR)

    def feed(self, symbol: str) -> Decoder:
        phase, bits, half = self
        if symbol != B and symbol != S:
            raise ValueError(f"unknown symbol {symbol!r}")
        if phase is _PAYLOAD:
            if half is None:
                return _new(Decoder, (_PAYLOAD, bits, symbol))
            seg = half + symbol
            if seg == "bs":
                return _new(Decoder, (_PAYLOAD, bits + (1,), None))
            if seg == "sb":
                return _new(Decoder, (_PAYLOAD, bits + (0,), None))
            if seg == "bb" and bits:
                return _new(Decoder, (_DONE, bits, None))
            return _new(Decoder, (_ERROR, bits, None))
        if phase is _AWAIT_FIRST:
            return _new(Decoder, (_AWAIT_SECOND, (), None)) if symbol == B else self
        if phase is _AWAIT_SECOND:
            return _new(Decoder, (_PAYLOAD, (), None)) if symbol == B else Decoder()
        raise ValueError(f"decoder already {phase.value}")


_new = tuple.__new__
_AWAIT_FIRST, _AWAIT_SECOND, _PAYLOAD = Phase.AWAIT_FIRST, Phase.AWAIT_SECOND, Phase.PAYLOAD
_DONE, _ERROR = Phase.DONE, Phase.ERROR


def decode(symbols: Iterable[str]) -> Bits:
    """Decode a complete symbol stream; trailing symbols after the frame are ignored."""
    dec = Decoder()
    for sym in symbols:
        dec = dec.feed(sym)
        if dec.done:
            return dec.bits
        if dec.error:
            raise DecodeError("scrambled canonical sequence")
    raise DecodeError("symbol stream ended before the closing marker")


def fixed_bin(i: int, width: int) -> Bits:
    """Most-significant-bit-first binary of ``i`` padded to ``width`` bits."""
    if width < 1:
        raise ValueError("width must be at least 1")
    if not 0 <= i < (1 << width):
        raise ValueError(f"{i} does not fit in {width} bits")
    return tuple((i >> k) & 1 for k in range(width - 1, -1, -1))


def num_frame(i: int, width: int) -> Symbols:
    return encode(fixed_bin(i, width))


def int_bits(i: int) -> Bits:
    """Shortest binary representation of a non-negative integer (``0`` -> ``(0,)``)."""
    if i < 0:
        raise ValueError("negative integer")
    return fixed_bin(i, max(1, i.bit_length()))


def bits_to_int(bits: Sequence[int]) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | b
    return value


def ceil_log2(x: int) -> int:
    """``ceil(log2 x)`` clamped to at least 1, the width used for labels and levels."""
    if x < 1:
        raise ValueError("argument must be positive")
    return max(1, (x - 1).bit_length())
