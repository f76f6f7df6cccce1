"""Fixed-width bit strings and the XOR / concatenation algebra.

Bits are stored big-endian in a Python int: bit 0 of the string is the most
significant bit of ``value``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable

from .errors import InvalidArgument


@dataclass(frozen=True, slots=True)
class BitString:
    value: int
    width: int

    def __post_init__(self):
        if self.width < 0:
            raise InvalidArgument(f"negative width {self.width}")
        if self.value < 0 or self.value >> self.width:
            raise InvalidArgument(f"value does not fit in {self.width} bits")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitString:
        value = 0
        width = 0
        for b in bits:
            if b not in (0, 1):
                raise InvalidArgument(f"not a bit: {b!r}")
            value = (value << 1) | b
            width += 1
        return cls(value, width)

    @classmethod
    def from_str(cls, text: str) -> BitString:
        """Parse ``"1011"``; the empty string is the empty bit string."""
        if text and set(text) - {"0", "1"}:
            raise InvalidArgument(f"not a binary string: {text!r}")
        return cls(int(text, 2) if text else 0, len(text))

    @classmethod
    def from_hex(cls, digits: str, width: int) -> BitString:
        return cls(int(digits, 16) if digits else 0, width)

    @classmethod
    def zeros(cls, width: int) -> BitString:
        return cls(0, width)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.width - 1 - i)) & 1 for i in range(self.width))

    def __len__(self) -> int:
        return self.width

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self.width
        if not 0 <= i < self.width:
            raise IndexError(i)
        return (self.value >> (self.width - 1 - i)) & 1

    def __str__(self) -> str:
        return format(self.value, f"0{self.width}b") if self.width else ""

    def __xor__(self, other: BitString) -> BitString:
        if self.width != other.width:
            raise InvalidArgument(
                f"^ needs equal widths ({self.width} vs {other.width}); use xor_ext"
            )
        return BitString(self.value ^ other.value, self.width)

    def popcount(self) -> int:
        return bin(self.value).count("1")

    def hex(self) -> str:
        """Lowercase hex of the integer value, zero-padded to ceil(width/4) digits."""
        if self.width == 0:
            return ""
        return format(self.value, f"0{(self.width + 3) // 4}x")

    def to_bytes(self) -> bytes:
        """Big-endian packing, right-padded with zero bits to a byte boundary."""
        nbytes = (self.width + 7) // 8
        pad = nbytes * 8 - self.width
        return (self.value << pad).to_bytes(nbytes, "big")

    def reversed(self) -> BitString:
        return BitString(int(str(self)[::-1] or "0", 2), self.width)

    def slice(self, start: int, stop: int) -> BitString:
        if not 0 <= start <= stop <= self.width:
            raise InvalidArgument(f"bad slice [{start}:{stop}] of width {self.width}")
        w = stop - start
        return BitString((self.value >> (self.width - stop)) & ((1 << w) - 1), w)

    def as_dict(self) -> dict:
        return {"width": self.width, "hex": self.hex()}

    @classmethod
    def from_dict(cls, d: dict) -> BitString:
        return cls.from_hex(d["hex"], d["width"])


def concat(*parts: BitString) -> BitString:
    value = 0
    width = 0
    for p in parts:
        value = (value << p.width) | p.value
        width += p.width
    return BitString(value, width)


def cyclic_extend(b: BitString, width: int) -> BitString:
    """Repeat ``b`` and truncate so the result has exactly ``width`` bits."""
    if b.width == 0:
        raise InvalidArgument("cannot extend an empty bit string")
    reps = -(-width // b.width)
    full = concat(*([b] * reps)) if reps else BitString(0, 0)
    return full.slice(0, width)


def xor_ext(a: BitString, b: BitString) -> BitString:
    """XOR ``a`` with ``b`` cyclically extended (or truncated) to ``a``'s width."""
    return a ^ cyclic_extend(b, a.width)


def split(b: BitString, widths: Iterable[int]) -> list[BitString]:
    widths = list(widths)
    if sum(widths) != b.width:
        raise InvalidArgument(f"widths {widths} do not sum to {b.width}")
    out = []
    pos = 0
    for w in widths:
        out.append(b.slice(pos, pos + w))
        pos += w
    return out


def hamming(a: BitString, b: BitString) -> int:
    return (a ^ b).popcount()


def sha256_bits(b: BitString) -> BitString:
    digest = hashlib.sha256(b.to_bytes()).digest()
    return BitString(int.from_bytes(digest, "big"), 256)
