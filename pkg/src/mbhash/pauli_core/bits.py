"""Packing helpers: bool bit vectors <-> little-endian uint64 words.

Bit ``j`` of a packed row lives in word ``j >> 6`` at position ``j & 63``.
"""

from __future__ import annotations

import numpy as np

WORD = 64


def n_words(n_bits: int) -> int:
    return max(1, (n_bits + WORD - 1) // WORD)


def pack(bits: np.ndarray) -> np.ndarray:
    """Pack a bool array of shape ``(..., n)`` into ``(..., n_words(n))`` uint64."""
    bits = np.asarray(bits, dtype=bool)
    n = bits.shape[-1]
    w = n_words(n)
    padded = np.zeros(bits.shape[:-1] + (w * WORD,), dtype=bool)
    padded[..., :n] = bits
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack(words: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`pack`; returns a bool array of shape ``(..., n)``."""
    words = np.ascontiguousarray(np.asarray(words, dtype=np.uint64))
    raw = words.view(np.uint8)
    bits = np.unpackbits(raw, axis=-1, bitorder="little")
    return bits[..., :n].astype(bool)


def parity(words: np.ndarray) -> np.ndarray:
    """Parity of the popcount along the last axis."""
    return (np.bitwise_count(words).sum(axis=-1) & 1).astype(np.uint8)


def popcount(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def to_hex(bits: np.ndarray) -> str:
    """Hex string of a bit vector, read as an integer with bit ``j`` = ``bits[j]``."""
    value = 0
    for j in np.flatnonzero(np.asarray(bits, dtype=bool)):
        value |= 1 << int(j)
    return format(value, "x")


def from_hex(text: str, n: int) -> np.ndarray:
    value = int(text, 16)
    if value >> n:
        raise ValueError(f"hex value {text!r} does not fit in {n} bits")
    return np.array([(value >> j) & 1 for j in range(n)], dtype=bool)
