"""Keyed per-slot offsets for the Latin-square hopping scheme.

The default PRF is a fixed 64-bit avalanche mixer, chosen so every
implementation can reproduce the same test vectors bit for bit. It is not a
cryptographic PRF. A deployment should plug in a vetted keyed PRF, for
instance ``hmac_sha256_prf``. The exact construction is documented in
``docs/slot_key_prf.md``.
"""

from __future__ import annotations

import hashlib
import hmac
import struct
from dataclasses import dataclass
from typing import Callable

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_MUL_1 = 0xBF58476D1CE4E5B9
MIX_MUL_2 = 0x94D049BB133111EB
KEY_BYTES = 16

Prf64 = Callable[[bytes, int, int, int], int]


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX_MUL_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_MUL_2) & MASK64
    return z ^ (z >> 31)


def _check_words(key: bytes, *words: int) -> None:
    if len(key) != KEY_BYTES:
        raise ValueError(f"slot keys need a {KEY_BYTES}-byte key, got {len(key)} bytes")
    for w in words:
        if not 0 <= w <= MASK64:
            raise ValueError(f"{w} does not fit in an unsigned 64-bit word")


def mixer_prf(key: bytes, session: int, slot: int, counter: int) -> int:
    """Default 64-bit draw for (key, session, slot, counter)."""
    _check_words(key, session, slot, counter)
    k0 = int.from_bytes(key[:8], "little")
    k1 = int.from_bytes(key[8:], "little")
    h = mix64(k0 ^ GOLDEN_GAMMA)
    for word in (k1, session, slot, counter):
        h = mix64(((h ^ word) + GOLDEN_GAMMA) & MASK64)
    return h


def hmac_sha256_prf(key: bytes, session: int, slot: int, counter: int) -> int:
    _check_words(key, session, slot, counter)
    digest = hmac.new(key, struct.pack("<QQQ", session, slot, counter), hashlib.sha256).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class SlotKeySource:
    key: bytes
    session: int
    v: int
    prf: Prf64 = mixer_prf

    def __post_init__(self):
        if self.v < 1:
            raise ValueError("v must be positive")
        _check_words(self.key, self.session)

    def __repr__(self) -> str:
        return f"SlotKeySource(key=<{len(self.key)} bytes>, session={self.session}, v={self.v})"


def slot_key(source: SlotKeySource, t: int) -> int:
    """Uniform offset in ``0..v-1`` for slot ``t`` by rejection sampling.

    Draws with counter 0, 1, ... until one falls below the largest multiple of
    v not exceeding 2**64, then reduces it modulo v.
    """
    v = source.v
    if t < 0:
        raise ValueError("slot index must be non-negative")
    if v == 1:
        return 0
    limit = (1 << 64) - (1 << 64) % v
    counter = 0
    while True:
        draw = source.prf(source.key, source.session, t, counter)
        if draw < limit:
            return draw % v
        counter += 1


def parse_key(text: str | bytes) -> bytes:
    """Accept 16 raw bytes or 32 hex digits (whitespace ignored)."""
    if isinstance(text, bytes):
        if len(text) == KEY_BYTES:
            return text
        text = text.decode("ascii", errors="strict")
    cleaned = "".join(text.split())
    try:
        raw = bytes.fromhex(cleaned)
    except ValueError as exc:
        raise ValueError("key must be 32 hex digits") from exc
    if len(raw) != KEY_BYTES:
        raise ValueError(f"key must be {KEY_BYTES} bytes, got {len(raw)}")
    return raw
