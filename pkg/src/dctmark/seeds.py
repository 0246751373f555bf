"""Counter-based seed derivation.

Every (master seed, stream, counter...) path maps to an independent 64-bit
seed through splitmix-style mixing, so trials can run in any order or in
parallel and still draw identical randomness.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One splitmix64 output for the given state."""
    x = (x + _GOLDEN) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4B7E9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def derive_seed(master: int, *path: int) -> int:
    """Deterministic 64-bit seed for a (master, path...) derivation chain."""
    s = splitmix64(master & _MASK64)
    for c in path:
        s = splitmix64(s ^ (c & _MASK64))
    return s
