"""Splittable, counter-based seed derivation.

All randomness in the library flows through 64-bit seeds derived here, so
that any (policy, instance, seed) execution is replayable bit-for-bit and
independent sub-streams never collide in practice.  The mixer is the
SplitMix64 finalizer (constants below); pure integer arithmetic, identical
on every platform.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche mix on 64-bit ints."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK
    return z ^ (z >> 31)


def derive_seed(master: int, indices=()) -> int:
    """Derive the sub-stream seed for a path of indices under ``master``.

    Distinct index paths give distinct streams; the empty path still mixes
    (``derive_seed(x, []) != x`` in general), so a master seed is never
    used raw.
    """
    s = mix64((master & _MASK) ^ _GOLDEN)
    for idx in indices:
        s = mix64((s + _GOLDEN) ^ mix64((int(idx) + 1) * _GOLDEN))
    return s
