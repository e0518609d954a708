"""Seeded counter-based random stream (SplitMix64).

The generator is fully specified here so that any implementation, in any
language, reproduces the same stream from the same seed:

  state_k  = (seed + (k+1) * 0x9E3779B97F4A7C15) mod 2^64,  k = 0, 1, 2, ...
  z        = state_k
  z       ^= z >> 30;  z = (z * 0xBF58476D1CE4E5B9) mod 2^64
  z       ^= z >> 27;  z = (z * 0x94D049BB133111EB) mod 2^64
  z       ^= z >> 31
  uniform  = (z >> 11) * 2^-53          # double in [0, 1)
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z ^= z >> 30
    z = (z * _MIX1) & _MASK64
    z ^= z >> 27
    z = (z * _MIX2) & _MASK64
    z ^= z >> 31
    return z


class SplitMix64:
    """Deterministic uniform stream on [0, 1) from a 64-bit seed."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return _mix(self._state)

    def next_float(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53

    def floats(self, n: int) -> list[float]:
        return [self.next_float() for _ in range(n)]
