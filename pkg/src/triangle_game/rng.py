"""Splitmix64 generator and seed derivation.

Hand-rolled so the Python strategies and the compiled kernel draw the exact
same sequences; both implementations must stay in lockstep (see
tests/test_kernel.py). Per-match seeds are derived from one master seed by
folding the cell coordinates into the state one at a time, so sweep cells
can run in any order or in parallel without perturbing each other.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """Finalizer of splitmix64; a 64-bit bijective scrambler."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Deterministic 64-bit stream: state += gamma; output mix64(state)."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        return mix64(self.state)

    def next_below(self, bound: int) -> int:
        """Uniform-ish draw in [0, bound) via modulo (bias < bound / 2^64)."""
        return self.next_u64() % bound


def derive_seed(master: int, *indices: int) -> int:
    """Per-cell seeds: fold each coordinate into the master via mix64."""
    h = mix64(master & _MASK)
    for ix in indices:
        h = mix64((h ^ ((ix + 1) * _GAMMA)) & _MASK)
    return h
