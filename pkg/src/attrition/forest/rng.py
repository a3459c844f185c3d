"""Deterministic splitmix64 stream shared by every training backend.

All randomness during forest training (bootstrap resampling, per-node
feature subsets) comes from this one generator, implemented with the same
64-bit wrap-around arithmetic here and inside the numba kernels. That is
what makes forests bit-identical across backends, across serial and
parallel builds, and across runs.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB


def sm64_next(state: int) -> tuple[int, int]:
    """Advance the splitmix64 state; returns (new_state, output)."""
    state = (state + GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * MIX_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_2) & MASK64
    z = z ^ (z >> 31)
    return state, z


def derive_stream_seed(master_seed: int, index: int) -> int:
    """Per-tree stream seed from the master seed and the tree index.

    Independent of build order, so serial and parallel training see the
    same per-tree streams.
    """
    state = (master_seed ^ ((index + 1) * GAMMA)) & MASK64
    state, _ = sm64_next(state)
    state, z = sm64_next(state)
    return z


def draw_below(state: int, bound: int) -> tuple[int, int]:
    """One draw uniform over [0, bound). bound must be positive."""
    state, z = sm64_next(state)
    return state, z % bound
