"""Deterministic stream derivation on top of the Philox counter-based generator.

Two kinds of streams are needed:

* one independent stream per Monte Carlo replication, keyed by
  (master_seed, replication_index) -- `replication_stream`;
* one independent stream per permutation draw inside a permutation test,
  realised as a fixed counter offset into a single keyed Philox sequence --
  `perm_uniforms` / `perm_draw_stream`.  Because the offset of draw k depends
  only on (seed, k), any partition of the draws across worker lanes
  regenerates bit-identical uniforms, which keeps tallies independent of the
  degree of parallelism.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "DEFAULT_SEED",
    "mix64",
    "derived_seed",
    "replication_stream",
    "perm_budget",
    "perm_uniforms",
    "perm_draw_stream",
]

DEFAULT_SEED = 123456789

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_PERM_SALT = 0xD1B54A32D192ED03
_DATA_TAG = 1 << 60


def mix64(x: int) -> int:
    """SplitMix64 finaliser: a high-quality 64-bit mixing bijection."""
    x &= _M64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _M64
    return x ^ (x >> 31)


def derived_seed(master_seed: int, index: int, salt: int = 0) -> int:
    """A 64-bit subseed that is a pure, collision-free function of the index."""
    return mix64(mix64(master_seed ^ salt) + index * _GOLDEN)


def _philox(key0: int, key1: int) -> np.random.Philox:
    key = np.array([key0 & _M64, key1 & _M64], dtype=np.uint64)
    return np.random.Philox(key=key)


def replication_stream(master_seed: int, rep_index: int) -> np.random.Generator:
    """The data-generation stream of one simulation replication."""
    return np.random.Generator(_philox(master_seed, _DATA_TAG | rep_index))


def rep_permutation_seed(master_seed: int, rep_index: int) -> int:
    """Seed handed to the permutation test run inside one replication."""
    return derived_seed(master_seed, rep_index, _PERM_SALT)


def perm_budget(n_pooled: int) -> int:
    """Uniform doubles reserved per permutation draw (multiple of 4).

    A Fisher-Yates pass over N elements consumes N-1 doubles; rounding the
    budget up to a multiple of 4 aligns draws with Philox counter blocks so
    that `advance` can jump to any draw exactly.
    """
    need = max(n_pooled - 1, 1)
    return -(-need // 4) * 4


def _perm_base(seed: int) -> np.random.Philox:
    return _philox(mix64(seed ^ _PERM_SALT), seed)


def perm_draw_stream(seed: int, draw_index: int, n_pooled: int) -> np.random.Generator:
    """Generator positioned at the start of one permutation draw's block."""
    bg = _perm_base(seed)
    bg.advance(draw_index * perm_budget(n_pooled) // 4)
    return np.random.Generator(bg)


def perm_uniforms(seed: int, first_draw: int, n_draws: int, n_pooled: int) -> np.ndarray:
    """Uniforms for draws [first_draw, first_draw + n_draws), one row per draw.

    Row k equals what `perm_draw_stream(seed, first_draw + k, n_pooled)`
    would generate, so lanes covering disjoint draw ranges tile the same
    matrix.
    """
    budget = perm_budget(n_pooled)
    gen = perm_draw_stream(seed, first_draw, n_pooled)
    return gen.random(n_draws * budget).reshape(n_draws, budget)
