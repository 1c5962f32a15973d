"""Studentized permutation versions of the non-WMW tests.

The pooled sample is randomly relabelled (first n1 positions -> arm 1, rest
-> arm 2), the studentized statistic is recomputed for every draw with the
same degenerate-sample handling as on real data, and the two-sided p-value
is 2*min(p1, p2) where p1/p2 are the fractions of permuted statistics <= /
>= the observed one (exact ties count in both tallies).

Draw k of a run is generated from a counter-based stream that depends only
on (seed, k), so results are bit-identical for any number of worker lanes
and for any chunking of the draws.  The observed statistic used in the
tallies is evaluated through the same vectorized kernel as the permuted
ones, which makes tie comparisons exact.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ._batch import moments_from_perm, stat_arrays
from .errors import InvalidKind
from .ranks import TwoSamples
from .rng import DEFAULT_SEED, perm_uniforms
from .stat_tests import TestKind, TestResult, run_test

__all__ = ["PermutationResult", "permutation_test", "shuffle"]

_CHUNK_DRAWS = 2048


@dataclass(frozen=True)
class PermutationResult:
    observed: TestResult
    p1: float
    p2: float
    p_value: float
    n_perm: int
    seed: int


def shuffle(values, rng: np.random.Generator) -> np.ndarray:
    """Uniform Fisher-Yates shuffle consuming one double per swap step."""
    v = np.array(values, dtype=float)
    for i in range(v.size - 1, 0, -1):
        j = int(rng.random() * (i + 1))
        v[i], v[j] = v[j], v[i]
    return v


def _batch_permutations(u: np.ndarray, n: int) -> np.ndarray:
    """Row-wise Fisher-Yates index permutations driven by uniform rows.

    Row k applies exactly the swaps `shuffle` would perform with the same
    uniform stream, so both paths realise identical permutations.
    """
    m = u.shape[0]
    perm = np.tile(np.arange(n), (m, 1))
    rows = np.arange(m)
    for step, i in enumerate(range(n - 1, 0, -1)):
        j = (u[:, step] * (i + 1)).astype(np.int64)
        tmp = perm[rows, i].copy()
        perm[rows, i] = perm[rows, j]
        perm[rows, j] = tmp
    return perm


@dataclass
class PermContext:
    """Pooled-rank quantities shared by every permutation draw."""

    ravg: np.ndarray
    rmin: np.ndarray
    rmax: np.ndarray
    n1: int
    has_ties: bool
    all_tied: bool
    var_wmw_raw: float

    @classmethod
    def from_pooled(cls, pooled: np.ndarray, n1: int) -> "PermContext":
        n = pooled.size
        rmin = rankdata(pooled, method="min")
        rmax = rankdata(pooled, method="max")
        ravg = 0.5 * (rmin + rmax)
        var_wmw_raw = float(
            np.sum((ravg - (n + 1) / 2.0) ** 2) / (n - 1) / (n * n1 * (n - n1))
        )
        return cls(
            ravg=ravg,
            rmin=rmin,
            rmax=rmax,
            n1=n1,
            has_ties=bool(np.any(rmin != rmax)),
            all_tied=bool(np.all(pooled == pooled[0])),
            var_wmw_raw=var_wmw_raw,
        )

    def moments_for(self, perm_rows: np.ndarray):
        ravg = self.ravg[perm_rows]
        if self.has_ties:
            rmin, rmax = self.rmin[perm_rows], self.rmax[perm_rows]
        else:
            rmin = rmax = ravg
        return moments_from_perm(
            ravg, rmin, rmax, self.n1, self.has_ties, self.all_tied, self.var_wmw_raw
        )

    def observed_stats(self, kinds) -> np.ndarray:
        identity = np.arange(self.ravg.size)[None, :]
        mm = self.moments_for(identity)
        return np.array([stat_arrays(mm, k)[0][0] for k in kinds])


def tally_draws(
    ctx: PermContext,
    kinds,
    observed: np.ndarray,
    seed: int,
    first_draw: int,
    n_draws: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Counts of permuted statistics <= / >= the observed one, per kind."""
    n = ctx.ravg.size
    n_le = np.zeros(len(kinds), dtype=np.int64)
    n_ge = np.zeros(len(kinds), dtype=np.int64)
    done = 0
    while done < n_draws:
        m = min(_CHUNK_DRAWS, n_draws - done)
        u = perm_uniforms(seed, first_draw + done, m, n)
        perm_rows = _batch_permutations(u[:, : n - 1], n)
        mm = ctx.moments_for(perm_rows)
        for idx, kind in enumerate(kinds):
            stat = stat_arrays(mm, kind)[0]
            n_le[idx] += int(np.count_nonzero(stat <= observed[idx]))
            n_ge[idx] += int(np.count_nonzero(stat >= observed[idx]))
        done += m
    return n_le, n_ge


def _lane_worker(args):
    pooled, n1, labels, observed, seed, first, count = args
    ctx = PermContext.from_pooled(pooled, n1)
    kinds = [TestKind.parse(s) for s in labels]
    return tally_draws(ctx, kinds, observed, seed, first, count)


def permutation_test(
    data: TwoSamples,
    kind: TestKind,
    n_perm: int = 10_000,
    seed: int = DEFAULT_SEED,
    threads: int = 1,
) -> PermutationResult:
    """Studentized permutation test for one statistic.

    Parameters
    ----------
    data : TwoSamples
    kind : TestKind
        Any family except "wmw" (whose variance is a pooled-rank invariant,
        making the studentized permutation version degenerate).
    n_perm : int
        Number of random relabelings, >= 1.
    seed : int
        Stream seed; identical (data, kind, n_perm, seed) give bit-identical
        results regardless of `threads`.
    threads : int
        Worker processes for the draw loop.
    """
    if kind.family == "wmw":
        raise InvalidKind("the permutation approach is defined for the non-WMW statistics")
    if n_perm < 1:
        raise ValueError("n_perm must be >= 1")
    data.require_min_size(2)
    observed_result = run_test(data, kind)
    pooled = data.pooled()
    ctx = PermContext.from_pooled(pooled, data.n1)
    observed = ctx.observed_stats([kind])
    if threads > 1 and n_perm > _CHUNK_DRAWS:
        bounds = list(range(0, n_perm, _CHUNK_DRAWS)) + [n_perm]
        tasks = [
            (pooled, data.n1, [kind.label()], observed, seed, a, b - a)
            for a, b in zip(bounds[:-1], bounds[1:])
        ]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_lane_worker, tasks))
        n_le = sum(p[0] for p in parts)
        n_ge = sum(p[1] for p in parts)
    else:
        n_le, n_ge = tally_draws(ctx, [kind], observed, seed, 0, n_perm)
    p1 = float(n_le[0]) / n_perm
    p2 = float(n_ge[0]) / n_perm
    return PermutationResult(
        observed=observed_result,
        p1=p1,
        p2=p2,
        p_value=min(1.0, 2.0 * min(p1, p2)),
        n_perm=n_perm,
        seed=seed,
    )
