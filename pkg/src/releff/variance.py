"""Variance estimators for the relative-effect estimate.

Four main estimators (the classical rank-test variance, the unbiased
estimator, the Brunner-Munzel / DeLong estimator and the Perme-Manevski
"exact" estimator) plus Shirahata's four continuous-data estimators, each in
its general plus/minus-ECDF form and its continuity-reduced form.

Degenerate inputs are handled the same way throughout:

* all pooled values tied  -> the rank-test variance is replaced by
  1/(4*n1*n2); the others fall back to the generic floor;
* completely separated arms -> variances collapse to zero and are floored at
  1/(n1^2*n2^2), the value a single interleaved observation would produce;
* otherwise a raw estimate below the floor is lifted to the floor.

The returned ``value`` is therefore always strictly positive.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .effect import EffectSummary, estimate_effect
from .errors import SizeTooSmall, TiesInReducedForm
from .ranks import TwoSamples, mid_ranks

__all__ = [
    "VarianceKind",
    "Degeneracy",
    "ShirahataKind",
    "ShirahataForm",
    "VarianceEstimate",
    "generic_floor",
    "var_wmw",
    "var_unbiased",
    "var_bm",
    "var_pm",
    "var_shirahata",
]


class VarianceKind(str, enum.Enum):
    WMW = "wmw"
    N = "n"
    BM = "bm"
    PM = "pm"
    SH_U = "sh_u"
    SH_B = "sh_b"
    SH_FP = "sh_fp"
    SH_J = "sh_j"


class Degeneracy(str, enum.Enum):
    NONE = "none"
    ALL_TIED = "all_tied"
    SEPARATED = "separated"
    FLOORED = "floored"


class ShirahataKind(str, enum.Enum):
    U = "u"    # unbiased
    B = "b"    # bootstrap
    FP = "fp"  # Fligner-Policello
    J = "j"    # jackknife


class ShirahataForm(str, enum.Enum):
    GENERAL = "general"
    CONTINUOUS_REDUCED = "continuous_reduced"


@dataclass(frozen=True)
class VarianceEstimate:
    kind: VarianceKind
    raw: float
    value: float
    degenerate: Degeneracy = Degeneracy.NONE


def generic_floor(n1: int, n2: int) -> float:
    """Lower bound 1/(n1^2 n2^2) applied to the non-rank-test estimators."""
    return 1.0 / (n1 * n1 * n2 * n2)


def _finish(kind, raw, n1, n2, all_tied, separated) -> VarianceEstimate:
    floor = generic_floor(n1, n2)
    value = max(raw, floor)
    if all_tied:
        flag = Degeneracy.ALL_TIED
    elif separated:
        flag = Degeneracy.SEPARATED
    elif raw < floor:
        flag = Degeneracy.FLOORED
    else:
        flag = Degeneracy.NONE
    return VarianceEstimate(kind=kind, raw=float(raw), value=float(value), degenerate=flag)


def var_wmw(data: TwoSamples) -> VarianceEstimate:
    """Rank-test variance of p_hat (valid under equal distributions).

    sigma_R^2 = sum (R_gi - (N+1)/2)^2 / (N-1), divided by N*n1*n2; this is
    identical to N^3/(N-1) * (int F^2 dF - 1/4) / (N*n1*n2) for every tie
    pattern.  If all N values coincide the raw estimate is zero and the value
    1/(4*n1*n2) is substituted.
    """
    data.require_min_size(2)
    n1, n2 = data.n1, data.n2
    pooled = data.pooled()
    n = n1 + n2
    r = mid_ranks(pooled)
    raw = float(np.sum((r - (n + 1) / 2.0) ** 2) / (n - 1) / (n * n1 * n2))
    if np.all(pooled == pooled[0]):
        return VarianceEstimate(
            kind=VarianceKind.WMW,
            raw=0.0,
            value=1.0 / (4.0 * n1 * n2),
            degenerate=Degeneracy.ALL_TIED,
        )
    return VarianceEstimate(kind=VarianceKind.WMW, raw=raw, value=raw)


def _check_summary(es: EffectSummary) -> None:
    if min(es.n1, es.n2) < 2:
        raise SizeTooSmall("variance estimation needs at least 2 observations per arm")


def unbiased_raw(es: EffectSummary) -> float:
    n1, n2 = es.n1, es.n2
    return (
        n2 * es.tau1_hat
        + n1 * es.tau2_hat
        - es.tau0_hat
        - (n1 + n2 - 1) * es.p_hat**2
    ) / ((n1 - 1) * (n2 - 1))


def var_unbiased(es: EffectSummary) -> VarianceEstimate:
    """Unbiased variance estimator, consistent for arbitrary distributions."""
    _check_summary(es)
    return _finish(VarianceKind.N, unbiased_raw(es), es.n1, es.n2, es.all_tied, es.separated)


def var_bm(es: EffectSummary) -> VarianceEstimate:
    """Brunner-Munzel (equivalently DeLong) variance: s1^2/n1 + s2^2/n2."""
    _check_summary(es)
    raw = es.sigma1_sq / es.n1 + es.sigma2_sq / es.n2
    return _finish(VarianceKind.BM, raw, es.n1, es.n2, es.all_tied, es.separated)


def var_pm(es: EffectSummary) -> VarianceEstimate:
    """Perme-Manevski variance: [p(1-p) + (n2-1)s1^2 + (n1-1)s2^2]/(n1 n2).

    For all-tied data the raw value is already the positive 1/(4*n1*n2); for
    separated arms the raw value is zero and the generic floor applies (a
    documented stand-in for the original authors' unspecified interval
    construction).
    """
    _check_summary(es)
    p = es.p_hat
    raw = (p * (1.0 - p) + (es.n2 - 1) * es.sigma1_sq + (es.n1 - 1) * es.sigma2_sq) / (
        es.n1 * es.n2
    )
    return _finish(VarianceKind.PM, raw, es.n1, es.n2, es.all_tied, es.separated)


_SHIRAHATA_TO_VARIANCE = {
    ShirahataKind.U: VarianceKind.SH_U,
    ShirahataKind.B: VarianceKind.SH_B,
    ShirahataKind.FP: VarianceKind.SH_FP,
    ShirahataKind.J: VarianceKind.SH_J,
}


def _shirahata_general_raw(data: TwoSamples, kind: ShirahataKind) -> float:
    x1, x2 = data.s1.values, data.s2.values
    n1, n2 = data.n1, data.n2
    # plus-function placements: F1+(x2j) = P1(X <= x2j), S2+(x1i) = P2(X >= x1i)
    ge = x2[:, None] >= x1[None, :]      # [j, i]: x2j >= x1i
    f1p_at_x2 = ge.mean(axis=1)
    s2p_at_x1 = ge.mean(axis=0)
    a = float(np.mean(s2p_at_x1**2))     # int (S2+)^2 dF1  ==  int (1 - F2-)^2 dF1
    b = float(np.mean(f1p_at_x2**2))     # int (F1+)^2 dF2
    t = float(ge.mean())                 # int F1+ dF2
    n = n1 + n2
    if kind is ShirahataKind.U:
        return (n2 * a + n1 * b - t - (n - 1) * t * t) / ((n1 - 1) * (n2 - 1))
    if kind is ShirahataKind.B:
        return ((n2 - 1) * a + (n1 - 1) * b + t - (n - 1) * t * t) / (n1 * n2)
    if kind is ShirahataKind.FP:
        return a / n1 + b / n2 - (t + (n + 1) * t * t) / (n1 * n2)
    if kind is ShirahataKind.J:
        return a / (n1 - 1) + b / (n2 - 1) - (n - 2) * t * t / ((n1 - 1) * (n2 - 1))
    raise ValueError(f"unknown Shirahata kind: {kind!r}")


def _shirahata_reduced_raw(es: EffectSummary, kind: ShirahataKind) -> float:
    n1, n2 = es.n1, es.n2
    n = n1 + n2
    t0, t1, t2, p2 = es.tau0_hat, es.tau1_hat, es.tau2_hat, es.p_hat**2
    if kind is ShirahataKind.U:
        return (n2 * t1 + n1 * t2 - t0 - (n - 1) * p2) / ((n1 - 1) * (n2 - 1))
    if kind is ShirahataKind.B:
        return ((n2 - 1) * t1 + (n1 - 1) * t2 + t0 - (n - 1) * p2) / (n1 * n2)
    if kind is ShirahataKind.FP:
        return t1 / n1 + t2 / n2 - (t0 + (n + 1) * p2) / (n1 * n2)
    if kind is ShirahataKind.J:
        return t1 / (n1 - 1) + t2 / (n2 - 1) - (n - 2) * p2 / ((n1 - 1) * (n2 - 1))
    raise ValueError(f"unknown Shirahata kind: {kind!r}")


def var_shirahata(
    data: TwoSamples,
    kind: ShirahataKind,
    form: ShirahataForm = ShirahataForm.GENERAL,
) -> VarianceEstimate:
    """Shirahata-family variance estimator.

    The general form evaluates the plus/minus-ECDF displays verbatim and is
    valid for any tie pattern.  The continuity-reduced form substitutes the
    tau moments and is only equivalent on tie-free data; requesting it on
    tied data emits a ``TiesInReducedForm`` warning.  On tie-free data the
    general U form coincides with the unbiased estimator and the general J
    form with the Brunner-Munzel estimator.
    """
    data.require_min_size(2)
    kind = ShirahataKind(kind)
    form = ShirahataForm(form)
    es = estimate_effect(data)
    if form is ShirahataForm.GENERAL:
        raw = _shirahata_general_raw(data, kind)
    else:
        if es.beta_hat > 0.0 or np.unique(data.pooled()).size < data.n:
            warnings.warn(
                "continuity-reduced Shirahata form evaluated on tied data",
                TiesInReducedForm,
                stacklevel=2,
            )
        raw = _shirahata_reduced_raw(es, kind)
    return _finish(
        _SHIRAHATA_TO_VARIANCE[kind], raw, data.n1, data.n2, es.all_tied, es.separated
    )
