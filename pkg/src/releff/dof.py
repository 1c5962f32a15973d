"""Degrees-of-freedom estimators for the small-sample t-approximation.

Five variants: the Satterthwaite-type formula (DF) and its small-sample
shifts (DF1, DF2), the data-free trace formula (DF3), and the split-variance
trace formula (DF4).  All return real-valued (non-integer) degrees of
freedom.

When both per-arm variance components vanish (all pooled values tied, or
completely separated arms) the displays are 0/0; the convention then is to
substitute equal positive variances, which collapses each formula to a
data-free fallback.
"""
from __future__ import annotations

import enum
import math

from .effect import EffectSummary
from .errors import SizeTooSmall

__all__ = ["DfKind", "degrees_of_freedom", "MIN_ARM_SIZE"]


class DfKind(str, enum.Enum):
    DF = "df"
    DF1 = "df1"
    DF2 = "df2"
    DF3 = "df3"
    DF4 = "df4"


# smallest per-arm size for which the display has a positive denominator
MIN_ARM_SIZE = {
    DfKind.DF: 2,
    DfKind.DF1: 3,
    DfKind.DF2: 4,
    DfKind.DF3: 2,
    DfKind.DF4: 2,
}


def _satterthwaite(s1, s2, w1, w2, c1, c2) -> float:
    """(s1/w1 + s2/w2)^2 / (s1^2/(w1^2 c1) + s2^2/(w2^2 c2)); NaN on 0/0."""
    num = (s1 / w1 + s2 / w2) ** 2
    den = s1 * s1 / (w1 * w1 * c1) + s2 * s2 / (w2 * w2 * c2)
    if den == 0.0:
        return math.nan
    return num / den


def fallback_df(n1: int, n2: int, kind: DfKind) -> float:
    """Fallback value of each display under equal positive variance components."""
    if kind is DfKind.DF:
        return (n1 + n2) ** 2 * (n1 - 1) * (n2 - 1) / (
            n1 * n1 * (n1 - 1) + n2 * n2 * (n2 - 1)
        )
    if kind is DfKind.DF1:
        return _satterthwaite(1.0, 1.0, n1 - 1, n2 - 1, n1 - 2, n2 - 2)
    if kind is DfKind.DF2:
        return _satterthwaite(1.0, 1.0, n1 - 2, n2 - 2, n1 - 3, n2 - 3)
    if kind is DfKind.DF3:
        return 2.0 / (1.0 / (n1 - 1) + 1.0 / (n2 - 1))
    if kind is DfKind.DF4:
        return 4.0 * (n1 - 1) * (n2 - 1) / (n1 + n2 - 2)
    raise ValueError(f"unknown df kind: {kind!r}")


def degrees_of_freedom(es: EffectSummary, kind: DfKind) -> float:
    """Evaluate the chosen degrees-of-freedom display for the given summary."""
    kind = DfKind(kind)
    n1, n2 = es.n1, es.n2
    need = MIN_ARM_SIZE[kind]
    if min(n1, n2) < need:
        raise SizeTooSmall(
            f"{kind.value} needs at least {need} observations per arm, got ({n1}, {n2})"
        )
    s1, s2 = es.sigma1_sq, es.sigma2_sq
    if kind is DfKind.DF:
        df = _satterthwaite(s1, s2, n1, n2, n1 - 1, n2 - 1)
    elif kind is DfKind.DF1:
        df = _satterthwaite(s1, s2, n1 - 1, n2 - 1, n1 - 2, n2 - 2)
    elif kind is DfKind.DF2:
        df = _satterthwaite(s1, s2, n1 - 2, n2 - 2, n1 - 3, n2 - 3)
    elif kind is DfKind.DF3:
        return 2.0 / (1.0 / (n1 - 1) + 1.0 / (n2 - 1))
    else:  # DF4
        v1, v2 = es.sigma1_given_n_sq, es.sigma2_given_n_sq
        den = v1 * v1 / (n1 - 1) + v2 * v2 / (n2 - 1)
        df = (v1 + v2) ** 2 / den if den > 0.0 else math.nan
    if not math.isfinite(df) or df <= 0.0:
        return fallback_df(n1, n2, kind)
    return df
