"""Model-free summaries: where tokens come from, reciprocity correlations,
scatter points and residuals for external plotting."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import CumulativeCounts, pair_index
from .errors import EmptyScope
from .fit import ModelSpec, fit_at_round

SCOPES = ("all", "ingroup", "outgroup")


class SourceProportions(NamedTuple):
    round: int
    p_ingroup: float
    p_outgroup: float
    p_self: float


class ScatterPoint(NamedTuple):
    i: int
    j: int
    y_ij: int
    y_ji: int
    g_ij: int
    s_ij: int


def source_proportions(counts: CumulativeCounts, t: int) -> SourceProportions:
    """Share of all tokens received by round ``t`` that came from self, the
    own group (excluding self) and the other group(s)."""
    Y = counts.at(t)
    total = counts.n_players * t
    p_self = np.trace(Y) / total
    same = (counts.g == 0) & (counts.s == 0)
    p_in = Y[same].sum() / total
    p_out = Y[counts.g == 1].sum() / total
    return SourceProportions(t, float(p_in), float(p_out), float(p_self))


def proportions_by_round(counts: CumulativeCounts) -> list[SourceProportions]:
    return [source_proportions(counts, t) for t in range(1, counts.n_rounds + 1)]


def _scope_mask(counts: CumulativeCounts, scope: str, include_self: bool) -> np.ndarray:
    if scope not in SCOPES:
        raise ValueError(f"scope must be one of {SCOPES}, got {scope!r}")
    if scope == "all":
        mask = np.ones_like(counts.g, dtype=bool)
    elif scope == "ingroup":
        mask = counts.g == 0
    else:
        mask = counts.g == 1
    if not include_self:
        mask = mask & (counts.s == 0)
    return mask


def reciprocity_correlation(counts: CumulativeCounts, t: int, scope: str = "ingroup",
                            include_self: bool = False) -> float | None:
    """Pearson correlation of received vs given counts over ordered pairs in scope.

    Returns None when either margin is constant (correlation undefined).
    """
    Y = counts.at(t)
    mask = _scope_mask(counts, scope, include_self)
    if mask.sum() < 2:
        raise EmptyScope(f"fewer than two ordered pairs in scope {scope!r}")
    a = Y[mask].astype(float)
    b = Y.T[mask].astype(float)
    a -= a.mean()
    b -= b.mean()
    den = np.sqrt((a @ a) * (b @ b))
    if den == 0:
        return None
    return float(np.clip((a @ b) / den, -1.0, 1.0))


def scatter_export(counts: CumulativeCounts, t: int, scope: str = "all",
                   include_self: bool = True) -> list[ScatterPoint]:
    Y = counts.at(t)
    mask = _scope_mask(counts, scope, include_self)
    ii, jj = pair_index(counts.n_players, include_self=True)
    return [
        ScatterPoint(i + 1, j + 1, int(Y[i, j]), int(Y[j, i]), int(counts.g[i, j]), int(counts.s[i, j]))
        for i, j in zip(ii.tolist(), jj.tolist()) if mask[i, j]
    ]


def residual_export(counts: CumulativeCounts, spec: ModelSpec, t: int) -> np.ndarray:
    """Residuals of the round-``t`` fit, one per ordered pair ``i != j`` in
    row-major order (NaN throughout if the fit is degenerate)."""
    return fit_at_round(counts, spec, t).residuals
