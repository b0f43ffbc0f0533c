"""Pairwise regression models fitted round by round.

Every variant regresses the tokens ``i`` received from ``j`` on an intercept
and some of: the tokens ``i`` gave to ``j`` (``rho``), the different-group
indicator (``gamma``) and their product (``delta``).  Self pairs are left out;
they carry no information because the self row is reproduced exactly by
``psi = -alpha`` and ``rho* = 1 - rho``.

Fits use the normal equations with a Cholesky solve.  The Gram matrix is at
most 4x4 here, so conditioning is benign, and the batched form lets the null
and influence procedures fit hundreds of thousands of small problems quickly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .core import CumulativeCounts, PairObservation, check_round, pair_index, pair_table
from .errors import DimensionMismatch, SelfRowPresent, UnknownCoefficient

DEFAULT_TOL = 1e-12


class ModelSpec(enum.Enum):
    RECIPROCITY = ("reciprocity", ("alpha", "rho"))
    GROUP = ("group", ("alpha", "gamma"))
    ADDITIVE = ("additive", ("alpha", "rho", "gamma"))
    INTERACTION = ("interaction", ("alpha", "rho", "gamma", "delta"))

    def __init__(self, label, coef_names):
        self.label = label
        self.coef_names = coef_names

    @classmethod
    def from_name(cls, name: str) -> "ModelSpec":
        key = name.strip().lower()
        for spec in cls:
            if spec.label == key:
                return spec
        raise ValueError(f"unknown model {name!r}; choose from {[s.label for s in cls]}")

    def index(self, coef: str) -> int:
        try:
            return self.coef_names.index(coef)
        except ValueError:
            raise UnknownCoefficient(coef) from None

    def __str__(self):
        return self.label


@dataclass
class FitResult:
    coefficients: dict[str, float]
    r_squared: float
    residuals: np.ndarray
    n_obs: int
    degenerate: bool

    def __getitem__(self, name: str) -> float:
        try:
            return self.coefficients[name]
        except KeyError:
            raise UnknownCoefficient(name) from None


@dataclass
class Trajectory:
    spec: ModelSpec
    coefficients: np.ndarray  # (T, p)
    r_squared: np.ndarray
    degenerate: np.ndarray

    def __len__(self) -> int:
        return len(self.r_squared)

    @property
    def rounds(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)

    def coef(self, name: str) -> np.ndarray:
        return self.coefficients[:, self.spec.index(name)]


class BatchFit(NamedTuple):
    coef: np.ndarray        # (..., p), NaN where degenerate
    r_squared: np.ndarray   # (...,)
    degenerate: np.ndarray  # (...,) bool
    residuals: np.ndarray   # (..., m), NaN where degenerate


def _cholesky_solve(G: np.ndarray, b: np.ndarray) -> np.ndarray:
    L = np.linalg.cholesky(G)
    p = G.shape[-1]
    z = np.empty_like(b)
    for k in range(p):
        z[:, k] = (b[:, k] - np.einsum("ki,ki->k", L[:, k, :k], z[:, :k])) / L[:, k, k]
    x = np.empty_like(b)
    for k in reversed(range(p)):
        x[:, k] = (z[:, k] - np.einsum("ki,ki->k", L[:, k + 1:, k], x[:, k + 1:])) / L[:, k, k]
    return x


def ols_batch(X: np.ndarray, y: np.ndarray, tol: float = DEFAULT_TOL) -> BatchFit:
    """Least squares on a stack of problems ``X[..., m, p]``, ``y[..., m]``.

    A problem is degenerate when the response is constant or the Gram matrix
    has reciprocal condition number (smallest over largest eigenvalue) below
    ``tol``; its coefficients, R^2 and residuals are NaN.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim < 2 or y.shape != X.shape[:-1]:
        raise DimensionMismatch(f"X has shape {X.shape}, y has shape {y.shape}")
    *lead, m, p = X.shape
    if m < p:
        raise DimensionMismatch(f"{m} rows cannot determine {p} coefficients")
    Xf = X.reshape(-1, m, p)
    yf = y.reshape(-1, m)
    K = Xf.shape[0]

    Xt = Xf.transpose(0, 2, 1)
    G = Xt @ Xf
    b = (Xt @ yf[:, :, None])[:, :, 0]
    centred = yf - yf.mean(axis=1, keepdims=True)
    sst = np.einsum("km,km->k", centred, centred)
    scale = np.einsum("km,km->k", yf, yf)

    ev = np.linalg.eigvalsh(G)
    lmin, lmax = ev[:, 0], ev[:, -1]
    degenerate = (lmax <= 0) | (lmin < tol * lmax) | (sst <= np.finfo(float).eps * scale)

    eye = np.eye(p)
    Gs = np.where(degenerate[:, None, None], eye, G)
    bs = np.where(degenerate[:, None], 0.0, b)
    coef = _cholesky_solve(Gs, bs) if K else np.zeros((0, p))
    resid = yf - (Xf @ coef[:, :, None])[:, :, 0]
    ssr = np.einsum("km,km->k", resid, resid)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.clip(1.0 - ssr / sst, 0.0, 1.0)

    coef[degenerate] = np.nan
    resid[degenerate] = np.nan
    r2[degenerate] = np.nan
    return BatchFit(coef.reshape(*lead, p), r2.reshape(lead), degenerate.reshape(lead),
                    resid.reshape(*lead, m))


def ols_fit(X, y, tol: float = DEFAULT_TOL, names: Sequence[str] | None = None) -> FitResult:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"X has shape {X.shape}, y has shape {y.shape}")
    if names is None:
        names = [f"b{k}" for k in range(X.shape[1])]
    elif len(names) != X.shape[1]:
        raise DimensionMismatch(f"{len(names)} names for {X.shape[1]} columns")
    bf = ols_batch(X, y, tol)
    return FitResult(
        coefficients={name: float(v) for name, v in zip(names, bf.coef)},
        r_squared=float(bf.r_squared),
        residuals=bf.residuals,
        n_obs=X.shape[0],
        degenerate=bool(bf.degenerate),
    )


def _columns(y_ji, g, spec: ModelSpec) -> list:
    cols = [np.ones_like(y_ji)]
    if "rho" in spec.coef_names:
        cols.append(y_ji)
    if "gamma" in spec.coef_names:
        cols.append(np.broadcast_to(g, y_ji.shape))
    if "delta" in spec.coef_names:
        cols.append(g * y_ji)
    return cols


def design_matrix(pairs: Sequence[PairObservation], spec: ModelSpec,
                  extra: Mapping[str, Sequence[float]] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Design matrix and response for a pair table.

    Columns are the intercept followed by the variant's regressors in the order
    of ``spec.coef_names``, then any caller-supplied ``extra`` columns (one
    value per pair) in mapping order.
    """
    if not pairs:
        raise ValueError("empty pair table")
    if any(p.i == p.j for p in pairs):
        raise SelfRowPresent("self pairs must be excluded from the modelling table")
    y = np.array([p.y_ij for p in pairs], dtype=float)
    y_ji = np.array([p.y_ji for p in pairs], dtype=float)
    g = np.array([p.g_ij for p in pairs], dtype=float)
    cols = _columns(y_ji, g, spec)
    for name, values in (extra or {}).items():
        values = np.asarray(values, dtype=float)
        if values.shape != y.shape:
            raise DimensionMismatch(f"extra column {name!r} has {values.size} values for {y.size} pairs")
        cols.append(values)
    return np.column_stack(cols), y


def design_from_counts(Y: np.ndarray, g: np.ndarray, spec: ModelSpec) -> tuple[np.ndarray, np.ndarray]:
    """Batched design matrices from count matrices ``Y[..., n, n]``.

    Rows follow :func:`pair_table` order (row-major over ``i != j``).
    """
    n = Y.shape[-1]
    ii, jj = pair_index(n)
    resp = Y[..., ii, jj].astype(float)
    y_ji = Y[..., jj, ii].astype(float)
    cols = _columns(y_ji, g[ii, jj].astype(float), spec)
    return np.stack(cols, axis=-1), resp


def fit_counts(Y: np.ndarray, g: np.ndarray, spec: ModelSpec, tol: float = DEFAULT_TOL) -> BatchFit:
    X, resp = design_from_counts(Y, g, spec)
    return ols_batch(X, resp, tol)


def fit_at_round(counts: CumulativeCounts, spec: ModelSpec, t: int, tol: float = DEFAULT_TOL,
                 extra: Mapping[str, Sequence[float]] | None = None) -> FitResult:
    check_round(t, counts.n_rounds)
    if extra:
        X, y = design_matrix(pair_table(counts, t), spec, extra)
        names = list(spec.coef_names) + list(extra)
    else:
        X, y = design_from_counts(counts.at(t), counts.g, spec)
        names = spec.coef_names
    return ols_fit(X, y, tol, names)


def fit_trajectory(counts: CumulativeCounts, spec: ModelSpec, tol: float = DEFAULT_TOL) -> Trajectory:
    bf = fit_counts(counts.by_round, counts.g, spec, tol)
    return Trajectory(spec, bf.coef, bf.r_squared, bf.degenerate)
