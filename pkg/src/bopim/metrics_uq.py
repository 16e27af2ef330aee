"""Surrogate validation metrics and posterior summaries of node importance.

Quantiles everywhere use linear interpolation between order statistics
(``numpy.quantile`` with ``method="linear"``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .diffusion import estimate_spread, substream
from .errors import DimensionMismatch, InvalidConfig
from .optimizer import (
    BopimConfig,
    RunResult,
    run_bopim,
    sample_seed_degree_proportional,
    sample_seed_uniform,
)
from .shrinkage_gibbs import PosteriorDraws, posterior_medians
from .temporal_graph import TemporalGraph, aggregate_degrees

VALIDATION_HEADER = ("dataset", "sampling", "prior", "mape", "mape_se", "coverage", "width")
_TEST_DESIGN, _TEST_EVAL, _TEST_NOISE = 10, 11, 12


def _paired(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    if len(a) == 0:
        raise DimensionMismatch("need at least one value")
    return a, b


def mape(y_hat, y) -> float:
    """Mean absolute prediction error."""
    y_hat, y = _paired(y_hat, y)
    return float(np.mean(np.abs(y_hat - y)))


def mape_se(y_hat, y) -> float:
    """Sample standard error of the absolute errors (0 for a single pair)."""
    y_hat, y = _paired(y_hat, y)
    if len(y) < 2:
        return 0.0
    return float(np.std(np.abs(y_hat - y), ddof=1) / math.sqrt(len(y)))


@dataclass(frozen=True)
class CoverageReport:
    coverage: float
    mean_width: float
    lower: np.ndarray
    upper: np.ndarray


def predictive_draws(draws: PosteriorDraws, X, rng: np.random.Generator | None, include_noise: bool = True) -> np.ndarray:
    """``(n_draws, N)`` posterior predictive values at the rows of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != draws.n:
        raise DimensionMismatch(f"rows have length {X.shape[1]}, expected {draws.n}")
    vals = draws.beta @ X.T + draws.y_mean
    if include_noise:
        rng = rng if rng is not None else np.random.default_rng()
        vals = vals + rng.standard_normal(vals.shape) * np.sqrt(draws.sigma2)[:, None]
    return vals


def interval_coverage(
    draws: PosteriorDraws,
    X_test,
    y_test,
    rng: np.random.Generator | None = None,
    level: float = 0.95,
    include_noise: bool = True,
) -> CoverageReport:
    """Share of ``y_test`` inside the central posterior predictive interval, and mean width.

    Containment is strict, matching an open interval ``(lo, hi)``.
    """
    y_test = np.asarray(y_test, dtype=np.float64)
    vals = predictive_draws(draws, X_test, rng, include_noise)
    if vals.shape[1] != len(y_test):
        raise DimensionMismatch("X_test and y_test lengths differ")
    lo, hi = np.quantile(vals, [(1 - level) / 2, (1 + level) / 2], axis=0)
    inside = (y_test > lo) & (y_test < hi)
    return CoverageReport(float(inside.mean()), float(np.mean(hi - lo)), lo, hi)


def point_predictions(draws: PosteriorDraws, X) -> np.ndarray:
    """Surrogate evaluated at the coordinatewise posterior median of beta."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != draws.n:
        raise DimensionMismatch(f"rows have length {X.shape[1]}, expected {draws.n}")
    return X @ posterior_medians(draws) + draws.y_mean


@dataclass(frozen=True)
class ValidationReport:
    sampling: str
    prior: str
    mape: float
    mape_se: float
    coverage: float
    width: float
    n_test: int

    def row(self, dataset: str) -> list:
        return [dataset, self.sampling, self.prior, self.mape, self.mape_se, self.coverage, self.width]


def validate_surrogate(
    G: TemporalGraph,
    cfg: BopimConfig,
    n_test: int = 100,
    sampling: Literal["random", "degree"] = "degree",
    seed: int = 0,
    threads: int = 1,
    result: RunResult | None = None,
) -> ValidationReport:
    """Fit BOPIM, then score its final surrogate on ``n_test`` fresh seed sets.

    Pass ``result`` to reuse an existing run. Test seed sets and their Monte
    Carlo spreads depend only on ``seed`` and ``sampling``.
    """
    if sampling not in ("random", "degree"):
        raise InvalidConfig(f"sampling must be 'random' or 'degree', got {sampling!r}")
    if n_test < 1:
        raise InvalidConfig("n_test must be >= 1")
    if result is None:
        result = run_bopim(G, cfg, threads=threads)
    draws = result.draws
    rng = np.random.default_rng(substream(seed, _TEST_DESIGN))
    if sampling == "degree":
        d = aggregate_degrees(G)
        X = np.array([sample_seed_degree_proportional(d, cfg.k, rng) for _ in range(n_test)])
    else:
        X = np.array([sample_seed_uniform(G.n, cfg.k, rng) for _ in range(n_test)])
    y = np.array(
        [
            estimate_spread(G, np.flatnonzero(x), cfg.lam, cfg.n_sims, seed=substream(seed, _TEST_EVAL, i), threads=threads).mean
            for i, x in enumerate(X)
        ]
    )
    y_hat = point_predictions(draws, X)
    cov = interval_coverage(draws, X, y, rng=np.random.default_rng(substream(seed, _TEST_NOISE)))
    return ValidationReport(
        sampling=sampling,
        prior=draws.prior,
        mape=mape(y_hat, y),
        mape_se=mape_se(y_hat, y),
        coverage=cov.coverage,
        width=cov.mean_width,
        n_test=n_test,
    )


def topk_inclusion_proportions(draws: PosteriorDraws, k: int) -> np.ndarray:
    """Fraction of draws in which each node's coefficient ranks in the top ``k``.

    Ties within a draw go to the smaller node index, so every draw marks
    exactly ``k`` nodes and the proportions sum to ``k``.
    """
    if draws.n_draws == 0:
        raise InvalidConfig("no draws")
    if not 1 <= k <= draws.n:
        raise InvalidConfig(f"k must lie in 1..{draws.n}")
    order = np.argsort(-draws.beta, axis=1, kind="stable")[:, :k]
    counts = np.bincount(order.ravel(), minlength=draws.n)
    return counts / draws.n_draws


@dataclass(frozen=True)
class BoxStats:
    min: np.ndarray
    q1: np.ndarray
    median: np.ndarray
    q3: np.ndarray
    max: np.ndarray

    def as_rows(self):
        return zip(self.min, self.q1, self.median, self.q3, self.max)


def posterior_box_stats(draws: PosteriorDraws) -> BoxStats:
    if draws.n_draws == 0:
        raise InvalidConfig("no draws")
    q = np.quantile(draws.beta, [0.0, 0.25, 0.5, 0.75, 1.0], axis=0, method="linear")
    return BoxStats(*q)
