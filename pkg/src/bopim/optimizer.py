"""BOPIM: Bayesian optimization of seed sets with a linear shrinkage surrogate."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .diffusion import DEFAULT_N_SIMS, SpreadEstimate, estimate_spread, substream
from .errors import InvalidConfig, InvalidLambda, KTooLarge
from .shrinkage_gibbs import Dataset, GibbsConfig, PosteriorDraws, fit, posterior_medians
from .temporal_graph import TemporalGraph, aggregate_degrees

# substream ids under the run seed
_DESIGN, _EVAL, _FIT = 0, 1, 2


@dataclass(frozen=True)
class BopimConfig:
    k: int
    lam: float
    N0: int = 20
    B: int = 5
    n_sims: int = DEFAULT_N_SIMS
    gibbs: GibbsConfig = field(default_factory=GibbsConfig)
    seed: int = 0

    def validate(self, n: int | None = None) -> None:
        if self.k < 1:
            raise InvalidConfig("k must be >= 1")
        if n is not None and self.k > n:
            raise KTooLarge(f"k={self.k} exceeds the number of nodes n={n}")
        if not 0 <= self.lam <= 1:
            raise InvalidLambda(f"lambda must lie in [0, 1], got {self.lam}")
        # the surrogate is fitted on the initial design, which needs two rows
        if self.N0 < 2 or self.B < 0 or self.n_sims < 1:
            raise InvalidConfig("need N0 >= 2, B >= 0 and n_sims >= 1")
        self.gibbs.validate()


@dataclass(frozen=True)
class EvalRecord:
    x: np.ndarray
    spread: SpreadEstimate
    phase: str

    @property
    def seeds(self) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.x)]


@dataclass
class RunResult:
    best_x: np.ndarray
    best_spread: SpreadEstimate
    history: list[EvalRecord]
    draws: PosteriorDraws
    objective_eval_count: int
    timing: dict[str, float] = field(default_factory=dict)

    @property
    def best_seeds(self) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.best_x)]


def seed_vector(nodes, n: int) -> np.ndarray:
    x = np.zeros(n, dtype=np.int8)
    x[list(nodes)] = 1
    return x


def sample_seed_degree_proportional(d, k: int, rng: np.random.Generator) -> np.ndarray:
    """Pick ``k`` nodes sequentially without replacement, each with probability
    proportional to its degree among the nodes not yet picked.

    Once every positive-degree node is taken the remaining picks are uniform.
    """
    d = np.asarray(d, dtype=np.float64)
    n = len(d)
    if k > n:
        raise KTooLarge(f"k={k} exceeds n={n}")
    w = d.copy()
    free = np.ones(n, dtype=bool)
    x = np.zeros(n, dtype=np.int8)
    for _ in range(k):
        total = w.sum()
        if total > 0:
            j = rng.choice(n, p=w / total)
        else:
            j = rng.choice(np.flatnonzero(free))
        x[j] = 1
        free[j] = False
        w[j] = 0.0
    return x


def sample_seed_uniform(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    if k > n:
        raise KTooLarge(f"k={k} exceeds n={n}")
    return seed_vector(rng.choice(n, size=k, replace=False), n)


def top_k(values, k: int) -> np.ndarray:
    """Indices of the ``k`` largest values, ties broken by smaller index."""
    order = np.argsort(-np.asarray(values, dtype=np.float64), kind="stable")
    return order[:k]


def acquire(draws: PosteriorDraws, k: int) -> np.ndarray:
    """Seed vector of the ``k`` nodes with the largest posterior medians."""
    return seed_vector(top_k(posterior_medians(draws), k), draws.n)


def run_bopim(
    G: TemporalGraph,
    cfg: BopimConfig,
    threads: int = 1,
    progress: Callable[[str, int], None] | None = None,
) -> RunResult:
    """Degree-proportional initial design, then ``B`` rounds of
    fit / acquire / evaluate; returns the best evaluated seed set."""
    cfg.validate(G.n)
    timing = {"initial": 0.0, "fit": 0.0, "acquisition": 0.0}
    history: list[EvalRecord] = []

    def evaluate(x, phase):
        i = len(history)
        est = estimate_spread(
            G, np.flatnonzero(x), cfg.lam, cfg.n_sims, seed=substream(cfg.seed, _EVAL, i), threads=threads
        )
        history.append(EvalRecord(x, est, phase))
        if progress:
            progress(phase, i)

    def refit(round_: int) -> PosteriorDraws:
        t0 = time.perf_counter()
        X = np.array([r.x for r in history], dtype=np.float64)
        y = np.array([r.spread.mean for r in history])
        gcfg = replace(cfg.gibbs, seed=substream(cfg.seed, _FIT, round_))
        out = fit(Dataset.from_responses(X, y), gcfg)
        timing["fit"] += time.perf_counter() - t0
        return out

    t0 = time.perf_counter()
    d = aggregate_degrees(G)
    design_rng = np.random.default_rng(substream(cfg.seed, _DESIGN))
    for _ in range(cfg.N0):
        evaluate(sample_seed_degree_proportional(d, cfg.k, design_rng), "init")
    timing["initial"] = time.perf_counter() - t0

    draws = refit(0)
    for b in range(cfg.B):
        t0 = time.perf_counter()
        evaluate(acquire(draws, cfg.k), "acquisition")
        timing["acquisition"] += time.perf_counter() - t0
        draws = refit(b + 1)

    means = np.array([r.spread.mean for r in history])
    best = int(np.argmax(means))
    return RunResult(
        best_x=history[best].x,
        best_spread=history[best].spread,
        history=history,
        draws=draws,
        objective_eval_count=len(history),
        timing=timing,
    )
