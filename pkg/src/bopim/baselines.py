"""Reference seed-selection methods: lazy greedy (CELF) and a random seed set."""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .diffusion import DEFAULT_N_SIMS, SpreadEstimate, estimate_spread, exact_spread, substream
from .errors import InvalidLambda, KTooLarge
from .optimizer import seed_vector
from .temporal_graph import TemporalGraph

Evaluator = Callable[[Sequence[int]], SpreadEstimate]


class MonteCarloEvaluator:
    """Counts calls; call ``i`` uses substream ``i`` of ``seed``."""

    def __init__(self, G: TemporalGraph, lam: float, n_sims: int = DEFAULT_N_SIMS, seed=0, threads: int = 1):
        self.G, self.lam, self.n_sims, self.seed, self.threads = G, lam, n_sims, seed, threads
        self.calls = 0
        self.log: list[tuple[tuple[int, ...], SpreadEstimate]] = []

    def __call__(self, seeds: Sequence[int]) -> SpreadEstimate:
        est = estimate_spread(
            self.G, seeds, self.lam, self.n_sims, seed=substream(self.seed, self.calls), threads=self.threads
        )
        self.calls += 1
        self.log.append((tuple(int(s) for s in seeds), est))
        return est


class ExactEvaluator:
    """Noise-free evaluator backed by :func:`exact_spread` (small graphs only)."""

    def __init__(self, G: TemporalGraph, lam, cap: int = 20):
        self.G, self.lam, self.cap = G, lam, cap
        self.calls = 0
        self.log: list[tuple[tuple[int, ...], SpreadEstimate]] = []

    def __call__(self, seeds: Sequence[int]) -> SpreadEstimate:
        self.calls += 1
        est = SpreadEstimate(exact_spread(self.G, seeds, self.lam, cap=self.cap), 0.0, 0)
        self.log.append((tuple(int(s) for s in seeds), est))
        return est


@dataclass
class BaselineResult:
    x: np.ndarray
    spread: SpreadEstimate
    eval_count: int
    history: list[tuple[tuple[int, ...], SpreadEstimate]] = field(default_factory=list)
    timing: dict[str, float] = field(default_factory=dict)

    @property
    def seeds(self) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.x)]


def celf(n: int, k: int, evaluate: Evaluator) -> tuple[list[int], SpreadEstimate, int]:
    """Lazy-forward greedy maximization of a monotone submodular set function.

    The heap holds ``(-gain, node, round)``; a popped entry computed against
    the current set is accepted, otherwise its gain is recomputed and pushed
    back. Equal gains resolve to the smaller node index.
    """
    if k > n:
        raise KTooLarge(f"k={k} exceeds n={n}")
    calls = 0
    heap = []
    cache: dict[int, SpreadEstimate] = {}
    for v in range(n):
        est = evaluate([v])
        calls += 1
        cache[v] = est
        heap.append((-est.mean, v, 0))
    heapq.heapify(heap)

    chosen: list[int] = []
    current = SpreadEstimate(0, 0.0, 0)
    while len(chosen) < k:
        neg_gain, v, rnd = heapq.heappop(heap)
        if rnd == len(chosen):
            chosen.append(v)
            current = cache[v]
            continue
        est = evaluate(chosen + [v])
        calls += 1
        cache[v] = est
        heapq.heappush(heap, (-(est.mean - current.mean), v, len(chosen)))
    return chosen, current, calls


def greedy_celf(
    G: TemporalGraph,
    k: int,
    lam: float,
    n_sims: int = DEFAULT_N_SIMS,
    seed=0,
    evaluator: Evaluator | None = None,
    threads: int = 1,
) -> BaselineResult:
    """Greedy seed selection with CELF; ``evaluator`` defaults to Monte Carlo."""
    if not 0 <= lam <= 1:
        raise InvalidLambda(f"lambda must lie in [0, 1], got {lam}")
    if k > G.n:
        raise KTooLarge(f"k={k} exceeds n={G.n}")
    ev = evaluator if evaluator is not None else MonteCarloEvaluator(G, lam, n_sims, seed, threads)
    t0 = time.perf_counter()
    chosen, spread, calls = celf(G.n, k, ev)
    return BaselineResult(
        seed_vector(sorted(chosen), G.n),
        spread,
        calls,
        history=list(getattr(ev, "log", [])),
        timing={"greedy": time.perf_counter() - t0},
    )


def random_baseline(
    G: TemporalGraph,
    k: int,
    lam: float,
    n_sims: int = DEFAULT_N_SIMS,
    seed=0,
    threads: int = 1,
) -> BaselineResult:
    """Uniformly random ``k``-subset, evaluated once."""
    if k > G.n:
        raise KTooLarge(f"k={k} exceeds n={G.n}")
    t0 = time.perf_counter()
    rng = np.random.default_rng(substream(seed, 0))
    nodes = sorted(int(v) for v in rng.choice(G.n, size=k, replace=False))
    est = estimate_spread(G, nodes, lam, n_sims, seed=substream(seed, 1), threads=threads)
    return BaselineResult(
        seed_vector(nodes, G.n),
        est,
        1,
        history=[(tuple(nodes), est)],
        timing={"random": time.perf_counter() - t0},
    )
