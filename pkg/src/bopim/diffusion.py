"""SI diffusion on temporal graphs: simulation, Monte Carlo spread, exact oracle.

Update rule (one-step latency): in round ``t`` every snapshot-``t`` edge with
exactly one endpoint infected *before* the round flips one Bernoulli(lambda)
coin; successes infect the other endpoint at the end of the round. Nodes
infected in round ``t`` only transmit from round ``t + 1`` on.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .errors import InvalidLambda, InvalidParam, KTooLarge, TooManyContacts
from .temporal_graph import TemporalGraph

DEFAULT_N_SIMS = 1000
# replicates per RNG substream; fixed so results never depend on thread count
BLOCK_SIZE = 256
DEFAULT_CONTACT_CAP = 20


@dataclass(frozen=True)
class SpreadEstimate:
    mean: float
    std_err: float
    n_sims: int


def substream(seed, *keys: int) -> np.random.SeedSequence:
    """Deterministic child stream of ``seed`` addressed by ``keys``."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(keys))
    return np.random.SeedSequence(seed, spawn_key=tuple(keys))


def seed_mask(seeds: Iterable[int], n: int) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    idx = np.fromiter((int(s) for s in seeds), dtype=np.int64)
    if len(idx) and (idx.min() < 0 or idx.max() >= n):
        raise ValueError("seed node outside 0..n-1")
    if len(np.unique(idx)) != len(idx):
        raise ValueError("duplicate seed nodes")
    if len(idx) > n:
        raise KTooLarge(f"k={len(idx)} > n={n}")
    mask[idx] = True
    return mask


def _check_lambda(lam) -> None:
    if not (0 <= lam <= 1):
        raise InvalidLambda(f"lambda must lie in [0, 1], got {lam!r}")


def si_kernel(G: TemporalGraph, mask: np.ndarray, lam: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Run ``size`` independent SI replicates; return infected counts after round T."""
    state = np.broadcast_to(mask, (size, G.n)).copy()
    if lam == 0:
        return state.sum(axis=1)
    for edges in G.snapshots:
        if len(edges) == 0:
            continue
        a, b = edges[:, 0], edges[:, 1]
        ia, ib = state[:, a], state[:, b]
        attempt = ia ^ ib
        if lam < 1:
            attempt &= rng.random(attempt.shape) < lam
        rows, cols = np.nonzero(attempt & ia)
        rows2, cols2 = np.nonzero(attempt & ib)
        state[rows, b[cols]] = True
        state[rows2, a[cols2]] = True
    return state.sum(axis=1)


Kernel = Callable[[TemporalGraph, np.ndarray, float, np.random.Generator, int], np.ndarray]


def simulate_si(G: TemporalGraph, seeds: Iterable[int], lam: float, rng: np.random.Generator) -> int:
    """One SI realization; returns the number of infected nodes after round T."""
    _check_lambda(lam)
    return int(si_kernel(G, seed_mask(seeds, G.n), float(lam), rng, 1)[0])


def estimate_spread(
    G: TemporalGraph,
    seeds: Iterable[int],
    lam: float,
    n_sims: int = DEFAULT_N_SIMS,
    seed=0,
    threads: int = 1,
    kernel: Kernel = si_kernel,
) -> SpreadEstimate:
    """Monte Carlo estimate of the expected spread of ``seeds``.

    Replicates are split into fixed blocks of :data:`BLOCK_SIZE`, each driven
    by its own substream of ``seed``, so the result is bit-identical for any
    ``threads``.
    """
    _check_lambda(lam)
    if n_sims < 1:
        raise InvalidParam("n_sims must be >= 1")
    mask = seed_mask(seeds, G.n)
    lam = float(lam)
    n_blocks = -(-n_sims // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, n_sims - i * BLOCK_SIZE) for i in range(n_blocks)]

    def run(i: int) -> np.ndarray:
        rng = np.random.default_rng(substream(seed, i))
        return kernel(G, mask, lam, rng, sizes[i])

    if threads > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    else:
        parts = [run(i) for i in range(n_blocks)]
    counts = np.concatenate(parts).astype(np.float64)
    mean = float(counts.mean())
    se = float(counts.std(ddof=1) / math.sqrt(n_sims)) if n_sims > 1 else 0.0
    return SpreadEstimate(mean, se, n_sims)


def reachable_set(G: TemporalGraph, seeds: Iterable[int]) -> np.ndarray:
    """Temporal forward-reachable mask from ``seeds`` (the lambda = 1 cascade)."""
    state = seed_mask(seeds, G.n)
    for edges in G.snapshots:
        if len(edges) == 0:
            continue
        a, b = edges[:, 0], edges[:, 1]
        ia, ib = state[a], state[b]
        new = state.copy()
        new[b[ia]] = True
        new[a[ib]] = True
        state = new
    return state


def relevant_contacts(G: TemporalGraph, seeds: Iterable[int]) -> int:
    """Number of snapshot edges whose coin can matter for ``seeds``.

    An edge of snapshot ``t`` counts when at least one endpoint is temporally
    reachable before round ``t``; coins of all other edges are never flipped.
    The enumeration in :func:`exact_spread` visits at most ``2**count``
    outcomes.
    """
    state = seed_mask(seeds, G.n)
    count = 0
    for edges in G.snapshots:
        if len(edges) == 0:
            continue
        a, b = edges[:, 0], edges[:, 1]
        ia, ib = state[a], state[b]
        count += int(np.count_nonzero(ia | ib))
        new = state.copy()
        new[b[ia]] = True
        new[a[ib]] = True
        state = new
    return count


def exact_spread(G: TemporalGraph, seeds: Iterable[int], lam, cap: int = DEFAULT_CONTACT_CAP):
    """Exact expected spread by enumerating every coin outcome that matters.

    Arithmetic follows the type of ``lam``: pass a :class:`fractions.Fraction`
    for an exact rational result.
    """
    _check_lambda(lam)
    seeds = list(seeds)
    c = relevant_contacts(G, seeds)
    if c > cap:
        raise TooManyContacts(f"{c} seed-reachable contacts exceed cap {cap}")
    one = lam - lam + 1
    q = one - lam
    snaps = [[(int(a), int(b)) for a, b in s] for s in G.snapshots]

    @lru_cache(maxsize=None)
    def expect(t: int, infected: frozenset):
        if t == len(snaps):
            return one * len(infected)
        targets = []
        for a, b in snaps[t]:
            ia, ib = a in infected, b in infected
            if ia != ib:
                targets.append(b if ia else a)
        if not targets:
            return expect(t + 1, infected)
        total = lam - lam
        n_att = len(targets)
        for outcome in range(1 << n_att):
            hits = [targets[i] for i in range(n_att) if outcome >> i & 1]
            s = len(hits)
            p = lam**s * q ** (n_att - s)
            if p == 0:
                continue
            total += p * expect(t + 1, infected | frozenset(hits))
        return total

    return expect(0, frozenset(seeds))
