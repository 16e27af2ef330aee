"""Gibbs samplers for the linear surrogate ``f(x) = x @ beta`` under shrinkage priors.

Three priors are supported, each with its own block-update order per sweep:

* ``hs`` (horseshoe, auxiliary-variable form):
  beta, sigma2, lambda2, tau2, nu, xi
* ``dl`` (Dirichlet-Laplace): beta, sigma2, psi, tau, phi
* ``r2d2``: beta, sigma2, psi, omega, xi, phi

In every case ``beta | . ~ N(V X'y, sigma2 V)`` with
``V = (X'X + S^-1)^-1`` and ``S`` the diagonal prior scale built from the
current local and global parameters.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Literal

import numpy as np

from .errors import DimensionMismatch, InvalidConfig
from .stat_dist import _gig, _inverse_gaussian, sample_mvn_precision

Prior = Literal["hs", "dl", "r2d2"]
PRIORS = ("hs", "dl", "r2d2")

# |beta_j| floor inside the inverse-Gaussian and GIG updates
BETA_FLOOR = 1e-10
_TINY = np.finfo(np.float64).tiny
_HUGE = 1.0 / _TINY


@dataclass(frozen=True)
class Dataset:
    """Design matrix and centered responses."""

    X: np.ndarray
    y: np.ndarray
    y_mean: float

    @classmethod
    def from_responses(cls, X, y) -> "Dataset":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.ndim != 2 or y.ndim != 1 or len(X) != len(y):
            raise DimensionMismatch(f"X {X.shape} and y {y.shape} do not line up")
        y_mean = float(y.mean())
        return cls(X, y - y_mean, y_mean)

    @property
    def N(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class GibbsConfig:
    """MCMC budget and prior hyperparameters.

    ``a_pi`` and ``a_r2d2`` default to ``None``, meaning the data-dependent
    defaults of :func:`r2d2_defaults`. ``freeze_scales`` holds every prior
    scale fixed so that ``S = I``, which turns the beta update into the
    ridge posterior; it exists for diagnostics.
    """

    n_iter: int = 6000
    n_burn: int = 1000
    prior: Prior = "hs"
    a_dl: float = 0.5
    a_pi: float | None = None
    a_r2d2: float | None = None
    b_r2d2: float = 0.5
    a1: float = 1.0
    b1: float = 1.0
    seed: int = 0
    freeze_scales: bool = False

    def validate(self) -> None:
        if self.prior not in PRIORS:
            raise InvalidConfig(f"unknown prior {self.prior!r}; choose from {PRIORS}")
        if self.n_iter < 1 or self.n_burn < 0 or self.n_burn >= self.n_iter:
            raise InvalidConfig("need 0 <= n_burn < n_iter")
        for name in ("a_dl", "b_r2d2", "a1", "b1", "a_pi", "a_r2d2"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise InvalidConfig(f"{name} must be > 0")


def r2d2_defaults(n: int, N: int) -> tuple[float, float]:
    """Return ``(a_pi, a)`` with ``a_pi = 1/(sqrt(n) N**0.25 log n)`` clipped to [0.005, 0.5] and ``a = n a_pi``."""
    if n > 1:
        a_pi = 1.0 / (math.sqrt(n) * N**0.25 * math.log(n))
    else:
        a_pi = 0.5
    a_pi = min(max(a_pi, 0.005), 0.5)
    return a_pi, n * a_pi


@dataclass(frozen=True)
class PosteriorDraws:
    beta: np.ndarray
    sigma2: np.ndarray
    prior: str
    y_mean: float = 0.0

    def __post_init__(self):
        if self.beta.ndim != 2 or len(self.beta) != len(self.sigma2):
            raise DimensionMismatch("beta rows must match sigma2 length")

    @property
    def n_draws(self) -> int:
        return self.beta.shape[0]

    @property
    def n(self) -> int:
        return self.beta.shape[1]

    def to_csv(self, path: str | Path) -> None:
        """One row per retained sweep: ``sigma2, beta_1..beta_n``."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sigma2"] + [f"beta_{j + 1}" for j in range(self.n)])
            for s2, row in zip(self.sigma2, self.beta):
                w.writerow([repr(float(s2))] + [repr(float(b)) for b in row])


class _Chain:
    """Shared beta and sigma2 updates; subclasses own the prior scales."""

    def __init__(self, data: Dataset, cfg: GibbsConfig, rng: np.random.Generator):
        self.X, self.y = data.X, data.y
        self.N, self.n = data.X.shape
        self.XtX = self.X.T @ self.X
        self.Xty = self.X.T @ self.y
        self.cfg = cfg
        self.rng = rng
        self.beta = np.zeros(self.n)
        self.sigma2 = float(np.var(self.y, ddof=1)) if self.N > 1 else 1.0
        if not self.sigma2 > 0:
            self.sigma2 = 1.0

    def scale(self) -> np.ndarray:
        raise NotImplementedError

    def update_scales(self) -> None:
        raise NotImplementedError

    def update_beta(self) -> None:
        s_inv = 1.0 / np.clip(self.scale(), _TINY, _HUGE)
        self.beta = sample_mvn_precision(self.Xty, self.XtX, s_inv, self.sigma2, self.rng)

    def update_sigma2(self) -> None:
        s_inv = 1.0 / np.clip(self.scale(), _TINY, _HUGE)
        resid = self.y - self.X @ self.beta
        shape = self.cfg.a1 + (self.N + self.n) / 2.0
        rate = self.cfg.b1 + (self.beta @ (s_inv * self.beta) + resid @ resid) / 2.0
        self.sigma2 = float(rate / self.rng.gamma(shape))

    def sweep(self) -> None:
        self.update_beta()
        self.update_sigma2()
        if not self.cfg.freeze_scales:
            self.update_scales()

    def abs_beta(self) -> np.ndarray:
        return np.maximum(np.abs(self.beta), BETA_FLOOR)

    def _ig(self, a, b):
        return b / self.rng.gamma(a, 1.0, size=np.shape(b) or None)


class _Horseshoe(_Chain):
    def __init__(self, *args):
        super().__init__(*args)
        self.lam2 = np.ones(self.n)
        self.tau2 = 1.0
        self.nu = np.ones(self.n)
        self.xi = 1.0

    def scale(self):
        return self.lam2 * self.tau2

    def update_scales(self):
        b2 = self.beta**2
        self.lam2 = np.maximum(self._ig(1.0, 1.0 / self.nu + b2 / (2.0 * self.tau2 * self.sigma2)), _TINY)
        self.tau2 = max(
            float(self._ig((self.n + 1) / 2.0, 1.0 / self.xi + np.sum(b2 / (2.0 * self.lam2 * self.sigma2)))),
            _TINY,
        )
        self.nu = self._ig(1.0, 1.0 + 1.0 / self.lam2)
        self.xi = float(self._ig(1.0, 1.0 + 1.0 / self.tau2))


class _DirichletLaplace(_Chain):
    def __init__(self, *args):
        super().__init__(*args)
        self.a = self.cfg.a_dl
        self.psi = np.ones(self.n)
        self.phi = np.full(self.n, 1.0 / self.n)
        self.tau = 1.0
        if self.cfg.freeze_scales:
            self.phi = np.ones(self.n)

    def scale(self):
        return self.psi * self.phi**2 * self.tau**2

    def update_scales(self):
        sigma = math.sqrt(self.sigma2)
        ab = self.abs_beta()
        mu = sigma * self.phi * self.tau / ab
        self.psi = np.maximum(1.0 / _inverse_gaussian(mu, 1.0, self.rng), _TINY)
        chi_tau = 2.0 * np.sum(ab / (sigma * self.phi))
        self.tau = max(float(_gig(self.n * self.a - self.n, 1.0, chi_tau, self.rng)), _TINY)
        T = _gig(self.a - 1.0, 1.0, 2.0 * ab / sigma, self.rng)
        self.phi = _normalize(T)


class _R2D2(_Chain):
    def __init__(self, *args):
        super().__init__(*args)
        a_pi, a = r2d2_defaults(self.n, self.N)
        self.a_pi = self.cfg.a_pi if self.cfg.a_pi is not None else a_pi
        self.a = self.cfg.a_r2d2 if self.cfg.a_r2d2 is not None else self.n * self.a_pi
        self.b = self.cfg.b_r2d2
        self.psi = np.ones(self.n)
        self.phi = np.full(self.n, 1.0 / self.n)
        self.omega = 1.0
        self.xi = 1.0
        if self.cfg.freeze_scales:
            self.phi = np.ones(self.n)
            self.omega = 2.0

    def scale(self):
        return self.psi * self.phi * self.omega / 2.0

    def update_scales(self):
        ab = self.abs_beta()
        b2 = ab**2
        mu = np.sqrt(self.sigma2 * self.phi * self.omega / 2.0) / ab
        self.psi = np.maximum(1.0 / _inverse_gaussian(mu, 1.0, self.rng), _TINY)
        chi_w = np.sum(2.0 * b2 / (self.sigma2 * self.psi * self.phi))
        self.omega = max(float(_gig(self.a - self.n / 2.0, 2.0 * self.xi, chi_w, self.rng)), _TINY)
        self.xi = float(self.rng.gamma(self.a + self.b) / (1.0 + self.omega))
        T = _gig(self.a_pi - 0.5, 2.0 * self.xi, 2.0 * b2 / (self.sigma2 * self.psi), self.rng)
        self.phi = _normalize(T)


def _normalize(T: np.ndarray) -> np.ndarray:
    T = np.maximum(T, _TINY)
    total = T.sum()
    if not np.isfinite(total):
        # rescale before summing so huge draws cannot overflow
        T = T / T.max()
        total = T.sum()
    return np.maximum(T / total, _TINY)


_CHAINS = {"hs": _Horseshoe, "dl": _DirichletLaplace, "r2d2": _R2D2}


def fit(data: Dataset, cfg: GibbsConfig = GibbsConfig()) -> PosteriorDraws:
    """Run one Gibbs chain and return the post-burn-in draws."""
    cfg.validate()
    if data.N < 2 or data.n < 1:
        raise InvalidConfig("need at least 2 observations and 1 coefficient")
    rng = np.random.default_rng(cfg.seed)
    chain = _CHAINS[cfg.prior](data, cfg, rng)
    keep = cfg.n_iter - cfg.n_burn
    betas = np.empty((keep, data.n))
    sig = np.empty(keep)
    for it in range(cfg.n_iter):
        chain.sweep()
        j = it - cfg.n_burn
        if j >= 0:
            betas[j] = chain.beta
            sig[j] = chain.sigma2
    return PosteriorDraws(betas, sig, cfg.prior, data.y_mean)


def posterior_medians(draws: PosteriorDraws) -> np.ndarray:
    return np.median(draws.beta, axis=0)


@dataclass(frozen=True)
class Prediction:
    """Posterior (predictive) draws of the spread at one seed vector."""

    draws: np.ndarray
    median: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "median", float(np.median(self.draws)))

    def quantile(self, q):
        return np.quantile(self.draws, q)

    def interval(self, level: float = 0.95) -> tuple[float, float]:
        lo, hi = self.quantile([(1 - level) / 2, (1 + level) / 2])
        return float(lo), float(hi)


def predict(draws: PosteriorDraws, x, include_noise: bool = False, rng: np.random.Generator | None = None) -> Prediction:
    """Per-draw surrogate values ``x @ beta_s + y_mean``.

    With ``include_noise`` each draw gets an independent ``N(0, sigma2_s)``
    perturbation, giving the posterior predictive of a noisy evaluation.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (draws.n,):
        raise DimensionMismatch(f"x has shape {x.shape}, expected ({draws.n},)")
    vals = draws.beta @ x + draws.y_mean
    if include_noise:
        rng = rng if rng is not None else np.random.default_rng()
        vals = vals + rng.standard_normal(len(vals)) * np.sqrt(draws.sigma2)
    return Prediction(vals)


def with_seed(cfg: GibbsConfig, seed: int) -> GibbsConfig:
    return replace(cfg, seed=seed)
