"""Random variates for the shrinkage-prior Gibbs samplers.

All samplers are vectorized over array parameters and take an explicit
``numpy.random.Generator``. Conventions:

* inverse gamma ``IG(a, b)``: density proportional to ``z**(-a-1) exp(-b/z)``
* gamma ``Gamma(a, rate)``: density proportional to ``z**(a-1) exp(-rate z)``
* inverse Gaussian ``IGauss(mu, lam)``: mean ``mu``, variance ``mu**3/lam``
* GIG ``(lambda0, rho, chi)``: density proportional to
  ``z**(lambda0-1) exp(-(rho z + chi/z)/2)``
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.linalg import solve_triangular

from .errors import FactorizationFailure, InvalidParam

JITTER_LADDER = (1e-10, 1e-9, 1e-8, 1e-7, 1e-6)


def _positive(name, value):
    arr = np.asarray(value, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise InvalidParam(f"{name} must be finite and > 0")
    return arr


def sample_inverse_gamma(a, b, rng: np.random.Generator, size=None):
    a = _positive("shape a", a)
    b = _positive("scale b", b)
    return b / rng.gamma(a, 1.0, size=size)


def sample_gamma(a, rate, rng: np.random.Generator, size=None):
    a = _positive("shape a", a)
    rate = _positive("rate", rate)
    return rng.gamma(a, 1.0, size=size) / rate


def _inverse_gaussian(mu, lam, rng, size=None):
    # Michael-Schucany-Haas; x = mu / (1 + c + sqrt(c (c + 2))) is the
    # cancellation-free form of the smaller root
    shape = np.broadcast(mu, lam).shape if size is None else size
    y = rng.standard_normal(shape) ** 2
    c = mu * y / (2.0 * lam)
    x = mu / (1.0 + c + np.sqrt(c * (c + 2.0)))
    u = rng.random(shape)
    return np.where(u * (mu + x) <= mu, x, mu * mu / x)


def sample_inverse_gaussian(mu, lam, rng: np.random.Generator, size=None):
    mu = _positive("mu", mu)
    lam = _positive("lam", lam)
    return _inverse_gaussian(mu, lam, rng, size)


@dataclass(frozen=True)
class GigParams:
    """Parameters of the GIG law with density ``z**(lambda0-1) exp(-(rho z + chi/z)/2)``.

    Fields may be scalars or broadcastable arrays.
    """

    lambda0: float
    rho: float
    chi: float

    def __post_init__(self):
        lam, rho, chi = np.broadcast_arrays(
            np.asarray(self.lambda0, float), np.asarray(self.rho, float), np.asarray(self.chi, float)
        )
        if not (np.all(np.isfinite(lam)) and np.all(np.isfinite(rho)) and np.all(np.isfinite(chi))):
            raise InvalidParam("GIG parameters must be finite")
        if np.any(rho < 0) or np.any(chi < 0):
            raise InvalidParam("GIG rho and chi must be >= 0")
        if np.any((rho == 0) & (chi == 0)):
            raise InvalidParam("GIG rho and chi cannot both be 0")
        if np.any((rho == 0) & (lam >= 0)):
            raise InvalidParam("GIG with rho = 0 needs lambda0 < 0")
        if np.any((chi == 0) & (lam <= 0)):
            raise InvalidParam("GIG with chi = 0 needs lambda0 > 0")

    @classmethod
    def from_negated_exponent(cls, order: float, rho: float, chi: float) -> "GigParams":
        """Parameters for a density written as ``z**(-order) exp(-(rho z + chi/z)/2)``."""
        return cls(1.0 - np.asarray(order, float), rho, chi)

    def mean(self) -> float:
        """Closed-form mean ``sqrt(chi/rho) K_{l+1}(w) / K_l(w)`` for scalar rho, chi > 0."""
        from scipy.special import kve

        w = np.sqrt(self.rho * self.chi)
        return float(np.sqrt(self.chi / self.rho) * kve(self.lambda0 + 1, w) / kve(self.lambda0, w))


@njit(cache=True)
def _psi(x, alpha, lam):
    return -alpha * (math.cosh(x) - 1.0) - lam * (math.expm1(x) - x)


@njit(cache=True)
def _dpsi(x, alpha, lam):
    return -alpha * math.sinh(x) - lam * math.expm1(x)


@njit(cache=True)
def _devroye_one(lam, alpha, rng):
    # Devroye (2014) rejection for log(y/m), two-parameter GIG with lam >= 0
    x = -_psi(1.0, alpha, lam)
    if 0.5 <= x <= 2.0:
        t = 1.0
    elif x > 2.0:
        t = math.sqrt(2.0 / (alpha + lam))
    else:
        t = math.log(4.0 / (alpha + 2.0 * lam))
    x = -_psi(-1.0, alpha, lam)
    if 0.5 <= x <= 2.0:
        s = 1.0
    elif x > 2.0:
        s = math.sqrt(4.0 / (alpha * math.cosh(1.0) + lam))
    else:
        s = math.inf
        if lam > 0:
            s = 1.0 / lam
        if alpha > 0:
            s = min(s, math.log(alpha + 1.0 + math.sqrt(1.0 + 2.0 * alpha)) - math.log(alpha))
    eta, zeta = -_psi(t, alpha, lam), -_dpsi(t, alpha, lam)
    theta, xi = -_psi(-s, alpha, lam), _dpsi(-s, alpha, lam)
    p, r = 1.0 / xi, 1.0 / zeta
    td = t - r * eta
    sd = s - p * theta
    q = td + sd
    total = p + q + r
    while True:
        U, V, W = rng.random(), rng.random(), rng.random()
        if U < q / total:
            cand = -sd + q * V
        elif U < (q + r) / total:
            cand = td - r * math.log(V)
        else:
            cand = -sd + p * math.log(V)
        if cand > td:
            env = math.exp(-eta - zeta * (cand - t))
        elif cand < -sd:
            env = math.exp(-theta + xi * (cand + s))
        else:
            env = 1.0
        if cand > 700.0:
            # target density underflows to zero out here
            continue
        if W * env <= math.exp(_psi(cand, alpha, lam)):
            return cand


@njit(cache=True)
def _gig_positive(lam, rho, chi, rng):
    # elementwise draw for rho > 0, chi > 0 via the two-parameter form
    out = np.empty(lam.size)
    for i in range(lam.size):
        l_abs = abs(lam[i])
        omega = math.sqrt(rho[i] * chi[i])
        if l_abs == 0.0:
            omega = max(omega, 1e-300)
        root = math.sqrt(omega * omega + l_abs * l_abs)
        # alpha = root - l_abs without cancellation when omega << l_abs
        alpha = omega * omega / (root + l_abs)
        y = math.exp(_devroye_one(l_abs, alpha, rng)) * (l_abs + root)
        if lam[i] >= 0:
            out[i] = y / rho[i]
        else:
            out[i] = chi[i] / y
    return out


def _gig(lambda0, rho, chi, rng: np.random.Generator, size=None) -> np.ndarray:
    """Unchecked vectorized GIG draw; see :func:`sample_gig`."""
    lam, rho, chi = np.broadcast_arrays(
        np.asarray(lambda0, float), np.asarray(rho, float), np.asarray(chi, float)
    )
    if size is not None:
        lam, rho, chi = (np.broadcast_to(a, size) for a in (lam, rho, chi))
    shape = lam.shape
    lam, rho, chi = lam.ravel(), rho.ravel(), chi.ravel()
    out = np.empty(lam.shape)

    gamma_case = chi == 0
    invg_case = rho == 0
    if gamma_case.any() or invg_case.any():
        gen = ~(gamma_case | invg_case)
        out[gamma_case] = rng.gamma(lam[gamma_case], 1.0) * 2.0 / rho[gamma_case]
        out[invg_case] = chi[invg_case] / (2.0 * rng.gamma(-lam[invg_case], 1.0))
        if gen.any():
            out[gen] = _gig_positive(lam[gen], rho[gen], chi[gen], rng)
    else:
        out[:] = _gig_positive(lam, rho, chi, rng)
    return out.reshape(shape)


def sample_gig(params: GigParams, rng: np.random.Generator, size=None) -> np.ndarray | float:
    """Draw from the GIG law described by ``params``.

    ``chi = 0`` reduces to ``Gamma(lambda0, rate=rho/2)`` and ``rho = 0`` to
    ``IG(-lambda0, chi/2)``; otherwise Devroye's rejection sampler is used on
    the two-parameter form and rescaled.
    """
    out = _gig(params.lambda0, params.rho, params.chi, rng, size)
    return out if out.ndim else float(out)


def _cholesky_with_jitter(Q: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(Q)
    except np.linalg.LinAlgError:
        pass
    scale = max(float(np.mean(np.diag(Q))), 1.0)
    for eps in JITTER_LADDER:
        try:
            return np.linalg.cholesky(Q + np.eye(len(Q)) * (eps * scale))
        except np.linalg.LinAlgError:
            continue
    raise FactorizationFailure("precision matrix not positive definite after maximum jitter")


def sample_mvn_precision(Xt_y, XtX, S_inv_diag, sigma2: float, rng: np.random.Generator) -> np.ndarray:
    """Draw ``beta ~ N(V Xt_y, sigma2 V)`` with ``V = (XtX + diag(S_inv_diag))^-1``.

    Factorizes the ``n x n`` precision matrix ``L L^T`` and returns
    ``L^-T (L^-1 Xt_y + sqrt(sigma2) z)``.
    """
    S_inv_diag = np.asarray(S_inv_diag, dtype=np.float64)
    if np.any(~(S_inv_diag > 0)):
        raise InvalidParam("S_inv_diag must be strictly positive")
    if not sigma2 > 0:
        raise InvalidParam("sigma2 must be > 0")
    Q = np.array(XtX, dtype=np.float64, copy=True)
    Q[np.diag_indices_from(Q)] += S_inv_diag
    L = _cholesky_with_jitter(Q)
    w = solve_triangular(L, np.asarray(Xt_y, dtype=np.float64), lower=True, check_finite=False)
    z = rng.standard_normal(len(w))
    return solve_triangular(L.T, w + np.sqrt(sigma2) * z, lower=False, check_finite=False)
