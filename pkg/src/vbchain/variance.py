"""Exact asymptotic variances of finite reversible chains.

For a stationary chain and a functional ``h`` with spectral weights
``w_i`` on mean-zero eigenvalues ``lambda_i``:

* autocovariance at lag k:    ``gamma_k = sum_i w_i lambda_i^k``
* finite horizon:             ``Var(S_n)/n = gamma_0 + 2 sum_{k<n} (1 - k/n) gamma_k``
* asymptotic variance:        ``v = sum_i w_i (1 + lambda_i) / (1 - lambda_i)``
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import LambdaAtOneError
from .functional import Functional, as_functional  # noqa: F401  (re-export)
from .spectral import spectral_weights

INFINITY_WEIGHT_TOL = 1e-12
INFINITY_LAMBDA_TOL = 1e-9


def asymptotic_variance_exact(D, h) -> float:
    """Spectral asymptotic variance; ``math.inf`` when weight sits at eigenvalue 1."""
    w = spectral_weights(D, h)
    lam = D.eigenvalues
    if np.any((w > INFINITY_WEIGHT_TOL) & (lam > 1.0 - INFINITY_LAMBDA_TOL)):
        return math.inf
    live = lam < 1.0 - INFINITY_LAMBDA_TOL
    return float(np.sum(w[live] * (1.0 + lam[live]) / (1.0 - lam[live])))


def autocovariance(D, h, k: int) -> float:
    """Stationary lag-``k`` autocovariance of ``h``."""
    if k < 0:
        raise ValueError(f"lag must be nonnegative, got {k!r}")
    w = spectral_weights(D, h)
    if k == 0:
        return float(w.sum())
    return float(np.sum(w * D.eigenvalues ** k))


def autocovariances(D, h, max_lag: int) -> np.ndarray:
    w = spectral_weights(D, h)
    k = np.arange(max_lag + 1)
    return (w[None, :] * D.eigenvalues[None, :] ** k[:, None]).sum(axis=1)


CLOSED_FORM_GAP = 1e-2


def _cesaro_direct(lam: np.ndarray, n: int, chunk: int = 1 << 16) -> np.ndarray:
    out = np.ones_like(lam)
    for start in range(1, n, chunk):
        k = np.arange(start, min(start + chunk, n), dtype=float)
        out += 2.0 * ((1.0 - k / n)[None, :] * lam[:, None] ** k[None, :]).sum(axis=1)
    return out


def _cesaro_factor(lam: np.ndarray, n: int) -> np.ndarray:
    """``1 + 2 sum_{k=1}^{n-1} (1 - k/n) lam^k`` for each eigenvalue.

    Closed form ``lam/(1-lam) - lam (1 - lam^n) / (n (1-lam)^2)`` away from
    ``lam = 1``; the direct sum near it, where the closed form cancels.
    """
    lam = np.asarray(lam, dtype=float)
    out = np.empty_like(lam)
    near = 1.0 - lam < CLOSED_FORM_GAP
    if np.any(near):
        out[near] = _cesaro_direct(lam[near], n)
    far = ~near
    lf = lam[far]
    g = 1.0 - lf
    out[far] = 1.0 + 2.0 * (lf / g - lf * (1.0 - lf ** n) / (n * g * g))
    return out


def finite_n_variance(D, h, n: int) -> float:
    """``Var(h(X_1) + ... + h(X_n)) / n`` for the stationary chain."""
    if n < 1:
        raise ValueError(f"horizon must be >= 1, got {n!r}")
    w = spectral_weights(D, h)
    return float(np.sum(w * _cesaro_factor(D.eigenvalues, n)))


def variance_bound_K(Lambda: float) -> float:
    """Variance-bounding constant ``2 / (1 - Lambda)``."""
    if Lambda >= 1.0:
        raise LambdaAtOneError(f"no finite bound when Lambda = {Lambda!r}")
    return 2.0 / (1.0 - Lambda)


@dataclass(frozen=True)
class VarianceReport:
    var_pi: float
    v_exact: float
    v_finite_n: list
    ratio: float
    gamma: np.ndarray
    K_bound: float

    @property
    def infinite(self) -> bool:
        return math.isinf(self.v_exact)


def variance_report(D, h, horizons=(1, 100, 10_000), n_lags: int = 20) -> VarianceReport:
    f = as_functional(h, D.pi)
    v = asymptotic_variance_exact(D, f)
    Lam = float(D.eigenvalues.max())
    K = 2.0 / (1.0 - Lam) if Lam < 1.0 else math.inf
    ratio = v / f.var_pi if f.var_pi > 0 else (0.0 if v == 0 else math.inf)
    return VarianceReport(
        var_pi=f.var_pi,
        v_exact=v,
        v_finite_n=[(int(n), finite_n_variance(D, f, int(n))) for n in horizons],
        ratio=ratio,
        gamma=autocovariances(D, f, n_lags),
        K_bound=K,
    )
