"""Finite-state reversible Markov kernels.

A :class:`ReversibleKernel` bundles a row-stochastic transition table with
its stationary distribution and is validated for detailed balance at
construction time.  Kernels are immutable: the arrays they hold are
read-only views, so a kernel can be shared freely between workers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    BadMixtureWeightError,
    DegenerateMarginalError,
    NonPositivePiError,
    NonStochasticError,
    NonUniqueStationaryError,
    NotReversibleError,
    WindowTooSmallError,
)

ROW_SUM_TOL = 1e-12
DB_TOL = 1e-10
UNIT_EIGEN_TOL = 1e-8
POWER_ITERATION_THRESHOLD = 2000


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def detailed_balance_residual(P: np.ndarray, pi: np.ndarray) -> float:
    """max_{i,j} |pi_i P_ij - pi_j P_ji|."""
    flow = pi[:, None] * P
    return float(np.max(np.abs(flow - flow.T)))


@dataclass(frozen=True)
class ReversibleKernel:
    """Transition table ``P`` reversible with respect to ``pi``.

    Use :func:`from_matrix` (or one of the builders) rather than the
    constructor; the constructor trusts its inputs.
    """

    P: np.ndarray
    pi: np.ndarray
    db_residual: float
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "P", _frozen(self.P))
        object.__setattr__(self, "pi", _frozen(self.pi))

    @property
    def n(self) -> int:
        return self.P.shape[0]

    def __repr__(self):
        tag = f" {self.label!r}" if self.label else ""
        return f"<ReversibleKernel{tag} n={self.n} db_residual={self.db_residual:.2e}>"


@dataclass(frozen=True)
class JointDistribution:
    """Joint law p(x, y) on a finite product space; rows index x."""

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float, copy=True)
        if p.ndim != 2:
            raise DegenerateMarginalError("joint table must be two-dimensional")
        if np.any(p < 0):
            raise DegenerateMarginalError("joint probabilities must be nonnegative")
        if abs(p.sum() - 1.0) > ROW_SUM_TOL:
            raise DegenerateMarginalError(f"joint mass {p.sum()!r} is not 1")
        if np.any(p.sum(axis=1) <= 0):
            raise DegenerateMarginalError("some x-marginal is zero")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def nx(self) -> int:
        return self.p.shape[0]

    @property
    def ny(self) -> int:
        return self.p.shape[1]


def _check_stochastic(P: np.ndarray) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 2:
        raise NonStochasticError(f"need an n x n table with n >= 2, got shape {P.shape}")
    if np.any(P < 0):
        raise NonStochasticError("negative transition probability")
    worst = np.max(np.abs(P.sum(axis=1) - 1.0))
    if worst > ROW_SUM_TOL:
        raise NonStochasticError(f"row sums deviate from 1 by {worst:.3e}")
    return P


def unit_eigenvalue_multiplicity(P: np.ndarray, tol: float = UNIT_EIGEN_TOL) -> int:
    """Number of eigenvalues of ``P`` within ``tol`` of 1."""
    ev = np.linalg.eigvals(np.asarray(P, dtype=float))
    return int(np.sum(np.abs(ev - 1.0) <= tol))


def is_irreducible(P: np.ndarray) -> bool:
    """Graph cross-check: single strongly connected class on the support of P."""
    ncomp, _ = connected_components(np.asarray(P) > 0, directed=True, connection="strong")
    return ncomp == 1


def _power_iteration(P: np.ndarray, tol: float = 1e-14, maxiter: int = 100_000) -> np.ndarray:
    # Lazy version avoids oscillation on periodic chains; same fixed point.
    L = 0.5 * (P + np.eye(P.shape[0]))
    pi = np.full(P.shape[0], 1.0 / P.shape[0])
    for _ in range(maxiter):
        nxt = pi @ L
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) < tol:
            return nxt
        pi = nxt
    return pi


def stationary_solve(P) -> np.ndarray:
    """Unique stationary law of a row-stochastic table.

    Solves ``(P^T - I) pi = 0`` with the normalisation row appended, then
    applies one step of iterative refinement.  Raises
    :class:`NonUniqueStationaryError` when the eigenvalue 1 is repeated.
    """
    P = _check_stochastic(P)
    n = P.shape[0]
    if unit_eigenvalue_multiplicity(P) > 1:
        raise NonUniqueStationaryError("eigenvalue 1 is repeated: the chain is reducible")
    if n > POWER_ITERATION_THRESHOLD:
        pi = _power_iteration(P)
    else:
        A = np.vstack([P.T - np.eye(n), np.ones((1, n))])
        b = np.zeros(n + 1)
        b[-1] = 1.0
        pi, *_ = np.linalg.lstsq(A, b, rcond=None)
        corr, *_ = np.linalg.lstsq(A, b - A @ pi, rcond=None)
        pi = pi + corr
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def from_matrix(P, pi=None, tol: float = DB_TOL, label: str = "") -> ReversibleKernel:
    """Validate ``P`` (and ``pi``) and wrap them in a :class:`ReversibleKernel`.

    Parameters
    ----------
    P : (n, n) array_like
        Row-stochastic transition table.
    pi : (n,) array_like, optional
        Stationary law.  Solved for when omitted.
    tol : float
        Largest detailed-balance violation accepted.

    Raises
    ------
    NonStochasticError, NonPositivePiError, NotReversibleError
    """
    P = _check_stochastic(P)
    if pi is None:
        pi = stationary_solve(P)
    else:
        pi = np.asarray(pi, dtype=float)
        if pi.shape != (P.shape[0],):
            raise NonPositivePiError(f"pi has shape {pi.shape}, expected ({P.shape[0]},)")
        if np.any(pi < 0):
            raise NonPositivePiError("pi has negative entries")
        if abs(pi.sum() - 1.0) > ROW_SUM_TOL:
            raise NonPositivePiError(f"pi sums to {pi.sum()!r}")
    res = detailed_balance_residual(P, pi)
    if res > tol:
        raise NotReversibleError(f"detailed-balance residual {res:.3e} exceeds {tol:.1e}")
    return ReversibleKernel(P, pi, res, label)


def lazy_mixture(K: ReversibleKernel, a: float) -> ReversibleKernel:
    """The kernel ``a I + (1 - a) P``; same stationary law as ``K``."""
    if not 0.0 <= a < 1.0:
        raise BadMixtureWeightError(f"mixture weight must lie in [0, 1), got {a!r}")
    if a == 0.0:
        return K
    P = a * np.eye(K.n) + (1.0 - a) * K.P
    return ReversibleKernel(P, K.pi, detailed_balance_residual(P, K.pi),
                            f"lazy({K.label},{a:g})" if K.label else "")


def binomial_base(K: ReversibleKernel) -> ReversibleKernel:
    """One-step base ``(I + P) / 2`` of the binomial modification.

    Running a Binomial(2n, 1/2) number of ``P``-steps has the same n-step
    law as ``n`` steps of this kernel.
    """
    return lazy_mixture(K, 0.5)


def kernel_power(K: ReversibleKernel, k: int) -> np.ndarray:
    """Exact ``k``-step transition table by repeated multiplication."""
    if k < 1:
        raise ValueError(f"power must be a positive integer, got {k!r}")
    out = K.P.copy()
    for _ in range(k - 1):
        out = out @ K.P
    return out


def example9_states(N: int) -> np.ndarray:
    return np.arange(-N, N + 1)


def example9_weights(m) -> np.ndarray:
    """Unnormalised stationary weights of the drift-to-origin walk.

    ``2^{-|m|}`` away from the origin and ``2/3`` at the origin; this is the
    law that the walk with rates 2/3 toward / 1/3 away from 0 and an even
    split at 0 actually leaves invariant.
    """
    m = np.asarray(m)
    w = np.power(2.0, -np.abs(m).astype(float))
    return np.where(m == 0, 2.0 / 3.0, w)


def _example9_rates(x: int, chain: int) -> tuple[float, float]:
    """(down, up) jump probabilities of the infinite chains at ``x``."""
    if chain == 1:
        if x > 0:
            return 2.0 / 3.0, 1.0 / 3.0
        if x < 0:
            return 1.0 / 3.0, 2.0 / 3.0
        return 0.5, 0.5
    # Metropolis with +-1 proposals, each w.p. 1/2
    w = example9_weights([x - 1, x, x + 1])
    return 0.5 * min(1.0, w[0] / w[1]), 0.5 * min(1.0, w[2] / w[1])


def build_example9(N: int, tol: float = DB_TOL) -> tuple[ReversibleKernel, ReversibleKernel]:
    """Truncations of the periodic walk ``P1`` and its Metropolis partner ``P2``.

    States are ``-N..N``.  Jump mass that would leave the window is added to
    the holding probability of the boundary state, which keeps both kernels
    reversible.
    """
    if N < 2:
        raise WindowTooSmallError(f"window radius must be >= 2, got {N!r}")
    states = example9_states(N)
    n = states.size
    w = example9_weights(states)
    pi = w / w.sum()
    tables = []
    for chain in (1, 2):
        P = np.zeros((n, n))
        for i, x in enumerate(states):
            down, up = _example9_rates(int(x), chain)
            P[i, max(i - 1, 0)] += down
            P[i, min(i + 1, n - 1)] += up
            P[i, i] += max(0.0, 1.0 - (down + up))
        tables.append(P)
    return (from_matrix(tables[0], pi, tol, label=f"example9-P1-N{N}"),
            from_matrix(tables[1], pi, tol, label=f"example9-P2-N{N}"))


def build_data_augmentation(J: JointDistribution) -> ReversibleKernel:
    """x-marginal chain of the two-block Gibbs sampler for ``J``.

    ``P(x, x') = sum_y p(y | x) p(x' | y)``; reversible and positive with
    respect to the x-marginal.
    """
    p = J.p
    px = p.sum(axis=1)
    if np.any(px <= 0):
        raise DegenerateMarginalError("some x-marginal is zero")
    py = p.sum(axis=0)
    keep = py > 0
    y_given_x = p[:, keep] / px[:, None]
    x_given_y = (p[:, keep] / py[keep]).T
    P = y_given_x @ x_given_y
    P /= P.sum(axis=1, keepdims=True)
    return from_matrix(P, px, tol=1e-12, label="data-augmentation")


def random_reversible_kernel(n: int, rng: np.random.Generator, sparsity: float = 0.0,
                             laziness: float = 0.0) -> ReversibleKernel:
    """Random walk on a random symmetric weighted graph.

    Weights are ``Uniform(0, 1)`` with a ``sparsity`` fraction of
    off-diagonal edges removed (a spanning path is always kept so the chain
    stays irreducible).  ``P_ij = W_ij / sum_j W_ij`` is reversible with
    respect to ``pi ∝ sum_j W_ij``.
    """
    W = rng.random((n, n))
    if sparsity > 0:
        W *= rng.random((n, n)) >= sparsity
    W = np.triu(W, 1)
    path = np.arange(n - 1)
    W[path, path + 1] = np.maximum(W[path, path + 1], 0.05)
    W = W + W.T
    W[np.diag_indices(n)] = rng.random(n)
    deg = W.sum(axis=1)
    P = W / deg[:, None]
    pi = deg / deg.sum()
    K = ReversibleKernel(P, pi, detailed_balance_residual(P, pi), "random")
    return lazy_mixture(K, laziness) if laziness else K
