"""Off-diagonal (Peskun) ordering of reversible kernels."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, MismatchedStationaryError, OrderingViolationError
from .kernel import ReversibleKernel
from .spectral import eigendecompose
from .variance import asymptotic_variance_exact

DOMINATION_TOL = 1e-12
PI_MATCH_TOL = 1e-10
ORDER_SLACK = 1e-9


@dataclass
class PeskunReport:
    dominates: bool
    worst_violation: float
    Lambda_pair: tuple[float, float] | None = None
    variance_pairs: list[tuple[str, float, float]] = field(default_factory=list)


def dominates_off_diagonal(K1: ReversibleKernel, K2: ReversibleKernel) -> PeskunReport:
    """Does ``K1`` put at least as much mass as ``K2`` on every off-diagonal move?"""
    if K1.n != K2.n:
        raise DimensionMismatchError(f"kernels have {K1.n} and {K2.n} states")
    gap = float(np.max(np.abs(K1.pi - K2.pi)))
    if gap > PI_MATCH_TOL:
        raise MismatchedStationaryError(f"stationary laws differ by {gap:.3e}")
    diff = K2.P - K1.P
    np.fill_diagonal(diff, 0.0)
    worst = max(float(diff.max()), 0.0)
    return PeskunReport(dominates=worst <= DOMINATION_TOL, worst_violation=worst)


def random_functionals(n_states: int, count: int = 50, seed: int = 0) -> list[np.ndarray]:
    """Standard-normal functionals, centred to zero plain mean."""
    rng = np.random.default_rng(seed)
    hs = rng.standard_normal((count, n_states))
    return list(hs - hs.mean(axis=1, keepdims=True))


def ordering_report(K1: ReversibleKernel, K2: ReversibleKernel, hs=None,
                    n_functionals: int = 50, seed: int = 0) -> PeskunReport:
    """Domination check plus spectral and variance comparisons.

    When ``K1`` dominates ``K2`` the top mean-zero eigenvalue and every
    asymptotic variance must not increase from ``K2`` to ``K1``; a breach
    raises :class:`OrderingViolationError`.
    """
    report = dominates_off_diagonal(K1, K2)
    if hs is None:
        hs = random_functionals(K1.n, n_functionals, seed)
    D1, D2 = eigendecompose(K1), eigendecompose(K2)
    report.Lambda_pair = (float(D1.eigenvalues.max()), float(D2.eigenvalues.max()))
    for i, h in enumerate(hs):
        report.variance_pairs.append(
            (f"h{i}", asymptotic_variance_exact(D1, h), asymptotic_variance_exact(D2, h)))
    if report.dominates:
        l1, l2 = report.Lambda_pair
        if l1 > l2 + ORDER_SLACK:
            raise OrderingViolationError(f"Lambda increased under domination: {l1} > {l2}")
        for hid, v1, v2 in report.variance_pairs:
            if v1 > v2 + ORDER_SLACK:
                raise OrderingViolationError(f"{hid}: variance {v1} > {v2} under domination")
    return report
