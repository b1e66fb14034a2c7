"""(Sub-)Metropolis–Hastings kernels on a finite space with counting measure.

Proposal rows may sum to less than one; the missing proposal mass becomes
extra holding probability.  With full rows this is the ordinary
Metropolis–Hastings kernel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadScaleError, NonPositiveTargetError, RowSumExceedsOneError
from .kernel import ReversibleKernel, detailed_balance_residual

ROW_TOL = 1e-12
DIAG_CLAMP = 1e-12


@dataclass(frozen=True)
class ProposalTable:
    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float, copy=True)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise RowSumExceedsOneError(f"proposal table must be square, got {q.shape}")
        if np.any(q < 0):
            raise RowSumExceedsOneError("proposal table has negative entries")
        worst = float(q.sum(axis=1).max())
        if worst > 1.0 + ROW_TOL:
            raise RowSumExceedsOneError(f"proposal row sum {worst!r} exceeds 1")
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return self.q.shape[0]


def _as_proposal(q) -> ProposalTable:
    return q if isinstance(q, ProposalTable) else ProposalTable(q)


def build_sub_mh(t, q) -> ReversibleKernel:
    """Sub-Metropolis–Hastings kernel for unnormalised target weights ``t``.

    Off-diagonal moves are ``min(q(x, y), t(y)/t(x) q(y, x))``; the holding
    probability absorbs the rest.
    """
    q = _as_proposal(q)
    t = np.asarray(t, dtype=float)
    if t.shape != (q.n,) or np.any(t <= 0) or not np.all(np.isfinite(t)):
        raise NonPositiveTargetError("target weights must be finite, positive, one per state")
    Q = q.q.copy()
    np.fill_diagonal(Q, 0.0)
    M = np.minimum(Q, (t[None, :] / t[:, None]) * Q.T)
    hold = 1.0 - M.sum(axis=1)
    if np.any(hold < -DIAG_CLAMP):
        raise RowSumExceedsOneError(f"negative holding probability {hold.min()!r}")
    M[np.diag_indices(q.n)] = np.clip(hold, 0.0, None)
    pi = t / t.sum()
    return ReversibleKernel(M, pi, detailed_balance_residual(M, pi), "sub-mh")


def scale_proposal(q, c: float) -> ProposalTable:
    """Entrywise ``c q`` for ``0 < c <= 1``."""
    if not 0.0 < c <= 1.0:
        raise BadScaleError(f"scale must lie in (0, 1], got {c!r}")
    return ProposalTable(c * _as_proposal(q).q)


def random_sub_mh_pair(n: int, rng: np.random.Generator, noise: float = 0.5):
    """Random target, proposal ``q2`` and a dominating proposal ``q1``.

    ``q1`` adds nonnegative off-diagonal noise to ``q2`` and then rescales
    each row (only when needed) to keep its total at most one.  Returns
    ``(t, q1, q2)`` with ``q1 >= q2`` off the diagonal.
    """
    t = rng.random(n) + 0.05
    # symmetric support with a spanning path, so M_{q2} is irreducible
    mask = rng.random((n, n)) < 0.6
    mask |= mask.T
    idx = np.arange(n - 1)
    mask[idx, idx + 1] = mask[idx + 1, idx] = True
    q2 = (rng.random((n, n)) + 0.05) * mask
    np.fill_diagonal(q2, 0.0)
    q2 /= q2.sum(axis=1, keepdims=True) + rng.random((n, 1)) * 0.5 + 1e-3
    extra = noise * rng.random((n, n)) * (rng.random((n, n)) < 0.5)
    np.fill_diagonal(extra, 0.0)
    # shrink only the added noise so q1 stays >= q2 entrywise
    room = 1.0 - q2.sum(axis=1)
    added = extra.sum(axis=1)
    shrink = np.where(added > room, room / np.where(added > 0, added, 1.0), 1.0)
    q1 = q2 + extra * shrink[:, None]
    return t, ProposalTable(q1), ProposalTable(q2)
