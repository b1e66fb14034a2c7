"""Spectra of reversible kernels on the mean-zero subspace.

A reversible kernel is self-adjoint in the pi-weighted inner product, so the
similarity ``S = D^{1/2} P D^{-1/2}`` (``D = diag(pi)``) is symmetric.  The
eigenvector ``sqrt(pi)`` of ``S`` (eigenvalue 1, the constants) is removed
by a Householder reflection and the remaining block is diagonalised with
cyclic Jacobi rotations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergenceError, ZeroPiEntryError
from .functional import as_functional
from .kernel import ReversibleKernel

OFFDIAG_TOL = 1e-12
MAX_SWEEPS = 100
RESIDUAL_TOL = 1e-9
SNAP_TOL = 1e-12


def symmetrize(K: ReversibleKernel) -> np.ndarray:
    """``S_ij = sqrt(pi_i / pi_j) P_ij``, symmetrised to remove round-off."""
    pi = K.pi
    if np.any(pi <= 0):
        raise ZeroPiEntryError("pi must be strictly positive to symmetrize")
    r = np.sqrt(pi)
    S = r[:, None] * K.P / r[None, :]
    return 0.5 * (S + S.T)


def _offdiag_norm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A - np.diag(np.diag(A))))


def jacobi_eigh(A, tol: float = OFFDIAG_TOL, max_sweeps: int = MAX_SWEEPS):
    """Cyclic Jacobi eigensolver for a real symmetric matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps)``; eigenvectors are the
    columns of the second array.  Order is whatever the rotations produce.
    """
    A = np.array(A, dtype=float, copy=True)
    n = A.shape[0]
    V = np.eye(n)
    sweeps = 0
    while _offdiag_norm(A) > tol and sweeps < max_sweeps:
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = A[q, q] - A[p, p]
                if abs(apq) < abs(diff) * 1e-36:
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    return np.diag(A).copy(), V, sweeps


def _householder_to_e1(u: np.ndarray) -> np.ndarray:
    """Orthogonal symmetric H with ``H u = e_1`` for a unit vector ``u``."""
    n = u.size
    e1 = np.zeros(n)
    e1[0] = 1.0
    w = u - e1
    nw = np.linalg.norm(w)
    if nw < 1e-300:
        return np.eye(n)
    w /= nw
    return np.eye(n) - 2.0 * np.outer(w, w)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Mean-zero spectrum of a reversible kernel.

    ``vectors[:, i]`` is the right eigenvector of ``P`` for
    ``eigenvalues[i]``, normalised so that ``sum(pi * v_i * v_j) = delta_ij``
    and ``sum(pi * v_i) = 0``.  ``sym_vectors`` are the corresponding
    Euclidean-orthonormal eigenvectors of the symmetrised table.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    sym_vectors: np.ndarray
    pi: np.ndarray
    residual: float
    sweeps: int
    raw_eigenvalues: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.pi.size

    @property
    def m(self) -> int:
        return self.eigenvalues.size


def eigendecompose(K: ReversibleKernel, tol: float = OFFDIAG_TOL,
                   max_sweeps: int = MAX_SWEEPS) -> SpectralDecomposition:
    """Eigenpairs of ``K`` on the mean-zero subspace, sorted descending."""
    S = symmetrize(K)
    root = np.sqrt(K.pi)
    root = root / np.linalg.norm(root)
    H = _householder_to_e1(root)
    B = (H @ S @ H)[1:, 1:]
    B = 0.5 * (B + B.T)
    lam, Z, sweeps = jacobi_eigh(B, tol, max_sweeps)
    Y = H[:, 1:] @ Z
    order = np.argsort(-lam, kind="stable")
    lam, Y = lam[order], Y[:, order]
    residual = float(np.max(np.abs(S @ Y - Y * lam[None, :]))) if lam.size else 0.0
    if residual > RESIDUAL_TOL:
        raise NoConvergenceError(
            f"Jacobi residual {residual:.3e} after {sweeps} sweeps exceeds {RESIDUAL_TOL:.0e}")
    if lam.size and (lam.max() > 1 + 1e-9 or lam.min() < -1 - 1e-9):
        raise NoConvergenceError(f"eigenvalue outside [-1, 1]: {lam.min()!r}, {lam.max()!r}")
    V = Y / np.sqrt(K.pi)[:, None]
    clean = np.clip(lam, -1.0, 1.0)
    # round-off away from +-1 (e.g. the identity kernel) is snapped back
    edge = np.abs(np.abs(clean) - 1.0) <= SNAP_TOL
    clean[edge] = np.sign(clean[edge])
    return SpectralDecomposition(
        eigenvalues=clean, vectors=V, sym_vectors=Y, pi=K.pi.copy(),
        residual=residual, sweeps=sweeps, raw_eigenvalues=lam)


@dataclass(frozen=True)
class Thresholds:
    vb_threshold: float = 1e-9
    pos_tol: float = 1e-10
    period_tol: float = 1e-3
    reducible_tol: float = 1e-8


@dataclass(frozen=True)
class Classification:
    """Spectral verdicts.

    On a finite irreducible chain ``Lambda < 1`` always holds, so the flags
    are threshold conventions; ``Lambda`` and ``K_bound`` are the primary
    output.
    """

    Lambda: float
    lambda_min: float
    K_bound: float
    variance_bounding: bool
    geometrically_ergodic: bool
    positive: bool
    near_periodic: bool
    reducible: bool
    thresholds: Thresholds

    def as_row(self) -> dict:
        return {
            "Lambda": self.Lambda, "lambda_min": self.lambda_min, "K_bound": self.K_bound,
            "variance_bounding": self.variance_bounding,
            "geometrically_ergodic": self.geometrically_ergodic,
            "positive": self.positive, "near_periodic": self.near_periodic,
            "reducible": self.reducible,
        }


def classify(D: SpectralDecomposition, thresholds: Thresholds | None = None) -> Classification:
    th = thresholds or Thresholds()
    lam = D.eigenvalues
    Lam = float(lam.max())
    lmin = float(lam.min())
    vb = Lam <= 1.0 - th.vb_threshold
    K = 2.0 / (1.0 - Lam) if vb else math.inf
    return Classification(
        Lambda=Lam,
        lambda_min=lmin,
        K_bound=K,
        variance_bounding=vb,
        geometrically_ergodic=max(abs(Lam), abs(lmin)) <= 1.0 - th.vb_threshold,
        positive=lmin >= -th.pos_tol,
        near_periodic=lmin < -1.0 + th.period_tol,
        reducible=bool(np.any(D.raw_eigenvalues > 1.0 - th.reducible_tol)),
        thresholds=th,
    )


def spectral_weights(D: SpectralDecomposition, h) -> np.ndarray:
    """Point masses ``w_i = <h - pi(h), v_i>_pi^2`` of the spectral measure of ``h``."""
    f = as_functional(h, D.pi)
    return (D.vectors.T @ (D.pi * f.centered)) ** 2


def reconstruct(D: SpectralDecomposition) -> np.ndarray:
    """Rebuild the symmetrised table from the eigenpairs plus the constant part."""
    root = np.sqrt(D.pi)
    Y = D.sym_vectors
    return np.outer(root, root) + (Y * D.raw_eigenvalues[None, :]) @ Y.T
