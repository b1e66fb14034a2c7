"""Lazy mixtures, the holding bound and sub-Metropolis-Hastings kernels."""
import numpy as np

from vbchain.kernel import JointDistribution, build_data_augmentation, lazy_mixture, random_reversible_kernel
from vbchain.mh_finite import build_sub_mh, random_sub_mh_pair, scale_proposal
from vbchain.peskun import dominates_off_diagonal
from vbchain.spectral import eigendecompose
from vbchain.variance import asymptotic_variance_exact

rng = np.random.default_rng(7)
K = random_reversible_kernel(8, rng)
lam = eigendecompose(K).eigenvalues
h = rng.standard_normal(8)

# aI + (1-a)P moves every eigenvalue to a + (1-a) lambda, so variances grow with a.
print("  a   min eig   max eig   v(h)")
for a in (0.0, 0.25, 0.5, 0.75, 0.9):
    D = eigendecompose(lazy_mixture(K, a))
    assert np.allclose(D.eigenvalues, a + (1 - a) * lam)
    print(f"{a:4.2f}  {D.eigenvalues.min():+.4f}  {D.eigenvalues.max():+.4f}  "
          f"{asymptotic_variance_exact(D, h):.4f}")

# Holding probability delta everywhere keeps the spectrum above 2 delta - 1.
for delta in (0.1, 0.25, 0.5):
    print(f"delta={delta}: lambda_min {eigendecompose(lazy_mixture(K, delta)).eigenvalues.min():+.4f}"
          f" >= {2 * delta - 1:+.2f}")

# Data augmentation chains are positive: no negative eigenvalues at all.
p = rng.random((6, 4))
DA = build_data_augmentation(JointDistribution(p / p.sum()))
print("data augmentation eigenvalues:", np.round(eigendecompose(DA).eigenvalues, 5) + 0.0)

# Bigger proposals give bigger moves: M_{q1} dominates M_{q2} when q1 >= q2.
t, q1, q2 = random_sub_mh_pair(6, rng)
M1, M2 = build_sub_mh(t, q1), build_sub_mh(t, q2)
print("\nM_q1 dominates M_q2:", dominates_off_diagonal(M1, M2).dominates)

# Scaling a proposal by c is the same as mixing with the identity.
c = 0.3
Mc = build_sub_mh(t, scale_proposal(q2, c))
print("M_cq == c M_q + (1-c) I:", np.allclose(Mc.P, c * M2.P + (1 - c) * np.eye(6), atol=1e-12))
L2 = eigendecompose(M2).eigenvalues.max()
print(f"Lambda(M_cq) = {eigendecompose(Mc).eigenvalues.max():.6f}, 1 - c(1 - Lambda(M_q)) = {1 - c * (1 - L2):.6f}")
