"""Example 9: a periodic chain that still has finite asymptotic variances.

P1 walks toward the origin (2/3 in, 1/3 out) and never holds; P2 is the
Metropolis walk for the same law.  P1 dominates P2 off the diagonal, so it
has smaller asymptotic variances, even though P1 is periodic and so not
geometrically ergodic.
"""
import numpy as np

from vbchain.kernel import build_example9
from vbchain.peskun import ordering_report
from vbchain.simulate import Example9Walk, clt_diagnostic, example9_oracle, simulate_path
from vbchain.spectral import classify, eigendecompose

P1, P2 = build_example9(25)
report = ordering_report(P1, P2, n_functionals=50, seed=0)
print("P1 dominates P2:", report.dominates)
print("top eigenvalues (P1, P2):", np.round(report.Lambda_pair, 5))
ratios = [v1 / v2 for _, v1, v2 in report.variance_pairs]
print(f"v(P1)/v(P2) over 50 random functionals: min {min(ratios):.3f}, max {max(ratios):.3f}")

for K in (P1, P2):
    c = classify(eigendecompose(K))
    print(f"{K.label}: lambda_min {c.lambda_min:+.9f}, near periodic {c.near_periodic}, "
          f"geometrically ergodic (threshold) {c.geometrically_ergodic}")

# Truncation only holds at the two ends; the bottom eigenvalue creeps to -1.
print("\nwindow radius  lambda_min(P1)")
for N in (5, 10, 20, 40):
    print(f"{N:>13}  {eigendecompose(build_example9(N)[0]).eigenvalues.min():+.12f}")

# On the untruncated integers the parity flips every step.
path = simulate_path(Example9Walk(1), 0, 12, seed=3).states
print("\nfirst steps from 0:", path.tolist())

# Still, n^{-1/2} S_n is approximately normal with the spectral variance.
mu, v = example9_oracle(1, lambda x: x)
rep = clt_diagnostic(Example9Walk(1), lambda x: x, 50_000, 200, seed=4)
print(f"h(x) = x: oracle v = {v:.3f}, replicate variance {rep.variance:.3f}, z {rep.z_score:+.2f}")
