"""A two-state chain from every angle: spectrum, exact variance, simulation.

Run with ``python3 demos/01_two_state_chain.py``.
"""
import numpy as np

from vbchain.kernel import from_matrix, kernel_power
from vbchain.simulate import batch_means_variance, clt_diagnostic, simulate_path
from vbchain.spectral import classify, eigendecompose
from vbchain.variance import autocovariances, variance_report

# Stay with probability 0.7 in state 0 and 0.4 in state 1.
K = from_matrix([[0.7, 0.3], [0.6, 0.4]])
print("stationary law:", K.pi)

# The only mean-zero eigenvalue is 1 - 0.3 - 0.6 = 0.1.
D = eigendecompose(K)
c = classify(D)
print(f"Lambda = {c.Lambda:.4f}, K_bound = {c.K_bound:.4f}, variance bounding: {c.variance_bounding}")

# h = (1, -2) is an eigenfunction, so its autocovariances are 2 * 0.1^k.
h = np.array([1.0, -2.0])
print("autocovariances:", np.round(autocovariances(D, h, 4), 6))
f0 = h - K.pi @ h
print("same from P^3 directly:", K.pi @ (f0 * (kernel_power(K, 3) @ f0)))

r = variance_report(D, h, horizons=(1, 10, 100, 10_000))
print(f"var_pi = {r.var_pi:.4f}, asymptotic variance = {r.v_exact:.6f} (22/9 = {22 / 9:.6f})")
for n, v in r.v_finite_n:
    print(f"  Var(S_n)/n at n={n:>6}: {v:.6f}")

# A long path recovers the same number by batch means.
trace = simulate_path(K, None, 400_000, seed=1, h=h)
est, se = batch_means_variance(trace)
print(f"batch means over 4e5 steps: {est:.4f} +- {se:.4f}")

# And 200 independent replicates of the normalised sum have that variance.
rep = clt_diagnostic(K, h, 20_000, 200, seed=2)
print(f"replicate variance {rep.variance:.4f}, z-score {rep.z_score:+.2f}, "
      f"skewness {rep.skewness:+.3f}, excess kurtosis {rep.excess_kurtosis:+.3f}")
