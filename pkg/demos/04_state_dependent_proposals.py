"""N(x, x^b) proposals on (0, inf) and the tools used to reason about them."""
import numpy as np

from vbchain.mh_continuous import (
    check_mt_good,
    check_umid,
    exponential_target,
    half_cauchy_target,
    hyperbolic_target,
    increment_limit_density,
    langevin,
    log_increment_pdf,
    mala_proposal_density,
    normal_pdf,
    rejection_probability,
    state_dependent,
    symmetrized_log_increment,
    transformed_increment_density,
)
from vbchain.simulate import batch_means_variance, simulate_path

# b > 2: far out, proposals overshoot and almost everything is rejected.
spec = state_dependent(half_cauchy_target(), 3.0)
gens = [np.random.default_rng(s) for s in np.random.SeedSequence(0).spawn(3)]
for x, g in zip((1e2, 1e4, 1e6), gens):
    est, se = rejection_probability(spec, x, 10_000, g)
    print(f"b=3, x={x:.0e}: P(stay) = {est:.5f} +- {se:.5f}")

# b = 2: log turns the chain into a random walk with increment log(1 + Z).
s, c = symmetrized_log_increment()
print(f"\nmin(f(u), f(-u)) has mass {c:.4f}; MT-good on [-3, 3]: {check_mt_good(s, 3.0).verdict}")
rep = check_umid(lambda x, y: log_increment_pdf(y - x), s, [0.0], np.linspace(-3, 3, 601), s_half_width=3.0)
print(f"log-increment minorisation constant on the grid: {rep.witness['c_star']:.4f}")

# b < 2: x -> x^a with a = 1 - b/2 makes the increment nearly N(0, a^2).
w = np.linspace(-3, 3, 601)
for x in (1e2, 1e4, 1e8):
    err = np.max(np.abs(transformed_increment_density(x, w, 0.5) - increment_limit_density(w, 0.5)))
    print(f"a=0.5, x={x:.0e}: sup distance to N(0, 1/4) density = {err:.2e}")

# MALA with a bounded gradient is minorised by a normal increment.
rep = check_umid(mala_proposal_density(hyperbolic_target(), 1.0), normal_pdf,
                 np.linspace(-50, 50, 201), np.linspace(-5, 5, 201))
print(f"\nMALA on exp(-sqrt(1+x^2)): c* = {rep.witness['c_star']:.4f} ({rep.note})")


# Batch means at two run lengths: stable when the transformed target has
# light tails, drifting when it does not (sqrt of a half-Cauchy has a y^-3 tail).
def bounded(x):
    y = np.sqrt(x)
    return y / (1 + y)


for name, target in (("exponential", exponential_target()), ("half-Cauchy", half_cauchy_target())):
    sp = state_dependent(target, 1.0)
    out = [batch_means_variance(simulate_path(sp, 1.0, n, seed=k, h=bounded))
           for k, n in enumerate((10_000, 100_000, 400_000))]
    print(f"b=1 on {name:>11}: " + ", ".join(f"{e:.3f}+-{se:.3f}" for e, se in out))
