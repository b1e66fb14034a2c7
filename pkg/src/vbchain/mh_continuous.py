"""One-dimensional Metropolis–Hastings samplers and grid diagnostics.

Three proposal families are supported:

``random_walk``
    ``y = x + scale * U`` with ``U`` drawn from a symmetric increment law.
``langevin``
    ``y ~ N(x + delta/2 * dlog t(x), delta^2)`` (MALA).
``state_dependent``
    ``y ~ N(x, x^b)`` on ``(0, inf)``, i.e. standard deviation ``x^{b/2}``.

The grid checks (:func:`check_mt_good`, :func:`check_umid`) evaluate
densities on finite grids; their verdicts are evidence, not proofs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import BadGridError, DomainError, InvalidStateError, NonPositiveStateError

LOG_2PI = math.log(2.0 * math.pi)


# --------------------------------------------------------------------------
# targets

@dataclass(frozen=True)
class Target:
    """Unnormalised log-density on an interval ``support = (lo, hi)``.

    ``logpdf`` and ``dlogpdf`` accept scalars or arrays and return ``-inf``
    off the support.
    """

    name: str
    logpdf: Callable
    support: tuple[float, float] = (-math.inf, math.inf)
    dlogpdf: Callable | None = None

    def contains(self, x) -> np.ndarray:
        lo, hi = self.support
        return (x > lo) & (x < hi)

    def log_density(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(self.contains(x), self.logpdf(np.where(self.contains(x), x, 1.0)), -np.inf)
        return out if out.ndim else float(out)


def normal_target(mu: float = 0.0, sigma: float = 1.0) -> Target:
    return Target("normal", lambda x: -0.5 * ((x - mu) / sigma) ** 2,
                  dlogpdf=lambda x: -(x - mu) / sigma ** 2)


def laplace_target() -> Target:
    """``t(x) ∝ exp(-|x|)``; not differentiable at 0, so no gradient."""
    return Target("laplace", lambda x: -np.abs(x))


def hyperbolic_target() -> Target:
    """``t(x) ∝ exp(-sqrt(1 + x^2))``: smooth, exponential tails, ``|dlog t| < 1``."""
    return Target("hyperbolic", lambda x: -np.sqrt(1.0 + x * x),
                  dlogpdf=lambda x: -x / np.sqrt(1.0 + x * x))


def half_cauchy_target() -> Target:
    return Target("half-cauchy", lambda x: -np.log1p(x * x), support=(0.0, math.inf),
                  dlogpdf=lambda x: -2.0 * x / (1.0 + x * x))


def exponential_target() -> Target:
    """``t(x) ∝ exp(-x)`` on ``(0, inf)``; its ``sqrt`` transform has Gaussian-type tails."""
    return Target("exponential", lambda x: -x, support=(0.0, math.inf),
                  dlogpdf=lambda x: -np.ones_like(x))


def uniform_target(lo: float, hi: float) -> Target:
    return Target("uniform", lambda x: np.zeros_like(x), support=(lo, hi),
                  dlogpdf=lambda x: np.zeros_like(x))


TARGETS = {
    "normal": normal_target,
    "laplace": laplace_target,
    "hyperbolic": hyperbolic_target,
    "half-cauchy": half_cauchy_target,
    "exponential": exponential_target,
}


# --------------------------------------------------------------------------
# sampler description

PROPOSALS = ("random_walk", "langevin", "state_dependent")
TRANSFORMS = ("none", "log", "power")
INCREMENTS = ("normal", "laplace")


@dataclass(frozen=True)
class SamplerSpec:
    target: Target
    proposal: str
    scale: float = 1.0
    increment: str = "normal"
    delta: float | None = None
    b: float | None = None
    transform: str = "none"

    def __post_init__(self):
        if self.proposal not in PROPOSALS:
            raise ValueError(f"unknown proposal {self.proposal!r}")
        if self.transform not in TRANSFORMS:
            raise ValueError(f"unknown transform {self.transform!r}")
        if self.proposal == "random_walk":
            if self.scale <= 0 or self.increment not in INCREMENTS:
                raise ValueError("random walk needs scale > 0 and a known increment law")
        if self.proposal == "langevin":
            if self.delta is None or self.delta <= 0:
                raise ValueError("Langevin proposal needs delta > 0")
            if self.target.dlogpdf is None:
                raise ValueError(f"target {self.target.name!r} has no gradient")
        if self.proposal == "state_dependent":
            if self.b is None or self.b <= 0:
                raise ValueError("state-dependent proposal needs b > 0")
            if self.target.support[0] < 0:
                raise ValueError("state-dependent proposal needs a target on (0, inf)")
        if self.transform == "log" and not (self.proposal == "state_dependent" and self.b == 2):
            raise ValueError("log transform is only defined for b = 2")
        if self.transform == "power" and not (self.proposal == "state_dependent" and 0 < self.b < 2):
            raise ValueError("power transform is only defined for 0 < b < 2")

    @property
    def power_exponent(self) -> float | None:
        return 1.0 - self.b / 2.0 if self.transform == "power" else None

    def describe(self) -> str:
        if self.proposal == "random_walk":
            extra = f"scale={self.scale:g},increment={self.increment}"
        elif self.proposal == "langevin":
            extra = f"delta={self.delta:g}"
        else:
            extra = f"b={self.b:g}"
        return f"{self.proposal}({self.target.name},{extra},transform={self.transform})"


def random_walk(target: Target, scale: float = 1.0, increment: str = "normal") -> SamplerSpec:
    return SamplerSpec(target, "random_walk", scale=scale, increment=increment)


def langevin(target: Target, delta: float) -> SamplerSpec:
    return SamplerSpec(target, "langevin", delta=delta)


def state_dependent(target: Target, b: float, transform: str | None = None) -> SamplerSpec:
    """``N(x, x^b)`` proposals; picks the matching transform when ``transform`` is None."""
    if transform is None:
        transform = "log" if b == 2 else ("power" if 0 < b < 2 else "none")
    return SamplerSpec(target, "state_dependent", b=b, transform=transform)


# --------------------------------------------------------------------------
# proposals and acceptance

def _proposal_mean_sd(spec: SamplerSpec, x):
    if spec.proposal == "langevin":
        return x + 0.5 * spec.delta * spec.target.dlogpdf(x), spec.delta
    # state_dependent
    return x, np.power(x, 0.5 * spec.b)


def _log_q(spec: SamplerSpec, x, y):
    """log proposal density q(x, y), up to a constant common to both directions."""
    mean, sd = _proposal_mean_sd(spec, x)
    return -0.5 * ((y - mean) / sd) ** 2 - np.log(sd)


def _draw_increment(spec: SamplerSpec, rng: np.random.Generator, size=None):
    if spec.increment == "laplace":
        return rng.laplace(0.0, 1.0, size)
    return rng.standard_normal(size)


def propose(spec: SamplerSpec, x, rng: np.random.Generator, size=None):
    z = _draw_increment(spec, rng, size) if spec.proposal == "random_walk" else rng.standard_normal(size)
    if spec.proposal == "random_walk":
        return x + spec.scale * z
    mean, sd = _proposal_mean_sd(spec, x)
    return mean + sd * z


def log_acceptance(spec: SamplerSpec, x, y):
    """``log alpha(x, y)``; ``-inf`` for proposals off the support."""
    t = spec.target
    y = np.asarray(y, dtype=float)
    lty = t.log_density(y)
    inside = np.isfinite(lty)
    with np.errstate(invalid="ignore"):
        lr = lty - t.log_density(x)
        if spec.proposal != "random_walk":
            ys = np.where(inside, y, x)
            lr = lr + _log_q(spec, ys, x) - _log_q(spec, x, ys)
    out = np.where(inside, np.minimum(0.0, lr), -np.inf)
    return out if out.ndim else float(out)


def _log_alpha_scalar(spec: SamplerSpec, x: float, y: float) -> float:
    lo, hi = spec.target.support
    if not lo < y < hi:
        return -math.inf
    logpdf = spec.target.logpdf
    lr = float(logpdf(y)) - float(logpdf(x))
    if spec.proposal == "langevin":
        g = spec.target.dlogpdf
        d = spec.delta
        fwd = y - x - 0.5 * d * float(g(x))
        bwd = x - y - 0.5 * d * float(g(y))
        lr += (fwd * fwd - bwd * bwd) / (2.0 * d * d)
    elif spec.proposal == "state_dependent":
        vx, vy = x ** spec.b, y ** spec.b
        diff2 = (y - x) ** 2
        lr += 0.5 * diff2 / vx - 0.5 * diff2 / vy + 0.5 * (math.log(vx) - math.log(vy))
    return min(0.0, lr)


def mh_step(spec: SamplerSpec, x: float, rng: np.random.Generator) -> tuple[float, bool]:
    """One Metropolis–Hastings transition from ``x``.

    Draws exactly one proposal variate and one uniform from ``rng``, so a
    chain is a deterministic function of the generator state.
    """
    lo, hi = spec.target.support
    if not (lo < x < hi and math.isfinite(x)):
        raise InvalidStateError(f"state {x!r} is outside the support {spec.target.support}")
    y = float(propose(spec, x, rng))
    u = rng.random()
    if u == 0.0 or math.log(u) < _log_alpha_scalar(spec, x, y):
        return y, True
    return x, False


def apply_transform(spec: SamplerSpec, states) -> np.ndarray:
    """Map a trace through the sampler's transform (``log`` or ``x^a``)."""
    states = np.asarray(states, dtype=float)
    if spec.transform == "none":
        return states.copy()
    if np.any(states <= 0):
        raise NonPositiveStateError("log / power transforms need positive states")
    if spec.transform == "log":
        return np.log(states)
    return np.power(states, spec.power_exponent)


def transformed_target(spec: SamplerSpec) -> Target:
    """Target of the transformed chain: ``e^y t(e^y)`` or the power analogue."""
    t = spec.target
    if spec.transform == "log":
        return Target(f"log-{t.name}", lambda y: y + t.log_density(np.exp(y)))
    if spec.transform == "power":
        a = spec.power_exponent
        # x = y^{1/a}, dx/dy = (1/a) y^{1/a - 1}
        return Target(f"power-{t.name}",
                      lambda y: (1.0 / a - 1.0) * np.log(y) - math.log(a)
                      + t.log_density(np.power(y, 1.0 / a)),
                      support=(0.0, math.inf))
    return t


# --------------------------------------------------------------------------
# increment density of the power-transformed chain

def transformed_increment_density(x: float, w, a: float):
    """Density of the increment ``W = (x + x^{b/2} Z)^a - x^a`` with ``a = 1 - b/2``.

    Zero where ``1 + w x^{-a} <= 0`` (proposals that leave ``(0, inf)``).
    """
    if not x > 0:
        raise DomainError(f"base state must be positive, got {x!r}")
    if not 0.0 < a < 1.0:
        raise DomainError(f"exponent must lie in (0, 1), got {a!r}")
    w = np.asarray(w, dtype=float)
    xa = x ** a
    s = w / xa
    valid = s > -1.0
    sv = np.where(valid, s, 0.0)
    lg = np.log1p(sv)
    z = xa * np.expm1(lg / a)
    # (1 + x^{-a} z)^{a-1} = (1 + w x^{-a})^{(a-1)/a}
    log_dens = -0.5 * z * z - 0.5 * LOG_2PI - math.log(a) - lg * (a - 1.0) / a
    out = np.where(valid, np.exp(log_dens), 0.0)
    return out if out.ndim else float(out)


def increment_limit_density(w, a: float):
    """The ``N(0, a^2)`` density approached as ``x -> inf``."""
    w = np.asarray(w, dtype=float)
    return np.exp(-0.5 * (w / a) ** 2) / (math.sqrt(2.0 * math.pi) * a)


def transformed_increment_mass(x: float, a: float, z_max: float = 40.0) -> float:
    """Quadrature of the increment density over its support.

    The limits are the images of ``Z = -z_max`` and ``Z = z_max`` (clipped
    to the support); the normal mass beyond them is far below double
    precision.
    """
    xa = x ** a
    hi = xa * ((1.0 + z_max / xa) ** a - 1.0)
    lo = xa * ((1.0 - z_max / xa) ** a - 1.0) if z_max < xa else -xa
    f = lambda w: transformed_increment_density(x, w, a)  # noqa: E731
    left, _ = integrate.quad(f, lo, 0.0, limit=400)
    right, _ = integrate.quad(f, 0.0, hi, limit=400)
    return left + right


# --------------------------------------------------------------------------
# rejection probe

def rejection_probability(spec: SamplerSpec, x: float, n_samples: int,
                          rng: np.random.Generator) -> tuple[float, float]:
    """Monte Carlo estimate of the holding probability ``P(x, {x})``.

    Averages ``1 - alpha(x, Y)`` over ``n_samples`` proposals ``Y`` (the
    conditional expectation of the reject indicator), which has smaller
    variance than counting rejections.  Returns ``(estimate, standard error)``.
    """
    if n_samples < 1000:
        raise ValueError("need at least 1000 samples")
    if not spec.target.contains(x):
        raise InvalidStateError(f"state {x!r} is outside the support")
    y = propose(spec, x, rng, n_samples)
    reject = 1.0 - np.exp(log_acceptance(spec, x, y))
    return float(reject.mean()), float(reject.std(ddof=1) / math.sqrt(n_samples))


# --------------------------------------------------------------------------
# grid checks

@dataclass
class GridReport:
    grid: dict
    verdict: bool
    witness: dict = field(default_factory=dict)
    note: str = "grid evidence, not proof"


def _tail_rate(u: np.ndarray, log_s: np.ndarray) -> float:
    slope = np.polyfit(u, log_s, 1)[0]
    return -float(slope)


def check_mt_good(s: Callable, half_width: float = 10.0, step: float = 0.01) -> GridReport:
    """Grid evidence that ``s`` is an MT-good increment density.

    Checks on ``[-L, L]``: symmetry, positivity, unit trapezoid mass
    (within 1e-3), and exponentially bounded tails.  The tail test fits
    ``log s`` linearly in ``|u|`` separately on ``[L/2, 3L/4]`` and
    ``[3L/4, L]``; the decay rate must be positive on both pieces and may
    drop by at most 10% from the inner to the outer piece.  Polynomial
    tails fail because their log-slope flattens out.
    """
    if half_width <= 0 or not 0 < step <= 0.01:
        raise BadGridError(f"need L > 0 and 0 < step <= 0.01, got L={half_width}, step={step}")
    k = int(round(half_width / step))
    u = np.linspace(-half_width, half_width, 2 * k + 1)
    with np.errstate(divide="ignore", under="ignore"):
        val = np.asarray(s(u), dtype=float)
    asym = float(np.max(np.abs(val - val[::-1])))
    vmin = float(val.min())
    mass = float(integrate.trapezoid(val, u))
    positive = vmin > 0
    rates = (math.nan, math.nan)
    tail_ok = False
    if positive:
        au = np.abs(u)
        inner = (au >= half_width / 2) & (au <= 0.75 * half_width)
        outer = au >= 0.75 * half_width
        rates = (_tail_rate(au[inner], np.log(val[inner])), _tail_rate(au[outer], np.log(val[outer])))
        tail_ok = rates[0] > 0 and rates[1] > 0 and rates[1] >= 0.9 * rates[0]
    checks = {
        "symmetric": asym <= 1e-9,
        "positive": positive,
        "unit_mass": abs(mass - 1.0) <= 1e-3,
        "exponential_tails": tail_ok,
    }
    return GridReport(
        grid={"range": (-half_width, half_width), "step": step},
        verdict=all(checks.values()),
        witness={**checks, "max_asymmetry": asym, "min_value": vmin, "mass": mass,
                 "tail_rate_inner": rates[0], "tail_rate_outer": rates[1]},
    )


def check_umid(q: Callable, s: Callable, x_grid, w_grid, s_half_width: float = 10.0,
               s_step: float = 0.01) -> GridReport:
    """Grid evidence for ``q(x, x + w) >= c s(w)``: the minimum ratio ``c*``.

    ``q`` must accept broadcast arrays ``(x, y)``.  ``s`` is first run
    through :func:`check_mt_good`; a failure there is an error.
    """
    x_grid = np.asarray(x_grid, dtype=float)
    w_grid = np.asarray(w_grid, dtype=float)
    if x_grid.size == 0 or w_grid.size == 0:
        raise BadGridError("empty grid")
    s_report = check_mt_good(s, s_half_width, s_step)
    if not s_report.verdict:
        raise DomainError(f"reference density is not MT-good on the grid: {s_report.witness}")
    X, Wd = np.meshgrid(x_grid, w_grid, indexing="ij")
    ratio = np.asarray(q(X, X + Wd), dtype=float) / np.asarray(s(Wd), dtype=float)
    idx = np.unravel_index(np.argmin(ratio), ratio.shape)
    c_star = float(ratio[idx])
    return GridReport(
        grid={"x": (float(x_grid.min()), float(x_grid.max()), x_grid.size),
              "w": (float(w_grid.min()), float(w_grid.max()), w_grid.size)},
        verdict=c_star > 1e-6,
        witness={"c_star": c_star, "worst_x": float(X[idx]), "worst_w": float(Wd[idx]),
                 "s_mass": s_report.witness["mass"]},
    )


# --------------------------------------------------------------------------
# densities used with the grid checks

def normal_pdf(u, sd: float = 1.0):
    u = np.asarray(u, dtype=float)
    return np.exp(-0.5 * (u / sd) ** 2) / (math.sqrt(2.0 * math.pi) * sd)


def cauchy_pdf(u):
    u = np.asarray(u, dtype=float)
    return 1.0 / (math.pi * (1.0 + u * u))


def log_increment_pdf(u):
    """Density of ``log(1 + Z)`` for standard normal ``Z`` (the b = 2 increment)."""
    u = np.asarray(u, dtype=float)
    z = np.expm1(u)
    return normal_pdf(z) * np.exp(u)


def symmetrized_log_increment(half_width: float = 40.0):
    """``min(f(u), f(-u))`` renormalised, with ``f`` from :func:`log_increment_pdf`.

    Returns ``(s, c)`` where ``c`` is the mass of the unnormalised minimum,
    so that ``f(u) >= c s(u)`` everywhere.
    """
    def raw(u):
        return np.minimum(log_increment_pdf(u), log_increment_pdf(-np.asarray(u, dtype=float)))

    c, _ = integrate.quad(raw, -half_width, half_width, points=[0.0], limit=400)

    def s(u):
        return raw(u) / c

    return s, c


def mala_proposal_density(target: Target, delta: float):
    """``q(x, y)`` for the Langevin proposal, vectorised over ``(x, y)``."""
    def q(x, y):
        mean = x + 0.5 * delta * target.dlogpdf(x)
        return normal_pdf(y - mean, delta)

    return q
