"""Path simulation, batch means and CLT diagnostics.

Three kinds of source can be simulated:

* a :class:`~vbchain.kernel.ReversibleKernel` (exact categorical sampling),
* an :class:`Example9Walk` on the whole integer line,
* a :class:`~vbchain.mh_continuous.SamplerSpec`.

Every path is driven by its own ``numpy`` PCG64 generator (period 2^128,
stream splitting through ``SeedSequence.spawn``), so a path is a
deterministic function of ``(source, x0, n, seed)``.  Replicates use the
children of one ``SeedSequence`` and are advanced together with numpy;
replicate ``j`` is bit-identical to a single path run with child seed ``j``.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats

from .errors import (
    InvalidStartError,
    MissingReferenceError,
    TooFewReplicatesError,
    TraceTooShortError,
)
from .kernel import ReversibleKernel, _example9_rates, build_example9
from .mh_continuous import SamplerSpec, mh_step
from .spectral import eigendecompose
from .variance import asymptotic_variance_exact

GENERATOR = "PCG64"
CHUNK = 8192
SAMPLER_BURN_IN = 10_000
EXAMPLE9_ORACLE_N = 40


# --------------------------------------------------------------------------
# sources

@dataclass(frozen=True)
class Example9Walk:
    """The untruncated Example 9 chains on the integers.

    ``chain=1`` is the drift-to-origin walk with no holding (period 2);
    ``chain=2`` is the Metropolis walk with +-1 proposals.
    """

    chain: int = 1

    def __post_init__(self):
        if self.chain not in (1, 2):
            raise ValueError(f"chain must be 1 or 2, got {self.chain!r}")

    def rates(self) -> np.ndarray:
        """(down, up) probabilities for x < 0, x = 0, x > 0 (rows)."""
        return np.array([_example9_rates(x, self.chain) for x in (-1, 0, 1)])

    def describe(self) -> str:
        return f"example9-P{self.chain}-on-Z"


def _stationary_draw_z(u: float) -> int:
    # order 0, 1, -1, 2, -2, ...; mass 1/4 at 0 and (3/8) 2^{-k} at +-k
    acc = 0.25
    if u < acc:
        return 0
    k = 1
    while True:
        p = 0.375 * 2.0 ** -k
        if u < acc + p:
            return k
        acc += p
        if u < acc + p:
            return -k
        acc += p
        k += 1
        if k > 1100:
            return k


def _describe(source) -> str:
    if isinstance(source, ReversibleKernel):
        return source.label or f"kernel-n{source.n}"
    return source.describe()


def _seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def _seed_record(ss: np.random.SeedSequence):
    return (ss.entropy, tuple(ss.spawn_key)) if ss.spawn_key else ss.entropy


# --------------------------------------------------------------------------
# traces

@dataclass(frozen=True)
class Trace:
    values: np.ndarray
    states: np.ndarray
    seed: object
    source: str
    x0: object
    burn_in: int = 0
    generator: str = GENERATOR
    accept_rate: float | None = None

    @property
    def n(self) -> int:
        return self.values.size


def _apply(h, states):
    if h is None:
        return np.asarray(states, dtype=float)
    if callable(h):
        return np.asarray(h(np.asarray(states)), dtype=float)
    return np.asarray(h, dtype=float)[np.asarray(states)]


def _finite_start(K: ReversibleKernel, x0, rng) -> int:
    if x0 is None:
        cum = np.cumsum(K.pi)
        return min(int(np.searchsorted(cum, rng.random(), side="right")), K.n - 1)
    if not (isinstance(x0, (int, np.integer)) and 0 <= x0 < K.n):
        raise InvalidStartError(f"start {x0!r} is not a state index in [0, {K.n})")
    return int(x0)


def _z_start(x0, rng) -> int:
    if x0 is None:
        return _stationary_draw_z(rng.random())
    if not isinstance(x0, (int, np.integer)):
        raise InvalidStartError(f"start {x0!r} is not an integer")
    return int(x0)


def _finite_path(K: ReversibleKernel, x: int, n: int, rng) -> np.ndarray:
    cum = [list(row) for row in np.cumsum(K.P, axis=1)]
    last = K.n - 1
    out = np.empty(n, dtype=np.int64)
    done = 0
    while done < n:
        u = rng.random(min(CHUNK, n - done)).tolist()
        for ui in u:
            x = bisect_right(cum[x], ui)
            if x > last:
                x = last
            out[done] = x
            done += 1
    return out


def _z_path(walk: Example9Walk, x: int, n: int, rng) -> np.ndarray:
    r = walk.rates()
    table = {s: (float(r[s + 1, 0]), float(r[s + 1, 0] + r[s + 1, 1])) for s in (-1, 0, 1)}
    out = np.empty(n, dtype=np.int64)
    done = 0
    while done < n:
        u = rng.random(min(CHUNK, n - done)).tolist()
        for ui in u:
            d, du = table[(x > 0) - (x < 0)]
            if ui < d:
                x -= 1
            elif ui < du:
                x += 1
            out[done] = x
            done += 1
    return out


def _sampler_path(spec: SamplerSpec, x: float, n: int, burn_in: int, rng):
    for _ in range(burn_in):
        x, _ = mh_step(spec, x, rng)
    out = np.empty(n)
    acc = 0
    for i in range(n):
        x, a = mh_step(spec, x, rng)
        out[i] = x
        acc += a
    return out, acc / n


def simulate_path(source, x0=None, n: int = 1000, seed=0, h=None, burn_in: int | None = None) -> Trace:
    """Simulate ``n`` steps of ``source`` after the start ``x0``.

    ``x0=None`` draws the start from the stationary law (finite kernels and
    :class:`Example9Walk`).  Samplers need an explicit start and are burnt
    in for ``burn_in`` steps (default 10 000) before recording.  ``h`` maps
    states to the recorded values: an array indexed by state for finite
    kernels, or a vectorised callable.
    """
    if n < 1:
        raise ValueError(f"path length must be >= 1, got {n!r}")
    ss = _seed_sequence(seed)
    rng = np.random.Generator(np.random.PCG64(ss))
    accept = None
    if isinstance(source, ReversibleKernel):
        start = _finite_start(source, x0, rng)
        states = _finite_path(source, start, n, rng)
        burn = 0
    elif isinstance(source, Example9Walk):
        start = _z_start(x0, rng)
        states = _z_path(source, start, n, rng)
        burn = 0
    elif isinstance(source, SamplerSpec):
        lo, hi = source.target.support
        if x0 is None or not lo < float(x0) < hi:
            raise InvalidStartError(f"sampler start {x0!r} must lie in the support {source.target.support}")
        start = float(x0)
        burn = SAMPLER_BURN_IN if burn_in is None else int(burn_in)
        states, accept = _sampler_path(source, start, n, burn, rng)
    else:
        raise TypeError(f"cannot simulate {type(source).__name__}")
    return Trace(values=_apply(h, states), states=states, seed=_seed_record(ss),
                 source=_describe(source), x0=start, burn_in=burn, accept_rate=accept)


def write_trace_csv(trace: Trace, fh) -> None:
    fh.write(f"# source={trace.source} seed={trace.seed} generator={trace.generator} "
             f"x0={trace.x0} burn_in={trace.burn_in}\n")
    fh.write("step,state,value\n")
    for i, (s, v) in enumerate(zip(trace.states.tolist(), trace.values.tolist()), start=1):
        fh.write(f"{i},{s!r},{v!r}\n")


# --------------------------------------------------------------------------
# replicates, advanced together

def _replicate_generators(seed, m: int):
    children = _seed_sequence(seed).spawn(m)
    return children, [np.random.Generator(np.random.PCG64(c)) for c in children]


def _sum_replicates(source, h, n: int, gens, x0) -> np.ndarray:
    """Sum of ``h`` over ``n`` steps for each generator, stepping replicates together."""
    m = len(gens)
    if isinstance(source, ReversibleKernel):
        x = np.array([_finite_start(source, x0, g) for g in gens], dtype=np.int64)
        cum = np.cumsum(source.P, axis=1)
        hv = np.asarray(h, dtype=float) if not callable(h) else _apply(h, np.arange(source.n))
        last = source.n - 1

        def step(x, u):
            return np.minimum((cum[x] <= u[:, None]).sum(axis=1), last)

        def value(x):
            return hv[x]
    else:
        x = np.array([_z_start(x0, g) for g in gens], dtype=np.int64)
        r = source.rates()
        d_tab, du_tab = r[:, 0], r[:, 0] + r[:, 1]

        def step(x, u):
            s = np.sign(x) + 1
            return x - (u < d_tab[s]) + ((u >= d_tab[s]) & (u < du_tab[s]))

        def value(x):
            return _apply(h, x)

    total = np.zeros(m)
    done = 0
    while done < n:
        c = min(CHUNK, n - done)
        U = np.stack([g.random(c) for g in gens])
        for t in range(c):
            x = step(x, U[:, t])
            total += value(x)
        done += c
    return total


def replicate_sums(source, h, n: int, m: int, seed=0, x0=None, burn_in: int | None = None):
    """Per-replicate sums ``h(X_1) + ... + h(X_n)`` and the child seeds used."""
    children, gens = _replicate_generators(seed, m)
    if isinstance(source, SamplerSpec):
        sums = np.array([simulate_path(source, x0, n, c, h=h, burn_in=burn_in).values.sum()
                         for c in children])
    elif isinstance(source, (ReversibleKernel, Example9Walk)):
        sums = _sum_replicates(source, h, n, gens, x0)
    else:
        raise TypeError(f"cannot simulate {type(source).__name__}")
    return sums, children


# --------------------------------------------------------------------------
# batch means

def batch_means_variance(trace, n_batches: int | None = None) -> tuple[float, float]:
    """Batch-means estimate of the asymptotic variance and its standard error.

    The trace is cut into ``n_batches`` (default ``floor(sqrt(n))``) equal
    batches, dropping any remainder.  The estimate is the batch size times
    the sample variance of the batch means; its standard error uses the
    normal-theory variance of a sample variance, ``est * sqrt(2 / (a - 1))``.
    """
    x = np.asarray(trace.values if isinstance(trace, Trace) else trace, dtype=float)
    n = x.size
    a = int(math.isqrt(n)) if n_batches is None else int(n_batches)
    if a < 2 or n // a < 1:
        raise TraceTooShortError(f"cannot form {a} batches from {n} values")
    b = n // a
    means = x[: a * b].reshape(a, b).mean(axis=1)
    est = b * float(np.var(means, ddof=1))
    return est, est * math.sqrt(2.0 / (a - 1))


# --------------------------------------------------------------------------
# CLT diagnostic

@dataclass
class CltReport:
    m: int
    n: int
    normalized_sums: np.ndarray
    mean: float
    variance: float
    reference_v: float | None
    z_score: float
    mean_z: float
    skewness: float
    excess_kurtosis: float
    divergent: bool
    seeds: list = field(default_factory=list, repr=False)

    def as_row(self) -> dict:
        return {"m": self.m, "n": self.n, "mean": self.mean, "variance": self.variance,
                "reference_v": self.reference_v, "z_score": self.z_score, "mean_z": self.mean_z,
                "skewness": self.skewness, "excess_kurtosis": self.excess_kurtosis,
                "divergent": self.divergent}


def variance_z_score(empirical_var: float, v: float, m: int) -> float:
    return (empirical_var - v) / (v * math.sqrt(2.0 / (m - 1)))


def example9_oracle(chain: int, h: Callable, N: int = EXAMPLE9_ORACLE_N) -> tuple[float, float]:
    """(stationary mean, asymptotic variance) of ``h`` from the radius-``N`` truncation."""
    K = build_example9(N)[chain - 1]
    hv = _apply(h, np.arange(-N, N + 1))
    D = eigendecompose(K)
    return float(K.pi @ hv), asymptotic_variance_exact(D, hv)


def clt_diagnostic(source, h, n: int, m: int, seed=0, v: float | None = None,
                   stationary_mean: float | None = None, x0=None,
                   burn_in: int | None = None) -> CltReport:
    """Compare the spread of ``n^{-1/2} sum (h(X_i) - pi(h))`` over ``m`` replicates with ``v``.

    For finite kernels ``v`` and ``pi(h)`` come from the spectral module;
    for :class:`Example9Walk` from the radius-40 truncation.  Samplers need
    ``stationary_mean`` (and ``v`` for a z-score).
    """
    if m < 50:
        raise TooFewReplicatesError(f"need at least 50 replicates, got {m!r}")
    if isinstance(source, ReversibleKernel):
        hv = np.asarray(h, dtype=float) if not callable(h) else _apply(h, np.arange(source.n))
        if stationary_mean is None:
            stationary_mean = float(source.pi @ hv)
        if v is None:
            v = asymptotic_variance_exact(eigendecompose(source), hv)
        h = hv
    elif isinstance(source, Example9Walk):
        if v is None or stationary_mean is None:
            mu, vv = example9_oracle(source.chain, h)
            stationary_mean = mu if stationary_mean is None else stationary_mean
            v = vv if v is None else v
    elif stationary_mean is None:
        raise MissingReferenceError("samplers need an explicit stationary_mean")
    sums, children = replicate_sums(source, h, n, m, seed, x0, burn_in)
    z = (sums - n * stationary_mean) / math.sqrt(n)
    var = float(np.var(z, ddof=1))
    mean = float(z.mean())
    divergent = v is not None and math.isinf(v)
    zs = variance_z_score(var, v, m) if v is not None and not divergent and v > 0 else math.nan
    return CltReport(
        m=m, n=n, normalized_sums=z, mean=mean, variance=var, reference_v=v, z_score=zs,
        mean_z=mean / math.sqrt(var / m) if var > 0 else math.nan,
        skewness=float(stats.skew(z)) if var > 0 else math.nan,
        excess_kurtosis=float(stats.kurtosis(z)) if var > 0 else math.nan,
        divergent=divergent, seeds=[_seed_record(c) for c in children],
    )
