"""Pure-birth offspring processes: closed forms and Monte Carlo.

A linear pure-birth process started at 0 jumps k -> k+1 at rate
``c1*k + c2``. For ``c1 > 0`` it has the generating function

    E[z^X(t)] = (e^{-c1 t} / (1 - z (1 - e^{-c1 t})))^r,   r = c2/c1,

i.e. X(t) is negative binomial with r "failures" and success probability
``1 - e^{-c1 t}``; for ``c1 = 0`` it is Poisson(c2 t). Throughout, the
boundary convention is ``(e^{xt} - 1)/x := t`` at x = 0, and the numeric
switch to the limit form happens at ``c1 < 1e-12 * c2`` to avoid
cancellation (expm1 is used otherwise).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import stats

from ._backend import kernels
from .fitness import FitnessSpec, Linear, encode_fitness_spec, validate_model
from .mcstats import Interval, wilson_interval
from .weights import PairSpec, PointMass, WeightSpec, encode_weight_spec

__all__ = [
    "BirthRates",
    "FixedRates",
    "Mixed",
    "OffspringModel",
    "DEFAULT_CAP",
    "AnalyticUnavailable",
    "mean",
    "second_moment",
    "pgf",
    "simulate_count",
    "simulate_counts",
    "tail_prob_mc",
    "TailEstimate",
    "exceed_prob",
    "moment_grid_rows",
]

# Saturation cap: a hit is reported, never silently truncated.
DEFAULT_CAP = 1 << 20

_C1_ZERO_FACTOR = 1e-12


class AnalyticUnavailable(ValueError):
    """No closed-form/quadrature route exists for the requested quantity."""


@dataclass(frozen=True)
class BirthRates:
    """Linear rate pair: jump rate at state k is ``c1*k + c2``."""

    c1: float
    c2: float

    def __post_init__(self):
        if not (math.isfinite(self.c1) and self.c1 >= 0.0):
            raise ValueError(f"c1 must be finite and nonnegative, got {self.c1}")
        if not (math.isfinite(self.c2) and self.c2 > 0.0):
            raise ValueError(f"c2 must be finite and positive, got {self.c2}")

    @property
    def r(self) -> float:
        """c2/c1 (infinite at the Poisson boundary)."""
        return self.c2 / self.c1 if self.c1 > 0.0 else math.inf

    def _poisson_limit(self) -> bool:
        return self.c1 < _C1_ZERO_FACTOR * self.c2


@dataclass(frozen=True)
class FixedRates:
    rates: BirthRates


@dataclass(frozen=True)
class Mixed:
    """Each realization draws a weight and runs rates ``f(k, w)``."""

    weights: WeightSpec
    fitness: FitnessSpec

    def __post_init__(self):
        validate_model(self.fitness, self.weights)


OffspringModel = Union[FixedRates, Mixed]


def _check_t(t: float) -> None:
    if not (math.isfinite(t) and t >= 0.0):
        raise ValueError(f"time must be finite and nonnegative, got {t}")


def mean(rates: BirthRates, t: float) -> float:
    """E[X(t)] = r(e^{c1 t} - 1), continuously extended to c2*t at c1 = 0."""
    _check_t(t)
    if rates._poisson_limit():
        return rates.c2 * t
    return rates.r * math.expm1(rates.c1 * t)


def second_moment(rates: BirthRates, t: float) -> float:
    """E[X(t)^2]; equals (r/(r+1)) m^2 + m for c1 > 0, (c2 t)^2 + c2 t at c1 = 0."""
    _check_t(t)
    m = mean(rates, t)
    if rates._poisson_limit():
        return m * m + m
    r = rates.r
    return (r / (r + 1.0)) * m * m + m


def pgf(rates: BirthRates, t: float, z: float) -> float:
    """E[z^X(t)] for z in [0, 1]; Poisson branch exp(c2 t (z-1)) at c1 = 0."""
    _check_t(t)
    if not 0.0 <= z <= 1.0:
        raise ValueError(f"z must lie in [0, 1], got {z}")
    if rates._poisson_limit():
        return math.exp(rates.c2 * t * (z - 1.0))
    p = math.exp(-rates.c1 * t)
    return (p / (1.0 - z * (1.0 - p))) ** rates.r


def _encode_model(model: OffspringModel):
    if isinstance(model, FixedRates):
        wi = np.zeros(3, dtype=np.int64)
        wd = np.zeros(8)
        return 0, model.rates.c1, model.rates.c2, 0, np.zeros(0), 0, wi, wd
    fkind, frates, ftail = encode_fitness_spec(model.fitness)
    wi, wd = encode_weight_spec(model.weights)
    return 1, 0.0, 0.0, fkind, frates, ftail, wi, wd


def simulate_counts(model: OffspringModel, t: float, rng: np.random.Generator,
                    n: int, cap: int = DEFAULT_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Births by time t for ``n`` independent realizations.

    Returns (counts, saturated); a saturated replicate hit ``cap`` births,
    which flags possible sideways explosion and is never silently dropped.
    """
    _check_t(t)
    if cap < 1:
        raise ValueError("cap must be at least 1")
    counts = np.zeros(n, dtype=np.int64)
    sat = np.zeros(n, dtype=np.uint8)
    mode, c1, c2, fkind, frates, ftail, wi, wd = _encode_model(model)
    kernels.simulate_counts(mode, c1, c2, fkind, frates, ftail, wi, wd,
                            t, cap, counts, sat, rng)
    return counts, sat.astype(bool)


def simulate_count(model: OffspringModel, t: float, rng: np.random.Generator,
                   cap: int = DEFAULT_CAP) -> tuple[int, bool]:
    """Single realization of (births by time t, saturation flag)."""
    counts, sat = simulate_counts(model, t, rng, 1, cap)
    return int(counts[0]), bool(sat[0])


@dataclass(frozen=True)
class TailEstimate:
    """Monte Carlo estimate of P(X(t) > x) with a Wilson score interval."""

    estimate: float
    interval: Interval
    nsamples: int
    exceed_count: int


def tail_prob_mc(model: OffspringModel, t: float, x: float, nsamples: int,
                 rng: np.random.Generator, confidence: float = 0.99) -> TailEstimate:
    """Survival estimate; simulation is capped at floor(x)+1 births since
    only exceedance matters."""
    if nsamples < 1000:
        raise ValueError("nsamples must be at least 10**3")
    if x < 0:
        raise ValueError("x must be nonnegative")
    cap = int(math.floor(x)) + 1
    counts, _ = simulate_counts(model, t, rng, nsamples, cap=cap)
    k = int((counts > x).sum())
    return TailEstimate(
        estimate=k / nsamples,
        interval=wilson_interval(k, nsamples, confidence),
        nsamples=nsamples,
        exceed_count=k,
    )


# ---------------------------------------------------------------------------
# Exact tails

def _fixed_exceed(c1: float, c2: float, t: float, x: float) -> float:
    """P(X(t) > x) for the linear pure-birth law, extended to c2 = 0 (no births)."""
    if x < 0:
        return 1.0
    if t == 0.0:
        return 0.0
    k = math.floor(x)
    if c2 <= 0.0 and c1 >= 0.0:
        # first clock never rings
        return 0.0
    if c1 < _C1_ZERO_FACTOR * c2:
        return float(stats.poisson.sf(k, c2 * t))
    r = c2 / c1
    return float(stats.nbinom.sf(k, r, math.exp(-c1 * t)))


def _coupled_rates(spec: PairSpec):
    """(c1, c2) as functions of the scalar V for the coupled pair laws."""
    if spec.coupling == "u-zero":
        return lambda v: (0.0, v)
    if spec.coupling == "u-one":
        return lambda v: (1.0, v)
    if spec.coupling == "u-equals-v":
        return lambda v: (v, v)
    if isinstance(spec.u_spec, PointMass):
        u = spec.u_spec.value
        return lambda v: (u, v)
    return None


def exceed_prob(model: OffspringModel, t: float, x: float) -> float:
    """Exact P(xi(t) > x) where a closed form or 1-D quadrature exists.

    Supported: fixed rates (Poisson / negative binomial) and linear-fitness
    mixed models whose pair law reduces to one scalar dimension. Raises
    AnalyticUnavailable otherwise.
    """
    _check_t(t)
    if isinstance(model, FixedRates):
        return _fixed_exceed(model.rates.c1, model.rates.c2, t, x)
    if isinstance(model.fitness, Linear) and isinstance(model.weights, PairSpec):
        to_rates = _coupled_rates(model.weights)
        if to_rates is not None:
            def cond(v: float) -> float:
                c1, c2 = to_rates(v)
                return _fixed_exceed(c1, c2, t, x)

            return float(min(1.0, max(0.0, model.weights.v_spec.expect(cond))))
    raise AnalyticUnavailable(
        f"no analytic tail for model {model!r}; use tail_prob_mc")


def moment_grid_rows(c1_values, c2_values, t_values, nreplicates: int, seed: int,
                     cap: int = DEFAULT_CAP) -> list[dict]:
    """Analytic-vs-MC rows for the (c1, c2, t) grid; schema matches the
    ``c1,c2,t,stat,analytic,mc,se`` CSV. Each cell gets its own substream."""
    from .rngutil import substream

    rows = []
    cell = 0
    for c1 in c1_values:
        for c2 in c2_values:
            for t in t_values:
                rates = BirthRates(c1, c2)
                rng = substream(seed, cell)
                counts, sat = simulate_counts(FixedRates(rates), t, rng, nreplicates, cap)
                xs = counts.astype(np.float64)
                m = float(xs.mean())
                se_m = float(xs.std(ddof=1) / math.sqrt(nreplicates))
                sq = xs * xs
                m2 = float(sq.mean())
                se_m2 = float(sq.std(ddof=1) / math.sqrt(nreplicates))
                rows.append(dict(c1=c1, c2=c2, t=t, stat="mean",
                                 analytic=mean(rates, t), mc=m, se=se_m,
                                 saturated=int(sat.sum())))
                rows.append(dict(c1=c1, c2=c2, t=t, stat="second_moment",
                                 analytic=second_moment(rates, t), mc=m2, se=se_m2,
                                 saturated=int(sat.sum())))
                cell += 1
    return rows
