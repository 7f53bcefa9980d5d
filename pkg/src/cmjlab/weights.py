"""Node weight distributions.

A weight is either a scalar ``v`` or a pair ``(u, v)`` of nonnegative reals.
Pairs drive the linear fitness family ``f(k, (u, v)) = u*k + v``; the three
classical couplings are ``u-zero`` (uniform attachment weighted by v),
``u-one`` (additive preferential attachment) and ``u-equals-v``
(multiplicative fitness).

Scalar laws on offer: point mass, exponential, uniform, Pareto, and a
log-corrected Pareto tail with survival

    P(V > x) = min(1, (x0/x) * (log x / log x0)**(1 + nu))   for x >= x0,

which is the canonical example of a tail heavy enough to sit on the
explosive side of the phase transition while keeping tail index 1. The raw
expression exceeds 1 on an initial stretch whenever ``x0 < e**(1 + nu)``;
the usable tail starts at the clamp point ``x_c`` where the decreasing
branch crosses 1, computed once at construction via the Lambert W function
(branch -1). Samples are drawn by inverting the clamped survival function.

Scalar sampling consumes exactly one uniform per draw (zero for point
masses); pair sampling draws u then v for the independent coupling and a
single v otherwise. The compiled and pure-Python backends follow the same
contract, so a given seed yields the same weights under either.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy import integrate, special

from ._backend import kernels

__all__ = [
    "PointMass",
    "Exponential",
    "Uniform",
    "Pareto",
    "LogParetoTail",
    "PairSpec",
    "ScalarSpec",
    "WeightSpec",
    "COUPLINGS",
    "sample_weight",
    "sample_weight_array",
    "encode_weight_spec",
]

_E = math.e

# Kernel encoding: scalar kinds 0..4, couplings 0..3 (-1 marks a scalar spec).
_KIND_POINTMASS = 0
_KIND_EXPONENTIAL = 1
_KIND_UNIFORM = 2
_KIND_PARETO = 3
_KIND_LOGPARETO = 4

COUPLINGS = ("independent", "u-equals-v", "u-zero", "u-one")


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def _finite(x: float) -> bool:
    return math.isfinite(x)


@dataclass(frozen=True)
class PointMass:
    """Degenerate law at ``value``."""

    value: float

    def __post_init__(self):
        _require(_finite(self.value) and self.value >= 0.0,
                 f"point mass must be a finite nonnegative real, got {self.value}")

    _kind = _KIND_POINTMASS

    def _params(self) -> tuple[float, float, float, float]:
        return (self.value, 0.0, 0.0, 0.0)

    def sample_array(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.value)

    def mean(self) -> float:
        return self.value

    def mgf(self, t: float) -> float:
        return math.exp(t * self.value)

    def survival(self, x):
        return np.where(np.asarray(x, dtype=float) < self.value, 1.0, 0.0)

    def expect(self, fn: Callable[[float], float]) -> float:
        return fn(self.value)


@dataclass(frozen=True)
class Exponential:
    """Exponential law with the given rate (mean ``1/rate``)."""

    rate: float

    def __post_init__(self):
        _require(_finite(self.rate) and self.rate > 0.0,
                 f"exponential rate must be positive, got {self.rate}")

    _kind = _KIND_EXPONENTIAL

    def _params(self):
        return (self.rate, 0.0, 0.0, 0.0)

    def sample_array(self, rng, size):
        return -np.log1p(-rng.random(size)) / self.rate

    def mean(self) -> float:
        return 1.0 / self.rate

    def mgf(self, t: float) -> float:
        if t >= self.rate:
            return math.inf
        return self.rate / (self.rate - t)

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0.0, 1.0, np.exp(-self.rate * np.maximum(x, 0.0)))

    def expect(self, fn):
        val, _ = integrate.quad(lambda v: fn(v) * self.rate * math.exp(-self.rate * v),
                                0.0, np.inf, limit=200)
        return val


@dataclass(frozen=True)
class Uniform:
    """Uniform law on ``[lo, hi]``."""

    lo: float
    hi: float

    def __post_init__(self):
        _require(_finite(self.lo) and _finite(self.hi) and 0.0 <= self.lo <= self.hi,
                 f"uniform bounds must satisfy 0 <= lo <= hi, got ({self.lo}, {self.hi})")

    _kind = _KIND_UNIFORM

    def _params(self):
        return (self.lo, self.hi, 0.0, 0.0)

    def sample_array(self, rng, size):
        return self.lo + rng.random(size) * (self.hi - self.lo)

    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def mgf(self, t: float) -> float:
        if t == 0.0 or self.hi == self.lo:
            return math.exp(t * self.lo) if self.hi == self.lo else 1.0
        return (math.exp(t * self.hi) - math.exp(t * self.lo)) / (t * (self.hi - self.lo))

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        if self.hi == self.lo:
            return np.where(x < self.lo, 1.0, 0.0)
        return np.clip((self.hi - x) / (self.hi - self.lo), 0.0, 1.0)

    def expect(self, fn):
        if self.hi == self.lo:
            return fn(self.lo)
        val, _ = integrate.quad(fn, self.lo, self.hi, limit=200)
        return val / (self.hi - self.lo)


@dataclass(frozen=True)
class Pareto:
    """Pareto law: ``P(V > x) = (xmin/x)**alpha`` for ``x >= xmin``."""

    alpha: float
    xmin: float

    def __post_init__(self):
        _require(_finite(self.alpha) and self.alpha > 0.0,
                 f"pareto shape must be positive, got {self.alpha}")
        _require(_finite(self.xmin) and self.xmin > 0.0,
                 f"pareto scale must be positive, got {self.xmin}")

    _kind = _KIND_PARETO

    def _params(self):
        return (self.alpha, self.xmin, 0.0, 0.0)

    def sample_array(self, rng, size):
        return self.xmin * np.exp(-np.log1p(-rng.random(size)) / self.alpha)

    def mean(self) -> float:
        if self.alpha <= 1.0:
            return math.inf
        return self.alpha * self.xmin / (self.alpha - 1.0)

    def mgf(self, t: float) -> float:
        return 1.0 if t == 0.0 else math.inf

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            s = np.where(x > self.xmin, (self.xmin / np.maximum(x, self.xmin)) ** self.alpha, 1.0)
        return s

    def expect(self, fn):
        a, m = self.alpha, self.xmin
        val, _ = integrate.quad(lambda v: fn(v) * a * m**a * v ** (-a - 1.0),
                                m, np.inf, limit=200)
        return val


@dataclass(frozen=True)
class LogParetoTail:
    """Tail-index-1 law with a ``(log x)**(1+nu)`` correction; see module docs.

    Requires ``nu > 0`` and ``x0 > e``. All mass sits on ``[x_c, inf)`` where
    ``x_c >= max(x0, e**(1+nu))`` solves the clamped-survival crossover; the
    mean is infinite for every parameter choice.
    """

    nu: float
    x0: float

    def __post_init__(self):
        _require(_finite(self.nu) and self.nu > 0.0,
                 f"tail exponent nu must be positive, got {self.nu}")
        _require(_finite(self.x0) and self.x0 > _E,
                 f"threshold x0 must exceed e, got {self.x0}")

    _kind = _KIND_LOGPARETO

    @property
    def _log_x0(self) -> float:
        return math.log(self.x0)

    @property
    def _c_base(self) -> float:
        # survival = s  <=>  y**(1+nu) * exp(-y) = s * c_base, y = log x
        L0 = self._log_x0
        return math.exp(-L0) * L0 ** (1.0 + self.nu)

    @property
    def clamp_point(self) -> float:
        """Left edge of the support: where the raw tail formula crosses 1."""
        return self._inv_survival_scalar(1.0)

    def _params(self):
        one_pn = 1.0 + self.nu
        return (one_pn, self._c_base, 1.0 / one_pn, 0.0)

    def _inv_survival_scalar(self, s: float) -> float:
        one_pn = 1.0 + self.nu
        a = -((s * self._c_base) ** (1.0 / one_pn)) / one_pn
        return math.exp(-one_pn * kernels.lambertw_m1(a))

    def sample_array(self, rng, size):
        s = 1.0 - rng.random(size)
        one_pn = 1.0 + self.nu
        arg = -((s * self._c_base) ** (1.0 / one_pn)) / one_pn
        w = special.lambertw(arg, k=-1).real
        return np.exp(-one_pn * w)

    def mean(self) -> float:
        return math.inf

    def mgf(self, t: float) -> float:
        return 1.0 if t == 0.0 else math.inf

    def _raw_survival(self, x):
        return (self.x0 / x) * (np.log(x) / self._log_x0) ** (1.0 + self.nu)

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        above = x >= self.x0
        if np.any(above):
            out = np.where(above, np.minimum(1.0, self._raw_survival(np.maximum(x, self.x0))), out)
        return out

    def _density(self, x: float) -> float:
        # -d/dx of the raw survival, valid on the decreasing branch x >= x_c
        L0, nu = self._log_x0, self.nu
        lx = math.log(x)
        return self.x0 * lx**nu * (lx - (1.0 + nu)) / (L0 ** (1.0 + nu) * x * x)

    def expect(self, fn):
        xc = self.clamp_point
        val, _ = integrate.quad(lambda v: fn(v) * self._density(v), xc, np.inf, limit=400)
        return val


ScalarSpec = Union[PointMass, Exponential, Uniform, Pareto, LogParetoTail]
_SCALAR_TYPES = (PointMass, Exponential, Uniform, Pareto, LogParetoTail)


@dataclass(frozen=True)
class PairSpec:
    """Law of a weight pair ``(U, V)``.

    ``coupling`` is one of ``independent`` (U ~ u_spec, V ~ v_spec,
    independent), ``u-equals-v`` (U = V ~ v_spec), ``u-zero`` (U = 0) and
    ``u-one`` (U = 1); the last three ignore ``u_spec``, which must be None.
    """

    coupling: str
    v_spec: ScalarSpec
    u_spec: ScalarSpec | None = None

    def __post_init__(self):
        _require(self.coupling in COUPLINGS,
                 f"coupling must be one of {COUPLINGS}, got {self.coupling!r}")
        _require(isinstance(self.v_spec, _SCALAR_TYPES), "v_spec must be a scalar weight law")
        if self.coupling == "independent":
            _require(isinstance(self.u_spec, _SCALAR_TYPES),
                     "independent coupling requires a scalar u_spec")
        else:
            _require(self.u_spec is None,
                     f"coupling {self.coupling!r} determines U; u_spec must be None")

    def sample_array(self, rng, size):
        if self.coupling == "independent":
            u = self.u_spec.sample_array(rng, size)
            v = self.v_spec.sample_array(rng, size)
            return u, v
        v = self.v_spec.sample_array(rng, size)
        if self.coupling == "u-equals-v":
            return v.copy(), v
        if self.coupling == "u-zero":
            return np.zeros_like(v), v
        return np.ones_like(v), v


WeightSpec = Union[ScalarSpec, PairSpec]


def is_pair(spec: WeightSpec) -> bool:
    return isinstance(spec, PairSpec)


def encode_weight_spec(spec: WeightSpec) -> tuple[np.ndarray, np.ndarray]:
    """Fixed-size integer/double encoding consumed by the sampling kernels."""
    wi = np.zeros(3, dtype=np.int64)
    wd = np.zeros(8, dtype=np.float64)
    if isinstance(spec, PairSpec):
        wi[0] = COUPLINGS.index(spec.coupling)
        if spec.u_spec is not None:
            wi[1] = spec.u_spec._kind
            wd[0:4] = spec.u_spec._params()
        wi[2] = spec.v_spec._kind
        wd[4:8] = spec.v_spec._params()
    elif isinstance(spec, _SCALAR_TYPES):
        wi[0] = -1
        wi[2] = spec._kind
        wd[4:8] = spec._params()
    else:
        raise TypeError(f"not a weight spec: {spec!r}")
    return wi, wd


def sample_weight(spec: WeightSpec, rng: np.random.Generator):
    """One weight: a float for scalar specs, an ``(u, v)`` tuple for pairs.

    Shares its draw contract with the simulation kernels, so a stream used
    here advances exactly as it would inside a growth run.
    """
    wi, wd = encode_weight_spec(spec)
    u, v = kernels.sample_weight(wi, wd, rng)
    if isinstance(spec, PairSpec):
        return (u, v)
    return v


def sample_weight_array(spec: WeightSpec, rng: np.random.Generator, size: int):
    """Vectorized sampling: ndarray for scalars, ``(u, v)`` arrays for pairs.

    The batch path uses vectorized transforms; it matches the scalar path in
    law (and in uniform consumption) but not necessarily in the last ulp.
    """
    return spec.sample_array(rng, size)
