"""Fitness functions mapping (out-degree, weight) to an attachment rate."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .weights import PairSpec, WeightSpec

__all__ = [
    "Linear",
    "Tabulated",
    "FitnessSpec",
    "fitness",
    "deg_max",
    "encode_fitness_spec",
    "requires_pair_weights",
]

TAIL_RULES = ("zero-after-end", "constant-last")


@dataclass(frozen=True)
class Linear:
    """``f(k, (u, v)) = u*k + v``; weights must be pairs."""

    def __repr__(self) -> str:  # parameter-free variant
        return "Linear()"


@dataclass(frozen=True)
class Tabulated:
    """Finite rate table indexed by out-degree.

    Beyond the end of the table the rate is 0 (``zero-after-end``, the node
    stops reproducing) or the last entry (``constant-last``).
    """

    rates: tuple[float, ...]
    tail: str = "zero-after-end"

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        if len(self.rates) == 0:
            raise ValueError("rate table must not be empty")
        for r in self.rates:
            if not (math.isfinite(r) and r >= 0.0):
                raise ValueError(f"rates must be finite and nonnegative, got {r}")
        if self.tail not in TAIL_RULES:
            raise ValueError(f"tail rule must be one of {TAIL_RULES}, got {self.tail!r}")


FitnessSpec = Union[Linear, Tabulated]


def requires_pair_weights(spec: FitnessSpec) -> bool:
    return isinstance(spec, Linear)


def _as_pair(w) -> tuple[float, float]:
    if isinstance(w, tuple):
        return float(w[0]), float(w[1])
    raise TypeError(f"linear fitness needs a weight pair (u, v), got {w!r}")


def fitness(spec: FitnessSpec, k: int, w) -> float:
    """Rate ``f(k, w)`` for a node of out-degree ``k`` carrying weight ``w``."""
    if k < 0:
        raise ValueError(f"out-degree must be nonnegative, got {k}")
    if isinstance(spec, Linear):
        u, v = _as_pair(w)
        return u * k + v
    if k < len(spec.rates):
        return spec.rates[k]
    if spec.tail == "constant-last":
        return spec.rates[-1]
    return 0.0


def deg_max(spec: FitnessSpec, w):
    """``sup{ i : f(i, w) > 0 }``: an int, ``math.inf``, or None if f is identically 0."""
    if isinstance(spec, Linear):
        u, v = _as_pair(w)
        if u > 0.0 or v > 0.0:
            return math.inf
        return None
    if spec.tail == "constant-last" and spec.rates[-1] > 0.0:
        return math.inf
    top = None
    for i, r in enumerate(spec.rates):
        if r > 0.0:
            top = i
    return top


def encode_fitness_spec(spec: FitnessSpec) -> tuple[int, np.ndarray, int]:
    """Kernel encoding: (kind, rate table, tail code).

    Linear is kind 0 with an empty table; tabulated is kind 1 with tail code
    0 for zero-after-end and 1 for constant-last.
    """
    if isinstance(spec, Linear):
        return 0, np.zeros(0, dtype=np.float64), 0
    if isinstance(spec, Tabulated):
        return 1, np.asarray(spec.rates, dtype=np.float64), TAIL_RULES.index(spec.tail)
    raise TypeError(f"not a fitness spec: {spec!r}")


def validate_model(fitness_spec: FitnessSpec, weight_spec: WeightSpec) -> None:
    """Reject model combinations the growth dynamics cannot interpret."""
    if requires_pair_weights(fitness_spec) and not isinstance(weight_spec, PairSpec):
        raise ValueError("linear fitness requires a pair weight spec (u, v)")
