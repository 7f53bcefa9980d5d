"""Level sequences (t_i) and (M_i) for the nested-event machinery.

Defaults follow the explicit choice that makes the tail criterion work:
``t_i = i**-(1 + epsilon/2)`` (summable for every epsilon > 0) and
``M_i = 2**i``. The candidate budget normally equals M_i; it can be widened
independently to study how the witness search responds to more candidates
at unchanged success thresholds.
"""
from __future__ import annotations

from dataclasses import dataclass

__all__ = ["SequencePlan"]


@dataclass(frozen=True)
class SequencePlan:
    epsilon: float = 1.0
    i_max: int = 16
    m_base: float = 2.0
    candidate_base: float | None = None

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.i_max < 1:
            raise ValueError(f"i_max must be >= 1, got {self.i_max}")
        if not self.m_base > 1.0:
            raise ValueError("m_base must exceed 1")
        if self.candidate_base is not None and not self.candidate_base > 1.0:
            raise ValueError("candidate_base must exceed 1")
        prev = 0
        for i in range(1, self.i_max + 2):
            m = self.M(i)
            if m <= prev:
                raise ValueError(f"M_i must be strictly increasing; M_{i} = {m}")
            prev = m

    def t(self, i: int) -> float:
        """Level time budget t_i; sum over i is finite."""
        return float(i) ** -(1.0 + 0.5 * self.epsilon)

    def M(self, i: int) -> int:
        return int(round(self.m_base ** i))

    def candidates(self, i: int) -> int:
        base = self.m_base if self.candidate_base is None else self.candidate_base
        return int(round(base ** i))

    def time_budget(self, levels: int | None = None) -> float:
        """sum of t_i over the first ``levels`` levels (default i_max)."""
        top = self.i_max if levels is None else levels
        return sum(self.t(i) for i in range(1, top + 1))
