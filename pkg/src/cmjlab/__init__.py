"""cmjlab: simulation lab for branching processes and recursive trees with fitness.

Discrete sequential growth and the equivalent continuous-time event-driven
process, linear pure-birth analytics, explosion criteria evaluators, and a
phase classifier for the linear fitness family, behind a compiled kernel
core with a pure-Python fallback selected at import.
"""
from __future__ import annotations

__version__ = "0.1.0"

from ._backend import BACKEND
from .weights import (
    PointMass,
    Exponential,
    Uniform,
    Pareto,
    LogParetoTail,
    PairSpec,
    sample_weight,
    sample_weight_array,
)
from .fitness import Linear, Tabulated, fitness, deg_max
from .tree import (
    RecursiveTree,
    GrowthState,
    new_growth,
    grow,
    attach_probabilities,
    degree_histogram,
    max_out_degree,
    height,
    edge_mass_below,
)
from .birth import (
    BirthRates,
    FixedRates,
    Mixed,
    mean,
    second_moment,
    pgf,
    simulate_count,
    simulate_counts,
    tail_prob_mc,
    exceed_prob,
)
from .cmj import (
    run_until,
    skeleton,
    greedy_path_witness,
    diagnose_explosion,
    DiagnosisConfig,
)
from .plan import SequencePlan
from .criteria import (
    summability_test,
    tail_criterion_test,
    linear_moment_test,
    linear_tail_test,
    classify_phase,
    condensation_sum,
    PhaseConfig,
)
from .rngutil import make_rng, substream

__all__ = [
    "BACKEND",
    "__version__",
    "PointMass", "Exponential", "Uniform", "Pareto", "LogParetoTail", "PairSpec",
    "sample_weight", "sample_weight_array",
    "Linear", "Tabulated", "fitness", "deg_max",
    "RecursiveTree", "GrowthState", "new_growth", "grow", "attach_probabilities",
    "degree_histogram", "max_out_degree", "height", "edge_mass_below",
    "BirthRates", "FixedRates", "Mixed", "mean", "second_moment", "pgf",
    "simulate_count", "simulate_counts", "tail_prob_mc", "exceed_prob",
    "run_until", "skeleton", "greedy_path_witness", "diagnose_explosion",
    "DiagnosisConfig", "SequencePlan",
    "summability_test", "tail_criterion_test", "linear_moment_test",
    "linear_tail_test", "classify_phase", "condensation_sum", "PhaseConfig",
    "make_rng", "substream",
]
