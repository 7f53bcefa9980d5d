"""Event-driven simulation of the continuous-time branching process.

Each individual carries a weight w and produces children one at a time:
the wait between the (j-1)th and jth child is exponential with rate
f(j-1, w) (an infinite wait when the rate is 0). Only the next-child clock
per individual is kept pending — by the memoryless property this lazy
instantiation is exact and keeps memory linear in the population.

The module also provides the greedy witness search for an infinite path
born within a summable time budget, and the heuristic explosion diagnosis
over the recorded population milestones tau_k.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .fitness import FitnessSpec, encode_fitness_spec, validate_model
from .plan import SequencePlan
from .tree import RecursiveTree
from .weights import WeightSpec, encode_weight_spec

__all__ = [
    "Genealogy",
    "ExplosionEstimate",
    "run_until",
    "skeleton",
    "WitnessResult",
    "greedy_path_witness",
    "DiagnosisConfig",
    "Diagnosis",
    "diagnose_explosion",
    "write_genealogy_csv",
    "write_tau_csv",
    "POPULATION_CAP",
]

POPULATION_CAP = 1 << 24

_STATUS_NAMES = {
    kernels.CMJ_DONE_POPULATION: "population",
    kernels.CMJ_DONE_TIME: "time",
    kernels.CMJ_EXTINCT: "extinct",
    kernels.CMJ_POP_CAP: "population-cap",
}


@dataclass
class Genealogy:
    """Individuals in birth order; parent[0] = -1, birth_time[0] = 0."""

    parent: np.ndarray
    birth_time: np.ndarray
    weight_u: np.ndarray
    weight_v: np.ndarray
    children: np.ndarray

    @property
    def n(self) -> int:
        return int(self.parent.shape[0])


@dataclass
class ExplosionEstimate:
    """tau[k-1] is the time the population first reached k individuals."""

    tau: np.ndarray
    saturated: bool
    horizon: str

    def __post_init__(self):
        d = np.diff(self.tau)
        if d.size and d.min() < 0:
            raise ValueError("tau must be nondecreasing")


def run_until(fitness: FitnessSpec, weights: WeightSpec, rng: np.random.Generator,
              max_population: int | None = None, max_time: float | None = None,
              population_cap: int = POPULATION_CAP) -> tuple[Genealogy, ExplosionEstimate]:
    """Run the event loop until the population or time horizon is reached.

    Hitting ``population_cap`` before the horizon sets the saturated flag
    (explosion suspected within the horizon) instead of raising.
    """
    if max_population is None and max_time is None:
        raise ValueError("provide max_population and/or max_time")
    if max_population is not None and max_population < 1:
        raise ValueError("max_population must be >= 1")
    if max_time is not None and max_time < 0:
        raise ValueError("max_time must be >= 0")
    validate_model(fitness, weights)
    fkind, frates, ftail = encode_fitness_spec(fitness)
    wi, wd = encode_weight_spec(weights)

    cap = 1 << 10
    if max_population is not None:
        # size the arena to the target; tiny targets stay tiny (cheap replicates)
        cap = max(2, min(int(max_population), population_cap))
    par = np.zeros(cap, dtype=np.int64)
    bt = np.zeros(cap)
    wu = np.zeros(cap)
    wv = np.zeros(cap)
    nch = np.zeros(cap, dtype=np.int64)
    tau = np.zeros(cap)
    heap_t = np.zeros(cap + 1)
    heap_i = np.zeros(cap + 1, dtype=np.int64)

    n, hs = kernels.cmj_init(par, bt, wu, wv, nch, tau, heap_t, heap_i,
                             fkind, frates, ftail, wi, wd, rng)
    stop_k = int(max_population) if max_population is not None else 0
    stop_t = float(max_time) if max_time is not None else -1.0
    while True:
        n, hs, status = kernels.cmj_run_chunk(
            par, bt, wu, wv, nch, tau, heap_t, heap_i, n, hs,
            stop_k, stop_t, population_cap,
            fkind, frates, ftail, wi, wd, rng)
        if status != kernels.CMJ_NEED_CAPACITY:
            break
        new_cap = cap * 2

        def _grown(a):
            out = np.zeros(new_cap + (a.shape[0] - cap), dtype=a.dtype)
            out[: a.shape[0]] = a
            return out
        par = _grown(par)
        bt = _grown(bt)
        wu = _grown(wu)
        wv = _grown(wv)
        nch = _grown(nch)
        tau = _grown(tau)
        heap_t = _grown(heap_t)
        heap_i = _grown(heap_i)
        cap = new_cap

    gen = Genealogy(parent=par[:n], birth_time=bt[:n],
                    weight_u=wu[:n], weight_v=wv[:n], children=nch[:n])
    horizon = _STATUS_NAMES[status]
    if max_time is not None:
        horizon += f" (T={max_time})"
    if max_population is not None:
        horizon += f" (K={max_population})"
    est = ExplosionEstimate(tau=tau[:n].copy(), saturated=(status == kernels.CMJ_POP_CAP),
                            horizon=horizon)
    return gen, est


def skeleton(genealogy: Genealogy) -> RecursiveTree:
    """Discrete-time skeleton: the genealogy re-read as a recursive tree.

    Individuals are already numbered by birth order, so the arrays map
    straight across; out-degrees are recomputed from the parent array.
    """
    n = genealogy.n
    parent = genealogy.parent.copy()
    outdeg = (np.bincount(parent[1:], minlength=n).astype(np.int64)
              if n > 1 else np.zeros(n, dtype=np.int64))
    return RecursiveTree(
        parent=parent,
        outdeg=outdeg,
        weight_u=genealogy.weight_u.copy(),
        weight_v=genealogy.weight_v.copy(),
        birth_time=genealogy.birth_time.copy(),
    )


@dataclass(frozen=True)
class WitnessResult:
    """Outcome of one witness run: depth, model time spent, per-level log."""

    depth: int
    elapsed: float
    candidates: np.ndarray   # candidates examined per level
    success_index: np.ndarray  # index of the successful candidate, -1 on failure
    fanout: np.ndarray       # births of the successful candidate within budget
    time_used: np.ndarray    # birth span of the successful candidate


def greedy_path_witness(fitness: FitnessSpec, weights: WeightSpec, plan: SequencePlan,
                        depth_target: int, rng: np.random.Generator) -> WitnessResult:
    """Greedy construction of the nested events: at level i examine up to
    M_i candidate children of the current node, descend into the first one
    producing more than M_{i+1} births within t_i (at most M_{i+1}+1 clocks
    are simulated per candidate; the level budget bounds the accepted span,
    so the total consumed model time is at most sum_i t_i).
    """
    if depth_target < 1:
        raise ValueError("depth_target must be >= 1")
    validate_model(fitness, weights)
    fkind, frates, ftail = encode_fitness_spec(fitness)
    wi, wd = encode_weight_spec(weights)
    t_seq = np.array([plan.t(i) for i in range(1, depth_target + 1)])
    cand_seq = np.array([plan.candidates(i) for i in range(1, depth_target + 1)],
                        dtype=np.int64)
    thr_seq = np.array([plan.M(i + 1) for i in range(1, depth_target + 1)],
                       dtype=np.int64)
    cand_log = np.zeros(depth_target, dtype=np.int64)
    succ_log = np.full(depth_target, -1, dtype=np.int64)
    fanout_log = np.zeros(depth_target, dtype=np.int64)
    time_log = np.zeros(depth_target)
    depth, elapsed = kernels.witness_run(fkind, frates, ftail, wi, wd,
                                         t_seq, cand_seq, thr_seq,
                                         cand_log, succ_log, fanout_log, time_log, rng)
    return WitnessResult(depth=int(depth), elapsed=float(elapsed),
                         candidates=cand_log, success_index=succ_log,
                         fanout=fanout_log, time_used=time_log)


@dataclass(frozen=True)
class DiagnosisConfig:
    """Thresholds for the dyadic-increment heuristic (documented defaults).

    The statistic is d_j = tau_{2^{j+1}} - tau_{2^j}. A least-squares fit of
    log d_j over the trailing ``fit_window`` levels estimates the per-level
    decay factor: a fitted factor below ``decay_ratio`` reads as geometric
    decay (finite limit suspected); a factor above ``growth_ratio`` combined
    with recent increments staying above ``floor_fraction`` of the median
    increment reads as unbounded growth. Trailing increments that underflow
    to zero while time has advanced decide for decay outright. Everything
    else is inconclusive. These are artifact policy, not statements of the
    underlying theory: heavy weight laws make single increments fluctuate
    wildly (the partition function stalls between record weights), which is
    why the rule fits a window instead of testing level-by-level ratios.
    """

    min_dyadic_levels: int = 16
    fit_window: int = 12
    min_fit_points: int = 4
    decay_ratio: float = 0.7
    growth_ratio: float = 0.92
    floor_fraction: float = 0.3


@dataclass(frozen=True)
class Diagnosis:
    verdict: str  # ExplosionSuspected | GrowthUnbounded | Inconclusive
    reason: str
    increments: np.ndarray
    ratios: np.ndarray
    fitted_ratio: float
    fit_levels: int
    log_fit_r2: float


def _log_fit_r2(tau: np.ndarray, ks: np.ndarray) -> float:
    x = np.log(ks.astype(np.float64))
    y = tau
    if x.size < 3 or np.allclose(y, y[0]):
        return math.nan
    r = np.corrcoef(x, y)[0, 1]
    return float(r * r)


def diagnose_explosion(estimate: ExplosionEstimate,
                       config: DiagnosisConfig = DiagnosisConfig()) -> Diagnosis:
    """Heuristic verdict from the tau curve; never a theorem-level claim."""
    tau = estimate.tau
    n = tau.shape[0]
    levels = int(math.floor(math.log2(n))) + 1 if n >= 1 else 0
    ks = 2 ** np.arange(levels)
    if levels < config.min_dyadic_levels:
        return Diagnosis("Inconclusive",
                         f"only {levels} dyadic milestones, need {config.min_dyadic_levels}",
                         np.zeros(0), np.zeros(0), math.nan, 0, math.nan)
    dyadic = tau[ks - 1]
    inc = np.diff(dyadic)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(inc[:-1] > 0.0, inc[1:] / inc[:-1],
                          np.where(inc[1:] > 0.0, np.inf, 0.0))
    r2 = _log_fit_r2(dyadic, ks)
    window = inc[-config.fit_window:]
    if float(tau[-1]) > 0.0 and bool((window[-config.min_fit_points:] == 0.0).all()):
        return Diagnosis("ExplosionSuspected",
                         "trailing dyadic increments underflow the time resolution",
                         inc, ratios, 0.0, int(window.size), r2)
    j = np.arange(window.size, dtype=np.float64)
    pos = window > 0.0
    if int(pos.sum()) < config.min_fit_points:
        return Diagnosis("Inconclusive", "too few positive trailing increments to fit",
                         inc, ratios, math.nan, int(pos.sum()), r2)
    slope = float(np.polyfit(j[pos], np.log(window[pos]), 1)[0])
    fitted_ratio = math.exp(slope)
    if fitted_ratio < config.decay_ratio:
        return Diagnosis("ExplosionSuspected",
                         f"fitted per-level decay {fitted_ratio:.3f} below {config.decay_ratio} "
                         f"over the trailing {int(pos.sum())} levels",
                         inc, ratios, fitted_ratio, int(pos.sum()), r2)
    recent = inc[-(config.min_fit_points + 1):]
    med = float(np.median(inc))
    if (fitted_ratio > config.growth_ratio and med > 0.0
            and float(recent.min()) >= config.floor_fraction * med):
        return Diagnosis("GrowthUnbounded",
                         f"fitted per-level factor {fitted_ratio:.3f} and recent increments "
                         f"stay above {config.floor_fraction} of the median",
                         inc, ratios, fitted_ratio, int(pos.sum()), r2)
    return Diagnosis("Inconclusive", "no decisive increment pattern",
                     inc, ratios, fitted_ratio, int(pos.sum()), r2)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_genealogy_csv(gen: Genealogy, path) -> None:
    """Schema: id,parent,birth_time,weight_u,weight_v (root parent empty)."""
    with open(path, "w", newline="") as fh:
        fh.write("id,parent,birth_time,weight_u,weight_v\n")
        for i in range(gen.n):
            p = "" if i == 0 else str(int(gen.parent[i]))
            wu = "" if math.isnan(gen.weight_u[i]) else _fmt(gen.weight_u[i])
            fh.write(f"{i},{p},{_fmt(gen.birth_time[i])},{wu},{_fmt(gen.weight_v[i])}\n")


def write_tau_csv(estimate: ExplosionEstimate, path) -> None:
    """Schema: k,tau_k."""
    with open(path, "w", newline="") as fh:
        fh.write("k,tau_k\n")
        for k in range(1, estimate.tau.shape[0] + 1):
            fh.write(f"{k},{_fmt(estimate.tau[k - 1])}\n")
