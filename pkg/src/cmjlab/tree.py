"""Sequential growth of recursive trees with fitness, plus tree statistics.

Nodes are numbered by arrival: node 0 is the root and node n is inserted at
step n by attaching to an existing node chosen with probability
proportional to its current fitness ``f(outdeg, weight)``. A tree with m
nodes therefore has m - 1 edges. Growth halts for good once the partition
function (the sum of all node fitnesses) reaches zero.

Target selection uses a Fenwick tree over per-node fitness (O(log n) draw
and update). The partition function is maintained incrementally and
recomputed exactly every 2**16 steps to bound floating-point drift.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .fitness import FitnessSpec, encode_fitness_spec, validate_model
from .weights import WeightSpec, encode_weight_spec

__all__ = [
    "RecursiveTree",
    "GrowthState",
    "DegreeHistogram",
    "ZeroPartitionFunction",
    "new_growth",
    "grow",
    "attach_probabilities",
    "degree_histogram",
    "max_out_degree",
    "height",
    "edge_mass_below",
    "write_tree_csv",
    "write_histogram_csv",
]

_INITIAL_CAPACITY = 1 << 10


class ZeroPartitionFunction(RuntimeError):
    """Raised when an operation needs attachment probabilities but Z = 0."""


@dataclass
class RecursiveTree:
    """Arena-style rooted tree; ``parent[0]`` is -1, ``parent[i] < i`` otherwise."""

    parent: np.ndarray
    outdeg: np.ndarray
    weight_u: np.ndarray
    weight_v: np.ndarray
    birth_time: np.ndarray | None = None

    @property
    def n(self) -> int:
        return int(self.parent.shape[0])

    def validate(self) -> None:
        n = self.n
        if n == 0:
            raise ValueError("empty tree")
        if self.parent[0] != -1:
            raise ValueError("root must have parent -1")
        idx = np.arange(1, n)
        if n > 1 and not (self.parent[1:] < idx).all():
            raise ValueError("parent[i] < i violated")
        counts = np.bincount(self.parent[1:], minlength=n) if n > 1 else np.zeros(n, dtype=np.int64)
        if not (counts == self.outdeg).all():
            raise ValueError("outdeg inconsistent with parent array")
        if int(self.outdeg.sum()) != n - 1:
            raise ValueError("edge count identity violated")
        if self.birth_time is not None:
            if self.birth_time[0] != 0.0:
                raise ValueError("root birth time must be 0")
            if n > 1 and not (self.birth_time[1:] >= self.birth_time[self.parent[1:]]).all():
                raise ValueError("child born before parent")


class GrowthState:
    """Mutable growth frontier; single-owner, one mutating thread at a time."""

    def __init__(self, fitness: FitnessSpec, weights: WeightSpec, root_weight: tuple[float, float]):
        self.fitness_spec = fitness
        self.weight_spec = weights
        self._fkind, self._frates, self._ftail = encode_fitness_spec(fitness)
        self._wi, self._wd = encode_weight_spec(weights)
        cap = _INITIAL_CAPACITY
        self._cap = cap
        self.parent = np.zeros(cap, dtype=np.int64)
        self.outdeg = np.zeros(cap, dtype=np.int64)
        self.weight_u = np.full(cap, math.nan)
        self.weight_v = np.zeros(cap)
        self.fit = np.zeros(cap)
        self.bit = np.zeros(cap + 1)
        self.zbox = np.zeros(2)
        self.n = 1
        u0, v0 = root_weight
        self.parent[0] = -1
        self.weight_u[0] = u0
        self.weight_v[0] = v0
        from .fitness import fitness as eval_fitness

        w0 = v0 if math.isnan(u0) else (u0, v0)
        f0 = eval_fitness(fitness, 0, w0)
        self.fit[0] = f0
        kernels.fw_update(self.bit, cap, 0, f0)
        self.zbox[0] = f0

    @property
    def z(self) -> float:
        """Current partition function (sum of all node fitnesses)."""
        return float(self.zbox[0])

    @property
    def halted(self) -> bool:
        return not (self.zbox[0] > 0.0)

    @property
    def tree(self) -> RecursiveTree:
        """Read-only view of the current tree (do not grow while holding it)."""
        n = self.n
        return RecursiveTree(
            parent=self.parent[:n],
            outdeg=self.outdeg[:n],
            weight_u=self.weight_u[:n],
            weight_v=self.weight_v[:n],
        )

    def _grow_capacity(self) -> None:
        cap = self._cap * 2
        for name in ("parent", "outdeg", "weight_u", "weight_v", "fit"):
            old = getattr(self, name)
            new = np.zeros(cap, dtype=old.dtype)
            new[: self._cap] = old
            setattr(self, name, new)
        self.bit = np.zeros(cap + 1)
        self._cap = cap
        # rebuilding also refreshes z exactly, so reset the drift counter
        self.zbox[0] = kernels.fw_rebuild(self.bit, self.fit, self.n)
        self.zbox[1] = 0.0


def new_growth(fitness: FitnessSpec, weights: WeightSpec, rng: np.random.Generator) -> GrowthState:
    """Single root with a sampled weight; Z = f(0, W0)."""
    validate_model(fitness, weights)
    from .weights import sample_weight

    w = sample_weight(weights, rng)
    root = w if isinstance(w, tuple) else (math.nan, w)
    return GrowthState(fitness, weights, root)


def grow(state: GrowthState, steps: int, rng: np.random.Generator) -> int:
    """Perform up to ``steps`` attachment rounds; returns the number done.

    A return value below ``steps`` means the partition function hit zero.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    total = 0
    while total < steps and not state.halted:
        if state.n >= state._cap:
            state._grow_capacity()
        n_new, performed = kernels.grow_steps(
            state.parent, state.outdeg, state.weight_u, state.weight_v,
            state.fit, state.bit, state.n, steps - total,
            state._fkind, state._frates, state._ftail,
            state._wi, state._wd, state.zbox, rng,
        )
        state.n = int(n_new)
        total += int(performed)
    return total


def attach_probabilities(state: GrowthState) -> np.ndarray:
    """Exact attachment law over current nodes: f(outdeg_j, W_j) / Z."""
    if state.halted:
        raise ZeroPartitionFunction("zero partition function")
    f = state.fit[: state.n]
    return f / f.sum()


@dataclass(frozen=True)
class DegreeHistogram:
    """Counts N_k of nodes with out-degree k, for k = 0..max degree."""

    counts: np.ndarray  # counts[k] = N_k
    n: int

    def as_dict(self) -> dict[int, int]:
        return {k: int(c) for k, c in enumerate(self.counts) if c > 0}


def degree_histogram(tree: RecursiveTree) -> DegreeHistogram:
    counts = np.bincount(tree.outdeg)
    return DegreeHistogram(counts=counts.astype(np.int64), n=tree.n)


def max_out_degree(tree: RecursiveTree) -> int:
    return int(tree.outdeg.max())


def height(tree: RecursiveTree) -> int:
    """Longest root-to-leaf path length (edges)."""
    n = tree.n
    depth = np.zeros(n, dtype=np.int64)
    parent = tree.parent
    for i in range(1, n):
        depth[i] = depth[parent[i]] + 1
    return int(depth.max()) if n > 0 else 0


def edge_mass_below(tree: RecursiveTree, k_cap: int) -> float:
    """Truncated edge mass sum_{k <= K} k * N_k / n, the condensation probe."""
    if k_cap < 0:
        raise ValueError("degree cap must be nonnegative")
    hist = degree_histogram(tree)
    ks = np.arange(hist.counts.shape[0])
    mask = ks <= k_cap
    return float((ks[mask] * hist.counts[mask]).sum() / tree.n)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_tree_csv(tree: RecursiveTree, path) -> None:
    """Schema: node,parent,outdeg,weight_u,weight_v,birth_time.

    The root's parent is empty; weight_u is empty for scalar weights and
    birth_time is empty for discrete-growth trees.
    """
    bt = tree.birth_time
    with open(path, "w", newline="") as fh:
        fh.write("node,parent,outdeg,weight_u,weight_v,birth_time\n")
        for i in range(tree.n):
            p = "" if i == 0 else str(int(tree.parent[i]))
            wu = "" if math.isnan(tree.weight_u[i]) else _fmt(tree.weight_u[i])
            b = "" if bt is None else _fmt(bt[i])
            fh.write(f"{i},{p},{int(tree.outdeg[i])},{wu},{_fmt(tree.weight_v[i])},{b}\n")


def write_histogram_csv(hist: DegreeHistogram, path) -> None:
    """Schema: k,count (zero-count degrees omitted)."""
    with open(path, "w", newline="") as fh:
        fh.write("k,count\n")
        for k, c in enumerate(hist.counts):
            if c > 0:
                fh.write(f"{k},{int(c)}\n")
