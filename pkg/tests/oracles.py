"""Independent oracles used to freeze expected values in the tests.

Everything here recomputes quantities from first principles (enumeration,
quadrature, closed forms) without going through the library paths under
test.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate, stats

from cmjlab.fitness import fitness as eval_fitness


def enumerate_shape_probs(fitness_spec, weight, n_nodes: int) -> dict[int, float]:
    """Exact shape law for deterministic (point-mass) weights.

    Walks every parent sequence, multiplying the per-step attachment
    probabilities f(outdeg_j)/Z. Keys are the mixed-radix shape codes used
    by the simulation kernels: sum over i >= 2 of parent_i * (i-1)!.
    """
    probs: dict[int, float] = {}

    def code_of(parents: tuple[int, ...]) -> int:
        code = 0
        radix = 1
        for i in range(2, len(parents) + 1):
            code += parents[i - 1] * radix
            radix *= i
        return code

    def rec(parents: tuple[int, ...], outdeg: tuple[int, ...], prob: float) -> None:
        m = len(outdeg)
        if m == n_nodes:
            key = code_of(parents)
            probs[key] = probs.get(key, 0.0) + prob
            return
        fits = [eval_fitness(fitness_spec, outdeg[j], weight) for j in range(m)]
        z = sum(fits)
        if z <= 0.0:
            return
        for j in range(m):
            if fits[j] > 0.0:
                nxt = outdeg[:j] + (outdeg[j] + 1,) + outdeg[j + 1:] + (0,)
                rec(parents + (j,), nxt, prob * fits[j] / z)

    rec((), (0,), 1.0)
    return probs


def poisson_exceed(mu: float, x: float) -> float:
    """P(Poisson(mu) > x)."""
    return float(stats.poisson.sf(math.floor(x), mu))


def logpareto_raw_survival(nu: float, x0: float, x: float) -> float:
    return (x0 / x) * (math.log(x) / math.log(x0)) ** (1.0 + nu)


def logpareto_crossover(nu: float, x0: float) -> float:
    """Bisection solve of the clamped-survival crossover, no Lambert W."""
    from scipy.optimize import brentq

    peak = math.exp(1.0 + nu)
    if logpareto_raw_survival(nu, x0, max(x0, peak)) <= 1.0:
        return x0
    lo = peak
    hi = peak
    while logpareto_raw_survival(nu, x0, hi) > 1.0:
        hi *= 2.0
    return float(brentq(lambda x: logpareto_raw_survival(nu, x0, x) - 1.0, lo, hi,
                        xtol=1e-12, rtol=1e-14))


def logpareto_density(nu: float, x0: float, x: float) -> float:
    L0 = math.log(x0)
    lx = math.log(x)
    return x0 * lx**nu * (lx - (1.0 + nu)) / (L0 ** (1.0 + nu) * x * x)


def wrrt_logpareto_exceed(nu: float, x0: float, t: float, x: float) -> float:
    """P(xi(t) > x) for constant-rate offspring with rate V ~ LogParetoTail.

    Conditional on V the count is Poisson(V t); integrate the Poisson tail
    against the density of V over its support [x_c, inf).
    """
    xc = logpareto_crossover(nu, x0)
    val, _ = integrate.quad(
        lambda v: poisson_exceed(v * t, x) * logpareto_density(nu, x0, v),
        xc, np.inf, limit=400)
    return float(val)


def geometric_partial_sum(ratio: float, j_max: int) -> float:
    """sum_{j=1}^{J} ratio^j."""
    return ratio * (1.0 - ratio**j_max) / (1.0 - ratio)


def telescoping_yule_partial_sum(j_max: int) -> float:
    """sum_{j=1}^{J} prod_{i<j} (i+1)/(i+3) = 1 - 2/(J+2) at lambda = 2."""
    return 1.0 - 2.0 / (j_max + 2.0)
