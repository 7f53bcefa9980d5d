"""Command-line front end.

Subcommands: tree-grow, cmj-run, birth-moments, criterion, classify,
phase-sweep, witness. Every command reads a plain-text key-value config,
requires an explicit seed (no wall-clock default), writes CSV data files
plus a manifest with per-file checksums into --out, and is byte-
deterministic for a fixed seed. Exit codes: 0 success, 1 config error,
2 runtime failure.
"""
from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__, calibration
from ._backend import BACKEND
from .birth import BirthRates, FixedRates, Mixed, moment_grid_rows
from .cmj import (
    diagnose_explosion,
    greedy_path_witness,
    run_until,
    write_genealogy_csv,
    write_tau_csv,
)
from .config import (
    Config,
    ConfigError,
    fitness_spec_from_config,
    load_config,
    weight_spec_from_config,
)
from .criteria import (
    PhaseConfig,
    classify_phase,
    summability_test,
    tail_criterion_test,
)
from .manifest import write_manifest
from .plan import SequencePlan
from .rngutil import substream
from .tree import (
    degree_histogram,
    edge_mass_below,
    grow,
    height,
    max_out_degree,
    new_growth,
    write_histogram_csv,
    write_tree_csv,
)

COMMANDS = ("tree-grow", "cmj-run", "birth-moments", "criterion", "classify",
            "phase-sweep", "witness")


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(c) for c in row) + "\n")


def _write_keyvalue(path, items) -> None:
    with open(path, "w") as fh:
        for k, v in items:
            fh.write(f"{k}={v}\n")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse usage problems are config errors
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cmjlab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"cmjlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="key-value config file")
        p.add_argument("--seed", type=int, default=None,
                       help="master seed (overrides run.seed; one of the two is required)")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--replicates", type=int, default=None,
                       help="override run.replicates")
        p.add_argument("--threads", type=int, default=1)
    return parser


def _setup(args) -> tuple[Config, int, Path]:
    cfg = load_config(args.config)
    seed = args.seed if args.seed is not None else (
        cfg.get_int("run.seed") if cfg.has("run.seed") else None)
    cfg.get_int("run.seed", 0)  # consumed either way
    if seed is None:
        raise ConfigError("seed required: pass --seed or set run.seed")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return cfg, seed, out


def _replicates(args, cfg: Config, default: int) -> int:
    if args.replicates is not None:
        return args.replicates
    return cfg.get_int("run.replicates", default)


def _edge_mass_caps(max_degree: int) -> list[int]:
    caps = sorted({2**k for k in range(0, 64) if 2**k <= max(max_degree, 1)} | {max_degree})
    return [c for c in caps if c >= 1]


# ---------------------------------------------------------------------------

def cmd_tree_grow(args) -> int:
    cfg, seed, out = _setup(args)
    fitness = fitness_spec_from_config(cfg)
    weights = weight_spec_from_config(cfg)
    n = cfg.get_int("run.n")
    cfg.ensure_fully_consumed()
    t0 = time.perf_counter()
    rng = substream(seed, 0)
    state = new_growth(fitness, weights, rng)
    performed = grow(state, n - 1, rng)
    tree = state.tree
    hist = degree_histogram(tree)
    maxdeg = max_out_degree(tree)
    h = height(tree)
    write_tree_csv(tree, out / "tree.csv")
    write_histogram_csv(hist, out / "degree_histogram.csv")
    caps = _edge_mass_caps(maxdeg)
    write_csv(out / "edge_mass.csv", ["k_cap", "edge_mass"],
              [[k, edge_mass_below(tree, k)] for k in caps])
    summary = [
        ("n", tree.n),
        ("requested_n", n),
        ("halted", int(state.halted)),
        ("max_degree", maxdeg),
        ("max_degree_ratio", repr(maxdeg / tree.n)),
        ("height", h),
        ("backend", BACKEND),
    ]
    _write_keyvalue(out / "summary.txt", summary)
    (out / "plot_tree_grow.py").write_text(_PLOT_TREE)
    outputs = ["tree.csv", "degree_histogram.csv", "edge_mass.csv", "summary.txt",
               "plot_tree_grow.py"]
    write_manifest(out, "tree-grow", seed, cfg.items(), outputs,
                   metrics={"events": performed,
                            "wall_clock_s": round(time.perf_counter() - t0, 3)},
                   calibration={"max_degree_ratio_threshold":
                                calibration.MAX_DEGREE_RATIO_THRESHOLD})
    return 0


def cmd_cmj_run(args) -> int:
    cfg, seed, out = _setup(args)
    fitness = fitness_spec_from_config(cfg)
    weights = weight_spec_from_config(cfg)
    max_pop = cfg.get_int("run.max_population", 0) or None
    max_time = cfg.get_float("run.max_time", -1.0)
    max_time = None if max_time < 0 else max_time
    pop_cap = cfg.get_int("run.population_cap", 1 << 24)
    cfg.ensure_fully_consumed()
    t0 = time.perf_counter()
    rng = substream(seed, 0)
    gen, est = run_until(fitness, weights, rng, max_population=max_pop,
                         max_time=max_time, population_cap=pop_cap)
    diag = diagnose_explosion(est)
    write_genealogy_csv(gen, out / "genealogy.csv")
    write_tau_csv(est, out / "tau.csv")
    summary = [
        ("population", gen.n),
        ("saturated", int(est.saturated)),
        ("horizon", est.horizon),
        ("diagnosis", diag.verdict),
        ("diagnosis_reason", diag.reason),
        ("log_fit_r2", repr(diag.log_fit_r2)),
        ("backend", BACKEND),
    ]
    _write_keyvalue(out / "summary.txt", summary)
    (out / "plot_tau.py").write_text(_PLOT_TAU)
    outputs = ["genealogy.csv", "tau.csv", "summary.txt", "plot_tau.py"]
    write_manifest(out, "cmj-run", seed, cfg.items(), outputs,
                   metrics={"events": gen.n - 1,
                            "wall_clock_s": round(time.perf_counter() - t0, 3)})
    return 0


def cmd_birth_moments(args) -> int:
    cfg, seed, out = _setup(args)
    c1s = cfg.get_float_list("birth.c1")
    c2s = cfg.get_float_list("birth.c2")
    ts = cfg.get_float_list("birth.t")
    nrep = _replicates(args, cfg, 10**5)
    cfg.ensure_fully_consumed()
    t0 = time.perf_counter()
    rows = moment_grid_rows(c1s, c2s, ts, nrep, seed)
    write_csv(out / "moments.csv", ["c1", "c2", "t", "stat", "analytic", "mc", "se"],
              [[r["c1"], r["c2"], r["t"], r["stat"], r["analytic"], r["mc"], r["se"]]
               for r in rows])
    for r in rows:
        if r["stat"] == "mean":
            print(f"c1={r['c1']} c2={r['c2']} t={r['t']}: "
                  f"analytic mean {r['analytic']:.6g}, mc {r['mc']:.6g} (se {r['se']:.2g})")
    write_manifest(out, "birth-moments", seed, cfg.items(), ["moments.csv"],
                   metrics={"events": len(rows) * nrep,
                            "wall_clock_s": round(time.perf_counter() - t0, 3)})
    return 0


def _offspring_model(cfg: Config):
    kind = cfg.get_str("model.kind", "mixed")
    if kind == "fixed":
        return FixedRates(BirthRates(cfg.get_float("model.c1"), cfg.get_float("model.c2")))
    if kind != "mixed":
        raise ConfigError(f"unknown model kind {kind!r}; expected mixed or fixed",
                          "model.kind")
    return Mixed(weights=weight_spec_from_config(cfg), fitness=fitness_spec_from_config(cfg))


def cmd_criterion(args) -> int:
    cfg, seed, out = _setup(args)
    model = _offspring_model(cfg)
    kind = cfg.get_str("criterion.kind", "summability")
    method = cfg.get_str("criterion.method", "auto")
    nsamples = cfg.get_int("criterion.nsamples", 10**4)
    rng = substream(seed, 0)
    t0 = time.perf_counter()
    if kind == "summability":
        plan = SequencePlan(epsilon=cfg.get_float("plan.epsilon", 1.0),
                            i_max=cfg.get_int("plan.i_max", 16),
                            m_base=cfg.get_float("plan.m_base", 2.0))
        cfg.ensure_fully_consumed()
        report = summability_test(model, plan, nsamples_per_term=nsamples,
                                  rng=rng, method=method)
    elif kind == "tail":
        epsilon = cfg.get_float("criterion.epsilon", 0.5)
        eps_prime = cfg.get_float("criterion.eps_prime", 0.25)
        x0 = cfg.get_float("criterion.x0", 100.0)
        t_grid = cfg.get_float_list("criterion.t_grid",
                                    [2.0**-k for k in range(8, 1, -1)])
        x_grid = cfg.get_float_list("criterion.x_grid", [1e2, 1e3, 1e4])
        cfg.ensure_fully_consumed()
        report = tail_criterion_test(model, epsilon, eps_prime, x0, t_grid, x_grid,
                                     nsamples=nsamples, rng=rng, method=method)
    else:
        raise ConfigError(f"unknown criterion kind {kind!r}; expected summability or tail",
                          "criterion.kind")
    (out / "criterion_report.txt").write_text(report.to_text())
    header, rows = report.table()
    write_csv(out / "criterion_terms.csv", header, rows)
    print(f"{report.kind}: {report.verdict} ({report.method})")
    write_manifest(out, "criterion", seed, cfg.items(),
                   ["criterion_report.txt", "criterion_terms.csv"],
                   metrics={"events": len(rows),
                            "wall_clock_s": round(time.perf_counter() - t0, 3)})
    return 0


def _phase_config(cfg: Config) -> PhaseConfig:
    base = PhaseConfig()
    return PhaseConfig(
        moment_t_grid=tuple(cfg.get_float_list("classify.moment_t_grid",
                                               list(base.moment_t_grid))),
        tail_t_grid=tuple(cfg.get_float_list("classify.tail_t_grid",
                                             list(base.tail_t_grid))),
        epsilon=cfg.get_float("classify.epsilon", base.epsilon),
        eps_prime=cfg.get_float("classify.eps_prime", base.eps_prime),
        x0=cfg.get_float("classify.x0", base.x0),
        x_grid=tuple(cfg.get_float_list("classify.x_grid", list(base.x_grid))),
        nsamples=cfg.get_int("classify.nsamples", base.nsamples),
        moment_nsamples=cfg.get_int("classify.moment_nsamples", base.moment_nsamples),
        method=cfg.get_str("classify.method", base.method),
        scale=cfg.get_float("classify.scale", base.scale),
    )


def _require_linear(cfg: Config) -> None:
    kind = cfg.get_str("model.fitness.kind", "linear")
    if kind != "linear":
        raise ConfigError("phase classification applies to linear fitness only",
                          "model.fitness.kind")


def cmd_classify(args) -> int:
    cfg, seed, out = _setup(args)
    _require_linear(cfg)
    weights = weight_spec_from_config(cfg)
    pcfg = _phase_config(cfg)
    cfg.ensure_fully_consumed()
    t0 = time.perf_counter()
    result = classify_phase(weights, pcfg, rng=substream(seed, 0))
    print(result.phase)
    items = [("phase", result.phase), ("rationale", result.rationale)]
    for i, mres in enumerate(result.evidence.get("moment", [])):
        items.append((f"moment.{i}.t", repr(mres.t)))
        items.append((f"moment.{i}.kind", mres.kind))
        items.append((f"moment.{i}.value", repr(mres.value)))
        items.append((f"moment.{i}.method", mres.method))
    _write_keyvalue(out / "classification.txt", items)
    outputs = ["classification.txt"]
    tail = result.evidence.get("tail")
    if tail is not None:
        header, rows = tail.table()
        write_csv(out / "tail_points.csv", header, rows)
        outputs.append("tail_points.csv")
    write_manifest(out, "classify", seed, cfg.items(), outputs,
                   metrics={"events": len(result.evidence.get("moment", [])),
                            "wall_clock_s": round(time.perf_counter() - t0, 3)})
    return 0


def _sweep_point(payload):
    (base_items, key, value, pcfg, seed, idx) = payload
    cfg = Config(dict(base_items))
    cfg.override(key, repr(value))
    weights = weight_spec_from_config(cfg)
    try:
        result = classify_phase(weights, pcfg, rng=substream(seed, 1, idx))
        return [value, result.phase, result.rationale]
    except ValueError as exc:
        return [value, "error", str(exc)]


def cmd_phase_sweep(args) -> int:
    cfg, seed, out = _setup(args)
    _require_linear(cfg)
    key = cfg.get_str("sweep.key")
    values = cfg.get_float_list("sweep.values")
    pcfg = _phase_config(cfg)
    base_items = [(k, v) for k, v in cfg.items()
                  if k.startswith("model.") and k != "model.kind"]
    for k, _ in base_items:
        cfg.get_str(k, "")
    cfg.ensure_fully_consumed()
    t0 = time.perf_counter()
    payloads = [(tuple(base_items), key, v, pcfg, seed, i) for i, v in enumerate(values)]
    if args.threads > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            rows = list(pool.map(_sweep_point, payloads))
    else:
        rows = [_sweep_point(p) for p in payloads]
    write_csv(out / "phase_diagram.csv", [key.replace("model.weight.", ""), "phase", "rationale"],
              [[r[0], r[1], '"' + r[2].replace('"', "'") + '"'] for r in rows])
    (out / "plot_phase_diagram.py").write_text(_PLOT_PHASE)
    write_manifest(out, "phase-sweep", seed, cfg.items(),
                   ["phase_diagram.csv", "plot_phase_diagram.py"],
                   metrics={"events": len(rows),
                            "wall_clock_s": round(time.perf_counter() - t0, 3)})
    return 0


def _witness_replicate(payload):
    (fitness, weights, plan, depth_target, seed, rep) = payload
    res = greedy_path_witness(fitness, weights, plan, depth_target, substream(seed, 2, rep))
    levels = [[rep, lvl + 1, plan.t(lvl + 1), int(res.candidates[lvl]),
               int(res.success_index[lvl]), int(res.fanout[lvl]), res.time_used[lvl]]
              for lvl in range(depth_target)]
    return [rep, res.depth, res.elapsed], levels


def cmd_witness(args) -> int:
    cfg, seed, out = _setup(args)
    fitness = fitness_spec_from_config(cfg)
    weights = weight_spec_from_config(cfg)
    depth_target = cfg.get_int("witness.depth_target", 10)
    plan = SequencePlan(
        epsilon=cfg.get_float("plan.epsilon", 1.0),
        i_max=max(depth_target, cfg.get_int("plan.i_max", depth_target)),
        m_base=cfg.get_float("plan.m_base", 2.0),
        candidate_base=(cfg.get_float("plan.candidate_base", 0.0) or None),
    )
    nrep = _replicates(args, cfg, 200)
    cfg.ensure_fully_consumed()
    t0 = time.perf_counter()
    budget = plan.time_budget(depth_target)
    payloads = [(fitness, weights, plan, depth_target, seed, rep) for rep in range(nrep)]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_witness_replicate, payloads))
    else:
        results = [_witness_replicate(p) for p in payloads]
    rows = [r for r, _ in results]
    level_rows = [lr for _, lvls in results for lr in lvls]
    write_csv(out / "witness.csv", ["replicate", "depth", "elapsed", "budget"],
              [[r[0], r[1], r[2], budget] for r in rows])
    write_csv(out / "witness_levels.csv",
              ["replicate", "level", "t_budget", "candidates", "success_index",
               "fanout", "time_used"], level_rows)
    depths = [r[1] for r in rows]
    print(f"witness: {nrep} replicates, depth_target={depth_target}, "
          f"max depth {max(depths)}, mean depth {sum(depths) / len(depths):.3g}")
    write_manifest(out, "witness", seed, cfg.items(),
                   ["witness.csv", "witness_levels.csv"],
                   metrics={"events": nrep,
                            "wall_clock_s": round(time.perf_counter() - t0, 3)})
    return 0


_HANDLERS = {
    "tree-grow": cmd_tree_grow,
    "cmj-run": cmd_cmj_run,
    "birth-moments": cmd_birth_moments,
    "criterion": cmd_criterion,
    "classify": cmd_classify,
    "phase-sweep": cmd_phase_sweep,
    "witness": cmd_witness,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


_PLOT_TREE = """\
#!/usr/bin/env python3
\"\"\"Plot degree histogram (log-log) and truncated edge mass for a tree-grow run.\"\"\"
import csv
import matplotlib.pyplot as plt

ks, counts = [], []
with open("degree_histogram.csv") as fh:
    for row in csv.DictReader(fh):
        ks.append(int(row["k"]))
        counts.append(int(row["count"]))
caps, mass = [], []
with open("edge_mass.csv") as fh:
    for row in csv.DictReader(fh):
        caps.append(int(row["k_cap"]))
        mass.append(float(row["edge_mass"]))

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
ax1.loglog([k for k in ks if k > 0], [c for k, c in zip(ks, counts) if k > 0], "o")
ax1.set_xlabel("out-degree k")
ax1.set_ylabel("N_k")
ax2.semilogx(caps, mass, "o-")
ax2.set_xlabel("degree cap K")
ax2.set_ylabel("truncated edge mass")
fig.tight_layout()
fig.savefig("tree_grow.png", dpi=150)
print("wrote tree_grow.png")
"""

_PLOT_TAU = """\
#!/usr/bin/env python3
\"\"\"Plot the population milestone curve tau_k against log k.\"\"\"
import csv
import math
import matplotlib.pyplot as plt

ks, taus = [], []
with open("tau.csv") as fh:
    for row in csv.DictReader(fh):
        ks.append(int(row["k"]))
        taus.append(float(row["tau_k"]))

fig, ax = plt.subplots(figsize=(6, 4))
ax.plot([math.log(k) for k in ks], taus, lw=1)
ax.set_xlabel("log k")
ax.set_ylabel("tau_k")
fig.tight_layout()
fig.savefig("tau_curve.png", dpi=150)
print("wrote tau_curve.png")
"""

_PLOT_PHASE = """\
#!/usr/bin/env python3
\"\"\"Plot the phase diagram produced by a phase-sweep run.\"\"\"
import csv
import matplotlib.pyplot as plt

xs, phases = [], []
with open("phase_diagram.csv") as fh:
    reader = csv.reader(fh)
    header = next(reader)
    for row in reader:
        xs.append(float(row[0]))
        phases.append(row[1])

order = sorted(set(phases))
ys = [order.index(p) for p in phases]
fig, ax = plt.subplots(figsize=(7, 3))
ax.scatter(xs, ys, c=ys, cmap="coolwarm")
ax.set_yticks(range(len(order)), order)
ax.set_xlabel(header[0])
fig.tight_layout()
fig.savefig("phase_diagram.png", dpi=150)
print("wrote phase_diagram.png")
"""


if __name__ == "__main__":
    sys.exit(main())
