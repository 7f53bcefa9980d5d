"""Plain-text key-value configuration (dotted sections).

Format: one ``key=value`` per line; blank lines and lines starting with
``#`` are ignored. Keys are dotted paths, e.g.::

    model.fitness.kind=linear
    model.weight.kind=pair
    model.weight.coupling=u-zero
    model.weight.v.kind=exponential
    model.weight.v.rate=1.0
    run.n=100000

Model keys are documented in the README; a typo in a referenced key is a
config error carrying the offending key path.
"""
from __future__ import annotations

from pathlib import Path

from .fitness import Linear, Tabulated, FitnessSpec, TAIL_RULES
from .weights import (
    COUPLINGS,
    Exponential,
    LogParetoTail,
    PairSpec,
    Pareto,
    PointMass,
    ScalarSpec,
    Uniform,
    WeightSpec,
)

__all__ = ["ConfigError", "Config", "parse_config_text", "load_config",
           "weight_spec_from_config", "fitness_spec_from_config",
           "weight_spec_to_items", "fitness_spec_to_items"]

_MISSING = object()


class ConfigError(Exception):
    def __init__(self, message: str, key: str | None = None):
        self.key = key
        super().__init__(message if key is None else f"{key}: {message}")


def parse_config_text(text: str) -> dict[str, str]:
    data: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in data:
            raise ConfigError("duplicate key", key)
        data[key] = value
    return data


def load_config(path) -> "Config":
    return Config(parse_config_text(Path(path).read_text()))


class Config:
    """Key-value store tracking consumption, so stray keys can be rejected."""

    def __init__(self, data: dict[str, str] | None = None):
        self._data = dict(data or {})
        self._used: set[str] = set()

    def override(self, key: str, value: str) -> None:
        self._data[key] = value

    def has(self, key: str) -> bool:
        return key in self._data

    def _raw(self, key: str, default):
        self._used.add(key)
        if key in self._data:
            return self._data[key]
        if default is _MISSING:
            raise ConfigError("required key missing", key)
        return default

    def get_str(self, key: str, default=_MISSING) -> str:
        return self._raw(key, default)

    def get_float(self, key: str, default=_MISSING) -> float:
        v = self._raw(key, default)
        if isinstance(v, str):
            try:
                return float(v)
            except ValueError:
                raise ConfigError(f"not a number: {v!r}", key) from None
        return v

    def get_int(self, key: str, default=_MISSING) -> int:
        v = self._raw(key, default)
        if isinstance(v, str):
            try:
                return int(v)
            except ValueError:
                raise ConfigError(f"not an integer: {v!r}", key) from None
        return v

    def get_float_list(self, key: str, default=_MISSING) -> list[float]:
        v = self._raw(key, default)
        if isinstance(v, str):
            if not v:
                return []
            try:
                return [float(part) for part in v.split(",")]
            except ValueError:
                raise ConfigError(f"not a comma-separated number list: {v!r}", key) from None
        return list(v)

    def keys_under(self, prefix: str) -> list[str]:
        return sorted(k for k in self._data if k.startswith(prefix))

    def unused_keys(self) -> list[str]:
        return sorted(k for k in self._data if k not in self._used)

    def ensure_fully_consumed(self) -> None:
        stray = self.unused_keys()
        if stray:
            raise ConfigError("unknown key (not used by this command)", stray[0])

    def items(self):
        return sorted(self._data.items())


_SCALAR_KINDS = ("pointmass", "exponential", "uniform", "pareto", "logpareto")


def _scalar_from_config(cfg: Config, prefix: str) -> ScalarSpec:
    kind = cfg.get_str(prefix + "kind")
    try:
        if kind == "pointmass":
            return PointMass(cfg.get_float(prefix + "value"))
        if kind == "exponential":
            return Exponential(cfg.get_float(prefix + "rate"))
        if kind == "uniform":
            return Uniform(cfg.get_float(prefix + "lo"), cfg.get_float(prefix + "hi"))
        if kind == "pareto":
            return Pareto(cfg.get_float(prefix + "alpha"), cfg.get_float(prefix + "xmin"))
        if kind == "logpareto":
            return LogParetoTail(cfg.get_float(prefix + "nu"), cfg.get_float(prefix + "x0"))
    except ValueError as exc:
        raise ConfigError(str(exc), prefix + "kind") from exc
    raise ConfigError(f"unknown weight kind {kind!r}; expected one of "
                      f"{_SCALAR_KINDS + ('pair',)}", prefix + "kind")


def weight_spec_from_config(cfg: Config, prefix: str = "model.weight.") -> WeightSpec:
    kind = cfg.get_str(prefix + "kind")
    if kind != "pair":
        return _scalar_from_config(cfg, prefix)
    coupling = cfg.get_str(prefix + "coupling")
    if coupling not in COUPLINGS:
        raise ConfigError(f"unknown coupling {coupling!r}; expected one of {COUPLINGS}",
                          prefix + "coupling")
    v_spec = _scalar_from_config(cfg, prefix + "v.")
    u_spec = None
    if coupling == "independent":
        u_spec = _scalar_from_config(cfg, prefix + "u.")
    try:
        return PairSpec(coupling=coupling, v_spec=v_spec, u_spec=u_spec)
    except ValueError as exc:
        raise ConfigError(str(exc), prefix + "coupling") from exc


def fitness_spec_from_config(cfg: Config, prefix: str = "model.fitness.") -> FitnessSpec:
    kind = cfg.get_str(prefix + "kind", "linear")
    if kind == "linear":
        return Linear()
    if kind == "tabulated":
        rates = cfg.get_float_list(prefix + "rates")
        tail = cfg.get_str(prefix + "tail", "zero-after-end")
        if tail not in TAIL_RULES:
            raise ConfigError(f"unknown tail rule {tail!r}; expected one of {TAIL_RULES}",
                              prefix + "tail")
        try:
            return Tabulated(tuple(rates), tail)
        except ValueError as exc:
            raise ConfigError(str(exc), prefix + "rates") from exc
    raise ConfigError(f"unknown fitness kind {kind!r}; expected linear or tabulated",
                      prefix + "kind")


def _scalar_to_items(spec: ScalarSpec, prefix: str) -> list[tuple[str, str]]:
    if isinstance(spec, PointMass):
        return [(prefix + "kind", "pointmass"), (prefix + "value", repr(spec.value))]
    if isinstance(spec, Exponential):
        return [(prefix + "kind", "exponential"), (prefix + "rate", repr(spec.rate))]
    if isinstance(spec, Uniform):
        return [(prefix + "kind", "uniform"), (prefix + "lo", repr(spec.lo)),
                (prefix + "hi", repr(spec.hi))]
    if isinstance(spec, Pareto):
        return [(prefix + "kind", "pareto"), (prefix + "alpha", repr(spec.alpha)),
                (prefix + "xmin", repr(spec.xmin))]
    if isinstance(spec, LogParetoTail):
        return [(prefix + "kind", "logpareto"), (prefix + "nu", repr(spec.nu)),
                (prefix + "x0", repr(spec.x0))]
    raise TypeError(f"not a scalar weight spec: {spec!r}")


def weight_spec_to_items(spec: WeightSpec, prefix: str = "model.weight.") -> list[tuple[str, str]]:
    """Round-trippable key-value form (used for manifests and sweeps)."""
    if isinstance(spec, PairSpec):
        items = [(prefix + "kind", "pair"), (prefix + "coupling", spec.coupling)]
        if spec.u_spec is not None:
            items += _scalar_to_items(spec.u_spec, prefix + "u.")
        items += _scalar_to_items(spec.v_spec, prefix + "v.")
        return items
    return _scalar_to_items(spec, prefix)


def fitness_spec_to_items(spec: FitnessSpec, prefix: str = "model.fitness.") -> list[tuple[str, str]]:
    if isinstance(spec, Linear):
        return [(prefix + "kind", "linear")]
    return [(prefix + "kind", "tabulated"),
            (prefix + "rates", ",".join(repr(r) for r in spec.rates)),
            (prefix + "tail", spec.tail)]
