"""Scenario configuration: a flat JSON document, schema version 1.

Example:

    {
      "schema_version": 1,
      "n": 5,
      "l": 0.85,
      "omega": 6.283185307179586,
      "initial_phases": {"generator": "uniform_random"},
      "seed": 42,
      "stop": {"max_events": 1000, "p_threshold": 1e-6}
    }

initial_phases is either an explicit list of n radians in [0, 2*pi) or a
generator object: {"generator": "uniform_random"} draws n distinct values
(exact duplicates are redrawn), {"generator": "all_equal", "value": v}
starts every oscillator at v, {"generator": "evenly_spaced"} starts at
k*2*pi/n. The seed is required so every archived trace is reproducible;
it feeds both the initial draw and any collision resets. stop is optional
and defaults to 200*n events with threshold 1e-6. Angles are radians
everywhere; there are no degrees in this schema.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .metrics import CONVERGENCE_EPS
from .phase import TWO_PI

SCHEMA_VERSION = 1
DEFAULT_EVENTS_PER_NODE = 200

_GENERATORS = ("uniform_random", "all_equal", "evenly_spaced")
_TOP_KEYS = {"schema_version", "n", "l", "omega", "initial_phases", "seed", "stop"}
_STOP_KEYS = {"max_events", "p_threshold"}


class ConfigError(ValueError):
    """Invalid configuration; errors lists (field_path, message) pairs."""

    def __init__(self, errors: list[tuple[str, str]]):
        self.errors = list(errors)
        super().__init__("; ".join(f"{path}: {msg}" for path, msg in self.errors))


@dataclass(frozen=True)
class StopCondition:
    """Stop after max_events, or once the index holds at or below
    p_threshold for n consecutive events, whichever comes first. A None
    threshold disables the convergence stop."""

    max_events: int
    p_threshold: float | None = CONVERGENCE_EPS

    def __post_init__(self) -> None:
        if not isinstance(self.max_events, int) or self.max_events < 0:
            raise ValueError(f"max_events must be an integer >= 0, got {self.max_events!r}")
        if self.p_threshold is not None and not (
            math.isfinite(self.p_threshold) and self.p_threshold > 0.0
        ):
            raise ValueError(f"p_threshold must be > 0 or None, got {self.p_threshold!r}")


@dataclass(frozen=True)
class PhaseGenerator:
    name: str
    value: float | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    n: int
    l: float
    omega: float
    initial_phases: tuple[float, ...] | PhaseGenerator
    seed: int
    stop: StopCondition


def default_stop(n: int, p_threshold: float | None = CONVERGENCE_EPS) -> StopCondition:
    return StopCondition(max_events=DEFAULT_EVENTS_PER_NODE * n, p_threshold=p_threshold)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_real(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a scenario document.

    Every rejection carries the offending field path; all violations are
    collected before raising, not just the first.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([("$", f"not valid JSON: {exc}")]) from exc
    if not isinstance(doc, dict):
        raise ConfigError([("$", "top level must be an object")])

    errors: list[tuple[str, str]] = []

    for key in sorted(set(doc) - _TOP_KEYS):
        errors.append((key, "unknown field"))
    for key in ("schema_version", "n", "l", "omega", "initial_phases", "seed"):
        if key not in doc:
            errors.append((key, "missing required field"))

    if "schema_version" in doc and doc["schema_version"] != SCHEMA_VERSION:
        errors.append(("schema_version", f"expected {SCHEMA_VERSION}, got {doc['schema_version']!r}"))

    n = doc.get("n")
    if "n" in doc and (not _is_int(n) or n < 2):
        errors.append(("n", f"must be an integer >= 2, got {n!r}"))
        n = None

    if "l" in doc:
        l = doc["l"]
        if not _is_real(l) or not (0.0 < l < 1.0):
            errors.append(("l", f"must be a real in the open interval (0, 1), got {l!r}"))

    if "omega" in doc:
        omega = doc["omega"]
        if not _is_real(omega) or omega <= 0.0:
            errors.append(("omega", f"must be a real > 0, got {omega!r}"))

    if "seed" in doc and not _is_int(doc["seed"]):
        errors.append(("seed", f"must be an integer, got {doc['seed']!r}"))

    initial = None
    if "initial_phases" in doc:
        initial = _parse_initial(doc["initial_phases"], n, errors)

    stop = _parse_stop(doc.get("stop"), n, errors)

    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(
        n=doc["n"],
        l=float(doc["l"]),
        omega=float(doc["omega"]),
        initial_phases=initial,
        seed=doc["seed"],
        stop=stop,
    )


def _parse_initial(raw, n, errors):
    path = "initial_phases"
    if isinstance(raw, list):
        if n is not None and len(raw) != n:
            errors.append((path, f"expected {n} phases, got {len(raw)}"))
            return None
        values = []
        for i, v in enumerate(raw):
            if not _is_real(v) or not (0.0 <= v < TWO_PI):
                errors.append((f"{path}[{i}]", f"must be a real in [0, 2*pi), got {v!r}"))
                return None
            values.append(float(v))
        return tuple(values)
    if isinstance(raw, dict):
        for key in sorted(set(raw) - {"generator", "value"}):
            errors.append((f"{path}.{key}", "unknown field"))
        name = raw.get("generator")
        if name not in _GENERATORS:
            errors.append((f"{path}.generator", f"must be one of {_GENERATORS}, got {name!r}"))
            return None
        if name == "all_equal":
            value = raw.get("value")
            if not _is_real(value) or not (0.0 <= value < TWO_PI):
                errors.append((f"{path}.value", f"must be a real in [0, 2*pi), got {value!r}"))
                return None
            return PhaseGenerator(name="all_equal", value=float(value))
        if "value" in raw:
            errors.append((f"{path}.value", f"not accepted by generator {name!r}"))
            return None
        return PhaseGenerator(name=name)
    errors.append((path, f"must be a list of phases or a generator object, got {type(raw).__name__}"))
    return None


def _parse_stop(raw, n, errors):
    fallback_events = DEFAULT_EVENTS_PER_NODE * n if n is not None else 0
    if raw is None:
        return StopCondition(max_events=fallback_events)
    if not isinstance(raw, dict):
        errors.append(("stop", f"must be an object, got {type(raw).__name__}"))
        return StopCondition(max_events=fallback_events)
    for key in sorted(set(raw) - _STOP_KEYS):
        errors.append((f"stop.{key}", "unknown field"))
    max_events = raw.get("max_events", fallback_events)
    if not _is_int(max_events) or max_events < 0:
        errors.append(("stop.max_events", f"must be an integer >= 0, got {max_events!r}"))
        max_events = fallback_events
    p_threshold = raw.get("p_threshold", CONVERGENCE_EPS)
    if p_threshold is not None and (not _is_real(p_threshold) or p_threshold <= 0.0):
        errors.append(("stop.p_threshold", f"must be a real > 0 or null, got {p_threshold!r}"))
        p_threshold = CONVERGENCE_EPS
    return StopCondition(max_events=max_events, p_threshold=p_threshold)


def load_config(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())


def realize_initial_phases(config: ScenarioConfig, rng) -> list[float]:
    """Initial phase vector for a run; draws come from the run's rng."""
    spec = config.initial_phases
    if isinstance(spec, PhaseGenerator):
        if spec.name == "uniform_random":
            seen: set[float] = set()
            values = []
            for _ in range(config.n):
                v = rng.random() * TWO_PI
                while v in seen:  # keep the draw duplicate-free
                    v = rng.random() * TWO_PI
                seen.add(v)
                values.append(v)
            return values
        if spec.name == "all_equal":
            return [spec.value] * config.n
        if spec.name == "evenly_spaced":
            return [k * TWO_PI / config.n for k in range(config.n)]
        raise ValueError(f"unknown generator {spec.name!r}")
    return list(spec)
