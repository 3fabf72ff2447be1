"""Parameter sweeps: one independent run per (n, l, seed) grid cell.

The sweep document is flat JSON, schema version 1:

    {
      "schema_version": 1,
      "n_values": [3, 5, 8],
      "l_values": [0.1, 0.5, 0.85],
      "seeds": [0, 1, 2],
      "omega": 6.283185307179586,
      "stop": {"max_events": null, "p_threshold": 1e-6}
    }

omega and stop are optional. A null or missing stop.max_events gives each
cell the default budget of 200*n events (small l at larger n needs more;
set max_events explicitly there). Cells draw distinct uniform-random
initial phases from their seed. A failing cell is recorded in the summary
and does not abort the sweep. Output files are named by (n, l, seed) so
re-runs are idempotent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .metrics import CONVERGENCE_EPS
from .phase import TWO_PI
from .runner import run_scenario
from .scenario import (
    ConfigError,
    DEFAULT_EVENTS_PER_NODE,
    PhaseGenerator,
    SCHEMA_VERSION,
    ScenarioConfig,
    StopCondition,
    _is_int,
    _is_real,
)
from .trace import trace_extension, write_trace

_TOP_KEYS = {"schema_version", "n_values", "l_values", "seeds", "omega", "stop"}

SUMMARY_COLUMNS = ("n", "l", "seed", "events_to_converge", "final_p", "converged", "error")


@dataclass(frozen=True)
class SweepSpec:
    n_values: tuple[int, ...]
    l_values: tuple[float, ...]
    seeds: tuple[int, ...]
    omega: float = TWO_PI
    max_events: int | None = None  # None: 200*n per cell
    p_threshold: float | None = CONVERGENCE_EPS

    def cells(self):
        for n in self.n_values:
            for l in self.l_values:
                for seed in self.seeds:
                    yield n, l, seed

    def cell_config(self, n: int, l: float, seed: int) -> ScenarioConfig:
        budget = self.max_events if self.max_events is not None else DEFAULT_EVENTS_PER_NODE * n
        return ScenarioConfig(
            n=n,
            l=l,
            omega=self.omega,
            initial_phases=PhaseGenerator(name="uniform_random"),
            seed=seed,
            stop=StopCondition(max_events=budget, p_threshold=self.p_threshold),
        )


@dataclass
class CellResult:
    n: int
    l: float
    seed: int
    converged: bool
    events: int
    final_p: float | None
    error: str | None
    trace_path: str | None


def parse_sweep(text: str) -> SweepSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([("$", f"not valid JSON: {exc}")]) from exc
    if not isinstance(doc, dict):
        raise ConfigError([("$", "top level must be an object")])
    errors: list[tuple[str, str]] = []
    for key in sorted(set(doc) - _TOP_KEYS):
        errors.append((key, "unknown field"))
    for key in ("schema_version", "n_values", "l_values", "seeds"):
        if key not in doc:
            errors.append((key, "missing required field"))
    if "schema_version" in doc and doc["schema_version"] != SCHEMA_VERSION:
        errors.append(("schema_version", f"expected {SCHEMA_VERSION}, got {doc['schema_version']!r}"))

    def int_list(key, minimum):
        raw = doc.get(key)
        if key not in doc:
            return ()
        if not isinstance(raw, list) or not raw:
            errors.append((key, "must be a nonempty list"))
            return ()
        for i, v in enumerate(raw):
            if not _is_int(v) or v < minimum:
                errors.append((f"{key}[{i}]", f"must be an integer >= {minimum}, got {v!r}"))
                return ()
        return tuple(raw)

    n_values = int_list("n_values", 2)
    seeds = ()
    if "seeds" in doc:
        raw = doc["seeds"]
        if not isinstance(raw, list) or not raw or not all(_is_int(v) for v in raw):
            errors.append(("seeds", "must be a nonempty list of integers"))
        else:
            seeds = tuple(raw)
    l_values = ()
    if "l_values" in doc:
        raw = doc["l_values"]
        if not isinstance(raw, list) or not raw:
            errors.append(("l_values", "must be a nonempty list"))
        else:
            bad = [
                (i, v) for i, v in enumerate(raw)
                if not _is_real(v) or not (0.0 < v < 1.0)
            ]
            if bad:
                i, v = bad[0]
                errors.append((f"l_values[{i}]", f"must be a real in (0, 1), got {v!r}"))
            else:
                l_values = tuple(float(v) for v in raw)

    omega = doc.get("omega", TWO_PI)
    if not _is_real(omega) or omega <= 0.0:
        errors.append(("omega", f"must be a real > 0, got {omega!r}"))
        omega = TWO_PI

    max_events = None
    p_threshold = CONVERGENCE_EPS
    stop = doc.get("stop")
    if stop is not None:
        if not isinstance(stop, dict):
            errors.append(("stop", "must be an object"))
        else:
            for key in sorted(set(stop) - {"max_events", "p_threshold"}):
                errors.append((f"stop.{key}", "unknown field"))
            max_events = stop.get("max_events")
            if max_events is not None and (not _is_int(max_events) or max_events < 0):
                errors.append(("stop.max_events", f"must be an integer >= 0 or null, got {max_events!r}"))
                max_events = None
            p_threshold = stop.get("p_threshold", CONVERGENCE_EPS)
            if p_threshold is not None and (not _is_real(p_threshold) or p_threshold <= 0.0):
                errors.append(("stop.p_threshold", f"must be a real > 0 or null, got {p_threshold!r}"))
                p_threshold = CONVERGENCE_EPS

    if errors:
        raise ConfigError(errors)
    return SweepSpec(
        n_values=n_values,
        l_values=l_values,
        seeds=seeds,
        omega=float(omega),
        max_events=max_events,
        p_threshold=p_threshold,
    )


def load_sweep(path) -> SweepSpec:
    with open(path, "r", encoding="utf-8") as f:
        return parse_sweep(f.read())


def cell_trace_name(n: int, l: float, seed: int, fmt: str) -> str:
    return f"trace_n{n}_l{l:g}_seed{seed}.{trace_extension(fmt)}"


def run_sweep(spec: SweepSpec, out_dir, fmt: str = "table") -> list[CellResult]:
    """Run every cell, write one trace per cell plus summary.csv.

    Cells are independent (each owns its rng and output file); a cell
    failure is recorded and the sweep moves on.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = []
    for n, l, seed in spec.cells():
        try:
            run = run_scenario(spec.cell_config(n, l, seed))
            trace_path = out / cell_trace_name(n, l, seed, fmt)
            with open(trace_path, "w", encoding="utf-8") as f:
                write_trace(run.records, f, fmt=fmt, n=n)
            results.append(
                CellResult(
                    n=n, l=l, seed=seed,
                    converged=run.converged,
                    events=run.event_count,
                    final_p=run.final_p,
                    error=None,
                    trace_path=str(trace_path),
                )
            )
        except Exception as exc:  # cell isolation: record, keep sweeping
            results.append(
                CellResult(
                    n=n, l=l, seed=seed,
                    converged=False, events=0, final_p=None,
                    error=f"{type(exc).__name__}: {exc}",
                    trace_path=None,
                )
            )
    _write_summary(results, out / "summary.csv")
    return results


def _write_summary(results: list[CellResult], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(",".join(SUMMARY_COLUMNS) + "\n")
        for r in results:
            f.write(
                ",".join(
                    [
                        str(r.n),
                        format(r.l, "g"),
                        str(r.seed),
                        str(r.events) if r.converged else "",
                        "" if r.final_p is None else format(r.final_p, ".17g"),
                        "yes" if r.converged else "no",
                        r.error or "",
                    ]
                )
                + "\n"
            )
