"""Property verification across seeded run corpora.

Two layers. Function-level checks fuzz the response map directly:
interval containment, monotonicity, boundary continuity, geometric
contraction, and invariance of the index under common-rate advances.
Corpus checks drive full seeded runs over a grid of network sizes and
coupling strengths and test, event by event: the firing order stays a
fixed cyclic rotation, phases never overtake, gaps sum to a full turn,
the measured index change matches its closed form, the index never
increases, silent streaks stay short of a full round, traces replay
bit-identically, and the impossible case combination never appears.

Every check is deterministic for a given base seed. A report carries one
result per property with counterexample context on failure.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .engine import InvariantViolation, PulseKind, NetworkState, advance, time_to_next_fire
from .metrics import (
    classify_pulse,
    desync_index_of,
    event_before_phases,
    firing_order,
    predict_index_change,
    silent_run_length,
)
from .phase import TWO_PI, PrcConfig, apply_prc, prc_response
from .runner import run_scenario
from .scenario import PhaseGenerator, ScenarioConfig, default_stop

GRID_N = (2, 3, 5, 8)
GRID_L = (0.1, 0.5, 0.85, 0.99)

#: Tolerances, pinned: oracle equality, monotone slack, gap-sum closure,
#: contraction (relative plus the double-precision noise floor).
ORACLE_TOL = 1e-9
MONOTONE_SLACK = 1e-12
DELTA_SUM_TOL = 1e-9
ADVANCE_TOL = 1e-12
CONTRACTION_RTOL = 1e-12
CONTRACTION_FLOOR = 1e-13


def sign_flipped_response(phi: float, cfg: PrcConfig) -> float:
    """Test-only negative control: the response with its sign reversed.

    Pushes listeners away from the slot instead of toward it; the property
    suite must notice (a listener eventually wraps backwards past zero and
    fires out of turn).
    """
    if phi < cfg.slot:
        return (1.0 + cfg.l) * phi - cfg.l * cfg.slot
    return phi


@dataclass
class PropertyResult:
    name: str
    description: str
    checked: int
    failures: list[str]
    stats: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "passed": self.passed,
            "checked": self.checked,
            "failures": self.failures,
            "stats": self.stats,
        }


class _Check:
    """Counts assertions for one property, keeping the first counterexamples."""

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description
        self.checked = 0
        self.failures: list[str] = []
        self.stats: dict[str, float] = {}

    def record(self, ok: bool, context: str = "") -> None:
        self.checked += 1
        if not ok and len(self.failures) < 5:
            self.failures.append(context)

    def track_max(self, key: str, value: float) -> None:
        if key not in self.stats or value > self.stats[key]:
            self.stats[key] = value

    def result(self) -> PropertyResult:
        return PropertyResult(
            name=self.name,
            description=self.description,
            checked=self.checked,
            failures=self.failures,
            stats=self.stats,
        )


@dataclass
class VerifyReport:
    total_runs: int
    base_seed: int
    grid: list[tuple[int, float]]
    properties: list[PropertyResult]
    case_counts: dict[str, int]
    convergence: dict[str, dict]

    @property
    def all_passed(self) -> bool:
        return all(p.passed for p in self.properties)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "total_runs": self.total_runs,
            "base_seed": self.base_seed,
            "grid": [{"n": n, "l": l} for n, l in self.grid],
            "all_passed": self.all_passed,
            "case_counts": self.case_counts,
            "convergence": self.convergence,
            "properties": [p.to_dict() for p in self.properties],
        }

    def render_text(self) -> str:
        lines = []
        width = max(len(p.name) for p in self.properties)
        for p in self.properties:
            mark = "PASS" if p.passed else "FAIL"
            lines.append(f"{p.name:<{width}}  {mark}  ({p.checked} checks)")
            for failure in p.failures:
                lines.append(f"{'':<{width}}        counterexample: {failure}")
        lines.append(
            "pulse kinds observed: "
            + ", ".join(f"{k}={v}" for k, v in sorted(self.case_counts.items()))
        )
        verdict = "all properties passed" if self.all_passed else "PROPERTY FAILURES"
        lines.append(f"{self.total_runs} runs over {len(self.grid)} grid cells: {verdict}")
        return "\n".join(lines)


def _fuzz_phases(rng: random.Random, n: int) -> list[float]:
    seen: set[float] = set()
    out = []
    for _ in range(n):
        v = rng.random() * TWO_PI
        while v in seen:
            v = rng.random() * TWO_PI
        seen.add(v)
        out.append(v)
    return out


def _check_response_functions(checks: dict[str, _Check], base_seed: int) -> None:
    rng = random.Random(base_seed ^ 0x5EED5EED)
    interval = checks["prc-interval-contraction"]
    monotone = checks["prc-monotone"]
    continuity = checks["prc-boundary-continuity"]
    contraction = checks["prc-geometric-contraction"]

    for l in GRID_L:
        for n in GRID_N:
            cfg = PrcConfig(n, l)
            slot = cfg.slot
            # Fuzz stops 1e-9*slot short of the boundary: in the last few
            # ulps double rounding can stall a step or land on the slot.
            hi = slot * (1.0 - 1e-9)
            for _ in range(300):
                phi = rng.random() * hi
                out = apply_prc(phi, cfg)
                interval.record(
                    phi < out < slot,
                    f"n={n} l={l} phi={phi!r} -> {out!r}",
                )
            for _ in range(100):
                phi = slot + rng.random() * (TWO_PI - slot)
                interval.record(
                    apply_prc(phi, cfg) == phi,
                    f"identity branch moved n={n} l={l} phi={phi!r}",
                )
            for _ in range(300):
                a = rng.random() * hi
                b = rng.random() * hi
                a, b = min(a, b), max(a, b)
                if b - a < 1e-9:  # strictness needs a rounding-resolvable gap
                    continue
                monotone.record(
                    apply_prc(a, cfg) < apply_prc(b, cfg),
                    f"n={n} l={l} {a!r} < {b!r} not preserved",
                )
            continuity.record(prc_response(slot, cfg) == 0.0, f"n={n} l={l} at slot")
            continuity.record(apply_prc(slot, cfg) == slot, f"n={n} l={l} at slot")
            eps_in = slot * 1e-12
            continuity.record(
                prc_response(slot - eps_in, cfg) <= l * eps_in * 1.01,
                f"n={n} l={l} below slot",
            )
            for _ in range(20):
                phi0 = rng.random() * hi
                d0 = slot - phi0
                phi = phi0
                for k in range(1, 51):
                    phi = apply_prc(phi, cfg)
                    predicted = (1.0 - l) ** k * d0
                    measured = abs(phi - slot)
                    err = abs(measured - predicted)
                    tol = CONTRACTION_RTOL * predicted + CONTRACTION_FLOOR
                    contraction.record(
                        err <= tol,
                        f"n={n} l={l} phi0={phi0!r} k={k} err={err:.3e}",
                    )
                    contraction.track_max("max_abs_error", err)


def _check_advance_invariance(check: _Check, base_seed: int) -> None:
    rng = random.Random(base_seed ^ 0x0ADEADCE)
    for n in GRID_N:
        cfg = PrcConfig(n, 0.85)
        for _ in range(50):
            phases = _fuzz_phases(rng, n)
            state = NetworkState(
                time=0.0, omega=TWO_PI, phases=phases, prc=cfg, rng=random.Random(0)
            )
            p0 = desync_index_of(state.phases, cfg)
            moved = advance(state, time_to_next_fire(state) * rng.random())
            p1 = desync_index_of(moved.phases, cfg)
            check.record(
                abs(p1 - p0) <= ADVANCE_TOL,
                f"n={n} drift {abs(p1 - p0):.3e}",
            )
            check.track_max("max_drift", abs(p1 - p0))


def _corpus_configs(total_runs: int, base_seed: int):
    grid = [(n, l) for n in GRID_N for l in GRID_L]
    for i in range(total_runs):
        n, l = grid[i % len(grid)]
        yield ScenarioConfig(
            n=n,
            l=l,
            omega=TWO_PI,
            initial_phases=PhaseGenerator(name="uniform_random"),
            seed=base_seed + i,
            stop=default_stop(n),
        )


def verify_corpus(
    total_runs: int = 1000,
    *,
    base_seed: int = 0,
    response=None,
    rerun_every: int = 97,
) -> VerifyReport:
    """Run the full property suite and return its report.

    total_runs seeded runs are spread round-robin over the n/l grid, each
    with distinct uniform-random initial phases and the default stop
    budget. response overrides the pulse response (negative controls).
    """
    checks = {
        name: _Check(name, desc)
        for name, desc in [
            ("prc-interval-contraction", "response maps [0, slot) strictly into (phi, slot) and is identity above"),
            ("prc-monotone", "response preserves strict phase order inside the effective interval"),
            ("prc-boundary-continuity", "both response branches vanish at the slot boundary"),
            ("prc-geometric-contraction", "distance to the slot shrinks by exactly (1-l) per application"),
            ("state-index-advance-invariant", "common-rate advance leaves the index unchanged"),
            ("run-times-strictly-increasing", "event times strictly increase within a run"),
            ("run-firing-order-cyclic", "firer sequence is a fixed cyclic rotation of the initial order"),
            ("run-no-overtake", "descending phase order is preserved across every event"),
            ("run-listener-below-wrap", "no pulse response lands a listener on the wrap point"),
            ("run-delta-sum", "neighbor gaps sum to a full turn at every event"),
            ("run-index-change-oracle", "measured index change equals its closed form"),
            ("run-no-fourth-case", "the impossible trailing-gap combination never appears"),
            ("run-monotone-index", "index never increases; cases 1 and 2 strictly decrease it"),
            ("run-silent-bound", "no full round of silent pulses before desynchronization"),
            ("run-determinism", "identical seed and config replay bit-identical traces"),
            ("coverage-case-kinds", "all of case 1, case 2, case 3 and silent appear over the grid"),
        ]
    }

    if response is None:
        _check_response_functions(checks, base_seed)
        _check_advance_invariance(checks["state-index-advance-invariant"], base_seed)

    case_counts = {"case1": 0, "case2": 0, "case3": 0, "silent": 0, "collision": 0}
    convergence: dict[str, dict] = {}
    grid = [(n, l) for n in GRID_N for l in GRID_L]

    for config in _corpus_configs(total_runs, base_seed):
        result = run_scenario(config, response=response)
        _check_run(checks, config, result, case_counts)
        key = f"n={config.n},l={config.l}"
        cell = convergence.setdefault(key, {"runs": 0, "converged": 0, "max_events": 0})
        cell["runs"] += 1
        cell["converged"] += 1 if result.converged else 0
        cell["max_events"] = max(cell["max_events"], result.event_count)
        if config.seed % rerun_every == 0:
            replay = run_scenario(config, response=response)
            checks["run-determinism"].record(
                replay.records == result.records,
                f"seed={config.seed} n={config.n} l={config.l} records differ",
            )

    coverage = checks["coverage-case-kinds"]
    for kind in ("case1", "case2", "case3", "silent"):
        coverage.record(case_counts[kind] > 0, f"{kind} never observed")

    return VerifyReport(
        total_runs=total_runs,
        base_seed=base_seed,
        grid=grid,
        properties=[c.result() for c in checks.values()],
        case_counts=case_counts,
        convergence=convergence,
    )


def _check_run(checks, config, result, case_counts) -> None:
    cfg = PrcConfig(config.n, config.l)
    n = config.n
    where = f"seed={config.seed} n={n} l={config.l}"
    order = firing_order(result.initial_phases)
    rotation = 0
    prev_time = 0.0
    eps = config.stop.p_threshold if config.stop.p_threshold is not None else 0.0

    for e, (event, record) in enumerate(zip(result.events, result.records)):
        ctx = f"{where} event={e}"
        checks["run-times-strictly-increasing"].record(
            event.time > prev_time, f"{ctx} time {event.time!r} after {prev_time!r}"
        )
        prev_time = event.time

        if event.kind is PulseKind.COLLISION:
            # Distinct initial phases never merge; a collision here is
            # itself an ordering failure.
            checks["run-firing-order-cyclic"].record(False, f"{ctx} unexpected collision")
            order = firing_order(record.phases_after)
            rotation = 0
            continue

        checks["run-firing-order-cyclic"].record(
            event.firers == (order[rotation % n],),
            f"{ctx} fired {event.firers} expected {(order[rotation % n],)}",
        )
        expected_desc = tuple(order[(rotation + 1 + k) % n] for k in range(n))
        rotation += 1
        checks["run-no-overtake"].record(
            firing_order(record.phases_after) == expected_desc,
            f"{ctx} order {firing_order(record.phases_after)} expected {expected_desc}",
        )
        checks["run-listener-below-wrap"].record(
            all(after < TWO_PI for _, _, after in event.updates),
            f"{ctx} listener at wrap",
        )
        gap_sum = sum(record.deltas_after)
        checks["run-delta-sum"].record(
            abs(gap_sum - TWO_PI) <= DELTA_SUM_TOL,
            f"{ctx} gaps sum to {gap_sum!r}",
        )

        try:
            classification = classify_pulse(event, cfg)
        except InvariantViolation as exc:
            checks["run-no-fourth-case"].record(False, f"{ctx} {exc}")
            continue
        checks["run-no-fourth-case"].record(True)
        if classification.kind is PulseKind.SILENT:
            case_counts["silent"] += 1
        else:
            case_counts[f"case{classification.case}"] += 1

        p_before = desync_index_of(event_before_phases(event), cfg)
        measured = record.p_after - p_before
        predicted = predict_index_change(event, cfg)
        err = abs(measured - predicted)
        checks["run-index-change-oracle"].record(
            err <= ORACLE_TOL, f"{ctx} |measured-predicted|={err:.3e}"
        )
        checks["run-index-change-oracle"].track_max("max_abs_error", err)
        if classification.case in (1, 2):
            ok = measured < 0.0 and predicted < 0.0
        else:
            ok = measured <= MONOTONE_SLACK
        checks["run-monotone-index"].record(
            ok, f"{ctx} case={classification.case} measured={measured!r}"
        )
        checks["run-monotone-index"].track_max("max_increase", measured)

    streak = silent_run_length(result.events, cfg, eps=eps)
    checks["run-silent-bound"].record(
        streak <= n - 1, f"{where} silent streak {streak}"
    )


def write_report(report: VerifyReport, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report.to_dict(), f, indent=2)
        f.write("\n")
