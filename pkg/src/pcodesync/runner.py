"""Run loop: drive the engine to a stop condition and record a trace.

Gap labels are fixed by the descending phase order at the start of the
run, which single-firer pulses never change; only a collision reset can
reorder phases, so the labels are recomputed at that instant and kept
until the next collision.
"""

from __future__ import annotations

import random
import time as _time
from dataclasses import dataclass

from .engine import (
    NetworkState,
    PulseEvent,
    PulseKind,
    ResponseFn,
    step,
)
from .metrics import (
    compute_deltas,
    desync_index,
    desync_index_of,
    firing_order,
    predict_index_change,
)
from .phase import PrcConfig
from .scenario import ScenarioConfig, StopCondition, realize_initial_phases
from .trace import TraceRecord


def run(
    state: NetworkState, stop: StopCondition, *, response: ResponseFn | None = None
) -> tuple[NetworkState, list[PulseEvent]]:
    """Drive a state to its stop condition; events come back in time order.

    Deterministic given the initial state (including its rng) and the
    stop condition.
    """
    events: list[PulseEvent] = []
    streak = 0
    while len(events) < stop.max_events:
        state, event = step(state, response=response)
        events.append(event)
        if stop.p_threshold is not None:
            if desync_index_of(state.phases, state.prc) <= stop.p_threshold:
                streak += 1
                if streak >= state.prc.n:
                    break
            else:
                streak = 0
    return state, events


@dataclass
class RunResult:
    """Everything a finished scenario produced."""

    config: ScenarioConfig
    initial_phases: list[float]
    initial_p: float
    final_state: NetworkState
    events: list[PulseEvent]
    records: list[TraceRecord]
    converged: bool
    final_p: float
    wall_time: float

    @property
    def event_count(self) -> int:
        return len(self.records)


def initial_state(config: ScenarioConfig) -> NetworkState:
    """Seeded starting state; the same rng later feeds collision resets."""
    rng = random.Random(config.seed)
    phases = realize_initial_phases(config, rng)
    return NetworkState(
        time=0.0,
        omega=config.omega,
        phases=phases,
        prc=PrcConfig(config.n, config.l),
        rng=rng,
    )


def run_scenario(
    config: ScenarioConfig, *, response: ResponseFn | None = None
) -> RunResult:
    """Run a scenario to its stop condition, recording one trace row per event."""
    started = _time.perf_counter()
    state = initial_state(config)
    prc = state.prc
    initial = list(state.phases)
    order = firing_order(state.phases)
    p_after = desync_index(
        compute_deltas([state.phases[i] for i in order]), prc
    )
    initial_p = p_after

    events: list[PulseEvent] = []
    records: list[TraceRecord] = []
    streak = 0
    converged = False
    stop = config.stop
    while len(records) < stop.max_events:
        state, event = step(state, response=response)
        events.append(event)
        if event.kind is PulseKind.COLLISION:
            order = firing_order(state.phases)
            predicted = None
        else:
            predicted = predict_index_change(event, prc)
        deltas = compute_deltas([state.phases[i] for i in order])
        p_after = desync_index(deltas, prc)
        records.append(
            TraceRecord(
                event_index=len(records),
                time=event.time,
                firers=event.firers,
                kind=event.kind,
                phases_after=tuple(state.phases),
                deltas_after=deltas,
                p_after=p_after,
                predicted_dp=predicted,
            )
        )
        if stop.p_threshold is not None:
            if p_after <= stop.p_threshold:
                streak += 1
                if streak >= config.n:
                    converged = True
                    break
            else:
                streak = 0
    return RunResult(
        config=config,
        initial_phases=initial,
        initial_p=initial_p,
        final_state=state,
        events=events,
        records=records,
        converged=converged,
        final_p=p_after,
        wall_time=_time.perf_counter() - started,
    )
