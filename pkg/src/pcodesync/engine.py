"""Exact event-driven evolution of a pulse-coupled oscillator population.

Between firings every phase advances linearly at the common rate omega, so
the time to the next firing has the closed form (2*pi - max phase)/omega
and the engine jumps straight to it rather than integrating small ticks.
At a firing instant the firing oscillators sit exactly at the wrap point
2*pi (assigned, never accumulated), every other oscillator applies the
pulse response once per received pulse, and the firers reset: to 0 when
the firing is unique, to independent uniform draws from [0, 2*pi) when
several oscillators reach the wrap point together. Simultaneous firers
would otherwise stay phase-locked forever, since equal phases receive
identical shifts.

Co-firing is detected by exact equality of the analytically advanced
phases. Equal phases stay bit-equal under the common advance and under
identical response applications, so exact equality is the correct
detector; a tolerance band would spuriously merge nearly desynchronized
neighbors.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

from .phase import TWO_PI, PhaseAngle, PrcConfig, apply_prc, canonicalize

OscillatorId = int
ResponseFn = Callable[[PhaseAngle, PrcConfig], PhaseAngle]

_JUST_BELOW_WRAP = math.nextafter(TWO_PI, 0.0)


class InvariantViolation(RuntimeError):
    """The engine observed a state its contracts rule out."""


class PulseKind(str, Enum):
    """Single-firer pulses are active (someone responded) or silent;
    simultaneous firings are collisions and carry neither label."""

    ACTIVE = "active"
    SILENT = "silent"
    COLLISION = "collision"


@dataclass(frozen=True)
class PulseEvent:
    """One firing instant.

    updates holds (id, phase_before, phase_after) for every non-firer,
    including those the pulse left untouched; resets holds (id, value)
    for every firer. Before-phases are taken at the firing instant, with
    the firers at the wrap point.
    """

    time: float
    firers: tuple[OscillatorId, ...]
    updates: tuple[tuple[OscillatorId, float, float], ...]
    resets: tuple[tuple[OscillatorId, float], ...]
    kind: PulseKind


@dataclass
class NetworkState:
    """Population snapshot: time, common rate, phases, response config, rng.

    Phases are canonical in [0, 2*pi) except transiently: a phase equal
    to exactly 2*pi marks a pending firing, and only advance() produces
    it. The rng is owned by the run that created the state; snapshots
    share it, and the engine draws from it only on collision resets.
    """

    time: float
    omega: float
    phases: list[PhaseAngle]
    prc: PrcConfig
    rng: random.Random

    def __post_init__(self) -> None:
        if not math.isfinite(self.time) or self.time < 0.0:
            raise ValueError(f"time must be finite and >= 0, got {self.time!r}")
        if not math.isfinite(self.omega) or self.omega <= 0.0:
            raise ValueError(f"omega must be finite and > 0, got {self.omega!r}")
        if len(self.phases) != self.prc.n:
            raise ValueError(
                f"expected {self.prc.n} phases, got {len(self.phases)}"
            )
        for i, p in enumerate(self.phases):
            if not math.isfinite(p) or not (0.0 <= p <= TWO_PI):
                raise ValueError(f"phase {i} out of [0, 2*pi]: {p!r}")


def time_to_next_fire(state: NetworkState) -> float:
    """Seconds until the largest phase reaches the wrap point.

    Zero exactly when a firing is already pending (a phase sits at 2*pi);
    the subtraction is exact for phases above pi, so no positive gap can
    collapse to zero.
    """
    return (TWO_PI - max(state.phases)) / state.omega


def advance(state: NetworkState, dt: float) -> NetworkState:
    """Advance every phase by omega*dt without crossing a firing.

    dt may not exceed time_to_next_fire(state): a larger step would
    silently skip a firing. At exactly that value the maximal phases are
    assigned the wrap point 2*pi, so fire() sees them bit-exactly and the
    co-firing set equals the set of phases that were bit-equal maxima
    before the advance. Pairwise gaps among the others are preserved up
    to rounding.
    """
    if not math.isfinite(dt) or dt < 0.0:
        raise ValueError(f"dt must be finite and >= 0, got {dt!r}")
    horizon = time_to_next_fire(state)
    if dt > horizon:
        raise ValueError(
            f"dt={dt!r} exceeds time to next fire {horizon!r}; it would skip a firing"
        )
    shift = state.omega * dt
    if dt == horizon:
        peak = max(state.phases)
        new_phases = [
            TWO_PI if p == peak else min(p + shift, _JUST_BELOW_WRAP)
            for p in state.phases
        ]
    else:
        # The clamp only matters when rounding pushes a straggler past the
        # wrap point even though dt stops short of the next firing.
        new_phases = [min(p + shift, _JUST_BELOW_WRAP) for p in state.phases]
    return replace(state, time=state.time + dt, phases=new_phases)


def _respond(value: PhaseAngle, cfg: PrcConfig, response: ResponseFn) -> PhaseAngle:
    out = response(value, cfg)
    if out >= TWO_PI:
        raise InvariantViolation(
            f"pulse response pushed a listener to the wrap point: {value!r} -> {out!r}"
        )
    if out < 0.0:
        out = canonicalize(out)
    return out


def fire(
    state: NetworkState, *, response: ResponseFn | None = None
) -> tuple[NetworkState, PulseEvent]:
    """Fire every oscillator sitting at the wrap point.

    A unique firer resets to 0 and every listener applies the response
    once. With two or more simultaneous firers, each firer resets to an
    independent uniform draw from [0, 2*pi) (consumed in ascending id
    order, redrawing the rare exact duplicate) and each listener applies
    the response once per firer; resets take effect only after all
    listener updates of the instant. Calling this with no phase at the
    wrap point is a contract violation.
    """
    if response is None:
        response = apply_prc
    phases = state.phases
    cfg = state.prc
    firers = tuple(i for i, p in enumerate(phases) if p == TWO_PI)
    if not firers:
        raise ValueError("fire() requires at least one phase at the wrap point")

    new_phases = list(phases)
    updates = []
    for i, before in enumerate(phases):
        if before == TWO_PI:
            continue
        after = before
        for _ in firers:  # one response per received pulse
            after = _respond(after, cfg, response)
        new_phases[i] = after
        updates.append((i, before, after))

    resets = []
    if len(firers) == 1:
        new_phases[firers[0]] = 0.0
        resets.append((firers[0], 0.0))
        active = any(before < cfg.slot for _, before, _ in updates)
        kind = PulseKind.ACTIVE if active else PulseKind.SILENT
    else:
        drawn: set[float] = set()
        for f in firers:
            value = state.rng.random() * TWO_PI
            while value in drawn:
                value = state.rng.random() * TWO_PI
            drawn.add(value)
            new_phases[f] = value
            resets.append((f, value))
        kind = PulseKind.COLLISION

    event = PulseEvent(
        time=state.time,
        firers=firers,
        updates=tuple(updates),
        resets=tuple(resets),
        kind=kind,
    )
    return replace(state, phases=new_phases), event


def step(
    state: NetworkState, *, response: ResponseFn | None = None
) -> tuple[NetworkState, PulseEvent]:
    """Advance to the next firing instant and fire: one event."""
    at_fire = advance(state, time_to_next_fire(state))
    return fire(at_fire, response=response)
