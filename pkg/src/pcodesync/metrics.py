"""Desynchronization measurement and the closed-form index-change oracle.

With phases labeled in descending order (the firing order, which pulses
never change), the neighbor gaps are

    delta[k] = (phi[k] - phi[k+1]) mod 2*pi,    wrapping at the end.

They sum to one full turn whenever the phases are distinct, and the
desynchronization index

    P = sum_k |delta[k] - slot|,    slot = 2*pi/n,

is zero exactly at even spacing. A common-rate advance translates every
phase equally, so P changes only at firing events.

Across a single-firer event the change of P has a closed form. Let x be
the largest phase inside the effective interval [0, slot) at the firing
instant and let g be the gap just behind it (from the nearest listener at
or above the slot, or from the firer itself when every listener is inside
the interval). Then:

    no listener inside the interval:        P+ - P = 0      (silent)
    g > slot, still >= slot after the pulse: P+ - P = 2*l*(x - slot)
    g > slot, drops below slot:              P+ - P = 2*(slot - g)
    g <= slot:                               P+ - P = 0

The first two active cases are strictly negative. The fourth combination
(g <= slot before, >= slot after) is impossible: the pulse moves that gap
by l*(x - slot) < 0, downward.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .engine import InvariantViolation, PulseEvent, PulseKind
from .phase import TWO_PI, PrcConfig, apply_prc, forward_diff

#: Index value below which a run is considered desynchronized. Far below
#: any slot width for practical n, far above double-precision noise.
CONVERGENCE_EPS = 1e-6


def firing_order(phases: Sequence[float]) -> tuple[int, ...]:
    """Ids sorted by descending phase; ties broken by ascending id."""
    return tuple(sorted(range(len(phases)), key=lambda i: (-phases[i], i)))


def compute_deltas(phases: Sequence[float]) -> tuple[float, ...]:
    """Neighbor gaps for phases listed in descending (firing) order.

    The last entry wraps around from the smallest phase back to the
    largest. Each gap is in [0, 2*pi); for distinct phases the gaps sum
    to 2*pi by the winding of one full turn.
    """
    if not phases:
        raise ValueError("compute_deltas requires at least one phase")
    n = len(phases)
    return tuple(forward_diff(phases[k], phases[(k + 1) % n]) for k in range(n))


def desync_index(deltas: Sequence[float], cfg: PrcConfig) -> float:
    """Index P = sum |delta - slot|; zero exactly at even spacing."""
    if len(deltas) != cfg.n:
        raise ValueError(f"expected {cfg.n} gaps, got {len(deltas)}")
    return sum(abs(d - cfg.slot) for d in deltas)


def desync_index_of(phases: Sequence[float], cfg: PrcConfig) -> float:
    """Index P of a raw phase snapshot.

    Labels enter P only through the cyclic gap structure, so sorting here
    instead of carrying the frozen run labels yields the same value.
    """
    order = firing_order(phases)
    return desync_index(compute_deltas([phases[i] for i in order]), cfg)


@dataclass(frozen=True)
class PulseClassification:
    """Outcome of a single-firer pulse: kind, how many listeners sat in
    the effective interval, and the active case (1, 2 or 3)."""

    kind: PulseKind
    m: int
    case: int | None


def _require_single_firer(event: PulseEvent) -> None:
    if len(event.firers) != 1:
        raise ValueError(
            "collision events have no active/silent classification"
        )


def _case_geometry(event: PulseEvent, cfg: PrcConfig):
    """Geometry of an active pulse from its before-phases.

    Returns (m, x, gap_before, gap_after) or None for a silent pulse.
    gap_* is the gap behind the deepest-advanced responding listener,
    taken against the nearest listener at or above the slot, or against
    the firer (wrap point before, 0 after) when every listener responds.
    """
    inside = [before for _, before, _ in event.updates if before < cfg.slot]
    if not inside:
        return None
    x = max(inside)
    outside = [before for _, before, _ in event.updates if before >= cfg.slot]
    if outside:
        behind_before = min(outside)
        behind_after = behind_before
    else:
        behind_before = TWO_PI
        behind_after = 0.0
    gap_before = forward_diff(behind_before, x)
    gap_after = forward_diff(behind_after, apply_prc(x, cfg))
    return len(inside), x, gap_before, gap_after


def classify_pulse(event: PulseEvent, cfg: PrcConfig) -> PulseClassification:
    """Classify a single-firer event as silent or active with its case.

    Case 1: the trailing gap exceeded the slot and still does after the
    pulse. Case 2: it exceeded the slot and dropped below. Case 3: it was
    already at most a slot. The remaining combination cannot occur; seeing
    it means the simulation and the theory disagree.
    """
    _require_single_firer(event)
    geom = _case_geometry(event, cfg)
    if geom is None:
        return PulseClassification(kind=PulseKind.SILENT, m=0, case=None)
    m, _, gap_before, gap_after = geom
    if gap_before > cfg.slot:
        case = 1 if gap_after >= cfg.slot else 2
    else:
        if gap_after >= cfg.slot:
            raise InvariantViolation(
                "forbidden case: trailing gap at most a slot grew past the slot "
                f"({gap_before!r} -> {gap_after!r})"
            )
        case = 3
    return PulseClassification(kind=PulseKind.ACTIVE, m=m, case=case)


def predict_index_change(event: PulseEvent, cfg: PrcConfig) -> float:
    """Closed-form change of P across a single-firer event.

    Uses only the before-phases recorded in the event, never the
    simulator's post-state, so it is an independent check on the measured
    index change. Exactly zero for silent and case-3 pulses, strictly
    negative for cases 1 and 2.
    """
    _require_single_firer(event)
    geom = _case_geometry(event, cfg)
    if geom is None:
        return 0.0
    _, x, gap_before, gap_after = geom
    if gap_before > cfg.slot:
        if gap_after >= cfg.slot:
            return 2.0 * cfg.l * (x - cfg.slot)
        return 2.0 * (cfg.slot - gap_before)
    return 0.0


def event_before_phases(event: PulseEvent) -> list[float]:
    """Phase snapshot at the firing instant, firers at the wrap point."""
    phases = [0.0] * (len(event.updates) + len(event.firers))
    for f in event.firers:
        phases[f] = TWO_PI
    for i, before, _ in event.updates:
        phases[i] = before
    return phases


def silent_run_length(
    events: Sequence[PulseEvent], cfg: PrcConfig, eps: float = CONVERGENCE_EPS
) -> int:
    """Longest streak of consecutive silent events while P still exceeds eps.

    Silent pulses after the index has dropped to eps are expected to go on
    forever and do not count; active pulses and collisions break a streak.
    Before desynchronization is reached no streak can span a full round of
    the network.
    """
    best = 0
    run = 0
    for event in events:
        if (
            event.kind is PulseKind.SILENT
            and desync_index_of(event_before_phases(event), cfg) > eps
        ):
            run += 1
            best = max(best, run)
        else:
            run = 0
    return best
