import math
import random

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from pcodesync.engine import NetworkState, PulseKind, fire
from pcodesync.metrics import (
    classify_pulse,
    compute_deltas,
    desync_index,
    desync_index_of,
    event_before_phases,
    firing_order,
    predict_index_change,
    silent_run_length,
)
from pcodesync.phase import TWO_PI, PrcConfig
from pcodesync.runner import run_scenario
from pcodesync.scenario import PhaseGenerator, ScenarioConfig, StopCondition

distinct_phase_lists = st.integers(min_value=2, max_value=8).flatmap(
    lambda n: st.lists(
        st.floats(min_value=0.0, max_value=TWO_PI, exclude_max=True),
        min_size=n,
        max_size=n,
        unique=True,
    )
)


def resolvable(phases, gap=1e-9):
    # sub-ulp separations behave like exact ties in double arithmetic;
    # the distinct-phase invariants presume gaps rounding can resolve
    ordered = sorted(phases)
    return all(b - a >= gap for a, b in zip(ordered, ordered[1:]))


def fire_event(phases, l=0.85, seed=0):
    state = NetworkState(
        time=0.0,
        omega=TWO_PI,
        phases=list(phases),
        prc=PrcConfig(len(phases), l),
        rng=random.Random(seed),
    )
    return fire(state)


class TestComputeDeltas:
    def test_even_spread(self):
        deltas = compute_deltas([3 * math.pi / 2, math.pi, math.pi / 2, 0.0])
        assert deltas == pytest.approx((math.pi / 2,) * 4, abs=1e-15)

    def test_two_oscillators(self):
        assert compute_deltas([math.pi, 0.0]) == pytest.approx((math.pi, math.pi), abs=1e-15)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            compute_deltas([])

    @given(distinct_phase_lists)
    def test_distinct_phases_sum_to_full_turn(self, phases):
        assume(resolvable(phases))
        phases.sort(reverse=True)
        assert sum(compute_deltas(phases)) == pytest.approx(TWO_PI, abs=1e-9)


class TestDesyncIndex:
    def test_even_spread_is_zero(self):
        cfg = PrcConfig(4, 0.5)
        deltas = compute_deltas([3 * math.pi / 2, math.pi, math.pi / 2, 0.0])
        assert desync_index(deltas, cfg) <= 1e-12

    def test_two_identical_phases_reach_the_maximum(self):
        # direct evaluation of the absolute-sum formula on {2*pi, 0}
        cfg = PrcConfig(2, 0.5)
        assert desync_index((TWO_PI, 0.0), cfg) == TWO_PI
        # the same value comes from an actual pair of equal phases
        assert desync_index_of([math.pi, math.pi], cfg) == TWO_PI

    def test_perturbed_even_spread(self):
        cfg = PrcConfig(5, 0.85)
        slot = cfg.slot
        deltas = (slot + 0.1, slot - 0.1, slot, slot, slot)
        assert desync_index(deltas, cfg) == pytest.approx(0.2, abs=1e-12)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            desync_index((1.0, 2.0), PrcConfig(3, 0.5))

    @given(distinct_phase_lists)
    def test_nonnegative(self, phases):
        cfg = PrcConfig(len(phases), 0.5)
        assert desync_index_of(phases, cfg) >= 0.0

    @given(distinct_phase_lists)
    def test_rotation_invariant_labels(self, phases):
        # any cyclic rotation of the descending labels gives the same index
        cfg = PrcConfig(len(phases), 0.5)
        order = list(firing_order(phases))
        rotated = order[2:] + order[:2]
        p_sorted = desync_index(compute_deltas([phases[i] for i in order]), cfg)
        p_rotated = desync_index(compute_deltas([phases[i] for i in rotated]), cfg)
        assert p_rotated == pytest.approx(p_sorted, abs=1e-12)


class TestFiringOrder:
    def test_descending_with_id_tiebreak(self):
        assert firing_order([1.0, 3.0, 1.0, 2.0]) == (1, 3, 0, 2)


class TestClassifyPulse:
    def test_silent(self):
        _, event = fire_event([TWO_PI, 2.2, 4.0])
        cls = classify_pulse(event, PrcConfig(3, 0.85))
        assert cls.kind is PulseKind.SILENT
        assert cls.m == 0
        assert cls.case is None

    def test_active_counts_listeners_in_interval(self):
        _, event = fire_event([TWO_PI, 1.0, 3.0])
        cls = classify_pulse(event, PrcConfig(3, 0.85))
        assert cls.kind is PulseKind.ACTIVE
        assert cls.m == 1
        assert cls.case in (1, 2, 3)

    def test_case1_trailing_gap_stays_wide(self):
        # trailing gap 2.2 > slot, shrinks by l*(slot - x) ~ 0.08, stays wide
        cfg = PrcConfig(3, 0.85)
        _, event = fire_event([TWO_PI, 4.2, 2.0])
        assert classify_pulse(event, cfg).case == 1

    def test_case2_trailing_gap_drops_below_slot(self):
        cfg = PrcConfig(3, 0.85)
        _, event = fire_event([TWO_PI, 2.6, 0.1])
        assert classify_pulse(event, cfg).case == 2

    def test_case3_trailing_gap_already_narrow(self):
        cfg = PrcConfig(3, 0.85)
        _, event = fire_event([TWO_PI, 2.2, 1.0])
        assert classify_pulse(event, cfg).case == 3

    def test_every_listener_inside_interval(self):
        # the gap behind the deepest listener is the firer's own
        cfg = PrcConfig(3, 0.85)
        _, event = fire_event([TWO_PI, 1.0, 0.5])
        cls = classify_pulse(event, cfg)
        assert cls.m == 2
        assert cls.case == 1

    def test_collision_rejected(self):
        _, event = fire_event([TWO_PI, TWO_PI])
        with pytest.raises(ValueError):
            classify_pulse(event, PrcConfig(2, 0.85))


class TestPredictIndexChange:
    def measured(self, phases, l=0.85):
        cfg = PrcConfig(len(phases), l)
        state_after, event = fire_event(phases, l=l)
        before = desync_index_of(event_before_phases(event), cfg)
        after = desync_index_of(state_after.phases, cfg)
        return event, cfg, after - before

    def test_silent_is_zero(self):
        event, cfg, measured = self.measured([TWO_PI, 2.2, 4.0])
        assert predict_index_change(event, cfg) == 0.0
        assert measured == pytest.approx(0.0, abs=1e-12)

    def test_case3_is_zero(self):
        event, cfg, measured = self.measured([TWO_PI, 2.2, 1.0])
        assert predict_index_change(event, cfg) == 0.0
        assert measured == pytest.approx(0.0, abs=1e-12)

    def test_case1_closed_form(self):
        event, cfg, measured = self.measured([TWO_PI, 4.2, 2.0])
        predicted = predict_index_change(event, cfg)
        assert predicted == pytest.approx(2 * 0.85 * (2.0 - cfg.slot), abs=1e-15)
        assert predicted < 0.0
        assert measured == pytest.approx(predicted, abs=1e-9)

    def test_case2_closed_form(self):
        event, cfg, measured = self.measured([TWO_PI, 2.6, 0.1])
        predicted = predict_index_change(event, cfg)
        assert predicted == pytest.approx(2 * (cfg.slot - 2.5), abs=1e-12)
        assert predicted < 0.0
        assert measured == pytest.approx(predicted, abs=1e-9)

    def test_all_listeners_inside_uses_firer_gap(self):
        event, cfg, measured = self.measured([TWO_PI, 1.0, 0.5])
        predicted = predict_index_change(event, cfg)
        assert predicted == pytest.approx(2 * 0.85 * (1.0 - cfg.slot), abs=1e-15)
        assert measured == pytest.approx(predicted, abs=1e-9)

    def test_collision_rejected(self):
        _, event = fire_event([TWO_PI, TWO_PI])
        with pytest.raises(ValueError):
            predict_index_change(event, PrcConfig(2, 0.85))

    @given(distinct_phase_lists)
    def test_matches_measurement_on_fuzzed_states(self, phases):
        # reachable firing states only: listeners sit strictly inside
        # (0, 2*pi), since a listener is at 0 only at its own reset instant
        assume(resolvable(phases))
        phases = [p for p in phases if 1e-9 <= p < TWO_PI - 1e-9]
        if len(phases) < 2:
            return
        top = max(phases)
        at_fire = [TWO_PI if p == top else p for p in phases]
        event, cfg, measured = self.measured(at_fire)
        assert measured == pytest.approx(predict_index_change(event, cfg), abs=1e-9)


class TestSilentRunLength:
    def test_empty(self):
        assert silent_run_length([], PrcConfig(3, 0.85)) == 0

    def test_counts_only_preconvergence_silence(self):
        # an evenly spaced start is already desynchronized: its silent
        # pulses do not count toward the streak
        config = ScenarioConfig(
            n=4,
            l=0.85,
            omega=TWO_PI,
            initial_phases=PhaseGenerator(name="evenly_spaced"),
            seed=0,
            stop=StopCondition(max_events=8, p_threshold=None),
        )
        result = run_scenario(config)
        assert all(r.kind is PulseKind.SILENT for r in result.records)
        assert silent_run_length(result.events, PrcConfig(4, 0.85)) == 0

    def test_bounded_by_network_size_on_converging_run(self):
        config = ScenarioConfig(
            n=5,
            l=0.85,
            omega=TWO_PI,
            initial_phases=PhaseGenerator(name="uniform_random"),
            seed=3,
            stop=StopCondition(max_events=1000, p_threshold=1e-6),
        )
        result = run_scenario(config)
        assert result.converged
        assert silent_run_length(result.events, PrcConfig(5, 0.85)) <= 4
