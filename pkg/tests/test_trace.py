import io
import math
import random

import pytest

from pcodesync.engine import PulseKind
from pcodesync.metrics import desync_index
from pcodesync.phase import TWO_PI, PrcConfig
from pcodesync.runner import run_scenario
from pcodesync.scenario import PhaseGenerator, ScenarioConfig, StopCondition
from pcodesync.trace import (
    TraceRecord,
    read_trace,
    read_trace_csv,
    read_trace_jsonl,
    write_trace,
    write_trace_csv,
    write_trace_jsonl,
)


def random_records(n_osc=3, count=10, seed=0):
    rng = random.Random(seed)
    records = []
    for i in range(count):
        kind = rng.choice(list(PulseKind))
        firers = (
            tuple(sorted(rng.sample(range(n_osc), 2)))
            if kind is PulseKind.COLLISION
            else (rng.randrange(n_osc),)
        )
        records.append(
            TraceRecord(
                event_index=i,
                time=rng.random() * 100.0,
                firers=firers,
                kind=kind,
                phases_after=tuple(rng.random() * TWO_PI for _ in range(n_osc)),
                deltas_after=tuple(rng.random() * TWO_PI for _ in range(n_osc)),
                p_after=rng.random() * TWO_PI,
                predicted_dp=None if kind is PulseKind.COLLISION else -rng.random(),
            )
        )
    return records


class TestRoundTrip:
    def test_csv_bit_exact(self):
        records = random_records()
        sink = io.StringIO()
        write_trace_csv(records, sink)
        assert read_trace_csv(io.StringIO(sink.getvalue())) == records

    def test_jsonl_bit_exact(self):
        records = random_records(n_osc=5, count=20, seed=3)
        sink = io.StringIO()
        write_trace_jsonl(records, sink)
        assert read_trace_jsonl(io.StringIO(sink.getvalue())) == records

    def test_dispatch_by_format_name(self):
        records = random_records(count=4)
        for fmt in ("table", "objects"):
            sink = io.StringIO()
            write_trace(records, sink, fmt=fmt)
            assert read_trace(io.StringIO(sink.getvalue()), fmt=fmt) == records

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            write_trace([], io.StringIO(), fmt="parquet")

    def test_awkward_reals_survive(self):
        # 17 significant digits must round-trip arbitrary doubles
        awkward = (0.1, 1.0 / 3.0, math.pi, math.nextafter(TWO_PI, 0.0), 5e-324)
        record = TraceRecord(
            event_index=0,
            time=0.1 + 0.2,
            firers=(0,),
            kind=PulseKind.ACTIVE,
            phases_after=awkward[:3],
            deltas_after=awkward[2:],
            p_after=awkward[3],
            predicted_dp=-awkward[4],
        )
        sink = io.StringIO()
        write_trace_csv([record], sink)
        assert read_trace_csv(io.StringIO(sink.getvalue())) == [record]


class TestCsvShape:
    def test_empty_stream_writes_header_only(self):
        sink = io.StringIO()
        write_trace_csv([], sink, n=4)
        lines = sink.getvalue().splitlines()
        assert len(lines) == 1
        assert lines[0].startswith("event_index,time,firers,kind,p_after,predicted_dp")
        assert lines[0].count("phase_after_") == 4
        assert read_trace_csv(io.StringIO(sink.getvalue())) == []

    def test_collision_leaves_prediction_empty(self):
        record = random_records(count=1, seed=7)[0]
        record = TraceRecord(
            **{**record.__dict__, "kind": PulseKind.COLLISION, "predicted_dp": None, "firers": (0, 1)}
        )
        sink = io.StringIO()
        write_trace_csv([record], sink)
        row = sink.getvalue().splitlines()[1].split(",")
        assert row[3] == "collision"
        assert row[5] == ""
        assert row[2] == "0;1"

    def test_missing_header_rejected(self):
        with pytest.raises(ValueError):
            read_trace_csv(io.StringIO(""))


class TestTraceFromRuns:
    def test_converged_run_final_record_below_threshold(self):
        config = ScenarioConfig(
            n=5,
            l=0.85,
            omega=TWO_PI,
            initial_phases=PhaseGenerator(name="uniform_random"),
            seed=11,
            stop=StopCondition(max_events=1000, p_threshold=1e-6),
        )
        result = run_scenario(config)
        assert result.converged
        assert result.records[-1].p_after <= 1e-6

    def test_p_after_consistent_with_deltas(self):
        config = ScenarioConfig(
            n=4,
            l=0.5,
            omega=TWO_PI,
            initial_phases=PhaseGenerator(name="uniform_random"),
            seed=2,
            stop=StopCondition(max_events=50, p_threshold=None),
        )
        cfg = PrcConfig(4, 0.5)
        for record in run_scenario(config).records:
            assert record.p_after == pytest.approx(
                desync_index(record.deltas_after, cfg), abs=1e-9
            )
