"""Trace persistence: JSON object lines or a flat delimited table.

Both formats round-trip doubles exactly. The object format relies on
shortest-repr floats; the table renders every real with 17 significant
digits. The table flattens the per-oscillator vectors into indexed
columns (phase_after_0, ..., delta_after_0, ...); firer ids are joined
with ';'.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable

from .engine import PulseKind

_BASE_COLUMNS = ("event_index", "time", "firers", "kind", "p_after", "predicted_dp")


class TraceWriteError(RuntimeError):
    """A record failed to write; record_index is -1 for the header."""

    def __init__(self, record_index: int, cause: BaseException):
        self.record_index = record_index
        super().__init__(f"failed to write trace record {record_index}: {cause}")


@dataclass(frozen=True)
class TraceRecord:
    """Per-event snapshot persisted for output and post-hoc verification.

    predicted_dp is the closed-form index change for single-firer events
    and None for collisions, whose change is randomized. p_after always
    equals sum |delta - slot| over deltas_after.
    """

    event_index: int
    time: float
    firers: tuple[int, ...]
    kind: PulseKind
    phases_after: tuple[float, ...]
    deltas_after: tuple[float, ...]
    p_after: float
    predicted_dp: float | None


def _to_dict(record: TraceRecord) -> dict:
    return {
        "event_index": record.event_index,
        "time": record.time,
        "firers": list(record.firers),
        "kind": record.kind.value,
        "phases_after": list(record.phases_after),
        "deltas_after": list(record.deltas_after),
        "p_after": record.p_after,
        "predicted_dp": record.predicted_dp,
    }


def _from_dict(data: dict) -> TraceRecord:
    return TraceRecord(
        event_index=data["event_index"],
        time=data["time"],
        firers=tuple(data["firers"]),
        kind=PulseKind(data["kind"]),
        phases_after=tuple(data["phases_after"]),
        deltas_after=tuple(data["deltas_after"]),
        p_after=data["p_after"],
        predicted_dp=data["predicted_dp"],
    )


def _real(x: float) -> str:
    return format(x, ".17g")


def write_trace_jsonl(records: Iterable[TraceRecord], sink: IO[str]) -> None:
    """One JSON object per line, full field names."""
    for record in records:
        try:
            sink.write(json.dumps(_to_dict(record)) + "\n")
        except OSError as exc:
            raise TraceWriteError(record.event_index, exc) from exc


def write_trace_csv(
    records: Iterable[TraceRecord], sink: IO[str], n: int | None = None
) -> None:
    """Flat table with a header row; reals carry 17 significant digits.

    n fixes the number of per-oscillator columns when the stream may be
    empty; otherwise it is inferred from the first record.
    """
    records = iter(records)
    first = next(records, None)
    if first is not None:
        n = len(first.phases_after)
    header = list(_BASE_COLUMNS)
    header += [f"phase_after_{i}" for i in range(n or 0)]
    header += [f"delta_after_{i}" for i in range(n or 0)]
    try:
        sink.write(",".join(header) + "\n")
    except OSError as exc:
        raise TraceWriteError(-1, exc) from exc
    if first is None:
        return
    for record in _chain_first(first, records):
        row = [
            str(record.event_index),
            _real(record.time),
            ";".join(str(f) for f in record.firers),
            record.kind.value,
            _real(record.p_after),
            "" if record.predicted_dp is None else _real(record.predicted_dp),
        ]
        row += [_real(p) for p in record.phases_after]
        row += [_real(d) for d in record.deltas_after]
        try:
            sink.write(",".join(row) + "\n")
        except OSError as exc:
            raise TraceWriteError(record.event_index, exc) from exc


def _chain_first(first: TraceRecord, rest: Iterable[TraceRecord]):
    yield first
    yield from rest


def write_trace(
    records: Iterable[TraceRecord],
    sink: IO[str],
    fmt: str = "table",
    n: int | None = None,
) -> None:
    """Write records in event order; fmt is 'table' (CSV) or 'objects' (JSONL)."""
    if fmt == "table":
        write_trace_csv(records, sink, n=n)
    elif fmt == "objects":
        write_trace_jsonl(records, sink)
    else:
        raise ValueError(f"unknown trace format {fmt!r}")


def read_trace_jsonl(source: IO[str]) -> list[TraceRecord]:
    return [_from_dict(json.loads(line)) for line in source if line.strip()]


def read_trace_csv(source: IO[str]) -> list[TraceRecord]:
    lines = [line.rstrip("\n") for line in source if line.strip()]
    if not lines:
        raise ValueError("trace table has no header row")
    header = lines[0].split(",")
    if header[: len(_BASE_COLUMNS)] != list(_BASE_COLUMNS):
        raise ValueError(f"unexpected trace header: {header[:6]}")
    n = sum(1 for name in header if name.startswith("phase_after_"))
    records = []
    for line in lines[1:]:
        cells = line.split(",")
        records.append(
            TraceRecord(
                event_index=int(cells[0]),
                time=float(cells[1]),
                firers=tuple(int(f) for f in cells[2].split(";")),
                kind=PulseKind(cells[3]),
                p_after=float(cells[4]),
                predicted_dp=None if cells[5] == "" else float(cells[5]),
                phases_after=tuple(float(c) for c in cells[6 : 6 + n]),
                deltas_after=tuple(float(c) for c in cells[6 + n : 6 + 2 * n]),
            )
        )
    return records


def read_trace(source: IO[str], fmt: str = "table") -> list[TraceRecord]:
    if fmt == "table":
        return read_trace_csv(source)
    if fmt == "objects":
        return read_trace_jsonl(source)
    raise ValueError(f"unknown trace format {fmt!r}")


def trace_extension(fmt: str) -> str:
    return {"table": "csv", "objects": "jsonl"}[fmt]
