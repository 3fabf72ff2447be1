"""Event-driven simulation and verification of pulse-coupled oscillator
phase desynchronization."""

from .engine import (
    InvariantViolation,
    NetworkState,
    OscillatorId,
    PulseEvent,
    PulseKind,
    advance,
    fire,
    step,
    time_to_next_fire,
)
from .metrics import (
    CONVERGENCE_EPS,
    PulseClassification,
    classify_pulse,
    compute_deltas,
    desync_index,
    desync_index_of,
    event_before_phases,
    firing_order,
    predict_index_change,
    silent_run_length,
)
from .phase import (
    TWO_PI,
    PhaseAngle,
    PrcConfig,
    apply_prc,
    canonicalize,
    forward_diff,
    prc_response,
)
from .runner import RunResult, initial_state, run, run_scenario
from .scenario import (
    ConfigError,
    PhaseGenerator,
    ScenarioConfig,
    StopCondition,
    default_stop,
    load_config,
    parse_config,
    realize_initial_phases,
)
from .sweep import CellResult, SweepSpec, load_sweep, parse_sweep, run_sweep
from .trace import (
    TraceRecord,
    TraceWriteError,
    read_trace,
    read_trace_csv,
    read_trace_jsonl,
    write_trace,
    write_trace_csv,
    write_trace_jsonl,
)
from .verify import VerifyReport, sign_flipped_response, verify_corpus

__version__ = "0.1.0"

__all__ = [
    "CONVERGENCE_EPS",
    "CellResult",
    "ConfigError",
    "InvariantViolation",
    "NetworkState",
    "OscillatorId",
    "PhaseAngle",
    "PhaseGenerator",
    "PrcConfig",
    "PulseClassification",
    "PulseEvent",
    "PulseKind",
    "RunResult",
    "ScenarioConfig",
    "StopCondition",
    "SweepSpec",
    "TWO_PI",
    "TraceRecord",
    "TraceWriteError",
    "VerifyReport",
    "advance",
    "apply_prc",
    "canonicalize",
    "classify_pulse",
    "compute_deltas",
    "default_stop",
    "desync_index",
    "desync_index_of",
    "event_before_phases",
    "fire",
    "firing_order",
    "forward_diff",
    "initial_state",
    "load_config",
    "load_sweep",
    "parse_config",
    "parse_sweep",
    "prc_response",
    "predict_index_change",
    "read_trace",
    "read_trace_csv",
    "read_trace_jsonl",
    "realize_initial_phases",
    "run",
    "run_scenario",
    "run_sweep",
    "sign_flipped_response",
    "silent_run_length",
    "step",
    "time_to_next_fire",
    "verify_corpus",
    "write_trace",
    "write_trace_csv",
    "write_trace_jsonl",
]
