"""Finger-search dictionaries over 64-bit keys.

Two instrumented structures — an append-only tail dictionary and a fully
dynamic randomized one — plus the flat reference dictionary they are checked
against, a pile-zeroing game simulator, and a seeded workload pipeline that
replays operation streams in lockstep and reports probe counts as CSV.
"""

from fingerdict._core import (
    BudgetMismatch,
    DictError,
    DivergenceDetected,
    DuplicateKey,
    EmptyStructure,
    InvalidSpec,
    IoFailure,
    KeyAbsent,
    KeyNotGreaterThanMax,
    KeyOutOfFingerRange,
    NotSorted,
    OracleDict,
    RandomizedFingerDict,
    StaleFinger,
    TailFingerDict,
    bench_csv,
    bench_rows,
    pebble_run,
    replay_ops,
)

__all__ = [
    "BudgetMismatch",
    "DictError",
    "DivergenceDetected",
    "DuplicateKey",
    "EmptyStructure",
    "InvalidSpec",
    "IoFailure",
    "KeyAbsent",
    "KeyNotGreaterThanMax",
    "KeyOutOfFingerRange",
    "NotSorted",
    "OracleDict",
    "RandomizedFingerDict",
    "StaleFinger",
    "TailFingerDict",
    "bench_csv",
    "bench_rows",
    "pebble_run",
    "replay_ops",
]

__version__ = "0.1.0"
