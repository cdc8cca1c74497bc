"""
Report containers. Every report carries the exact values behind its verdict
so that a reader can redo each comparison from the report alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import pandas as pd

from src.exact_arith import ExtReal
from src.utils import format_elapsed, to_jsonable


# --- REPORT RECORDS ---

@dataclass
class CheckReport:
    check: str
    passed: bool
    lhs: ExtReal | None = None
    rhs: ExtReal | None = None
    violations: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return to_jsonable({
            "check": self.check,
            "passed": self.passed,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "violations": self.violations,
            "details": self.details,
        })


@dataclass
class RunReport:
    """One suite instance: what was generated, what was checked, what came out."""

    suite: str
    index: int
    seed: int
    instance: dict
    verdicts: dict
    passed: bool
    expected_negative: bool = False
    wall_time: float = 0.0

    def to_json(self, include_timing: bool = True) -> dict:
        payload = to_jsonable({
            "suite": self.suite,
            "index": self.index,
            "seed": self.seed,
            "instance": self.instance,
            "verdicts": self.verdicts,
            "passed": self.passed,
            "expected_negative": self.expected_negative,
        })
        if include_timing:
            payload["wall_time"] = format_elapsed(self.wall_time)
        return payload


# --- PANDAS SUMMARIES ---

def reports_frame(reports: Iterable[RunReport]) -> pd.DataFrame:
    """Flattens run reports into one row per instance."""
    rows = [
        {
            "suite": r.suite,
            "index": r.index,
            "seed": r.seed,
            "passed": r.passed,
            "expected_negative": r.expected_negative,
            "wall_time": r.wall_time,
        }
        for r in reports
    ]
    columns = ["suite", "index", "seed", "passed", "expected_negative", "wall_time"]
    return pd.DataFrame(rows, columns=columns)


def suite_summary(frame: pd.DataFrame) -> pd.DataFrame:
    """Per-suite instance counts, failures and total time."""
    if frame.empty:
        return pd.DataFrame(columns=["instances", "failed", "expected_negative", "seconds"])
    # Keep suites in run order
    grouped = frame.groupby("suite", sort=False)
    summary = pd.DataFrame({
        "instances": grouped.size(),
        "failed": grouped["passed"].apply(lambda s: int((~s.astype(bool)).sum())),
        "expected_negative": grouped["expected_negative"].sum().astype(int),
        "seconds": grouped["wall_time"].sum().round(3),
    })
    return summary
