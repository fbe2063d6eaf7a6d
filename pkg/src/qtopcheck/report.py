"""Check reports: verdict plus replayable witness plus case counts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"

_VERDICTS = (PASS, FAIL, SKIPPED)


@dataclass
class Report:
    """Outcome of one check.

    A failing report always carries a witness: enough serialized data
    (maps as value strings, structures as {ground, index} references into
    the adapter's enumeration order) to replay the counterexample through
    the public predicates.
    """

    check_name: str
    verdict: str
    witness: dict | None = None
    stats: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.verdict not in _VERDICTS:
            raise ValueError(f"verdict must be one of {_VERDICTS}, got {self.verdict!r}")
        if self.verdict == FAIL and self.witness is None:
            raise ValueError("a failing report must carry a witness")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "verdict": self.verdict,
            "witness": self.witness,
            "stats": self.stats,
        }


def combine(check_name: str, reports: Sequence[Report], extra_stats: dict | None = None) -> Report:
    """Aggregate sub-reports: fail dominates, then skipped, then pass."""
    stats: dict = {"checks": len(reports)}
    if extra_stats:
        stats.update(extra_stats)
    for rep in reports:
        if rep.verdict == FAIL:
            witness = {"failed_check": rep.check_name}
            witness.update(rep.witness or {})
            return Report(check_name, FAIL, witness, stats)
    if any(rep.verdict == SKIPPED for rep in reports):
        return Report(check_name, SKIPPED, None, stats)
    return Report(check_name, PASS, None, stats)
