"""Structured verdicts shared by validators, checkers and the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive-sampled"


@dataclass
class CheckReport:
    criterion: str
    verdict: str = PASS
    mode: str = "exhaustive"
    cases: int = 0
    seed: int | None = None
    witnesses: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict != FAIL

    @property
    def failed(self) -> bool:
        return self.verdict == FAIL

    def fail(self, witness: dict) -> None:
        self.verdict = FAIL
        self.witnesses.append(witness)

    def to_dict(self) -> dict[str, Any]:
        out = {
            "criterion": self.criterion,
            "verdict": self.verdict,
            "mode": self.mode,
            "cases": self.cases,
            "seed": self.seed,
            "witnesses": self.witnesses,
        }
        if self.notes:
            out["notes"] = self.notes
        if self.details:
            out["details"] = self.details
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)

    def summary(self) -> str:
        line = f"{self.criterion}: {self.verdict} ({self.mode}, {self.cases} cases)"
        if self.witnesses:
            line += f", {len(self.witnesses)} witness(es)"
        return line
