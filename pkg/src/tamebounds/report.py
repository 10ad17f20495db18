"""Machine-readable check reports with byte-stable serialization.

Numbers are rendered as 30-significant-digit decimal strings (enclosures
as "[lo,hi]") so archived reports never depend on binary float formatting.
Key order is fixed by construction; rerunning the same seeded suite must
reproduce the file byte for byte, which is why timing fields stay null
unless explicitly requested.
"""

from __future__ import annotations

import decimal
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from .weights import is_inf

VERDICTS = ("holds", "violated", "inconclusive", "skipped")


def decimal_string(q, digits: int = 30) -> str:
    """Deterministic decimal rendering of a rational or INF."""
    if is_inf(q):
        return "inf" if q > 0 else "-inf"
    q = Fraction(q)
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = decimal.ROUND_HALF_EVEN
        d = decimal.Decimal(q.numerator) / decimal.Decimal(q.denominator)
    return str(d)


def enclosure_string(lo, hi, digits: int = 30) -> str:
    return f"[{decimal_string(lo, digits)},{decimal_string(hi, digits)}]"


@dataclass
class CheckRecord:
    check: str
    trial: int
    inputs: Dict[str, str]
    bound: str
    oracle: str
    verdict: str
    detail: str = ""
    timing: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "trial": self.trial,
            "inputs": dict(sorted(self.inputs.items())),
            "bound": self.bound,
            "oracle": self.oracle,
            "verdict": self.verdict,
            "detail": self.detail,
            "timing": self.timing,
        }


@dataclass
class Report:
    seed: int
    version: str
    records: List[CheckRecord] = field(default_factory=list)

    def add(self, record: CheckRecord) -> None:
        if record.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {record.verdict!r}")
        self.records.append(record)

    def summary(self) -> Dict[str, int]:
        counts = {v: 0 for v in VERDICTS}
        for r in self.records:
            counts[r.verdict] += 1
        counts["total"] = len(self.records)
        return counts

    @property
    def exit_code(self) -> int:
        return 1 if self.summary()["violated"] else 0

    def as_dict(self) -> dict:
        ordered = sorted(self.records, key=lambda r: (r.check, r.trial))
        return {
            "tool": f"tamebounds {self.version}",
            "seed": self.seed,
            "checks": [r.as_dict() for r in ordered],
            "summary": self.summary(),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2) + "\n"
