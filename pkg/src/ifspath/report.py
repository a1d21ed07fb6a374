"""Structured analysis reports with lossless serialization.

Reports carry a verdict, keyed items (each value optionally tagged with the
provenance of the number: exact, certified-lower-bound, estimate, ...) and
nested child reports.  The structured format is deterministic JSON and
round-trips bit for bit; the text format prints constants to 15 significant
digits for reading.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, List, Optional

PASS = "PASS"
FAIL = "FAIL"
UNDECIDED = "UNDECIDED"
INFO = "INFO"
SKIPPED = "SKIPPED"


@dataclass
class ReportItem:
    key: str
    value: Any
    provenance: Optional[str] = None


@dataclass
class AnalysisReport:
    name: str
    verdict: str = INFO
    items: List[ReportItem] = field(default_factory=list)
    children: List["AnalysisReport"] = field(default_factory=list)

    def add(self, key: str, value: Any, provenance: Optional[str] = None) -> "AnalysisReport":
        self.items.append(ReportItem(key, value, provenance))
        return self

    def get(self, key: str, default=None):
        for item in self.items:
            if item.key == key:
                return item.value
        return default

    def child(self, name: str) -> Optional["AnalysisReport"]:
        for c in self.children:
            if c.name == name:
                return c
        return None

    # -- serialization --------------------------------------------------

    def to_obj(self) -> dict:
        return {
            "report": self.name,
            "verdict": self.verdict,
            "items": [
                {
                    "key": it.key,
                    "value": _encode_value(it.value),
                    **({"provenance": it.provenance} if it.provenance else {}),
                }
                for it in self.items
            ],
            "children": [c.to_obj() for c in self.children],
        }

    @staticmethod
    def from_obj(obj: dict) -> "AnalysisReport":
        rep = AnalysisReport(obj["report"], obj["verdict"])
        for it in obj["items"]:
            rep.add(it["key"], _decode_value(it["value"]), it.get("provenance"))
        for c in obj["children"]:
            rep.children.append(AnalysisReport.from_obj(c))
        return rep

    def to_structured(self) -> str:
        return json.dumps(self.to_obj(), indent=1, sort_keys=False)

    @staticmethod
    def from_structured(text: str) -> "AnalysisReport":
        return AnalysisReport.from_obj(json.loads(text))

    def to_text(self, indent: int = 0) -> str:
        pad = "  " * indent
        lines = [f"{pad}[{self.name}] {self.verdict}"]
        for it in self.items:
            tag = f"  ({it.provenance})" if it.provenance else ""
            lines.append(f"{pad}  {it.key} = {_format_value(it.value)}{tag}")
        for c in self.children:
            lines.append(c.to_text(indent + 1))
        return "\n".join(lines)


def _encode_value(v):
    if isinstance(v, Fraction):
        return {"frac": [v.numerator, v.denominator]}
    if isinstance(v, (list, tuple)):
        return {"seq": [_encode_value(x) for x in v]}
    if isinstance(v, (bool, int, float, str)) or v is None:
        return v
    return str(v)


def _decode_value(v):
    if isinstance(v, dict):
        if "frac" in v:
            return Fraction(v["frac"][0], v["frac"][1])
        if "seq" in v:
            return tuple(_decode_value(x) for x in v["seq"])
    return v


def _format_value(v) -> str:
    if isinstance(v, float):
        return format(v, ".15g")
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_format_value(x) for x in v) + ")"
    return str(v)
