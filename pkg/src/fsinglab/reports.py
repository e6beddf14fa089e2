"""Small report records shared by the checkers."""

from __future__ import annotations

from dataclasses import dataclass

from .ideals import Ideal


def show_ideal(I: Ideal) -> str:
    return "(" + ", ".join(I.render()) + ")"


@dataclass
class ClauseReport:
    clause: str
    hypothesis_status: str
    lhs: str
    rhs: str
    verdict: str
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict in ("pass", "out of clause range")

    def to_dict(self) -> dict:
        out = {
            "clause": self.clause,
            "hypothesis_status": self.hypothesis_status,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "verdict": self.verdict,
        }
        if self.note:
            out["note"] = self.note
        return out
