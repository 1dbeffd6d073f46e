"""Refinement studies: the largest workable delta as the discretization refines."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from . import config
from .reports import rational
from .shadowing import decide_eventual_shadowing, delta_candidates, max_delta
from .space import positive_spectrum
from .system import build_example

FAMILIES = {
    "cantor_identity": "cantor({}, identity)",
    "cantor_t": "cantor({})",
    "interval_identity": "interval_grid({})",
    "shift_to_limit": "shift_to_limit({})",
    "cone": "cone(cantor(1), {})",
}


@dataclass
class StudyRow:
    family: str
    builder: str
    level: int
    epsilon: Fraction
    max_delta: Fraction | None
    attained: bool | None
    notes: str = ""

    def as_record(self) -> dict:
        return {
            "family": self.family,
            "builder": self.builder,
            "level": self.level,
            "epsilon": rational(self.epsilon),
            "max_delta": "" if self.max_delta is None else rational(self.max_delta),
            "attained": "" if self.attained is None else str(self.attained).lower(),
            "notes": self.notes,
        }


@dataclass
class StudyTable:
    family: str
    rows: list[StudyRow] = field(default_factory=list)

    COLUMNS = ("family", "builder", "level", "epsilon", "max_delta", "attained", "notes")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row.as_record())
        return buf.getvalue()


EpsilonSpec = Union[Fraction, str, Sequence[Fraction]]


def run_refinement_study(family: str, levels: Iterable[int], epsilon: EpsilonSpec) -> StudyTable:
    """One row per (level, epsilon) with the exact largest workable delta.

    ``epsilon`` may be one value, a list, or ``"spectrum"`` for every positive
    distance of each level's space.  Cone rows also record the eventual
    shadowing verdict just above the largest workable delta.  A level whose
    search exceeds the budget gets a marked row and the run continues.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    levels = list(levels)
    if not levels:
        raise ValueError("need at least one level")
    table = StudyTable(family)
    for level in levels:
        builder = FAMILIES[family].format(level)
        f = build_example(builder)
        if isinstance(epsilon, str):
            if epsilon != "spectrum":
                raise ValueError(f"unknown epsilon spec {epsilon!r}")
            eps_list = positive_spectrum(f.space)
        elif isinstance(epsilon, (list, tuple)):
            eps_list = [Fraction(e) for e in epsilon]
        else:
            eps_list = [Fraction(epsilon)]
        for eps in eps_list:
            if eps <= 0:
                raise ValueError("epsilon must be positive")
            try:
                md = max_delta(f, eps)
            except config.BudgetExceeded as exc:
                table.rows.append(StudyRow(family, builder, level, eps, None, None, f"budget exceeded: {exc}"))
                continue
            notes = "shadowing for every delta" if not md.attained else f"NO just above {rational(md.value)}"
            if family == "cone" and md.attained:
                notes += "; " + _eventual_note(f, eps, md.value)
            table.rows.append(StudyRow(family, builder, level, eps, md.value, md.attained, notes))
    return table


def _eventual_note(f, eps, value) -> str:
    above = [c for c in delta_candidates(f) if c > value]
    nxt = above[0] if above else value + 1
    try:
        verdict = decide_eventual_shadowing(f, eps, nxt)
    except config.BudgetExceeded:
        return f"eventual shadowing at {rational(nxt)}: budget exceeded"
    return f"eventual shadowing at {rational(nxt)}: {'yes' if verdict else 'no'}"


def parse_levels(text: str) -> list[int]:
    """``"1..4"`` or ``"2,4,8"``."""
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if hi < lo:
            raise ValueError(f"empty level range {text!r}")
        return list(range(lo, hi + 1))
    return [int(t) for t in text.split(",") if t.strip()]
