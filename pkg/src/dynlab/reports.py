"""JSON analysis reports and Graphviz DOT export.

Reports follow one schema::

    {"operation": ..., "inputs": {...}, "verdict": ...,
     "certificate" | "witness": ..., "timing": {"elapsed_ms": int}}

Rationals are always written as ``"p/q"`` strings; there are no floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import fields, is_dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .orbits import LassoPseudoOrbit, StepGraph
from .recurrence import ChainClass
from .system import SystemMap


def rational(x) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def lasso_json(f: SystemMap, po: LassoPseudoOrbit) -> dict:
    lab = f.space.labels
    return {
        "stem": [lab[i] for i in po.stem],
        "cycle": [lab[i] for i in po.cycle],
        "delta": rational(po.delta),
    }


def jsonable(value, labels: Sequence[str] | None = None):
    """Recursively convert results to JSON-safe values.

    Frozensets of point indices become sorted label lists when ``labels`` is
    given.
    """
    if isinstance(value, bool) or value is None or isinstance(value, (str, int)):
        return value
    if isinstance(value, (Fraction, float)):
        return rational(value)
    if isinstance(value, (set, frozenset)):
        items = sorted(value)
        if labels is not None and all(isinstance(i, int) for i in items):
            return sorted(labels[i] for i in items)
        return [jsonable(v, labels) for v in items]
    if isinstance(value, dict):
        return {str(jsonable(k, labels)): jsonable(v, labels) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v, labels) for v in value]
    if is_dataclass(value):
        return {fl.name: jsonable(getattr(value, fl.name), labels) for fl in fields(value)}
    raise TypeError(f"cannot serialize {type(value).__name__}")


def make_report(operation: str, inputs: dict, verdict, elapsed_s: float, **extra) -> dict:
    report = {"operation": operation, "inputs": jsonable(inputs), "verdict": jsonable(verdict)}
    for key in ("certificate", "witness"):
        if key in extra and extra[key] is not None:
            report[key] = extra.pop(key)
    report.update({k: v for k, v in extra.items() if v is not None})
    report["timing"] = {"elapsed_ms": int(round(elapsed_s * 1000))}
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False)


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(
    f: SystemMap, graph: StepGraph, classes: Iterable[ChainClass] = (), name: str = "steps"
) -> str:
    """DOT text for a step graph; chain classes become clusters.

    Nodes and edges are emitted in label order so the output is stable.
    """
    lab = f.space.labels
    order = sorted(range(len(lab)), key=lambda i: lab[i])
    classes = sorted(classes, key=lambda c: min(lab[i] for i in c.members))
    clustered = set()
    lines = [f"digraph {_quote(name)} {{", f'  label={_quote("delta = " + rational(graph.delta))};']
    for k, cls in enumerate(classes):
        lines.append(f"  subgraph cluster_{k} {{")
        tag = "minimal" if cls.minimal else "chain class"
        lines.append(f"    label={_quote(tag)};")
        for i in sorted(cls.members, key=lambda i: lab[i]):
            lines.append(f"    {_quote(lab[i])};")
            clustered.add(i)
        lines.append("  }")
    for i in order:
        if i not in clustered:
            lines.append(f"  {_quote(lab[i])};")
    for i in order:
        for j in sorted(graph.successors[i], key=lambda j: lab[j]):
            style = " [style=bold]" if j == f.image[i] else ""
            lines.append(f"  {_quote(lab[i])} -> {_quote(lab[j])}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
