"""The ``.dyn`` system-description format.

A file is line oriented; ``#`` starts a comment.  Example::

    dynlab-system 1
    metric line
    point a 0
    point b 1
    map a b
    map b a

With ``metric line`` or ``metric circle`` every point carries a coordinate
(circle coordinates are taken mod 1 with arc-length distance).  Without a
``metric`` line the distances are listed explicitly, one ``dist <a> <b> <r>``
line per unordered pair.  Rationals are written ``p/q`` or as integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .space import FiniteMetricSpace, circle_space, line_space, validate_metric
from .system import SystemMap

FORMAT_VERSION = 1
_RATIONAL = re.compile(r"^[+-]?\d+(?:/\d+)?$")


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass
class SystemDocument:
    format_version: int = FORMAT_VERSION
    labels: list[str] = field(default_factory=list)
    geometry: str | None = None  # "line", "circle" or None for explicit distances
    coords: dict[str, Fraction] = field(default_factory=dict)
    dists: dict[frozenset, Fraction] = field(default_factory=dict)
    mapping: dict[str, str] = field(default_factory=dict)


def parse_rational(token: str) -> Fraction:
    if not _RATIONAL.match(token):
        raise ValueError(f"invalid rational {token!r}")
    num, _, den = token.partition("/")
    if den and int(den) == 0:
        raise ValueError(f"invalid rational {token!r} (zero denominator)")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def _tokens(raw: str):
    """(column, token) pairs of a line, 1-based columns, comment stripped."""
    text = raw.split("#", 1)[0]
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", text)]


def parse_system_file(text: str) -> tuple[SystemDocument, FiniteMetricSpace, SystemMap]:
    doc = SystemDocument()
    seen_header = False
    point_line: dict[str, int] = {}
    dist_line: dict[frozenset, int] = {}
    map_line: dict[str, int] = {}
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last = lineno
        toks = _tokens(raw)
        if not toks:
            continue
        (col, kw), args = toks[0], toks[1:]

        def fail(msg, at=col):
            raise ParseError(lineno, at, msg)

        def rational(i):
            c, tok = args[i]
            try:
                return parse_rational(tok)
            except ValueError as exc:
                raise ParseError(lineno, c, str(exc)) from None

        def arity(*counts):
            if len(args) not in counts:
                fail(f"{kw!r} takes {' or '.join(map(str, counts))} argument(s), got {len(args)}")

        if not seen_header:
            if kw != "dynlab-system":
                fail("expected header 'dynlab-system <version>'")
            arity(1)
            if args[0][1] != str(FORMAT_VERSION):
                fail(f"unsupported format version {args[0][1]!r}", args[0][0])
            seen_header = True
            continue
        if kw == "metric":
            arity(1)
            if doc.geometry is not None:
                fail("duplicate metric line")
            if args[0][1] not in ("line", "circle"):
                fail(f"unknown metric {args[0][1]!r} (expected line or circle)", args[0][0])
            doc.geometry = args[0][1]
        elif kw == "point":
            arity(1, 2)
            c, label = args[0]
            if label in point_line:
                raise ParseError(lineno, c, f"duplicate label {label!r} (first on line {point_line[label]})")
            point_line[label] = lineno
            doc.labels.append(label)
            if len(args) == 2:
                doc.coords[label] = rational(1)
        elif kw == "dist":
            arity(3)
            a, b = args[0][1], args[1][1]
            for c, lab in args[:2]:
                if lab not in point_line:
                    raise ParseError(lineno, c, f"unknown point {lab!r}")
            key = frozenset((a, b))
            value = rational(2)
            if key in doc.dists and doc.dists[key] != value:
                fail(f"conflicting distance for {a}, {b} (line {dist_line[key]})")
            doc.dists[key] = value
            dist_line[key] = lineno
        elif kw == "map":
            arity(2)
            for c, lab in args:
                if lab not in point_line:
                    raise ParseError(lineno, c, f"unknown point {lab!r}")
            src = args[0][1]
            if src in map_line:
                raise ParseError(lineno, args[0][0], f"{src!r} already mapped on line {map_line[src]}")
            map_line[src] = lineno
            doc.mapping[src] = args[1][1]
        else:
            fail(f"unknown keyword {kw!r}")

    end = last + 1
    if not seen_header:
        raise ParseError(end, 1, "missing header 'dynlab-system <version>'")
    if not doc.labels:
        raise ParseError(end, 1, "no points declared")
    if doc.geometry is not None:
        if doc.dists:
            line = min(dist_line.values())
            raise ParseError(line, 1, "dist lines are not allowed with a metric line")
        for lab in doc.labels:
            if lab not in doc.coords:
                raise ParseError(point_line[lab], 1, f"point {lab!r} needs a coordinate under metric {doc.geometry}")
    else:
        for lab in doc.labels:
            if lab in doc.coords:
                raise ParseError(point_line[lab], 1, "coordinates need a 'metric line|circle' declaration")
    missing = [lab for lab in doc.labels if lab not in doc.mapping]
    if missing:
        raise ParseError(end, 1, f"map is not total: no image for {', '.join(missing)}")

    space = _space_of(doc, point_line)
    bad = validate_metric(space)
    if bad is not None:
        # the offending distance joins the first and last named points (a, c for a triangle)
        line = dist_line.get(frozenset((bad.points[0], bad.points[-1])), point_line[bad.points[0]])
        raise ParseError(line, 1, f"metric violation: {bad}")
    f = SystemMap(space, tuple(space.index(doc.mapping[lab]) for lab in doc.labels))
    return doc, space, f


def _space_of(doc: SystemDocument, point_line=None) -> FiniteMetricSpace:
    labels = doc.labels
    if doc.geometry == "line":
        return line_space([doc.coords[l] for l in labels], labels)
    if doc.geometry == "circle":
        return circle_space([doc.coords[l] for l in labels], labels)
    table = []
    for a in labels:
        row = []
        for b in labels:
            if a == b:
                row.append(doc.dists.get(frozenset((a,)), Fraction(0)))
                continue
            key = frozenset((a, b))
            if key not in doc.dists:
                line = (point_line or {}).get(b, 0)
                raise ParseError(line, 1, f"missing distance between {a} and {b}")
            row.append(doc.dists[key])
        table.append(tuple(row))
    return FiniteMetricSpace(tuple(labels), tuple(table))


def document_of(f: SystemMap) -> SystemDocument:
    space = f.space
    doc = SystemDocument(labels=list(space.labels))
    if space.geometry in ("line", "circle") and space.coords is not None:
        doc.geometry = space.geometry
        doc.coords = dict(zip(space.labels, space.coords))
    else:
        n = len(space)
        for a in range(n):
            for b in range(a + 1, n):
                doc.dists[frozenset((space.labels[a], space.labels[b]))] = space.dist[a][b]
    doc.mapping = {space.labels[x]: space.labels[y] for x, y in enumerate(f.image)}
    return doc


def serialize(doc: SystemDocument) -> str:
    out = [f"dynlab-system {doc.format_version}"]
    if doc.geometry is not None:
        out.append(f"metric {doc.geometry}")
        out.extend(f"point {lab} {format_rational(doc.coords[lab])}" for lab in doc.labels)
    else:
        out.extend(f"point {lab}" for lab in doc.labels)
        labels = doc.labels
        for i, a in enumerate(labels):
            for b in labels[i + 1:]:
                out.append(f"dist {a} {b} {format_rational(doc.dists[frozenset((a, b))])}")
    out.extend(f"map {lab} {doc.mapping[lab]}" for lab in doc.labels)
    return "\n".join(out) + "\n"


def serialize_system(f: SystemMap) -> str:
    return serialize(document_of(f))


def load_system(path) -> SystemMap:
    with open(path, encoding="utf-8") as fh:
        return parse_system_file(fh.read())[2]
