"""Finite metric spaces with exact rational distances.

Every distance is a :class:`fractions.Fraction`; nothing in the package uses
floating point.  Balls and components use strict inequalities, so a grid with
spacing ``g`` has only singleton ``g``-components (``d < g`` never holds
between distinct grid points).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .config import max_points

Point = Union[int, str]


class UnknownPointError(KeyError):
    pass


@dataclass(frozen=True)
class MetricViolation:
    """Why a distance table is not a metric.

    ``axiom`` is one of ``"shape"``, ``"identity"``, ``"positivity"``,
    ``"symmetry"`` or ``"triangle"``; ``points`` names the offending pair or
    triple by label.
    """

    axiom: str
    points: tuple[str, ...]
    detail: str = ""

    def __str__(self) -> str:
        where = ", ".join(self.points)
        return f"{self.axiom} violated at ({where}){': ' + self.detail if self.detail else ''}"


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    labels: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]
    # Optional embedding the space was built from; used only for serialization.
    coords: tuple[Fraction, ...] | None = field(default=None, compare=False)
    geometry: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("point labels must be distinct")
        if len(self.labels) > max_points():
            raise ValueError(f"space has {len(self.labels)} points, cap is {max_points()}")
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other):
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.labels == other.labels and self.dist == other.dist

    def __hash__(self):
        return hash((self.labels, self.dist))

    @property
    def points(self) -> range:
        return range(len(self.labels))

    def index(self, p: Point) -> int:
        """Resolve a label or an index to an index."""
        if isinstance(p, str):
            try:
                return self._index[p]
            except KeyError:
                raise UnknownPointError(p) from None
        if isinstance(p, int) and 0 <= p < len(self.labels):
            return p
        raise UnknownPointError(p)

    def d(self, a: Point, b: Point) -> Fraction:
        return self.dist[self.index(a)][self.index(b)]

    def label_set(self, indices: Iterable[int]) -> set[str]:
        return {self.labels[i] for i in indices}

    def diameter(self, block: Iterable[int] | None = None) -> Fraction:
        pts = list(self.points if block is None else block)
        return max((self.dist[a][b] for a in pts for b in pts), default=Fraction(0))


def from_table(labels: Sequence[str], table: Sequence[Sequence]) -> FiniteMetricSpace:
    """Build a space from a square table, converting entries to Fractions.

    No validation beyond squareness; call :func:`validate_metric`.
    """
    n = len(labels)
    if len(table) != n or any(len(row) != n for row in table):
        raise ValueError("distance table must be square and match the labels")
    dist = tuple(tuple(Fraction(v) for v in row) for row in table)
    return FiniteMetricSpace(tuple(labels), dist)


def line_space(coords: Sequence, labels: Sequence[str] | None = None) -> FiniteMetricSpace:
    xs = tuple(Fraction(c) for c in coords)
    labels = tuple(labels) if labels is not None else tuple(str(x) for x in xs)
    dist = tuple(tuple(abs(a - b) for b in xs) for a in xs)
    return FiniteMetricSpace(labels, dist, coords=xs, geometry="line")


def circle_space(coords: Sequence, labels: Sequence[str] | None = None) -> FiniteMetricSpace:
    """Points of the circle R/Z with arc-length metric ``min(|x-y|, 1-|x-y|)``."""
    xs = tuple(Fraction(c) % 1 for c in coords)
    labels = tuple(labels) if labels is not None else tuple(str(x) for x in xs)

    def arc(a, b):
        g = abs(a - b)
        return min(g, 1 - g)

    dist = tuple(tuple(arc(a, b) for b in xs) for a in xs)
    return FiniteMetricSpace(labels, dist, coords=xs, geometry="circle")


def validate_metric(space: FiniteMetricSpace) -> MetricViolation | None:
    """Return ``None`` if the table is a metric, else the first violation found.

    Checks are ordered identity, positivity, symmetry, triangle, and the
    triangle scan is exhaustive over ordered triples.
    """
    n = len(space)
    lab = space.labels
    dist = space.dist
    if len(dist) != n or any(len(row) != n for row in dist):
        return MetricViolation("shape", (), "distance table is not square")
    for a in range(n):
        if dist[a][a] != 0:
            return MetricViolation("identity", (lab[a], lab[a]), f"d = {dist[a][a]}")
    for a, b in itertools.combinations(range(n), 2):
        if dist[a][b] <= 0:
            return MetricViolation("positivity", (lab[a], lab[b]), f"d = {dist[a][b]}")
        if dist[a][b] != dist[b][a]:
            return MetricViolation("symmetry", (lab[a], lab[b]), f"{dist[a][b]} != {dist[b][a]}")
    for a in range(n):
        row_a = dist[a]
        for b in range(n):
            dab = row_a[b]
            row_b = dist[b]
            for c in range(n):
                if row_a[c] > dab + row_b[c]:
                    return MetricViolation(
                        "triangle",
                        (lab[a], lab[b], lab[c]),
                        f"d({lab[a]},{lab[c]}) = {row_a[c]} > {dab} + {row_b[c]}",
                    )
    return None


def distance_spectrum(space: FiniteMetricSpace) -> list[Fraction]:
    """Sorted distinct distances, starting with 0."""
    return sorted({v for row in space.dist for v in row})


def positive_spectrum(space: FiniteMetricSpace) -> list[Fraction]:
    return distance_spectrum(space)[1:]


def min_gap(space: FiniteMetricSpace) -> Fraction | None:
    spec = distance_spectrum(space)
    return spec[1] if len(spec) > 1 else None


def ball(space: FiniteMetricSpace, center: Point, radius) -> frozenset[int]:
    """Open ball ``{y : d(center, y) < radius}``."""
    radius = Fraction(radius)
    if radius < 0:
        raise ValueError("radius must be non-negative")
    row = space.dist[space.index(center)]
    return frozenset(y for y in space.points if row[y] < radius)


def h_components(space: FiniteMetricSpace, h) -> list[frozenset[int]]:
    """Classes of the transitive closure of ``d(x, y) < h``.

    Returned in order of their smallest member.
    """
    h = Fraction(h)
    if h <= 0:
        raise ValueError("h must be positive")
    n = len(space)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in itertools.combinations(range(n), 2):
        if space.dist[a][b] < h:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    blocks: dict[int, list[int]] = {}
    for x in range(n):
        blocks.setdefault(find(x), []).append(x)
    return sorted((frozenset(b) for b in blocks.values()), key=min)


@dataclass(frozen=True)
class ClopenCover:
    """Partition into well-separated small blocks.

    ``separation`` is ``None`` when there is a single block (nothing to
    separate from).
    """

    blocks: tuple[frozenset[int], ...]
    separation: Fraction | None
    max_diameter: Fraction


def _separation(space: FiniteMetricSpace, blocks: Sequence[frozenset[int]]) -> Fraction | None:
    best = None
    for i, j in itertools.combinations(range(len(blocks)), 2):
        for a in blocks[i]:
            for b in blocks[j]:
                v = space.dist[a][b]
                if best is None or v < best:
                    best = v
    return best


def clopen_cover(space: FiniteMetricSpace, epsilon) -> ClopenCover | None:
    """Best-separated h-component cover with every block diameter < epsilon.

    Scans every positive spectrum value as ``h``; ties in separation go to
    the finer cover.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    best: ClopenCover | None = None
    seen = set()
    for h in positive_spectrum(space) or [Fraction(1)]:
        blocks = tuple(h_components(space, h))
        if blocks in seen:
            continue
        seen.add(blocks)
        diam = max(space.diameter(b) for b in blocks)
        if diam >= epsilon:
            # h-components only coarsen as h grows
            break
        cover = ClopenCover(blocks, _separation(space, blocks), diam)
        if best is None or _sep_key(cover) > _sep_key(best):
            best = cover
    return best


def _sep_key(cover: ClopenCover):
    # a single block counts as infinitely separated
    return (1, 0) if cover.separation is None else (0, cover.separation)
