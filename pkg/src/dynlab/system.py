"""Self-maps of finite metric spaces and the example systems.

A :class:`SystemMap` is an index table ``image[x] = f(x)``.  On a finite
space every map is continuous, but the quantitative moduli used by the
constructive shadowing arguments are still meaningful and computed exactly.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .space import (
    FiniteMetricSpace,
    Point,
    circle_space,
    line_space,
    validate_metric,
)

INFINITE = math.inf


class InvalidSystem(ValueError):
    pass


@dataclass(frozen=True)
class SystemMap:
    space: FiniteMetricSpace
    image: tuple[int, ...]

    def __call__(self, x: Point) -> int:
        return self.image[self.space.index(x)]

    def __len__(self) -> int:
        return len(self.image)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.space.labels

    def is_permutation(self) -> bool:
        return len(set(self.image)) == len(self.image)

    def compose(self, other: "SystemMap") -> "SystemMap":
        """``self ∘ other``."""
        _same_space(self, other)
        return SystemMap(self.space, tuple(self.image[y] for y in other.image))

    def power(self, n: int) -> "SystemMap":
        if n < 0:
            raise ValueError("negative iterate")
        return SystemMap(self.space, _table_power(self.image, n))

    def orbit(self, x: Point, length: int) -> list[int]:
        x = self.space.index(x)
        out = []
        for _ in range(length):
            out.append(x)
            x = self.image[x]
        return out


def _table_power(table: tuple[int, ...], n: int) -> tuple[int, ...]:
    result = tuple(range(len(table)))
    base = table
    while n:
        if n & 1:
            result = tuple(base[y] for y in result)
        base = tuple(base[y] for y in base)
        n >>= 1
    return result


def _same_space(f: SystemMap, g: SystemMap) -> None:
    if f.space != g.space:
        raise InvalidSystem("maps live on different spaces")


def identity(space: FiniteMetricSpace) -> SystemMap:
    return SystemMap(space, tuple(space.points))


def constant(space: FiniteMetricSpace, c: Point) -> SystemMap:
    c = space.index(c)
    return SystemMap(space, tuple(c for _ in space.points))


def from_mapping(space: FiniteMetricSpace, mapping) -> SystemMap:
    """Build from a dict (labels or indices) or a sequence of images."""
    if isinstance(mapping, dict):
        table = [None] * len(space)
        for a, b in mapping.items():
            table[space.index(a)] = space.index(b)
        if None in table:
            missing = [space.labels[i] for i, v in enumerate(table) if v is None]
            raise InvalidSystem(f"map is not total; missing {missing}")
        return SystemMap(space, tuple(table))
    return SystemMap(space, tuple(space.index(b) for b in mapping))


def validate_system(f: SystemMap) -> str | None:
    """``None`` if the table is total and in range, else a description."""
    n = len(f.space)
    if len(f.image) != n:
        return f"map table has {len(f.image)} entries for {n} points"
    for x, y in enumerate(f.image):
        if not isinstance(y, int) or not 0 <= y < n:
            return f"image of {f.space.labels[x]} is out of range: {y!r}"
    return None


def rho_distance(f: SystemMap, g: SystemMap) -> Fraction:
    """Sup metric ``max_x d(f(x), g(x))``."""
    _same_space(f, g)
    dist = f.space.dist
    return max((dist[a][b] for a, b in zip(f.image, g.image)), default=Fraction(0))


def continuity_modulus(f: SystemMap, eta, n: int):
    """Largest spectrum value delta with
    ``d(a,b) < delta  =>  d(f^i a, f^i b) < eta`` for all ``i <= n``.

    Returns :data:`INFINITE` when no pair ever spreads to ``eta``.
    """
    eta = Fraction(eta)
    if eta <= 0 or n < 0:
        raise ValueError("need eta > 0 and n >= 0")
    space = f.space
    dist = space.dist
    size = len(space)
    # spread[a][b] = max_{i<=n} d(f^i a, f^i b), accumulated iterate by iterate
    cur = tuple(range(size))
    bad_min = None
    spread = [[dist[a][b] for b in range(size)] for a in range(size)]
    for _ in range(n):
        cur = tuple(f.image[y] for y in cur)
        for a in range(size):
            row = spread[a]
            da = dist[cur[a]]
            for b in range(a + 1, size):
                v = da[cur[b]]
                if v > row[b]:
                    row[b] = v
    for a in range(size):
        for b in range(a + 1, size):
            if spread[a][b] >= eta:
                if bad_min is None or dist[a][b] < bad_min:
                    bad_min = dist[a][b]
    return INFINITE if bad_min is None else bad_min


@dataclass(frozen=True)
class IterateProfile:
    tail_len: int
    cycle_len: int
    idempotent_exp: int
    eventual_image: frozenset[int]
    limit_constant: int | None


def iterate_semigroup(f: SystemMap) -> IterateProfile:
    """Index and period of the cyclic semigroup generated by ``f``.

    ``f^(t+c) = f^t`` with ``t`` the longest transient and ``c`` the lcm of the
    cycle lengths; both are read off the functional graph rather than by
    iterating, so large periods stay cheap.
    """
    image = f.image
    periodic = periodic_set(f)
    tail = 0
    for x in range(len(image)):
        steps = 0
        while x not in periodic:
            x = image[x]
            steps += 1
        tail = max(tail, steps)
    cycle = 1
    seen = set()
    for p in sorted(periodic):
        if p in seen:
            continue
        length = 0
        y = p
        while True:
            seen.add(y)
            y = image[y]
            length += 1
            if y == p:
                break
        cycle = math.lcm(cycle, length)
    m = cycle * max(1, -(-max(tail, 1) // cycle))
    R = frozenset(periodic)
    limit = next(iter(R)) if len(R) == 1 else None
    return IterateProfile(tail, cycle, m, R, limit)


def periodic_set(f: SystemMap) -> set[int]:
    """Points lying on cycles of ``f``."""
    image = f.image
    n = len(image)
    # state: 0 unvisited, 1 on current path, 2 done
    state = [0] * n
    periodic: set[int] = set()
    for start in range(n):
        if state[start]:
            continue
        path = []
        x = start
        while state[x] == 0:
            state[x] = 1
            path.append(x)
            x = image[x]
        if state[x] == 1:
            periodic.update(path[path.index(x):])
        for y in path:
            state[y] = 2
    return periodic


# ---------------------------------------------------------------- builders


def interval_grid(n: int, map: str = "identity") -> SystemMap:
    """``{0, 1/n, ..., 1}`` with the line metric."""
    if n < 1:
        raise InvalidSystem("interval_grid needs n >= 1")
    space = line_space([Fraction(i, n) for i in range(n + 1)])
    if map != "identity":
        raise InvalidSystem(f"unknown interval map {map!r}")
    return identity(space)


def circle_grid(n: int, rotation=Fraction(0)) -> SystemMap:
    """``{0, 1/n, ..., (n-1)/n}`` on the circle, rotated by ``p/q`` with ``q | n``."""
    rotation = Fraction(rotation)
    if n < 1:
        raise InvalidSystem("circle_grid needs n >= 1")
    if n % rotation.denominator:
        raise InvalidSystem(f"rotation {rotation} does not preserve the {n}-point grid")
    space = circle_space([Fraction(i, n) for i in range(n)])
    shift = (rotation % 1) * n
    return SystemMap(space, tuple((i + int(shift)) % n for i in range(n)))


def cantor_endpoints(M: int) -> list[Fraction]:
    """All endpoints of the 2^M intervals at level M of the middle-thirds set."""
    intervals = [(Fraction(0), Fraction(1))]
    for _ in range(M):
        nxt = []
        for a, b in intervals:
            w = (b - a) / 3
            nxt.append((a, a + w))
            nxt.append((b - w, b))
        intervals = nxt
    return sorted({e for iv in intervals for e in iv})


def cantor_t(x: Fraction) -> Fraction:
    if x <= Fraction(1, 3):
        return 3 * x
    if x >= Fraction(2, 3):
        return Fraction(0)
    raise ValueError(f"{x} is not in the Cantor set")


def cantor(M: int, map: str = "t") -> SystemMap:
    """Level-M endpoint set E_M with the map t (or the identity)."""
    if M < 1:
        raise InvalidSystem("cantor needs M >= 1")
    pts = cantor_endpoints(M)
    space = line_space(pts)
    if map == "identity":
        return identity(space)
    if map != "t":
        raise InvalidSystem(f"unknown cantor map {map!r}")
    pos = {x: i for i, x in enumerate(pts)}
    return SystemMap(space, tuple(pos[cantor_t(x)] for x in pts))


def shift_to_limit(k: int) -> SystemMap:
    """Isolated points ``2^-j`` (j <= k) marching up to 1 and then onto the limit 0."""
    if k < 1:
        raise InvalidSystem("shift_to_limit needs k >= 1")
    pts = [Fraction(0)] + [Fraction(1, 2**j) for j in range(k, -1, -1)]
    space = line_space(pts)
    pos = {x: i for i, x in enumerate(pts)}

    def step(x):
        if x == 0 or x == 1:
            return Fraction(0)
        return 2 * x

    return SystemMap(space, tuple(pos[step(x)] for x in pts))


def cone(base: SystemMap, k: int) -> SystemMap:
    """Discrete cone over ``base`` with heights ``2^-j`` (j <= k) and an apex.

    ``f(y, s) = (g(y), s/2)``, the lowest level falls onto the apex, and
    ``d((y,s),(y',s')) = |s - s'| + min(s, s') * d_Y(y, y')``.  The table is
    checked against the metric axioms before it is returned.
    """
    if k < 1:
        raise InvalidSystem("cone needs k >= 1")
    heights = [Fraction(1, 2**j) for j in range(k + 1)]
    base_space = base.space
    cells = [(y, s) for s in heights for y in base_space.points]
    labels = [f"{base_space.labels[y]}@{s}" for y, s in cells] + ["apex"]
    apex = len(cells)
    dY = base_space.dist

    def d(a, b):
        if a == b:
            return Fraction(0)
        if a == apex or b == apex:
            other = cells[b if a == apex else a]
            return other[1]
        (y, s), (y2, s2) = cells[a], cells[b]
        return abs(s - s2) + min(s, s2) * dY[y][y2]

    size = apex + 1
    table = tuple(tuple(d(a, b) for b in range(size)) for a in range(size))
    space = FiniteMetricSpace(tuple(labels), table)
    bad = validate_metric(space)
    if bad is not None:
        raise InvalidSystem(f"cone metric is not a metric: {bad}")
    pos = {c: i for i, c in enumerate(cells)}
    image = []
    for y, s in cells:
        lower = s / 2
        image.append(pos[(base.image[y], lower)] if lower >= heights[-1] else apex)
    image.append(apex)
    return SystemMap(space, tuple(image))


def random_system(point_count: int, seed, permutation: bool = False) -> SystemMap:
    """Reproducible random system on distinct rational points of [0, 1]."""
    if point_count < 1:
        raise InvalidSystem("point_count must be >= 1")
    rng = random.Random(seed)
    denom = 4 * point_count
    coords = sorted(Fraction(v, denom) for v in rng.sample(range(denom + 1), point_count))
    space = line_space(coords)
    if permutation:
        table = list(range(point_count))
        rng.shuffle(table)
    else:
        table = [rng.randrange(point_count) for _ in range(point_count)]
    return SystemMap(space, tuple(table))


_SPEC = re.compile(r"^\s*([a-z_]+)\s*\((.*)\)\s*$")


def build_example(spec: str) -> SystemMap:
    """Build a named example from a call-like string.

    Recognized forms: ``interval_grid(n)``, ``circle_grid(n, p/q)``,
    ``cantor(M)``, ``cantor(M, identity)``, ``shift_to_limit(k)`` and
    ``cone(<base spec>, k)``.
    """
    m = _SPEC.match(spec)
    if not m:
        raise InvalidSystem(f"cannot parse example spec {spec!r}")
    name, argtext = m.group(1), m.group(2)
    args = _split_args(argtext)
    try:
        if name == "interval_grid":
            return interval_grid(int(args[0]), *args[1:])
        if name == "circle_grid":
            return circle_grid(int(args[0]), Fraction(args[1]) if len(args) > 1 else 0)
        if name == "cantor":
            return cantor(int(args[0]), *args[1:])
        if name == "shift_to_limit":
            return shift_to_limit(int(args[0]))
        if name == "cone":
            return cone(build_example(args[0]), int(args[1]))
    except (IndexError, ValueError) as exc:
        if isinstance(exc, InvalidSystem):
            raise
        raise InvalidSystem(f"bad arguments in {spec!r}: {exc}") from None
    raise InvalidSystem(f"unknown example family {name!r}")


def _split_args(text: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur).strip())
    return out
