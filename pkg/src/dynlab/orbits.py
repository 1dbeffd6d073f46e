"""Chains, lasso pseudo-orbits and the delta-step graph.

A delta-chain for ``f`` is a sequence with ``d(f(x_i), x_{i+1}) < delta`` at
every step.  Infinite pseudo-orbits are represented as lassos (a finite stem
followed by a cycle repeated forever); on a finite space every pseudo-orbit
the deciders need to look at is of this form.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .space import Point
from .system import SystemMap, continuity_modulus, identity, rho_distance


class PreconditionError(ValueError):
    """A construction's hypothesis failed; ``index`` locates the failure."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class Chain:
    points: tuple[int, ...]
    delta: Fraction

    def __post_init__(self):
        if not self.points:
            raise ValueError("a chain has at least one point")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def start(self) -> int:
        return self.points[0]

    @property
    def end(self) -> int:
        return self.points[-1]


@dataclass(frozen=True)
class LassoPseudoOrbit:
    stem: tuple[int, ...]
    cycle: tuple[int, ...]
    delta: Fraction

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("lasso cycle must be nonempty")

    def __getitem__(self, i: int) -> int:
        s = len(self.stem)
        if i < s:
            return self.stem[i]
        return self.cycle[(i - s) % len(self.cycle)]

    def unroll(self, length: int) -> list[int]:
        return [self[i] for i in range(length)]

    def steps(self) -> list[tuple[int, int]]:
        """Every distinct consecutive pair of the infinite unrolling."""
        seq = list(self.stem) + list(self.cycle)
        pairs = list(zip(seq, seq[1:]))
        pairs.append((self.cycle[-1], self.cycle[0]))
        return pairs


def first_violation(f: SystemMap, seq: Sequence[Point], delta) -> int | None:
    """Index ``i`` of the first step ``x_i -> x_{i+1}`` that is not delta-close."""
    delta = Fraction(delta)
    space = f.space
    idx = [space.index(p) for p in seq]
    if not idx:
        raise ValueError("empty sequence")
    for i in range(len(idx) - 1):
        if space.dist[f.image[idx[i]]][idx[i + 1]] >= delta:
            return i
    return None


def validate_chain(f: SystemMap, seq: Sequence[Point], delta) -> int | None:
    """``None`` when ``seq`` is a delta-chain, else the first bad step index."""
    return first_violation(f, seq, delta)


def is_chain(f: SystemMap, seq: Sequence[Point], delta) -> bool:
    return first_violation(f, seq, delta) is None


def validate_lasso(f: SystemMap, po: LassoPseudoOrbit) -> int | None:
    """First bad step of the unrolling (stem positions first), or ``None``.

    The wrap step ``cycle[-1] -> cycle[0]`` is reported at index
    ``len(stem) + len(cycle) - 1``.
    """
    dist = f.space.dist
    for i, (a, b) in enumerate(po.steps()):
        if dist[f.image[a]][b] >= po.delta:
            return i
    return None


def make_chain(f: SystemMap, seq: Sequence[Point], delta) -> Chain:
    """Validated :class:`Chain` from labels or indices."""
    delta = Fraction(delta)
    bad = first_violation(f, seq, delta)
    if bad is not None:
        raise PreconditionError(f"step {bad} is not {delta}-close", bad)
    return Chain(tuple(f.space.index(p) for p in seq), delta)


def concatenate_chains(c1: Chain, c2: Chain) -> Chain:
    if c1.delta != c2.delta:
        raise ValueError(f"delta mismatch: {c1.delta} vs {c2.delta}")
    if c1.end != c2.start:
        raise ValueError("first chain must end where the second begins")
    return Chain(c1.points + c2.points[1:], c1.delta)


def orbit_lasso(f: SystemMap, x: Point) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split the forward orbit of ``x`` into its transient and its cycle."""
    x = f.space.index(x)
    seen: dict[int, int] = {}
    path = []
    while x not in seen:
        seen[x] = len(path)
        path.append(x)
        x = f.image[x]
    k = seen[x]
    return tuple(path[:k]), tuple(path[k:])


def extend_to_lasso(f: SystemMap, chain: Chain) -> LassoPseudoOrbit:
    """Continue a chain by the true orbit of its last point."""
    tail, cyc = orbit_lasso(f, chain.end)
    return LassoPseudoOrbit(chain.points[:-1] + tail, cyc, chain.delta)


def period_of(f: SystemMap, x: int) -> int | None:
    tail, cyc = orbit_lasso(f, x)
    return len(cyc) if not tail else None


def reverse_chain(f: SystemMap, x: Point, y: Point, delta) -> Chain | None:
    """A delta-chain from ``y`` back to ``x`` when ``y`` is close to ``f(x)``.

    ``x`` must be periodic and ``d(f(x), y)`` below the one-step continuity
    modulus at ``delta``.  The chain is ``y, f^2(x), ..., f^(M-1)(x), x`` with
    ``M`` the least multiple of the period exceeding 2.
    """
    delta = Fraction(delta)
    space = f.space
    x, y = space.index(x), space.index(y)
    period = period_of(f, x)
    if period is None:
        return None
    eta = continuity_modulus(f, delta, 1)
    if not space.dist[f.image[x]][y] < eta:
        return None
    M = period * (2 // period + 1)
    pts = [y]
    z = f.image[f.image[x]]
    for _ in range(1, M - 1):
        pts.append(z)
        z = f.image[z]
    pts.append(x)
    return Chain(tuple(pts), delta)


def _spatial_path(f: SystemMap, p: int, q: int, step) -> list[int] | None:
    """BFS path from p to q through jumps of length < step (lowest indices first)."""
    dist = f.space.dist
    prev = {p: None}
    queue = deque([p])
    while queue:
        a = queue.popleft()
        if a == q:
            break
        for b in f.space.points:
            if b not in prev and dist[a][b] < step:
                prev[b] = a
                queue.append(b)
    if q not in prev:
        return None
    path = [q]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def chain_through_component(f: SystemMap, p: Point, q: Point, delta) -> Chain | None:
    """Delta-chain from ``p`` to ``q`` inside their (delta/2)-component.

    Walks a spatial path ``p = x_0, ..., x_n = q`` with jumps under delta/2
    and runs each ``x_j`` through one full period before jumping on.  Only
    defined for permutations; otherwise, or if ``p`` and ``q`` lie in
    different components, returns ``None``.
    """
    delta = Fraction(delta)
    if not f.is_permutation():
        return None
    space = f.space
    p, q = space.index(p), space.index(q)
    half = delta / 2
    if p == q:
        period = period_of(f, p)
        return Chain(tuple(f.orbit(p, period)) + (p,), delta)
    path = _spatial_path(f, p, q, half)
    if path is None:
        return None
    pts: list[int] = []
    for x in path[:-1]:
        pts.extend(f.orbit(x, period_of(f, x)))
    pts.append(q)
    return Chain(tuple(pts), delta)


def block_pseudo_orbit(f: SystemMap, spatial_chain: Sequence[Point], N: int, delta) -> LassoPseudoOrbit:
    """Pseudo-orbit ``c_i = f^(i - jN)(a_j)`` for ``jN <= i < (j+1)N``.

    ``a_j`` is the spatial chain, held at its last point forever; the result
    is the stem of the first ``K`` blocks followed by the block of the final
    point repeated.
    """
    delta = Fraction(delta)
    space = f.space
    a = [space.index(p) for p in spatial_chain]
    if not a:
        raise PreconditionError("spatial chain is empty")
    if N < 1:
        raise PreconditionError("N must be positive")
    half = delta / 2
    for j in range(len(a) - 1):
        if not space.dist[a[j]][a[j + 1]] < half:
            raise PreconditionError(f"spatial step {j} is not below delta/2", j)
    if not rho_distance(f.power(N), identity(space)) < half:
        raise PreconditionError(f"rho(f^{N}, id) is not below delta/2")
    stem: list[int] = []
    for x in a[:-1]:
        stem.extend(f.orbit(x, N))
    return LassoPseudoOrbit(tuple(stem), tuple(f.orbit(a[-1], N)), delta)


def bad_cantor_pseudo_orbit(M: int, delta, system: SystemMap | None = None) -> LassoPseudoOrbit:
    """The cycle ``3^-M, 3^-(M-1), ..., 1/3, 1`` on the level-M Cantor system.

    Each step is exact except the wrap from 1, where ``t(1) = 0`` misses
    ``3^-M`` by exactly ``3^-M``, so ``delta`` must exceed that.
    """
    from .system import cantor

    delta = Fraction(delta)
    gap = Fraction(1, 3**M)
    if not delta > gap:
        raise PreconditionError(f"delta must exceed 3^-{M} = {gap}")
    f = system if system is not None else cantor(M)
    cyc = tuple(f.space.index(str(Fraction(3**i, 3**M))) for i in range(M + 1))
    return LassoPseudoOrbit((), cyc, delta)


@dataclass(frozen=True)
class StepGraph:
    """Edges ``x -> y`` exactly when ``d(f(x), y) < delta``."""

    delta: Fraction
    successors: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.successors)

    def edges(self) -> set[tuple[int, int]]:
        return {(x, y) for x, ys in enumerate(self.successors) for y in ys}

    def is_walk(self, seq: Sequence[int]) -> bool:
        return all(b in self.successors[a] for a, b in zip(seq, seq[1:]))


def build_step_graph(f: SystemMap, delta) -> StepGraph:
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    dist = f.space.dist
    succ = tuple(
        tuple(y for y, v in enumerate(dist[f.image[x]]) if v < delta) for x in f.space.points
    )
    return StepGraph(delta, succ)
