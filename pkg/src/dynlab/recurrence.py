"""Recurrence, rigidity and chain structure of finite systems.

On a finite space a point is recurrent exactly when it is periodic, so the
recurrent systems are the permutations.  Chain reach and chain classes are
computed per delta from the step graph, using walks of length at least one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .orbits import build_step_graph, orbit_lasso
from .space import Point, ball, min_gap, positive_spectrum
from .system import (
    IterateProfile,
    SystemMap,
    identity,
    iterate_semigroup,
    periodic_set,
    rho_distance,
)


def periodic_points(f: SystemMap) -> frozenset[int]:
    return frozenset(periodic_set(f))


def system_period(f: SystemMap) -> int | None:
    """Least n > 0 with f^n = id, or None if f is not a permutation."""
    if not f.is_permutation():
        return None
    return iterate_semigroup(f).cycle_len


def return_time(f: SystemMap, x: Point, epsilon) -> int | None:
    """Least n > 0 with ``d(f^n x, x) < epsilon``; None if it never happens.

    The orbit has repeated itself after transient + cycle steps, so that many
    iterates decide it.
    """
    epsilon = Fraction(epsilon)
    x = f.space.index(x)
    tail, cyc = orbit_lasso(f, x)
    row = f.space.dist[x]
    y = x
    for n in range(1, len(tail) + len(cyc) + 1):
        y = f.image[y]
        if row[y] < epsilon:
            return n
    return None


@dataclass(frozen=True)
class RecurrenceReport:
    is_recurrent_system: bool
    period: int | None
    # return_times[eps][x] = least epsilon-return time of x (None: never)
    return_times: dict[Fraction, tuple[int | None, ...]]


def recurrence_report(f: SystemMap) -> RecurrenceReport:
    times = {
        eps: tuple(return_time(f, x, eps) for x in f.space.points)
        for eps in positive_spectrum(f.space)
    }
    return RecurrenceReport(f.is_permutation(), system_period(f), times)


def rigidity_defect(f: SystemMap, N: int) -> Fraction:
    """``min_{1 <= n <= N} rho(f^n, id)``."""
    if N < 1:
        raise ValueError("horizon must be at least 1")
    ident = identity(f.space)
    best = None
    g = f
    for n in range(1, N + 1):
        v = rho_distance(g, ident)
        if best is None or v < best:
            best = v
            if v == 0:
                break
        g = f.compose(g)
    return best


def almost_periodic_bound(f: SystemMap, x: Point, epsilon) -> int | None:
    """Least l such that every l consecutive orbit points meet ``B(x, eps)``.

    None when the eventual cycle of ``x`` stays outside the ball, since then
    late windows never return.
    """
    x = f.space.index(x)
    near = ball(f.space, x, epsilon)
    tail, cyc = orbit_lasso(f, x)
    if not any(p in near for p in cyc):
        return None
    seq = list(tail) + list(cyc) * 2
    # windows starting past the transient repeat with the cycle
    best = 0
    for start in range(len(tail) + len(cyc)):
        k = start
        while seq[k] not in near:
            k += 1
        best = max(best, k - start + 1)
    return best


def chain_reach(f: SystemMap, p: Point, delta) -> frozenset[int]:
    """Points reachable from ``p`` by a delta-chain of at least one step."""
    succ = build_step_graph(f, delta).successors
    p = f.space.index(p)
    seen: set[int] = set()
    frontier = list(succ[p])
    while frontier:
        y = frontier.pop()
        if y in seen:
            continue
        seen.add(y)
        frontier.extend(succ[y])
    return frozenset(seen)


def chain_accessible_set(f: SystemMap, p: Point) -> frozenset[int]:
    """Intersection of the per-delta reaches over every positive candidate.

    Reach only grows with delta, so this is the reach at the smallest
    candidate.
    """
    cands = positive_spectrum(f.space)
    if not cands:
        return chain_reach(f, p, 1)
    out = None
    for d in cands:
        r = chain_reach(f, p, d)
        out = r if out is None else out & r
    return out


@dataclass(frozen=True)
class ChainClass:
    members: frozenset[int]
    delta: Fraction
    transitive: bool
    minimal: bool


def _cycles(f: SystemMap) -> list[frozenset[int]]:
    out, seen = [], set()
    for p in sorted(periodic_set(f)):
        if p not in seen:
            _, cyc = orbit_lasso(f, p)
            seen.update(cyc)
            out.append(frozenset(cyc))
    return out


def chain_classes(f: SystemMap, delta) -> list[ChainClass]:
    """Strongly connected components of the step graph carrying a closed walk."""
    delta = Fraction(delta)
    g = build_step_graph(f, delta)
    graph = nx.DiGraph()
    graph.add_nodes_from(f.space.points)
    graph.add_edges_from(g.edges())
    cycles = set(_cycles(f))
    out = []
    for scc in nx.strongly_connected_components(graph):
        scc = frozenset(scc)
        if len(scc) == 1:
            (x,) = scc
            if x not in g.successors[x]:
                continue
        out.append(ChainClass(scc, delta, True, scc in cycles))
    return sorted(out, key=lambda c: min(c.members))


@dataclass
class ClassificationReport:
    is_permutation: bool
    period: int | None
    horizon: int
    rigidity_defect: Fraction
    iterate_profile: IterateProfile
    chain_class_summary: list[dict] = field(default_factory=list)
    theorem_notes: list[str] = field(default_factory=list)


def classify_system(f: SystemMap, horizon: int | None = None) -> ClassificationReport:
    """Gather the structural data and the shadowing predictions it triggers.

    ``horizon`` defaults to transient + period, which covers every distinct
    iterate, so the defect is then exact over all n.
    """
    prof = iterate_semigroup(f)
    if horizon is None:
        horizon = prof.tail_len + prof.cycle_len
    perm = f.is_permutation()
    period = prof.cycle_len if perm else None
    defect = rigidity_defect(f, horizon)
    summary = []
    for d in positive_spectrum(f.space):
        classes = chain_classes(f, d)
        summary.append(
            {
                "delta": d,
                "classes": len(classes),
                "sizes": [len(c.members) for c in classes],
                "all_minimal": all(c.minimal for c in classes),
            }
        )

    notes = []
    gap = min_gap(f.space)
    if perm:
        notes.append(
            f"permutation of period {period}: f^{period} = id, so the periodic-system "
            "argument governs the largest workable delta (clopen cover separation)"
        )
        if gap is not None:
            fine = next(s for s in summary if s["delta"] == gap)
            if fine["all_minimal"]:
                notes.append(
                    "at delta = min gap every chain class is a single f-cycle: "
                    "the space splits into its minimal subsets"
                )
    else:
        notes.append("not a permutation: some points are not recurrent")
    if defect == 0:
        notes.append(f"uniformly rigid at horizon {horizon} (some iterate equals the identity)")
    else:
        notes.append(f"rigidity defect {defect} at horizon {horizon}: never within {defect} of the identity")
    if prof.limit_constant is not None:
        c = f.space.labels[prof.limit_constant]
        notes.append(
            f"iterates converge to the constant {c} after {prof.tail_len} steps: "
            "shadowing holds with the constructive convergence delta"
        )
        if not perm and defect > 0 and len(f.space) > 1:
            notes.append(
                "transient points feed a fixed limit (shift-to-limit pattern): expect the "
                "largest workable delta to be about the smallest gap next to the limit"
            )
    elif not perm:
        R = prof.eventual_image
        notes.append(
            f"eventual image has {len(R)} points; if it is large and epsilon-connected "
            "expect a small largest workable delta (retract-rigid obstruction)"
        )
    return ClassificationReport(perm, period, horizon, defect, prof, summary, notes)


def lcm_of_cycles(f: SystemMap) -> int:
    return math.lcm(*(len(c) for c in _cycles(f))) if periodic_set(f) else 1
