"""Exact (epsilon, delta)-shadowing decisions on finite systems.

The central object is the viable set ``W_i``: the possible positions
``f^i(z)`` of points ``z`` whose orbit has stayed epsilon-close to the
pseudo-orbit for the first ``i`` steps.  It evolves as

    W_0 = B(x_0, eps),    W_{i+1} = f(W_i) ∩ B(x_{i+1}, eps)

and a pseudo-orbit is shadowed exactly when it never empties (the surviving
initial points form a decreasing sequence of nonempty finite sets).  Running
this over all walks of the delta-step graph is a subset construction whose
states are pairs ``(x, W)``; sets are stored as int bitmasks.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx

from . import config
from .orbits import (
    Chain,
    LassoPseudoOrbit,
    build_step_graph,
    extend_to_lasso,
    validate_lasso,
)
from .space import Point, clopen_cover, positive_spectrum
from .system import (
    INFINITE,
    SystemMap,
    constant,
    continuity_modulus,
    identity,
    iterate_semigroup,
    rho_distance,
)


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask(points: Iterable[int]) -> int:
    m = 0
    for p in points:
        m |= 1 << p
    return m


class _Viability:
    """Precomputed balls and a memoized image operator for one (f, eps)."""

    def __init__(self, f: SystemMap, epsilon: Fraction):
        self.f = f
        self.epsilon = epsilon
        dist = f.space.dist
        n = len(f.space)
        self.ball = [_mask(y for y in range(n) if dist[x][y] < epsilon) for x in range(n)]
        self._fbit = [1 << f.image[x] for x in range(n)]
        self._img: dict[int, int] = {}

    def image(self, W: int) -> int:
        out = self._img.get(W)
        if out is None:
            out = 0
            fbit = self._fbit
            for i in _bits(W):
                out |= fbit[i]
            self._img[W] = out
        return out

    def step(self, W: int, y: int) -> int:
        return self.image(W) & self.ball[y]


@dataclass(frozen=True)
class ViableTrace:
    steps: tuple[tuple[int, frozenset[int]], ...]
    restart_marks: tuple[int, ...] = ()

    def empties_at(self) -> int | None:
        for i, (_, W) in enumerate(self.steps):
            if not W:
                return i
        return None


def viable_trace(f: SystemMap, seq: Sequence[Point], epsilon) -> ViableTrace:
    """Viable sets along a finite sequence (continues through emptiness)."""
    kern = _Viability(f, Fraction(epsilon))
    idx = [f.space.index(p) for p in seq]
    W = kern.ball[idx[0]]
    out = [(idx[0], frozenset(_bits(W)))]
    for y in idx[1:]:
        W = kern.step(W, y)
        out.append((y, frozenset(_bits(W))))
    return ViableTrace(tuple(out))


@dataclass(frozen=True)
class Shadowed:
    by: int


@dataclass(frozen=True)
class Unshadowable:
    at: int


def shadowability_of(f: SystemMap, po: LassoPseudoOrbit, epsilon) -> Shadowed | Unshadowable:
    """Decide whether one lasso pseudo-orbit is epsilon-shadowed.

    Runs the viable-set recursion until a (cycle position, W) state repeats.
    On success the shadowing point is recovered by tracing preimages back
    through the recorded viable sets, and checked over a full period of the
    eventually periodic joint motion.
    """
    epsilon = Fraction(epsilon)
    bad = validate_lasso(f, po)
    if bad is not None:
        raise ValueError(f"lasso is not a {po.delta}-pseudo-orbit (step {bad})")
    kern = _Viability(f, epsilon)
    s, L = len(po.stem), len(po.cycle)
    Ws = [kern.ball[po[0]]]
    seen: dict[tuple[int, int], int] = {}
    i = 0
    while True:
        W = Ws[i]
        if not W:
            return Unshadowable(i)
        if i >= s:
            key = ((i - s) % L, W)
            if key in seen:
                j0, j1 = seen[key], i
                break
            seen[key] = i
        Ws.append(kern.step(W, po[i + 1]))
        i += 1

    image = f.image

    def back(v: int, i: int) -> int:
        # least preimage of v (a member of W_i) inside W_{i-1}
        return next(z for z in _bits(Ws[i - 1]) if image[z] == v)

    def back_to(v: int, frm: int, to: int) -> int:
        for i in range(frm, to, -1):
            v = back(v, i)
        return v

    # W_{j0} == W_{j1}; walking back one loop is a self-map of this set, and
    # a point on one of its cycles is viable forever going forward
    u = min(_bits(Ws[j1]))
    visited: dict[int, int] = {}
    while u not in visited:
        visited[u] = len(visited)
        u = back_to(u, j1, j0)
    loop = len(visited) - visited[u]
    z = back_to(u, j0, 0)

    dist = f.space.dist
    y = z
    for i in range(j0 + loop * (j1 - j0) + 1):
        if not dist[y][po[i]] < epsilon:
            raise AssertionError(f"recovered point fails at step {i}")
        y = image[y]
    return Shadowed(z)


@dataclass(frozen=True)
class ShadowingVerdict:
    answer: bool
    epsilon: Fraction
    delta: Fraction
    states: int = 0
    witness: LassoPseudoOrbit | None = None
    fails_at: int | None = None

    def __bool__(self) -> bool:
        return self.answer


def decide_shadowing(f: SystemMap, epsilon, delta, prune: bool = False) -> ShadowingVerdict:
    """Is every delta-pseudo-orbit epsilon-shadowed by a true orbit?

    Breadth-first search of the subset construction from every initial state
    ``(x0, B(x0, eps))``; the answer is NO exactly when some state with an
    empty viable set is reachable.  The NO witness is the first such path in
    breadth-first order (so a shortest one), continued by the true orbit of
    its endpoint.

    With ``prune`` a state ``(x, W')`` is skipped when some ``(x, W)`` with
    ``W ⊆ W'`` was already queued; anything ``W'`` can reach, ``W`` reaches
    with a subset, so verdicts are unchanged.
    """
    epsilon, delta = Fraction(epsilon), Fraction(delta)
    if epsilon <= 0 or delta <= 0:
        raise ValueError("epsilon and delta must be positive")
    limit = config.budget()
    kern = _Viability(f, epsilon)
    succ = build_step_graph(f, delta).successors
    parent: dict[tuple[int, int], tuple[int, int] | None] = {}
    minimal: dict[int, list[int]] = {}
    queue: deque[tuple[int, int]] = deque()

    def push(state, prev) -> bool:
        if state in parent:
            return False
        x, W = state
        if prune:
            known = minimal.setdefault(x, [])
            if any(M & ~W == 0 for M in known):
                return False
            known.append(W)
        parent[state] = prev
        if len(parent) > limit:
            raise config.BudgetExceeded("subset construction states", limit)
        queue.append(state)
        return True

    for x0 in f.space.points:
        push((x0, kern.ball[x0]), None)
    while queue:
        state = queue.popleft()
        x, W = state
        img = kern.image(W)
        for y in succ[x]:
            nxt = (y, img & kern.ball[y])
            if push(nxt, state) and nxt[1] == 0:
                path = [nxt]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                path.reverse()
                chain = Chain(tuple(p for p, _ in path), delta)
                return ShadowingVerdict(
                    False, epsilon, delta, len(parent), extend_to_lasso(f, chain), len(path) - 1
                )
    return ShadowingVerdict(True, epsilon, delta, len(parent))


def unshadowable_witness(f: SystemMap, epsilon, delta) -> LassoPseudoOrbit | None:
    return decide_shadowing(f, epsilon, delta).witness


@dataclass(frozen=True)
class MaxDelta:
    """Largest workable delta among the candidate values.

    ``attained`` is False when even a delta above every distance works, in
    which case ``value`` is only the largest candidate tried (INFINITE for a
    one-point space).
    """

    value: Fraction | float
    attained: bool


def delta_candidates(f: SystemMap) -> list[Fraction]:
    """Values at which the step graph can change.

    Slacks ``d(f(x), y)`` are themselves distances, so the positive spectrum
    covers them.
    """
    return positive_spectrum(f.space)


def max_delta(f: SystemMap, epsilon) -> MaxDelta:
    """Largest candidate delta with (epsilon, delta)-shadowing.

    Feasibility is down-closed in delta, so a binary search over the sorted
    candidates finds the boundary.
    """
    epsilon = Fraction(epsilon)
    cands = delta_candidates(f)
    if not cands:
        return MaxDelta(INFINITE, False)
    beyond = cands[-1] + 1
    if decide_shadowing(f, epsilon, beyond):
        return MaxDelta(cands[-1], False)
    if not decide_shadowing(f, epsilon, cands[0]):
        return MaxDelta(Fraction(0), True)
    # cands[lo] feasible; cands[hi] (or beyond) infeasible
    lo, hi = 0, len(cands)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if decide_shadowing(f, epsilon, cands[mid]):
            lo = mid
        else:
            hi = mid
    return MaxDelta(cands[lo], True)


# ------------------------------------------------------------- CG shadowing


@dataclass(frozen=True)
class CGVerdict:
    answer: bool
    g: SystemMap | None = None
    start: int | None = None
    orbits_checked: int = 0

    def __bool__(self) -> bool:
        return self.answer


def decide_cg_shadowing(f: SystemMap, epsilon, delta) -> CGVerdict:
    """Is every orbit of every map g with rho(f, g) < delta epsilon-shadowed?

    The maps in question are exactly those with ``g(x)`` in
    ``O(x) = {y : d(f(x), y) < delta}``.  Rather than listing every such
    ``g``, the search lists every possible g-orbit: from each start, the
    walks in the option graph that are simple until they close a loop.
    Each such walk is the orbit of some admissible g (fill the other points
    with f), and every g-orbit arises this way, so the answer is exact.  A
    NO answer comes with a concrete g and start point.
    """
    epsilon, delta = Fraction(epsilon), Fraction(delta)
    limit = config.budget()
    options = build_step_graph(f, delta).successors
    cache: dict[tuple[tuple[int, ...], tuple[int, ...]], bool] = {}
    checked = 0

    for x0 in f.space.points:
        # iterative DFS over simple paths starting at x0
        stack = [(x0,)]
        while stack:
            path = stack.pop()
            pos = {p: i for i, p in enumerate(path)}
            for y in reversed(options[path[-1]]):
                if y in pos:
                    k = pos[y]
                    key = (path[:k], path[k:])
                    checked += 1
                    if checked > limit:
                        raise config.BudgetExceeded("CG orbit enumeration", limit)
                    ok = cache.get(key)
                    if ok is None:
                        po = LassoPseudoOrbit(key[0], key[1], delta)
                        ok = isinstance(shadowability_of(f, po, epsilon), Shadowed)
                        cache[key] = ok
                    if not ok:
                        table = list(f.image)
                        for a, b in zip(path, path[1:] + (y,)):
                            table[a] = b
                        return CGVerdict(False, SystemMap(f.space, tuple(table)), x0, checked)
                else:
                    stack.append(path + (y,))
    return CGVerdict(True, orbits_checked=checked)


# -------------------------------------------------------- eventual shadowing


@dataclass(frozen=True)
class EventualVerdict:
    answer: bool
    states: int = 0
    witness: LassoPseudoOrbit | None = None
    trace: ViableTrace | None = None

    def __bool__(self) -> bool:
        return self.answer


def decide_eventual_shadowing(
    f: SystemMap, epsilon, delta, restart: str = "eventual_image"
) -> EventualVerdict:
    """Does every delta-pseudo-orbit eventually stay epsilon-close to an orbit?

    Eventual shadowing of ``(x_i)`` means some ``z`` and ``N`` with
    ``d(f^i z, x_i) < eps`` for all ``i >= N``.  The subset construction is
    run with restarts: when the viable set empties at a point ``y`` it is
    reset to ``R ∩ B(y, eps)``, where ``R`` is the eventual image (the
    possible positions of ``f^i z`` for large ``i``).  A pseudo-orbit is
    eventually shadowed iff it restarts finitely often, so the answer is NO
    iff some reachable cycle of the restart graph contains a restart edge.

    ``restart="ball"`` resets to the whole ball instead, which decides the
    suffix form (the tail ``x_N, x_{N+1}, ...`` is shadowed from time 0);
    the two agree for surjective maps.
    """
    epsilon, delta = Fraction(epsilon), Fraction(delta)
    if restart not in ("eventual_image", "ball"):
        raise ValueError(f"unknown restart mode {restart!r}")
    limit = config.budget()
    kern = _Viability(f, epsilon)
    succ = build_step_graph(f, delta).successors
    if restart == "eventual_image":
        R = _mask(iterate_semigroup(f).eventual_image)
        reset = [R & b for b in kern.ball]
    else:
        reset = list(kern.ball)

    graph = nx.DiGraph()
    parent: dict[tuple[int, int], tuple[int, int] | None] = {}
    restart_edges = []
    queue: deque[tuple[int, int]] = deque()
    for x0 in f.space.points:
        s = (x0, kern.ball[x0])
        if s not in parent:
            parent[s] = None
            queue.append(s)
    while queue:
        state = queue.popleft()
        x, W = state
        img = kern.image(W)
        for y in succ[x]:
            W2 = img & kern.ball[y]
            marked = W2 == 0
            if marked:
                W2 = reset[y]
            nxt = (y, W2)
            graph.add_edge(state, nxt)
            if marked:
                restart_edges.append((state, nxt))
            if nxt not in parent:
                parent[nxt] = state
                if len(parent) > limit:
                    raise config.BudgetExceeded("restart construction states", limit)
                queue.append(nxt)

    if not restart_edges:
        return EventualVerdict(True, len(parent))
    comp = {}
    for k, scc in enumerate(nx.strongly_connected_components(graph)):
        for s in scc:
            comp[s] = k
    for u, v in restart_edges:
        if comp[u] != comp[v]:
            continue
        stem_states = [u]
        while parent[stem_states[-1]] is not None:
            stem_states.append(parent[stem_states[-1]])
        stem_states.reverse()
        back = nx.shortest_path(graph.subgraph([s for s in comp if comp[s] == comp[u]]), v, u)
        cycle_states = [u] + back[:-1]
        witness = LassoPseudoOrbit(
            tuple(p for p, _ in stem_states[:-1]), tuple(p for p, _ in cycle_states), delta
        )
        return EventualVerdict(False, len(parent), witness, restart_trace(f, witness, epsilon, restart))
    return EventualVerdict(True, len(parent))


def restart_trace(
    f: SystemMap, po: LassoPseudoOrbit, epsilon, restart: str = "eventual_image", periods: int = 2
) -> ViableTrace:
    """Restart-mode trace over the stem and ``periods`` passes of the cycle."""
    kern = _Viability(f, Fraction(epsilon))
    R = _mask(iterate_semigroup(f).eventual_image) if restart == "eventual_image" else -1
    length = len(po.stem) + periods * len(po.cycle)
    W = kern.ball[po[0]]
    steps = [(po[0], frozenset(_bits(W)))]
    marks = []
    for i in range(1, length):
        y = po[i]
        W = kern.step(W, y)
        if not W:
            W = kern.ball[y] & R
            marks.append(i)
        steps.append((y, frozenset(_bits(W))))
    return ViableTrace(tuple(steps), tuple(marks))


# ------------------------------------------------------ constructive deltas


@dataclass(frozen=True)
class RigidityDelta:
    delta: Fraction
    eta: Fraction
    N: int


def shadowing_delta_from_rigidity(f: SystemMap, epsilon, verify: bool = True) -> RigidityDelta | None:
    """Delta from the totally-disconnected uniformly-rigid argument.

    eta is the separation of the best clopen cover at scale epsilon, N the
    first iterate within eta of the identity, and delta the smaller of eta
    and the N-step continuity modulus for eta.  The orbit of ``x_0`` then
    shadows any delta-pseudo-orbit; with ``verify`` the decider confirms it.
    """
    epsilon = Fraction(epsilon)
    cover = clopen_cover(f.space, epsilon)
    if cover is None:
        return None
    eta = cover.separation
    if eta is None:
        # one block of diameter < epsilon: every delta works, take one past the diameter
        eta = f.space.diameter() + 1
    prof = iterate_semigroup(f)
    ident = identity(f.space)
    N = next(
        (n for n in range(1, prof.tail_len + prof.cycle_len + 1) if rho_distance(f.power(n), ident) < eta),
        None,
    )
    if N is None:
        return None
    delta = min(continuity_modulus(f, eta, N), eta)
    if verify and not decide_shadowing(f, epsilon, delta):
        raise AssertionError(f"rigidity construction gave delta={delta} but the decider says NO")
    return RigidityDelta(Fraction(delta), eta, N)


@dataclass(frozen=True)
class ConvergenceDelta:
    delta: Fraction
    N: int
    limit: int


def shadowing_delta_from_convergence(f: SystemMap, epsilon, verify: bool = True) -> ConvergenceDelta | None:
    """Delta for a system whose iterates converge to a constant map.

    N is the least n >= 1 after which every iterate is within epsilon/3 of the
    constant, and delta the N-step continuity modulus at epsilon/(3N).
    """
    epsilon = Fraction(epsilon)
    prof = iterate_semigroup(f)
    c = prof.limit_constant
    if c is None:
        return None
    const = constant(f.space, c)
    target = epsilon / 3
    # f^m == const for m >= tail_len, so only earlier iterates can fail
    N = max(prof.tail_len, 1)
    while N > 1 and rho_distance(f.power(N - 1), const) < target:
        N -= 1
    delta = continuity_modulus(f, epsilon / (3 * N), N)
    if delta == INFINITE:
        delta = f.space.diameter() + 1
    if verify and not decide_shadowing(f, epsilon, delta):
        raise AssertionError(f"convergence construction gave delta={delta} but the decider says NO")
    return ConvergenceDelta(Fraction(delta), N, c)
