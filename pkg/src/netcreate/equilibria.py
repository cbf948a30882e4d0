"""Best responses, Nash verification and best-response dynamics.

Exhaustive best responses work on the graph with the deviating vertex ``v``
removed. Write ``D`` for the distance matrix of ``G - v``. Whatever set ``T``
of neighbours ``v`` ends up with (its own purchases plus the edges other
vertices bought towards it), ``dist(v, w) = 1 + min_{u in T} D[u, w]``, since
a shortest path from ``v`` never passes through ``v`` again. So one
all-pairs computation on ``G - v`` prices all ``2^(n-1)`` candidate
strategies, and the per-subset minima are filled in by doubling over the
candidate bits.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .core import (
    INFINITE,
    Cost,
    GameParams,
    NetworkGraph,
    StrategyProfile,
    bfs_distances,
    build_graph,
    format_scalar,
    vertex_cost,
)
from .errors import LimitExceeded, PreconditionError, SearchExhausted

EXHAUSTIVE_LIMIT = 20

HEURISTIC_CLASSES = ("add", "delete", "swap", "neighborhood")

# tables up to this n are memoised; above it a table is megabytes
_CACHE_MAX_N = 10


@dataclass(frozen=True)
class DeviationWitness:
    vertex: int
    new_purchases: frozenset[int]
    old_cost: Cost
    new_cost: Cost

    def __post_init__(self):
        if self.new_cost > self.old_cost:
            raise ValueError(f"deviation raises the cost ({self.old_cost} -> {self.new_cost})")

    @property
    def improving(self) -> bool:
        return self.new_cost < self.old_cost

    def to_dict(self) -> dict:
        return {
            "vertex": self.vertex,
            "new_purchases": sorted(self.new_purchases),
            "old_cost": format_scalar(self.old_cost),
            "new_cost": format_scalar(self.new_cost),
        }


@dataclass(frozen=True)
class NashVerdict:
    is_weak_nash: bool
    is_strict_nash: bool
    witness: DeviationWitness | None = None

    def __post_init__(self):
        if self.is_strict_nash and not self.is_weak_nash:
            raise ValueError("strict Nash implies weak Nash")
        if not self.is_strict_nash and self.witness is None:
            raise ValueError("a witness is required when a Nash flag is false")

    def to_dict(self) -> dict:
        return {
            "is_weak_nash": self.is_weak_nash,
            "is_strict_nash": self.is_strict_nash,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def _check_limit(n: int, limit: int) -> None:
    if n > limit:
        raise LimitExceeded("exhaustive best response", n, limit)


@lru_cache(maxsize=None)
def _pair_index(n: int) -> dict[tuple[int, int], int]:
    return {pair: i for i, pair in enumerate(combinations(range(n), 2))}


@lru_cache(maxsize=None)
def _popcounts(m: int) -> np.ndarray:
    counts = np.zeros(1 << m, dtype=np.int64)
    for b in range(m):
        counts[1 << b : 1 << (b + 1)] = counts[: 1 << b] + 1
    counts.setflags(write=False)
    return counts


def to_positions(mask: int, v: int) -> int:
    """Squeeze a vertex bitmask to candidate positions (bit ``v`` dropped)."""
    return (mask & ((1 << v) - 1)) | ((mask >> (v + 1)) << v)


def _compute_table(n: int, v: int, gv_mask: int, in_mask: int) -> tuple[np.ndarray, np.ndarray]:
    others = [u for u in range(n) if u != v]
    m = n - 1
    pos = {u: j for j, u in enumerate(others)}
    adj: list[list[int]] = [[] for _ in range(m)]
    for (a, b), i in _pair_index(n).items():
        if gv_mask >> i & 1:
            adj[pos[a]].append(pos[b])
            adj[pos[b]].append(pos[a])
    big = 4 * n + 4
    dist = np.full((m, m), big, dtype=np.int32)
    for s in range(m):
        row = dist[s]
        row[s] = 0
        frontier = [s]
        level = 0
        while frontier:
            level += 1
            nxt = []
            for u in frontier:
                for x in adj[u]:
                    if row[x] == big:
                        row[x] = level
                        nxt.append(x)
            frontier = nxt
    reach = np.full((1 << m, m), big, dtype=np.int32)
    for u in range(n):
        if in_mask >> u & 1:
            np.minimum(reach[0], dist[pos[u]], out=reach[0])
    for b in range(m):
        np.minimum(reach[: 1 << b], dist[b], out=reach[1 << b : 1 << (b + 1)])
    finite = (reach < big).all(axis=1)
    dsum = reach.sum(axis=1, dtype=np.int64) + m
    finite.setflags(write=False)
    dsum.setflags(write=False)
    return dsum, finite


_cached_table = lru_cache(maxsize=1 << 16)(_compute_table)


def deviation_table(n: int, v: int, gv_mask: int, in_mask: int) -> tuple[np.ndarray, np.ndarray]:
    """Distance sums of ``v`` for every candidate purchase set.

    ``gv_mask`` holds the edges of ``G - v`` as bits over the lexicographic
    pair order, ``in_mask`` the vertices that bought an edge to ``v``.
    Entry ``j`` of the result belongs to the candidate set whose bits,
    read over the vertices other than ``v`` in increasing order, spell ``j``.
    """
    if n <= _CACHE_MAX_N:
        return _cached_table(n, v, gv_mask, in_mask)
    return _compute_table(n, v, gv_mask, in_mask)


def _profile_masks(profile: StrategyProfile, v: int) -> tuple[int, int, int]:
    n = profile.n
    idx = _pair_index(n)
    gv_mask = 0
    in_mask = 0
    for u, s in enumerate(profile.purchases):
        if u == v:
            continue
        for w in s:
            if w == v:
                in_mask |= 1 << u
            else:
                gv_mask |= 1 << idx[(u, w) if u < w else (w, u)]
    cur = sum(1 << (w if w < v else w - 1) for w in profile[v])
    return gv_mask, in_mask, cur


def _keys(table, alpha: Fraction) -> tuple[np.ndarray, int]:
    """Cost of every candidate scaled by alpha's denominator, plus the key
    standing in for an infinite cost (one above any finite key)."""
    dsum, finite = table
    sizes = _popcounts(int(len(dsum)).bit_length() - 1)
    p, q = alpha.numerator, alpha.denominator
    inf_key = p * int(sizes[-1]) + q * int(dsum.max()) + 1
    if inf_key < 1 << 62:
        keys = p * sizes + q * dsum
    else:
        keys = np.array([p * int(s) + q * int(d) for s, d in zip(sizes, dsum)], dtype=object)
    return np.where(finite, keys, inf_key), inf_key


def lex_least_mask(masks: np.ndarray) -> int:
    """The mask whose sorted bit positions form the lexicographically least tuple."""
    cand = np.asarray(masks, dtype=np.int64)
    prefix = 0
    while True:
        if (cand == prefix).any():
            return prefix
        rest = cand & ~prefix
        low = rest & -rest
        bit = int(low.min())
        cand = cand[low == bit]
        prefix |= bit


def _mask_to_set(mask: int, v: int, n: int) -> frozenset[int]:
    others = [u for u in range(n) if u != v]
    return frozenset(others[j] for j in range(n - 1) if mask >> j & 1)


@dataclass(frozen=True)
class _Scan:
    current_cost: Cost
    best_cost: Cost
    best_mask: int
    tie_mask: int | None  # lex-least other mask matching the current cost

    @property
    def improves(self) -> bool:
        return self.best_cost < self.current_cost


def _scan(table, alpha: Fraction, cur: int) -> _Scan:
    keys, inf_key = _keys(table, alpha)

    def cost(key) -> Cost:
        return INFINITE if key == inf_key else Fraction(int(key), alpha.denominator)

    cur_key = keys[cur]
    best_key = keys.min()
    best_mask = lex_least_mask(np.flatnonzero(keys == best_key))
    tie_mask = None
    if best_key == cur_key and cur_key != inf_key:
        ties = np.flatnonzero(keys == cur_key)
        ties = ties[ties != cur]
        if len(ties):
            tie_mask = lex_least_mask(ties)
    return _Scan(cost(cur_key), cost(best_key), best_mask, tie_mask)


@lru_cache(maxsize=1 << 20)
def vertex_status(n: int, v: int, gv_mask: int, in_mask: int, cur: int, alpha: Fraction) -> tuple[bool, bool]:
    """``(can_improve, can_break_even)`` for ``v``; ``cur`` is in candidate positions."""
    s = _scan(deviation_table(n, v, gv_mask, in_mask), alpha, cur)
    return s.improves, s.tie_mask is not None


def deviation_cost(game: GameParams, profile: StrategyProfile, v: int, new_s: Iterable[int]) -> Cost:
    new_s = frozenset(new_s)
    if v in new_s:
        raise PreconditionError(f"vertex {v} cannot purchase an edge to itself")
    return vertex_cost(game, profile.with_strategy(v, new_s), v)


def best_response_exact(
    game: GameParams, profile: StrategyProfile, v: int, limit: int = EXHAUSTIVE_LIMIT
) -> tuple[Cost, frozenset[int]]:
    """Minimum cost ``v`` can reach by changing its own purchases.

    Among optimal sets the lexicographically least (as sorted id tuples)
    is returned.
    """
    n = profile.n
    _check_limit(n, limit)
    gv, inc, cur = _profile_masks(profile, v)
    s = _scan(deviation_table(n, v, gv, inc), game.alpha, cur)
    return s.best_cost, _mask_to_set(s.best_mask, v, n)


def is_nash(game: GameParams, profile: StrategyProfile, limit: int = EXHAUSTIVE_LIMIT) -> NashVerdict:
    """Exhaustive weak/strict Nash check.

    The witness is the lex-least best response of the first vertex that can
    strictly improve, or, for a weak but non-strict equilibrium, the
    lex-least break-even deviation of the first vertex that has one.
    """
    n = profile.n
    _check_limit(n, limit)
    alpha = game.alpha
    break_even = None
    for v in range(n):
        gv, inc, cur = _profile_masks(profile, v)
        s = _scan(deviation_table(n, v, gv, inc), alpha, cur)
        old = s.current_cost
        if s.improves:
            w = DeviationWitness(v, _mask_to_set(s.best_mask, v, n), old, s.best_cost)
            return NashVerdict(False, False, w)
        if break_even is None and s.tie_mask is not None:
            break_even = DeviationWitness(v, _mask_to_set(s.tie_mask, v, n), old, old)
    return NashVerdict(True, break_even is None, break_even)


def _candidate_moves(profile: StrategyProfile, v: int, classes: Sequence[str]):
    n = profile.n
    own = profile[v]
    non_own = [u for u in range(n) if u != v and u not in own]
    if "add" in classes:
        for u in non_own:
            yield own | {u}
    if "delete" in classes:
        for u in sorted(own):
            yield own - {u}
    if "swap" in classes:
        for u in sorted(own):
            for x in non_own:
                yield (own - {u}) | {x}
    if "neighborhood" in classes:
        # drop purchases into the root's second layer, buy its whole first layer
        graph = build_graph(profile)
        dist = bfs_distances(graph, v)
        for root in range(n):
            if dist[root] != 2:
                continue
            rd = bfs_distances(graph, root)
            layer1 = {u for u in range(n) if rd[u] == 1}
            layer2 = {u for u in own if rd[u] == 2}
            yield (own - layer2) | layer1


def improving_move_heuristic(
    game: GameParams, profile: StrategyProfile, v: int, classes: Sequence[str] = HEURISTIC_CLASSES
) -> DeviationWitness | None:
    """Search cheap deviation classes for a strictly improving move.

    Sound but not complete: a returned witness always improves, while
    ``None`` does not certify an equilibrium. Returns the cheapest move found
    (first in generation order on ties).
    """
    unknown = set(classes) - set(HEURISTIC_CLASSES)
    if unknown:
        raise PreconditionError(f"unknown deviation classes: {sorted(unknown)}")
    old = vertex_cost(game, profile, v)
    best: DeviationWitness | None = None
    seen = set()
    for new_s in _candidate_moves(profile, v, classes):
        new_s = frozenset(new_s)
        if new_s in seen or new_s == profile[v]:
            continue
        seen.add(new_s)
        cost = deviation_cost(game, profile, v, new_s)
        if cost < old and (best is None or cost < best.new_cost):
            best = DeviationWitness(v, new_s, old, cost)
    return best


def best_response_dynamics(
    game: GameParams,
    initial: StrategyProfile,
    schedule: str = "round-robin",
    tie_break: str = "incumbent",
    max_rounds: int = 100,
    seed: int | None = None,
    limit: int = EXHAUSTIVE_LIMIT,
) -> tuple[list[StrategyProfile], bool]:
    """Iterate exact best responses.

    ``schedule`` is ``"round-robin"`` or ``"random"`` (a fresh seeded vertex
    permutation every round). With ``tie_break="incumbent"`` a vertex only
    moves on a strict improvement, so a fixed point is exactly a weak Nash
    equilibrium; ``"least"`` always jumps to the lex-least best response.
    Returns the trajectory (initial profile plus one entry per change) and
    whether a full round passed without a change.
    """
    if schedule not in ("round-robin", "random"):
        raise PreconditionError(f"unknown schedule {schedule!r}")
    if tie_break not in ("incumbent", "least"):
        raise PreconditionError(f"unknown tie_break {tie_break!r}")
    n = initial.n
    _check_limit(n, limit)
    rng = random.Random(seed)
    profile = initial
    trajectory = [profile]
    for _ in range(max_rounds):
        order = list(range(n))
        if schedule == "random":
            rng.shuffle(order)
        changed = False
        for v in order:
            gv, inc, cur = _profile_masks(profile, v)
            s = _scan(deviation_table(n, v, gv, inc), game.alpha, cur)
            if s.improves or (tie_break == "least" and s.best_mask != cur):
                profile = profile.with_strategy(v, _mask_to_set(s.best_mask, v, n))
                trajectory.append(profile)
                changed = True
        if not changed:
            return trajectory, True
    return trajectory, False


def addition_convexity_check(game: GameParams, profile: StrategyProfile, v: int, additions: Iterable[int]) -> bool:
    """Whether "adding all of ``additions`` strictly helps ``v``" implies
    "adding one of them strictly helps ``v``" on this instance."""
    additions = frozenset(additions)
    if v in additions or additions & profile[v]:
        raise PreconditionError("additions must avoid v and its current purchases")
    if not additions:
        return True
    base = vertex_cost(game, profile, v)
    if not deviation_cost(game, profile, v, profile[v] | additions) < base:
        return True
    return any(deviation_cost(game, profile, v, profile[v] | {s}) < base for s in sorted(additions))


def restart_target_count(n: int) -> int:
    return math.ceil(math.sqrt(n * math.log(n)))


def random_restart_strategy(
    game: GameParams, profile: StrategyProfile, w: int, seed: int, max_trials: int = 64
) -> tuple[frozenset[int], Fraction]:
    """Drop ``w``'s purchases and buy ``ceil(sqrt(n ln n))`` random targets,
    resampling until ``w`` is within distance 2 of everyone."""
    n = profile.n
    graph = build_graph(profile)
    threshold = math.sqrt(n * math.log(n)) if n > 1 else 0.0
    low = [u for u in range(n) if graph.degree(u) <= threshold]
    if n < 2 or low:
        raise PreconditionError(
            f"every degree must exceed sqrt(n ln n) = {threshold:.3f}; violated at vertices {low[:10]}"
        )
    t = restart_target_count(n)
    candidates = [u for u in range(n) if u != w]
    if t > len(candidates):
        raise PreconditionError(f"need {t} targets but only {len(candidates)} other vertices")
    rng = random.Random(seed)
    base = [set(nb) for nb in graph.adjacency]
    for u in profile[w]:
        if w not in profile[u]:
            base[w].discard(u)
            base[u].discard(w)
    for _ in range(max_trials):
        targets = frozenset(rng.sample(candidates, t))
        adj = [set(s) for s in base]
        for u in targets:
            adj[w].add(u)
            adj[u].add(w)
        dist = bfs_distances(NetworkGraph(tuple(frozenset(s) for s in adj)), w)
        if all(d is not None and d <= 2 for d in dist):
            return targets, game.alpha * t + sum(dist)
    raise SearchExhausted(max_trials)
