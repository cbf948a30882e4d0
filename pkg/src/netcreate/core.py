"""Game model: strategy profiles, the induced network, distances and costs.

All cost arithmetic is exact. Edge prices are :class:`fractions.Fraction`
values and distance sums are Python integers, so deciding whether the
edge price is integral (and comparing costs) never involves rounding.
A disconnected vertex has cost :data:`INFINITE`, which compares above every
finite value and absorbs addition.
"""

from __future__ import annotations

import json
import math
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import PreconditionError, SchemaError

ExactScalar = Fraction

INFINITE = math.inf
"""Cost of a vertex that cannot reach every other vertex."""

Cost = Union[Fraction, float]


class _Unreachable:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNREACHABLE"

    def __reduce__(self):
        return (_Unreachable, ())


UNREACHABLE = _Unreachable()
"""Distance between vertices in different components."""

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_alpha(text: str | int | Fraction) -> Fraction:
    """Parse an edge price given as ``"p/q"`` or an integer.

    Floats and decimal strings are refused: they cannot represent
    the integral/non-integral distinction faithfully.
    """
    if isinstance(text, Fraction):
        value = text
    elif isinstance(text, int) and not isinstance(text, bool):
        value = Fraction(text)
    elif isinstance(text, str):
        m = _RATIONAL_RE.match(text)
        if not m:
            raise SchemaError(f"alpha must be an integer or 'p/q' rational, got {text!r}")
        den = int(m.group(2)) if m.group(2) is not None else 1
        if den == 0:
            raise SchemaError(f"alpha has zero denominator: {text!r}")
        value = Fraction(int(m.group(1)), den)
    else:
        raise SchemaError(f"alpha must be an integer or 'p/q' string, got {type(text).__name__}")
    if value < 0:
        raise SchemaError(f"alpha must be non-negative, got {value}")
    return value


def format_scalar(value: Cost | None) -> str | None:
    """Render an exact cost as ``"p/q"`` (or ``"inf"``) for serialization."""
    if value is None:
        return None
    if value == INFINITE:
        return "inf"
    return str(Fraction(value))


@dataclass(frozen=True)
class GameParams:
    n: int
    alpha: Fraction

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise PreconditionError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "alpha", parse_alpha(self.alpha))

    @property
    def alpha_is_integral(self) -> bool:
        return self.alpha.denominator == 1

    @property
    def alpha_fractional_part(self) -> Fraction:
        return self.alpha - math.floor(self.alpha)


@dataclass(frozen=True)
class StrategyProfile:
    """Purchase sets ``S_v`` for every vertex ``v``.

    A pair may be bought by both endpoints; both then pay for it.
    """

    purchases: tuple[frozenset[int], ...]

    def __post_init__(self):
        purchases = tuple(frozenset(s) for s in self.purchases)
        n = len(purchases)
        if n < 1:
            raise SchemaError("a profile needs at least one vertex")
        for v, s in enumerate(purchases):
            for w in s:
                if not isinstance(w, (int, np.integer)) or isinstance(w, bool):
                    raise SchemaError(f"vertex {v} purchases non-integer id {w!r}")
                if not 0 <= w < n:
                    raise SchemaError(f"vertex {v} purchases out-of-range id {w} (n={n})")
                if w == v:
                    raise SchemaError(f"vertex {v} purchases an edge to itself")
        object.__setattr__(self, "purchases", tuple(frozenset(int(w) for w in s) for s in purchases))

    @classmethod
    def empty(cls, n: int) -> StrategyProfile:
        return cls(tuple(frozenset() for _ in range(n)))

    @classmethod
    def from_lists(cls, lists: Sequence[Iterable[int]]) -> StrategyProfile:
        return cls(tuple(frozenset(s) for s in lists))

    @property
    def n(self) -> int:
        return len(self.purchases)

    def __getitem__(self, v: int) -> frozenset[int]:
        return self.purchases[v]

    def num_purchases(self) -> int:
        """Total purchases, counting a doubly bought pair twice."""
        return sum(len(s) for s in self.purchases)

    def with_strategy(self, v: int, new_s: Iterable[int]) -> StrategyProfile:
        lists = list(self.purchases)
        lists[v] = frozenset(new_s)
        return StrategyProfile(tuple(lists))

    def reversed_purchase(self, v: int, w: int) -> StrategyProfile:
        """Move the purchase ``w in S_v`` to ``v in S_w``."""
        if w not in self.purchases[v]:
            raise PreconditionError(f"{v} does not purchase {w}")
        lists = list(self.purchases)
        lists[v] = lists[v] - {w}
        lists[w] = lists[w] | {v}
        return StrategyProfile(tuple(lists))

    def double_purchases(self) -> list[tuple[int, int]]:
        return sorted((v, w) for v, s in enumerate(self.purchases) for w in s if v < w and v in self.purchases[w])

    def as_lists(self) -> list[list[int]]:
        return [sorted(s) for s in self.purchases]

    def to_dict(self, alpha: Fraction | str | int) -> dict:
        return {"n": self.n, "alpha": format_scalar(parse_alpha(alpha)), "purchases": self.as_lists()}

    def to_json(self, alpha: Fraction | str | int) -> str:
        return json.dumps(self.to_dict(alpha))


_PROFILE_KEYS = {"n", "alpha", "purchases"}
_OPTIONAL_KEYS = {"seed"}


def profile_from_dict(data: dict) -> tuple[GameParams, StrategyProfile]:
    """Validate the canonical profile JSON object and build the game and profile."""
    if not isinstance(data, dict):
        raise SchemaError("profile JSON must be an object")
    missing = _PROFILE_KEYS - data.keys()
    if missing:
        raise SchemaError(f"profile JSON missing keys: {sorted(missing)}")
    extra = data.keys() - _PROFILE_KEYS - _OPTIONAL_KEYS
    if extra:
        raise SchemaError(f"profile JSON has unknown keys: {sorted(extra)}")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError(f"'n' must be a positive integer, got {n!r}")
    purchases = data["purchases"]
    if not isinstance(purchases, list) or len(purchases) != n:
        raise SchemaError(f"'purchases' must be a list of {n} id lists")
    for v, ids in enumerate(purchases):
        if not isinstance(ids, list):
            raise SchemaError(f"purchases[{v}] must be a list")
        if any(not isinstance(w, int) or isinstance(w, bool) for w in ids):
            raise SchemaError(f"purchases[{v}] must contain integer ids")
        if len(set(ids)) != len(ids):
            raise SchemaError(f"purchases[{v}] repeats an id")
        if ids != sorted(ids):
            raise SchemaError(f"purchases[{v}] ids must be ascending")
    profile = StrategyProfile.from_lists(purchases)
    return GameParams(n, parse_alpha(data["alpha"])), profile


def profile_from_json(text: str) -> tuple[GameParams, StrategyProfile]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"profile is not valid JSON: {exc}") from exc
    return profile_from_dict(data)


@dataclass(frozen=True)
class NetworkGraph:
    """Simple undirected graph induced by a profile."""

    adjacency: tuple[frozenset[int], ...]

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(v, w) for v, nb in enumerate(self.adjacency) for w in sorted(nb) if v < w]

    def num_edges(self) -> int:
        return sum(len(nb) for nb in self.adjacency) // 2

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> NetworkGraph:
        adj: list[set[int]] = [set() for _ in range(n)]
        for v, w in edges:
            if v == w:
                raise SchemaError(f"loop at vertex {v}")
            adj[v].add(w)
            adj[w].add(v)
        return cls(tuple(frozenset(s) for s in adj))


def build_graph(profile: StrategyProfile) -> NetworkGraph:
    adj: list[set[int]] = [set() for _ in range(profile.n)]
    for v, s in enumerate(profile.purchases):
        for w in s:
            adj[v].add(w)
            adj[w].add(v)
    return NetworkGraph(tuple(frozenset(s) for s in adj))


def bfs_distances(graph: NetworkGraph, source: int) -> list[int | None]:
    """Hop counts from ``source``; ``None`` marks vertices it cannot reach."""
    dist: list[int | None] = [None] * graph.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in graph.adjacency[u]:
            if dist[w] is None:
                dist[w] = du
                queue.append(w)
    return dist


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """All-pairs hop counts. Internally ``-1`` encodes :data:`UNREACHABLE`."""

    table: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.table.shape[0]

    def get(self, v: int, w: int):
        d = int(self.table[v, w])
        return UNREACHABLE if d < 0 else d

    def row(self, v: int) -> list:
        return [UNREACHABLE if d < 0 else int(d) for d in self.table[v]]

    def row_sum(self, v: int):
        r = self.table[v]
        if (r < 0).any():
            return UNREACHABLE
        return int(r.sum())

    def eccentricity(self, v: int):
        r = self.table[v]
        if (r < 0).any():
            return UNREACHABLE
        return int(r.max()) if len(r) else 0

    def connected(self) -> bool:
        return not (self.table < 0).any()

    def __eq__(self, other) -> bool:
        return isinstance(other, DistanceMatrix) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())


def all_pairs_distances(graph: NetworkGraph) -> DistanceMatrix:
    """Breadth-first search from every vertex (scipy's compiled BFS)."""
    n = graph.n
    edges = graph.edges()
    if not edges:
        table = np.full((n, n), -1, dtype=np.int64)
        np.fill_diagonal(table, 0)
    else:
        rows = np.fromiter((e[0] for e in edges), dtype=np.int64, count=len(edges))
        cols = np.fromiter((e[1] for e in edges), dtype=np.int64, count=len(edges))
        mat = csr_matrix((np.ones(len(edges), dtype=np.int8), (rows, cols)), shape=(n, n))
        raw = shortest_path(mat, method="D", directed=False, unweighted=True)
        table = np.where(np.isinf(raw), -1, raw).astype(np.int64)
    table.setflags(write=False)
    return DistanceMatrix(table)


def vertex_cost(game: GameParams, profile: StrategyProfile, v: int) -> Cost:
    """``alpha * |S_v|`` plus the distance sum from ``v``; infinite if ``v`` cannot reach everyone."""
    if not 0 <= v < profile.n:
        raise PreconditionError(f"vertex {v} out of range for n={profile.n}")
    dist = bfs_distances(build_graph(profile), v)
    if any(d is None for d in dist):
        return INFINITE
    return game.alpha * len(profile[v]) + sum(dist)


@dataclass(frozen=True)
class VertexCost:
    edge_cost: Fraction
    distance_sum: object  # int or UNREACHABLE
    total: Cost


@dataclass(frozen=True)
class CostReport:
    vertices: tuple[VertexCost, ...]
    social_cost: Cost
    connected: bool

    def to_dict(self) -> dict:
        return {
            "social_cost": format_scalar(self.social_cost),
            "connected": self.connected,
            "vertices": [
                {
                    "edge_cost": format_scalar(vc.edge_cost),
                    "distance_sum": None if vc.distance_sum is UNREACHABLE else vc.distance_sum,
                    "total": format_scalar(vc.total),
                }
                for vc in self.vertices
            ],
        }


def social_cost(game: GameParams, profile: StrategyProfile) -> CostReport:
    if game.n != profile.n:
        raise PreconditionError(f"game has n={game.n} but profile has n={profile.n}")
    dm = all_pairs_distances(build_graph(profile))
    per_vertex = []
    for v in range(profile.n):
        edge_cost = game.alpha * len(profile[v])
        dsum = dm.row_sum(v)
        total = INFINITE if dsum is UNREACHABLE else edge_cost + dsum
        per_vertex.append(VertexCost(edge_cost, dsum, total))
    connected = dm.connected()
    total = sum((vc.total for vc in per_vertex), Fraction(0)) if connected else INFINITE
    return CostReport(tuple(per_vertex), total, connected)


def social_optimum_cost(game: GameParams) -> tuple[Fraction, StrategyProfile]:
    """Closed-form optimum: the clique below ``alpha = 2``, the star from 2 on."""
    from .constructions import make_clique, make_star

    n, alpha = game.n, game.alpha
    if n == 1:
        return Fraction(0), StrategyProfile.empty(1)
    if alpha < 2:
        return alpha * n * (n - 1) / 2 + n * (n - 1), make_clique(n)
    return alpha * (n - 1) + 2 * (n - 1) ** 2, make_star(n)
