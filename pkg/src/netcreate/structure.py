"""Distance layers around a root, the children relation, and an audit of the
structural inequalities every equilibrium must satisfy.

For a root ``r`` the layers are ``N_1, N_2, ...`` (vertices at distance
exactly ``i``). A vertex ``x`` at depth three or more is a *child* of
``w`` in ``N_2`` when a path from ``w`` to ``x`` advances one layer per
step.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .core import UNREACHABLE, GameParams, NetworkGraph, StrategyProfile, all_pairs_distances, bfs_distances, build_graph, format_scalar
from .equilibria import EXHAUSTIVE_LIMIT, is_nash
from .errors import PreconditionError

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


@dataclass(frozen=True)
class LayerPartition:
    root: int
    layers: tuple[frozenset[int], ...]  # layers[0] is N_1

    def layer(self, i: int) -> frozenset[int]:
        """``N_i``; ``N_0`` is the root alone, missing depths are empty."""
        if i == 0:
            return frozenset({self.root})
        if 1 <= i <= len(self.layers):
            return self.layers[i - 1]
        return frozenset()

    def depth_of(self, x: int) -> int:
        if x == self.root:
            return 0
        for i, layer in enumerate(self.layers, start=1):
            if x in layer:
                return i
        raise KeyError(x)

    def deep(self, start: int = 3) -> frozenset[int]:
        """Union of ``N_start, N_start+1, ...``."""
        return frozenset().union(*self.layers[start - 1 :]) if len(self.layers) >= start else frozenset()

    def to_dict(self) -> dict:
        return {"root": self.root, "layers": [sorted(layer) for layer in self.layers]}


def layer_partition(graph: NetworkGraph, root: int) -> LayerPartition:
    dist = bfs_distances(graph, root)
    missing = [x for x, d in enumerate(dist) if d is None]
    if missing:
        raise PreconditionError(f"graph is disconnected: vertices {missing[:10]} unreachable from root {root}")
    depth = max(dist)
    layers = [set() for _ in range(depth)]
    for x, d in enumerate(dist):
        if d:
            layers[d - 1].add(x)
    return LayerPartition(root, tuple(frozenset(s) for s in layers))


def children_map(partition: LayerPartition, graph: NetworkGraph) -> dict[int, frozenset[int]]:
    """Children of each ``N_2`` vertex, by forward search along layer-increasing edges."""
    depth = {partition.root: 0}
    for i, layer in enumerate(partition.layers, start=1):
        for x in layer:
            depth[x] = i
    result = {}
    for w in sorted(partition.layer(2)):
        seen: set[int] = set()
        frontier = [w]
        while frontier:
            nxt = []
            for u in frontier:
                for x in graph.adjacency[u]:
                    if depth[x] == depth[u] + 1 and x not in seen:
                        seen.add(x)
                        nxt.append(x)
            frontier = nxt
        result[w] = frozenset(seen)
    return result


def diameter(graph: NetworkGraph):
    """Largest pairwise distance, or ``UNREACHABLE`` for a disconnected graph."""
    dm = all_pairs_distances(graph)
    if not dm.connected():
        return UNREACHABLE
    return int(dm.table.max()) if graph.n else 0


def _render(x):
    if isinstance(x, Fraction):
        return format_scalar(x)
    return x


@dataclass(frozen=True)
class CheckResult:
    """One inequality ``lhs <relation> rhs``, or a skip with its reason."""

    name: str
    status: str
    lhs: object = None
    relation: str = ""
    rhs: object = None
    subject: int | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "subject": self.subject,
            "lhs": _render(self.lhs),
            "relation": self.relation,
            "rhs": _render(self.rhs),
            "reason": self.reason,
        }


def _compare(name, lhs, relation, rhs, subject=None, reason="") -> CheckResult:
    ok = {"<=": lhs <= rhs, "<": lhs < rhs, ">=": lhs >= rhs}[relation]
    return CheckResult(name, PASS if ok else FAIL, lhs, relation, rhs, subject, reason)


@dataclass(frozen=True)
class RootAudit:
    root: int
    checks: tuple[CheckResult, ...]


@dataclass(frozen=True)
class LemmaAuditReport:
    n: int
    alpha: Fraction
    nash_certified: bool
    roots: tuple[RootAudit, ...]
    global_checks: tuple[CheckResult, ...] = field(default=())

    def all_checks(self) -> list[tuple[int | None, CheckResult]]:
        out = [(None, c) for c in self.global_checks]
        for ra in self.roots:
            out.extend((ra.root, c) for c in ra.checks)
        return out

    def failures(self) -> list[tuple[int | None, CheckResult]]:
        return [(r, c) for r, c in self.all_checks() if c.status == FAIL]

    @property
    def passed(self) -> bool:
        """No applicable check failed (skipped checks do not count as passes)."""
        return not self.failures()

    def summary(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for _, c in self.all_checks():
            out.setdefault(c.name, {PASS: 0, FAIL: 0, SKIPPED: 0})[c.status] += 1
        return out

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": format_scalar(self.alpha),
            "nash_certified": self.nash_certified,
            "passed": self.passed,
            "summary": self.summary(),
            "global": [c.to_dict() for c in self.global_checks],
            "roots": [{"root": ra.root, "checks": [c.to_dict() for c in ra.checks]} for ra in self.roots],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["root", "check", "subject", "status", "lhs", "relation", "rhs", "reason"])
        for root, c in self.all_checks():
            writer.writerow(
                ["" if root is None else root, c.name, "" if c.subject is None else c.subject, c.status,
                 "" if c.lhs is None else _render(c.lhs), c.relation, "" if c.rhs is None else _render(c.rhs), c.reason]
            )
        return buf.getvalue()


def _audit_root(game: GameParams, profile: StrategyProfile, graph: NetworkGraph, root: int) -> RootAudit:
    n, alpha = game.n, game.alpha
    floor_alpha = math.floor(alpha)
    frac = alpha - floor_alpha
    part = layer_partition(graph, root)
    n1, n2 = part.layer(1), part.layer(2)
    checks: list[CheckResult] = []

    kids = children_map(part, graph)
    child_bound = math.floor(alpha - 1)
    for w in sorted(kids):
        checks.append(_compare("children_bound", len(kids[w]), "<=", child_bound, subject=w))
    covered = frozenset().union(*kids.values()) if kids else frozenset()
    if covered != part.deep(3):
        # coverage is a graph fact, not an equilibrium claim
        checks.append(CheckResult("children_cover", FAIL, len(covered), "==", len(part.deep(3))))

    if alpha >= 1:
        checks.append(_compare("layer_size", Fraction(len(n1) + len(n2) + 1), ">=", Fraction(n) / alpha))
    else:
        checks.append(CheckResult("layer_size", SKIPPED, reason="needs alpha >= 1"))

    if graph.degree(root) >= alpha:
        ecc = max(bfs_distances(graph, root))
        checks.append(_compare("dist3", ecc, "<=", 3, subject=root))
    else:
        checks.append(CheckResult("dist3", SKIPPED, subject=root, reason="degree below alpha"))

    if frac == 0:
        checks.append(CheckResult("n2_purchase_bound", SKIPPED, reason="alpha is integral"))
        checks.append(CheckResult("n34_bound", SKIPPED, reason="alpha is integral"))
    else:
        bound = len(n1) * alpha / frac
        if not n2:
            checks.append(CheckResult("n2_purchase_bound", SKIPPED, reason="N_2 is empty"))
        for w in sorted(n2):
            d = len(profile[w] & n2)
            checks.append(_compare("n2_purchase_bound", Fraction(d), "<=", bound, subject=w))
        deep = part.deep(3)
        checks.append(_compare("n34_bound", Fraction(len(deep)), "<", len(n1) * 5 * alpha**3 / frac))
    return RootAudit(root, tuple(checks))


def lemma_audit(
    game: GameParams, profile: StrategyProfile, require_nash: bool = True, limit: int = EXHAUSTIVE_LIMIT
) -> LemmaAuditReport:
    """Evaluate every structural equilibrium inequality for every root.

    Checks whose hypotheses fail on this instance are recorded as skipped
    with a reason. With ``require_nash`` the profile must first pass the
    exhaustive weak-Nash check.
    """
    if game.n != profile.n:
        raise PreconditionError(f"game has n={game.n} but profile has n={profile.n}")
    certified = False
    if require_nash:
        verdict = is_nash(game, profile, limit=limit)
        if not verdict.is_weak_nash:
            raise PreconditionError(f"profile is not a weak Nash equilibrium: {verdict.witness}")
        certified = True
    graph = build_graph(profile)
    if not all_pairs_distances(graph).connected():
        raise PreconditionError("audit needs a connected graph")
    alpha = game.alpha
    global_checks = []
    if game.n > alpha**3:
        global_checks.append(_compare("diameter", diameter(graph), "<=", 4))
    else:
        global_checks.append(CheckResult("diameter", SKIPPED, reason=f"needs n > alpha^3 = {format_scalar(alpha**3)}"))
    roots = tuple(_audit_root(game, profile, graph, r) for r in range(game.n))
    return LemmaAuditReport(game.n, alpha, certified, roots, tuple(global_checks))
