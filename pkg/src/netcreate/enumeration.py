"""Exhaustive search over tiny games: every duplicate-free profile, all
equilibria, the brute-force optimum and the exact price of anarchy.

A profile without doubly bought pairs is a *profile code*: a base-3 number
with one digit per pair ``(v, w)``, ``v < w``, in lexicographic pair order,
the first pair being the most significant digit. Digit 0 means the pair is
absent, 1 that ``v`` buys it, 2 that ``w`` buys it.

Doubly bought pairs are left out on purpose. For ``alpha > 0`` dropping one
copy saves ``alpha`` and changes no distance, so such a profile is never a
weak equilibrium, and it is never optimal either.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence

from .core import CostReport, GameParams, NetworkGraph, StrategyProfile, all_pairs_distances, format_scalar, social_cost
from .equilibria import to_positions, vertex_status
from .errors import LimitExceeded, PreconditionError, SchemaError

ENUMERATION_LIMIT = 5
MAX_ENUMERATION = 6
MODES = ("weak", "strict")


@lru_cache(maxsize=None)
def pair_list(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(combinations(range(n), 2))


def profile_count(n: int) -> int:
    return 3 ** len(pair_list(n))


def _check(n: int, limit: int) -> None:
    if limit > MAX_ENUMERATION:
        raise PreconditionError(f"enumeration limit cannot exceed {MAX_ENUMERATION}")
    if n > limit:
        raise LimitExceeded("enumeration", n, limit)


def _trits(code: int, n: int) -> list[int]:
    m = len(pair_list(n))
    out = [0] * m
    for i in range(m - 1, -1, -1):
        code, out[i] = divmod(code, 3)
    return out


def decode(code: int, n: int) -> StrategyProfile:
    if not 0 <= code < profile_count(n):
        raise SchemaError(f"profile code {code} out of range for n={n}")
    lists: list[set[int]] = [set() for _ in range(n)]
    for (v, w), t in zip(pair_list(n), _trits(code, n)):
        if t == 1:
            lists[v].add(w)
        elif t == 2:
            lists[w].add(v)
    return StrategyProfile(tuple(frozenset(s) for s in lists))


def encode(profile: StrategyProfile) -> int:
    if profile.double_purchases():
        raise SchemaError(f"doubly bought pairs have no code: {profile.double_purchases()}")
    code = 0
    for v, w in pair_list(profile.n):
        code = 3 * code + (1 if w in profile[v] else 2 if v in profile[w] else 0)
    return code


def enumerate_profiles(n: int, limit: int = ENUMERATION_LIMIT) -> Iterator[StrategyProfile]:
    _check(n, limit)
    for code in range(profile_count(n)):
        yield decode(code, n)


def _odometer(n: int, lo: int, hi: int):
    """Trits of every code in ``[lo, hi)``, in order, mutated in place."""
    trits = _trits(lo, n)
    for _ in range(lo, hi):
        yield trits
        i = len(trits) - 1
        while i >= 0 and trits[i] == 2:
            trits[i] = 0
            i -= 1
        if i >= 0:
            trits[i] += 1


def _code_masks(n: int, trits: list[int]) -> tuple[int, list[int], list[int]]:
    edges = 0
    bought = [0] * n
    incoming = [0] * n
    for i, ((v, w), t) in enumerate(zip(pair_list(n), trits)):
        if t:
            edges |= 1 << i
            if t == 1:
                bought[v] |= 1 << w
                incoming[w] |= 1 << v
            else:
                bought[w] |= 1 << v
                incoming[v] |= 1 << w
    return edges, bought, incoming


@lru_cache(maxsize=None)
def _touching(n: int) -> tuple[int, ...]:
    out = [0] * n
    for i, (v, w) in enumerate(pair_list(n)):
        out[v] |= 1 << i
        out[w] |= 1 << i
    return tuple(out)


def _scan_shard(n: int, alpha: Fraction, mode: str, lo: int, hi: int) -> list[int]:
    touching = _touching(n)
    strict = mode == "strict"
    found = []
    code = lo
    for trits in _odometer(n, lo, hi):
        edges, bought, incoming = _code_masks(n, trits)
        ok = True
        for v in range(n):
            improve, tie = vertex_status(n, v, edges & ~touching[v], incoming[v], to_positions(bought[v], v), alpha)
            if improve or (strict and tie):
                ok = False
                break
        if ok:
            found.append(code)
        code += 1
    return found


def _shards(total: int, count: int) -> list[tuple[int, int]]:
    count = max(1, min(count, total))
    step, extra = divmod(total, count)
    out, lo = [], 0
    for i in range(count):
        hi = lo + step + (1 if i < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out


def equilibrium_codes(game: GameParams, mode: str = "weak", limit: int = ENUMERATION_LIMIT, threads: int = 1) -> list[int]:
    """Codes of all weak (or strict) equilibria, ascending.

    With ``threads > 1`` contiguous code ranges are scanned in worker
    processes; the merge is by code, so the result does not depend on the
    number of workers.
    """
    if mode not in MODES:
        raise PreconditionError(f"mode must be one of {MODES}, got {mode!r}")
    n = game.n
    _check(n, limit)
    total = profile_count(n)
    if threads <= 1 or total < 1000:
        return _scan_shard(n, game.alpha, mode, 0, total)
    shards = _shards(total, threads * 4)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(_scan_shard, *zip(*[(n, game.alpha, mode, lo, hi) for lo, hi in shards]))
        return sorted(c for part in parts for c in part)


def enumerate_equilibria(
    game: GameParams, mode: str = "weak", limit: int = ENUMERATION_LIMIT, threads: int = 1
) -> list[tuple[int, CostReport]]:
    return [(c, social_cost(game, decode(c, game.n))) for c in equilibrium_codes(game, mode, limit, threads)]


@lru_cache(maxsize=1 << 16)
def _distance_total(n: int, edges: int):
    """Ordered-pair distance sum of the graph with these pair bits; None if disconnected."""
    g = NetworkGraph.from_edges(n, [p for i, p in enumerate(pair_list(n)) if edges >> i & 1])
    dm = all_pairs_distances(g)
    return int(dm.table.sum()) if dm.connected() else None


def _least_code(n: int, edges: int) -> int:
    m = len(pair_list(n))
    return sum(3 ** (m - 1 - i) for i in range(m) if edges >> i & 1)


def brute_force_optimum(game: GameParams, limit: int = ENUMERATION_LIMIT) -> tuple[Fraction, int]:
    """Minimum social cost over all duplicate-free profiles, with the least optimal code.

    A duplicate-free profile's cost depends only on its graph, and the
    least code of a graph has the lower endpoint buying every edge, so the
    scan runs over the ``2^C(n,2)`` graphs.
    """
    n = game.n
    _check(n, limit)
    best = None
    for edges in range(1 << len(pair_list(n))):
        dsum = _distance_total(n, edges)
        if dsum is None:
            continue
        cost = game.alpha * edges.bit_count() + dsum
        code = _least_code(n, edges)
        if best is None or (cost, code) < best:
            best = (cost, code)
    return Fraction(best[0]), best[1]


@dataclass(frozen=True)
class PoaResult:
    game: GameParams
    mode: str
    optimum: Fraction
    optimum_code: int
    worst_equilibrium: Fraction
    worst_code: int
    equilibrium_count: int
    poa: Fraction

    def to_row(self) -> dict:
        return {
            "n": self.game.n,
            "alpha": format_scalar(self.game.alpha),
            "mode": self.mode,
            "equilibrium_count": self.equilibrium_count,
            "optimum": format_scalar(self.optimum),
            "worst_equilibrium": format_scalar(self.worst_equilibrium),
            "poa": format_scalar(self.poa),
            "optimum_code": self.optimum_code,
            "worst_code": self.worst_code,
        }


SWEEP_COLUMNS = (
    "n", "alpha", "mode", "equilibrium_count", "optimum", "worst_equilibrium", "poa", "optimum_code", "worst_code",
)


def price_of_anarchy_exact(game: GameParams, mode: str = "weak", limit: int = ENUMERATION_LIMIT, threads: int = 1) -> PoaResult:
    codes = equilibrium_codes(game, mode, limit, threads)
    if not codes:
        raise PreconditionError(f"no {mode} equilibrium exists for n={game.n}, alpha={format_scalar(game.alpha)}")
    n = game.n
    worst = None
    for c in codes:
        trits = _trits(c, n)
        edges = sum(1 << i for i, t in enumerate(trits) if t)
        cost = game.alpha * edges.bit_count() + _distance_total(n, edges)
        if worst is None or cost > worst[0]:
            worst = (cost, c)
    optimum, opt_code = brute_force_optimum(game, limit)
    worst_cost = Fraction(worst[0])
    poa = worst_cost / optimum if optimum else Fraction(1)
    return PoaResult(game, mode, optimum, opt_code, worst_cost, worst[1], len(codes), poa)


def poa_sweep(
    n_list: Sequence[int], alpha_list: Sequence, mode: str = "weak", limit: int = ENUMERATION_LIMIT, threads: int = 1
) -> list[dict]:
    for n in n_list:
        _check(n, limit)
    return [
        price_of_anarchy_exact(GameParams(n, a), mode, limit, threads).to_row()
        for n in n_list
        for a in alpha_list
    ]


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
