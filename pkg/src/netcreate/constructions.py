"""Named profiles (star, clique, clique with pendant leaves, random) and the
closed-form price-of-anarchy bounds."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .core import StrategyProfile, parse_alpha
from .errors import PreconditionError


def make_star(n: int) -> StrategyProfile:
    """Star centred at vertex 0, with the centre buying every edge."""
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}")
    return StrategyProfile((frozenset(range(1, n)),) + tuple(frozenset() for _ in range(n - 1)))


def make_clique(n: int) -> StrategyProfile:
    """Complete graph; the lower id of each pair buys it."""
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}")
    return StrategyProfile(tuple(frozenset(range(v + 1, n)) for v in range(n)))


@dataclass(frozen=True)
class CliqueLeavesSpec:
    """A ``k``-clique whose members each buy ``alpha - 1`` pendant leaves."""

    k: int
    alpha: int

    def __post_init__(self):
        alpha = self.alpha
        if isinstance(alpha, Fraction):
            if alpha.denominator != 1:
                raise PreconditionError(f"alpha must be an integer, got {alpha}")
            alpha = int(alpha)
        if not isinstance(alpha, int) or alpha < 2:
            raise PreconditionError(f"alpha must be an integer >= 2, got {self.alpha!r}")
        if not isinstance(self.k, int) or self.k < 3:
            raise PreconditionError(f"clique size k must be >= 3, got {self.k!r}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def n(self) -> int:
        return self.k * self.alpha

    def leaf(self, i: int, j: int) -> int:
        """Vertex id of the ``j``-th leaf (0-based) of clique vertex ``i``."""
        return self.k + i * (self.alpha - 1) + j


def make_clique_with_leaves(spec: CliqueLeavesSpec) -> StrategyProfile:
    k, a = spec.k, spec.alpha
    lists = []
    for i in range(k):
        own = set(range(i + 1, k))
        own.update(spec.leaf(i, j) for j in range(a - 1))
        lists.append(frozenset(own))
    lists.extend(frozenset() for _ in range(k * (a - 1)))
    return StrategyProfile(tuple(lists))


def counterexample_cost_exact(spec: CliqueLeavesSpec) -> Fraction:
    k, a = spec.k, spec.alpha
    edges = a * (k * (k - 1) // 2 + (a - 1) * k)
    # clique vertex: rest of clique and own leaves at 1, other leaves at 2
    clique = k * ((k - 1) + (a - 1) + 2 * (k - 1) * (a - 1))
    # leaf: owner at 1, other clique and sibling leaves at 2, foreign leaves at 3
    leaves = k * (a - 1) * (1 + 2 * (k - 1) + 2 * (a - 2) + 3 * (k - 1) * (a - 1))
    return Fraction(edges + clique + leaves)


def poa_lower_bound_asymptote(alpha) -> Fraction:
    """Limit of the clique-with-leaves cost over the star optimum as ``k`` grows."""
    a = parse_alpha(alpha)
    if a.denominator != 1:
        raise PreconditionError(f"lower bound needs integral alpha, got {a}")
    if a < 2:
        raise PreconditionError(f"lower bound needs alpha >= 2, got {a}")
    return Fraction(3, 2) - Fraction(3, 4) / a + 1 / a**2


def poa_upper_bound_formula(alpha, n: int) -> float:
    """Upper bound on the price of anarchy for non-integral ``alpha > 2``.

    Natural logarithm. This is the one place floating point is used.
    """
    a = parse_alpha(alpha)
    if a.denominator == 1:
        raise PreconditionError(f"upper bound is undefined for integral alpha ({a})")
    if a <= 2:
        raise PreconditionError(f"upper bound needs alpha > 2, got {a}")
    if n <= a**3:
        raise PreconditionError(f"upper bound needs n > alpha^3 = {a**3}, got n={n}")
    frac = a - math.floor(a)
    coeff = 150 * a**6 / frac**2
    return 1.0 + float(coeff) * math.sqrt(math.log(n) / n)


def make_random_profile(n: int, edge_prob: float, seed: int) -> StrategyProfile:
    """Each pair ``v < w`` is present with probability ``edge_prob``,
    bought by a uniformly chosen endpoint."""
    if not 0.0 <= edge_prob <= 1.0:
        raise PreconditionError(f"edge_prob must lie in [0, 1], got {edge_prob}")
    rng = random.Random(seed)
    lists: list[set[int]] = [set() for _ in range(n)]
    for v in range(n):
        for w in range(v + 1, n):
            if rng.random() < edge_prob:
                if rng.random() < 0.5:
                    lists[v].add(w)
                else:
                    lists[w].add(v)
    return StrategyProfile(tuple(frozenset(s) for s in lists))
