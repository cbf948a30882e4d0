import itertools
from fractions import Fraction

import pytest

from netcreate import StrategyProfile

INF = float("inf")


def floyd_warshall(n, edges):
    """Reference all-pairs distances; ``INF`` across components."""
    d = [[0 if i == j else INF for j in range(n)] for i in range(n)]
    for a, b in edges:
        d[a][b] = d[b][a] = 1
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def oracle_edges(profile):
    return {tuple(sorted((v, w))) for v in range(profile.n) for w in profile[v]}


def oracle_vertex_cost(alpha, profile, v):
    d = floyd_warshall(profile.n, oracle_edges(profile))
    s = sum(d[v])
    return INF if s == INF else Fraction(alpha) * len(profile[v]) + s


def oracle_social_cost(alpha, profile):
    return sum((oracle_vertex_cost(alpha, profile, v) for v in range(profile.n)), Fraction(0))


def oracle_best_response(alpha, profile, v):
    """Minimum over every subset of the other vertices, by the Floyd-Warshall oracle."""
    others = [u for u in range(profile.n) if u != v]
    best = None
    for r in range(len(others) + 1):
        for combo in itertools.combinations(others, r):
            c = oracle_vertex_cost(alpha, profile.with_strategy(v, combo), v)
            if best is None or c < best[0]:
                best = (c, frozenset(combo))
    return best


def profile(*lists):
    return StrategyProfile.from_lists(lists)


@pytest.fixture
def mk():
    return profile


_acceptance_results = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _acceptance_results[report.nodeid.split("::")[-1]] = report.outcome
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.outcome != "passed":
        _acceptance_results[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance_results.items(), key=lambda kv: kv[0]):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
