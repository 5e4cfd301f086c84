"""Independent oracles the property tests compare against.

Everything here works on plain strings, dicts and sets, sharing no code
with the package. Deliberately naive: exhaustive enumeration and textbook
algorithms only.
"""

from __future__ import annotations

from itertools import chain, combinations
from typing import Iterable, Mapping, Optional, Sequence

import networkx as nx


def _subsets(items: Sequence[str]) -> Iterable[frozenset[str]]:
    return (
        frozenset(c)
        for c in chain.from_iterable(
            combinations(items, r) for r in range(len(items) + 1)
        )
    )


def brute_force_usability(
    problems: Sequence[str],
    patterns: Mapping[str, tuple[Optional[str], Sequence[str]]],
    primitives: frozenset[str],
) -> tuple[frozenset[str], frozenset[str]]:
    """Smallest closed (solvable, usable) labeling, by full enumeration.

    A labeling is closed when it contains the primitives, marks usable
    every pattern whose steps are all solvable, and marks solvable the
    problem of every usable pattern. Steps naming unknown problems can
    never be satisfied. The least fixed point is the intersection of all
    closed labelings.
    """
    problem_set = set(problems)
    pattern_ids = sorted(patterns)
    closed: list[tuple[frozenset[str], frozenset[str]]] = []
    for solvable in _subsets(sorted(problem_set)):
        if not primitives <= solvable:
            continue
        for usable in _subsets(pattern_ids):
            ok = True
            for pid in pattern_ids:
                problem, steps = patterns[pid]
                all_solved = all(s in solvable and s in problem_set for s in steps)
                if all_solved and pid not in usable:
                    ok = False
                    break
                if pid in usable and problem in problem_set and problem not in solvable:
                    ok = False
                    break
            if ok:
                closed.append((solvable, usable))
    best_solvable = frozenset(problem_set)
    best_usable = frozenset(pattern_ids)
    for solvable, usable in closed:
        best_solvable &= solvable
        best_usable &= usable
    return best_solvable, best_usable


def enumerate_simple_paths(
    up: Mapping[str, set[str]],
    down: Mapping[str, set[str]],
    start: str,
    goal: str,
    max_len: int,
) -> set[tuple[tuple[str, str, str], ...]]:
    """Every simple up/down path from start to goal, as edge tuples."""
    results: set[tuple[tuple[str, str, str], ...]] = set()
    if start == goal:
        results.add(())
        return results

    def walk(at: str, seen: frozenset[str], trail: tuple) -> None:
        if len(trail) >= max_len:
            return
        for direction, neighbors in (("up", up), ("down", down)):
            for nxt in neighbors.get(at, set()):
                if nxt in seen:
                    continue
                edge = (at, direction, nxt)
                if nxt == goal:
                    results.add(trail + (edge,))
                else:
                    walk(nxt, seen | {nxt}, trail + (edge,))

    walk(start, frozenset({start}), ())
    return results


def classify_path(directions: Sequence[str]) -> str:
    """Reference classification of a direction sequence."""
    word = "".join("u" if d == "up" else "d" for d in directions)
    if word == "u" * len(word):
        return "generalization"
    if word == "d" * len(word) and word:
        return "specialization"
    ups = word.rstrip("d")
    if ups and set(ups) == {"u"} and len(ups) < len(word):
        return "similarity"
    return "mixed"


def count_bad_components(edges: Mapping[str, set[str]]) -> int:
    """Strongly connected components of size > 1, plus self-loops."""
    graph = nx.DiGraph()
    graph.add_nodes_from(edges)
    for src, targets in edges.items():
        for dst in targets:
            graph.add_edge(src, dst)
    bad = 0
    for component in nx.strongly_connected_components(graph):
        if len(component) > 1:
            bad += 1
        else:
            (node,) = component
            if graph.has_edge(node, node):
                bad += 1
    return bad


def is_acyclic(edges: Mapping[str, set[str]]) -> bool:
    return count_bad_components(edges) == 0
