from __future__ import annotations

import itertools
from collections import deque
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Mapping, Sequence, Set, Tuple, TypeVar

from .errors import SeedNotSatisfying

V = TypeVar("V", bound=Hashable)

# (variable, polarity); polarity True means the positive literal.
Literal = Tuple[int, bool]
Clause = Tuple[Literal, ...]


def tarjan_scc(vertices: Iterable[V], neighbours: Callable[[V], Iterable[V]]) -> Iterator[Set[V]]:
    """Yield strongly connected components, each after every component it reaches.

    Iterative form of Tarjan's algorithm: deep graphs do not hit the recursion limit.
    """
    counter = itertools.count()
    index: Dict[V, int] = {}
    lowlink: Dict[V, int] = {}
    stack: List[V] = []
    on_stack: Set[V] = set()

    for root in vertices:
        if root in index:
            continue
        index[root] = lowlink[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        work: List[Tuple[V, Iterator[V]]] = [(root, iter(neighbours(root)))]
        while work:
            v, successors = work[-1]
            descended = False
            for w in successors:
                if w not in index:
                    index[w] = lowlink[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(neighbours(w))))
                    descended = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if descended:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                component: Set[V] = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.add(w)
                    if w == v:
                        break
                yield component


def _implication_graph(variables: Sequence[int], clauses: Iterable[Clause]) -> Dict[Literal, List[Literal]]:
    graph: Dict[Literal, List[Literal]] = {}
    for var in variables:
        graph[(var, True)] = []
        graph[(var, False)] = []
    for clause in clauses:
        if len(clause) == 1:
            (lit,) = clause
            graph[(lit[0], not lit[1])].append(lit)
        elif len(clause) == 2:
            a, b = clause
            graph[(a[0], not a[1])].append(b)
            graph[(b[0], not b[1])].append(a)
        else:
            raise ValueError("2-SAT clauses have one or two literals")
    return graph


def two_sat_solve(variables: Sequence[int], clauses: Sequence[Clause]) -> Dict[int, bool] | None:
    """Satisfying assignment of a 2-CNF, or ``None`` when unsatisfiable."""
    graph = _implication_graph(variables, clauses)
    order = sorted(graph, key=lambda lit: (lit[0], not lit[1]))
    component_of: Dict[Literal, int] = {}
    for number, component in enumerate(tarjan_scc(order, lambda lit: sorted(graph[lit], key=lambda x: (x[0], not x[1])))):
        for lit in component:
            component_of[lit] = number
    assignment: Dict[int, bool] = {}
    for var in variables:
        positive, negative = component_of[(var, True)], component_of[(var, False)]
        if positive == negative:
            return None
        # Tarjan finishes sinks first, so the literal finished earlier is implied.
        assignment[var] = positive < negative
    return assignment


def satisfies(assignment: Mapping[int, bool], clauses: Iterable[Clause]) -> bool:
    return all(any(assignment[var] == polarity for var, polarity in clause) for clause in clauses)


def minimal_true_assignment(
    variables: Sequence[int], clauses: Sequence[Clause], seed: Mapping[int, bool]
) -> Dict[int, bool]:
    """Flip True variables to False, ascending, until no single flip keeps the formula satisfied."""
    assignment = {var: bool(seed[var]) for var in variables}
    if not satisfies(assignment, clauses):
        raise SeedNotSatisfying("seed assignment violates a clause")
    changed = True
    while changed:
        changed = False
        for var in sorted(variables):
            if not assignment[var]:
                continue
            assignment[var] = False
            if satisfies(assignment, clauses):
                changed = True
            else:
                assignment[var] = True
    return assignment


def shortest_cycle_through(adjacency: Mapping[V, Iterable[V]], start: V) -> List[V] | None:
    """Vertices of a shortest directed cycle through ``start``, beginning at it."""
    if start in adjacency.get(start, ()):
        return [start]
    parent: Dict[V, V] = {}
    queue = deque([start])
    seen = {start}
    while queue:
        u = queue.popleft()
        for w in sorted(adjacency.get(u, ())):  # type: ignore[type-var]
            if w == start:
                path = [u]
                while path[-1] != start:
                    path.append(parent[path[-1]])
                path.reverse()
                return path
            if w not in seen:
                seen.add(w)
                parent[w] = u
                queue.append(w)
    return None


def subsets_upto(labels: Iterable[int], max_size: int, *, min_size: int = 1) -> Iterator[Tuple[int, ...]]:
    """Subsets ordered by size, then lexicographically."""
    ordered = sorted(labels)
    for size in range(min_size, min(max_size, len(ordered)) + 1):
        yield from itertools.combinations(ordered, size)


__all__ = [
    "Literal",
    "Clause",
    "tarjan_scc",
    "two_sat_solve",
    "satisfies",
    "minimal_true_assignment",
    "shortest_cycle_through",
    "subsets_upto",
]
