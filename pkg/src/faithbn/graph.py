"""DAGs, d-separation and the graphical side of entailment.

Vertices are strings. Two orders are used throughout:

* declaration order (``Dag.vertices``) fixes table axes and breaks ties in
  topological sorting;
* name order (``sorted``) is the "lexicographic" order used for parent
  lists, canonical statements and every arbitrary choice between paths.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import CycleError, GuardError, InputError, PreconditionError

Edge = tuple[str, str]

ENTAILED_GUARD = 8


def _as_set(x) -> frozenset[str]:
    if isinstance(x, str):
        return frozenset([x])
    return frozenset(x)


@dataclass(frozen=True)
class Dag:
    vertices: tuple[str, ...]
    edges: frozenset[Edge]
    _parents: dict = field(init=False, repr=False, compare=False, hash=False)
    _children: dict = field(init=False, repr=False, compare=False, hash=False)
    _order: tuple = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, vertices: Iterable[str], edges: Iterable[Edge] = ()):
        vertices = tuple(vertices)
        edge_list = [tuple(e) for e in edges]
        if len(set(vertices)) != len(vertices):
            raise InputError(f"duplicate vertex in {vertices}")
        known = set(vertices)
        for t, h in edge_list:
            if t not in known or h not in known:
                raise InputError(f"edge {t}->{h} uses an undeclared vertex")
            if t == h:
                raise InputError(f"self-loop on {t}")
        if len(set(edge_list)) != len(edge_list):
            raise InputError("duplicate edge")
        edge_set = frozenset(edge_list)
        if any((h, t) in edge_set for t, h in edge_set):
            raise CycleError({v for e in edge_set if e[::-1] in edge_set for v in e})
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edge_set)
        parents = {v: [] for v in vertices}
        children = {v: [] for v in vertices}
        for t, h in edge_set:
            parents[h].append(t)
            children[t].append(h)
        object.__setattr__(self, "_parents", {v: tuple(sorted(p)) for v, p in parents.items()})
        object.__setattr__(self, "_children", {v: tuple(sorted(c)) for v, c in children.items()})
        object.__setattr__(self, "_order", _kahn(vertices, self._parents, self._children))

    def parents(self, v: str) -> tuple[str, ...]:
        """Parents of ``v`` in name order."""
        return self._parents[v]

    def children(self, v: str) -> tuple[str, ...]:
        return self._children[v]

    def neighbors(self, v: str) -> tuple[str, ...]:
        return tuple(sorted(self._parents[v] + self._children[v]))

    def has_edge(self, tail: str, head: str) -> bool:
        return (tail, head) in self.edges

    def adjacent(self, u: str, v: str) -> bool:
        return (u, v) in self.edges or (v, u) in self.edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def descendants(self, v: str) -> frozenset[str]:
        """Strict descendants of ``v``."""
        seen: set[str] = set()
        stack = list(self._children[v])
        while stack:
            u = stack.pop()
            if u not in seen:
                seen.add(u)
                stack.extend(self._children[u])
        return frozenset(seen)

    def subgraph(self, edges: Iterable[Edge], vertices: Iterable[str] | None = None) -> Dag:
        """Edge subgraph; keeps every vertex unless ``vertices`` is given."""
        edges = set(edges)
        if not edges <= self.edges:
            raise InputError("subgraph edges must be edges of the graph")
        if vertices is None:
            keep = self.vertices
        else:
            wanted = set(vertices)
            keep = tuple(v for v in self.vertices if v in wanted)
        return Dag(keep, sorted(edges))

    def skeleton_cycle_rank(self) -> int:
        """Independent undirected cycles: edges - vertices + components."""
        return len(self.edges) - len(self.vertices) + _components(self)

    def is_singly_connected(self) -> bool:
        return self.skeleton_cycle_rank() == 0

    def __str__(self) -> str:
        body = ", ".join(f"{t}->{h}" for t, h in self.sorted_edges())
        return f"Dag({', '.join(self.vertices)}: {body})"


def _kahn(vertices, parents, children) -> tuple[str, ...]:
    indeg = {v: len(parents[v]) for v in vertices}
    rank = {v: i for i, v in enumerate(vertices)}
    ready = [v for v in vertices if indeg[v] == 0]
    order = []
    while ready:
        ready.sort(key=rank.__getitem__)
        v = ready.pop(0)
        order.append(v)
        for c in children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
    if len(order) != len(vertices):
        stuck = set(vertices) - set(order)
        # peel sinks so only vertices on (or between) cycles remain
        while True:
            sinks = {v for v in stuck if not set(children[v]) & stuck}
            if not sinks:
                break
            stuck -= sinks
        raise CycleError(stuck)
    return tuple(order)


def _components(g: Dag) -> int:
    seen: set[str] = set()
    count = 0
    for v in g.vertices:
        if v in seen:
            continue
        count += 1
        stack = [v]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(g.neighbors(u))
    return count


def topological_order(g: Dag) -> list[str]:
    """Kahn order, ties broken by declaration order."""
    return list(g._order)


def _check_vertices(g: Dag, s: Iterable[str]) -> None:
    unknown = set(s) - set(g.vertices)
    if unknown:
        raise InputError(f"unknown vertices {sorted(unknown)}")


def ancestors_of(g: Dag, s: Iterable[str]) -> frozenset[str]:
    """Smallest parent-closed superset of ``s`` (reflexive)."""
    s = _as_set(s)
    _check_vertices(g, s)
    out = set(s)
    stack = list(s)
    while stack:
        v = stack.pop()
        for p in g.parents(v):
            if p not in out:
                out.add(p)
                stack.append(p)
    return frozenset(out)


@dataclass(frozen=True)
class IndependenceStatement:
    """``a`` independent of ``b`` given ``c``; all three disjoint."""

    a: frozenset[str]
    b: frozenset[str]
    c: frozenset[str] = frozenset()

    def __post_init__(self):
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, _as_set(getattr(self, name)))
        if not self.a or not self.b:
            raise InputError("independence statement needs nonempty a and b")
        if self.a & self.b or self.a & self.c or self.b & self.c:
            raise InputError(f"sets of {self} are not disjoint")

    @classmethod
    def of(cls, a, b, c=()) -> IndependenceStatement:
        return cls(_as_set(a), _as_set(b), _as_set(c))

    def key(self) -> tuple:
        return (tuple(sorted(self.a)), tuple(sorted(self.b)), tuple(sorted(self.c)))

    def canonical(self) -> IndependenceStatement:
        if tuple(sorted(self.b)) < tuple(sorted(self.a)):
            return IndependenceStatement(self.b, self.a, self.c)
        return self

    def vertices(self) -> frozenset[str]:
        return self.a | self.b | self.c

    def check(self, g: Dag) -> None:
        _check_vertices(g, self.vertices())

    def __str__(self) -> str:
        a, b, c = (",".join(x) for x in self.key())
        return f"{{{a}}} _||_ {{{b}}} | {{{c}}}"


def _stmt(a, b, c) -> IndependenceStatement:
    if isinstance(a, IndependenceStatement):
        return a
    return IndependenceStatement.of(a, b, c)


def _descendant_closure_hits(g: Dag, c: frozenset[str]) -> frozenset[str]:
    """Vertices that are in ``c`` or have a descendant in ``c``."""
    return ancestors_of(g, c)


def d_separated(g: Dag, a, b=None, c=()) -> bool:
    """True iff every path between ``a`` and ``b`` is blocked by ``c``.

    Reachability over (vertex, direction) states: "up" means the walk
    arrived from a child, "down" from a parent.
    """
    stmt = _stmt(a, b, c)
    stmt.check(g)
    cond = stmt.c
    active_colliders = _descendant_closure_hits(g, cond)
    visited: set[tuple[str, str]] = set()
    queue = deque((x, "up") for x in sorted(stmt.a))
    while queue:
        v, direction = queue.popleft()
        if (v, direction) in visited:
            continue
        visited.add((v, direction))
        if v not in cond and v in stmt.b:
            return False
        if direction == "up":
            if v in cond:
                continue
            queue.extend((p, "up") for p in g.parents(v))
            queue.extend((ch, "down") for ch in g.children(v))
        else:
            if v not in cond:
                queue.extend((ch, "down") for ch in g.children(v))
            if v in active_colliders:
                queue.extend((p, "up") for p in g.parents(v))
    return True


@dataclass(frozen=True)
class ConnectingPath:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    colliders: tuple[bool, ...]

    def __post_init__(self):
        if len(self.edges) != len(self.vertices) - 1:
            raise InputError("path needs one edge between consecutive vertices")
        if len(self.colliders) != max(len(self.vertices) - 2, 0):
            raise InputError("one collider flag per intermediate vertex")

    def collider_vertices(self) -> tuple[str, ...]:
        inner = self.vertices[1:-1]
        return tuple(v for v, flag in zip(inner, self.colliders) if flag)

    def segment_edges(self, u: str, v: str) -> tuple[Edge, ...]:
        """Edges of the path between vertices ``u`` and ``v``."""
        i, j = sorted((self.vertices.index(u), self.vertices.index(v)))
        return self.edges[i:j]

    def __str__(self) -> str:
        out = [self.vertices[0]]
        for v, (t, h) in zip(self.vertices[1:], self.edges):
            out.append("->" if h == v else "<-")
            out.append(v)
        return " ".join(out)


def _path_from_vertices(g: Dag, seq: list[str]) -> ConnectingPath:
    edges = []
    for u, v in zip(seq, seq[1:]):
        edges.append((u, v) if g.has_edge(u, v) else (v, u))
    flags = tuple(
        edges[i - 1][1] == seq[i] and edges[i][1] == seq[i] for i in range(1, len(seq) - 1)
    )
    return ConnectingPath(tuple(seq), tuple(edges), flags)


def _search_path(g: Dag, stmt: IndependenceStatement) -> list[str] | None:
    """Name-order DFS over simple paths; the first hit is the lexicographically least."""
    cond = stmt.c
    active = _descendant_closure_hits(g, cond)

    def extend(path: list[str], into_last: bool) -> list[str] | None:
        v = path[-1]
        for w in g.neighbors(v):
            if w in path:
                continue
            if w in stmt.a:
                continue
            if len(path) > 1:
                into_next = g.has_edge(w, v)  # edge points into v from w
                collider = into_last and into_next
                if collider and v not in active:
                    continue
                if not collider and v in cond:
                    continue
            w_into = g.has_edge(v, w)
            if w in stmt.b:
                return path + [w]
            found = extend(path + [w], w_into)
            if found:
                return found
        return None

    for x in sorted(stmt.a):
        found = extend([x], False)
        if found:
            return found
    return None


def find_d_connecting_path(g: Dag, a, b=None, c=()) -> ConnectingPath | None:
    stmt = _stmt(a, b, c)
    stmt.check(g)
    if d_separated(g, stmt):
        return None
    seq = _search_path(g, stmt)
    if seq is None:  # pragma: no cover - would contradict path/walk equivalence
        raise AssertionError(f"reachability says connected but no simple path for {stmt}")
    return _path_from_vertices(g, seq)


def _directed_path_to(g: Dag, start: str, targets: frozenset[str]) -> list[str] | None:
    """Least directed path from ``start`` to the first member of ``targets`` reached."""

    def dfs(path: list[str]) -> list[str] | None:
        for ch in g.children(path[-1]):
            if ch in targets:
                return path + [ch]
            found = dfs(path + [ch])
            if found:
                return found
        return None

    return dfs([start])


def _pathway_graph(g: Dag, p: ConnectingPath, c: frozenset[str]):
    """Edges of ``p`` plus one descendant path per collider not in ``c``."""
    edges = set(p.edges)
    tails: dict[str, list[str]] = {}
    for d in p.collider_vertices():
        if d in c:
            continue
        down = _directed_path_to(g, d, c)
        tails[d] = down
        edges.update(zip(down, down[1:]))
    return edges, tails


def singly_connected_subgraph(g: Dag, a: str, b: str, c=()) -> Dag:
    """Forest subgraph in which ``a`` and ``b`` stay d-connected given ``c``.

    Built from the least d-connecting path plus one least directed path
    from every collider outside ``c`` down to ``c``. While the skeleton
    still has cycles, the path segment between two colliders whose
    descendant paths meet is cut and the construction is repeated on the
    smaller graph. The returned graph keeps all vertices of ``g``.
    """
    c = _as_set(c)
    stmt = IndependenceStatement.of(a, b, c)
    stmt.check(g)
    if d_separated(g, stmt):
        raise PreconditionError(f"{stmt} is d-separated; no connecting subgraph exists")
    h = g
    while True:
        p = find_d_connecting_path(h, stmt)
        edges, tails = _pathway_graph(h, p, c)
        g1 = g.subgraph(edges)
        if g1.is_singly_connected():
            return g1
        h = _cut_merged_segment(g1, p, tails, stmt)


def _cut_merged_segment(g1: Dag, p: ConnectingPath, tails, stmt) -> Dag:
    colliders = [d for d in p.collider_vertices() if d in tails]
    for d1, d2 in itertools.combinations(colliders, 2):
        if not set(tails[d1]) & set(tails[d2]):
            continue
        cut = set(p.segment_edges(d1, d2))
        candidate = g1.subgraph(g1.edges - cut)
        if not d_separated(candidate, stmt):
            return candidate
    # no collider pair applies; drop single cycle edges while d-connection survives
    for e in sorted(g1.edges):
        candidate = g1.subgraph(g1.edges - {e})
        if candidate.skeleton_cycle_rank() < g1.skeleton_cycle_rank() and not d_separated(
            candidate, stmt
        ):
            return candidate
    raise AssertionError(f"could not reduce multiple pathways for {stmt}")  # pragma: no cover


def canonical_triples(vertices: Iterable[str]) -> Iterator[IndependenceStatement]:
    """Every disjoint (A, B, C) with A, B nonempty and A < B in name order."""
    vs = sorted(vertices)
    for labels in itertools.product(range(4), repeat=len(vs)):
        a = frozenset(v for v, l in zip(vs, labels) if l == 1)
        b = frozenset(v for v, l in zip(vs, labels) if l == 2)
        if not a or not b or tuple(sorted(b)) < tuple(sorted(a)):
            continue
        c = frozenset(v for v, l in zip(vs, labels) if l == 3)
        yield IndependenceStatement(a, b, c)


def count_canonical_triples(n: int) -> int:
    return (4**n - 2 * 3**n + 2**n) // 2


def enumerate_entailed(g: Dag, guard: int = ENTAILED_GUARD) -> set[IndependenceStatement]:
    n = len(g.vertices)
    if n > guard:
        raise GuardError(
            f"{n} vertices exceeds guard {guard}: {count_canonical_triples(n)} triples to check"
        )
    return {t for t in canonical_triples(g.vertices) if d_separated(g, t)}


@dataclass(frozen=True)
class Atom:
    stmt: IndependenceStatement
    negated: bool = False

    def __str__(self) -> str:
        s = f"I({','.join(sorted(self.stmt.a))}; {','.join(sorted(self.stmt.b))}"
        if self.stmt.c:
            s += f" | {','.join(sorted(self.stmt.c))}"
        s += ")"
        return f"not {s}" if self.negated else s


@dataclass(frozen=True)
class And:
    parts: tuple

    def __str__(self) -> str:
        return "(" + " and ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class Or:
    parts: tuple

    def __str__(self) -> str:
        return "(" + " or ".join(map(str, self.parts)) + ")"


CompoundSentence = Union[Atom, And, Or]


def negate(s: CompoundSentence) -> CompoundSentence:
    """De Morgan negation, keeping negations on atoms only."""
    if isinstance(s, Atom):
        return Atom(s.stmt, not s.negated)
    if isinstance(s, And):
        return Or(tuple(negate(p) for p in s.parts))
    if isinstance(s, Or):
        return And(tuple(negate(p) for p in s.parts))
    raise InputError(f"not a sentence: {s!r}")


def decide_sentence(g: Dag, s: CompoundSentence) -> bool:
    """Faithful entailment of a boolean combination, atom by atom."""
    if isinstance(s, Atom):
        return d_separated(g, s.stmt) != s.negated
    if isinstance(s, (And, Or)):
        if not s.parts:
            raise InputError("empty conjunction/disjunction")
        values = (decide_sentence(g, p) for p in s.parts)
        return all(values) if isinstance(s, And) else any(values)
    raise InputError(f"malformed sentence node {s!r}")


def skeleton(g: Dag) -> frozenset[frozenset[str]]:
    return frozenset(frozenset(e) for e in g.edges)


def v_structures(g: Dag) -> frozenset[tuple[str, str, str]]:
    """Unshielded colliders as (x, z, y) with x < y."""
    out = set()
    for z in g.vertices:
        for x, y in itertools.combinations(g.parents(z), 2):
            if not g.adjacent(x, y):
                out.add((x, z, y))
    return frozenset(out)


def markov_equivalent(g1: Dag, g2: Dag) -> bool:
    if set(g1.vertices) != set(g2.vertices):
        raise InputError("graphs are over different vertex sets")
    return skeleton(g1) == skeleton(g2) and v_structures(g1) == v_structures(g2)


def all_dags(vertices: Iterable[str]) -> Iterator[Dag]:
    """Every labeled DAG over ``vertices`` (none/forward/backward per pair)."""
    vs = tuple(vertices)
    pairs = list(itertools.combinations(vs, 2))
    for choice in itertools.product(range(3), repeat=len(pairs)):
        edges = []
        for (u, v), k in zip(pairs, choice):
            if k == 1:
                edges.append((u, v))
            elif k == 2:
                edges.append((v, u))
        try:
            yield Dag(vs, edges)
        except CycleError:
            continue
