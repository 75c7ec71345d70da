"""Exact multinomial Bayesian networks.

Probabilities are :class:`fractions.Fraction` throughout and every
conditional-independence decision is an exact equality test.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import GuardError, InputError, PreconditionError
from .graph import Dag, IndependenceStatement, _as_set, _stmt

Rational = Fraction

CELL_GUARD = 2**22


@dataclass(frozen=True)
class StateSpace:
    cards: Mapping[str, int]

    def __post_init__(self):
        cards = dict(self.cards)
        for v, k in cards.items():
            if not isinstance(k, (int, np.integer)) or k < 2:
                raise InputError(f"{v} needs at least 2 values, got {k}")
        object.__setattr__(self, "cards", {v: int(k) for v, k in cards.items()})

    @classmethod
    def uniform(cls, vertices: Iterable[str], k: int = 2) -> StateSpace:
        return cls({v: k for v in vertices})

    def nv(self, v: str) -> int:
        return self.cards[v]

    def values(self, v: str) -> range:
        return range(self.cards[v])

    def inst(self, vertices: Iterable[str]) -> int:
        return math.prod(self.cards[v] for v in vertices)

    def instantiations(self, vertices: Sequence[str]):
        return itertools.product(*(range(self.cards[v]) for v in vertices))

    def is_binary(self) -> bool:
        return all(k == 2 for k in self.cards.values())

    def check(self, g: Dag) -> None:
        missing = set(g.vertices) - set(self.cards)
        if missing:
            raise InputError(f"statespace has no entry for {sorted(missing)}")

    def restrict(self, vertices: Iterable[str]) -> StateSpace:
        return StateSpace({v: self.cards[v] for v in vertices})


@dataclass(frozen=True)
class CptParams:
    """One probability vector per (vertex, parent instantiation).

    ``parents[v]`` is in name order and ``rows[v]`` maps each parent
    instantiation (values in that order) to the full vector over C(v).
    """

    parents: Mapping[str, tuple[str, ...]]
    rows: Mapping[str, Mapping[tuple[int, ...], tuple[Fraction, ...]]]

    def theta(self, v: str, value: int, parent_values: tuple[int, ...] = ()) -> Fraction:
        return self.rows[v][tuple(parent_values)][value]

    def check(self, g: Dag, ss: StateSpace) -> None:
        ss.check(g)
        for v in g.vertices:
            if v not in self.rows or tuple(self.parents.get(v, ())) != g.parents(v):
                raise InputError(f"parameters are not shaped for {v} with parents {g.parents(v)}")
            expected = set(ss.instantiations(g.parents(v)))
            if set(self.rows[v]) != expected:
                raise InputError(f"parent instantiations of {v} do not match the statespace")
            for pa, row in self.rows[v].items():
                if len(row) != ss.nv(v):
                    raise InputError(f"row {v}|{pa} has {len(row)} entries, expected {ss.nv(v)}")
                if any(p < 0 or p > 1 for p in row) or sum(row) != 1:
                    raise InputError(f"row {v}|{pa} is not a probability vector")

    def vector(self) -> list[Fraction]:
        """All entries in canonical (vertex, parent inst, value) order."""
        out = []
        for v in sorted(self.rows):
            for pa in sorted(self.rows[v]):
                out.extend(self.rows[v][pa])
        return out


def nparam(g: Dag, ss: StateSpace, v: str) -> int:
    if v not in g.vertices:
        raise InputError(f"unknown vertex {v}")
    return (ss.nv(v) - 1) * ss.inst(g.parents(v))


def dimension(g: Dag, ss: StateSpace) -> int:
    return sum(nparam(g, ss, v) for v in g.vertices)


def random_cpts(g: Dag, ss: StateSpace, seed: int) -> CptParams:
    """Rows are independent uniform integers in [1, 2**32], normalized."""
    ss.check(g)
    rng = np.random.default_rng(seed)
    rows = {}
    for v in g.vertices:
        table = {}
        for pa in ss.instantiations(g.parents(v)):
            weights = [int(w) for w in rng.integers(1, 2**32, size=ss.nv(v), endpoint=True)]
            total = sum(weights)
            table[pa] = tuple(Fraction(w, total) for w in weights)
        rows[v] = table
    return CptParams({v: g.parents(v) for v in g.vertices}, rows)


def cpts_from_function(g: Dag, ss: StateSpace, fn) -> CptParams:
    """Build parameters from ``fn(vertex, parent_values) -> vector``."""
    rows = {
        v: {pa: tuple(Fraction(p) for p in fn(v, pa)) for pa in ss.instantiations(g.parents(v))}
        for v in g.vertices
    }
    params = CptParams({v: g.parents(v) for v in g.vertices}, rows)
    params.check(g, ss)
    return params


class JointTable:
    """Dense exact joint density over ``vertices`` (axis order)."""

    def __init__(self, vertices: Sequence[str], probs: np.ndarray, check: bool = True):
        self.vertices = tuple(vertices)
        self.probs = probs
        self.probs.flags.writeable = False
        self._axis = {v: i for i, v in enumerate(self.vertices)}
        self._cache: dict = {}
        if probs.ndim != len(self.vertices):
            raise InputError("table rank does not match the vertex list")
        if check:
            if probs.size > CELL_GUARD:
                raise GuardError(f"{probs.size} cells exceeds the {CELL_GUARD} cell guard")
            if any(p < 0 for p in probs.flat) or sum(probs.flat) != 1:
                raise InputError("joint table must be nonnegative and sum to 1")

    @property
    def statespace(self) -> StateSpace:
        return StateSpace(dict(zip(self.vertices, self.probs.shape)))

    @property
    def cards(self) -> tuple[int, ...]:
        return self.probs.shape

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, JointTable)
            and self.vertices == other.vertices
            and self.probs.shape == other.probs.shape
            and bool(np.all(self.probs == other.probs))
        )

    def __getitem__(self, inst: Mapping[str, int] | tuple[int, ...]) -> Fraction:
        if isinstance(inst, Mapping):
            inst = tuple(inst[v] for v in self.vertices)
        return self.probs[inst]

    def is_positive(self) -> bool:
        return all(p > 0 for p in self.probs.flat)

    def _integer_weights(self) -> np.ndarray:
        # the CI equation is homogeneous of degree 2, so a common scale is harmless
        if "int" not in self._cache:
            scale = math.lcm(*(p.denominator for p in self.probs.flat))
            ints = np.empty(self.probs.shape, dtype=object)
            for idx, p in np.ndenumerate(self.probs):
                ints[idx] = p.numerator * (scale // p.denominator)
            self._cache["int"] = ints
        return self._cache["int"]

    def _marginal_array(self, keep: frozenset[str], exact: bool = False) -> np.ndarray:
        """Sum over vertices outside ``keep``, keeping singleton axes for broadcasting."""
        key = ("m", exact, keep)
        if key not in self._cache:
            base = self.probs if exact else self._integer_weights()
            axes = tuple(i for i, v in enumerate(self.vertices) if v not in keep)
            self._cache[key] = base.sum(axis=axes, keepdims=True) if axes else base
        return self._cache[key]

    def axis(self, v: str) -> int:
        return self._axis[v]


def _check_table_vertices(t: JointTable, s: Iterable[str]) -> None:
    unknown = set(s) - set(t.vertices)
    if unknown:
        raise InputError(f"unknown vertices {sorted(unknown)}")


def joint_from_cpts(g: Dag, ss: StateSpace, theta: CptParams) -> JointTable:
    theta.check(g, ss)
    shape = tuple(ss.nv(v) for v in g.vertices)
    if math.prod(shape) > CELL_GUARD:
        raise GuardError(f"{math.prod(shape)} cells exceeds the {CELL_GUARD} cell guard")
    axis = {v: i for i, v in enumerate(g.vertices)}
    table = np.full(shape, Fraction(1), dtype=object)
    for v in g.vertices:
        pa = g.parents(v)
        fshape = [1] * len(shape)
        for u in pa + (v,):
            fshape[axis[u]] = ss.nv(u)
        factor = np.empty(fshape, dtype=object)
        for pa_vals, row in theta.rows[v].items():
            for value, p in enumerate(row):
                idx = [0] * len(shape)
                for u, x in zip(pa, pa_vals):
                    idx[axis[u]] = x
                idx[axis[v]] = value
                factor[tuple(idx)] = p
        table = table * factor
    return JointTable(g.vertices, table, check=False)


def marginal(t: JointTable, f: Iterable[str], vals: Mapping[str, int] | Sequence[int] = ()) -> Fraction:
    """P(F = vals). ``vals`` is a mapping or a sequence aligned with ``sorted(f)``."""
    f = _as_set(f)
    _check_table_vertices(t, f)
    if not isinstance(vals, Mapping):
        vals = dict(zip(sorted(f), vals))
    if set(vals) != set(f):
        raise InputError("instantiation does not cover the marginal's vertex set")
    idx = []
    for v, k in zip(t.vertices, t.cards):
        if v in f:
            x = vals[v]
            if not 0 <= x < k:
                raise InputError(f"value {x} out of range for {v}")
            idx.append(x)
        else:
            idx.append(0)
    return t._marginal_array(frozenset(f), exact=True)[tuple(idx)]


def _validate_triple(t: JointTable, stmt: IndependenceStatement) -> None:
    _check_table_vertices(t, stmt.vertices())


def _residual_array(t: JointTable, stmt: IndependenceStatement, exact: bool) -> np.ndarray:
    # P(abc)P(c) - P(ac)P(bc); rows with P(c) = 0 vanish identically
    a, b, c = stmt.a, stmt.b, stmt.c
    m = t._marginal_array
    return m(a | b | c, exact) * m(c, exact) - m(a | c, exact) * m(b | c, exact)


def ci_holds(t: JointTable, a, b=None, c=()) -> bool:
    stmt = _stmt(a, b, c)
    _validate_triple(t, stmt)
    return not np.any(_residual_array(t, stmt, exact=False))


def ci_residual(t: JointTable, a, b=None, c=()) -> Fraction:
    """Largest |P(abc)P(c) - P(ac)P(bc)| over instantiations; 0 iff independent."""
    stmt = _stmt(a, b, c)
    _validate_triple(t, stmt)
    return max(abs(x) for x in _residual_array(t, stmt, exact=True).flat)


def markov_holds(g: Dag, t: JointTable) -> bool:
    if set(g.vertices) != set(t.vertices):
        raise InputError("graph and table have different vertex sets")
    for v in g.vertices:
        pa = frozenset(g.parents(v))
        rest = frozenset(g.vertices) - pa - g.descendants(v) - {v}
        if rest and not ci_holds(t, IndependenceStatement(frozenset([v]), rest, pa)):
            return False
    return True


def extend_statespace(t: JointTable, ss_new: StateSpace) -> JointTable:
    """Embed ``t`` in a larger statespace; all new cells get probability 0."""
    shape = []
    for v, k in zip(t.vertices, t.cards):
        if v not in ss_new.cards:
            raise InputError(f"new statespace lacks {v}")
        if ss_new.nv(v) < k:
            raise InputError(f"new statespace shrinks {v} from {k} to {ss_new.nv(v)}")
        shape.append(ss_new.nv(v))
    if math.prod(shape) > CELL_GUARD:
        raise GuardError(f"{math.prod(shape)} cells exceeds the {CELL_GUARD} cell guard")
    out = np.full(tuple(shape), Fraction(0), dtype=object)
    out[tuple(slice(0, k) for k in t.cards)] = t.probs
    return JointTable(t.vertices, out, check=False)


def product_extend(t: JointTable, extra: Sequence[tuple[str, Sequence]]) -> JointTable:
    """Append independent variables with the given marginals."""
    table = t.probs
    names = list(t.vertices)
    for v, vec in extra:
        if v in names:
            raise InputError(f"{v} is already a vertex of the table")
        vec = [Fraction(p) for p in vec]
        if len(vec) < 2 or any(p < 0 for p in vec) or sum(vec) != 1:
            raise InputError(f"marginal for {v} is not a probability vector")
        table = np.multiply.outer(table, np.array(vec, dtype=object))
        names.append(v)
    if table.size > CELL_GUARD:
        raise GuardError(f"{table.size} cells exceeds the {CELL_GUARD} cell guard")
    return JointTable(names, table, check=False)


def reorder(t: JointTable, vertices: Sequence[str]) -> JointTable:
    if sorted(vertices) != sorted(t.vertices):
        raise InputError("reorder needs a permutation of the table's vertices")
    perm = [t.axis(v) for v in vertices]
    return JointTable(vertices, np.transpose(t.probs, perm).copy(), check=False)


RULES = ("symmetry", "decomposition", "intersection", "weak_transitivity")


@dataclass
class RuleCheck:
    checked: int = 0
    fired: int = 0
    counterexamples: list = field(default_factory=list)


@dataclass
class RuleReport:
    trials: int
    rules: dict[str, RuleCheck]

    @property
    def ok(self) -> bool:
        return all(not r.counterexamples for r in self.rules.values())


def _draw_roles(rng, vertices, need: str, optional: str = "Z"):
    """Random disjoint role sets; every role in ``need`` is nonempty."""
    roles = need + optional
    if len(vertices) < len(need):
        return None
    while True:
        labels = rng.integers(0, len(roles) + 1, size=len(vertices))
        sets = {r: frozenset(v for v, l in zip(vertices, labels) if l == i) for i, r in enumerate(roles)}
        if all(sets[r] for r in need):
            return sets


def check_rules(t: JointTable, trials: int, seed: int, rules: Sequence[str] | None = None) -> RuleReport:
    """Spot-check the independence calculus on ``t`` with random configurations.

    Symmetry and Decomposition are checked on any table; Intersection needs
    a strictly positive table and Weak Transitivity additionally needs all
    variables binary. When ``rules`` is None every applicable rule runs.
    """
    positive = t.is_positive()
    binary = all(k == 2 for k in t.cards)
    if rules is None:
        rules = [r for r in RULES if r in ("symmetry", "decomposition") or positive]
        if not binary and "weak_transitivity" in rules:
            rules.remove("weak_transitivity")
    for r in rules:
        if r not in RULES:
            raise InputError(f"unknown rule {r}")
        if r in ("intersection", "weak_transitivity") and not positive:
            raise PreconditionError(f"{r} needs a strictly positive table")
        if r == "weak_transitivity" and not binary:
            raise PreconditionError("weak transitivity needs an all-binary table")
    rng = np.random.default_rng(seed)
    vs = list(t.vertices)

    def dep(x, y, z):
        return not ci_holds(t, IndependenceStatement(x, y, z))

    report = RuleReport(trials, {r: RuleCheck() for r in rules})
    for _ in range(trials):
        for r in rules:
            rc = report.rules[r]
            if r == "symmetry":
                s = _draw_roles(rng, vs, "XY")
                if s is None:
                    continue
                rc.checked += 1
                if dep(s["X"], s["Y"], s["Z"]):
                    rc.fired += 1
                    if not dep(s["Y"], s["X"], s["Z"]):
                        rc.counterexamples.append(s)
            elif r == "decomposition":
                s = _draw_roles(rng, vs, "XYW")
                if s is None:
                    continue
                rc.checked += 1
                if dep(s["X"], s["Y"], s["Z"]):
                    rc.fired += 1
                    if not dep(s["X"], s["W"] | s["Y"], s["Z"]):
                        rc.counterexamples.append(s)
            elif r == "intersection":
                s = _draw_roles(rng, vs, "XYW")
                if s is None:
                    continue
                rc.checked += 1
                x, y, w, z = s["X"], s["Y"], s["W"], s["Z"]
                if dep(x, w | y, z) and not dep(x, w, z | y):
                    rc.fired += 1
                    if not dep(x, y, z | w):
                        rc.counterexamples.append(s)
            else:
                s = _draw_roles(rng, vs, "XYG")
                if s is None:
                    continue
                # gamma is a single variable; surplus draws join Z
                g_sorted = sorted(s["G"])
                gamma = frozenset(g_sorted[:1])
                x, y, z = s["X"], s["Y"], s["Z"] | frozenset(g_sorted[1:])
                rc.checked += 1
                if dep(x, gamma, z) and dep(gamma, y, z):
                    rc.fired += 1
                    if not (dep(x, y, z) or dep(x, y, z | gamma)):
                        rc.counterexamples.append({"X": x, "Y": y, "Z": z, "gamma": gamma})
    return report
