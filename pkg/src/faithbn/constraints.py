"""Polynomial constraints that an independence statement imposes on CPT parameters.

For a statement A _||_ B | C over ``Omega = ancestors(A u B u C)`` each
instantiation (a, b, c) contributes the polynomial

    P(a, b, c) * P(c) - P(a, c) * P(b, c)

where every marginal P(F = f) is expanded as a sum, over instantiations of
``Omega - F``, of products of one parameter per vertex of ``Omega``. No
sum-to-one simplification is applied, so the polynomials live over the full
symbol set and vanish on the probability simplex exactly when the
independence holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .discrete import CptParams, StateSpace, random_cpts
from .errors import GuardError, InputError
from .graph import Dag, IndependenceStatement, _as_set, ancestors_of

POLY_GUARD = 2**16


@dataclass(frozen=True, order=True)
class ParamSymbol:
    vertex: str
    value: int
    parent_values: tuple[int, ...] = ()
    parents: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.parents:
            return f"θ[{self.vertex},{self.value}]"
        ctx = ",".join(f"{p}={x}" for p, x in zip(self.parents, self.parent_values))
        return f"θ[{self.vertex},{self.value}|{ctx}]"


@lru_cache(maxsize=None)
def symbol(vertex: str, value: int, parent_values: tuple[int, ...], parents: tuple[str, ...]) -> ParamSymbol:
    return ParamSymbol(vertex, value, parent_values, parents)


@dataclass(frozen=True)
class Monomial:
    coefficient: int
    factors: tuple[ParamSymbol, ...]

    def __str__(self) -> str:
        body = "·".join(map(str, self.factors)) or "1"
        if self.coefficient == 1:
            return body
        if self.coefficient == -1:
            return f"-{body}"
        return f"{self.coefficient}·{body}"


@dataclass(frozen=True)
class ConstraintPolynomial:
    monomials: tuple[Monomial, ...]
    instantiation: tuple[tuple[str, int], ...] = ()
    stmt: IndependenceStatement | None = None

    @classmethod
    def from_terms(cls, terms: Mapping[tuple, int], **meta) -> ConstraintPolynomial:
        monos = tuple(Monomial(k, f) for f, k in sorted(terms.items()) if k != 0)
        return cls(monos, **meta)

    def terms(self) -> dict[tuple, int]:
        return {m.factors: m.coefficient for m in self.monomials}

    def is_zero(self) -> bool:
        return not self.monomials

    def symbols(self) -> set[ParamSymbol]:
        return {s for m in self.monomials for s in m.factors}

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        out = str(self.monomials[0])
        for m in self.monomials[1:]:
            s = str(m)
            out += f" - {s[1:]}" if s.startswith("-") else f" + {s}"
        return out


def _mul(p: Mapping[tuple, int], q: Mapping[tuple, int]) -> dict[tuple, int]:
    out: dict[tuple, int] = {}
    for f1, k1 in p.items():
        for f2, k2 in q.items():
            f = tuple(sorted(f1 + f2))
            out[f] = out.get(f, 0) + k1 * k2
    return out


def _sub(p: Mapping[tuple, int], q: Mapping[tuple, int]) -> dict[tuple, int]:
    out = dict(p)
    for f, k in q.items():
        out[f] = out.get(f, 0) - k
    return {f: k for f, k in out.items() if k != 0}


def _marginal_terms(g: Dag, ss: StateSpace, omega: Sequence[str], fixed: Mapping[str, int]) -> dict[tuple, int]:
    free = [v for v in omega if v not in fixed]
    terms: dict[tuple, int] = {}
    for inst in ss.instantiations(free):
        value = dict(fixed)
        value.update(zip(free, inst))
        factors = []
        for v in omega:
            pa = g.parents(v)
            factors.append(symbol(v, value[v], tuple(value[p] for p in pa), pa))
        key = tuple(sorted(factors))
        terms[key] = terms.get(key, 0) + 1
    return terms


def _omega(g: Dag, vertices: Iterable[str]) -> list[str]:
    anc = ancestors_of(g, vertices)
    return [v for v in g.vertices if v in anc]


def marginal_as_polynomial(
    g: Dag,
    ss: StateSpace,
    f: Iterable[str],
    vals: Mapping[str, int] | Sequence[int] = (),
    omega: Iterable[str] | None = None,
) -> ConstraintPolynomial:
    """P(F = vals) as a polynomial summed over ``omega - F``.

    ``omega`` defaults to the ancestral closure of ``f``; it must be
    ancestral and contain ``f``.
    """
    f = _as_set(f)
    if not isinstance(vals, Mapping):
        vals = dict(zip(sorted(f), vals))
    if set(vals) != f:
        raise InputError("instantiation does not cover the marginal's vertex set")
    for v, x in vals.items():
        if not 0 <= x < ss.nv(v):
            raise InputError(f"value {x} out of range for {v}")
    if omega is None:
        om = _omega(g, f)
    else:
        om_set = _as_set(omega)
        if not f <= om_set or ancestors_of(g, om_set) != om_set:
            raise InputError("omega must be ancestral and contain f")
        om = [v for v in g.vertices if v in om_set]
    n = ss.inst(v for v in om if v not in f)
    if n > POLY_GUARD:
        raise GuardError(f"{n} monomials exceeds the polynomial guard {POLY_GUARD}")
    inst = tuple(sorted(vals.items()))
    return ConstraintPolynomial.from_terms(_marginal_terms(g, ss, om, vals), instantiation=inst)


def build_ci_polynomials(g: Dag, ss: StateSpace, stmt: IndependenceStatement) -> list[ConstraintPolynomial]:
    """One polynomial per instantiation of A u B u C, in name-ordered lexicographic order."""
    stmt.check(g)
    ss.check(g)
    abc = sorted(stmt.vertices())
    count = ss.inst(abc)
    om = _omega(g, abc)
    widest = ss.inst(v for v in om if v not in stmt.c)
    if count * widest > POLY_GUARD * 16:
        raise GuardError(f"statement needs {count} polynomials of up to {widest}^2 terms")
    cache: dict = {}

    def m(vals: dict[str, int]):
        key = tuple(sorted(vals.items()))
        if key not in cache:
            cache[key] = _marginal_terms(g, ss, om, vals)
        return cache[key]

    out = []
    for inst in ss.instantiations(abc):
        full = dict(zip(abc, inst))
        pick = lambda s: {v: full[v] for v in s}  # noqa: E731
        lhs = _mul(m(full), m(pick(stmt.c)))
        rhs = _mul(m(pick(stmt.a | stmt.c)), m(pick(stmt.b | stmt.c)))
        out.append(
            ConstraintPolynomial.from_terms(_sub(lhs, rhs), instantiation=tuple(sorted(full.items())), stmt=stmt)
        )
    return out


def eval_polynomial(p: ConstraintPolynomial, theta: CptParams) -> Fraction:
    values: dict[ParamSymbol, Fraction] = {}
    total = Fraction(0)
    for mono in p.monomials:
        term = Fraction(mono.coefficient)
        for s in mono.factors:
            x = values.get(s)
            if x is None:
                try:
                    x = theta.rows[s.vertex][s.parent_values][s.value]
                except (KeyError, IndexError):
                    raise InputError(f"{s} is not a parameter of the given CPTs") from None
                if tuple(theta.parents[s.vertex]) != s.parents:
                    raise InputError(f"{s} disagrees with the parents of {s.vertex}")
                values[s] = x
            term *= x
        total += term
    return total


def nontrivial_witness(
    p: ConstraintPolynomial, g: Dag, ss: StateSpace, seed: int = 0, max_tries: int = 20
) -> CptParams | None:
    """First sampled parameter vector at which ``p`` is nonzero, if any.

    ``None`` is evidence (not proof) that ``p`` vanishes on the simplex.
    """
    if p.is_zero():
        return None
    for k in range(max_tries):
        theta = random_cpts(g, ss, seed + k)
        if eval_polynomial(p, theta) != 0:
            return theta
    return None


def to_free_basis(p: ConstraintPolynomial, ss: StateSpace) -> ConstraintPolynomial:
    """Eliminate each row's last entry via θ[D,last|pa] = 1 - Σ θ[D,d|pa]."""
    terms: dict[tuple, int] = {}
    for mono in p.monomials:
        expanded = {(): mono.coefficient}
        for s in mono.factors:
            last = ss.nv(s.vertex) - 1
            if s.value == last:
                sub = {(): 1}
                for d in range(last):
                    sub[(symbol(s.vertex, d, s.parent_values, s.parents),)] = -1
            else:
                sub = {(s,): 1}
            expanded = _mul(expanded, sub)
        for f, k in expanded.items():
            terms[f] = terms.get(f, 0) + k
    return ConstraintPolynomial.from_terms(terms, instantiation=p.instantiation, stmt=p.stmt)


def monomial_count_unmerged(g: Dag, ss: StateSpace, f: Iterable[str], omega: Iterable[str] | None = None) -> int:
    """inst(Omega - F): the number of summands before any merging."""
    f = _as_set(f)
    om = _omega(g, f) if omega is None else list(_as_set(omega))
    return math.prod(ss.nv(v) for v in om if v not in f)
