"""Linear Gaussian networks with exact rational moments."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError, PreconditionError
from .graph import Dag, Edge, IndependenceStatement, _stmt, d_separated, singly_connected_subgraph

COEF_SCALE = 2**16


@dataclass(frozen=True)
class LinearGaussianParams:
    coefficients: Mapping[Edge, Fraction]
    variances: Mapping[str, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", {tuple(e): Fraction(b) for e, b in self.coefficients.items()})
        object.__setattr__(self, "variances", {v: Fraction(s) for v, s in self.variances.items()})
        for v, s in self.variances.items():
            if s <= 0:
                raise InputError(f"variance of {v} must be positive")

    def check(self, g: Dag) -> None:
        if set(self.coefficients) != set(g.edges):
            raise InputError("coefficients must be keyed exactly by the edge set")
        if set(self.variances) != set(g.vertices):
            raise InputError("one variance per vertex required")


@dataclass(frozen=True)
class CovarianceMatrix:
    vertices: tuple[str, ...]
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.vertices)
        if len(self.entries) != n or any(len(r) != n for r in self.entries):
            raise InputError("covariance must be square over its vertices")
        for i, j in itertools.combinations(range(n), 2):
            if self.entries[i][j] != self.entries[j][i]:
                raise InputError("covariance must be symmetric")

    def __getitem__(self, key: tuple[str, str]) -> Fraction:
        i, j = (self.vertices.index(v) for v in key)
        return self.entries[i][j]

    def block(self, rows: Sequence[str], cols: Sequence[str]) -> list[list[Fraction]]:
        ri = [self.vertices.index(v) for v in rows]
        ci = [self.vertices.index(v) for v in cols]
        return [[self.entries[i][j] for j in ci] for i in ri]

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self.entries])


def det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    a = [list(map(Fraction, r)) for r in m]
    n = len(a)
    out = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            out = -out
        out *= a[col][col]
        for r in range(col + 1, n):
            if a[r][col]:
                k = a[r][col] / a[col][col]
                a[r] = [x - k * y for x, y in zip(a[r], a[col])]
    return out


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Solve a X = b exactly; raises on singular ``a``."""
    n = len(a)
    aug = [list(map(Fraction, ra)) + list(map(Fraction, rb)) for ra, rb in zip(a, b)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise InputError("conditioning covariance block is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                k = aug[r][col]
                aug[r] = [x - k * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def implied_covariance(g: Dag, params: LinearGaussianParams) -> CovarianceMatrix:
    """Covariance of X_v = sum_p b_pv X_p + e_v, accumulated in topological order."""
    params.check(g)
    order = g._order
    cov: dict[tuple[str, str], Fraction] = {}
    for k, v in enumerate(order):
        pa = g.parents(v)
        for u in order[:k]:
            x = sum((params.coefficients[(p, v)] * cov[(p, u)] for p in pa), Fraction(0))
            cov[(v, u)] = cov[(u, v)] = x
        var = params.variances[v]
        for p in pa:
            for q in pa:
                var += params.coefficients[(p, v)] * params.coefficients[(q, v)] * cov[(p, q)]
        cov[(v, v)] = var
    vs = g.vertices
    return CovarianceMatrix(vs, tuple(tuple(cov[(u, w)] for w in vs) for u in vs))


def is_positive_definite(s: CovarianceMatrix) -> bool:
    """Sylvester's criterion on leading principal minors."""
    n = len(s.vertices)
    return all(det([r[:k] for r in s.entries[:k]]) > 0 for k in range(1, n + 1))


def conditional_cross_covariance(s: CovarianceMatrix, a, b, c) -> list[list[Fraction]]:
    """Sigma_ab - Sigma_ac Sigma_cc^-1 Sigma_cb."""
    a, b, c = sorted(a), sorted(b), sorted(c)
    sab = s.block(a, b)
    if not c:
        return sab
    x = solve(s.block(c, c), s.block(c, b))
    sac = s.block(a, c)
    return [
        [sab[i][j] - sum(sac[i][k] * x[k][j] for k in range(len(c))) for j in range(len(b))]
        for i in range(len(a))
    ]


def pairwise_minor(s: CovarianceMatrix, x: str, y: str, c) -> Fraction:
    """det Sigma[{x} u c, {y} u c]; zero iff x, y are conditionally uncorrelated."""
    c = sorted(c)
    return det(s.block([x] + c, [y] + c))


def _check_triple(s: CovarianceMatrix, stmt: IndependenceStatement) -> None:
    unknown = stmt.vertices() - set(s.vertices)
    if unknown:
        raise InputError(f"unknown vertices {sorted(unknown)}")


def ci_holds_gaussian(s: CovarianceMatrix, a, b=None, c=()) -> bool:
    stmt = _stmt(a, b, c)
    _check_triple(s, stmt)
    if stmt.c and det(s.block(sorted(stmt.c), sorted(stmt.c))) == 0:
        raise InputError("conditioning covariance block is singular")
    block = conditional_cross_covariance(s, stmt.a, stmt.b, stmt.c)
    return all(x == 0 for row in block for x in row)


def ci_holds_gaussian_pairwise(s: CovarianceMatrix, a, b=None, c=()) -> bool:
    stmt = _stmt(a, b, c)
    _check_triple(s, stmt)
    return all(pairwise_minor(s, x, y, stmt.c) == 0 for x in stmt.a for y in stmt.b)


def gaussian_residual(s: CovarianceMatrix, a, b=None, c=()) -> Fraction:
    stmt = _stmt(a, b, c)
    block = conditional_cross_covariance(s, stmt.a, stmt.b, stmt.c)
    return max(abs(x) for row in block for x in row)


def random_gaussian_params(g: Dag, seed: int) -> LinearGaussianParams:
    """Coefficients k / 2**16 with k uniform on [-2**16, 2**16] minus 0; unit variances."""
    rng = np.random.default_rng(seed)
    coefs = {}
    for e in g.sorted_edges():
        k = 0
        while k == 0:
            k = int(rng.integers(-COEF_SCALE, COEF_SCALE, endpoint=True))
        coefs[e] = Fraction(k, COEF_SCALE)
    return LinearGaussianParams(coefs, {v: Fraction(1) for v in g.vertices})


@dataclass
class GaussianWitness:
    params: LinearGaussianParams
    subgraph: Dag
    resamples: int


def build_gaussian_witness(g: Dag, stmt: IndependenceStatement, seed: int = 0, max_tries: int = 50) -> GaussianWitness:
    """Linear system on ``g`` in which ``stmt`` fails.

    Edges of the connecting forest get nonzero coefficients (unit on the
    first attempt, random afterwards); every other edge gets 0.
    """
    stmt.check(g)
    if d_separated(g, stmt):
        raise PreconditionError(f"{stmt} is entailed by the graph")
    # a set-valued statement fails as soon as one member pair is dependent
    x, y = next(
        (x, y)
        for x, y in itertools.product(sorted(stmt.a), sorted(stmt.b))
        if not d_separated(g, x, y, stmt.c)
    )
    sub = singly_connected_subgraph(g, x, y, stmt.c)
    for k in range(max_tries):
        if k == 0:
            on = {e: Fraction(1) for e in sub.edges}
        else:
            on = random_gaussian_params(sub, seed + k).coefficients
        coefs = {e: on.get(e, Fraction(0)) for e in g.sorted_edges()}
        params = LinearGaussianParams(coefs, {v: Fraction(1) for v in g.vertices})
        if not ci_holds_gaussian(implied_covariance(g, params), stmt):
            return GaussianWitness(params, sub, k)
    raise RuntimeError(f"no Gaussian witness for {stmt} after {max_tries} draws")  # pragma: no cover


def gaussian_witness(g: Dag, stmt: IndependenceStatement, seed: int = 0) -> LinearGaussianParams:
    return build_gaussian_witness(g, stmt, seed).params
