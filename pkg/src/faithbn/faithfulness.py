"""Faithfulness reports, witnesses and the sampling experiments built on them."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Protocol, Sequence, Union

from . import discrete as dsc
from . import gaussian as gss
from .discrete import CptParams, JointTable, StateSpace
from .errors import GuardError, InputError, PreconditionError
from .gaussian import CovarianceMatrix, LinearGaussianParams
from .graph import (
    Dag,
    IndependenceStatement,
    all_dags,
    canonical_triples,
    count_canonical_triples,
    d_separated,
    singly_connected_subgraph,
)

REPORT_GUARD = 5
RECOVER_GUARD = 4
HALF = Fraction(1, 2)


class CiOracle(Protocol):
    vertices: tuple[str, ...]

    def independent(self, stmt: IndependenceStatement) -> bool: ...

    def residual(self, stmt: IndependenceStatement) -> Fraction | None: ...


class TableOracle:
    def __init__(self, table: JointTable):
        self.table = table
        self.vertices = table.vertices

    def independent(self, stmt):
        return dsc.ci_holds(self.table, stmt)

    def residual(self, stmt):
        return dsc.ci_residual(self.table, stmt)


class CovarianceOracle:
    def __init__(self, cov: CovarianceMatrix):
        self.cov = cov
        self.vertices = cov.vertices

    def independent(self, stmt):
        return gss.ci_holds_gaussian(self.cov, stmt)

    def residual(self, stmt):
        return gss.gaussian_residual(self.cov, stmt)


class GraphOracle:
    def __init__(self, g: Dag):
        self.g = g
        self.vertices = g.vertices

    def independent(self, stmt):
        return d_separated(self.g, stmt)

    def residual(self, stmt):
        return None


@dataclass(frozen=True)
class TripleVerdict:
    stmt: IndependenceStatement
    entailed: bool
    independent: bool

    @property
    def label(self) -> str:
        return {
            (True, True): "entailed-independent",
            (True, False): "entailed-dependent",
            (False, False): "not-entailed-dependent",
            (False, True): "not-entailed-independent",
        }[(self.entailed, self.independent)]


@dataclass
class FaithfulnessReport:
    classifications: list[TripleVerdict]
    min_residual: Fraction | None = None
    resamples: int = 0
    seed: int | None = None

    @property
    def markov_violations(self) -> list[IndependenceStatement]:
        return [t.stmt for t in self.classifications if t.entailed and not t.independent]

    @property
    def unfaithful_triples(self) -> list[IndependenceStatement]:
        return [t.stmt for t in self.classifications if not t.entailed and t.independent]

    @property
    def verdict(self) -> str:
        if self.markov_violations:
            return "markov-violating"
        if self.unfaithful_triples:
            return "unfaithful"
        return "faithful"

    @property
    def faithful(self) -> bool:
        return self.verdict == "faithful"

    def counts(self) -> dict[str, int]:
        out = dict.fromkeys(
            ["entailed-independent", "entailed-dependent", "not-entailed-dependent", "not-entailed-independent"], 0
        )
        for t in self.classifications:
            out[t.label] += 1
        return out


@lru_cache(maxsize=4096)
def _entailment(g: Dag) -> tuple[tuple[IndependenceStatement, bool], ...]:
    return tuple((t, d_separated(g, t)) for t in canonical_triples(g.vertices))


def faithfulness_report(
    g: Dag,
    oracle: CiOracle,
    triples: Iterable[IndependenceStatement] | None = None,
    residuals: bool = True,
    guard: int = REPORT_GUARD,
) -> FaithfulnessReport:
    """Classify each triple by (d-separated in ``g``, independent under ``oracle``).

    ``min_residual`` is the smallest departure from independence over the
    not-entailed triples the oracle judged dependent: an exact measure of
    how close the distribution comes to an unfaithful one.
    """
    if set(oracle.vertices) != set(g.vertices):
        raise InputError("oracle and graph are over different vertex sets")
    if triples is None:
        n = len(g.vertices)
        if n > guard:
            raise GuardError(
                f"{n} vertices exceeds the exhaustive guard {guard} "
                f"({count_canonical_triples(n)} triples); pass an explicit triple list"
            )
        pairs = _entailment(g)
    else:
        pairs = tuple((t, d_separated(g, t)) for t in triples)
    out = []
    smallest = None
    for t, ent in pairs:
        ind = oracle.independent(t)
        out.append(TripleVerdict(t, ent, ind))
        if residuals and not ent and not ind:
            r = oracle.residual(t)
            if r is not None and (smallest is None or r < smallest):
                smallest = r
    return FaithfulnessReport(out, smallest)


@dataclass
class WitnessResult:
    params: Union[CptParams, LinearGaussianParams]
    stmt: IndependenceStatement
    markov_ok: bool
    dependent_ok: bool
    resamples: int
    mode: str
    table: JointTable | None = None
    covariance: CovarianceMatrix | None = None
    subgraph: Dag | None = None
    statespace: StateSpace | None = None

    @property
    def success(self) -> bool:
        return self.markov_ok and self.dependent_ok


def local_dependence_cpts(g: Dag) -> CptParams:
    """Binary CPTs with P(1 | pa) = 1/5 + 3/5 * (share of parents at 1); roots 1/2."""
    ss = StateSpace.uniform(g.vertices, 2)

    def row(v, pa):
        if not pa:
            return (HALF, HALF)
        p1 = Fraction(1, 5) + Fraction(3, 5) * Fraction(sum(pa), len(pa))
        return (1 - p1, p1)

    return dsc.cpts_from_function(g, ss, row)


def _lift_cpts(g: Dag, sub: Dag, theta_sub: CptParams, ss: StateSpace) -> CptParams:
    """Parameters on ``g`` that reproduce ``theta_sub`` on the binary corner of ``ss``.

    Vertices outside ``sub`` are uniform binaries; every value above 1 gets
    probability 0, and rows for contexts that have probability 0 put all
    mass on value 0.
    """
    inside = set(sub.vertices)

    def row(v, pa):
        k = ss.nv(v)
        if any(x > 1 for x in pa):
            return (1,) + (0,) * (k - 1)
        if v in inside:
            ctx = dict(zip(g.parents(v), pa))
            base = theta_sub.rows[v][tuple(ctx[p] for p in sub.parents(v))]
        else:
            base = (HALF, HALF)
        return tuple(base) + (0,) * (k - 2)

    return dsc.cpts_from_function(g, ss, row)


def witness_discrete(
    g: Dag,
    stmt: IndependenceStatement,
    ss: StateSpace | None = None,
    mode: str = "structured",
    seed: int = 0,
    max_tries: int = 20,
) -> WitnessResult:
    """A verified distribution Markov to ``g`` in which ``stmt`` fails.

    Structured mode builds local-dependence CPTs on the connecting forest,
    extends them by independent uniform binaries, pads the result with
    zero-probability states up to ``ss`` and checks it exactly. Random mode
    draws CPTs on all of ``g``. Either mode resamples on failure.
    """
    stmt.check(g)
    ss = ss or StateSpace.uniform(g.vertices, 2)
    ss.check(g)
    if d_separated(g, stmt):
        raise PreconditionError(f"{stmt} is entailed by the graph")
    if mode == "random":
        for k in range(max_tries):
            theta = dsc.random_cpts(g, ss, seed + k)
            table = dsc.joint_from_cpts(g, ss, theta)
            res = WitnessResult(
                theta, stmt, dsc.markov_holds(g, table), not dsc.ci_holds(table, stmt), k, mode, table,
                statespace=ss,
            )
            if res.success:
                return res
        return res
    if mode != "structured":
        raise InputError(f"unknown witness mode {mode!r}")
    if len(stmt.a) != 1 or len(stmt.b) != 1:
        raise PreconditionError("structured witnesses need singleton a and b; use mode='random'")
    (a,), (b,) = stmt.a, stmt.b
    forest = singly_connected_subgraph(g, a, b, stmt.c)
    touched = {v for e in forest.edges for v in e} | {a, b}
    core = forest.subgraph(forest.edges, vertices=touched)
    core_ss = StateSpace.uniform(core.vertices, 2)
    extras = [(z, (HALF, HALF)) for z in g.vertices if z not in touched]
    for k in range(max_tries):
        if k == 0:
            theta_core = local_dependence_cpts(core)
        else:
            theta_core = dsc.random_cpts(core, core_ss, seed + k)
        binary = dsc.product_extend(dsc.joint_from_cpts(core, core_ss, theta_core), extras)
        binary = dsc.reorder(binary, g.vertices)
        table = dsc.extend_statespace(binary, ss)
        res = WitnessResult(
            _lift_cpts(g, core, theta_core, ss),
            stmt,
            dsc.markov_holds(g, table),
            not dsc.ci_holds(table, stmt),
            k,
            mode,
            table,
            subgraph=forest,
            statespace=ss,
        )
        if res.success:
            return res
    return res


def witness_gaussian(g: Dag, stmt: IndependenceStatement, seed: int = 0) -> WitnessResult:
    w = gss.build_gaussian_witness(g, stmt, seed)
    cov = gss.implied_covariance(g, w.params)
    # a linear system on g is Markov to g; re-check through the entailed triples anyway
    markov = all(gss.ci_holds_gaussian(cov, t) for t, ent in _entailment_any(g) if ent)
    return WitnessResult(
        w.params, stmt, markov, not gss.ci_holds_gaussian(cov, stmt), w.resamples, "gaussian",
        covariance=cov, subgraph=w.subgraph,
    )


def _entailment_any(g: Dag):
    if len(g.vertices) <= REPORT_GUARD:
        return _entailment(g)
    # local Markov statements generate everything else
    out = []
    for v in g.vertices:
        pa = frozenset(g.parents(v))
        rest = frozenset(g.vertices) - pa - g.descendants(v) - {v}
        if rest:
            out.append((IndependenceStatement(frozenset([v]), rest, pa), True))
    return out


def draw_oracle(g: Dag, ss: StateSpace | None, seed: int, family: str):
    if family == "discrete":
        ss = ss or StateSpace.uniform(g.vertices, 2)
        theta = dsc.random_cpts(g, ss, seed)
        return theta, TableOracle(dsc.joint_from_cpts(g, ss, theta))
    if family == "gaussian":
        params = gss.random_gaussian_params(g, seed)
        return params, CovarianceOracle(gss.implied_covariance(g, params))
    raise InputError(f"unknown family {family!r}")


def _draw_verdict(args) -> str:
    g, ss, seed, family = args
    _, oracle = draw_oracle(g, ss, seed, family)
    return faithfulness_report(g, oracle, residuals=False).verdict


@dataclass
class MeasureZeroResult:
    draws: int
    unfaithful: int
    markov_violations: int
    verdicts: tuple[str, ...] = field(repr=False, default=())
    seed: int = 0
    family: str = "discrete"


def measure_zero_experiment(
    g: Dag,
    ss: StateSpace | None,
    n: int,
    seed: int = 0,
    family: str = "discrete",
    workers: int = 1,
) -> MeasureZeroResult:
    """Draw ``n`` parameterizations (seeds ``seed .. seed+n-1``) and count unfaithful ones."""
    if len(g.vertices) > REPORT_GUARD:
        raise GuardError(f"{len(g.vertices)} vertices exceeds the exhaustive guard {REPORT_GUARD}")
    jobs = [(g, ss, seed + k, family) for k in range(n)]
    if workers > 1 and n > 1:
        with ProcessPoolExecutor(workers) as pool:
            verdicts = tuple(pool.map(_draw_verdict, jobs, chunksize=max(1, n // (4 * workers))))
    else:
        verdicts = tuple(map(_draw_verdict, jobs))
    return MeasureZeroResult(
        n,
        sum(v == "unfaithful" for v in verdicts),
        sum(v == "markov-violating" for v in verdicts),
        verdicts,
        seed,
        family,
    )


def verify_strong_completeness(
    g: Dag,
    ss: StateSpace | None = None,
    seed: int = 0,
    family: str = "discrete",
    max_resamples: int = 5,
) -> FaithfulnessReport:
    """One faithful draw realizes all and only the entailed independencies at once."""
    for k in range(max_resamples + 1):
        _, oracle = draw_oracle(g, ss, seed + k, family)
        report = faithfulness_report(g, oracle)
        report.resamples, report.seed = k, seed + k
        if report.faithful:
            break
    return report


def faithful_draw(g: Dag, ss: StateSpace | None = None, seed: int = 0, family: str = "discrete"):
    """Parameters and oracle of the first faithful draw from ``seed`` on."""
    report = verify_strong_completeness(g, ss, seed, family)
    if not report.faithful:
        raise RuntimeError(f"no faithful draw for {g} near seed {seed}")  # pragma: no cover
    return draw_oracle(g, ss, report.seed, family)


def recover_equivalence_class(oracle: CiOracle, vertices: Sequence[str], guard: int = RECOVER_GUARD) -> list[Dag]:
    """Every DAG over ``vertices`` whose d-separations match ``oracle`` on all triples."""
    vertices = tuple(vertices)
    if len(vertices) > guard:
        raise GuardError(f"{len(vertices)} vertices exceeds the enumeration guard {guard}")
    if set(vertices) != set(oracle.vertices):
        raise InputError("oracle vertices differ from the requested vertex list")
    answers = [(t, oracle.independent(t)) for t in canonical_triples(vertices)]
    keep = [g for g in all_dags(vertices) if all(d_separated(g, t) == ind for t, ind in answers)]
    return sorted(keep, key=lambda g: g.sorted_edges())
