"""Command-line front end.

Every subcommand builds one payload dict; ``--format structured`` prints it
as JSON and ``--format text`` renders the same dict line by line, so the two
formats carry identical information.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import constraints, discrete, faithfulness, gaussian
from .discrete import CptParams, StateSpace
from .documents import emit_param_document, parse_graph_document, parse_param_document, parse_sentence
from .errors import GuardError, InputError, PreconditionError
from .gaussian import LinearGaussianParams
from .graph import (
    IndependenceStatement,
    decide_sentence,
    d_separated,
    enumerate_entailed,
    find_d_connecting_path,
    markov_equivalent,
    singly_connected_subgraph,
)

EXIT_OK, EXIT_USAGE, EXIT_INPUT = 0, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _split(s: str | None) -> list[str]:
    if not s:
        return []
    return [x.strip() for x in s.split(",") if x.strip()]


def _apply_states(ss: StateSpace, spec: str | None) -> StateSpace:
    if not spec:
        return ss
    cards = dict(ss.cards)
    if spec.isdigit():
        return StateSpace({v: int(spec) for v in cards})
    for item in _split(spec):
        name, _, k = item.partition("=")
        if name not in cards or not k.isdigit():
            raise UsageError(f"bad --states entry {item!r}")
        cards[name] = int(k)
    return StateSpace(cards)


def _load(args):
    g, ss = parse_graph_document(_read(args.graph))
    return g, _apply_states(ss, args.states)


def _statement(args, g) -> IndependenceStatement:
    if not args.a or not args.b:
        raise UsageError("both -a and -b are required")
    stmt = IndependenceStatement.of(_split(args.a), _split(args.b), _split(args.c))
    stmt.check(g)
    return stmt


def _fmt(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return x


def _edges(g) -> list[str]:
    return [f"{t}->{h}" for t, h in g.sorted_edges()]


def _report_payload(report: faithfulness.FaithfulnessReport) -> dict:
    return {
        "verdict": report.verdict,
        "triples": len(report.classifications),
        "counts": report.counts(),
        "markov_violations": [str(s) for s in report.markov_violations],
        "unfaithful_triples": [str(s) for s in report.unfaithful_triples],
        "min_residual": _fmt(report.min_residual) if report.min_residual is not None else None,
        "resamples": report.resamples,
        "classifications": [{"statement": str(t.stmt), "class": t.label} for t in report.classifications],
    }


def _oracle_for(g, params):
    if isinstance(params, LinearGaussianParams):
        return faithfulness.CovarianceOracle(gaussian.implied_covariance(g, params))
    return None


def cmd_dsep(args):
    g, _ = _load(args)
    stmt = _statement(args, g)
    path = find_d_connecting_path(g, stmt)
    return {"statement": str(stmt), "separated": path is None, "path": str(path) if path else None}


def cmd_entailed(args):
    g, _ = _load(args)
    stmts = sorted(enumerate_entailed(g), key=lambda s: s.key())
    return {"count": len(stmts), "statements": [str(s) for s in stmts]}


def cmd_sentence(args):
    g, _ = _load(args)
    s = parse_sentence(args.sentence)
    return {"sentence": str(s), "entailed": decide_sentence(g, s)}


def cmd_subgraph(args):
    g, _ = _load(args)
    stmt = _statement(args, g)
    if len(stmt.a) != 1 or len(stmt.b) != 1:
        raise UsageError("subgraph needs single vertices for -a and -b")
    if d_separated(g, stmt):
        raise PreconditionError(f"{stmt} is d-separated")
    (a,), (b,) = stmt.a, stmt.b
    sub = singly_connected_subgraph(g, a, b, stmt.c)
    return {
        "statement": str(stmt),
        "edges": _edges(sub),
        "path": str(find_d_connecting_path(sub, stmt)),
        "singly_connected": sub.is_singly_connected(),
    }


def cmd_poly(args):
    g, ss = _load(args)
    stmt = _statement(args, g)
    polys = constraints.build_ci_polynomials(g, ss, stmt)
    return {
        "statement": str(stmt),
        "count": len(polys),
        "polynomials": [
            {
                "instantiation": ",".join(f"{v}={x}" for v, x in p.instantiation),
                "terms": len(p.monomials),
                "polynomial": str(p),
            }
            for p in polys
        ],
    }


def _sample(args, g, ss):
    if args.gaussian:
        return gaussian.random_gaussian_params(g, args.seed)
    return discrete.random_cpts(g, ss, args.seed)


def cmd_sample(args):
    g, ss = _load(args)
    return {"family": "gaussian" if args.gaussian else "discrete", "document": emit_param_document(_sample(args, g, ss))}


def _load_params(args, g, ss):
    params = parse_param_document(_read(args.params))
    if isinstance(params, CptParams):
        params.check(g, ss)
        return params, faithfulness.TableOracle(discrete.joint_from_cpts(g, ss, params))
    params.check(g)
    return params, _oracle_for(g, params)


def cmd_check(args):
    g, ss = _load(args)
    _, oracle = _load_params(args, g, ss)
    return _report_payload(faithfulness.faithfulness_report(g, oracle))


def cmd_witness(args):
    g, ss = _load(args)
    stmt = _statement(args, g)
    if args.gaussian:
        res = faithfulness.witness_gaussian(g, stmt, args.seed)
    else:
        res = faithfulness.witness_discrete(g, stmt, ss, args.mode, args.seed)
    return {
        "statement": str(stmt),
        "mode": res.mode,
        "success": res.success,
        "markov": res.markov_ok,
        "dependent": res.dependent_ok,
        "resamples": res.resamples,
        "subgraph": _edges(res.subgraph) if res.subgraph else None,
        "document": emit_param_document(res.params),
    }


def cmd_measure_zero(args):
    g, ss = _load(args)
    family = "gaussian" if args.gaussian else "discrete"
    r = faithfulness.measure_zero_experiment(g, ss, args.n, args.seed, family, args.workers)
    return {
        "unfaithful": f"{r.unfaithful}/{r.draws}",
        "markov_violations": f"{r.markov_violations}/{r.draws}",
        "draws": r.draws,
        "unfaithful_count": r.unfaithful,
        "markov_violation_count": r.markov_violations,
        "family": family,
        "seed": args.seed,
    }


def cmd_verify(args):
    g, ss = _load(args)
    family = "gaussian" if args.gaussian else "discrete"
    report = faithfulness.verify_strong_completeness(g, ss, args.seed, family)
    params, _ = faithfulness.draw_oracle(g, ss, report.seed, family)
    out = _report_payload(report)
    out["seed"] = report.seed
    out["document"] = emit_param_document(params)
    return out


def cmd_recover(args):
    g, ss = _load(args)
    if args.params:
        _, oracle = _load_params(args, g, ss)
    else:
        family = "gaussian" if args.gaussian else "discrete"
        _, oracle = faithfulness.faithful_draw(g, ss, args.seed, family)
    members = faithfulness.recover_equivalence_class(oracle, g.vertices)
    return {
        "class_size": len(members),
        "contains_generator": g in members,
        "all_equivalent": all(markov_equivalent(members[0], m) for m in members) if members else True,
        "members": [", ".join(_edges(m)) or "(no edges)" for m in members],
    }


def _render_text(payload: dict, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    for key, value in payload.items():
        if isinstance(value, bool):
            lines.append(f"{pad}{key}: {'true' if value else 'false'}")
        elif value is None:
            lines.append(f"{pad}{key}: none")
        elif isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_render_text(value, indent + 1))
        elif isinstance(value, list):
            lines.append(f"{pad}{key}: ({len(value)})")
            for item in value:
                if isinstance(item, dict):
                    sub = _render_text(item, indent + 2)
                    sub[0] = f"{pad}  - {sub[0].lstrip()}"
                    lines.extend(sub)
                else:
                    lines.append(f"{pad}  - {item}")
        elif isinstance(value, str) and "\n" in value:
            lines.append(f"{pad}{key}:")
            lines.extend(f"{pad}  {l}" for l in value.rstrip("\n").splitlines())
        else:
            lines.append(f"{pad}{key}: {value}")
    return lines


COMMANDS = {
    "dsep": (cmd_dsep, "decide one d-separation statement"),
    "entailed": (cmd_entailed, "list every entailed independence"),
    "sentence": (cmd_sentence, "decide a boolean combination of statements"),
    "subgraph": (cmd_subgraph, "extract the singly connected connecting subgraph"),
    "poly": (cmd_poly, "emit the constraint polynomials of a statement"),
    "sample": (cmd_sample, "emit a random parameter document"),
    "check": (cmd_check, "faithfulness report for a graph and parameters"),
    "witness": (cmd_witness, "construct a distribution violating a non-entailed independence"),
    "measure-zero": (cmd_measure_zero, "count unfaithful random parameterizations"),
    "verify": (cmd_verify, "draw one faithful parameterization"),
    "recover": (cmd_recover, "recover the Markov equivalence class from an exact oracle"),
}


def _common(parser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=d(0))
    parser.add_argument("--format", choices=("text", "structured"), default=d("text"))
    parser.add_argument("--gaussian", action="store_true", default=d(False))
    parser.add_argument("--states", default=d(None), help="k, or per-variable X=3,Y=2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="faithbn", description=__doc__.splitlines()[0])
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        _common(p, suppress=True)
        p.add_argument("graph", help="graph document path, or - for stdin")
        if name in ("dsep", "subgraph", "poly", "witness"):
            p.add_argument("-a", required=True, help="comma-separated vertices")
            p.add_argument("-b", required=True)
            p.add_argument("-c", default="")
        if name == "sentence":
            p.add_argument("sentence")
        if name == "check":
            p.add_argument("params")
        if name == "recover":
            p.add_argument("--params")
        if name == "witness":
            p.add_argument("--mode", choices=("structured", "random"), default="structured")
        if name == "measure-zero":
            p.add_argument("-n", type=int, default=1000)
            p.add_argument("--workers", type=int, default=1)
    return parser


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    handler = COMMANDS[args.command][0]
    try:
        payload = {"command": args.command, **handler(args)}
    except (UsageError, PreconditionError, GuardError) as exc:
        err.write(f"faithbn {args.command}: {exc}\n")
        return EXIT_USAGE
    except InputError as exc:
        err.write(f"faithbn {args.command}: invalid input: {exc}\n")
        return EXIT_INPUT
    if args.format == "structured":
        text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    else:
        text = "\n".join(_render_text(payload)) + "\n"
    out.write(text)
    out.flush()
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
