"""Text formats: graph documents, parameter documents and sentences.

Graph document (line oriented, ``#`` starts a comment)::

    var X states=2
    var Y
    edge X Y

Discrete parameter document::

    discrete
    cpt X
      : 1/2 1/2
    cpt Y | X
      0 : 1/4 3/4
      1 : 3/4 1/4

Gaussian parameter document::

    gaussian
    coef X Y 1/2
    variance X 1
    variance Y 1

Sentences: ``I(X; Z | Y) and not (I(X; Y) or I(X,W; Y | Z))``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

from .discrete import CptParams, StateSpace
from .errors import InputError
from .gaussian import LinearGaussianParams
from .graph import And, Atom, CompoundSentence, Dag, IndependenceStatement, Or, negate

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*$")


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_graph_document(text: str) -> tuple[Dag, StateSpace]:
    vertices: list[str] = []
    states: dict[str, int] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        words = line.split()
        if words[0] == "var" and len(words) in (2, 3):
            name = words[1]
            if not _NAME.match(name):
                raise InputError(f"line {lineno}: bad variable name {name!r}")
            if name in states:
                raise InputError(f"line {lineno}: {name} declared twice")
            k = 2
            if len(words) == 3:
                m = re.fullmatch(r"states=(\d+)", words[2])
                if not m:
                    raise InputError(f"line {lineno}: expected states=<k>, got {words[2]!r}")
                k = int(m.group(1))
            vertices.append(name)
            states[name] = k
        elif words[0] == "edge" and len(words) == 3:
            edges.append((words[1], words[2]))
        else:
            raise InputError(f"line {lineno}: unknown directive {line!r}")
    if not vertices:
        raise InputError("graph document declares no variables")
    return Dag(vertices, edges), StateSpace(states)


def emit_graph_document(g: Dag, ss: StateSpace | None = None) -> str:
    lines = []
    for v in g.vertices:
        lines.append(f"var {v}" + (f" states={ss.nv(v)}" if ss else ""))
    lines.extend(f"edge {t} {h}" for t, h in g.sorted_edges())
    return "\n".join(lines) + "\n"


def parse_probability(token: str) -> Fraction:
    """Exact value of ``p/q``, an integer or a decimal string."""
    if not re.fullmatch(r"[+-]?(\d+(/\d+)?|\d*\.\d+|\d+\.\d*)", token):
        raise InputError(f"not an exact number: {token!r}")
    try:
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not an exact number: {token!r}") from None


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def emit_param_document(params: Union[CptParams, LinearGaussianParams]) -> str:
    if isinstance(params, LinearGaussianParams):
        lines = ["gaussian"]
        lines += [f"coef {t} {h} {_fmt(b)}" for (t, h), b in sorted(params.coefficients.items())]
        lines += [f"variance {v} {_fmt(s)}" for v, s in params.variances.items()]
        return "\n".join(lines) + "\n"
    lines = ["discrete"]
    for v, rows in params.rows.items():
        pa = params.parents[v]
        lines.append(f"cpt {v}" + (f" | {' '.join(pa)}" if pa else ""))
        for inst in sorted(rows):
            ctx = " ".join(map(str, inst))
            lines.append(f"  {ctx + ' ' if ctx else ''}: {' '.join(_fmt(p) for p in rows[inst])}")
    return "\n".join(lines) + "\n"


def parse_param_document(text: str) -> Union[CptParams, LinearGaussianParams]:
    lines = [(n, _strip(raw)) for n, raw in enumerate(text.splitlines(), 1)]
    lines = [(n, l) for n, l in lines if l]
    if not lines:
        raise InputError("empty parameter document")
    kind = lines[0][1]
    if kind == "gaussian":
        coefs, variances = {}, {}
        for n, line in lines[1:]:
            w = line.split()
            if w[0] == "coef" and len(w) == 4:
                coefs[(w[1], w[2])] = parse_probability(w[3])
            elif w[0] == "variance" and len(w) == 3:
                variances[w[1]] = parse_probability(w[2])
            else:
                raise InputError(f"line {n}: unknown directive {line!r}")
        return LinearGaussianParams(coefs, variances)
    if kind != "discrete":
        raise InputError("parameter document must start with 'discrete' or 'gaussian'")
    parents: dict[str, tuple[str, ...]] = {}
    rows: dict[str, dict] = {}
    current = None
    for n, line in lines[1:]:
        if line.startswith("cpt "):
            head, _, tail = line[4:].partition("|")
            current = head.strip()
            if not _NAME.match(current) or current in rows:
                raise InputError(f"line {n}: bad or repeated cpt {current!r}")
            parents[current] = tuple(tail.split())
            rows[current] = {}
        elif ":" in line and current is not None:
            ctx, _, probs = line.partition(":")
            try:
                inst = tuple(int(x) for x in ctx.split())
            except ValueError:
                raise InputError(f"line {n}: parent values must be integers") from None
            if len(inst) != len(parents[current]):
                raise InputError(f"line {n}: expected {len(parents[current])} parent values")
            row = tuple(parse_probability(p) for p in probs.split())
            if sum(row) != 1 or any(p < 0 for p in row):
                raise InputError(f"line {n}: row does not sum to 1")
            rows[current][inst] = row
        else:
            raise InputError(f"line {n}: unknown directive {line!r}")
    return CptParams(parents, rows)


_TOKEN = re.compile(r"\s*(I\(|\(|\)|,|;|\||&|!|~|[A-Za-z_][A-Za-z0-9_.]*)")


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise InputError(f"cannot parse sentence at {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


def parse_sentence(text: str) -> CompoundSentence:
    """Parse ``I(A; B | C)`` atoms joined by and/or/not (also ``&`` and ``!``)."""
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None or (expected is not None and tok != expected):
            raise InputError(f"expected {expected or 'token'} in sentence, got {tok!r}")
        pos += 1
        return tok

    def names(allow_empty=False):
        out = []
        if peek() in (";", "|", ")"):
            if allow_empty:
                return out
            raise InputError("empty vertex set in atom")
        out.append(take())
        while peek() == ",":
            take(",")
            out.append(take())
        for n in out:
            if not _NAME.match(n):
                raise InputError(f"bad vertex name {n!r}")
        return out

    def atom():
        take("I(")
        a = names()
        take(";")
        b = names()
        c = []
        if peek() == "|":
            take("|")
            c = names(allow_empty=True)
        take(")")
        return Atom(IndependenceStatement.of(a, b, c))

    def factor():
        tok = peek()
        if tok in ("not", "!", "~"):
            take()
            return negate(factor())
        if tok == "(":
            take("(")
            e = expr()
            take(")")
            return e
        return atom()

    def term():
        parts = [factor()]
        while peek() in ("and", "&"):
            take()
            parts.append(factor())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def expr():
        parts = [term()]
        while peek() == "or":
            take()
            parts.append(term())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    out = expr()
    if pos != len(toks):
        raise InputError(f"trailing tokens in sentence: {toks[pos:]}")
    return out
