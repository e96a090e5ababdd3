"""Parsers, deterministic printers, and the ``starfield`` command line.

Expression grammar: fields ``u1..un`` (``u`` = ``u1``), odd fields
``xi1..xin``, derivative suffix ``_`` plus base letters (``u1_xx``,
``xi2_xy``), base coordinates ``x``, ``y``, ``z`` (aliases ``x1..x3``),
exponential atoms ``exp(<linear combination of fields>)``; ``^`` binds
tighter than ``*`` and ``/``, which bind tighter than ``+``/``-``.
Division is by nonzero rational constants only.  Operator entries are sums
of ``<expr>`` and ``<expr> D(<letters>)``.

All output is byte-deterministic: terms are emitted in the canonical
monomial order, rationals exactly.  Exit codes: 0 success or verdict
true, 1 verdict false, 2 input error.
"""

from __future__ import annotations

import argparse
import re
import sys
from fractions import Fraction

from . import findim, graphs, jetcalc, miura, varpoisson
from .symcore import DiffPoly, Gen, HbarSeries, Q, StarfieldError


class ParseError(StarfieldError):
    def __init__(self, message, line=None, col=None, token=None):
        loc = ""
        if line is not None:
            loc = f" at line {line}, column {col}"
        tok = f" near {token!r}" if token else ""
        super().__init__(f"{message}{loc}{tok}")


_DIR_LETTER = {1: "x", 2: "y", 3: "z"}
_LETTER_DIR = {"x": 1, "y": 2, "z": 3}


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------


def _gen_name(g: Gen) -> str:
    if g.kind == "x":
        return _DIR_LETTER[g.index]
    base = ("u" if g.kind == "u" else "xi") + str(g.index)
    if g.mindex:
        base += "_" + "".join(_DIR_LETTER[a] for a in g.mindex)
    return base


def _frac_str(c: Fraction) -> str:
    return str(c)


def _mono_factors(mono) -> list[str]:
    evens, odds, lam = mono
    out = []
    for g, e in evens:
        out.append(_gen_name(g) + (f"^{e}" if e > 1 else ""))
    for g in odds:
        out.append(_gen_name(g))
    if lam:
        bits = ""
        for pos, (i, c) in enumerate(lam):
            piece = f"u{i}" if abs(c) == 1 else f"{_frac_str(abs(c))}*u{i}"
            if pos == 0:
                bits += ("-" if c < 0 else "") + piece
            else:
                bits += (" - " if c < 0 else " + ") + piece
        out.append(f"exp({bits})")
    return out


def print_expression(p: DiffPoly) -> str:
    """Canonical text form; round-trips through parse_expression."""
    if p.is_zero():
        return "0"
    pieces = []
    for mono, c in p.sorted_terms():
        factors = _mono_factors(mono)
        mag = abs(c)
        if factors and mag == 1:
            body = "*".join(factors)
        elif factors:
            body = "*".join([_frac_str(mag)] + factors)
        else:
            body = _frac_str(mag)
        pieces.append((c < 0, body))
    first_neg, first = pieces[0]
    text = ("-" if first_neg else "") + first
    for neg, body in pieces[1:]:
        text += (" - " if neg else " + ") + body
    return text


def print_series(s: HbarSeries) -> str:
    parts = []
    for k, c in enumerate(s.coeffs):
        body = f"({print_expression(c)})"
        if k == 0:
            parts.append(body)
        elif k == 1:
            parts.append(f"h*{body}")
        else:
            parts.append(f"h^{k}*{body}")
    return " + ".join(parts)


def _entry_term(coeff: DiffPoly, mind) -> str:
    dpart = "D(" + "".join(_DIR_LETTER[a] for a in mind) + ")" if mind else ""
    cv = coeff.constant_value()
    if not dpart:
        return print_expression(coeff)
    if cv == 1:
        return dpart
    if cv == -1:
        return f"- {dpart}"
    ctext = print_expression(coeff)
    if len(coeff.terms) > 1:
        ctext = f"({ctext})"
    return f"{ctext} {dpart}"


def print_operator_entry(entry) -> str:
    if not entry:
        return "0"
    terms = sorted(entry.items(), key=lambda kv: (len(kv[0]), kv[0]))
    parts = [_entry_term(c, mi) for mi, c in terms]
    text = parts[0]
    for part in parts[1:]:
        if part.startswith("- "):
            text += " - " + part[2:]
        elif part.startswith("-"):
            text += " - " + part[1:]
        else:
            text += " + " + part
    return text


def print_operator(op: jetcalc.TotalDiffOp) -> str:
    if op.rows == op.cols == 1:
        return print_operator_entry(op.entry(0, 0))
    lines = []
    for i in range(op.rows):
        for j in range(op.cols):
            lines.append(f"A[{i + 1},{j + 1}] = {print_operator_entry(op.entry(i, j))}")
    return "\n".join(lines)


def print_functional_sum(fs: varpoisson.FunctionalSum) -> str:
    if not fs.terms:
        return "0"
    parts = []
    for key, coef in sorted(fs.terms.items(),
                            key=lambda kv: [d.sort_key() for d in kv[0]]):
        factors = " * ".join(f"I[{print_expression(d)}]" for d in key)
        parts.append(f"({_frac_str(coef)}) {factors}")
    return " + ".join(parts)


def print_graph(g: graphs.KontsevichGraph) -> str:
    bits = [f"sinks {g.sinks}", f"internal {g.internal}"]
    for v, (a, b) in enumerate(g.edges, start=g.sinks):
        bits.append(f"e {v}: ({a},{b})")
    return "; ".join(bits)


# ---------------------------------------------------------------------------
# tokenizer and expression parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        line, col = 1, 1
        i = 0
        while i < len(text):
            ch = text[i]
            if ch == "\n":
                line += 1
                col = 1
                i += 1
                continue
            if ch.isspace():
                i += 1
                col += 1
                continue
            m = _TOKEN_RE.match(text, i)
            if not m or m.start() != i:
                raise ParseError("unreadable input", line, col)
            val = m.group(1) or m.group(2) or m.group(3)
            kind = "int" if m.group(1) else "name" if m.group(2) else "op"
            self.toks.append((kind, val, line, col))
            col += m.end() - i - (len(m.group(0)) - len(val))
            i = m.end()
        self.pos = 0

    def peek(self):
        if self.pos < len(self.toks):
            return self.toks[self.pos]
        return ("eof", "", 0, 0)

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect(self, val):
        kind, v, line, col = self.next()
        if v != val:
            raise ParseError(f"expected {val!r}", line, col, v)

    def error(self, message):
        kind, v, line, col = self.peek()
        raise ParseError(message, line, col, v)


_NAME_RE = re.compile(r"^(u|xi)(\d*)(?:_([xyz]+))?$")
_BASE_RE = re.compile(r"^(?:([xyz])|x([123]))$")


def _name_to_gen(name: str, toks: _Tokens) -> Gen:
    m = _BASE_RE.match(name)
    if m:
        d = _LETTER_DIR[m.group(1)] if m.group(1) else int(m.group(2))
        return Gen("x", d)
    m = _NAME_RE.match(name)
    if not m:
        toks.error(f"unknown symbol {name!r}")
    kind = m.group(1)
    index = int(m.group(2)) if m.group(2) else 1
    mind = tuple(sorted(_LETTER_DIR[ch] for ch in m.group(3) or ""))
    return Gen(kind, index, mind)


def _parse_exp_atom(toks: _Tokens) -> DiffPoly:
    toks.expect("(")
    inner = _parse_sum(toks)
    toks.expect(")")
    lam = {}
    for (evens, odds, lampart), c in inner.terms.items():
        if odds or lampart or len(evens) != 1:
            raise ParseError("exp atoms take a linear combination of fields")
        (g, e), = evens
        if g.kind != "u" or g.mindex or e != 1:
            raise ParseError(
                "exp atoms take undifferentiated fields with rational weights"
            )
        lam[g.index] = c
    if not lam:
        raise ParseError("empty exponent in exp atom")
    return DiffPoly.exp_atom(lam)


def _parse_atom(toks: _Tokens) -> DiffPoly:
    kind, val, line, col = toks.next()
    if kind == "int":
        return DiffPoly.const(Q(int(val)))
    if kind == "name":
        if val == "exp":
            return _parse_exp_atom(toks)
        return DiffPoly.gen(_name_to_gen(val, toks))
    if val == "(":
        inner = _parse_sum(toks)
        toks.expect(")")
        return inner
    raise ParseError("expected a value", line, col, val)


def _parse_power(toks: _Tokens) -> DiffPoly:
    base = _parse_atom(toks)
    if toks.peek()[1] == "^":
        toks.next()
        kind, val, line, col = toks.next()
        if kind != "int":
            raise ParseError("exponents are nonnegative integers", line, col, val)
        base = base ** int(val)
    return base


def _parse_signed(toks: _Tokens) -> DiffPoly:
    sign = 1
    while toks.peek()[1] in ("+", "-"):
        if toks.next()[1] == "-":
            sign = -sign
    p = _parse_power(toks)
    return p if sign > 0 else -p


def _parse_product(toks: _Tokens) -> DiffPoly:
    acc = _parse_signed(toks)
    while toks.peek()[1] in ("*", "/"):
        op = toks.next()[1]
        rhs = _parse_power(toks)
        if op == "*":
            acc = acc * rhs
        else:
            c = rhs.constant_value()
            if c is None or c == 0:
                toks.error("division is by nonzero rational constants only")
            acc = acc * (1 / c)
    return acc


def _parse_sum(toks: _Tokens) -> DiffPoly:
    acc = _parse_product(toks)
    while toks.peek()[1] in ("+", "-"):
        op = toks.next()[1]
        rhs = _parse_product(toks)
        acc = acc + rhs if op == "+" else acc - rhs
    return acc


def parse_expression(text: str) -> DiffPoly:
    toks = _Tokens(text)
    p = _parse_sum(toks)
    if toks.peek()[0] != "eof":
        toks.error("trailing input")
    return p


# ---------------------------------------------------------------------------
# operator entries
# ---------------------------------------------------------------------------


def _parse_d_part(toks: _Tokens):
    toks.expect("(")
    kind, val, line, col = toks.next()
    if kind != "name" or not all(ch in _LETTER_DIR for ch in val):
        raise ParseError("D takes base letters", line, col, val)
    toks.expect(")")
    return tuple(sorted(_LETTER_DIR[ch] for ch in val))


def _parse_op_term(toks: _Tokens):
    sign = 1
    while toks.peek()[1] in ("+", "-"):
        if toks.next()[1] == "-":
            sign = -sign
    coeff = None
    mind = ()
    while True:
        kind, val, _l, _c = toks.peek()
        if kind == "name" and val == "D":
            toks.next()
            mind = _parse_d_part(toks)
            break
        if coeff is None:
            coeff = _parse_power(toks)
        elif val in ("*", "/"):
            op = toks.next()[1]
            rhs = _parse_power(toks)
            if op == "*":
                coeff = coeff * rhs
            else:
                c = rhs.constant_value()
                if c is None or c == 0:
                    toks.error("division is by nonzero rational constants only")
                coeff = coeff * (1 / c)
        elif kind in ("int", "name") or val == "(":
            # juxtaposition before a D part, e.g. "4*u1 D(x)"
            coeff = coeff * _parse_power(toks)
        else:
            break
    if coeff is None:
        coeff = DiffPoly.one()
    return (coeff if sign > 0 else -coeff), mind


def parse_operator_entry(text: str):
    """Parse one matrix entry into a {multi-index: coefficient} sum."""
    toks = _Tokens(text)
    pairs = []
    coeff, mind = _parse_op_term(toks)
    pairs.append((mind, coeff))
    while toks.peek()[1] in ("+", "-"):
        coeff, mind = _parse_op_term(toks)
        pairs.append((mind, coeff))
    if toks.peek()[0] != "eof":
        toks.error("trailing input")
    out = {}
    for mind, coeff in pairs:
        cur = out.get(mind, DiffPoly.zero())
        out[mind] = cur + coeff
    return {mi: c for mi, c in out.items() if not c.is_zero()}


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


_BIV_RE = re.compile(r"^P\[(\d+),(\d+)\]\s*=\s*(.*)$")


def parse_bivector_file(text: str) -> findim.Bivector:
    n = None
    comps = {}
    for lineno, line in _content_lines(text):
        if line.startswith("dim"):
            n = int(line.split()[1])
            continue
        m = _BIV_RE.match(line)
        if not m:
            raise ParseError("expected 'dim <n>' or 'P[i,j] = <expr>'", lineno, 1)
        if n is None:
            raise ParseError("'dim <n>' must come first", lineno, 1)
        i, j = int(m.group(1)), int(m.group(2))
        if not i < j:
            raise ParseError("components are given for i < j", lineno, 1)
        comps[(i, j)] = parse_expression(m.group(3))
    if n is None:
        raise ParseError("missing 'dim <n>' line", 1, 1)
    return findim.Bivector(n, comps)


_OP_RE = re.compile(r"^A\[(\d+),(\d+)\]\s*=\s*(.*)$")


def parse_operator_file(text: str) -> jetcalc.TotalDiffOp:
    n = None
    entries = {}
    for lineno, line in _content_lines(text):
        if line.startswith("fields"):
            n = int(line.split()[1])
            continue
        if line.startswith("base"):
            if int(line.split()[1]) != 1:
                raise ParseError("only one-dimensional bases are supported here",
                                 lineno, 1)
            continue
        m = _OP_RE.match(line)
        if not m:
            raise ParseError("expected 'A[i,j] = <operator expr>'", lineno, 1)
        if n is None:
            raise ParseError("'fields <n>' must come first", lineno, 1)
        entries[(int(m.group(1)), int(m.group(2)))] = parse_operator_entry(m.group(3))
    if n is None:
        raise ParseError("missing 'fields <n>' line", 1, 1)
    for (i, j) in entries:
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"entry ({i},{j}) out of range", 1, 1)
    return jetcalc.TotalDiffOp(
        [[entries.get((i, j), {}) for j in range(1, n + 1)] for i in range(1, n + 1)]
    )


_EDGE_RE = re.compile(r"^e\s+(\d+)\s*:\s*\((\d+)\s*,\s*(\d+)\)$")
_JAC_RE = re.compile(r"^j\s+(\d+)\s*:\s*\((\d+)\s*,\s*(\d+)\s*,\s*(\d+)\)$")


def parse_graph_file(text: str):
    """Parse the graph format; returns a KontsevichGraph or a LeibnizGraph."""
    sinks = internal = None
    wedges = {}
    jacs = {}
    statements = []
    for lineno, line in _content_lines(text):
        statements.extend((lineno, part.strip()) for part in line.split(";")
                          if part.strip())
    for lineno, st in statements:
        if st.startswith("sinks"):
            sinks = int(st.split()[1])
            continue
        if st.startswith("internal"):
            internal = int(st.split()[1])
            continue
        m = _EDGE_RE.match(st)
        if m:
            wedges[int(m.group(1))] = (int(m.group(2)), int(m.group(3)))
            continue
        m = _JAC_RE.match(st)
        if m:
            jacs[int(m.group(1))] = (int(m.group(2)), int(m.group(3)), int(m.group(4)))
            continue
        raise ParseError("unrecognized graph statement", lineno, 1, st)
    if sinks is None or internal is None:
        raise ParseError("graph files need 'sinks <s>' and 'internal <k>'", 1, 1)
    expected_wedges = set(range(sinks, sinks + internal))
    if set(wedges) != expected_wedges:
        raise ParseError(
            f"wedge vertices must be exactly {sorted(expected_wedges)}", 1, 1
        )
    wedge_tuple = tuple(wedges[v] for v in sorted(wedges))
    if jacs:
        first_jac = sinks + internal
        expected_jacs = set(range(first_jac, first_jac + len(jacs)))
        if set(jacs) != expected_jacs:
            raise ParseError(
                f"Jacobiator vertices must be exactly {sorted(expected_jacs)}", 1, 1
            )
        jac_tuple = tuple(jacs[v] for v in sorted(jacs))
        return graphs.LeibnizGraph(sinks, wedge_tuple, jac_tuple).check()
    return graphs.KontsevichGraph(sinks, wedge_tuple).check()


def parse_miura_file(text: str) -> miura.MiuraMap:
    n = None
    subs = {}
    w_re = re.compile(r"^w\[(\d+)\]\s*=\s*(.*)$")
    for lineno, line in _content_lines(text):
        if line.startswith("fields"):
            n = int(line.split()[1])
            continue
        m = w_re.match(line)
        if not m:
            raise ParseError("expected 'fields <n>' or 'w[i] = <expr>'", lineno, 1)
        subs[int(m.group(1))] = parse_expression(m.group(2))
    if n is None or set(subs) != set(range(1, n + 1)):
        raise ParseError("need 'fields <n>' and w[1]..w[n] lines", 1, 1)
    return miura.MiuraMap(tuple(subs[i] for i in range(1, n + 1)))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _cmd_jacobi(args) -> int:
    P = parse_bivector_file(_read(args.bivector))
    comps = findim.jacobiator_components(P)
    if not comps:
        print("poisson: true")
        return 0
    print("poisson: false")
    for (i, j, k), val in sorted(comps.items()):
        print(f"jac[{i},{j},{k}] = {print_expression(val)}")
    return 1


def _cmd_star2(args) -> int:
    P = parse_bivector_file(_read(args.bivector))
    s = findim.star2(P, parse_expression(args.f), parse_expression(args.g))
    print(print_series(s))
    return 0


def _cmd_moyal(args) -> int:
    P = parse_bivector_file(_read(args.bivector))
    s = findim.moyal(P, parse_expression(args.f), parse_expression(args.g), args.K)
    print(print_series(s))
    return 0


def _star_for(P: findim.Bivector, K: int) -> findim.StarProductTruncation:
    if P.is_constant():
        return findim.StarProductTruncation(P, K, "moyal")
    return findim.StarProductTruncation(P, K, "order2")


def _cmd_assoc(args) -> int:
    P = parse_bivector_file(_read(args.bivector))
    S = _star_for(P, args.K)
    a = findim.associator(S, parse_expression(args.f), parse_expression(args.g),
                          parse_expression(args.h))
    print(print_series(a))
    return 0 if a.is_zero() else 1


def _cmd_factor_residual(args) -> int:
    P = parse_bivector_file(_read(args.bivector))
    r = findim.factorization_residual(
        P, parse_expression(args.f), parse_expression(args.g),
        parse_expression(args.h)
    )
    if r.is_zero():
        print("residual: 0")
        return 0
    print(f"residual: {print_expression(r)}")
    return 1


def _cmd_graph_eval(args) -> int:
    g = parse_graph_file(_read(args.graph))
    if isinstance(g, graphs.LeibnizGraph):
        raise ParseError("graph eval expects a Kontsevich graph (no 'j' lines)")
    P = parse_bivector_file(_read(args.bivector))
    arg_exprs = [parse_expression(t) for t in args.args.split(",")]
    print(print_expression(findim.eval_graph(g, P, arg_exprs)))
    return 0


def _cmd_graph_expand(args) -> int:
    g = parse_graph_file(_read(args.graph))
    if not isinstance(g, graphs.LeibnizGraph):
        raise ParseError("expand-leibniz expects a Leibniz graph ('j' lines)")
    total = graphs.expand_leibniz(g)
    print(f"terms {len(total)}")
    for graph, coef in total.items():
        print(f"{coef} :: {print_graph(graph)}")
    return 0


def _load_hamiltonian(path: str) -> varpoisson.HamiltonianOperator:
    op = parse_operator_file(_read(path))
    return varpoisson.HamiltonianOperator(op)


def _cmd_var_jacobi(args) -> int:
    A = _load_hamiltonian(args.operator)
    density = varpoisson.var_schouten_self(varpoisson.bivector_of(A)).density
    verdict = jetcalc.is_total_divergence(density, A.m)
    if verdict:
        print("cme: PASS")
        return 0
    print(f"cme: FAIL, residual density: {print_expression(density)}")
    return 1


def _cmd_var_bracket(args) -> int:
    A = _load_hamiltonian(args.operator)
    F = jetcalc.LocalFunctional(parse_expression(args.F), A.m)
    G = jetcalc.LocalFunctional(parse_expression(args.G), A.m)
    out = varpoisson.var_bracket(A, F, G)
    print(print_expression(out.density))
    return 0


def _cmd_var_moyal(args) -> int:
    A = _load_hamiltonian(args.operator)
    F = jetcalc.LocalFunctional(parse_expression(args.F), A.m)
    G = jetcalc.LocalFunctional(parse_expression(args.G), A.m)
    series = varpoisson.var_moyal(A, F, G, args.K)
    for k, fs in enumerate(series):
        print(f"h^{k}: {print_functional_sum(fs)}")
    return 0


def _cmd_var_assoc(args) -> int:
    A = _load_hamiltonian(args.operator)
    F = jetcalc.LocalFunctional(parse_expression(args.F), A.m)
    G = jetcalc.LocalFunctional(parse_expression(args.G), A.m)
    H = jetcalc.LocalFunctional(parse_expression(args.H), A.m)
    series = varpoisson.var_associator(A, F, G, H, args.K)
    all_zero = True
    for k, fs in enumerate(series):
        verdict = fs.is_zero()
        if fs.is_strictly_zero():
            status = "ZERO (exact)"
        elif verdict:
            status = "ZERO (modulo total divergence)"
        else:
            status = f"NONZERO: {print_functional_sum(fs)}"
            all_zero = False
        print(f"order {k}: {status}")
    return 0 if all_zero else 1


def _cmd_miura_verify(args) -> int:
    A = _load_hamiltonian(args.A)
    B = _load_hamiltonian(args.B)
    M = parse_miura_file(_read(args.map))
    ok = miura.verify_factorization(A, B, M)
    print(f"factorization: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def _cmd_kdv_suite(args) -> int:
    report = miura.kdv_suite()
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="starfield",
        description="exact star-products of Poisson and variational Poisson structures",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("jacobi", help="Jacobi identity check for a bivector file")
    p.add_argument("bivector")
    p.set_defaults(func=_cmd_jacobi)

    p = sub.add_parser("star2", help="order-2 star-product of two functions")
    p.add_argument("bivector")
    p.add_argument("-f", required=True)
    p.add_argument("-g", required=True)
    p.set_defaults(func=_cmd_star2)

    p = sub.add_parser("moyal", help="Moyal series of a constant bivector")
    p.add_argument("bivector")
    p.add_argument("-f", required=True)
    p.add_argument("-g", required=True)
    p.add_argument("-K", type=int, default=2)
    p.set_defaults(func=_cmd_moyal)

    p = sub.add_parser("assoc", add_help=False,
                       help="associator of the truncated star-product")
    p.add_argument("bivector")
    p.add_argument("-f", required=True)
    p.add_argument("-g", required=True)
    p.add_argument("-h", dest="h", required=True)
    p.add_argument("-K", type=int, default=2)
    p.set_defaults(func=_cmd_assoc)

    p = sub.add_parser("factor-residual", add_help=False,
                       help="h^2 associator minus the calibrated Jacobiator multiple")
    p.add_argument("bivector")
    p.add_argument("-f", required=True)
    p.add_argument("-g", required=True)
    p.add_argument("-h", dest="h", required=True)
    p.set_defaults(func=_cmd_factor_residual)

    p = sub.add_parser("graph", help="graph operations")
    gsub = p.add_subparsers(dest="graph_command", required=True)
    ge = gsub.add_parser("eval", help="evaluate a graph at a bivector")
    ge.add_argument("graph")
    ge.add_argument("bivector")
    ge.add_argument("--args", required=True, help="comma-separated sink expressions")
    ge.set_defaults(func=_cmd_graph_eval)
    gx = gsub.add_parser("expand-leibniz", help="expand a Leibniz graph")
    gx.add_argument("graph")
    gx.set_defaults(func=_cmd_graph_expand)

    p = sub.add_parser("var", help="variational operations")
    vsub = p.add_subparsers(dest="var_command", required=True)
    vj = vsub.add_parser("jacobi", help="classical master-equation check")
    vj.add_argument("operator")
    vj.set_defaults(func=_cmd_var_jacobi)
    vb = vsub.add_parser("bracket", help="variational Poisson bracket")
    vb.add_argument("operator")
    vb.add_argument("-F", required=True)
    vb.add_argument("-G", required=True)
    vb.set_defaults(func=_cmd_var_bracket)
    vm = vsub.add_parser("moyal", help="variational Moyal star-product")
    vm.add_argument("operator")
    vm.add_argument("-F", required=True)
    vm.add_argument("-G", required=True)
    vm.add_argument("-K", type=int, default=2)
    vm.set_defaults(func=_cmd_var_moyal)
    va = vsub.add_parser("assoc", help="variational Moyal associator")
    va.add_argument("operator")
    va.add_argument("-F", required=True)
    va.add_argument("-G", required=True)
    va.add_argument("-H", required=True)
    va.add_argument("-K", type=int, default=2)
    va.set_defaults(func=_cmd_var_assoc)

    p = sub.add_parser("miura", help="Miura factorization checks")
    msub = p.add_subparsers(dest="miura_command", required=True)
    mv = msub.add_parser("verify", help="verify A = ell o B o ell^dagger")
    mv.add_argument("--A", required=True)
    mv.add_argument("--B", required=True)
    mv.add_argument("--map", required=True)
    mv.set_defaults(func=_cmd_miura_verify)

    p = sub.add_parser("kdv-suite", help="run the KdV verification suite")
    p.set_defaults(func=_cmd_kdv_suite)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (StarfieldError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
