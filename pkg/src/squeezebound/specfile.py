"""Line-oriented domain-spec text files.

Example::

    dim = 3
    q = (0, 0, 0)
    locality_radius = 0.5
    rho = Re(t) + |z|^2*|w|^2 + |z|^10 + |w|^10

A ``rho`` expression is a signed sum of terms; a term is an optional real
coefficient followed by ``*``-separated factors.  Factors are ``|v|^2m``,
``Re(expr)``, ``Im(expr)``, ``v``, ``v^a``, ``conj(v)`` or ``conj(v)^b`` with
``v`` in ``{z, w, t}``; ``expr`` is a product of the monomial factors.
Lines starting with ``#`` are comments.
"""
from __future__ import annotations

import re
from typing import List, Optional, Tuple

import numpy as np

from .domain import DomainSpec, DomainError, custom, CERTIFIED_FAMILIES
from .hermitian import HermitianPolynomial

VARIABLES = ("z", "w", "t")


class SpecParseError(DomainError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_]+)
  | (?P<op>[-+*^()|])
""", re.VERBOSE)


def _tokenize(text: str, line: int, col0: int) -> List[Tuple[str, str, int]]:
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SpecParseError(f"unexpected character {text[pos]!r}", line, col0 + pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), col0 + pos + 1))
        pos = m.end()
    toks.append(("end", "", col0 + len(text) + 1))
    return toks


class _ExprParser:
    def __init__(self, text: str, line: int, col0: int, dim: int = 3):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.line = line
        self.dim = dim

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise SpecParseError(msg, self.line, tok[2])

    def expect(self, value):
        tok = self.next()
        if tok[1] != value:
            self.error(f"expected {value!r}, got {tok[1] or 'end of line'!r}", tok)
        return tok

    def integer(self) -> int:
        tok = self.next()
        if tok[0] != "num" or not tok[1].isdigit():
            self.error("expected a non-negative integer exponent", tok)
        return int(tok[1])

    def variable(self) -> int:
        tok = self.next()
        if tok[0] != "name" or tok[1] not in VARIABLES[:self.dim]:
            self.error(f"expected a variable in {VARIABLES[:self.dim]}", tok)
        return VARIABLES.index(tok[1])

    def parse(self) -> HermitianPolynomial:
        total = HermitianPolynomial.zero(self.dim)
        first = True
        while True:
            tok = self.peek()
            sign = 1.0
            if tok[1] in "+-" and tok[0] == "op":
                self.next()
                sign = -1.0 if tok[1] == "-" else 1.0
            elif not first:
                if tok[0] == "end":
                    break
                self.error(f"expected '+' or '-', got {tok[1]!r}")
            if self.peek()[0] == "end":
                self.error("expected a term")
            total = total + self.term() * sign
            first = False
            if self.peek()[0] == "end":
                break
        return total

    def term(self) -> HermitianPolynomial:
        coef = 1.0
        factors = []
        if self.peek()[0] == "num":
            coef = float(self.next()[1])
            if self.peek()[1] != "*":
                return HermitianPolynomial.constant(self.dim, coef)
            self.next()
        factors.append(self.factor())
        while self.peek()[1] == "*":
            self.next()
            factors.append(self.factor())
        out = HermitianPolynomial.constant(self.dim, coef)
        for f in factors:
            out = out * f
        return out

    def factor(self) -> HermitianPolynomial:
        tok = self.peek()
        if tok[1] == "|":
            self.next()
            j = self.variable()
            self.expect("|")
            self.expect("^")
            etok = self.peek()
            e = self.integer()
            if e % 2:
                self.error("|v|^e needs an even exponent", etok)
            return HermitianPolynomial.abs_power(self.dim, j, e // 2)
        if tok[0] == "name" and tok[1] in ("Re", "Im"):
            self.next()
            self.expect("(")
            inner = self.monomial_product()
            self.expect(")")
            return inner.real_part() if tok[1] == "Re" else inner.imag_part()
        return self.monomial()

    def monomial_product(self) -> HermitianPolynomial:
        coef = 1.0
        if self.peek()[0] == "num":
            coef = float(self.next()[1])
            self.expect("*")
        out = self.monomial() * coef
        while self.peek()[1] == "*":
            self.next()
            out = out * self.monomial()
        return out

    def monomial(self) -> HermitianPolynomial:
        tok = self.peek()
        if tok[0] == "name" and tok[1] == "conj":
            self.next()
            self.expect("(")
            j = self.variable()
            self.expect(")")
            conj = True
        elif tok[0] == "name":
            j = self.variable()
            conj = False
        else:
            self.error(f"expected a factor, got {tok[1] or 'end of line'!r}")
        e = 1
        if self.peek()[1] == "^":
            self.next()
            e = self.integer()
        return HermitianPolynomial.variable(self.dim, j, conjugate=conj) ** e


def parse_rho(text: str, line: int = 1, col0: int = 0, dim: int = 3) -> HermitianPolynomial:
    return _ExprParser(text, line, col0, dim).parse()


def _parse_complex(text: str, line: int, col: int) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError:
        raise SpecParseError(f"cannot parse complex number {text.strip()!r}", line, col) from None


def _parse_point(text: str, line: int, col: int) -> np.ndarray:
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise SpecParseError("point must be written as (a, b, c)", line, col)
    parts = s[1:-1].split(",")
    return np.array([_parse_complex(p, line, col) for p in parts], dtype=complex)


def parse_spec(text: str) -> DomainSpec:
    """Parse a domain-spec file body into a :class:`DomainSpec`."""
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise SpecParseError("expected 'key = value'", lineno, 1)
        key, value = line.split("=", 1)
        col = len(key) + 2
        key = key.strip()
        if key in fields:
            raise SpecParseError(f"duplicate key {key!r}", lineno, 1)
        fields[key] = (value, lineno, col)
    for required in ("dim", "q", "locality_radius", "rho"):
        if required not in fields:
            raise SpecParseError(f"missing required key {required!r}", len(text.splitlines()) + 1, 1)
    known = {"dim", "q", "locality_radius", "rho", "bounding_radius", "k", "d"}
    for key, (_, lineno, _) in fields.items():
        if key not in known:
            raise SpecParseError(f"unknown key {key!r}", lineno, 1)

    def number(key, cast=float):
        value, lineno, col = fields[key]
        try:
            return cast(value.strip())
        except ValueError:
            raise SpecParseError(f"invalid value for {key}: {value.strip()!r}", lineno, col) from None

    dim = number("dim", int)
    if dim != 3:
        value, lineno, col = fields["dim"]
        raise SpecParseError("only dim = 3 is supported", lineno, col)
    q = _parse_point(*fields["q"])
    if q.shape[0] != dim:
        raise SpecParseError(f"q has {q.shape[0]} coordinates, expected {dim}", *fields["q"][1:])
    rho_text, lineno, col = fields["rho"]
    rho = parse_rho(rho_text, lineno, col - 1, dim)
    bounding = number("bounding_radius") if "bounding_radius" in fields else None
    k = number("k", int) if "k" in fields else None
    d = number("d", int) if "d" in fields else None
    return custom(rho, q, number("locality_radius"), bounding, k, d)


# -- emission ------------------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _monomial_text(alpha, beta) -> List[str]:
    out = []
    for j, (a, b) in enumerate(zip(alpha, beta)):
        v = VARIABLES[j]
        m = min(a, b)
        if m:
            out.append(f"|{v}|^{2 * m}")
        if a - m:
            out.append(v if a - m == 1 else f"{v}^{a - m}")
        if b - m:
            out.append(f"conj({v})" if b - m == 1 else f"conj({v})^{b - m}")
    return out


def format_rho(rho: HermitianPolynomial) -> str:
    """Render a real polynomial in the spec grammar (round-trip precision)."""
    if rho.dimension > 3:
        raise ValueError("grammar supports at most three variables")
    pieces = []
    done = set()
    for (a, b), c in rho.sorted_terms():
        if (a, b) in done:
            continue
        done.add((a, b))
        done.add((b, a))
        if a == b:
            items = [(c.real, _monomial_text(a, b), None)]
        else:
            if (sum(a), a) < (sum(b), b):
                a, b, c = b, a, c.conjugate()
            # c m + conj(c) conj(m) = 2 Re(c) Re(m) - 2 Im(c) Im(m)
            hol = _monomial_text(a, (0,) * len(a))
            anti = _monomial_text((0,) * len(a), b)
            body = "*".join(hol + anti)
            items = []
            if c.real:
                items.append((2 * c.real, [], f"Re({body})"))
            if c.imag:
                items.append((-2 * c.imag, [], f"Im({body})"))
        for coef, factors, wrapped in items:
            if coef == 0:
                continue
            fs = factors + ([wrapped] if wrapped else [])
            sign = "-" if coef < 0 else "+"
            mag = abs(coef)
            if not fs:
                body = _fmt(mag)
            elif mag == 1.0:
                body = "*".join(fs)
            else:
                body = _fmt(mag) + "*" + "*".join(fs)
            pieces.append((sign, body))
    if not pieces:
        return "0"
    text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


def format_spec(dom: DomainSpec) -> str:
    q = ", ".join(_format_complex(x) for x in dom.q)
    lines = [f"dim = {dom.dimension}", f"q = ({q})",
             f"locality_radius = {_fmt(dom.locality_radius)}",
             f"bounding_radius = {_fmt(dom.bounding_radius)}"]
    if dom.declared_k is not None:
        lines.append(f"k = {dom.declared_k}")
    lines.append(f"rho = {format_rho(dom.rho)}")
    return "\n".join(lines) + "\n"


def _format_complex(x: complex) -> str:
    x = complex(x)
    if x.imag == 0:
        return _fmt(x.real)
    return f"{_fmt(x.real)}{'+' if x.imag >= 0 else '-'}{_fmt(abs(x.imag))}j"


def load_spec(path: str) -> DomainSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())
