"""A small declaration and equation language.

    biadditive B;                      # symmetric bi-additive symbol
    multiadditive A arity 4;
    additive a;  hom phi;  power p2 2;  scalar c;
    eq mult: B(x^2, x^2) = B(x, x)^2;
    fact base: B(x, 1) = a(x);         # the fact-set name is optional
    degree mult 4;
    specialize mult at (x, y, 1, 1) with base;
    moment q rank 2 bound 3;

Precedence, tightest first: ``^``, ``*``, unary ``-``, binary ``+ -``.  ``#``
starts a comment running to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from polysym.expr import (
    Expr, Fact, FactError, FactSet, FuncSymbol, Signature, SymbolKind, additive, hom,
    make_fact, multiadditive, power, scalar,
)

DEFAULT_FACTS = "default"

_DECL_KEYWORDS = {"biadditive", "multiadditive", "additive", "hom", "power", "scalar"}
_KEYWORDS = _DECL_KEYWORDS | {"eq", "fact", "degree", "specialize", "moment"}


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message, self.line, self.col = message, line, col


class UndeclaredSymbolError(ParseError):
    def __init__(self, name: str, line: int, col: int):
        super().__init__(f"undeclared symbol {name!r}", line, col)
        self.name = name


class Token(NamedTuple):
    kind: str  # NAME, INT, OP, EOF
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
                       r"|(?P<NAME>[A-Za-z_][A-Za-z0-9_]*)|(?P<INT>\d+)"
                       r"|(?P<OP>[();:,=+\-*/^])")


def tokenize(source: str) -> list[Token]:
    tokens, line, line_start, pos = [], 1, 0, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line, line_start = line + 1, m.end()
        elif kind in ("NAME", "INT", "OP"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# -- script model --------------------------------------------------------------

@dataclass(frozen=True)
class Equation:
    name: str
    lhs: Expr
    rhs: Expr

    @property
    def expr(self) -> Expr:
        """lhs - rhs."""
        return self.lhs - self.rhs


@dataclass(frozen=True)
class Specialization:
    equation: str
    values: tuple  # each entry is 1 or a variable name
    facts: tuple = ()


@dataclass(frozen=True)
class MomentDecl:
    name: str
    rank: int
    bound: int | None = None


@dataclass
class Script:
    declarations: list[FuncSymbol] = field(default_factory=list)
    equations: list[Equation] = field(default_factory=list)
    facts: dict[str, FactSet] = field(default_factory=dict)
    degrees: dict[str, int] = field(default_factory=dict)
    specializations: list[Specialization] = field(default_factory=list)
    moments: list[MomentDecl] = field(default_factory=list)

    @property
    def signature(self) -> Signature:
        return Signature(self.declarations)

    def equation(self, name: str) -> Equation:
        for e in self.equations:
            if e.name == name:
                return e
        raise KeyError(name)

    def fact_set(self, names) -> FactSet:
        """Concatenate the named fact sets, in the given order."""
        merged = tuple(f for n in names for f in self.facts[n])
        return FactSet(merged, self.signature)


# -- parser ------------------------------------------------------------------------

class _Parser:
    def __init__(self, source: str):
        self.toks = tokenize(source)
        self.i = 0
        self.script = Script()
        self.sig = Signature()
        self.pending_facts: dict[str, list[tuple[Fact, Token]]] = {}
        self.specs: list[tuple[Token, Specialization]] = []
        self.degree_toks: dict[str, Token] = {}

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = repr(text) if text else kind.lower()
            got = repr(t.text) if t.kind != "EOF" else "end of input"
            raise self.error(f"expected {want}, got {got}")
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("OP", "NAME") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def name(self) -> Token:
        return self.expect("NAME")

    def integer(self, positive: bool = False) -> int:
        t = self.expect("INT")
        v = int(t.text)
        if positive and v < 1:
            raise self.error("expected a positive integer", t)
        return v

    # statements
    def parse(self) -> Script:
        while self.tok.kind != "EOF":
            self.statement()
        for set_name, entries in self.pending_facts.items():
            fs = FactSet((), self.sig)
            for k, (_, tok) in enumerate(entries, 1):
                try:
                    fs = FactSet(tuple(f for f, _ in entries[:k]), self.sig)
                except FactError as exc:
                    raise ParseError(f"fact set {set_name!r}: {exc}", tok.line, tok.col) from None
            self.script.facts[set_name] = fs
        for sp_tok, sp in self.specs:
            if sp.equation not in {e.name for e in self.script.equations}:
                raise self.error(f"unknown equation {sp.equation!r}", sp_tok)
            for fname in sp.facts:
                if fname not in self.script.facts:
                    raise self.error(f"unknown fact set {fname!r}", sp_tok)
        for name, tok in self.degree_toks.items():
            if name not in {e.name for e in self.script.equations}:
                raise self.error(f"unknown equation {name!r}", tok)
        return self.script

    def statement(self) -> None:
        kw = self.tok
        if kw.kind != "NAME" or kw.text not in _KEYWORDS:
            raise self.error(f"expected a statement keyword, got {kw.text or 'end of input'!r}")
        self.advance()
        if kw.text in _DECL_KEYWORDS:
            self.declaration(kw)
        elif kw.text == "eq":
            n = self.name()
            if any(e.name == n.text for e in self.script.equations):
                raise self.error(f"equation {n.text!r} defined twice", n)
            self.expect("OP", ":")
            lhs = self.expr()
            self.expect("OP", "=")
            rhs = self.expr()
            self.script.equations.append(Equation(n.text, lhs, rhs))
        elif kw.text == "fact":
            set_name = self.name().text if self.tok.kind == "NAME" else DEFAULT_FACTS
            self.expect("OP", ":")
            start = self.tok
            lhs = self.expr()
            self.expect("OP", "=")
            rhs = self.expr()
            try:
                f = make_fact(self.sig, lhs, rhs)
            except FactError as exc:
                raise self.error(str(exc), start) from None
            self.pending_facts.setdefault(set_name, []).append((f, kw))
        elif kw.text == "degree":
            n = self.name()
            if n.text in self.script.degrees:
                raise self.error(f"degree of {n.text!r} given twice", n)
            self.script.degrees[n.text] = self.integer(positive=True)
            self.degree_toks[n.text] = n
        elif kw.text == "specialize":
            n = self.name()
            self.expect("NAME", "at")
            self.expect("OP", "(")
            values = [self.slot_value()]
            while self.accept(","):
                values.append(self.slot_value())
            self.expect("OP", ")")
            fact_names = []
            if self.accept("with"):
                fact_names.append(self.name().text)
                while self.accept(","):
                    fact_names.append(self.name().text)
            sp = Specialization(n.text, tuple(values), tuple(fact_names))
            self.script.specializations.append(sp)
            self.specs.append((n, sp))
        else:  # moment
            n = self.name()
            self.expect("NAME", "rank")
            rank = self.integer(positive=True)
            bound = None
            if self.accept("bound"):
                bound = self.integer()
            self.script.moments.append(MomentDecl(n.text, rank, bound))
        self.expect("OP", ";")

    def slot_value(self):
        t = self.tok
        if t.kind == "INT" and t.text == "1":
            self.advance()
            return 1
        if t.kind == "NAME" and t.text[0].islower() and t.text not in self.sig:
            self.advance()
            return t.text
        raise self.error("specialization values must be 1 or a variable")

    def declaration(self, kw: Token) -> None:
        n = self.name()
        if n.text in _KEYWORDS:
            raise self.error(f"{n.text!r} is a keyword", n)
        if n.text in self.sig:
            raise self.error(f"symbol {n.text!r} declared twice", n)
        if kw.text == "biadditive":
            sym = multiadditive(n.text, 2)
        elif kw.text == "multiadditive":
            self.expect("NAME", "arity")
            sym = multiadditive(n.text, self.integer(positive=True))
        elif kw.text == "additive":
            sym = additive(n.text)
        elif kw.text == "hom":
            sym = hom(n.text)
        elif kw.text == "power":
            sym = power(n.text, self.integer(positive=True))
        else:
            sym = scalar(n.text)
        self.script.declarations.append(sym)
        self.sig = self.sig.extend(sym)

    # expressions
    def expr(self) -> Expr:
        e = self.unary()
        while self.tok.kind == "OP" and self.tok.text in "+-":
            op = self.advance().text
            rhs = self.unary()
            e = e + rhs if op == "+" else e - rhs
        return e

    def unary(self) -> Expr:
        if self.accept("-"):
            return -self.unary()
        return self.product()

    def product(self) -> Expr:
        e = self.power()
        while self.accept("*"):
            e = e * self.power()
        return e

    def power(self) -> Expr:
        e = self.primary()
        while self.accept("^"):
            e = e ** self.integer()
        return e

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "INT":
            self.advance()
            if self.accept("/"):
                den_tok = self.tok
                den = self.integer()
                if den == 0:
                    raise self.error("zero denominator", den_tok)
                return Expr.const(Fraction(int(t.text), den))
            return Expr.const(int(t.text))
        if self.accept("("):
            e = self.expr()
            self.expect("OP", ")")
            return e
        if t.kind == "NAME":
            self.advance()
            if self.tok.kind == "OP" and self.tok.text == "(":
                return self.application(t)
            if t.text in self.sig:
                sym = self.sig[t.text]
                if sym.kind is not SymbolKind.SCALAR:
                    raise self.error(f"{t.text} needs arguments", t)
                return self.sig.apply(t.text)
            if t.text[0].islower() and t.text not in _KEYWORDS:
                return Expr.var(t.text)
            raise UndeclaredSymbolError(t.text, t.line, t.col)
        got = repr(t.text) if t.kind != "EOF" else "end of input"
        raise self.error(f"expected an expression, got {got}")

    def application(self, name: Token) -> Expr:
        if name.text not in self.sig:
            raise UndeclaredSymbolError(name.text, name.line, name.col)
        sym = self.sig[name.text]
        self.expect("OP", "(")
        args = []
        if not (self.tok.kind == "OP" and self.tok.text == ")"):
            args.append(self.expr())
            while self.accept(","):
                args.append(self.expr())
        self.expect("OP", ")")
        if len(args) != sym.n_args:
            raise self.error(f"{name.text} takes {sym.n_args} argument(s), got {len(args)}", name)
        return self.sig.apply(name.text, *args)


def parse(source: str) -> Script:
    return _Parser(source).parse()


def parse_expr(source: str, sig: Signature) -> Expr:
    """Parse a single expression against an existing signature."""
    p = _Parser(source)
    p.sig = sig
    e = p.expr()
    p.expect("EOF")
    return e


# -- printer ---------------------------------------------------------------------------

_DECL_WORD = {SymbolKind.ADDITIVE: "additive", SymbolKind.HOM: "hom",
              SymbolKind.SCALAR: "scalar"}


def format_declaration(s: FuncSymbol) -> str:
    if s.kind is SymbolKind.MULTI:
        return f"biadditive {s.name};" if s.arity == 2 else \
            f"multiadditive {s.name} arity {s.arity};"
    if s.kind is SymbolKind.POWER:
        return f"power {s.name} {s.arity};"
    return f"{_DECL_WORD[s.kind]} {s.name};"


def _slot(v) -> str:
    return "1" if v == 1 else str(v)


def print_script(s: Script) -> str:
    lines = [format_declaration(d) for d in s.declarations]
    for name, fs in s.facts.items():
        head = "fact:" if name == DEFAULT_FACTS else f"fact {name}:"
        lines.extend(f"{head} {f};" for f in fs)
    lines.extend(f"eq {e.name}: {e.lhs} = {e.rhs};" for e in s.equations)
    lines.extend(f"degree {n} {d};" for n, d in s.degrees.items())
    for sp in s.specializations:
        line = f"specialize {sp.equation} at ({', '.join(map(_slot, sp.values))})"
        if sp.facts:
            line += f" with {', '.join(sp.facts)}"
        lines.append(line + ";")
    for m in s.moments:
        lines.append(f"moment {m.name} rank {m.rank}" +
                     (f" bound {m.bound};" if m.bound is not None else ";"))
    return "\n".join(lines) + ("\n" if lines else "")
