"""Normal-form expressions over declared function symbols.

An :class:`Expr` is a finite sum ``sum c * m`` with rational ``c`` and
monomials ``m``.  A monomial is a sorted tuple of ``(atom, exponent)`` pairs; an
atom is a variable or an application of a declared symbol whose arguments are
themselves monomials (fully expanded: every additive slot has already been
distributed over sums and rational factors).

Expressions carry no symbol table.  Anything that has to (re)apply a symbol,
such as substitution or fact rewriting, goes through a :class:`Signature`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

VAR, APP = 0, 1


class Atom(NamedTuple):
    kind: int
    name: str
    args: tuple = ()  # tuple of monomials; empty for variables and scalars

    def __str__(self) -> str:
        if self.kind == VAR:
            return self.name
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(format_monomial(m) for m in self.args)})"


Monomial = tuple  # tuple[tuple[Atom, int], ...], sorted by atom

ONE: Monomial = ()


def var_atom(name: str) -> Atom:
    return Atom(VAR, name)


def mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    acc = dict(m1)
    for a, e in m2:
        acc[a] = acc.get(a, 0) + e
    return tuple(sorted(acc.items()))


def mono_pow(m: Monomial, n: int) -> Monomial:
    return tuple((a, e * n) for a, e in m) if n else ONE


def mono_degree(m: Monomial, var: str) -> int:
    """Total degree of ``var`` in ``m``, counting occurrences inside arguments."""
    total = 0
    for a, e in m:
        if a.kind == VAR:
            if a.name == var:
                total += e
        else:
            total += e * sum(mono_degree(arg, var) for arg in a.args)
    return total


def mono_variables(m: Monomial) -> set[str]:
    out: set[str] = set()
    for a, _ in m:
        if a.kind == VAR:
            out.add(a.name)
        else:
            for arg in a.args:
                out |= mono_variables(arg)
    return out


def mono_atoms(m: Monomial) -> Iterable[Atom]:
    """Every application atom in ``m``, nested ones included."""
    for a, _ in m:
        if a.kind == APP:
            yield a
            for arg in a.args:
                yield from mono_atoms(arg)


def format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(m: Monomial) -> str:
    if not m:
        return "1"
    return "*".join(str(a) if e == 1 else f"{a}^{e}" for a, e in m)


class Expr:
    """Immutable rational linear combination of monomials."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self._terms: dict[Monomial, Fraction] = (
            {m: Fraction(c) for m, c in terms.items() if c != 0} if terms else {})
        self._hash = None

    @classmethod
    def _own(cls, terms: dict) -> "Expr":
        e = object.__new__(cls)
        e._terms = terms
        e._hash = None
        return e

    @classmethod
    def const(cls, c) -> "Expr":
        return cls({ONE: Fraction(c)})

    @classmethod
    def var(cls, name: str) -> "Expr":
        return cls._own({((var_atom(name), 1),): Fraction(1)})

    @classmethod
    def atom(cls, atom: Atom) -> "Expr":
        return cls._own({((atom, 1),): Fraction(1)})

    @classmethod
    def monomial(cls, m: Monomial, c=1) -> "Expr":
        return cls({m: Fraction(c)})

    # -- inspection ----------------------------------------------------------

    def terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in canonical (sorted monomial) order."""
        return sorted(self._terms.items())

    def coeff(self, m: Monomial) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for m in self._terms:
            out |= mono_variables(m)
        return out

    def atoms(self) -> set[Atom]:
        out: set[Atom] = set()
        for m in self._terms:
            out.update(mono_atoms(m))
        return out

    def as_constant(self) -> Fraction | None:
        if not self._terms:
            return Fraction(0)
        if set(self._terms) == {ONE}:
            return self._terms[ONE]
        return None

    def __eq__(self, other) -> bool:
        if isinstance(other, Expr):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Expr.const(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self) -> str:
        return format_expr(self)

    def __repr__(self) -> str:
        return f"Expr({format_expr(self)!r})"

    # -- arithmetic ----------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Expr":
        if isinstance(other, Expr):
            return other
        if isinstance(other, (int, Fraction)):
            return Expr.const(other)
        raise TypeError(f"cannot combine Expr with {type(other).__name__}")

    def __add__(self, other) -> "Expr":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for m, c in o._terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Expr._own(out)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr._own({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Expr":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "Expr":
        return (-self) + other

    def __mul__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Expr()
            return Expr._own({m: c * other for m, c in self._terms.items()})
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                m = mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Expr._own({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Expr":
        if not isinstance(other, (int, Fraction)) or other == 0:
            raise TypeError("expressions may only be divided by nonzero rationals")
        return self * (1 / Fraction(other))

    def __pow__(self, n: int) -> "Expr":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        if len(self._terms) == 1:
            (m, c), = self._terms.items()
            return Expr._own({mono_pow(m, n): c ** n})
        result, base = Expr.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def primitive(self) -> "Expr":
        """Scale to coprime integer coefficients, keeping the sign of every term."""
        if not self._terms:
            return self
        lcm_den, gcd_num = 1, 0
        for c in self._terms.values():
            lcm_den = lcm_den * c.denominator // math.gcd(lcm_den, c.denominator)
            gcd_num = math.gcd(gcd_num, c.numerator)
        return self * Fraction(lcm_den, gcd_num)


def format_expr(e: Expr) -> str:
    """Deterministic text form; also valid equation-language syntax."""
    terms = e.terms()
    if not terms:
        return "0"
    out = []
    for i, (m, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if not m:
            body = format_coeff(mag)
        elif mag == 1:
            body = format_monomial(m)
        else:
            body = f"{format_coeff(mag)}*{format_monomial(m)}"
        if i == 0:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


# -- symbols ------------------------------------------------------------------

class SymbolKind(Enum):
    MULTI = "multiadditive"
    ADDITIVE = "additive"
    HOM = "hom"
    POWER = "power"
    SCALAR = "scalar"


@dataclass(frozen=True)
class FuncSymbol:
    name: str
    kind: SymbolKind
    arity: int = 1  # multi-additive arity, or the exponent of a power symbol

    def __post_init__(self):
        if self.kind in (SymbolKind.MULTI, SymbolKind.POWER) and self.arity < 1:
            raise ValueError(f"{self.name}: arity/exponent must be at least 1")
        if self.kind in (SymbolKind.ADDITIVE, SymbolKind.HOM) and self.arity != 1:
            raise ValueError(f"{self.name}: additive symbols take one argument")
        if self.kind is SymbolKind.SCALAR and self.arity != 0:
            object.__setattr__(self, "arity", 0)

    @property
    def n_args(self) -> int:
        if self.kind is SymbolKind.SCALAR:
            return 0
        if self.kind is SymbolKind.MULTI:
            return self.arity
        return 1

    @property
    def weight(self) -> int:
        """Precedence used to prove that fact rewriting terminates."""
        if self.kind is SymbolKind.MULTI:
            return self.arity
        if self.kind is SymbolKind.SCALAR:
            return 0
        return 1


def multiadditive(name: str, arity: int = 2) -> FuncSymbol:
    return FuncSymbol(name, SymbolKind.MULTI, arity)


def additive(name: str) -> FuncSymbol:
    return FuncSymbol(name, SymbolKind.ADDITIVE)


def hom(name: str) -> FuncSymbol:
    return FuncSymbol(name, SymbolKind.HOM)


def power(name: str, n: int) -> FuncSymbol:
    return FuncSymbol(name, SymbolKind.POWER, n)


def scalar(name: str) -> FuncSymbol:
    return FuncSymbol(name, SymbolKind.SCALAR, 0)


class UndeclaredSymbol(KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"undeclared symbol {self.name!r}"


class Signature:
    """An immutable declaration context: symbol name -> FuncSymbol."""

    def __init__(self, symbols: Iterable[FuncSymbol] = ()):
        table: dict[str, FuncSymbol] = {}
        for s in symbols:
            if s.name in table:
                raise ValueError(f"symbol {s.name!r} declared twice")
            table[s.name] = s
        self._table = table

    def __contains__(self, name: str) -> bool:
        return name in self._table

    def __getitem__(self, name: str) -> FuncSymbol:
        try:
            return self._table[name]
        except KeyError:
            raise UndeclaredSymbol(name) from None

    def __iter__(self):
        return iter(self._table.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, Signature) and self._table == other._table

    def extend(self, *symbols: FuncSymbol) -> "Signature":
        return Signature([*self._table.values(), *symbols])

    # -- expansion -------------------------------------------------------------

    def apply(self, name: str, *args) -> Expr:
        """Apply symbol ``name`` to argument expressions, returning normal form."""
        sym = self[name]
        args = tuple(Expr._coerce(a) for a in args)
        if len(args) != sym.n_args:
            raise ValueError(f"{name} expects {sym.n_args} argument(s), got {len(args)}")
        kind = sym.kind
        if kind is SymbolKind.SCALAR:
            return Expr.atom(Atom(APP, name, ()))
        if kind is SymbolKind.POWER:
            return args[0] ** sym.arity
        if kind is SymbolKind.ADDITIVE:
            return Expr._own({((Atom(APP, name, (m,)), 1),): c
                              for m, c in args[0]._terms.items()})
        if kind is SymbolKind.HOM:
            out = Expr()
            for m, c in args[0]._terms.items():
                if not m:
                    image = Expr.atom(Atom(APP, name, (ONE,)))
                else:
                    image = Expr._own({tuple(sorted(
                        (Atom(APP, name, (((a, 1),),)), e) for a, e in m)): Fraction(1)})
                out = out + image * c
            return out
        # symmetric multi-additive: distribute over every argument, sort the slots
        out: dict[Monomial, Fraction] = {}
        for combo in itertools.product(*(a._terms.items() for a in args)):
            coeff = Fraction(1)
            slots = []
            for m, c in combo:
                coeff *= c
                slots.append(m)
            mono = ((Atom(APP, name, tuple(sorted(slots))), 1),)
            out[mono] = out.get(mono, 0) + coeff
        return Expr._own({m: c for m, c in out.items() if c})

    def reapply(self, atom: Atom, args: Sequence[Expr]) -> Expr:
        if atom.kind == VAR:
            raise ValueError("variables take no arguments")
        if not atom.args:
            self[atom.name]
            return Expr.atom(atom)
        return self.apply(atom.name, *args)

    def substitute(self, e: Expr, mapping: Mapping[str, Expr]) -> Expr:
        """Replace variables by expressions and re-expand every application."""
        cache: dict[Atom, Expr] = {}

        def sub_atom(a: Atom) -> Expr:
            if a in cache:
                return cache[a]
            if a.kind == VAR:
                r = mapping.get(a.name)
                r = Expr.atom(a) if r is None else Expr._coerce(r)
            else:
                r = self.reapply(a, [sub_mono(m) for m in a.args])
            cache[a] = r
            return r

        def sub_mono(m: Monomial) -> Expr:
            acc = Expr.const(1)
            for a, k in m:
                acc = acc * (sub_atom(a) ** k)
            return acc

        out = Expr()
        for m, c in e._terms.items():
            out = out + sub_mono(m) * c
        return out

    def expand(self, e: Expr) -> Expr:
        """Rebuild ``e`` from scratch through the symbol rules."""
        return self.substitute(e, {})

    def rewrite(self, e: Expr, facts: "FactSet") -> Expr:
        """Rewrite with ``facts`` (first matching fact wins) to a fixpoint."""
        if not facts:
            return e
        cache: dict[Atom, Expr] = {}

        def rw_atom(a: Atom) -> Expr:
            if a.kind == VAR:
                return Expr.atom(a)
            if a in cache:
                return cache[a]
            new_args = [rw_expr(Expr.monomial(m)) for m in a.args]
            if any(na != Expr.monomial(m) for na, m in zip(new_args, a.args)):
                r = rw_expr(self.reapply(a, new_args))
            else:
                r = None
                for f in facts:
                    binding = f.match(a)
                    if binding is not None:
                        r = rw_expr(f.instantiate(binding, self))
                        break
                if r is None:
                    r = Expr.atom(a)
            cache[a] = r
            return r

        def rw_expr(x: Expr) -> Expr:
            out = Expr()
            for m, c in x._terms.items():
                acc = Expr.const(c)
                for a, k in m:
                    acc = acc * (rw_atom(a) ** k)
                out = out + acc
            return out

        return rw_expr(e)


# -- facts --------------------------------------------------------------------

class FactError(ValueError):
    pass


@dataclass(frozen=True)
class Fact:
    """``symbol(p1, ..., pn) -> rhs``.

    Each pattern slot is either a single variable (matching any argument) or a
    variable-free monomial (matched exactly, e.g. the constant 1).
    """

    symbol: str
    patterns: tuple
    rhs: Expr
    name: str = ""

    @property
    def lhs(self) -> Atom:
        return Atom(APP, self.symbol, tuple(sorted(self.patterns)) if len(self.patterns) > 1
                    else self.patterns)

    def pattern_vars(self) -> set[str]:
        return {p[0][0].name for p in self.patterns if _is_pattern_var(p)}

    def match(self, a: Atom) -> dict[str, Monomial] | None:
        if a.name != self.symbol or len(a.args) != len(self.patterns):
            return None
        orders = (itertools.permutations(a.args) if len(a.args) > 1 else (a.args,))
        for args in orders:
            binding: dict[str, Monomial] = {}
            for p, arg in zip(self.patterns, args):
                if _is_pattern_var(p):
                    v = p[0][0].name
                    if binding.setdefault(v, arg) != arg:
                        break
                elif p != arg:
                    break
            else:
                return binding
        return None

    def instantiate(self, binding: Mapping[str, Monomial], sig: Signature) -> Expr:
        return sig.substitute(self.rhs, {v: Expr.monomial(m) for v, m in binding.items()})

    def __str__(self) -> str:
        lhs = (self.symbol if not self.patterns else
               f"{self.symbol}({', '.join(format_monomial(p) for p in self.patterns)})")
        return f"{lhs} = {self.rhs}"


def _is_pattern_var(p: Monomial) -> bool:
    return len(p) == 1 and p[0][0].kind == VAR and p[0][1] == 1


@dataclass(frozen=True)
class FactSet:
    """Ordered rewrite facts with a termination guarantee checked up front.

    Every symbol on a right-hand side must have strictly smaller weight than
    the left-hand symbol (multi-additive arity n > additive/hom 1 > scalar 0)
    and may only use variables bound on the left; this is a recursive path
    ordering, so rewriting always terminates.
    """

    facts: tuple = ()
    signature: Signature = field(default_factory=Signature, compare=False)

    def __post_init__(self):
        seen = set()
        for f in self.facts:
            sym = self.signature[f.symbol]
            if len(f.patterns) != sym.n_args:
                raise FactError(f"{f}: {f.symbol} takes {sym.n_args} argument(s)")
            for p in f.patterns:
                if not _is_pattern_var(p) and mono_variables(p):
                    raise FactError(f"{f}: pattern slots must be a variable or ground")
            if f.lhs in seen:
                raise FactError(f"duplicate fact left-hand side {f.lhs}")
            seen.add(f.lhs)
            for a in f.rhs.atoms():
                if self.signature[a.name].weight >= sym.weight:
                    raise FactError(f"{f}: {a.name} does not decrease below {f.symbol};"
                                    " rewriting might not terminate")
            free = f.rhs.variables() - f.pattern_vars()
            if free:
                raise FactError(f"{f}: right-hand side uses unbound {sorted(free)}")

    def __iter__(self):
        return iter(self.facts)

    def __len__(self) -> int:
        return len(self.facts)

    def __bool__(self) -> bool:
        return bool(self.facts)


def make_fact(sig: Signature, lhs: Expr, rhs, name: str = "") -> Fact:
    """Build a fact from an expanded left-hand side that is a single application."""
    terms = lhs.terms()
    if len(terms) != 1 or terms[0][1] != 1 or len(terms[0][0]) != 1 or terms[0][0][0][1] != 1:
        raise FactError(f"fact left-hand side {lhs} is not a single application")
    atom = terms[0][0][0][0]
    if atom.kind == VAR:
        raise FactError(f"fact left-hand side {lhs} is a variable")
    sig[atom.name]
    return Fact(atom.name, atom.args, Expr._coerce(rhs), name)


def facts(sig: Signature, *pairs: tuple[Expr, object]) -> FactSet:
    return FactSet(tuple(make_fact(sig, l, r) for l, r in pairs), sig)


# -- evaluation under concrete bindings -------------------------------------------

def evaluate(e: Expr, funcs: Mapping[str, Callable], values: Mapping[str, object], one):
    """Evaluate ``e`` with symbols bound to callables and variables/scalars to values.

    ``one`` is the unit of the target field; rational coefficients are scaled in.
    """
    cache: dict[Atom, object] = {}

    def ev_atom(a: Atom):
        if a in cache:
            return cache[a]
        if a.kind == VAR or not a.args:
            try:
                r = values[a.name]
            except KeyError:
                raise KeyError(f"no value bound for {a.name!r}") from None
        else:
            r = funcs[a.name](*(ev_mono(m) for m in a.args))
        cache[a] = r
        return r

    def ev_mono(m: Monomial):
        acc = one
        for a, k in m:
            acc = acc * ev_atom(a) ** k
        return acc

    total = one * 0
    for m, c in e._terms.items():
        total = total + ev_mono(m) * c
    return total
