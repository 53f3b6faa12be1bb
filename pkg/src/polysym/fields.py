"""Exact arithmetic over Q, Q[t], Q(t) and Q(sqrt d).

Rationals are :class:`fractions.Fraction`.  Polynomials are dense coefficient
tuples (lowest degree first), rational functions are kept in lowest terms with
a monic denominator so that structural equality is field equality.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Union

Scalar = Union[int, Fraction]


class FieldError(ArithmeticError):
    """Invalid field operation (mismatched extensions, bad parameters)."""


class DivisionByZero(FieldError, ZeroDivisionError):
    pass


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"not a rational: {c!r}")


class Poly:
    """Dense univariate polynomial in ``t`` with rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def _raw(cls, coeffs: list[Fraction]) -> "Poly":
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        p = object.__new__(cls)
        p.coeffs = tuple(coeffs)
        return p

    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls((c,))

    @classmethod
    def t(cls) -> "Poly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly.const(other).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("Poly", self.coeffs))

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)

    def __neg__(self) -> "Poly":
        return Poly._raw([-c for c in self.coeffs])

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = _frac(other)
            if c == 0:
                return Poly()
            return Poly._raw([x * c for x in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return Poly()
        # integer convolution over a common denominator, reduced once at the end
        a, da = _scaled_ints(self.coeffs)
        b, db = _scaled_ints(other.coeffs)
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        den = da * db
        return Poly._raw([Fraction(c, den) for c in out])

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = Poly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        if self.degree < other.degree:
            return Poly(), self
        # pseudo-division on integer images: lb^e * a = q * b + r
        a, da = _scaled_ints(self.coeffs)
        b, dbn = _scaled_ints(other.coeffs)
        n, lb = len(b) - 1, b[-1]
        steps = len(a) - n
        quot = [0] * steps
        for k in range(len(a) - 1, n - 1, -1):
            c = a[k]
            quot = [q * lb for q in quot]
            quot[k - n] = c
            a = [v * lb for v in a]
            for j in range(n + 1):
                a[k - n + j] -= c * b[j]
        scale = lb ** steps
        q = Poly._raw([Fraction(v * dbn, scale * da) for v in quot])
        r = Poly._raw([Fraction(v, scale * da) for v in a[:n]])
        return q, r

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = 1 / self.lc
        return Poly._raw([c * inv for c in self.coeffs])

    def derivative(self) -> "Poly":
        return Poly._raw([c * i for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        """Horner evaluation at any value supporting ``*`` and ``+``."""
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else x * 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def _scaled_ints(coeffs: tuple[Fraction, ...]) -> tuple[list[int], int]:
    """Integers ``n_i`` and ``den`` with ``coeffs[i] == n_i / den``."""
    den = 1
    for c in coeffs:
        if c.denominator != 1:
            den = den * c.denominator // math.gcd(den, c.denominator)
    if den == 1:
        return [c.numerator for c in coeffs], 1
    return [c.numerator * (den // c.denominator) for c in coeffs], den


def _primitive_int(p: Poly) -> list[int]:
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return [c // g for c in ints]


def _int_prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder of ``a`` by ``b`` with its content removed."""
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(a) - 1 >= db and a:
        la, shift = a[-1], len(a) - 1 - db
        a = [c * lb for c in a]
        for j, c in enumerate(b):
            a[shift + j] -= la * c
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    g = 0
    for c in a:
        g = math.gcd(g, c)
    return [c // g for c in a] if g > 1 else a


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd by the classical Euclidean algorithm over Q.

    Remainders are computed on integer primitive parts; this changes each
    remainder only by a nonzero rational factor, so the monic result is the
    same as for the textbook rational-coefficient loop.
    """
    if a.is_zero():
        return b.monic()
    if b.is_zero():
        return a.monic()
    x, y = _primitive_int(a), _primitive_int(b)
    if len(x) < len(y):
        x, y = y, x
    while y:
        x, y = y, _int_prem(x, y)
    return Poly(x).monic()


class RatFunc:
    """Element of Q(t) in lowest terms with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, Poly):
            num = Poly.const(num)
        if den is None:
            den = Poly.const(1)
        elif not isinstance(den, Poly):
            den = Poly.const(den)
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if num.is_zero():
            self.num, self.den = num, Poly.const(1)
            return
        if den.degree > 0:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
        if den.lc != 1:
            inv = 1 / den.lc
            num, den = num * inv, den * inv
        self.num, self.den = num, den

    @classmethod
    def _reduced(cls, num: Poly, den: Poly) -> "RatFunc":
        r = object.__new__(cls)
        r.num, r.den = num, den
        return r

    @classmethod
    def t(cls) -> "RatFunc":
        return cls._reduced(Poly.t(), Poly.const(1))

    @classmethod
    def const(cls, c: Scalar) -> "RatFunc":
        return cls._reduced(Poly.const(c), Poly.const(1))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.den.is_one() and self.num == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("RatFunc", self.num.coeffs, self.den.coeffs))

    def __repr__(self) -> str:
        return f"RatFunc({format_ratfunc(self)!r})"

    def __str__(self) -> str:
        return format_ratfunc(self)

    @staticmethod
    def _coerce(other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, Fraction)):
            return RatFunc.const(other)
        if isinstance(other, Poly):
            return RatFunc._reduced(other, Poly.const(1))
        raise TypeError(f"cannot use {type(other).__name__} in Q(t)")

    def __neg__(self) -> "RatFunc":
        return RatFunc._reduced(-self.num, self.den)

    def __add__(self, other) -> "RatFunc":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        if self.den.is_one():
            return RatFunc._reduced(self.num * o.den + o.num, o.den)
        if o.den.is_one():
            return RatFunc._reduced(self.num + o.num * self.den, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other) -> "RatFunc":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "RatFunc":
        return (-self) + other

    def __mul__(self, other) -> "RatFunc":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return RatFunc.const(0)
            return RatFunc._reduced(self.num * other, self.den)
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.den.is_one() and o.den.is_one():
            return RatFunc._reduced(self.num * o.num, self.den)
        # cross-cancel before multiplying keeps the gcds small
        g1 = poly_gcd(self.num, o.den) if o.den.degree > 0 else Poly.const(1)
        g2 = poly_gcd(o.num, self.den) if self.den.degree > 0 else Poly.const(1)
        num = (self.num // g1) * (o.num // g2)
        den = (self.den // g2) * (o.den // g1)
        if num.is_zero():
            return RatFunc.const(0)
        inv = 1 / den.lc
        return RatFunc._reduced(num * inv, den * inv)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise DivisionByZero("inverse of zero in Q(t)")
        inv = 1 / self.num.lc
        return RatFunc._reduced(self.den * inv, self.num * inv)

    def __truediv__(self, other) -> "RatFunc":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> "RatFunc":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc._reduced(self.num**n, self.den**n)

    def derivative(self) -> "RatFunc":
        """Formal derivative d/dt by the quotient rule."""
        if self.den.is_one():
            return RatFunc._reduced(self.num.derivative(), self.den)
        n, d = self.num, self.den
        return RatFunc(n.derivative() * d - n * d.derivative(), d * d)

    def compose(self, p: Poly) -> "RatFunc":
        """``x(t) -> x(p(t))``."""
        return poly_eval_subst(self.num, RatFunc._coerce(p)) / poly_eval_subst(
            self.den, RatFunc._coerce(p)
        )

    def at(self, value: Scalar) -> Fraction:
        """Evaluate at a rational point (raises on a pole)."""
        d = self.den(_frac(value))
        if d == 0:
            raise DivisionByZero(f"pole at t={value}")
        return self.num(_frac(value)) / d


def poly_eval_subst(p: Poly, s: RatFunc) -> RatFunc:
    """Evaluate ``p`` at ``s`` by Horner's rule in Q(t)."""
    acc = RatFunc.const(0)
    for c in reversed(p.coeffs):
        acc = acc * s + c
    return acc


def ratfunc_arith(op: str, x: RatFunc, y: RatFunc) -> RatFunc:
    ops = {"add": RatFunc.__add__, "sub": RatFunc.__sub__,
           "mul": RatFunc.__mul__, "div": RatFunc.__truediv__}
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    return ops[op](x, y)


def is_squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


class QuadExt:
    """Element ``a + b*sqrt(d)`` of Q(sqrt d) for square-free ``d`` not in {0, 1}."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Scalar, b: Scalar = 0, d: int = 2):
        if not isinstance(d, int) or d in (0, 1) or not is_squarefree(d):
            raise FieldError(f"d={d!r} must be a square-free integer other than 0, 1")
        self.a, self.b, self.d = _frac(a), _frac(b), d

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction, d: int) -> "QuadExt":
        q = object.__new__(cls)
        q.a, q.b, q.d = a, b, d
        return q

    def _coerce(self, other) -> "QuadExt":
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise FieldError(f"mixed extensions sqrt({self.d}) and sqrt({other.d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt._raw(Fraction(other), Fraction(0), self.d)
        raise TypeError(f"cannot use {type(other).__name__} in Q(sqrt {self.d})")

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadExt):
            return (self.d, self.a, self.b) == (other.d, other.a, other.b)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("QuadExt", self.a, self.b, self.d))

    def __repr__(self) -> str:
        return f"QuadExt({self.a}, {self.b}, d={self.d})"

    def __str__(self) -> str:
        return format_quadext(self)

    def __neg__(self) -> "QuadExt":
        return QuadExt._raw(-self.a, -self.b, self.d)

    def __add__(self, other) -> "QuadExt":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return QuadExt._raw(self.a + o.a, self.b + o.b, self.d)

    __radd__ = __add__

    def __sub__(self, other) -> "QuadExt":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return QuadExt._raw(self.a - o.a, self.b - o.b, self.d)

    def __rsub__(self, other) -> "QuadExt":
        return (-self) + other

    def __mul__(self, other) -> "QuadExt":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return QuadExt._raw(self.a * o.a + self.d * self.b * o.b,
                            self.a * o.b + self.b * o.a, self.d)

    __rmul__ = __mul__

    def conjugate(self) -> "QuadExt":
        return QuadExt._raw(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> "QuadExt":
        n = self.norm()
        if n == 0:
            raise DivisionByZero(f"inverse of zero in Q(sqrt {self.d})")
        return QuadExt._raw(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other) -> "QuadExt":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> "QuadExt":
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int) -> "QuadExt":
        if n < 0:
            return self.inverse() ** (-n)
        result, base = QuadExt._raw(Fraction(1), Fraction(0), self.d), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result


def quadext_arith(op: str, x: QuadExt, y: QuadExt) -> QuadExt:
    if x.d != y.d:
        raise FieldError(f"mixed extensions sqrt({x.d}) and sqrt({y.d})")
    ops = {"add": QuadExt.__add__, "sub": QuadExt.__sub__,
           "mul": QuadExt.__mul__, "div": QuadExt.__truediv__}
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    return ops[op](x, y)


# -- text forms -------------------------------------------------------------

def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly, var: str = "t") -> str:
    """Descending-degree form, e.g. ``t^2-1/2*t+3``."""
    if p.is_zero():
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if k == 0:
            body = _format_coeff(mag)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if mag == 1 else f"{_format_coeff(mag)}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += sign + body
    return out


def format_ratfunc(r: RatFunc) -> str:
    if r.den.is_one():
        return format_poly(r.num)
    return f"({format_poly(r.num)})/({format_poly(r.den)})"


def format_quadext(q: QuadExt) -> str:
    root = f"sqrt({q.d})"
    if q.b == 0:
        return _format_coeff(q.a)
    mag = abs(q.b)
    bpart = root if mag == 1 else f"{_format_coeff(mag)}*{root}"
    if q.a == 0:
        return ("-" if q.b < 0 else "") + bpart
    return f"{_format_coeff(q.a)}{'-' if q.b < 0 else '+'}{bpart}"


_TERM = re.compile(r"([+-]?)(\d+(?:/\d+)?)?(\*?)(t(?:\^(\d+))?)?")


def parse_poly(text: str, var: str = "t") -> Poly:
    """Parse the output of :func:`format_poly` (whitespace is ignored)."""
    s = "".join(text.split())
    if var != "t":
        s = s.replace(var, "t")
    if not s:
        raise ValueError("empty polynomial")
    coeffs: dict[int, Fraction] = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        sign, num, star, mono, exp = m.groups()
        if m.end() == pos or (num is None and mono is None) or (star and not (num and mono)):
            raise ValueError(f"cannot parse polynomial {text!r} at offset {pos}")
        if pos > 0 and not sign:
            raise ValueError(f"missing operator in {text!r} at offset {pos}")
        c = Fraction(num) if num else Fraction(1)
        if sign == "-":
            c = -c
        k = 0 if mono is None else (int(exp) if exp else 1)
        coeffs[k] = coeffs.get(k, Fraction(0)) + c
        pos = m.end()
    top = max(coeffs)
    return Poly([coeffs.get(k, 0) for k in range(top + 1)])


def parse_ratfunc(text: str) -> RatFunc:
    """Parse ``(num)/(den)`` or a bare polynomial."""
    s = "".join(text.split())
    m = re.fullmatch(r"\((.*)\)/\((.*)\)", s)
    if m:
        return RatFunc(parse_poly(m.group(1)), parse_poly(m.group(2)))
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    return RatFunc(parse_poly(s))


def gcd_fraction_list(values: Iterable[Fraction]) -> Fraction:
    """Positive generator of the Z-module spanned by ``values`` (0 if empty)."""
    num, den = 0, 1
    for v in values:
        num = math.gcd(num, v.numerator)
        den = den * v.denominator // math.gcd(den, v.denominator)
    return Fraction(num, den) if num else Fraction(0)
