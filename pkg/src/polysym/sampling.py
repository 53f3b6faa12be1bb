"""Carriers (the two concrete fields) and seeded random element generation."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from polysym.fields import Poly, QuadExt, RatFunc

MAX_DEGREE = 4
MAX_COEFF = 10


class CarrierError(TypeError):
    """A value was passed to a map or check living on another field."""


@dataclass(frozen=True)
class RationalFunctions:
    """The field Q(t)."""

    name = "Q(t)"

    def contains(self, x) -> bool:
        return isinstance(x, RatFunc)

    def one(self) -> RatFunc:
        return RatFunc.const(1)

    def zero(self) -> RatFunc:
        return RatFunc.const(0)

    def probe(self) -> RatFunc:
        return RatFunc.t()

    def random(self, rng: random.Random, nonzero: bool = False) -> RatFunc:
        while True:
            num = _random_poly(rng)
            den = _random_poly(rng)
            if den.is_zero() or (nonzero and num.is_zero()):
                continue
            return RatFunc(num, den)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class QuadraticField:
    """The field Q(sqrt d)."""

    d: int = 2

    @property
    def name(self) -> str:
        return f"Q(sqrt {self.d})"

    def contains(self, x) -> bool:
        return isinstance(x, QuadExt) and x.d == self.d

    def one(self) -> QuadExt:
        return QuadExt(1, 0, self.d)

    def zero(self) -> QuadExt:
        return QuadExt(0, 0, self.d)

    def probe(self) -> QuadExt:
        return QuadExt(1, 1, self.d)

    def random(self, rng: random.Random, nonzero: bool = False) -> QuadExt:
        while True:
            a = Fraction(rng.randint(-MAX_COEFF, MAX_COEFF), rng.randint(1, MAX_COEFF))
            b = Fraction(rng.randint(-MAX_COEFF, MAX_COEFF), rng.randint(1, MAX_COEFF))
            x = QuadExt(a, b, self.d)
            if not (nonzero and x.is_zero()):
                return x

    def __str__(self) -> str:
        return self.name


Carrier = RationalFunctions | QuadraticField
QT = RationalFunctions()
SQRT2 = QuadraticField(2)


def _random_poly(rng: random.Random) -> Poly:
    deg = rng.randint(0, MAX_DEGREE)
    return Poly([rng.randint(-MAX_COEFF, MAX_COEFF) for _ in range(deg + 1)])


def sample_tuples(carrier: Carrier, arity: int, count: int, rng: random.Random,
                  nonzero: bool = False) -> Iterator[tuple]:
    """``count`` tuples: first the all-probe tuple (t, t, ...), then random ones."""
    if count < 1:
        raise ValueError("sample count must be at least 1")
    yield (carrier.probe(),) * arity
    for _ in range(count - 1):
        yield tuple(carrier.random(rng, nonzero) for _ in range(arity))
