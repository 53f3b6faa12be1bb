"""Concrete maps on Q(t) and Q(sqrt d), quadratic maps built from them, and
exact identity checkers that report a witness on failure.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from polysym.fields import Poly, RatFunc
from polysym.sampling import QT, Carrier, CarrierError, QuadraticField, sample_tuples

HALF = Fraction(1, 2)


# -- field maps ---------------------------------------------------------------

class FieldMap:
    """A map from a carrier field to itself."""

    carrier: Carrier
    label = "?"

    def __call__(self, x):
        if not self.carrier.contains(x):
            raise CarrierError(f"{self.label} lives on {self.carrier}, got {x!r}")
        return self._apply(x)

    def _apply(self, x):
        raise NotImplementedError

    @property
    def order(self) -> int:
        """Number of derivation factors in the longest composition."""
        return 0

    def __matmul__(self, other: "FieldMap") -> "Composition":
        return Composition((self, other))

    def __add__(self, other: "FieldMap") -> "LinearCombo":
        return LinearCombo(((1, self), (1, other)))

    def __sub__(self, other: "FieldMap") -> "LinearCombo":
        return LinearCombo(((1, self), (-1, other)))

    def __rmul__(self, c) -> "LinearCombo":
        return LinearCombo(((c, self),))

    def __repr__(self) -> str:
        return self.label


class FormalDerivative(FieldMap):
    """d/dt on Q(t): the derivation with d(t) = 1."""

    carrier = QT
    label = "d"

    def _apply(self, x: RatFunc) -> RatFunc:
        return x.derivative()

    @property
    def order(self) -> int:
        return 1


class Identity(FieldMap):
    def __init__(self, carrier: Carrier = QT):
        self.carrier = carrier
        self.label = "id"

    def _apply(self, x):
        return x


class Zero(FieldMap):
    def __init__(self, carrier: Carrier = QT):
        self.carrier = carrier
        self.label = "0"

    def _apply(self, x):
        return self.carrier.zero()


class SubstitutionHom(FieldMap):
    """Field endomorphism x(t) -> x(p(t)) of Q(t) for nonconstant p."""

    carrier = QT

    def __init__(self, p: Poly):
        if p.degree < 1:
            raise ValueError("substitution polynomial must be nonconstant")
        self.p = p
        self.label = f"sub[{p}]"

    def _apply(self, x: RatFunc) -> RatFunc:
        return x.compose(self.p)


class QuadConjugation(FieldMap):
    """a + b sqrt(d) -> a - b sqrt(d)."""

    def __init__(self, carrier: QuadraticField):
        self.carrier = carrier
        self.label = "conj"

    def _apply(self, x):
        return x.conjugate()


class Composition(FieldMap):
    """``maps[0] o maps[1] o ...`` (the last map is applied first)."""

    def __init__(self, maps: Sequence[FieldMap]):
        if not maps:
            raise ValueError("empty composition")
        flat: list[FieldMap] = []
        for m in maps:
            flat.extend(m.maps if isinstance(m, Composition) else (m,))
        carriers = {m.carrier for m in flat}
        if len(carriers) != 1:
            raise CarrierError("composition operands live on different carriers")
        self.maps = tuple(flat)
        self.carrier = flat[0].carrier
        self.label = "(" + " o ".join(m.label for m in flat) + ")"

    def _apply(self, x):
        for m in reversed(self.maps):
            x = m(x)
        return x

    @property
    def order(self) -> int:
        return sum(m.order for m in self.maps)


class LinearCombo(FieldMap):
    """sum c_i * m_i(x) with coefficients from the carrier (or Q)."""

    def __init__(self, terms: Sequence[tuple[object, FieldMap]]):
        if not terms:
            raise ValueError("empty linear combination")
        carriers = {m.carrier for _, m in terms}
        if len(carriers) != 1:
            raise CarrierError("linear combination operands live on different carriers")
        self.carrier = terms[0][1].carrier
        for c, _ in terms:
            if not isinstance(c, (int, Fraction)) and not self.carrier.contains(c):
                raise CarrierError(f"coefficient {c!r} is not in {self.carrier}")
        self.terms = tuple(terms)
        self.label = " + ".join(f"{c}*{m.label}" for c, m in terms)

    def _apply(self, x):
        acc = self.carrier.zero()
        for c, m in self.terms:
            acc = acc + c * m(x)
        return acc

    @property
    def order(self) -> int:
        return max(m.order for _, m in self.terms)


# -- quadratic maps -------------------------------------------------------------

class QuadMap:
    """A quadratic function q = B(x, x) built from field maps."""

    carrier: Carrier
    label = "q"

    def __call__(self, x):
        if not self.carrier.contains(x):
            raise CarrierError(f"{self.label} lives on {self.carrier}, got {x!r}")
        return self._eval(x)

    def _eval(self, x):
        raise NotImplementedError

    def polar(self, x, y):
        """The symmetric bi-additive form B with B(x, x) = q(x)."""
        return (self(x + y) - self(x) - self(y)) * HALF

    def __repr__(self) -> str:
        return self.label


class ProdOfHoms(QuadMap):
    def __init__(self, phi1: FieldMap, phi2: FieldMap):
        if phi1.carrier != phi2.carrier:
            raise CarrierError("homomorphisms live on different carriers")
        self.phi1, self.phi2, self.carrier = phi1, phi2, phi1.carrier
        self.label = f"{phi1.label}*{phi2.label}"

    def _eval(self, x):
        return self.phi1(x) * self.phi2(x)

    def polar(self, x, y):
        # halved so that polar(x, x) == q(x)
        return (self.phi1(x) * self.phi2(y) + self.phi1(y) * self.phi2(x)) * HALF


class DerivOfSquare(QuadMap):
    def __init__(self, d: FieldMap):
        self.d, self.carrier = d, d.carrier
        self.label = f"{d.label}(x^2)"

    def _eval(self, x):
        return self.d(x * x)

    def polar(self, x, y):
        return self.d(x * y)


class SecondOrderForm(QuadMap):
    """q(x) = 4 x D(x) - D(x^2)."""

    def __init__(self, D: FieldMap):
        self.D, self.carrier = D, D.carrier
        self.label = f"4x{D.label}(x)-{D.label}(x^2)"

    def _eval(self, x):
        return 4 * x * self.D(x) - self.D(x * x)

    def polar(self, x, y):
        return 2 * x * self.D(y) + 2 * y * self.D(x) - self.D(x * y)


class TwistedSecondOrder(QuadMap):
    """q(x) = phi(4 x d(x) - d(x^2))."""

    def __init__(self, phi: FieldMap, d: FieldMap):
        if phi.carrier != d.carrier:
            raise CarrierError("phi and d live on different carriers")
        self.phi, self.d, self.carrier = phi, d, d.carrier
        self.label = f"{phi.label}(4x{d.label}(x)-{d.label}(x^2))"

    def _eval(self, x):
        return self.phi(4 * x * self.d(x) - self.d(x * x))


class MomentForm(QuadMap):
    """q(x) = 2 (phi1(x) + phi2(x)) a(x) - a(x^2)."""

    def __init__(self, phi1: FieldMap, phi2: FieldMap, a: FieldMap):
        if not phi1.carrier == phi2.carrier == a.carrier:
            raise CarrierError("moment form operands live on different carriers")
        self.phi1, self.phi2, self.a, self.carrier = phi1, phi2, a, a.carrier
        self.label = f"2({phi1.label}+{phi2.label}){a.label}-{a.label}(x^2)"

    def _eval(self, x):
        return 2 * (self.phi1(x) + self.phi2(x)) * self.a(x) - self.a(x * x)


class ZeroQuad(QuadMap):
    def __init__(self, carrier: Carrier = QT):
        self.carrier = carrier
        self.label = "0"

    def _eval(self, x):
        return self.carrier.zero()


# -- reports ------------------------------------------------------------------

@dataclass(frozen=True)
class Report:
    check: str
    status: str
    samples: int
    witness: str | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return {"check": self.check, "status": self.status,
                "samples": self.samples, "witness": self.witness}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_text(self) -> str:
        line = f"{self.status.upper():4}  {self.check}  samples={self.samples}"
        return line if self.witness is None else f"{line}  witness: {self.witness}"


_NAMES = ("x", "y", "z", "w")


def _describe(xs: tuple) -> str:
    return ", ".join(f"{n}={v}" for n, v in zip(_NAMES, xs))


def check_identity(name: str, carrier: Carrier, arity: int,
                   sides: Callable[..., tuple], samples: int = 20,
                   rng: random.Random | None = None, nonzero: bool = False) -> Report:
    """Check ``lhs == rhs`` where ``sides(*xs) -> (lhs, rhs)`` on sampled tuples.

    The first tuple is always the generator probe (t, t, ...) or (1+sqrt d, ...);
    the rest come from ``rng`` (seed 0 when omitted).
    """
    rng = rng if rng is not None else random.Random(0)
    for xs in sample_tuples(carrier, arity, samples, rng, nonzero):
        lhs, rhs = sides(*xs)
        if lhs != rhs:
            return Report(name, "fail", samples, f"{_describe(xs)}: lhs={lhs}, rhs={rhs}")
    return Report(name, "pass", samples)


def check_additive(m: FieldMap, samples: int = 20, rng=None, name: str = "additive") -> Report:
    return check_identity(name, m.carrier, 2, lambda x, y: (m(x + y), m(x) + m(y)),
                          samples, rng)


def check_derivation(m: FieldMap, samples: int = 20, rng=None) -> Report:
    rng = rng if rng is not None else random.Random(0)
    rep = check_additive(m, samples, rng, name="derivation")
    if not rep.passed:
        return rep
    return check_identity("derivation", m.carrier, 2,
                          lambda x, y: (m(x * y), x * m(y) + m(x) * y), samples, rng)


def check_homomorphism(m: FieldMap, samples: int = 20, rng=None) -> Report:
    rng = rng if rng is not None else random.Random(0)
    rep = check_additive(m, samples, rng, name="homomorphism")
    if not rep.passed:
        return rep
    return check_identity("homomorphism", m.carrier, 2,
                          lambda x, y: (m(x * y), m(x) * m(y)), samples, rng)


def check_order_two_derivation(m: FieldMap, samples: int = 20, rng=None) -> Report:
    """Additivity, then a(x^4) - 6x^2 a(x^2) + 8x^3 a(x) = 0."""
    rng = rng if rng is not None else random.Random(0)
    rep = check_additive(m, samples, rng, name="order2")
    if not rep.passed:
        return rep

    def sides(x):
        x2 = x * x
        return m(x2 * x2) - 6 * x2 * m(x2) + 8 * x2 * x * m(x), m.carrier.zero()

    return check_identity("order2", m.carrier, 1, sides, samples, rng)


def check_classical_derivation_identity(m: FieldMap, p: Poly, samples: int = 20,
                                        rng=None) -> Report:
    """a(P(x)) = P'(x) a(x)."""
    rng = rng if rng is not None else random.Random(0)
    dp = p.derivative()
    rep = check_additive(m, samples, rng, name="classical")
    if not rep.passed:
        return rep
    return check_identity("classical", m.carrier, 1,
                          lambda x: (m(p(x)), dp(x) * m(x)), samples, rng)


def check_multiplicative(q: QuadMap, samples: int = 20, rng=None) -> Report:
    return check_identity("mult", q.carrier, 2, lambda x, y: (q(x * y), q(x) * q(y)),
                          samples, rng, nonzero=True)


def check_pi2_additive(q: QuadMap, samples: int = 20, rng=None) -> Report:
    return check_identity("pi2", q.carrier, 2,
                          lambda x, y: (q(x * y), q(x) * y * y + x * x * q(y)),
                          samples, rng, nonzero=True)


def check_twisted(q: QuadMap, phi: FieldMap, samples: int = 20, rng=None) -> Report:
    def sides(x, y):
        px, py = phi(x), phi(y)
        return q(x * y), px * px * q(y) + q(x) * py * py

    return check_identity("twisted", q.carrier, 2, sides, samples, rng)


def check_moment1(q: QuadMap, phi1: FieldMap, phi2: FieldMap, samples: int = 20,
                  rng=None) -> Report:
    def sides(x, y):
        return q(x * y), phi1(x) * phi2(x) * q(y) + phi1(y) * phi2(y) * q(x)

    return check_identity("moment1", q.carrier, 2, sides, samples, rng)


def spadesuit_lhs(a: FieldMap, phi1: FieldMap, phi2: FieldMap, x, y, z):
    """Left-hand side of the three-variable identity for a(1) = 0 moment solutions."""
    sx, sy, sz = (phi1(v) + phi2(v) for v in (x, y, z))

    def cross(u, v):
        return phi1(u) * phi2(v) + phi2(u) * phi1(v)

    return (2 * a(x * y * z)
            - sx * a(y * z) - sy * a(x * z) - sz * a(x * y)
            + cross(x, y) * a(z) + cross(x, z) * a(y) + cross(y, z) * a(x))


def _a_of_one(a: FieldMap, samples: int) -> Report | None:
    one = a.carrier.one()
    if a(one) != 0:
        return Report("spadesuit", "fail", samples,
                      f"precondition a(1)=0 violated: a(1)={a(one)}")
    return None


def check_spadesuit(a: FieldMap, phi1: FieldMap, phi2: FieldMap, samples: int = 20,
                    rng=None) -> Report:
    rng = rng if rng is not None else random.Random(0)
    gate = _a_of_one(a, samples)
    if gate is not None:
        return gate
    rep = check_additive(a, samples, rng, name="spadesuit")
    if not rep.passed:
        return rep
    return check_identity("spadesuit", a.carrier, 3,
                          lambda x, y, z: (spadesuit_lhs(a, phi1, phi2, x, y, z),
                                           a.carrier.zero()), samples, rng)


def check_spadesuit_diagonal(a: FieldMap, phi1: FieldMap, phi2: FieldMap,
                             samples: int = 20, rng=None) -> Report:
    """2a(x^3) - 3(phi1(x)+phi2(x)) a(x^2) + 6 phi1(x) phi2(x) a(x) = 0."""
    rng = rng if rng is not None else random.Random(0)
    gate = _a_of_one(a, samples)
    if gate is not None:
        return Report("spadesuit-diagonal", gate.status, gate.samples, gate.witness)

    def sides(x):
        p1, p2, x2 = phi1(x), phi2(x), x * x
        return 2 * a(x2 * x) - 3 * (p1 + p2) * a(x2) + 6 * p1 * p2 * a(x), a.carrier.zero()

    return check_identity("spadesuit-diagonal", a.carrier, 1, sides, samples, rng)


def check_parallelogram(q: QuadMap, samples: int = 20, rng=None) -> Report:
    return check_identity("parallelogram", q.carrier, 2,
                          lambda x, y: (q(x + y) + q(x - y), 2 * q(x) + 2 * q(y)),
                          samples, rng)


def check_polar_trace(q: QuadMap, samples: int = 20, rng=None) -> Report:
    """polar is symmetric and has trace q."""
    rng = rng if rng is not None else random.Random(0)
    rep = check_identity("polar-trace", q.carrier, 1, lambda x: (q.polar(x, x), q(x)),
                         samples, rng)
    if not rep.passed:
        return rep
    return check_identity("polar-trace", q.carrier, 2,
                          lambda x, y: (q.polar(x, y), q.polar(y, x)), samples, rng)


def halfsum(phi1: FieldMap, phi2: FieldMap) -> LinearCombo:
    """a = (phi1 + phi2) / 2."""
    return LinearCombo(((HALF, phi1), (HALF, phi2)))


def check_mult_closing(phi1: FieldMap, phi2: FieldMap, samples: int = 20, rng=None) -> Report:
    """With a = (phi1 + phi2)/2: 2a(x)^2 - a(x^2) = phi1(x) phi2(x)."""
    a = halfsum(phi1, phi2)
    return check_identity("mult-closing", a.carrier, 1,
                          lambda x: (2 * a(x) * a(x) - a(x * x), phi1(x) * phi2(x)),
                          samples, rng)


def check_three_variable(a: FieldMap, samples: int = 20, rng=None) -> Report:
    """-a(xyz) + a(x)a(yz) + a(y)a(xz) + (a(xy) - 2a(x)a(y)) a(z) = 0."""
    def sides(x, y, z):
        ax, ay, az = a(x), a(y), a(z)
        lhs = -a(x * y * z) + ax * a(y * z) + ay * a(x * z) + (a(x * y) - 2 * ax * ay) * az
        return lhs, a.carrier.zero()

    return check_identity("three-variable", a.carrier, 3, sides, samples, rng)


def check_mult_quartic(a: FieldMap, samples: int = 20, rng=None) -> Report:
    """-a(x^4) + a(x^2)^2 + 4a(x)^2 a(x^2) - 4a(x)^4 = 0."""
    def sides(x):
        x2 = x * x
        a1, a2 = a(x), a(x2)
        return -a(x2 * x2) + a2 * a2 + 4 * a1 * a1 * a2 - 4 * a1 ** 4, a.carrier.zero()

    return check_identity("mult-quartic", a.carrier, 1, sides, samples, rng)
