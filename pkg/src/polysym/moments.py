"""Multi-index Bell polynomials and generalized moment sequences.

A moment family of rank r is ``f_alpha = B_alpha(a(x)) * m(x)`` with an
exponential ``m`` and additive ``a_beta``; it satisfies

    f_alpha(x + y) = sum_{beta <= alpha} C(alpha, beta) f_beta(x) f_{alpha-beta}(y).

On the multiplicative group the ``+`` is replaced by ``*``.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Mapping

from polysym.expr import Expr, Signature, additive, evaluate
from polysym.maps import FieldMap, Report, Zero, check_identity, check_order_two_derivation
from polysym.sampling import QT, Carrier

MultiIndex = tuple  # tuple[int, ...]


def zero_index(rank: int) -> MultiIndex:
    return (0,) * rank


def unit(rank: int, i: int) -> MultiIndex:
    return tuple(int(j == i) for j in range(rank))


def weight(alpha: MultiIndex) -> int:
    return sum(alpha)


def leq(beta: MultiIndex, alpha: MultiIndex) -> bool:
    return all(b <= a for b, a in zip(beta, alpha))


def binom(alpha: MultiIndex, beta: MultiIndex) -> int:
    return math.prod(math.comb(a, b) for a, b in zip(alpha, beta))


def sub(alpha: MultiIndex, beta: MultiIndex) -> MultiIndex:
    return tuple(a - b for a, b in zip(alpha, beta))


def add(alpha: MultiIndex, beta: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(alpha, beta))


def below(alpha: MultiIndex) -> Iterator[MultiIndex]:
    """All beta <= alpha, in lexicographic order."""
    return itertools.product(*(range(a + 1) for a in alpha))


def indices(rank: int, bound: int) -> list[MultiIndex]:
    """All multi-indices of the given rank with |alpha| <= bound, graded then lexicographic."""
    if rank < 1:
        raise ValueError("rank must be at least 1")
    out = [al for al in itertools.product(range(bound + 1), repeat=rank) if sum(al) <= bound]
    return sorted(out, key=lambda al: (sum(al), al))


def index_label(alpha: MultiIndex) -> str:
    return "_".join(map(str, alpha))


def a_name(beta: MultiIndex) -> str:
    """Name of the formal variable (or additive symbol) a_beta."""
    return f"a_{index_label(beta)}"


# -- Bell polynomials ------------------------------------------------------------

def bell(alpha: MultiIndex, coordinate: str | int = "first") -> Expr:
    """B_alpha in the formal variables a_beta, 0 < beta <= alpha.

    Uses B_{g+e_i} = sum_{beta <= g} C(g, beta) B_beta a_{g-beta+e_i}.  The
    coordinate i is the first (or last) nonzero entry of alpha; an integer
    forces i at the top level only, the recursion then uses "first".
    """
    alpha = tuple(alpha)
    if isinstance(coordinate, int):
        if not 0 <= coordinate < len(alpha) or alpha[coordinate] == 0:
            raise ValueError(f"coordinate {coordinate} is not admissible for {alpha}")
        return _bell_step(alpha, coordinate, "first")
    if coordinate not in ("first", "last"):
        raise ValueError(f"unknown coordinate strategy {coordinate!r}")
    return _bell(alpha, coordinate)


@lru_cache(maxsize=None)
def _bell(alpha: MultiIndex, strategy: str) -> Expr:
    support = [i for i, v in enumerate(alpha) if v]
    if not support:
        return Expr.const(1)
    return _bell_step(alpha, support[0] if strategy == "first" else support[-1], strategy)


def _bell_step(alpha: MultiIndex, i: int, strategy: str) -> Expr:
    e = unit(len(alpha), i)
    gamma = sub(alpha, e)
    out = Expr()
    for beta in below(gamma):
        out = out + _bell(beta, strategy) * Expr.var(a_name(add(sub(gamma, beta), e))) \
            * binom(gamma, beta)
    return out


def bell_symbols(rank: int, bound: int) -> Signature:
    """Additive symbols a_beta for every 0 < |beta| <= bound."""
    return Signature(additive(a_name(b)) for b in indices(rank, bound) if sum(b))


def eq3_residual(alpha: MultiIndex) -> Expr:
    """f_alpha(x+y) - sum C(alpha,beta) f_beta(x) f_{alpha-beta}(y) for symbolic data.

    a_beta are additive symbols, m is an exponential written m(x) = mx,
    m(y) = my, m(x+y) = mx*my.  The result is 0 exactly when B_alpha is right.
    """
    alpha = tuple(alpha)
    sig = bell_symbols(len(alpha), sum(alpha))
    x, y = Expr.var("x"), Expr.var("y")
    mx, my = Expr.var("mx"), Expr.var("my")

    def f(beta, point, m):
        vals = {a_name(g): sig.apply(a_name(g), point)
                for g in below(beta) if sum(g)}
        return sig.substitute(bell(beta), vals) * m

    lhs = f(alpha, x + y, mx * my)
    rhs = Expr()
    for beta in below(alpha):
        rhs = rhs + f(beta, x, mx) * f(sub(alpha, beta), y, my) * binom(alpha, beta)
    return lhs - rhs


def check_symbolic_closure(rank: int, bound: int) -> Report:
    checked = 0
    for alpha in indices(rank, bound):
        res = eq3_residual(alpha)
        checked += 1
        if not res.is_zero():
            return Report(f"closure[rank {rank}]", "fail", checked,
                          f"alpha={alpha}: residual {res}")
    return Report(f"closure[rank {rank}]", "pass", checked)


# -- concrete families ---------------------------------------------------------------

ADDITIVE_GROUP, MULTIPLICATIVE_GROUP = "additive", "multiplicative"


@dataclass
class MomentFamily:
    """f_alpha(x) = B_alpha(a(x)) * m(x) over a concrete carrier.

    ``a`` maps multi-indices to additive maps on the chosen group; indices not
    present are treated as the zero map.
    """

    rank: int
    m: Callable
    a: Mapping[MultiIndex, Callable]
    bound: int
    group: str = ADDITIVE_GROUP
    carrier: Carrier = QT
    name: str = "family"
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.group not in (ADDITIVE_GROUP, MULTIPLICATIVE_GROUP):
            raise ValueError(f"unknown group {self.group!r}")
        for beta in self.a:
            if len(beta) != self.rank:
                raise ValueError(f"index {beta} does not have rank {self.rank}")

    def op(self, x, y):
        return x + y if self.group == ADDITIVE_GROUP else x * y

    def f(self, alpha: MultiIndex, x):
        alpha = tuple(alpha)
        key = (alpha, x)
        if key not in self._memo:
            zero = self.carrier.zero()
            values = {a_name(b): (self.a[b](x) if b in self.a else zero)
                      for b in below(alpha) if sum(b)}
            self._memo[key] = evaluate(bell(alpha), {}, values, self.carrier.one()) * self.m(x)
        return self._memo[key]

    def normalized(self) -> "MomentFamily":
        """The family divided by its exponential: generating function 1."""
        one = self.carrier.one()
        return MomentFamily(self.rank, lambda x: one, dict(self.a), self.bound, self.group,
                            self.carrier, f"{self.name}/m")


def check_moment_recurrence(fam: MomentFamily, up_to: int | None = None, samples: int = 20,
                            rng: random.Random | None = None) -> list[Report]:
    """One report per alpha with |alpha| <= up_to, in graded order."""
    rng = rng if rng is not None else random.Random(0)
    up_to = fam.bound if up_to is None else up_to
    nonzero = fam.group == MULTIPLICATIVE_GROUP
    reports = []
    for alpha in indices(fam.rank, up_to):
        def sides(x, y, alpha=alpha):
            lhs = fam.f(alpha, fam.op(x, y))
            rhs = fam.carrier.zero()
            for beta in below(alpha):
                rhs = rhs + fam.f(beta, x) * fam.f(sub(alpha, beta), y) * binom(alpha, beta)
            return lhs, rhs
        reports.append(check_identity(f"{fam.name}[{index_label(alpha)}]", fam.carrier, 2,
                                      sides, samples, rng, nonzero))
    return reports


def quadratic_a(d: FieldMap) -> Callable:
    """a(x) = 4 d(x)/x - d(x^2)/x^2, additive on the multiplicative group."""
    def a(x):
        return 4 * d(x) / x - d(x * x) / (x * x)
    return a


def build_quadratic_moment_family(rank: int, d: Mapping[MultiIndex, FieldMap], bound: int,
                                  samples: int = 20, rng: random.Random | None = None
                                  ) -> tuple[MomentFamily | None, list[Report]]:
    """Family q_alpha(x) = B_alpha(a(x)) x^2 on Q(t)^x built from second-order derivations.

    Returns ``(None, reports)`` as soon as some d_alpha fails the order-two
    check; the last report then carries the witness.
    """
    rng = rng if rng is not None else random.Random(0)
    reports: list[Report] = []
    a_maps = {}
    for alpha in indices(rank, bound):
        if not sum(alpha):
            continue
        label = index_label(alpha)
        d_alpha = d.get(alpha, Zero(QT))
        rep = check_order_two_derivation(d_alpha, samples, rng)
        rep = Report(f"order2[{label}]", rep.status, rep.samples, rep.witness)
        reports.append(rep)
        if not rep.passed:
            return None, reports
        a_alpha = quadratic_a(d_alpha)
        reports.append(check_identity(f"log-additive[{label}]", QT, 2,
                                      lambda x, y, f=a_alpha: (f(x * y), f(x) + f(y)),
                                      samples, rng, nonzero=True))
        if not reports[-1].passed:
            return None, reports
        a_maps[alpha] = a_alpha
    fam = MomentFamily(rank, lambda x: x * x, a_maps, bound, MULTIPLICATIVE_GROUP, QT, "q")
    reports.extend(check_moment_recurrence(fam, bound, samples, rng))
    return fam, reports
