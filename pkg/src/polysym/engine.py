"""Difference operator, polarization, symmetrization and proof-step pipelines."""

from __future__ import annotations

import math
from typing import Mapping, Sequence

from polysym.expr import (
    Atom, Expr, FactSet, Signature, additive, facts, hom, make_fact, mono_degree,
    multiadditive,
)


class NonHomogeneousError(ValueError):
    """Raised when symmetrize is given an expression that is not k^N-homogeneous."""

    def __init__(self, k: int, degree: int, scaled: Expr, expected: Expr):
        self.k, self.degree, self.scaled, self.expected = k, degree, scaled, expected
        self.witness = f"k={k}: E(kx) = {scaled}, k^{degree}*E(x) = {expected}"
        super().__init__(f"expression is not homogeneous of degree {degree} ({self.witness})")


def X(name: str) -> Expr:
    return Expr.var(name)


def difference(sig: Signature, e: Expr, var: str, inc: str) -> Expr:
    """Delta_inc e = e(var + inc) - e."""
    return sig.substitute(e, {var: X(var) + X(inc)}) - e


def increments(m: int) -> list[str]:
    return [f"y{i}" for i in range(1, m + 1)]


def polarize(sig: Signature, name: str, m: int, var: str = "x") -> Expr:
    """Iterated difference Delta_{y1..ym} of the trace A(x, ..., x)."""
    sym = sig[name]
    e = sig.apply(name, *([X(var)] * sym.n_args))
    for y in increments(m):
        e = difference(sig, e, var, y)
    return e


def check_homogeneous(sig: Signature, e: Expr, degree: int, var: str = "x") -> None:
    for k in (2, 3):
        scaled = sig.substitute(e, {var: X(var) * k})
        expected = e * k ** degree
        if scaled != expected:
            raise NonHomogeneousError(k, degree, scaled, expected)


def slot_names(n: int, var: str = "x") -> list[str]:
    return [f"{var}{i}" for i in range(1, n + 1)]


def symmetrize(sig: Signature, e: Expr, degree: int, var: str = "x",
               names: Sequence[str] | None = None) -> Expr:
    """The symmetric ``degree``-additive form whose diagonal is ``e``.

    Substitutes ``var -> x1 + ... + xN``, keeps the terms of degree exactly one
    in every ``xi`` and divides by N!.
    """
    if degree < 1:
        raise ValueError("degree must be positive")
    check_homogeneous(sig, e, degree, var)
    names = list(names or slot_names(degree, var))
    if len(names) != degree:
        raise ValueError(f"need {degree} slot names, got {len(names)}")
    total = Expr()
    for n in names:
        total = total + X(n)
    full = sig.substitute(e, {var: total})
    keep = {m: c for m, c in full.terms()
            if all(mono_degree(m, n) == 1 for n in names)}
    return Expr(keep) / math.factorial(degree)


def diagonal(sig: Signature, a: Expr, names: Sequence[str], var: str = "x") -> Expr:
    return sig.substitute(a, {n: X(var) for n in names})


def specialize(sig: Signature, a: Expr, assignment: Mapping[str, object],
               fact_set: FactSet | None = None) -> Expr:
    """Substitute (each value 1, a variable name or an Expr), re-expand, rewrite."""
    free = a.variables() - set(assignment)
    if free:
        raise ValueError(f"assignment misses variables {sorted(free)}")
    mapping = {}
    for k, v in assignment.items():
        mapping[k] = X(v) if isinstance(v, str) else Expr._coerce(v)
    out = sig.substitute(a, mapping)
    return sig.rewrite(out, fact_set) if fact_set else out


def at(sig: Signature, a: Expr, values: Sequence, fact_set: FactSet | None = None,
       var: str = "x") -> Expr:
    """Specialize the slots x1..xN positionally, e.g. ``at(sig, A4, "xy11")``."""
    vals = [1 if v in (1, "1") else v for v in values]
    return specialize(sig, a, dict(zip(slot_names(len(vals), var), vals)), fact_set)


def isolate(e: Expr, atom: Atom) -> Expr:
    """Solve ``e = 0`` for ``atom``, which must occur exactly once and linearly."""
    key = ((atom, 1),)
    c = e.coeff(key)
    if c == 0:
        raise ValueError(f"{atom} does not occur linearly in {e}")
    rest = Expr({m: v for m, v in e.terms() if m != key})
    if atom in rest.atoms():
        raise ValueError(f"{atom} occurs non-linearly in {e}")
    return rest * (-1 / c)


def sole_atom(e: Expr) -> Atom:
    (m, _), = e.terms()
    (a, _), = m
    return a


# -- the three characterization pipelines --------------------------------------------

BIADD = Signature([multiadditive("B", 2), additive("a")])
MOMENT1 = BIADD.extend(hom("phi1"), hom("phi2"))

x, y, z, one = X("x"), X("y"), X("z"), Expr.const(1)


def B(u, v, sig: Signature = BIADD) -> Expr:
    return sig.apply("B", u, v)


def a(u, sig: Signature = BIADD) -> Expr:
    return sig.apply("a", u)


def phi(i: int, u) -> Expr:
    return MOMENT1.apply(f"phi{i}", u)


def _b_form(sig: Signature, e: Expr) -> tuple[Expr, FactSet]:
    """From ``e = 0`` read off B(x, y) and package it as the fact B(x, y) -> ..."""
    target = sole_atom(B(x, y, sig))
    rhs = isolate(e, target)
    return rhs, FactSet((make_fact(sig, B(x, y, sig), rhs),), sig)


def mult_pipeline() -> dict[str, Expr]:
    """Multiplicative quadratic maps: from B(x^2,x^2) = B(x,x)^2 to the three-variable law."""
    sig = BIADD
    out: dict[str, Expr] = {}
    hyp = B(x * x, x * x) - B(x, x) ** 2
    out["hypothesis"] = hyp
    b4 = symmetrize(sig, hyp, 4) * 3
    out["B4"] = b4
    out["B4(1,1,1,1)"] = at(sig, b4, "1111")
    out["B4(x,1,1,1)"] = at(sig, b4, "x111")
    out["B4(x,x,1,1)"] = at(sig, b4, "xx11")
    f = facts(sig, (B(one, one), 1), (B(x, one), a(x)))
    out["B4(x,x,1,1)|facts"] = at(sig, b4, "xx11", f)
    out["q"] = isolate(out["B4(x,x,1,1)|facts"], sole_atom(B(x, x)))
    xy = at(sig, b4, "xy11", f)
    out["B4(x,y,1,1)|facts"] = xy
    bxy, bfact = _b_form(sig, xy)
    out["B(x,y)"] = bxy
    quartic = sig.rewrite(hyp, bfact)
    out["quartic"] = quartic
    a4 = symmetrize(sig, quartic, 4)
    out["A4"] = a4
    out["three_variable"] = specialize(
        sig, a4, {"x1": "x", "x2": "y", "x3": "z", "x4": 1}, facts(sig, (a(one), 1)))
    return out


def add_pipeline() -> dict[str, Expr]:
    """pi_2-additive quadratic maps: from B(x^2,x^2) = 2x^2 B(x,x) to the quartic in a."""
    sig = BIADD
    out: dict[str, Expr] = {}
    hyp = B(x * x, x * x) - 2 * x * x * B(x, x)
    out["hypothesis"] = hyp
    b4 = symmetrize(sig, hyp, 4)
    out["B4"] = b4
    out["B4(1,1,1,1)"] = at(sig, b4, "1111")
    out["B4(x,y,1,1)"] = at(sig, b4, "xy11")
    f = facts(sig, (B(one, one), 0), (B(x, one), a(x)))
    xy = at(sig, b4, "xy11", f)
    out["B4(x,y,1,1)|facts"] = xy
    bxy, bfact = _b_form(sig, xy)
    out["B(x,y)"] = bxy
    q = sig.rewrite(B(x, x), bfact)
    out["q"] = q
    # q(x^2) = 2 x^2 q(x), written with the right-hand side first
    out["quartic"] = 2 * x * x * q - sig.substitute(q, {"x": x * x})
    return out


def moment1_pipeline() -> dict[str, Expr]:
    """Moment functions of degree one over phi1*phi2: down to the identity in three variables."""
    sig = MOMENT1
    out: dict[str, Expr] = {}
    p1, p2 = phi(1, x), phi(2, x)
    bb = lambda u, v: B(u, v, sig)
    hyp = bb(x * x, x * x) - 2 * p1 * p2 * bb(x, x)
    out["hypothesis"] = hyp
    b4 = symmetrize(sig, hyp, 4)
    out["B4"] = b4
    out["B4(1,1,1,1)"] = at(sig, b4, "1111")
    out["B4(x,1,1,1)"] = at(sig, b4, "x111")
    f = facts(sig, (phi(1, one), 1), (phi(2, one), 1), (bb(one, one), 0),
              (bb(x, one), a(x, sig)))
    out["B4(x,x,1,1)|facts"] = at(sig, b4, "xx11", f)
    out["q"] = isolate(out["B4(x,x,1,1)|facts"], sole_atom(bb(x, x)))
    xy = at(sig, b4, "xy11", f)
    out["B4(x,y,1,1)|facts"] = xy
    bxy, bfact = _b_form(sig, xy)
    out["B(x,y)"] = bxy
    quartic = -sig.rewrite(hyp, bfact)
    out["quartic"] = quartic
    a4 = symmetrize(sig, quartic, 4)
    out["A4"] = a4
    out["spadesuit"] = specialize(
        sig, a4, {"x1": "x", "x2": "y", "x3": "z", "x4": 1},
        facts(sig, (phi(1, one), 1), (phi(2, one), 1), (a(one, sig), 0)))
    out["spadesuit_diagonal"] = sig.substitute(out["spadesuit"], {"y": x, "z": x})
    return out


def derive_quartic_constraints() -> dict[str, Expr]:
    """The derived constraints of all three pipelines, keyed ``<pipeline>.<step>``."""
    m, ad, mo = mult_pipeline(), add_pipeline(), moment1_pipeline()
    return {
        "mult.quartic": m["quartic"],
        "mult.A4": m["A4"],
        "mult.three_variable": m["three_variable"],
        "add.quartic": ad["quartic"],
        "moment1.q": mo["q"],
        "moment1.quartic": mo["quartic"],
        "moment1.spadesuit": mo["spadesuit"],
    }


PIPELINES = {"mult": mult_pipeline, "add": add_pipeline, "moment1": moment1_pipeline}

__all__ = [
    "NonHomogeneousError", "difference", "polarize", "check_homogeneous", "symmetrize",
    "diagonal", "specialize", "at", "isolate", "mult_pipeline", "add_pipeline",
    "moment1_pipeline", "derive_quartic_constraints", "PIPELINES", "BIADD", "MOMENT1",
]
