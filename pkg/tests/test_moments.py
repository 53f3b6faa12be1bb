import random

import pytest
import sympy

from polysym.expr import Expr
from polysym.fields import Poly, RatFunc
from polysym.maps import Composition, FormalDerivative, LinearCombo, SubstitutionHom
from polysym.moments import (
    MULTIPLICATIVE_GROUP, MomentFamily, a_name, bell, binom, build_quadratic_moment_family,
    check_moment_recurrence, check_symbolic_closure, index_label, indices, leq,
    quadratic_a,
)
from polysym.sampling import QT

d = FormalDerivative()
dd = Composition((d, d))
sub = SubstitutionHom(Poly([0, 0, 1]))
t = RatFunc.t()
ONE = RatFunc.const(1)


def to_sympy(e: Expr):
    out = sympy.Integer(0)
    for mono, c in e.terms():
        term = sympy.Rational(c.numerator, c.denominator)
        for atom, k in mono:
            term *= sympy.Symbol(atom.name) ** k
        out += term
    return sympy.expand(out)


# -- multi-indices ----------------------------------------------------------------------

def test_index_order_and_helpers():
    assert indices(2, 2) == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    assert binom((2, 3), (1, 2)) == 6
    assert leq((1, 0), (1, 1)) and not leq((2, 0), (1, 1))
    assert index_label((1, 0)) == "1_0" and a_name((3,)) == "a_3"
    with pytest.raises(ValueError):
        indices(0, 2)


# -- Bell polynomials ------------------------------------------------------------------------

def test_bell_examples():
    assert bell((0,)) == Expr.const(1)
    assert str(bell((2,))) == "a_1^2 + a_2"
    assert str(bell((1, 1))) == "a_0_1*a_1_0 + a_1_1"


@pytest.mark.parametrize("n", range(0, 7))
def test_bell_rank_one_matches_sympy(n):
    xs = sympy.symbols(f"a_1:{n + 1}") if n else ()
    expected = sympy.Integer(1) if n == 0 else sympy.expand(
        sum(sympy.bell(n, k, xs) for k in range(1, n + 1)))
    assert to_sympy(bell((n,))) == expected


def test_bell_rank_two_matches_generating_function():
    # sum_alpha B_alpha s^i u^j / (i! j!) = exp(sum_{beta != 0} a_beta s^i u^j / (i! j!))
    s, u, h = sympy.symbols("s u h")
    top = 3
    inner = sum(sympy.Symbol(a_name(b)) * s ** b[0] * u ** b[1]
                / (sympy.factorial(b[0]) * sympy.factorial(b[1]))
                for b in indices(2, top) if sum(b))
    series = sympy.expand(sympy.series(sympy.exp(inner.subs({s: h * s, u: h * u})), h, 0,
                                       top + 1).removeO().subs(h, 1))
    poly = sympy.Poly(series, s, u)
    for alpha in indices(2, top):
        coeff = poly.coeff_monomial(s ** alpha[0] * u ** alpha[1])
        expected = sympy.expand(coeff * sympy.factorial(alpha[0]) * sympy.factorial(alpha[1]))
        assert to_sympy(bell(alpha)) == expected, alpha


def test_bell_weight_invariant():
    for alpha in indices(2, 4):
        for mono, _ in bell(alpha).terms():
            total = [0, 0]
            for atom, k in mono:
                parts = [int(p) for p in atom.name.split("_")[1:]]
                total = [tot + k * p for tot, p in zip(total, parts)]
            assert tuple(total) == alpha


@pytest.mark.parametrize("rank,bound", [(1, 4), (2, 4), (3, 3)])
def test_coordinate_independence(rank, bound):
    for alpha in indices(rank, bound):
        ref = bell(alpha)
        assert bell(alpha, "last") == ref
        for i, v in enumerate(alpha):
            if v:
                assert bell(alpha, i) == ref


def test_inadmissible_coordinate():
    with pytest.raises(ValueError):
        bell((0, 2), 0)
    with pytest.raises(ValueError):
        bell((1,), "middle")


@pytest.mark.parametrize("rank", [1, 2])
def test_symbolic_closure(rank):
    rep = check_symbolic_closure(rank, 3)
    assert rep.passed and rep.samples == len(indices(rank, 3))


def test_wrong_bell_polynomial_leaves_residual(monkeypatch):
    import polysym.moments as mom
    assert mom.eq3_residual((2,)).is_zero()
    # a_1 alone would only reparametrize a_2; a_1^2 is not additive
    original = mom.bell
    monkeypatch.setattr(mom, "bell", lambda alpha, coordinate="first": (
        original(alpha) + (Expr.var("a_1") ** 2 if alpha == (2,) else Expr())))
    assert not mom.eq3_residual((2,)).is_zero()


# -- concrete families ---------------------------------------------------------------------------

def additive_family(a1, a2=None, bound=3):
    a = {(1,): a1}
    if a2 is not None:
        a[(2,)] = a2
    return MomentFamily(1, lambda x: ONE, a, bound, name="fam")


def test_additive_group_family_passes():
    reps = check_moment_recurrence(additive_family(d, dd), samples=10)
    assert [r.check for r in reps] == ["fam[0]", "fam[1]", "fam[2]", "fam[3]"]
    assert all(r.passed for r in reps)


def test_rank_two_additive_family_passes():
    combo = LinearCombo(((1, d), (2, dd)))
    fam = MomentFamily(2, lambda x: ONE, {(1, 0): d, (0, 1): combo, (1, 1): dd}, 3)
    assert all(r.passed for r in check_moment_recurrence(fam, samples=5))


def test_perturbed_family_fails_with_witness():
    square = lambda x: x * x
    reps = check_moment_recurrence(additive_family(d, square), samples=10)
    assert reps[1].passed
    assert not reps[2].passed and reps[2].witness


def test_zeroth_member_is_the_exponential():
    fam = MomentFamily(1, lambda x: x * x, {(1,): quadratic_a(d)}, 2, MULTIPLICATIVE_GROUP)
    for x in (t, t + 3, 1 / t):
        assert fam.f((0,), x) == x * x
    assert check_moment_recurrence(fam, up_to=0)[0].passed


def test_zero_exponential_kills_the_family():
    zero = QT.zero()
    fam = MomentFamily(1, lambda x: zero, {(1,): d}, 3)
    assert all(fam.f((n,), t + n) == zero for n in range(4))
    assert all(r.passed for r in check_moment_recurrence(fam, samples=5))


def test_normalized_family_has_generating_function_one():
    fam = MomentFamily(1, lambda x: x * x, {(1,): quadratic_a(d)}, 2, MULTIPLICATIVE_GROUP)
    norm = fam.normalized()
    for x in (t, t * t - 2):
        assert norm.f((0,), x) == ONE
        assert norm.f((2,), x) * x * x == fam.f((2,), x)
    assert all(r.passed for r in check_moment_recurrence(norm, samples=5))


def test_family_validation():
    with pytest.raises(ValueError):
        MomentFamily(1, lambda x: ONE, {(1, 0): d}, 2)
    with pytest.raises(ValueError):
        MomentFamily(1, lambda x: ONE, {}, 2, group="cyclic")


# -- quadratic moment families --------------------------------------------------------------------

def test_quadratic_a_spot_value():
    assert quadratic_a(d)(t) == 2 / t


@pytest.mark.parametrize("D", [d, dd, LinearCombo(((3, d), (t, dd)))])
def test_division_is_exact(D):
    a = quadratic_a(D)
    rng = random.Random(5)
    for _ in range(10):
        x = QT.random(rng, nonzero=True)
        assert x * x * a(x) == 4 * x * D(x) - D(x * x)


@pytest.mark.parametrize("D", [d, dd])
def test_quadratic_family_rank_one(D):
    fam, reps = build_quadratic_moment_family(1, {(1,): D}, 2, samples=10)
    assert fam is not None
    assert [r.check for r in reps] == ["order2[1]", "log-additive[1]", "order2[2]",
                                       "log-additive[2]", "q[0]", "q[1]", "q[2]"]
    assert all(r.passed for r in reps)
    if D is d:
        assert fam.f((1,), t) == 2 * t  # a_1(t) * t^2


def test_quadratic_family_rank_two():
    fam, reps = build_quadratic_moment_family(2, {(1, 0): d, (0, 1): dd}, 2, samples=4)
    assert fam is not None and all(r.passed for r in reps)


def test_quadratic_family_aborts_on_bad_derivation():
    fam, reps = build_quadratic_moment_family(1, {(1,): sub}, 2, samples=10)
    assert fam is None
    assert reps[-1].check == "order2[1]" and not reps[-1].passed
    assert reps[-1].witness == "x=t: lhs=t^8-6*t^6+8*t^5, rhs=0"
