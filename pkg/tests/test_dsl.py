import pathlib
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polysym.dsl import (
    DEFAULT_FACTS, MomentDecl, ParseError, Specialization, UndeclaredSymbolError, parse,
    parse_expr, print_script, tokenize,
)
from polysym.engine import BIADD
from polysym.expr import Expr, SymbolKind

x, y = Expr.var("x"), Expr.var("y")


def E(text):
    return parse_expr(text, BIADD)


# -- examples ------------------------------------------------------------------------------

def test_mult_hypothesis_script():
    s = parse("biadditive B; eq mult: B(x*y, x*y) = B(x,x)*B(y,y);")
    assert len(s.declarations) == 1 and len(s.equations) == 1
    assert s.declarations[0].kind is SymbolKind.MULTI and s.declarations[0].arity == 2
    eq = s.equation("mult")
    assert eq.expr == E("B(x*y, x*y) - B(x, x)*B(y, y)")


def test_single_fact():
    s = parse("additive a; fact: a(1) = 0;")
    assert list(s.facts) == [DEFAULT_FACTS]
    assert len(s.facts[DEFAULT_FACTS]) == 1


def test_undeclared_symbol_is_named():
    with pytest.raises(UndeclaredSymbolError) as exc:
        parse("eq bad: q(x) = 1;")
    err = exc.value
    assert err.name == "q" and (err.line, err.col) == (1, 9)
    assert str(err) == "1:9: undeclared symbol 'q'"


def test_directives():
    s = parse("""
        biadditive B; additive a;
        eq h: B(x^2, x^2) = 2*x^2*B(x, x);
        fact base: B(1, 1) = 0;
        fact base: B(x, 1) = a(x);
        degree h 4;
        specialize h at (x, y, 1, 1) with base;
        specialize h at (1, 1, 1, 1);
        moment q rank 2 bound 3;
        moment r rank 1;   # bound taken from the command line
    """)
    assert s.degrees == {"h": 4}
    assert s.specializations == [Specialization("h", ("x", "y", 1, 1), ("base",)),
                                 Specialization("h", (1, 1, 1, 1), ())]
    assert s.moments == [MomentDecl("q", 2, 3), MomentDecl("r", 1, None)]
    assert len(s.fact_set(["base"])) == 2


def test_all_declaration_forms():
    s = parse("multiadditive A arity 3; additive a; hom phi; power p 3; scalar c;"
              "eq e: A(x, x, x) + p(x) = c*phi(x)*a(x);")
    kinds = [d.kind for d in s.declarations]
    assert kinds == [SymbolKind.MULTI, SymbolKind.ADDITIVE, SymbolKind.HOM, SymbolKind.POWER,
                     SymbolKind.SCALAR]
    assert print_script(parse(print_script(s))) == print_script(s)


# -- precedence ----------------------------------------------------------------------------------

def test_power_binds_tighter_than_unary_minus():
    assert E("-x^2") == -(x * x)
    assert E("-2*x^2") == -2 * x * x


def test_left_associativity():
    assert E("x - y - x") == -y
    assert E("2^3^2") == Expr.const(64)  # (2^3)^2


def test_unary_minus_below_product():
    assert E("- x * y + 1") == 1 - x * y
    assert E("--x") == x
    with pytest.raises(ParseError):
        E("x * -y")


def test_rational_literals():
    assert E("1/3*B(x, x)") == E("B(x, x)") * F(1, 3)
    with pytest.raises(ParseError, match="zero denominator"):
        E("1/0")


# -- error positions ----------------------------------------------------------------------------

@pytest.mark.parametrize("source,line,col", [
    ("biadditive B;\neq e: B(x) = 0;", 2, 7),                    # arity
    ("additive a;\neq e: a(x) = ;", 2, 14),                       # missing expression
    ("additive a; eq e: a(x) = 0", 1, 27),                         # missing ';'
    ("additive a; eq e: a(x) $ 0;", 1, 24),                        # lexical
    ("additive a; additive a;", 1, 22),                            # redeclared
    ("additive a;\nfact: a(x) = a(x) + 1;", 2, 1),                # non-terminating fact
    ("additive a;\nfact: a(1) = 0;\nfact: a(1) = 1;", 3, 1),      # duplicate fact
    ("additive a; degree e 4;", 1, 20),                            # unknown equation
    ("additive a; eq e: a(x) = 0; specialize e at (x) with f;", 1, 40),
    ("additive a; eq e: a(x) = 0; specialize e at (2);", 1, 46),
    ("additive a; eq e: a(x) = 0; eq e: a(x) = 1;", 1, 32),
    ("hom phi; eq e: phi = 1;", 1, 16),
    ("moment q rank 0;", 1, 15),
    ("frobnicate;", 1, 1),
])
def test_error_positions(source, line, col):
    with pytest.raises(ParseError) as exc:
        parse(source)
    err = exc.value
    assert (err.line, err.col) == (line, col), str(err)
    assert str(err).startswith(f"{line}:{col}: ")
    lines = source.split("\n")
    assert 1 <= err.line <= len(lines) and 1 <= err.col <= len(lines[err.line - 1]) + 1


def test_comments_and_layout_are_ignored():
    src = "additive a;   # decl\n\n  eq e :\n a( x )\n = 0 ; # done"
    assert parse(src) == parse("additive a; eq e: a(x) = 0;")
    assert [t.text for t in tokenize("a(1) # c\n")] == ["a", "(", "1", ")", ""]


# -- round trip -----------------------------------------------------------------------------------

def test_round_trip_mult_example():
    s = parse("biadditive B; eq mult: B(x*y, x*y) = B(x,x)*B(y,y);")
    assert parse(print_script(s)) == s


def test_round_trip_rational_coefficients():
    s = parse("biadditive B; eq e: 1/3*B(x*y, x) - 2/3*x*B(y, 1) = -1/3;")
    text = print_script(s)
    assert "1/3*B(x, x*y)" in text  # symmetric arguments are sorted
    assert parse(text) == s


def test_round_trip_rank_two_moment():
    s = parse("moment q rank 2 bound 2;")
    assert print_script(s) == "moment q rank 2 bound 2;\n"
    assert parse(print_script(s)) == s


def test_scripts_directory_round_trips():
    for path in sorted(pathlib.Path(__file__).parent.parent.joinpath("scripts").glob("*.eq")):
        s = parse(path.read_text())
        assert parse(print_script(s)) == s, path.name


_names = st.sampled_from(["x", "y", "z", "u"])
_coeffs = st.fractions(-9, 9, max_denominator=6).map(lambda f: f"({f})" if f < 0 else str(f))


def _terms(fns):
    base = st.one_of(_names, _coeffs)

    def grow(inner):
        calls = [st.tuples(st.sampled_from(sorted(fns)), inner, inner).map(
            lambda t: f"{t[0]}({t[1]}, {t[2]})" if fns[t[0]] == 2 else f"{t[0]}({t[1]})")]
        return st.one_of(
            st.tuples(inner, inner).map(lambda t: f"{t[0]}*{t[1]}"),
            st.tuples(inner, inner).map(lambda t: f"({t[0]} + {t[1]})"),
            st.tuples(inner, inner).map(lambda t: f"({t[0]} - {t[1]})"),
            st.tuples(inner, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
            *calls)
    return st.recursive(base, grow, max_leaves=5)


@st.composite
def scripts(draw):
    decls = {"B": ("biadditive B;", 2), "a": ("additive a;", 1), "phi": ("hom phi;", 1),
             "p": ("power p 2;", 1)}
    chosen = draw(st.lists(st.sampled_from(sorted(decls)), min_size=1, unique=True))
    fns = {k: decls[k][1] for k in chosen}
    lines = [decls[k][0] for k in chosen]
    n_eq = draw(st.integers(0, 3))
    for i in range(n_eq):
        lhs, rhs = draw(_terms(fns)), draw(_terms(fns))
        lines.append(f"eq e{i}: {lhs} = {rhs};")
        if draw(st.booleans()):
            lines.append(f"degree e{i} {draw(st.integers(1, 5))};")
    fact_sets = []
    if "a" in fns and draw(st.booleans()):
        lines.append("fact base: a(1) = 0;")
        fact_sets.append("base")
    if "B" in fns and "a" in fns and draw(st.booleans()):
        lines.append(f"fact: B(x, 1) = {draw(st.sampled_from(['a(x)', '2*x*a(x)', '1/3']))};")
        fact_sets.append(DEFAULT_FACTS)
    if n_eq:
        vals = draw(st.lists(st.sampled_from(["1", "x", "y", "w"]), min_size=1, max_size=4))
        with_ = f" with {', '.join(fact_sets)}" if fact_sets else ""
        lines.append(f"specialize e0 at ({', '.join(vals)}){with_};")
    if draw(st.booleans()):
        bound = draw(st.one_of(st.none(), st.integers(0, 4)))
        lines.append(f"moment m rank {draw(st.integers(1, 3))}"
                     + (f" bound {bound};" if bound is not None else ";"))
    return "\n".join(lines)


@settings(max_examples=80, deadline=None)
@given(scripts())
def test_parse_print_round_trip(source):
    s = parse(source)
    text = print_script(s)
    again = parse(text)
    assert again == s
    assert print_script(again) == text
