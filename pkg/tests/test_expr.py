import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from soliton_forge.errors import DomainError, ExprSyntaxError, UnknownIdentifier
from soliton_forge.expr import (
    BinOp,
    Call,
    Neg,
    Number,
    Var,
    evaluate,
    evaluate_float,
    free_variables,
    parse,
    to_text,
)
from soliton_forge.jet import partial, seed_point

XYZ = ("x", "y", "z")


def at(text, point, order=2, coords=XYZ):
    return evaluate(parse(text, coords), dict(zip(coords, seed_point(point, order))))


def test_metric_component_tree():
    assert parse("1/z^2", XYZ) == BinOp("/", Number(1.0), BinOp("^", Var("z"), Number(2.0)))


def test_bare_e_is_unknown():
    with pytest.raises(UnknownIdentifier) as info:
        parse("e", XYZ)
    assert info.value.name == "e"


def test_example_lambda_at_origin():
    assert evaluate_float(parse("2*exp(z) - 1", XYZ), {"z": 0.0}) == 1.0


def test_truncated_power_offset():
    with pytest.raises(ExprSyntaxError) as info:
        parse("1/z^", XYZ)
    assert info.value.offset == 4


def test_offset_counts_bytes():
    with pytest.raises(ExprSyntaxError) as info:
        parse("é + z", XYZ)
    assert info.value.offset == 0
    with pytest.raises(ExprSyntaxError) as info:
        parse("z + é", XYZ)
    assert info.value.offset == 4


def test_no_implicit_multiplication():
    with pytest.raises(ExprSyntaxError):
        parse("2z", XYZ)


def test_precedence():
    assert parse("-x^2", XYZ) == Neg(BinOp("^", Var("x"), Number(2.0)))
    assert parse("x^y^z", XYZ) == BinOp("^", Var("x"), BinOp("^", Var("y"), Var("z")))
    assert parse("x - y - z", XYZ) == BinOp("-", BinOp("-", Var("x"), Var("y")), Var("z"))
    assert parse("x*y + sin(z)", XYZ) == BinOp("+", BinOp("*", Var("x"), Var("y")), Call("sin", Var("z")))
    assert parse("2^-1", XYZ) == BinOp("^", Number(2.0), Neg(Number(1.0)))


def test_whitespace_insensitive():
    assert parse(" 1 /\tz ^ 2 ", XYZ) == parse("1/z^2", XYZ)


def test_exp_jet():
    j = at("exp(2*z)", [0, 0, 0], order=1)
    assert j.value == 1.0
    assert partial(j, (0, 0, 1)) == 2.0


def test_inverse_square_jet():
    j = at("1/z^2", [0, 0, 1])
    assert [j.value, partial(j, (0, 0, 1)), partial(j, (0, 0, 2))] == pytest.approx([1, -2, 6], abs=1e-14)


def test_constant_zero_jet():
    j = at("0", [0.3, 0.1, 2.0])
    assert not j.coeffs.any()


@pytest.mark.parametrize(
    "text,names",
    [("1/z^2", {"z"}), ("x*y + sin(z)", {"x", "y", "z"}), ("3.5", set())],
)
def test_free_variables(text, names):
    assert free_variables(parse(text, XYZ)) == names


def test_domain_error_names_subexpression():
    with pytest.raises(DomainError) as info:
        at("x + log(z - 1)", [0, 0, 0.5])
    assert info.value.expression == "log(z - 1.0)"


def test_coordinate_may_shadow_nothing_else():
    with pytest.raises(ExprSyntaxError):
        parse("sin", XYZ)


# -- properties -------------------------------------------------------------

_atoms = st.one_of(
    st.sampled_from(XYZ).map(Var),
    st.floats(0, 50, allow_nan=False, allow_infinity=False).map(lambda v: Number(round(v, 4))),
)


def _grow(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/^"), children, children).map(lambda t: BinOp(*t)),
        st.tuples(st.sampled_from(["exp", "log", "sin", "cos", "sinh", "cosh", "sqrt"]), children).map(
            lambda t: Call(*t)
        ),
    )


exprs = st.recursive(_atoms, _grow, max_leaves=12)


@given(exprs)
def test_print_parse_round_trip(node):
    assert parse(to_text(node), XYZ) == node


def _python_value(text, env):
    ns = {f: getattr(math, f) for f in ("exp", "log", "sin", "cos", "sinh", "cosh", "sqrt")}
    ns.update(env)
    return eval(text.replace("^", "**"), {"__builtins__": {}}, ns)


@settings(max_examples=100, deadline=None)
@given(exprs, st.tuples(*[st.floats(-2, 2, allow_nan=False) for _ in XYZ]))
def test_order_zero_matches_direct_evaluation(node, point):
    text = to_text(node)
    env = dict(zip(XYZ, point))
    try:
        ref = _python_value(text, env)
    except (ArithmeticError, ValueError):
        assume(False)
    assume(isinstance(ref, float) and math.isfinite(ref))
    try:
        got = at(text, point, order=0).value
    except DomainError:
        assume(False)
    assert got == pytest.approx(ref, rel=1e-12, abs=1e-300)
