import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from ksrigidity.errors import EvalError, ParseError
from ksrigidity.expr import BinOp, Const, Neg, Num, Sqrt, evaluate, format_decimal, parse_component, parse_expr, to_text

W = cmath.exp(2j * math.pi / 3)


@pytest.mark.parametrize("text,value", [
    ("1", 1),
    ("-1/2", -0.5),
    ("1/sqrt(2)", 1 / math.sqrt(2)),
    ("w*w", W * W),
    ("(1 + i)/2", (1 + 1j) / 2),
    ("2 - 3*i", 2 - 3j),
    ("--3", 3),
    ("0.125", 0.125),
    ("  sqrt( 3 ) * w ", math.sqrt(3) * W),
])
def test_values(text, value):
    assert abs(parse_component(text).value - value) < 1e-15


def test_origin_is_kept():
    assert parse_component("1/sqrt(2)").origin == "1/sqrt(2)"


def test_decimals_are_exact_rationals():
    assert parse_expr("0.1").value.denominator == 10


@pytest.mark.parametrize("text,offset", [
    ("1 +", 3),
    ("2 $ 3", 2),
    ("sqrt(2.5)", 6),
    ("(1", 2),
    ("", 0),
    ("1 2", 2),
])
def test_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as info:
        parse_expr(text)
    assert info.value.offset == offset


def test_division_by_zero():
    with pytest.raises(EvalError):
        parse_component("1/(1-1)")


leaves = st.one_of(
    st.integers(0, 50).map(lambda k: Num(str(k))),
    st.sampled_from([Const("i"), Const("w")]),
    st.integers(1, 12).map(Sqrt),
)
trees = st.recursive(
    leaves,
    lambda sub: st.one_of(
        sub.map(Neg),
        st.tuples(st.sampled_from("+-*"), sub, sub).map(lambda t: BinOp(t[0], t[1], t[2])),
    ),
    max_leaves=12,
)


@settings(max_examples=200, deadline=None)
@given(trees)
def test_print_parse_round_trip(tree):
    text = to_text(tree)
    again = parse_expr(text)
    a, b = evaluate(tree), evaluate(again)
    assert abs(a - b) <= 1e-9 * max(1.0, abs(a))
    assert to_text(again) == text


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=300, deadline=None)
@given(finite, finite)
def test_decimal_output_reloads_exactly(re_, im):
    z = complex(re_, im)
    assert parse_component(format_decimal(z)).value == z
