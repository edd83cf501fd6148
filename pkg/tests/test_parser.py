from fractions import Fraction

import pytest

from circuitgrader.eqcheck import ParseError, parse_any, parse_equation, parse_expr, render
from circuitgrader.eqcheck.nodes import (
    Add,
    Deg,
    Deriv,
    Div,
    Equation,
    ImagUnit,
    Mul,
    Neg,
    Num,
    Phasor,
    Pi,
    Pow,
    Sqrt,
    Sym,
    Trig,
)


def test_negative_fraction():
    assert parse_expr(r"-\frac{16}{6}") == Neg(Div(Num(Fraction(16)), Num(Fraction(6))))


def test_symbol():
    assert parse_expr("x") == Sym("x")


@pytest.mark.parametrize(
    "text,value",
    [
        (r"3.33 \times 10^{3}", Fraction(3330)),
        (r"1 \times 10^{8}", Fraction(10**8)),
        ("1.02e8", Fraction(102000000)),
        (r"5 \times 10^{-2}", Fraction(5, 100)),
        (r"2.5 \cdot 10^{2}", Fraction(250)),
    ],
)
def test_scientific_literals(text, value):
    assert parse_expr(text) == Num(value)


def test_scientific_fold_needs_power_of_ten():
    assert parse_expr(r"2 \times 3") == Mul((Num(Fraction(2)), Num(Fraction(3))))


@pytest.mark.parametrize(
    "text,expected",
    [
        ("v_s", Sym("v_s")),
        ("i_1", Sym("i_1")),
        ("V_{oc}", Sym("V_oc")),
        (r"\omega", Sym("omega")),
        ("j", ImagUnit()),
        (r"\pi", Pi()),
    ],
)
def test_names(text, expected):
    assert parse_expr(text) == expected


def test_letter_run_multiplies():
    assert parse_expr("vt") == Mul((Sym("v"), Sym("t")))


def test_juxtaposition():
    assert parse_expr("2t") == Mul((Num(Fraction(2)), Sym("t")))
    assert parse_expr("2(3t)") == Mul((Num(Fraction(2)), Num(Fraction(3)), Sym("t")))


def test_trig_with_degree_phase():
    # unary minus binds to the leading factor: (-3)·sin(...)
    e = parse_expr(r"-3\sin(2t+30^\circ)")
    assert e == Mul(
        (
            Neg(Num(Fraction(3))),
            Trig("sin", Add((Mul((Num(Fraction(2)), Sym("t"))), Deg(Num(Fraction(30)))))),
        )
    )


def test_unicode_degree_and_angle():
    assert parse_expr("30°") == Deg(Num(Fraction(30)))
    assert parse_expr("14.69∠05.55°") == parse_expr(r"14.69 \angle 5.55^{\circ}")


def test_phasor():
    e = parse_expr(r"14.69 \angle 5.55^\circ")
    assert e == Phasor(Num(Fraction("14.69")), Deg(Num(Fraction("5.55"))))


def test_sqrt():
    assert parse_expr(r"\sqrt{74}") == Sqrt(Num(Fraction(74)))


@pytest.mark.parametrize(
    "text,target,wrt,order",
    [
        (r"\frac{dv}{dt}", "v", "t", 1),
        (r"\frac{d^2 v}{dt^2}", "v", "t", 2),
        (r"\frac{\mathrm{d}v}{\mathrm{d}t}", "v", "t", 1),
        (r"\frac{\mathrm{d}^2 v}{\mathrm{d}t^2}", "v", "t", 2),
        (r"\frac{d i_1}{d t}", "i_1", "t", 1),
    ],
)
def test_derivatives(text, target, wrt, order):
    assert parse_expr(text) == Deriv(target=target, wrt=wrt, order=order)


def test_frac_that_is_not_derivative():
    assert parse_expr(r"\frac{d}{2}") == Div(Sym("d"), Num(Fraction(2)))


def test_power_forms():
    assert parse_expr("x^2") == Pow(Sym("x"), Num(Fraction(2)))
    assert parse_expr("10^{-3}") == Pow(Num(Fraction(10)), Neg(Num(Fraction(3))))


def test_equation():
    eq = parse_equation("x + y = 0")
    assert eq == Equation(Add((Sym("x"), Sym("y"))), Num(Fraction(0)))


def test_parse_any_returns_expression_without_equals():
    assert parse_any("x + 1") == Add((Sym("x"), Num(Fraction(1))))


@pytest.mark.parametrize(
    "bad",
    ["", "2 +", r"\frac{1}", "(1", r"\unknowncmd{2}", "x = = 2", "@", "2^"],
)
def test_parse_errors_carry_position(bad):
    with pytest.raises(ParseError) as err:
        parse_any(bad)
    assert err.value.position >= 0
    assert err.value.expected


def test_equals_rejected_in_expression():
    with pytest.raises(ParseError):
        parse_expr("x = 2")


ROUND_TRIP_TEXTS = [
    r"-\frac{16}{6}",
    r"3.33 \times 10^{3}",
    "x",
    r"\sqrt{74}",
    r"-3\sin(2t+30^\circ)",
    r"3\cos(2t+120^\circ)",
    r"14.69 \angle 5.55^\circ",
    r"\frac{1}{j}",
    "-j",
    r"\frac{\pi}{3}",
    r"\frac{d^2 v}{dt^2} + 3000 \frac{dv}{dt} + 1.02 \times 10^{8} v",
    "2(3t)",
    "a + (b + c)",
    "x^2 - 2x + 1",
    r"\sqrt{74}\cos(8t-9.462^\circ)",
    "-(x+y)",
]


@pytest.mark.parametrize("text", ROUND_TRIP_TEXTS)
def test_render_round_trip(text):
    tree = parse_expr(text)
    assert parse_expr(render(tree)) == tree
