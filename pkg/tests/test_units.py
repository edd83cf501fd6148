import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circuitgrader.eqcheck import (
    IncommensurableUnitsError,
    Quantity,
    UnknownUnitError,
    convert_unit,
    parse_unit,
)


def q(value, unit):
    return Quantity(complex(value), parse_unit(unit))


def test_cents_to_dollars():
    out = convert_unit(q(26.4, "cents"), "dollars")
    assert out.value == pytest.approx(0.264)


def test_watts_to_milliwatts():
    out = convert_unit(q(1, "W"), "mW")
    assert out.value == pytest.approx(1000.0)


def test_radians_to_degrees():
    out = convert_unit(q(math.pi / 3, "rad"), "degrees")
    assert out.value == pytest.approx(60.0)


def test_incommensurable():
    with pytest.raises(IncommensurableUnitsError):
        convert_unit(q(1, "V"), "A")


def test_kwh_equals_joules():
    assert parse_unit("kWh").dims == parse_unit("J").dims
    out = convert_unit(q(2.2, "kWh"), "J")
    assert out.value == pytest.approx(2.2 * 3.6e6)


@pytest.mark.parametrize(
    "text,base_scale",
    [
        ("V", 1.0),
        ("mV", 1e-3),
        ("kohm", 1e3),
        (r"\Omega", 1.0),
        ("Ω", 1.0),
        ("M \\Omega", 1e6),
        ("V/A", 1.0),
        ("A s", 1.0),
        ("s^{-1}", 1.0),
        ("hours", 3600.0),
        ("$", 1.0),
    ],
)
def test_parse_unit_scales(text, base_scale):
    assert parse_unit(text).scale == pytest.approx(base_scale)


def test_unit_words_and_symbols_agree():
    assert parse_unit("volts").dims == parse_unit("V").dims
    assert parse_unit("seconds").scale == parse_unit("s").scale
    assert parse_unit("ohms").dims == parse_unit("Ω").dims


def test_unknown_unit():
    with pytest.raises(UnknownUnitError):
        parse_unit("furlongs")


_UNIT_PAIRS = [
    ("W", "mW"),
    ("W", "kW"),
    ("cent", "dollar"),
    ("rad", "deg"),
    ("s", "h"),
    ("s", "min"),
    ("V", "mV"),
    ("ohm", "kohm"),
    ("Wh", "J"),
    ("kWh", "J"),
]


@settings(max_examples=200, deadline=None)
@given(
    value=st.floats(min_value=1e-6, max_value=1e6, allow_nan=False, allow_infinity=False),
    pair=st.sampled_from(_UNIT_PAIRS),
    flip=st.booleans(),
)
def test_conversion_round_trip(value, pair, flip):
    src, dst = (pair[1], pair[0]) if flip else pair
    start = q(value, src)
    back = convert_unit(convert_unit(start, dst), src)
    assert abs(back.value - start.value) <= 1e-12 * abs(start.value)
