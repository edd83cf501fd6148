import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circuitgrader.eqcheck import (
    IncomparableError,
    compare_equations,
    parse_equation,
)

DIFFEQ_A = r"1 \times 10^{8} v_s = \frac{d^2 v}{dt^2} + 3000 \frac{dv}{dt} + 1.02 \times 10^{8} v"
DIFFEQ_B = r"1 \times 10^{8} v_s = 1.02 \times 10^{8} v + 3000 \frac{\mathrm{d}v}{\mathrm{d}t} + \frac{\mathrm{d}^2 v}{\mathrm{d}t^2}"


def cmp(a, b):
    return compare_equations(parse_equation(a), parse_equation(b))


def test_reordered_differential_equation_matches():
    verdict = cmp(DIFFEQ_A, DIFFEQ_B)
    assert verdict.matched, verdict.detail


def test_sign_flipped_term_does_not_match():
    flipped = DIFFEQ_A.replace("+ 3000", "- 3000")
    assert not cmp(flipped, DIFFEQ_B).matched


def test_scalar_multiple_matches():
    assert cmp("x + y = 0", "2x + 2y = 0").matched
    assert cmp("x + y = 1", "3x + 3y = 3").matched


def test_coefficient_difference_detected():
    assert not cmp("x + y = 0", "x - y = 0").matched


def test_moved_terms_match():
    assert cmp("x + y = 5", "x = 5 - y").matched


def test_different_bases_are_incomparable():
    with pytest.raises(IncomparableError):
        cmp("x = 0", "y = 0")


def test_degenerate_equation_is_incomparable():
    with pytest.raises(IncomparableError):
        cmp("x = x", "x = 0")


@settings(max_examples=150, deadline=None)
@given(
    coeffs=st.lists(
        st.fractions(min_value=-9, max_value=9, max_denominator=4).filter(bool),
        min_size=2,
        max_size=5,
        unique=True,
    ),
    seed=st.integers(min_value=0, max_value=2**30),
    scale=st.sampled_from([1, 2, 3, -1, -2, Fraction(1, 2)]),
)
def test_term_permutation_and_scaling_invariance(coeffs, seed, scale):
    """A linear equation matches any reordered, rescaled copy of itself."""
    symbols = ["x", "y", "z", "u", "w"][: len(coeffs)]
    lhs = " + ".join(
        f"\\frac{{{c.numerator}}}{{{c.denominator}}} {s}" for c, s in zip(coeffs, symbols)
    )
    original = f"{lhs} = 7"
    order = list(range(len(coeffs)))
    random.Random(seed).shuffle(order)
    shuffled = " + ".join(
        f"\\frac{{{(coeffs[k] * scale).numerator}}}{{{(coeffs[k] * scale).denominator}}} {symbols[k]}"
        for k in order
    )
    permuted = f"{shuffled} = {'-' if scale < 0 else ''}\\frac{{{abs(Fraction(7) * scale).numerator}}}{{{abs(Fraction(7) * scale).denominator}}}"
    verdict = cmp(original, permuted)
    assert verdict.matched, verdict.detail
