"""Unit and property tests for the exact polynomial layer."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elastic2d.poly import CIRCLE, JET1, JET2, Polynomial, VariableSpace, arith

XY = VariableSpace.make(("x", "y"))


def x_(space=XY):
    return Polynomial.var(space, "x")


def y_(space=XY):
    return Polynomial.var(space, "y")


# ---------------------------------------------------------------------------
# arithmetic
# ---------------------------------------------------------------------------

def test_binomial_identity():
    x, y = x_(), y_()
    assert (x + y) * (x - y) == x * x - y * y


def test_additive_identity():
    p = x_() * x_() + 3 * y_()
    assert arith(p, Polynomial.zero(XY), "add") == p


def test_rational_coefficient_product():
    half_x = Fraction(1, 2) * x_()
    two_thirds_x = Fraction(2, 3) * x_()
    expected = Polynomial.monomial(XY, {"x": 2}, Fraction(1, 3))
    assert arith(half_x, two_thirds_x, "mul") == expected


def test_space_mismatch_rejected():
    other = VariableSpace.make(("x", "z"))
    with pytest.raises(ValueError, match="mismatched"):
        x_() + Polynomial.var(other, "x")


def test_pow():
    x, y = x_(), y_()
    assert (x + y) ** 2 == x * x + 2 * x * y + y * y
    assert (x + y) ** 0 == Polynomial.const(XY, 1)


# ---------------------------------------------------------------------------
# differentiation
# ---------------------------------------------------------------------------

def test_diff_examples():
    x, y = x_(), y_()
    assert (x * x * y).diff("x") == 2 * x * y
    assert (y ** 3).diff("x") == Polynomial.zero(XY)
    p = x + Fraction(1, 4) * x * x
    assert p.diff("x") == 1 + Fraction(1, 2) * x

    with pytest.raises(ValueError, match="unknown variable"):
        x.diff("w")


# ---------------------------------------------------------------------------
# substitution
# ---------------------------------------------------------------------------

def test_substitute_to_constant():
    x = x_()
    out = (x + 1).substitute({"x": Polynomial.zero(XY)})
    assert out == Polynomial.const(XY, 1)


def test_substitute_expands_square():
    uv = VariableSpace.make(("u", "v"))
    x = x_()
    image = Polynomial.var(uv, "u") + Polynomial.var(uv, "v")
    out = (x * x).substitute({"x": image}, target=uv)
    u, v = Polynomial.var(uv, "u"), Polynomial.var(uv, "v")
    assert out == u * u + 2 * u * v + v * v


def test_substitute_curl_free_prototype():
    g12 = Polynomial.var(JET1, "G12")
    g21 = Polynomial.var(JET1, "G21")
    out = (g12 - g21).substitute({"G12": g21})
    assert out.is_zero()


def test_substitute_unbound_variable_missing_from_target():
    uv = VariableSpace.make(("u", "v"))
    p = x_() + y_()
    with pytest.raises(ValueError, match="unbound variable"):
        p.substitute({"x": Polynomial.var(uv, "u")}, target=uv)


# ---------------------------------------------------------------------------
# circle reduction
# ---------------------------------------------------------------------------

def cvar():
    return Polynomial.var(CIRCLE, "c")


def svar():
    return Polynomial.var(CIRCLE, "s")


def test_reduce_circle_defining_relation():
    c, s = cvar(), svar()
    assert (c * c + s * s).reduce_circle() == Polynomial.const(CIRCLE, 1)


def test_reduce_circle_s_squared():
    c, s = cvar(), svar()
    assert (s * s).reduce_circle() == 1 - c * c


def test_reduce_circle_mixed_monomial():
    c, s = cvar(), svar()
    assert (c ** 3 * s ** 2).reduce_circle() == c ** 3 - c ** 5


def divide_by_circle(p: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Oracle: divide by s^2 - (1 - c^2), monic in s; returns (quotient, remainder)."""
    space = p.space
    c = Polynomial.var(space, "c")
    one = Polynomial.const(space, 1)
    si = space.index("s")
    quotient = Polynomial.zero(space)
    rem = p
    while True:
        high = {e: co for e, co in rem.terms.items() if e[si] >= 2}
        if not high:
            return quotient, rem
        exps, coeff = max(high.items(), key=lambda kv: kv[0][si])
        lead = list(exps)
        lead[si] -= 2
        q = Polynomial(space, {tuple(lead): coeff})
        s2 = Polynomial.monomial(space, {"s": 2})
        divisor = s2 - (one - c * c)
        quotient = quotient + q
        rem = rem - q * divisor


rationals = st.builds(Fraction, st.integers(-99, 99), st.integers(1, 30))

circle_polys = st.dictionaries(
    keys=st.tuples(*[st.integers(0, 3)] * 4),
    values=rationals,
    max_size=6,
).map(lambda d: Polynomial(CIRCLE, d))


@given(circle_polys)
@settings(max_examples=100)
def test_reduce_circle_idempotent_and_sound(p):
    r = p.reduce_circle()
    assert r.reduce_circle() == r
    # s-degree at most one
    si = CIRCLE.index("s")
    assert all(e[si] <= 1 for e in r.terms)
    # p - r lies in the ideal of c^2 + s^2 - 1: exact division leaves no remainder
    quotient, remainder = divide_by_circle(p - r)
    assert remainder.is_zero()
    c = Polynomial.var(CIRCLE, "c")
    s = Polynomial.var(CIRCLE, "s")
    assert quotient * (s * s - (1 - c * c)) == p - r


# ---------------------------------------------------------------------------
# zero test, grading, canonical form
# ---------------------------------------------------------------------------

def test_is_zero():
    x = x_()
    assert (x - x).is_zero()
    assert not x.is_zero()


def test_homogeneous_part_examples():
    x = x_()
    p = x ** 2 + x ** 3
    assert p.homogeneous_part(3) == x ** 3
    assert Polynomial.zero(XY).homogeneous_part(5).is_zero()


def test_homogeneous_part_jet_grading_ignores_profile_symbols():
    space = VWAVE = VariableSpace.make(("G11", "c", "p"))
    g = Polynomial.var(space, "G11")
    c = Polynomial.var(space, "c")
    p = Polynomial.var(space, "p")
    q = g * c ** 2 * p + g * g
    assert q.homogeneous_part(1) == g * c ** 2 * p
    assert q.homogeneous_part(2) == g * g


jet_polys = st.dictionaries(
    keys=st.tuples(*[st.integers(0, 3)] * 4),
    values=rationals,
    max_size=8,
).map(lambda d: Polynomial(JET1, d))


@given(jet_polys, jet_polys)
@settings(max_examples=100)
def test_add_then_sub_round_trip(p, q):
    assert (p + q) - q == p


@given(jet_polys)
@settings(max_examples=100)
def test_grading_completeness(p):
    total = Polynomial.zero(JET1)
    for d in range(p.graded_degree() + 1):
        total = total + p.homogeneous_part(d)
    assert total == p


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_text_form_deterministic():
    x, y = x_(), y_()
    p = y - x + Fraction(1, 3) * x * x * y
    assert p.to_text() == "1/3*x^2*y - x + y"


def test_json_round_trip():
    x, y = x_(), y_()
    p = Fraction(-7, 2) * x ** 3 + y - 5
    assert Polynomial.from_json_obj(p.to_json_obj()) == p


def test_evaluate_exact_and_float():
    x, y = x_(), y_()
    p = x * x + Fraction(1, 2) * y
    assert p.evaluate({"x": Fraction(1, 3), "y": 2}) == Fraction(10, 9)
    assert p.evaluate({"x": 0.5, "y": 1.0}) == pytest.approx(0.75)


def test_jet2_names_present():
    for name in ("u1_11", "u1_12", "u1_22", "u2_11", "u2_12", "u2_22"):
        assert name in JET2
