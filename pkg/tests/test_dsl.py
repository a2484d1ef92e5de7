"""Spec file parsing, elaboration and the canonical print round-trip."""

import random
from fractions import Fraction

import pytest

from blexpand import dsl
from blexpand.errors import ParseError
from blexpand.sympoly import CRat, CR_I, SymbolPoly

MUNK_WEST = """
[operator]
name = toy
nvars = 0
order = 4
expr = i*eps^-1*xin - (1/Re)*xin^4

[params]
Re = 1

[boundary.left]
curve = point
samples = 0
"""

QG_WEST = """
[operator]
name = qg-west
nvars = 1
order = 4

[params]
Re = 1
r = 1

[boundary.west]
curve = graph
chi = s/2
samples = -1, -1/2, 0, 1/2, 1
expr = i*eps^-1*xin - r*(zeta1^2 - 2*chi*zeta1*xin + (1 + chi^2)*xin^2) - (1/Re)*(zeta1^2 - 2*chi*zeta1*xin + (1 + chi^2)*xin^2)^2

[bc.west]
condition = order 0, g 0
condition = order 1, g 0
"""


class TestExpressions:
    def test_direct_elaboration(self):
        spec = dsl.parse_spec(MUNK_WEST)
        poly = dsl.elaborate_at_sample(spec, "left", Fraction(0))
        assert poly.terms == {(-1, (), 1): CR_I,
                              (0, (), 4): CRat(Fraction(-1))}

    def test_laplacian_symbol(self):
        e = dsl.parse_expr("xin^2 + zeta1^2")
        poly = dsl.elaborate(e, 1, {})
        assert poly == (SymbolPoly.var_xin(1) ** 2
                        + SymbolPoly.var_zeta(1, 0) ** 2)

    def test_rational_exponent_needs_parens(self):
        e = dsl.parse_expr("eps^(1/4)*xin")
        poly = dsl.elaborate(e, 0, {})
        assert list(poly.terms) == [(1, (), 1)] and poly.qden == 4

    def test_division_by_variable_rejected(self):
        with pytest.raises(ParseError):
            dsl.elaborate(dsl.parse_expr("1/xin"), 0, {})

    def test_negative_xin_exponent_rejected(self):
        with pytest.raises(ParseError):
            dsl.elaborate(dsl.parse_expr("xin^-1"), 0, {})

    def test_undefined_parameter(self):
        with pytest.raises(ParseError) as err:
            dsl.elaborate(dsl.parse_expr("nope*xin"), 0, {})
        assert "nope" in str(err.value)

    def test_errors_carry_position(self):
        with pytest.raises(ParseError) as err:
            dsl.parse_expr("xin + @", 3)
        assert err.value.line == 3 and err.value.col >= 6

    def test_linearity_of_elaboration(self):
        a, b = "i*xin^2 + zeta1", "eps^2*zeta1^3 - 7"
        pa = dsl.elaborate(dsl.parse_expr(a), 1, {})
        pb = dsl.elaborate(dsl.parse_expr(b), 1, {})
        pab = dsl.elaborate(dsl.parse_expr(f"({a}) + ({b})"), 1, {})
        assert pab == pa + pb


class TestQgSymbol:
    def test_flat_slope_matches_displayed_form(self):
        # At chi = 0 the western QG symbol reduces term by term to
        # i/eps*xin - r*(z^2 + xin^2) - (1/Re)*(z^2 + xin^2)^2.
        spec = dsl.parse_spec(QG_WEST)
        poly = dsl.elaborate_at_sample(spec, "west", Fraction(0))
        z = SymbolPoly.var_zeta(1, 0)
        x = SymbolPoly.var_xin(1)
        eps1 = SymbolPoly.eps_power(1, -1)
        lap = z ** 2 + x ** 2
        expected = (eps1 * x).scale(CR_I) - lap - lap * lap
        assert poly == expected

    def test_quartic_coefficient_at_slope(self):
        spec = dsl.parse_spec(QG_WEST)
        poly = dsl.elaborate_at_sample(spec, "west", Fraction(1))
        # coefficient of xin^4 equals -(1 + chi^2)^2 / Re with chi = 1/2
        c = poly.terms[(0, (0,), 4)]
        assert c == CRat(-(Fraction(1) + Fraction(1, 4)) ** 2)

    def test_constant_coefficients_same_at_all_samples(self):
        spec = dsl.parse_spec(MUNK_WEST)
        polys = [dsl.elaborate_at_sample(spec, "left", s)
                 for s in spec.component("left").samples]
        assert all(p == polys[0] for p in polys)


class TestCircle:
    CIRCLE = """
[operator]
name = disc
nvars = 1
order = 4
expr = i*eps^-1*(zeta1 - chi*xin) - (zeta1^2 + (1 + chi^2)*xin^2) - (zeta1^4 + (1 + chi^2)^2*xin^4)

[boundary.rim]
curve = circle
samples = -1/2, -1/4, 0, 1/4, 1/2
"""

    def test_degenerate_sample_drops_first_order_xin(self):
        spec = dsl.parse_spec(self.CIRCLE)
        at0 = dsl.elaborate_at_sample(spec, "rim", Fraction(0))
        assert (-1, (0,), 1) not in at0.terms      # eps^-1*xin coefficient
        away = dsl.elaborate_at_sample(spec, "rim", Fraction(1, 4))
        assert (-1, (0,), 1) in away.terms

    def test_circle_samples_bounded(self):
        with pytest.raises(ParseError):
            dsl.parse_spec(self.CIRCLE.replace("-1/2,", "-3/2,"))


class TestRoundTrip:
    def test_parse_print_parse(self):
        for text in (MUNK_WEST, QG_WEST, TestCircle.CIRCLE):
            spec = dsl.parse_spec(text)
            printed = dsl.print_spec(spec)
            again = dsl.parse_spec(printed)
            assert again == spec
            assert dsl.print_spec(again) == printed

    def test_float_literals_round_trip(self):
        text = MUNK_WEST.replace("Re = 1", "Re = 0.2")
        spec = dsl.parse_spec(text)
        again = dsl.parse_spec(dsl.print_spec(spec))
        assert again == spec


class TestFuzz:
    def test_fuzzed_inputs_never_crash(self):
        rng = random.Random(2024)
        alphabet = "[]()=+-*/^.,# \n\tabceinoprsxz0123456789"
        for _ in range(400):
            n = rng.randint(0, 80)
            junk = "".join(rng.choice(alphabet) for _ in range(n))
            try:
                dsl.parse_spec(junk)
            except ParseError:
                pass

    def test_fuzzed_bytes_never_crash(self):
        rng = random.Random(99)
        for _ in range(200):
            blob = bytes(rng.randrange(256) for _ in range(rng.randint(0, 60)))
            try:
                dsl.parse_spec(blob)
            except ParseError:
                pass


class TestConditions:
    def test_conditions_parsed(self):
        spec = dsl.parse_spec(QG_WEST)
        conds = spec.conditions("west")
        assert [c.order for c in conds] == [0, 1]

    def test_bc_requires_component(self):
        text = QG_WEST.replace("[bc.west]", "[bc.nowhere]")
        with pytest.raises(ParseError):
            dsl.parse_spec(text)
