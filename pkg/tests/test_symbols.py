import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from focklab.operators import build
from focklab.symbols import (
    HarmonicSymbol,
    SymbolSyntaxError,
    conjugate,
    parse,
    render,
    scale_add,
    symbol_from_json,
    symbol_to_json,
)


class TestParse:
    def test_example_anti(self):
        phi = parse("2*conj(z)^1+3*conj(z)^2+conj(z)^3")
        assert dict(phi.anti) == {1: 2, 2: 3, 3: 1}
        assert not phi.analytic

    def test_zero_coefficient_dropped(self):
        assert parse("0*z^5").is_zero

    def test_example_analytic(self):
        phi = parse("5*z+9*z^2+z^4")
        assert dict(phi.analytic) == {1: 5, 2: 9, 4: 1}

    def test_constant_and_complex_coefficients(self):
        phi = parse("(1+2i) - 3i*z + 2.5*conj(z) - z^2")
        assert phi.a(0) == 1 + 2j
        assert phi.a(1) == -3j
        assert phi.a(2) == -1
        assert phi.b(1) == 2.5

    def test_repeated_terms_accumulate(self):
        assert parse("z + 2*z").a(1) == 3

    def test_whitespace_ignored(self):
        assert parse(" 3 * z ^ 2 ") == parse("3*z^2")

    @pytest.mark.parametrize(
        "text, pos",
        [("z^^2", 2), ("z^", 2), ("3*", 2), ("conj(w)", 0), ("", 0), ("z+", 2)],
    )
    def test_syntax_error_positions(self, text, pos):
        with pytest.raises(SymbolSyntaxError) as info:
            parse(text)
        assert info.value.position == pos

    def test_negative_exponent_rejected(self):
        with pytest.raises(SymbolSyntaxError):
            parse("z^-1")

    def test_conj_zero_power_rejected(self):
        with pytest.raises(SymbolSyntaxError):
            parse("conj(z)^0")

    def test_z_zero_power_is_constant(self):
        assert parse("4*z^0") == HarmonicSymbol.constant(4)


class TestSymbolBasics:
    def test_degrees(self):
        phi = parse("z^3 + conj(z)")
        assert (phi.d_a, phi.d_b) == (3, 1)
        assert (HarmonicSymbol().d_a, HarmonicSymbol().d_b) == (-1, -1)

    def test_anti_index_zero_rejected(self):
        with pytest.raises(ValueError):
            HarmonicSymbol({}, {0: 1})

    def test_evaluate(self):
        phi = parse("2*z + conj(z)^2")
        z = 0.3 - 0.7j
        assert phi.evaluate(z) == pytest.approx(2 * z + np.conj(z) ** 2)

    def test_max_abs_coeff(self):
        assert parse("3*z - 4i*conj(z)").max_abs_coeff() == 4


class TestAlgebra:
    def test_conjugate_z(self):
        assert conjugate(parse("z")) == parse("conj(z)")

    def test_conjugate_real_anti(self):
        assert conjugate(parse("2*conj(z)+3*conj(z)^2+conj(z)^3")) == parse("2*z+3*z^2+z^3")

    def test_conjugate_constant(self):
        assert conjugate(HarmonicSymbol.constant(1 + 1j)) == HarmonicSymbol.constant(1 - 1j)

    def test_conjugate_pointwise(self):
        phi = parse("(1+2i)*z^2 - 3i + 0.5*conj(z)^3")
        z = np.array([0.2 + 1j, -1.5 + 0.1j])
        assert np.allclose(conjugate(phi).evaluate(z), np.conj(phi.evaluate(z)))

    def test_scale_add_cancels(self):
        phi = parse("z + conj(z)^2")
        assert scale_add(phi, phi, 1, -1).is_zero

    def test_scale_add_disjoint(self):
        out = scale_add(parse("z"), parse("conj(z)"), 2, 3)
        assert dict(out.analytic) == {1: 2} and dict(out.anti) == {1: 3}

    def test_scale_add_partial_cancel(self):
        assert scale_add(parse("5*z+9*z^2"), parse("9*z^2"), 1, -1) == parse("5*z")

    @pytest.mark.parametrize("kind", ["toeplitz", "hankel", "htoeplitz"])
    def test_matrix_linearity(self, kind, random_symbol):
        phi, psi = random_symbol(), random_symbol()
        a, b = 1.5 - 0.5j, -2.0
        lhs = build(kind, scale_add(phi, psi, a, b), 10, 10, 1.3).entries
        rhs = a * build(kind, phi, 10, 10, 1.3).entries + b * build(kind, psi, 10, 10, 1.3).entries
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1, np.max(np.abs(rhs)))


coeffs = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)
symbols = st.builds(
    HarmonicSymbol,
    st.dictionaries(st.integers(0, 12), coeffs, max_size=6),
    st.dictionaries(st.integers(1, 12), coeffs, max_size=6),
)


@settings(max_examples=200, deadline=None)
@given(symbols)
def test_render_parse_round_trip(phi):
    assert parse(render(phi)) == phi


@settings(max_examples=200, deadline=None)
@given(symbols)
def test_conjugate_involution(phi):
    assert conjugate(conjugate(phi)) == phi


@settings(max_examples=100, deadline=None)
@given(symbols)
def test_json_round_trip(phi):
    assert symbol_from_json(symbol_to_json(phi)) == phi


def test_render_canonical_order():
    assert render(parse("conj(z)^2 + z^3 - 1 + z")) == "-1.0 + 1.0*z^1 + 1.0*z^3 + 1.0*conj(z)^2"


def test_render_zero():
    assert render(HarmonicSymbol()) == "0"
