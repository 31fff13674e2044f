import pytest

from kolab.errors import ParseError, ShapeMismatchError
from kolab.superalg import (
    Monomial,
    Poly,
    Shape,
    basis,
    derive,
    embed,
    format_monomial,
    format_poly,
    multiply,
    parse_poly,
    pdeg,
    split_signed_terms,
)


class TestShape:
    def test_contact_defaults(self):
        shape = Shape.contact(2, 3)
        assert shape.t == (1, 1)
        assert shape.m == 3
        assert shape.num_vars == 5
        assert shape.distinguished == 5
        assert shape.bounds == (2, 2)
        assert shape.dim == 9 * 8

    def test_heights_change_bounds(self):
        shape = Shape.contact(1, 3, (2,))
        assert shape.bounds == (8,)
        assert shape.dim == 9 * 4

    def test_invalid(self):
        with pytest.raises(ValueError):
            Shape.contact(1, 4)
        with pytest.raises(ValueError):
            Shape.contact(0, 3)
        with pytest.raises(ValueError):
            Shape(n=2, t=(1,), p=3)

    def test_principal_degree_counts_distinguished_twice(self, shape_n1):
        assert pdeg(Monomial((1,), (3,)), shape_n1) == 3
        assert pdeg(Monomial((2,), (2,)), shape_n1) == 3
        assert pdeg(Monomial((0,), ()), shape_n1) == 0


class TestProducts:
    def test_divided_powers(self, shape_n1):
        x1 = Poly.variable(shape_n1, 1)
        assert multiply(x1, x1) == Poly.divided_power(shape_n1, 1, 2).scale(2)

    def test_truncation_kills_overflow(self, shape_n1):
        x1 = Poly.variable(shape_n1, 1)
        assert multiply(x1, Poly.divided_power(shape_n1, 1, 2)).is_zero()

    def test_lucas_zero_inside_bound(self):
        shape = Shape.contact(1, 3, (2,))
        x1 = Poly.variable(shape, 1)
        assert multiply(x1, Poly.divided_power(shape, 1, 2)).is_zero()
        assert multiply(x1, Poly.divided_power(shape, 1, 3)) == Poly.divided_power(shape, 1, 4)

    def test_odd_variables_anticommute(self, shape_n1):
        x2, x3 = Poly.variable(shape_n1, 2), Poly.variable(shape_n1, 3)
        assert multiply(x3, x2) == -multiply(x2, x3)
        assert multiply(x2, x2).is_zero()

    def test_shape_mismatch(self, shape_n1, shape_n2):
        with pytest.raises(ShapeMismatchError):
            multiply(Poly.one(shape_n1), Poly.one(shape_n2))

    def test_parity(self, shape_n1):
        assert Poly.variable(shape_n1, 1).parity() == 0
        assert Poly.variable(shape_n1, 2).parity() == 1
        assert (Poly.variable(shape_n1, 1) + Poly.variable(shape_n1, 2)).parity() is None


class TestDerivatives:
    def test_even_direction(self, shape_n1):
        f = Poly.divided_power(shape_n1, 1, 2)
        assert derive(1, f) == Poly.variable(shape_n1, 1)

    def test_odd_sign(self, shape_n1):
        x2x3 = multiply(Poly.variable(shape_n1, 2), Poly.variable(shape_n1, 3))
        assert derive(3, x2x3) == -Poly.variable(shape_n1, 2)
        assert derive(2, x2x3) == Poly.variable(shape_n1, 3)

    def test_bad_direction(self, shape_n1):
        with pytest.raises(ValueError):
            derive(4, Poly.one(shape_n1))


class TestBasisAndEmbedding:
    def test_basis_size(self, shape_n1, shape_n2):
        assert len(basis(shape_n1)) == shape_n1.dim
        assert len(basis(shape_n2)) == 72

    def test_embed_keeps_terms(self, shape_n1):
        f = Poly.divided_power(shape_n1, 1, 2)
        g = embed(f, shape_n1.with_heights((2,)))
        assert g.shape.t == (2,)
        assert format_poly(g) == "x1^(2)"

    def test_embed_rejects_other_rank(self, shape_n1, shape_n2):
        with pytest.raises(ShapeMismatchError):
            embed(Poly.one(shape_n1), shape_n2)


class TestFormatting:
    def test_monomial(self):
        assert format_monomial(Monomial((2,), (3,))) == "x1^(2)*x3"
        assert format_monomial(Monomial((0,), ())) == "1"

    def test_poly(self, shape_n1):
        assert format_poly(Poly.zero(shape_n1)) == "0"
        assert format_poly(Poly.constant(shape_n1, 5)) == "2"
        f = Poly.variable(shape_n1, 1) - Poly.variable(shape_n1, 3)
        assert format_poly(f) == "2*x3 + x1"


class TestParsing:
    def test_repeated_factor(self, shape_n1):
        assert format_poly(parse_poly(shape_n1, "x1*x1")) == "2*x1^(2)"

    def test_signs_and_coefficients(self, shape_n2):
        f = parse_poly(shape_n2, "x1^(2)*x4*x5 - 2*x2")
        assert format_poly(f) == "x2 + x1^(2)*x4*x5"

    def test_parenthesised_group(self, shape_n1):
        assert parse_poly(shape_n1, "-(x1 - x2)") == parse_poly(shape_n1, "x2 - x1")

    def test_formatted_text_parses_back(self, model_n1):
        for a in model_n1.potentials():
            assert parse_poly(model_n1.shape, format_poly(a)) == a

    @pytest.mark.parametrize("text", ["", "x9", "x2^(2)", "x1^(3)", "(x1", "x1 -", "x1**x2", "y1"])
    def test_errors(self, shape_n1, text):
        with pytest.raises(ParseError):
            parse_poly(shape_n1, text)

    def test_split_signed_terms(self):
        assert list(split_signed_terms("x1 - x2 + 3*x3")) == [(1, "x1"), (-1, "x2"), (1, "3*x3")]
