import pytest

from kolab.errors import MixedParityError, ParseError
from kolab.superalg import Poly, format_poly, multiply, parse_poly
from kolab.witt import (
    Delta,
    E_operator,
    SuperDerivation,
    T_H,
    WittModel,
    bracket_w,
    format_derivation,
    in_SHO_prime,
    operator_bracket_on,
    parse_derivation,
    pdeg_w,
    prime,
)


def d(shape, r):
    return SuperDerivation.partial(shape, r)


def term(shape, text, r):
    return SuperDerivation.term(parse_poly(shape, text), r)


class TestBracket:
    def test_partial_against_linear(self, shape_n1):
        assert bracket_w(d(shape_n1, 1), term(shape_n1, "x1", 2)) == d(shape_n1, 2)

    def test_commuting_pair(self, shape_n1):
        assert bracket_w(term(shape_n1, "x3", 1), term(shape_n1, "x3", 2)).is_zero()

    def test_odd_pair_gives_euler(self, shape_n1):
        value = bracket_w(term(shape_n1, "x2", 1), term(shape_n1, "x1", 2))
        assert value == term(shape_n1, "x1", 1) + term(shape_n1, "x2", 2)

    def test_super_antisymmetry(self, shape_n1):
        X, Y = term(shape_n1, "x2", 1), term(shape_n1, "x1", 2)
        assert bracket_w(X, Y) == bracket_w(Y, X)
        X, Y = d(shape_n1, 1), term(shape_n1, "x1", 2)
        assert bracket_w(X, Y) == -bracket_w(Y, X)

    def test_matches_composition(self, shape_n1):
        X, Y = term(shape_n1, "x2", 1), term(shape_n1, "x1*x3", 2)
        for f in ("x1^(2)*x2", "x1*x3", "x2*x3", "1"):
            g = parse_poly(shape_n1, f)
            assert bracket_w(X, Y).apply(g) == operator_bracket_on(X, Y, g)

    def test_mixed_parity(self, shape_n1):
        mixed = d(shape_n1, 1) + d(shape_n1, 2)
        with pytest.raises(MixedParityError):
            bracket_w(mixed, d(shape_n1, 1))


class TestOperators:
    def test_partner_index(self, shape_n2):
        assert [prime(shape_n2, i) for i in range(1, 5)] == [3, 4, 1, 2]
        with pytest.raises(ValueError):
            prime(shape_n2, 5)

    def test_euler_on_monomials(self, shape_n1):
        x1x2 = parse_poly(shape_n1, "x1*x2")
        assert E_operator(x1x2) == x1x2.scale(2)
        assert E_operator(parse_poly(shape_n1, "x3")).is_zero()

    def test_hamiltonian_of_quadratic(self, shape_n2):
        value = T_H(parse_poly(shape_n2, "x1*x3"))
        assert value == term(shape_n2, "x3", 3) - term(shape_n2, "x1", 1)

    def test_degrees(self, shape_n1):
        assert pdeg_w(d(shape_n1, 3)) == -2
        assert pdeg_w(d(shape_n1, 1)) == -1
        assert pdeg_w(term(shape_n1, "x1*x3", 1)) == 2
        assert pdeg_w(d(shape_n1, 1) + d(shape_n1, 3)) is None

    def test_delta_and_special_part(self, shape_n2):
        assert format_poly(Delta(parse_poly(shape_n2, "x1*x3"))) == "1"
        assert not in_SHO_prime(parse_poly(shape_n2, "x1*x3"))
        assert in_SHO_prime(parse_poly(shape_n2, "x1*x4"))
        with pytest.raises(ValueError):
            in_SHO_prime(parse_poly(shape_n2, "x5"))


class TestDerivationText:
    def test_format(self, shape_n1):
        assert format_derivation(d(shape_n1, 3)) == "d3"
        assert format_derivation(term(shape_n1, "x1", 2)) == "x1 * d2"
        assert format_derivation(term(shape_n1, "x1 + x1*x2", 3)) == "(x1 + x1*x2) * d3"
        assert format_derivation(SuperDerivation.zero(shape_n1)) == "0"

    def test_parse(self, shape_n1):
        assert parse_derivation(shape_n1, "x3 * d1 - d2") == term(shape_n1, "x3", 1) - d(shape_n1, 2)
        assert parse_derivation(shape_n1, "(x1 + x1*x2) * d3") == term(shape_n1, "x1 + x1*x2", 3)

    @pytest.mark.parametrize("text", ["", "x1", "x1 * d7", "x9 * d1"])
    def test_parse_errors(self, shape_n1, text):
        with pytest.raises(ParseError):
            parse_derivation(shape_n1, text)


class TestWittModel:
    def test_dimension_and_coordinates(self, shape_n1):
        model = WittModel(shape_n1)
        assert model.dim == 36
        X = term(shape_n1, "x1*x2", 3)
        assert model.from_coords(model.coords(X)) == X

    def test_ad_matrix_columns(self, shape_n1):
        model = WittModel(shape_n1)
        X = term(shape_n1, "x3", 1)
        M = model.ad_matrix(X)
        for j in (0, 5, 20):
            assert model.from_coords(M[:, j] % 3) == bracket_w(X, model.element(j))

    def test_positive_basis(self, shape_n1):
        model = WittModel(shape_n1)
        assert all(model.pdeg(k) >= 1 for k in model.positive_basis())
        assert model.index[(parse_poly(shape_n1, "x1*x3").monomials()[0], 1)] in model.positive_basis()
