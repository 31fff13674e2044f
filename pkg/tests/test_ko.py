import itertools

import numpy as np
import pytest

from kolab.errors import CapExceededError, MixedParityError, ShapeMismatchError
from kolab.ko import (
    KOModel,
    bracket_ko,
    bracket_simplified,
    classification_from_table,
    d_ko_expand,
    parity_ko,
    recover_rank,
    structure_constants_payload,
)
from kolab.linalg import lie_closure
from kolab.superalg import Poly, Shape, format_poly, parse_poly
from kolab.witt import SuperDerivation, bracket_w, parse_derivation


class TestExpansion:
    def test_unit(self, shape_n1):
        assert d_ko_expand(Poly.one(shape_n1)) == SuperDerivation.partial(shape_n1, 3).scale(-2)

    def test_even_variable(self, shape_n1):
        assert d_ko_expand(parse_poly(shape_n1, "x1")) == parse_derivation(shape_n1, "d2 - x1 * d3")

    def test_distinguished_variable(self, shape_n1):
        expected = parse_derivation(shape_n1, "-x1 * d1 - x2 * d2 - 2*x3 * d3")
        assert d_ko_expand(parse_poly(shape_n1, "x3")) == expected

    def test_injective_on_basis(self, model_n1):
        seen = {d_ko_expand(a) for a in model_n1.potentials()}
        assert len(seen) == model_n1.dim
        assert all(not D.is_zero() for D in seen)

    def test_parity(self, shape_n1):
        assert parity_ko(Poly.one(shape_n1)) == 1
        assert parity_ko(parse_poly(shape_n1, "x3")) == 0
        with pytest.raises(MixedParityError):
            parity_ko(parse_poly(shape_n1, "x1 + x2"))


class TestBracket:
    def test_known_values(self, shape_n1):
        assert format_poly(bracket_ko(parse_poly(shape_n1, "x1*x3"), Poly.one(shape_n1))) == "2*x1"
        assert bracket_ko(Poly.one(shape_n1), Poly.one(shape_n1)).is_zero()
        assert bracket_ko(parse_poly(shape_n1, "x3"), Poly.one(shape_n1)) == Poly.constant(shape_n1, 2)
        assert bracket_ko(parse_poly(shape_n1, "x1"), parse_poly(shape_n1, "x2")) == Poly.one(shape_n1)

    def test_eigenvector_of_quadratic(self, shape_n2):
        a, b = parse_poly(shape_n2, "x1*x3"), parse_poly(shape_n2, "x1*x5")
        assert bracket_ko(a, b) == -b

    @pytest.mark.parametrize("p", [3, 5])
    def test_quadratic_pairs(self, p):
        shape = Shape.contact(2, p)

        def bracket(a, b):
            return bracket_ko(parse_poly(shape, a), parse_poly(shape, b))

        assert bracket("x1*x2", "x3*x4") == parse_poly(shape, "x2*x4 - x1*x3")
        assert bracket("x3*x4", "x1*x2") == parse_poly(shape, "x2*x4 - x1*x3")
        # mixed pairs: x2*x3 and x3*x2 are the same potential, so the sign follows the even index
        assert bracket("x2*x3", "x4*x1") == parse_poly(shape, "x1*x3 - x2*x4")
        assert bracket("x3*x2", "x1*x4") == parse_poly(shape, "x1*x3 - x2*x4")
        if p == 3:
            assert format_poly(bracket("x3*x2", "x1*x4")) == "2*x2*x4 + x1*x3"

    def test_operator_identity_exhaustive(self, model_n1):
        for a, b in itertools.product(model_n1.potentials(), repeat=2):
            assert d_ko_expand(bracket_ko(a, b)) == bracket_w(d_ko_expand(a), d_ko_expand(b))

    def test_simplified_bracket(self, model_n1):
        shape = model_n1.shape
        for text in ("x1^(2)", "x1*x2"):
            a = parse_poly(shape, text)
            for b in model_n1.potentials():
                assert bracket_simplified(a, b) == bracket_ko(a, b)

    def test_simplified_bracket_preconditions(self, shape_n1):
        with pytest.raises(ValueError):
            bracket_simplified(parse_poly(shape_n1, "x1*x3"), Poly.one(shape_n1))
        with pytest.raises(ValueError):
            bracket_simplified(parse_poly(shape_n1, "x1"), Poly.one(shape_n1))

    def test_errors(self, shape_n1, shape_n2):
        with pytest.raises(MixedParityError):
            bracket_ko(parse_poly(shape_n1, "x1 + x2"), Poly.one(shape_n1))
        with pytest.raises(MixedParityError):
            bracket_ko(Poly.one(shape_n1), parse_poly(shape_n1, "x1 + x2"))
        with pytest.raises(ShapeMismatchError):
            bracket_ko(Poly.one(shape_n1), Poly.one(shape_n2))


class TestModel:
    def test_graded_dims(self, model_n1, model_n2):
        assert model_n1.graded_dims() == {-2: 1, -1: 2, 0: 3, 1: 3, 2: 2, 3: 1}
        assert model_n1.dim == 12
        dims = model_n2.graded_dims()
        assert (dims[-2], dims[-1], dims[0]) == (1, 4, 9)

    def test_parity_split(self, model_n1):
        assert model_n1.even_part().dim == 6
        assert model_n1.odd_part().dim == 6

    def test_filtration(self, model_n1):
        assert model_n1.filtration(-2).dim == 12
        assert model_n1.filtration(0).dim == 9
        assert model_n1.filtration(4).dim == 0
        with pytest.raises(ValueError):
            model_n1.filtration(-3)
        with pytest.raises(ValueError):
            model_n1.graded_component(4)

    def test_filtration_is_bracket_compatible(self, model_n1):
        for i, j in itertools.product(range(-2, 4), repeat=2):
            A, B = model_n1.filtration(i), model_n1.filtration(max(j, -2))
            if A.dim == 0 or B.dim == 0:
                continue
            brackets = model_n1.bracket_batch(A.rows, B.rows).reshape(-1, model_n1.dim)
            target = model_n1.filtration(min(max(i + j, -2), 4))
            assert all(target.member(v) for v in brackets)

    def test_ad_matrix_paths_agree(self, shape_n1):
        fresh = KOModel(shape_n1)
        y = parse_poly(shape_n1, "x1*x2 + x3")
        direct = fresh.ad_matrix(y)
        fresh.structure_constants
        assert np.array_equal(direct, fresh.ad_matrix(y))
        assert fresh.from_coords(direct[:, 0]) == bracket_ko(y, Poly.one(shape_n1))

    def test_degree_components(self, model_n1):
        parts = model_n1.degree_components(parse_poly(model_n1.shape, "1 + x1*x2 + x3"))
        assert sorted(parts) == [-2, 0]
        assert len(parts[0]) == 2

    def test_generator_indices(self, model_n1):
        chosen = model_n1.generator_indices
        assert 0 < len(chosen) < model_n1.dim
        assert lie_closure(model_n1, [model_n1.unit(k) for k in chosen]).dim == model_n1.dim

    def test_cap(self):
        with pytest.raises(CapExceededError):
            KOModel(Shape.contact(2, 3), max_dim=10)

    def test_rejects_non_contact_shape(self):
        with pytest.raises(ValueError):
            KOModel(Shape(n=1, t=(1,), p=3, m=1))


class TestClassification:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_invariant(self, n):
        model = KOModel(Shape.contact(n, 3))
        assert model.classification_invariant() == 2 * n + 1
        assert recover_rank(model.classification_invariant()) == n

    def test_from_table(self, model_n1):
        table = model_n1.structure_constants
        assert classification_from_table(table, model_n1.degrees) == 3
        degrees = model_n1.degrees.copy()
        degrees[model_n1.index[Poly.one(model_n1.shape).monomials()[0]]] = 0
        with pytest.raises(ValueError, match="subalgebra"):
            classification_from_table(table, degrees)

    def test_recover_rank_rejects(self):
        for bad in (1, 4, 0):
            with pytest.raises(ValueError):
                recover_rank(bad)

    def test_payload(self, model_n1):
        payload = structure_constants_payload(model_n1)
        assert payload["schema"] == 1
        assert payload["classification_invariant"] == 3
        assert payload["basis"][0] == "1"
        assert payload == structure_constants_payload(model_n1)
