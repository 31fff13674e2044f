import pytest

from kolab.errors import MixedParityError
from kolab.nilpotency import (
    Inconclusive,
    NilPolicy,
    NilpotentStable,
    NotNilpotent,
    find_eigen_witness,
    growth_sequence,
    is_nilpotent,
    nilpotency_index,
    nilpotency_oracle,
    raw_verdict,
    verdict_to_dict,
    verify_verdict,
)
from kolab.superalg import Poly, format_poly, parse_poly


class TestIndex:
    def test_zero(self, shape_n1):
        assert nilpotency_index(Poly.zero(shape_n1), shape_n1) == 1

    def test_quadratic(self, shape_n1):
        assert nilpotency_index(parse_poly(shape_n1, "x1^(2)"), shape_n1) == 2

    def test_bounded_search(self, shape_n1):
        assert nilpotency_index(parse_poly(shape_n1, "x1*x2"), shape_n1, 12) is None

    def test_embeds_into_taller_shape(self, shape_n1):
        taller = shape_n1.with_heights((2,))
        assert nilpotency_index(parse_poly(shape_n1, "x1^(2)"), taller) == 2


class TestOracle:
    def test_zero_element(self, model_n1):
        verdict = nilpotency_oracle(model_n1, Poly.zero(model_n1.shape))
        assert isinstance(verdict, NilpotentStable)
        assert verdict.index == 1
        assert verify_verdict(model_n1, Poly.zero(model_n1.shape), verdict)

    def test_positive_degree_is_structural(self, model_n2):
        y = parse_poly(model_n2.shape, "x1*x3")
        verdict = nilpotency_oracle(model_n2, parse_poly(model_n2.shape, "x1*x5"))
        assert verdict.rule == "structural"
        assert is_nilpotent(verdict)
        assert nilpotency_oracle(model_n2, y).kind == "not-nilpotent"

    def test_stable_index(self, model_n1):
        y = parse_poly(model_n1.shape, "x1^(2)")
        verdict = nilpotency_oracle(model_n1, y)
        assert isinstance(verdict, NilpotentStable)
        assert verdict.rule == "stable-index"
        assert verdict.index == 2
        assert verdict.indices == [2, 2]
        assert verify_verdict(model_n1, y, verdict)

    def test_distinguished_has_unit_eigenvector(self, model_n1):
        y = parse_poly(model_n1.shape, "x3")
        verdict = nilpotency_oracle(model_n1, y)
        assert isinstance(verdict, NotNilpotent)
        assert verdict.rule == "eigen-witness"
        assert format_poly(verdict.witness) == "1"
        assert verdict.eigenvalue == 2
        assert verify_verdict(model_n1, y, verdict)

    def test_torus_element(self, model_n1):
        y = parse_poly(model_n1.shape, "x1*x2")
        verdict = nilpotency_oracle(model_n1, y)
        assert verdict.rule == "eigen-witness"
        assert verify_verdict(model_n1, y, verdict)
        assert find_eigen_witness(model_n1, y) == (verdict.witness, verdict.eigenvalue)
        assert format_poly(verdict.witness) == "x1*x3"
        assert verdict.eigenvalue == 2

    @pytest.mark.parametrize(
        "text, witness",
        [("x2*x4", "x2*x5"), ("x1*x3 + 2*x2*x4", "x1*x5"), ("2*x2*x4", "x2*x5")],
    )
    def test_torus_partner_witness(self, model_n2, text, witness):
        y = parse_poly(model_n2.shape, text)
        z, eigenvalue = find_eigen_witness(model_n2, y)
        assert format_poly(z) == witness
        assert model_n2.bracket(y, z) == z.scale(eigenvalue)
        assert eigenvalue != 0

    def test_minus_one_partner_grows(self, model_n1):
        y = parse_poly(model_n1.shape, "x2")
        verdict = nilpotency_oracle(model_n1, y)
        assert isinstance(verdict, NotNilpotent)
        assert verdict.rule == "growing-index"
        assert verdict.sequence is not None
        assert verdict.sequence.direction == 1
        assert all(verdict.sequence.nonzero)
        assert verify_verdict(model_n1, y, verdict)

    def test_raw_mode_disagrees_on_partner(self, model_n1):
        y = parse_poly(model_n1.shape, "x2")
        assert raw_verdict(model_n1, y).kind == "nilpotent-stable"
        assert raw_verdict(model_n1, parse_poly(model_n1.shape, "x1*x2")).kind == "not-nilpotent"

    def test_single_height_is_inconclusive(self, model_n1):
        policy = NilPolicy(heights=((1,),), max_index=12)
        verdict = nilpotency_oracle(model_n1, parse_poly(model_n1.shape, "x2"), policy)
        assert isinstance(verdict, Inconclusive)
        assert verify_verdict(model_n1, parse_poly(model_n1.shape, "x2"), verdict)

    def test_cap_skips_heights(self, model_n1):
        policy = NilPolicy(heights=((2,), (3,)), max_index=12, max_dim=20)
        verdict = nilpotency_oracle(model_n1, parse_poly(model_n1.shape, "x2"), policy)
        assert isinstance(verdict, Inconclusive)
        assert "cap" in verdict.diagnostic

    def test_errors(self, model_n1):
        with pytest.raises(MixedParityError):
            nilpotency_oracle(model_n1, parse_poly(model_n1.shape, "x1 + x2"))
        with pytest.raises(ValueError):
            nilpotency_oracle(model_n1, Poly.one(model_n1.shape), NilPolicy(heights=(), max_index=4))


class TestGrowthSequence:
    def test_needs_partner_component(self, shape_n1):
        assert growth_sequence(parse_poly(shape_n1, "x1"), shape_n1) is None

    def test_taller_shape(self, shape_n1):
        taller = shape_n1.with_heights((2,))
        sequence = growth_sequence(parse_poly(shape_n1, "x2"), taller)
        assert sequence.ks == list(range(1, 8))
        assert all(sequence.nonzero)
        assert all(c != 0 for c in sequence.leading)


class TestPayload:
    def test_growing_payload(self, model_n1):
        payload = verdict_to_dict(nilpotency_oracle(model_n1, parse_poly(model_n1.shape, "x2")))
        assert payload["kind"] == "not-nilpotent"
        assert payload["rule"] == "growing-index"
        assert payload["heights"] == [[1], [2]]
        assert payload["sequence"]["direction"] == 1

    def test_eigen_payload(self, model_n1):
        payload = verdict_to_dict(nilpotency_oracle(model_n1, parse_poly(model_n1.shape, "x3")))
        assert payload["witness"] == "1"
        assert payload["eigenvalue"] == 2

    def test_inconclusive_payload(self):
        payload = verdict_to_dict(Inconclusive("no data"))
        assert payload == {"kind": "inconclusive", "heights": [], "indices": [], "diagnostic": "no data"}
