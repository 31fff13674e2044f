import pytest

from kolab.invariants import InvariantCalculator, InvariantReport, count_report
from kolab.linalg import Subspace
from kolab.superalg import format_poly


class TestReport:
    def _conditional(self, mode, kind):
        return InvariantReport("T", mode, 1, 2, "conditional", conditional_kind=kind)

    def test_auto_policy(self):
        assert self._conditional("raw", "truncation").passed()
        assert not self._conditional("certified", "truncation").passed()
        assert self._conditional("certified", "rank").passed()

    def test_explicit_policies(self):
        report = self._conditional("certified", "truncation")
        assert report.passed("pass")
        assert not report.passed("fail")
        with pytest.raises(ValueError):
            report.passed("sometimes")

    def test_count_report(self):
        assert count_report("c", "raw", 3, 3).verdict == "match"
        report = count_report("c", "raw", 2, 3, claim="x", extra=1)
        assert report.verdict == "mismatch"
        assert report.details == {"extra": 1}
        assert not report.passed()

    def test_to_dict(self):
        payload = self._conditional("raw", "truncation").to_dict()
        assert payload["computed_dim"] == 1
        assert payload["conditional_kind"] == "truncation"
        assert "rerun" not in payload


class TestCalculator:
    def test_rejects_unknown_settings(self, model_n1):
        with pytest.raises(ValueError):
            InvariantCalculator(model_n1, "fuzzy")
        with pytest.raises(ValueError):
            InvariantCalculator(model_n1, q_target="elsewhere")

    def test_patterns(self, certified_n1, certified_n2):
        assert certified_n1.pattern_potentials() == []
        assert [format_poly(a) for a in certified_n2.pattern_potentials()] == ["2*x2*x4 + x1*x3"]

    def test_nil_classify_empty(self, certified_n1, model_n1):
        result = certified_n1.nil_classify(Subspace.zero(3, model_n1.dim))
        assert result.verdicts == []
        assert result.span.dim == 0

    def test_positive_part_is_nilpotent(self, certified_n1, model_n1):
        result = certified_n1.nil_classify(model_n1.filtration(1))
        assert result.span == model_n1.filtration(1)
        assert result.non_nilpotent() == []

    def test_certified_is_shared(self, raw_n1):
        assert raw_n1.certified() is raw_n1.certified()
        assert raw_n1.certified().mode == "certified"


class TestNil0:
    def test_rank_one(self, certified_n1, model_n1):
        nil0 = certified_n1.nil0
        assert nil0.degree_zero.dim == 0
        assert nil0.subspace == certified_n1.even_positive()
        assert nil0.decomposition_ok

    def test_rank_two(self, certified_n2):
        nil0 = certified_n2.nil0
        assert nil0.degree_zero.dim == 3
        assert nil0.decomposition_ok
        assert nil0.sho_ok
        torus = certified_n2.vector(certified_n2.product(1, 3))
        assert not nil0.subspace.member(torus)
        assert not nil0.subspace.member(certified_n2.vector(certified_n2.variable(5)))

    def test_raw_admits_partner(self, raw_n1):
        partner = raw_n1.variable(2)
        assert raw_n1.nil0.subspace.member(raw_n1.vector(partner))
        assert any(format_poly(y) == "x2" for y, _ in raw_n1.nil0.negative_verdicts)


class TestRankOne:
    def test_T(self, certified_n1):
        report = certified_n1.compute_T()
        assert report.verdict == "match"
        assert report.computed_dim == 5
        assert report.details["excluded"] == {"x2": True}

    def test_rank_sensitive_reports_pass(self, certified_n1):
        for report in (certified_n1.compute_Q(), certified_n1.compute_M(), certified_n1.composite_report()):
            assert report.passed()
            if report.verdict == "conditional":
                assert report.conditional_kind == "rank"

    def test_irreducible_is_rank_conditional(self, certified_n1):
        report = certified_n1.unique_irreducible_check()
        assert report.verdict == "conditional"
        assert report.conditional_kind == "rank"
        assert report.passed()

    def test_raw_T_is_truncation_conditional(self, raw_n1):
        report = raw_n1.compute_T()
        assert report.verdict == "conditional"
        assert report.conditional_kind == "truncation"
        assert report.rerun.verdict == "match"
        assert report.passed()
        assert not report.passed("fail")
        assert any("x2" in w for w in report.witnesses)


class TestRankTwo:
    def test_T(self, certified_n2):
        report = certified_n2.compute_T()
        assert report.verdict == "match"
        assert report.details["excluded"] == {"x3": True, "x4": True}

    def test_Q(self, certified_n2):
        report = certified_n2.compute_Q()
        assert report.verdict == "match"
        assert report.details["one_excluded"]
        assert all(report.details["memberships"].values())

    def test_M(self, certified_n2):
        report = certified_n2.compute_M()
        assert report.verdict == "match"
        assert all(report.details["excluded"].values())

    def test_composite(self, certified_n2, model_n2):
        report = certified_n2.composite_report()
        assert report.verdict == "match"
        assert report.computed == model_n2.filtration(0)

    def test_irreducible(self, certified_n2):
        report = certified_n2.unique_irreducible_check()
        assert report.verdict == "match"
        assert report.details["exhaustive"]
        assert report.computed == (3 ** 5 - 1) // 2


class TestFiltrationAndClassification:
    def test_recovery_below_ceiling(self, certified_n1, model_n1):
        for i in range(1, model_n1.max_degree):
            assert certified_n1.filtration_recover(i).verdict == "match"

    def test_recovery_at_ceiling_never_mismatches(self, certified_n1, model_n1):
        for i in (model_n1.max_degree, model_n1.max_degree + 1):
            assert certified_n1.filtration_recover(i).verdict in ("match", "conditional")

    def test_recovery_range(self, certified_n1, model_n1):
        with pytest.raises(ValueError):
            certified_n1.filtration_recover(0)
        with pytest.raises(ValueError):
            certified_n1.filtration_recover(model_n1.max_degree + 2)

    def test_classification(self, certified_n2):
        report = certified_n2.classification_invariant()
        assert report.verdict == "match"
        assert report.computed == 5
        assert report.details["recovered_n"] == 2
