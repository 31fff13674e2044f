"""
Automorphism-invariant subspaces of KO(n,n+1) and the reports built on them.

Every computation runs in one of two modes. Raw mode trusts
truncated-matrix nilpotency; certified mode goes through the
nilpotency oracle. Reports compare a computed object with its expected
value and carry a verdict of match, mismatch or conditional.
"""

import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from .ko import KOModel, Potential, recover_rank
from .linalg import QuotientAction, Subspace, lie_closure, normalizer
from .nilpotency import Inconclusive, NilPolicy, NilVerdict, is_nilpotent, nilpotency_oracle, raw_verdict
from .superalg import Poly, derive, format_poly, multiply
from .witt import in_SHO_prime

logger = logging.getLogger(__name__)

MODES = ("raw", "certified")
Q_TARGETS = ("T", "filtration")
CONDITIONAL_POLICIES = ("auto", "pass", "fail")


@dataclass
class InvariantReport:
    """
    Outcome of one invariant check.

    relation is "equal" when computed must coincide with expected, and
    "contained" when computed only has to lie inside it.
    """

    name: str
    mode: str
    computed: Union[Subspace, int]
    expected: Union[Subspace, int]
    verdict: str
    claim: str = ""
    relation: str = "equal"
    diagnostic: str = ""
    conditional_kind: Optional[str] = None
    witnesses: List[str] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)
    rerun: Optional["InvariantReport"] = None

    @property
    def computed_dim(self) -> int:
        return self.computed.dim if isinstance(self.computed, Subspace) else int(self.computed)

    @property
    def expected_dim(self) -> int:
        return self.expected.dim if isinstance(self.expected, Subspace) else int(self.expected)

    def passed(self, conditional_policy: str = "auto") -> bool:
        """
        Whether the report counts as a pass.

        Under "auto", rank conditionals pass everywhere and truncation
        conditionals pass only in raw mode.
        """
        if conditional_policy not in CONDITIONAL_POLICIES:
            raise ValueError(f"Unknown conditional policy: {conditional_policy}")
        if self.verdict == "match":
            return True
        if self.verdict == "mismatch":
            return False
        if conditional_policy == "pass":
            return True
        if conditional_policy == "fail":
            return False
        return self.conditional_kind == "rank" or self.mode == "raw"

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "name": self.name,
            "mode": self.mode,
            "computed_dim": self.computed_dim,
            "expected_dim": self.expected_dim,
            "verdict": self.verdict,
            "relation": self.relation,
            "claim": self.claim,
            "witnesses": list(self.witnesses),
        }
        if self.verdict == "conditional":
            payload["conditional_kind"] = self.conditional_kind
            payload["diagnostic"] = self.diagnostic
        if self.details:
            payload["details"] = self.details
        if self.rerun is not None:
            payload["rerun"] = self.rerun.to_dict()
        return payload


def count_report(name: str, mode: str, computed: int, expected: int, claim: str = "", **details) -> InvariantReport:
    verdict = "match" if computed == expected else "mismatch"
    return InvariantReport(name, mode, computed, expected, verdict, claim=claim, details=dict(details))


@dataclass
class NilClassification:
    verdicts: List[Tuple[Potential, NilVerdict]]
    span: Subspace
    patterns: List[Tuple[Potential, NilVerdict]] = field(default_factory=list)

    def nilpotent(self) -> List[Potential]:
        return [y for y, v in self.verdicts + self.patterns if is_nilpotent(v)]

    def non_nilpotent(self) -> List[Potential]:
        return [y for y, v in self.verdicts + self.patterns if v.kind == "not-nilpotent"]


@dataclass
class Nil0Result:
    """Nil of the even part together with the checks of its degree decomposition."""

    subspace: Subspace
    generators: Subspace
    degree_zero: Subspace
    classification: NilClassification
    decomposition_ok: bool
    sho_ok: bool
    negative_verdicts: List[Tuple[Potential, NilVerdict]] = field(default_factory=list)


class InvariantCalculator:
    """
    Invariant subspaces of one truncated KO model.

    Args:
        model: The truncated model
        mode: "raw" or "certified"
        policy: Heights and index bound for the nilpotency oracle
        q_target: "T" reads the target of Q as the computed normalizer,
            "filtration" as KO_0 ∩ even

    Raises:
        ValueError: On an unknown mode or Q target
    """

    def __init__(
        self,
        model: KOModel,
        mode: str = "certified",
        policy: Optional[NilPolicy] = None,
        q_target: str = "T",
    ):
        if mode not in MODES:
            raise ValueError(f"Unknown mode: {mode}. Supported modes: {', '.join(MODES)}")
        if q_target not in Q_TARGETS:
            raise ValueError(f"Unknown Q target: {q_target}. Supported targets: {', '.join(Q_TARGETS)}")
        self.model = model
        self.shape = model.shape
        self.n = model.shape.n
        self.p = model.p
        self.mode = mode
        self.policy = policy or NilPolicy.default(model.shape)
        self.q_target = q_target
        self._verdicts: Dict[Potential, NilVerdict] = {}
        self._certified: Optional["InvariantCalculator"] = None

    def certified(self) -> "InvariantCalculator":
        """Certified-mode calculator over the same model."""
        if self.mode == "certified":
            return self
        if self._certified is None:
            self._certified = InvariantCalculator(self.model, "certified", self.policy, self.q_target)
        return self._certified

    # potentials

    def variable(self, i: int) -> Potential:
        return Poly.variable(self.shape, i)

    def product(self, *indices: int) -> Potential:
        """x_{i1} x_{i2} ... as a potential; repeated even indices give divided powers."""
        result = Poly.one(self.shape)
        for i in indices:
            result = multiply(result, self.variable(i))
        return result

    def primed(self, i: int) -> int:
        return i + self.n if i <= self.n else i - self.n

    @property
    def z(self) -> int:
        return 2 * self.n + 1

    def vector(self, a: Potential) -> np.ndarray:
        return self.model.coords(a)

    def span(self, potentials: List[Potential]) -> Subspace:
        return Subspace.from_vectors([self.vector(a) for a in potentials], self.p, self.model.dim)

    def describe(self, subspace: Subspace) -> List[str]:
        return [format_poly(self.model.from_coords(row)) for row in subspace.rows]

    # nilpotency

    def verdict(self, y: Potential) -> NilVerdict:
        if y not in self._verdicts:
            if y.parity() is None:
                self._verdicts[y] = Inconclusive("element is not Z_2-homogeneous")
            elif self.mode == "raw":
                self._verdicts[y] = raw_verdict(self.model, y)
            else:
                self._verdicts[y] = nilpotency_oracle(self.model, y, self.policy)
        return self._verdicts[y]

    def pattern_potentials(self) -> List[Potential]:
        """x_i x_{i′} − x_j x_{j′} for i < j ≤ n."""
        diagonal = [self.product(i, self.primed(i)) for i in range(1, self.n + 1)]
        return [a - b for a, b in itertools.combinations(diagonal, 2)]

    def nil_classify(self, R: Subspace) -> NilClassification:
        """
        Verdicts for a basis of R plus the pattern combinations lying in R.

        span is the echelon span of the elements certified nilpotent.
        """
        verdicts = []
        for row in R.rows:
            y = self.model.from_coords(row)
            verdicts.append((y, self.verdict(y)))
        patterns = []
        for a in self.pattern_potentials():
            if R.dim and R.member(self.vector(a)):
                patterns.append((a, self.verdict(a)))
        nilpotent = [self.vector(y) for y, v in verdicts + patterns if is_nilpotent(v)]
        span = Subspace.from_vectors(nilpotent, self.p, self.model.dim)
        logger.debug(
            "Classified %s elements in %s mode: %s nilpotent", len(verdicts) + len(patterns), self.mode, span.dim
        )
        return NilClassification(verdicts=verdicts, span=span, patterns=patterns)

    def even_degree_zero(self) -> Subspace:
        return self.model.graded_subspace(0).intersect(self.model.even_part())

    def even_positive(self) -> Subspace:
        return self.model.filtration(1).intersect(self.model.even_part())

    @cached_property
    def nil0(self) -> Nil0Result:
        """
        Nil of the even part of the model.

        Certified mode closes the certified-nilpotent elements of degree 0
        together with all of KO_1 ∩ even. Raw mode additionally admits
        negative-degree even elements whose truncated matrix is nilpotent.
        """
        model = self.model
        even = model.even_part()
        classification = self.nil_classify(self.even_degree_zero())
        degree_zero = lie_closure(model, classification.span.rows)
        positive = self.even_positive()
        generators = classification.span.sum(positive)

        negative_verdicts = []
        if self.mode == "raw":
            negative = model.span_of_indices(np.nonzero((model.degrees < 0) & (model.parities == 0))[0])
            for row in negative.rows:
                y = model.from_coords(row)
                negative_verdicts.append((y, self.verdict(y)))
            extra = [self.vector(y) for y, v in negative_verdicts if is_nilpotent(v)]
            generators = generators.sum(Subspace.from_vectors(extra, self.p, model.dim))

        subspace = lie_closure(model, generators.rows).intersect(even)
        decomposition_ok = subspace == degree_zero.sum(positive)
        sho_ok = True
        for row in degree_zero.rows:
            a = model.from_coords(row)
            if derive(self.z, a) or not in_SHO_prime(a):
                sho_ok = False
                break
        logger.info("Nil0 (%s): dimension %s, decomposition %s", self.mode, subspace.dim, decomposition_ok)
        return Nil0Result(
            subspace=subspace,
            generators=generators,
            degree_zero=degree_zero,
            classification=classification,
            decomposition_ok=decomposition_ok,
            sho_ok=sho_ok,
            negative_verdicts=negative_verdicts,
        )

    def compute_nil0(self) -> Nil0Result:
        return self.nil0

    # invariant subspaces

    @cached_property
    def T_space(self) -> Subspace:
        even = self.model.even_part()
        return normalizer(self.model, even, self.nil0.subspace)

    @cached_property
    def Q_space(self) -> Subspace:
        odd = self.model.odd_part()
        if self.q_target == "T":
            target = self.T_space
        else:
            target = self.model.filtration(0).intersect(self.model.even_part())
        return normalizer(self.model, odd, odd, target=target)

    @cached_property
    def M_space(self) -> Subspace:
        return normalizer(self.model, self.model.odd_part(), self.Q_space, target=self.nil0.subspace)

    def _compare(
        self,
        name: str,
        computed: Subspace,
        expected: Subspace,
        claim: str,
        relation: str = "equal",
        failures: Optional[List[str]] = None,
        details: Optional[Dict[str, Any]] = None,
        rerun: Optional[Callable[[], InvariantReport]] = None,
        boundary: bool = False,
        rank_sensitive: bool = False,
    ) -> InvariantReport:
        failures = failures or []
        if relation == "equal":
            holds = computed == expected
        else:
            holds = expected.contains(computed)
        holds = holds and not failures
        report = InvariantReport(
            name=name,
            mode=self.mode,
            computed=computed,
            expected=expected,
            verdict="match",
            claim=claim,
            relation=relation,
            details=details or {},
        )
        if holds:
            return report

        extra = ["extra: " + s for s in self.describe(computed.residue_basis(expected))]
        missing = [] if relation == "contained" else ["missing: " + s for s in self.describe(expected.residue_basis(computed))]
        report.witnesses = extra + missing + failures
        if self.mode == "raw" and rerun is not None:
            report.verdict = "conditional"
            report.conditional_kind = "truncation"
            report.diagnostic = "raw nil set admits elements nilpotent only in the truncation"
            report.rerun = rerun()
        elif boundary:
            report.verdict = "conditional"
            report.conditional_kind = "truncation"
            report.diagnostic = "deviation at the truncation ceiling"
        elif rank_sensitive and self.n < 2:
            report.verdict = "conditional"
            report.conditional_kind = "rank"
            report.diagnostic = f"statement needs n ≥ 2, model has n = {self.n}"
        else:
            report.verdict = "mismatch"
            report.diagnostic = f"{name}: computed dim {computed.dim}, expected dim {expected.dim}"
        if report.verdict != "match":
            logger.warning("%s (%s): %s, %s", name, self.mode, report.verdict, report.diagnostic)
        return report

    def compute_T(self) -> InvariantReport:
        """T = Nor_even(Nil0) against KO_0 ∩ even."""
        model = self.model
        even_zero = model.filtration(0).intersect(model.even_part())
        nil0 = self.nil0.subspace
        stable = normalizer(model, even_zero, nil0) == even_zero
        details = {
            "nil0_dim": nil0.dim,
            "even_zero_normalizes_nil0": stable,
            "decomposition_ok": self.nil0.decomposition_ok,
            "sho_ok": self.nil0.sho_ok,
            "excluded": {
                format_poly(y): not self.T_space.member(self.vector(y))
                for y in (self.variable(self.primed(i)) for i in range(1, self.n + 1))
            },
        }
        failures = [] if stable else ["[KO_0 ∩ even, Nil0] is not contained in Nil0"]
        return self._compare(
            "T",
            self.T_space,
            even_zero,
            claim="Nor_even(Nil(even)) = KO_0 ∩ even",
            failures=failures,
            details=details,
            rerun=lambda: self.certified().compute_T(),
        )

    def q_bound(self) -> Subspace:
        """span{x_i x_j : i ≤ j ≤ n} + KO_1 ∩ odd."""
        quadratic = [self.product(i, j) for i in range(1, self.n + 1) for j in range(i, self.n + 1)]
        odd_positive = self.model.filtration(1).intersect(self.model.odd_part())
        return self.span(quadratic).sum(odd_positive)

    def q_members(self) -> List[Potential]:
        members = [self.product(i, self.primed(i), self.z) for i in range(1, self.n + 1)]
        for i in range(1, self.n + 1):
            for j in range(1, self.n + 1):
                if i != j:
                    members.append(self.product(self.primed(i), j, self.primed(j)))
        return members

    def compute_Q(self) -> InvariantReport:
        """Q = {y ∈ odd : [y, odd] ⊆ target}, checked for containment in the quadratic bound."""
        Q = self.Q_space
        failures = []
        memberships = {}
        for a in self.q_members():
            inside = Q.member(self.vector(a))
            memberships[format_poly(a)] = inside
            if not inside:
                failures.append(f"not in Q: {format_poly(a)}")
        one = Poly.one(self.shape)
        one_excluded = not Q.member(self.vector(one))
        if not one_excluded:
            failures.append("in Q: 1")
        details = {"q_target": self.q_target, "memberships": memberships, "one_excluded": one_excluded}
        return self._compare(
            "Q",
            Q,
            self.q_bound(),
            claim="Q ⊆ span{x_i x_j : i ≤ j ≤ n} + KO_1 ∩ odd",
            relation="contained",
            failures=failures,
            details=details,
            rerun=lambda: self.certified().compute_Q(),
            rank_sensitive=True,
        )

    def compute_M(self) -> InvariantReport:
        """M = {y ∈ odd : [y, Q] ⊆ Nil0} against KO_0 ∩ odd."""
        model = self.model
        M = self.M_space
        odd_zero = model.filtration(0).intersect(model.odd_part())
        excluded = {"1": not M.member(self.vector(Poly.one(self.shape)))}
        for j in range(1, self.n + 1):
            excluded[format_poly(self.variable(j))] = not M.member(self.vector(self.variable(j)))
        failures = [f"in M: {name}" for name, ok in excluded.items() if not ok]
        return self._compare(
            "M",
            M,
            odd_zero,
            claim="{y ∈ odd : [y, Q] ⊆ Nil(even)} = KO_0 ∩ odd",
            failures=failures,
            details={"excluded": excluded, "contains_odd_zero": M.contains(odd_zero)},
            rerun=lambda: self.certified().compute_M(),
            rank_sensitive=True,
        )

    def composite_report(self) -> InvariantReport:
        """T + M recovers KO_0."""
        return self._compare(
            "KO0",
            self.T_space.sum(self.M_space),
            self.model.filtration(0),
            claim="T + M = KO_0",
            rerun=lambda: self.certified().composite_report(),
            rank_sensitive=True,
        )

    def filtration_recover(self, i: int) -> InvariantReport:
        """
        {y ∈ KO_{i−1} : [y, KO_{−1}] ⊆ KO_{i−1}} against KO_i.

        Raises:
            ValueError: If i is outside 1..max_degree+1
        """
        model = self.model
        if not 1 <= i <= model.max_degree + 1:
            raise ValueError(f"filtration index {i} outside 1..{model.max_degree + 1}")
        previous = model.filtration(i - 1)
        recovered = normalizer(model, previous, model.filtration(-1), target=previous)
        return self._compare(
            f"filtration-{i}",
            recovered,
            model.filtration(i),
            claim=f"KO_{i} = {{y ∈ KO_{i - 1} : [y, KO_-1] ⊆ KO_{i - 1}}}",
            boundary=i >= model.max_degree,
        )

    def _quotient_points(self, action: QuotientAction, seed: int, samples: int) -> List[np.ndarray]:
        size = action.quotient_dim
        if self.p <= 5 and self.n <= 2:
            points = []
            for lead in range(size):
                for tail in itertools.product(range(self.p), repeat=size - lead - 1):
                    v = np.zeros(size, dtype=np.int64)
                    v[lead] = 1
                    v[lead + 1 :] = tail
                    points.append(v)
            return points
        rng = np.random.default_rng(seed)
        points = []
        while len(points) < samples:
            v = rng.integers(0, self.p, size=size)
            if v.any():
                points.append(v.astype(np.int64))
        return points

    def unique_irreducible_check(self, seed: int = 0, samples: int = 50) -> InvariantReport:
        """
        Spin every projective point of KO/KO_0 under KO_0.

        Points inside KO_{−1}/KO_0 must spin to exactly that subspace and
        every other point must fill the quotient.
        """
        model = self.model
        base = model.filtration(0)
        action = QuotientAction(model, base, base)
        minus_one = Subspace.from_vectors(
            [action.project(row) for row in model.filtration(-1).rows], self.p, action.quotient_dim
        )
        full = Subspace.full(self.p, action.quotient_dim)
        points = self._quotient_points(action, seed, samples)
        failures = []
        for v in points:
            expected = minus_one if minus_one.member(v) else full
            spun = action.spin_quotient(v)
            if spun != expected:
                lifted = model.from_coords(action.lift(v[None, :])[0])
                failures.append(f"{format_poly(lifted)} spins to dim {spun.dim}, expected {expected.dim}")
        computed = len(points) - len(failures)
        report = InvariantReport(
            name="irreducible",
            mode=self.mode,
            computed=computed,
            expected=len(points),
            verdict="match",
            claim="KO_-1/KO_0 is the unique irreducible KO_0-submodule of KO/KO_0",
            details={"points": len(points), "exhaustive": self.p <= 5 and self.n <= 2},
        )
        if failures:
            report.witnesses = failures[:20]
            if self.n < 2:
                report.verdict = "conditional"
                report.conditional_kind = "rank"
                report.diagnostic = f"KO_-1/KO_0 is reducible at n = {self.n}"
            else:
                report.verdict = "mismatch"
                report.diagnostic = f"{len(failures)} of {len(points)} points spin unexpectedly"
        return report

    def classification_invariant(self) -> InvariantReport:
        value = self.model.classification_invariant()
        return count_report(
            "classification",
            self.mode,
            value,
            2 * self.n + 1,
            claim="dim KO_[-2] + dim KO_[-1] = 2n+1",
            recovered_n=recover_rank(value),
        )
