"""
Nilpotency suite: ad-nilpotent elements, certified verdicts and the
decomposition of Nil of the even part.
"""

import itertools
from typing import Callable, Dict, List

import numpy as np

from kolab.invariants import InvariantReport
from kolab.linalg import TriangulationFailure, strict_triangulation, verify_flag
from kolab.nilpotency import find_eigen_witness, growth_sequence, is_nilpotent, nilpotency_oracle, raw_verdict, verify_verdict
from kolab.superalg import Poly, format_poly
from kolab.witt import SuperDerivation, T_H

from .base_suite import SuiteContext, VerificationSuite, tally_report


class NilpotencySuite(VerificationSuite):
    """Checks ad-nilpotency claims with certificates that survive every truncation height."""

    def __init__(self, context: SuiteContext):
        super().__init__(context)
        self.suite_name = "s2"

    def checks(self) -> Dict[str, Callable[[], List[InvariantReport]]]:
        return {
            "hamiltonian-power": self.check_hamiltonian_power,
            "witt-triangulation": self.check_witt_triangulation,
            "positive-filtration": self.check_positive_filtration,
            "degree-zero-verdicts": self.check_degree_zero_verdicts,
            "minus-one-growth": self.check_minus_one_growth,
            "nil0-decomposition": self.check_nil0_decomposition,
        }

    def _quadratic_pairs(self) -> List[tuple]:
        """Index pairs i ≤ j with j ≠ i′ and x_i x_j ≠ 0."""
        calc = self.context.calculator
        n = calc.n
        pairs = []
        for i, j in itertools.combinations_with_replacement(range(1, 2 * n + 1), 2):
            if j == calc.primed(i) or (i == j and i > n):
                continue
            pairs.append((i, j))
        return pairs

    def check_hamiltonian_power(self) -> List[InvariantReport]:
        model = self.context.model
        calc = self.context.calculator
        p = model.p
        failures = []
        pairs = self._quadratic_pairs()
        for i, j in pairs:
            op = T_H(calc.product(i, j))
            for f in model.potentials():
                g = f
                for _ in range(2 * p):
                    g = op.apply(g)
                    if not g:
                        break
                if g:
                    failures.append(f"T_H(x{i}*x{j})^{2 * p} on {format_poly(f)}")
                    break
        return [
            tally_report(
                "hamiltonian-power",
                self.context.mode,
                len(pairs),
                failures,
                claim="T_H(x_i x_j)^{2p} = 0 for j ≠ i′",
            )
        ]

    def check_witt_triangulation(self) -> List[InvariantReport]:
        """ad x_z∂_i on W is strictly triangulable; ad of x_1 x_{1′} in KO is not."""
        witt = self.context.witt_model
        shape = witt.shape
        z = shape.distinguished
        xz = Poly.variable(shape, z)
        derivations = [SuperDerivation.term(xz, i) for i in range(1, 2 * shape.n + 1)]
        ops = [witt.ad_matrix(D) for D in derivations]
        flag = strict_triangulation(ops, witt.p, witt.dim, [D.parity() for D in derivations])
        failures = []
        if isinstance(flag, TriangulationFailure):
            failures.append(f"no flag: {flag.reason}")
        elif not verify_flag(flag, ops, witt.p):
            failures.append("flag does not satisfy x(V_i) ⊆ V_(i-1)")

        model = self.context.model
        calc = self.context.calculator
        control = [model.ad_matrix(calc.product(1, calc.primed(1)))]
        negative = strict_triangulation(control, model.p, model.dim)
        if not isinstance(negative, TriangulationFailure) or negative.offender != 0:
            failures.append("ad x1*x1' was triangulated")
        return [
            tally_report(
                "witt-triangulation",
                self.context.mode,
                2,
                failures,
                claim="span{x_z ∂_i} acts strictly triangularly on W; a non-nilpotent operator is reported",
                flag_length=getattr(flag, "length", None),
            )
        ]

    def check_positive_filtration(self) -> List[InvariantReport]:
        model = self.context.model
        calc = self.context.certified_calculator
        classification = calc.nil_classify(model.filtration(1))
        failures = [format_poly(y) for y, v in classification.verdicts if not is_nilpotent(v)]
        return [
            tally_report(
                "positive-filtration",
                "certified",
                len(classification.verdicts),
                failures,
                claim="KO_1 ⊆ nil(KO)",
            )
        ]

    def check_degree_zero_verdicts(self) -> List[InvariantReport]:
        model = self.context.model
        calc = self.context.certified_calculator
        p = model.p
        n = calc.n
        failures = []
        total = 0

        for i, j in self._quadratic_pairs():
            total += 1
            y = calc.product(i, j)
            verdict = calc.verdict(y)
            if not is_nilpotent(verdict) or verdict.index > 2 * p:
                failures.append(f"x{i}*x{j}: {verdict.kind}")

        non_nilpotent = [calc.product(i, calc.primed(i)) for i in range(1, n + 1)] + [calc.variable(calc.z)]
        rng = np.random.default_rng(self.context.seed)
        coeffs = [int(c) for c in rng.integers(1, p, size=n)]
        combo = Poly.zero(model.shape)
        for i, c in enumerate(coeffs, 1):
            combo = combo + calc.product(i, calc.primed(i)).scale(c)
        non_nilpotent.append(combo)
        for y in non_nilpotent:
            total += 1
            verdict = calc.verdict(y)
            if verdict.kind != "not-nilpotent" or not verify_verdict(model, y, verdict):
                failures.append(f"{format_poly(y)}: {verdict.kind}")

        nil0 = calc.nil0.subspace
        for a in calc.pattern_potentials():
            total += 1
            if not nil0.member(calc.vector(a)):
                failures.append(f"{format_poly(a)} not in Nil0")
        for y in non_nilpotent[:-1]:
            total += 1
            if nil0.member(calc.vector(y)):
                failures.append(f"{format_poly(y)} in Nil0")
        return [
            tally_report(
                "degree-zero-verdicts",
                "certified",
                total,
                failures,
                claim="x_i x_j (j ≠ i′) is ad-nilpotent; x_i x_i′, x_z and their combinations are not",
            )
        ]

    def check_minus_one_growth(self) -> List[InvariantReport]:
        model = self.context.model
        calc = self.context.certified_calculator
        failures = []
        y = calc.variable(calc.primed(1))
        verdict = nilpotency_oracle(model, y, calc.policy)
        if verdict.kind != "not-nilpotent" or not verify_verdict(model, y, verdict):
            failures.append(f"x{calc.primed(1)}: {verdict.kind}")
        sequence = growth_sequence(y, model.shape)
        if sequence is not None and not all(sequence.nonzero):
            failures.append(f"growth sequence vanishes: {sequence.nonzero}")
        truncated = raw_verdict(model, y).kind
        witness = find_eigen_witness(model, calc.variable(calc.z))
        if witness is None:
            failures.append(f"no eigen-witness for x{calc.z}")
        return [
            tally_report(
                "minus-one-growth",
                "certified",
                3,
                failures,
                claim="ad x_{j′} is not nilpotent on the untruncated algebra",
                rule=getattr(verdict, "rule", None),
                indices=list(verdict.indices),
                truncated=truncated,
            )
        ]

    def check_nil0_decomposition(self) -> List[InvariantReport]:
        calc = self.context.certified_calculator
        result = calc.nil0
        failures = []
        if not result.decomposition_ok:
            failures.append("Nil0 ≠ Nil(KO_[0] ∩ even) + KO_1 ∩ even")
        if not result.sho_ok:
            failures.append("degree-0 part of Nil0 leaves SHO'")
        return [
            tally_report(
                "nil0-decomposition",
                "certified",
                2,
                failures,
                claim="Nil(even) = Nil(KO_[0] ∩ even) + KO_1 ∩ even, degree-0 part inside SHO'",
                nil0_dim=result.subspace.dim,
                degree_zero_dim=result.degree_zero.dim,
            )
        ]
