"""
Automorphism suite: filtration recovery, irreducibility of KO_-1/KO_0,
invariance under generated automorphisms, rigidity and the
classification invariant.
"""

from typing import Callable, Dict, List

from kolab.automorphisms import (
    check_filtration_invariance,
    check_subspace_invariance,
    classification_under,
    permuted_classification,
    rigidity_report,
)
from kolab.invariants import InvariantReport

from .base_suite import SuiteContext, VerificationSuite, tally_report


class AutomorphismSuite(VerificationSuite):
    """Necessary-condition checks over a seeded family of generated automorphisms."""

    def __init__(self, context: SuiteContext):
        super().__init__(context)
        self.suite_name = "s4"

    def checks(self) -> Dict[str, Callable[[], List[InvariantReport]]]:
        return {
            "classification": self.check_classification,
            "filtration-recovery": self.check_filtration_recovery,
            "filtration-invariance": self.check_filtration_invariance,
            "irreducible": self.check_irreducible,
            "rigidity": self.check_rigidity,
            "subspace-invariance": self.check_subspace_invariance,
        }

    def check_filtration_recovery(self) -> List[InvariantReport]:
        calc = self.context.calculator
        return [calc.filtration_recover(i) for i in range(1, self.context.model.max_degree + 2)]

    def check_irreducible(self) -> List[InvariantReport]:
        return [self.context.calculator.unique_irreducible_check(seed=self.context.seed)]

    def check_filtration_invariance(self) -> List[InvariantReport]:
        model = self.context.model
        maps = self.context.automorphisms
        failures = []
        for phi in maps:
            report = check_filtration_invariance(model, phi, self.context.mode)
            if report.verdict != "match":
                failures.append(f"{phi.provenance}: {', '.join(report.witnesses)}")
        return [
            tally_report(
                "filtration-invariance",
                self.context.mode,
                len(maps),
                failures,
                claim="φ(KO_i) = KO_i for all i (necessary condition over generated automorphisms)",
                seed=self.context.seed,
            )
        ]

    def check_subspace_invariance(self) -> List[InvariantReport]:
        model = self.context.model
        calc = self.context.certified_calculator
        subspaces = {
            "T": calc.T_space,
            "Q": calc.Q_space,
            "M": calc.M_space,
            "KO0": model.filtration(0),
        }
        reports = []
        for name, space in subspaces.items():
            failures = []
            for phi in self.context.automorphisms:
                if check_subspace_invariance(phi, space, name).verdict != "match":
                    failures.append(phi.provenance)
            reports.append(
                tally_report(
                    f"{name}-invariance",
                    "certified",
                    len(self.context.automorphisms),
                    failures,
                    claim=f"φ({name}) = {name} (necessary condition over generated automorphisms)",
                    dim=space.dim,
                )
            )
        return reports

    def check_rigidity(self) -> List[InvariantReport]:
        return [rigidity_report(self.context.model, self.context.automorphisms, self.context.mode)]

    def check_classification(self) -> List[InvariantReport]:
        model = self.context.model
        calc = self.context.calculator
        failures = []
        for phi in self.context.automorphisms:
            if classification_under(model, phi, self.context.mode).verdict != "match":
                failures.append(phi.provenance)
        value = model.classification_invariant()
        if permuted_classification(model, self.context.seed) != value:
            failures.append("basis permutation")
        return [
            calc.classification_invariant(),
            tally_report(
                "classification-invariance",
                self.context.mode,
                len(self.context.automorphisms) + 1,
                failures,
                claim="dim KO/KO_0 = 2n+1 is preserved by automorphisms and basis reordering",
            ),
        ]
