"""
Invariant subspace suite: T, Q and M, and KO_0 rebuilt from them.
"""

from typing import Callable, Dict, List

from kolab.invariants import InvariantReport

from .base_suite import SuiteContext, VerificationSuite


class InvariantSubspaceSuite(VerificationSuite):
    """Runs in the context's mode; raw-mode deviations carry a certified rerun."""

    def __init__(self, context: SuiteContext):
        super().__init__(context)
        self.suite_name = "s3"

    def checks(self) -> Dict[str, Callable[[], List[InvariantReport]]]:
        calc = self.context.calculator
        return {
            "T": lambda: [calc.compute_T()],
            "Q": lambda: [calc.compute_Q()],
            "M": lambda: [calc.compute_M()],
            "KO0": lambda: [calc.composite_report()],
        }
