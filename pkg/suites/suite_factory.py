"""
Suite Factory
Creates verification suite instances based on the suite name.
"""

from typing import List

from .base_suite import SuiteContext, VerificationSuite
from .s1_structure import StructureSuite
from .s2_nilpotency import NilpotencySuite
from .s3_invariants import InvariantSubspaceSuite
from .s4_automorphisms import AutomorphismSuite

SUITES = {
    "s1": StructureSuite,
    "s2": NilpotencySuite,
    "s3": InvariantSubspaceSuite,
    "s4": AutomorphismSuite,
}


class SuiteFactory:
    """Factory for creating verification suite instances."""

    @staticmethod
    def create_suite(suite: str, context: SuiteContext) -> VerificationSuite:
        """
        Create a verification suite instance.

        Args:
            suite: Suite name ('s1', 's2', 's3', 's4')
            context: Shared run context

        Returns:
            VerificationSuite instance

        Raises:
            ValueError: If suite is not supported
        """
        suite = suite.lower()
        if suite not in SUITES:
            raise ValueError(f"Unknown suite: {suite}. Supported suites: s1, s2, s3, s4, all")
        return SUITES[suite](context)

    @staticmethod
    def create_suites(suite: str, context: SuiteContext) -> List[VerificationSuite]:
        """Expand 'all' into every suite, in order."""
        if suite.lower() == "all":
            return [SuiteFactory.create_suite(name, context) for name in SUITES]
        return [SuiteFactory.create_suite(suite, context)]
