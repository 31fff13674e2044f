"""Verification suites module."""

from .base_suite import SuiteContext, VerificationSuite, reports_frame, save_reports, tally_report
from .s1_structure import StructureSuite
from .s2_nilpotency import NilpotencySuite
from .s3_invariants import InvariantSubspaceSuite
from .s4_automorphisms import AutomorphismSuite
from .suite_factory import SuiteFactory

__all__ = [
    'SuiteContext',
    'VerificationSuite',
    'StructureSuite',
    'NilpotencySuite',
    'InvariantSubspaceSuite',
    'AutomorphismSuite',
    'SuiteFactory',
    'reports_frame',
    'save_reports',
    'tally_report',
]
