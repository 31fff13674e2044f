"""
Base Verification Suite Interface
"""

import logging
import os
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Optional

import pandas as pd

from kolab.automorphisms import AutoMap, generate_automorphisms
from kolab.invariants import InvariantCalculator, InvariantReport
from kolab.ko import KOModel
from kolab.nilpotency import NilPolicy
from kolab.superalg import Shape
from kolab.witt import WittModel

logger = logging.getLogger(__name__)


@dataclass
class SuiteContext:
    """Shared, lazily built state for one run: model, calculators and automorphisms."""

    shape: Shape
    mode: str = "certified"
    seed: int = 42
    automorphism_count: int = 20
    max_dim: int = 5000
    q_target: str = "T"
    extra: Dict[str, object] = field(default_factory=dict)

    @cached_property
    def model(self) -> KOModel:
        return KOModel(self.shape, max_dim=self.max_dim)

    @cached_property
    def policy(self) -> NilPolicy:
        return NilPolicy.default(self.shape, self.max_dim)

    @cached_property
    def calculator(self) -> InvariantCalculator:
        return InvariantCalculator(self.model, self.mode, self.policy, self.q_target)

    @cached_property
    def certified_calculator(self) -> InvariantCalculator:
        return self.calculator.certified()

    @cached_property
    def automorphisms(self) -> List[AutoMap]:
        return generate_automorphisms(self.model, self.automorphism_count, self.seed)

    @cached_property
    def witt_model(self) -> WittModel:
        return WittModel(self.shape)

    def warm(self) -> None:
        """Build the structure constants once before checks run concurrently."""
        self.model.structure_constants


def tally_report(name: str, mode: str, total: int, failures: List[str], claim: str = "", **details) -> InvariantReport:
    """Report counting how many of total cases held; failures become witnesses."""
    holding = total - len(failures)
    return InvariantReport(
        name=name,
        mode=mode,
        computed=holding,
        expected=total,
        verdict="match" if not failures else "mismatch",
        claim=claim,
        witnesses=failures[:20],
        details=dict(details),
    )


class VerificationSuite(ABC):
    """Abstract base class for verification suites."""

    def __init__(self, context: SuiteContext):
        """Initialize base suite with a suite name."""
        self.context = context
        self.suite_name = "unknown"

    @abstractmethod
    def checks(self) -> Dict[str, Callable[[], List[InvariantReport]]]:
        """
        Checks offered by this suite.

        Returns:
            Mapping from check name to a callable producing its reports
        """
        pass

    def run_check(self, name: str, check: Callable[[], List[InvariantReport]]) -> List[InvariantReport]:
        try:
            return check()
        except Exception as e:
            logger.exception("Check %s.%s raised", self.suite_name, name)
            return [
                InvariantReport(
                    name=name,
                    mode=self.context.mode,
                    computed=0,
                    expected=1,
                    verdict="mismatch",
                    diagnostic=f"{type(e).__name__}: {e}",
                )
            ]

    def run_all(self, workers: int = 1) -> List[InvariantReport]:
        """
        Run every check, in check-name order.

        Args:
            workers: Size of the thread pool; 1 runs checks sequentially

        Returns:
            Reports ordered by check name, independent of completion order
        """
        checks = sorted(self.checks().items())
        total = len(checks)
        self.context.warm()
        if workers <= 1:
            results = []
            for i, (name, check) in enumerate(checks, 1):
                logger.info("Running %s of %s: %s.%s", i, total, self.suite_name, name)
                results.append(self.run_check(name, check))
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [pool.submit(self.run_check, name, check) for name, check in checks]
                results = [future.result() for future in futures]
        reports = []
        for (name, _), batch in zip(checks, results):
            for report in batch:
                report.details.setdefault("suite", self.suite_name)
                report.details.setdefault("check", name)
                reports.append(report)
        return reports


def reports_frame(reports: List[InvariantReport]) -> pd.DataFrame:
    rows = []
    for report in reports:
        rows.append(
            {
                "suite": report.details.get("suite", ""),
                "name": report.name,
                "mode": report.mode,
                "verdict": report.verdict,
                "kind": report.conditional_kind or "",
                "computed_dim": report.computed_dim,
                "expected_dim": report.expected_dim,
                "witnesses": len(report.witnesses),
            }
        )
    return pd.DataFrame(rows, columns=["suite", "name", "mode", "verdict", "kind", "computed_dim", "expected_dim", "witnesses"])


def save_reports(reports: List[InvariantReport], output_csv: str, run: Optional[Dict[str, object]] = None) -> None:
    """
    Save report summaries to CSV.
    If the file exists, append results to it. Otherwise, create a new file.

    Args:
        reports: Reports to save
        output_csv: Output CSV file path
        run: Extra columns identifying the run (p, n, seed, ...)
    """
    if not reports:
        return
    frame = reports_frame(reports)
    for key, value in (run or {}).items():
        frame.insert(0, key, str(value))
    file_exists = os.path.exists(output_csv) and os.path.getsize(output_csv) > 0
    if file_exists:
        existing = pd.read_csv(output_csv, nrows=0)
        frame = frame.reindex(columns=existing.columns)
    frame.to_csv(output_csv, mode="a" if file_exists else "w", header=not file_exists, index=False)
