"""
Report models returned by validators and net-class recognizers
"""

from pydantic import BaseModel
from typing import List, Optional


class ClauseResult(BaseModel):
    clause: str
    passed: bool
    witness: List[str] = []
    detail: str = ""


class ValidationReport(BaseModel):
    """Outcome of an axiom check; violations are data, never exceptions"""
    subject: str
    clauses: List[ClauseResult] = []

    @property
    def valid(self) -> bool:
        return all(result.passed for result in self.clauses)

    @property
    def violations(self) -> List[ClauseResult]:
        return [result for result in self.clauses if not result.passed]

    def check(self, clause: str, passed: bool, witness: Optional[List[str]] = None, detail: str = "") -> bool:
        """Record one clause and return whether it passed"""
        self.clauses.append(ClauseResult(clause=clause, passed=passed, witness=witness or [], detail=detail))
        return passed

    def summary(self) -> str:
        if self.valid:
            return f"{self.subject}: valid"
        failed = ", ".join(
            f"{result.clause}" + (f" [{' '.join(result.witness)}]" if result.witness else "")
            for result in self.violations
        )
        return f"{self.subject}: invalid ({failed})"


class NetClassReport(BaseModel):
    """Ordered clause results of a recognizer; membership iff every clause passes"""
    net_class: str
    clauses: List[ClauseResult] = []

    @property
    def member(self) -> bool:
        return all(result.passed for result in self.clauses)

    @property
    def first_failure(self) -> Optional[ClauseResult]:
        for result in self.clauses:
            if not result.passed:
                return result
        return None

    def check(self, clause: str, passed: bool, witness: Optional[List[str]] = None, detail: str = "") -> bool:
        self.clauses.append(ClauseResult(clause=clause, passed=passed, witness=witness or [], detail=detail))
        return passed

    def extend(self, other: "NetClassReport", prefix: str = "") -> None:
        for result in other.clauses:
            self.clauses.append(result.model_copy(update={"clause": prefix + result.clause}))

    def summary(self) -> str:
        failure = self.first_failure
        if failure is None:
            return f"{self.net_class}: member"
        witness = f" [{' '.join(failure.witness)}]" if failure.witness else ""
        return f"{self.net_class}: not a member, clause '{failure.clause}' fails{witness}"
