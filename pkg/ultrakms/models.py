"""
Pydantic models for reports and parameters.

These models define what the verifiers hand back and what the CLI prints.
Pydantic handles validation of the user-facing parameters (the sec6 family's
d, a, beta, m(w)) so the solvers can assume sane inputs.
"""

from enum import Enum
from fractions import Fraction
from typing import Any, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ultrakms.tools.numbers import Number, format_number, parse_number


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    PASS_AT_DEPTH = "PASS-AT-DEPTH"  # only finitely many F were checked, no tail formula


class CheckResult(BaseModel):
    """
    One verdict line.

    FAIL entries always carry the witness (the set, F or pair that broke the
    condition) so the failure can be reproduced.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    verdict: Verdict
    witness: str = ""
    residual: Optional[str] = None  # formatted number, kept as text for stable output

    @property
    def ok(self) -> bool:
        return self.verdict is not Verdict.FAIL

    def line(self) -> str:
        parts = ["CHECK", self.name, self.verdict.value]
        if self.witness:
            parts.append(self.witness)
        if self.residual is not None:
            parts.append(f"residual={self.residual}")
        return " ".join(parts)


class VerificationReport(BaseModel):
    """
    Verdicts of a verifier run.

    Checks are kept sorted by (name, witness) so two runs over the same input
    render the same text no matter in which order the checks were computed.
    """

    checks: List[CheckResult] = Field(default_factory=list)
    tolerance: float = 0.0
    notes: List[str] = Field(default_factory=list)

    def add(
        self,
        name: str,
        verdict: Verdict,
        witness: str = "",
        residual: Optional[Number] = None,
    ) -> CheckResult:
        result = CheckResult(
            name=name,
            verdict=verdict,
            witness=witness,
            residual=None if residual is None else format_number(residual),
        )
        self.checks.append(result)
        return result

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        self.checks.extend(other.checks)
        self.notes.extend(note for note in other.notes if note not in self.notes)
        self.tolerance = max(self.tolerance, other.tolerance)
        return self

    @property
    def passed(self) -> bool:
        return all(check.ok for check in self.checks)

    def failures(self, name: Optional[str] = None) -> List[CheckResult]:
        return [
            check
            for check in self.sorted_checks()
            if not check.ok and (name is None or check.name == name)
        ]

    def verdict_of(self, name: str) -> Verdict:
        """Worst verdict among checks called `name` (FAIL beats PASS-AT-DEPTH beats PASS)."""
        verdicts = {check.verdict for check in self.checks if check.name == name}
        if not verdicts:
            raise KeyError(name)
        for candidate in (Verdict.FAIL, Verdict.PASS_AT_DEPTH):
            if candidate in verdicts:
                return candidate
        return Verdict.PASS

    def sorted_checks(self) -> List[CheckResult]:
        return sorted(self.checks, key=lambda check: (check.name, check.witness))

    def lines(self) -> List[str]:
        return [check.line() for check in self.sorted_checks()]


class Report(BaseModel):
    """
    What a CLI command prints.

    Info lines come first in the order they were added, then the CHECK lines
    sorted. Exit code 0 iff nothing failed.
    """

    info: List[str] = Field(default_factory=list)
    verification: VerificationReport = Field(default_factory=VerificationReport)

    def say(self, line: str) -> None:
        self.info.append(line)

    @property
    def exit_code(self) -> int:
        return 0 if self.verification.passed else 1

    def render(self) -> str:
        lines = list(self.info)
        lines.extend(f"NOTE {note}" for note in self.verification.notes)
        lines.extend(self.verification.lines())
        return "\n".join(lines) + ("\n" if lines else "")


def _coerce_rational(value: Any) -> Any:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return parse_number(str(value))
    return value


class Sec6Params(BaseModel):
    """
    Parameters of the sec6 family.

    N(e_i) = d for every e_i, N(f_i) = c_i with c_i = a**i unless an explicit
    prefix c_1..c_k is given (the geometric rule takes over after it).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    d: Fraction
    a: Fraction
    beta: Union[Fraction, float] = Fraction(0)
    m_w: Optional[Fraction] = None
    c_prefix: Tuple[Fraction, ...] = ()

    @field_validator("d", "a", "m_w", "beta", mode="before")
    @classmethod
    def _parse_numbers(cls, value: Any) -> Any:
        return _coerce_rational(value)

    @field_validator("c_prefix", mode="before")
    @classmethod
    def _parse_prefix(cls, value: Any) -> Any:
        return tuple(_coerce_rational(item) for item in value)

    @field_validator("d", "a")
    @classmethod
    def _above_one(cls, value: Fraction) -> Fraction:
        if value <= 1:
            raise ValueError("weights must lie in (1, infinity)")
        return value

    @field_validator("c_prefix")
    @classmethod
    def _prefix_above_one(cls, value: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
        if any(item <= 1 for item in value):
            raise ValueError("every c_i must lie in (1, infinity)")
        return value

    @field_validator("beta")
    @classmethod
    def _non_negative(cls, value: Number) -> Number:
        if value < 0:
            raise ValueError("beta must be >= 0")
        return value

    @field_validator("m_w")
    @classmethod
    def _unit_interval(cls, value: Optional[Fraction]) -> Optional[Fraction]:
        if value is not None and not 0 <= value <= 1:
            raise ValueError("m(w) must lie in [0, 1]")
        return value

    def c(self, index: int) -> Fraction:
        """N(f_index)."""
        if index <= len(self.c_prefix):
            return self.c_prefix[index - 1]
        return self.a**index
