# common/report.py
from __future__ import annotations
import logging
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger("common.report")

SCHEMA = "globact-report/1"
STATUSES = {"pass", "fail", "undecided", "error"}


class CheckResult(BaseModel):
    """One named check with the evidence that decided it."""
    name: str
    passed: bool
    detail: str = ""
    witness: Dict[str, Any] = Field(default_factory=dict)


class SkippedCheck(BaseModel):
    name: str
    reason: str


class SequenceReport(BaseModel):
    """Composites per arrow and exactness per node, all with witnesses."""
    ring: str
    n: int
    composites: List[CheckResult] = Field(default_factory=list)
    exactness: List[CheckResult] = Field(default_factory=list)
    extras: List[CheckResult] = Field(default_factory=list)
    skipped: List[SkippedCheck] = Field(default_factory=list)
    sizes: Dict[str, int] = Field(default_factory=dict)

    @property
    def checks(self) -> List[CheckResult]:
        return [*self.composites, *self.exactness, *self.extras]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]


class Report(BaseModel):
    schema_: str = Field(default=SCHEMA, alias="schema")
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    status: str = "pass"
    exit_code: int = 0
    payload: Dict[str, Any] = Field(default_factory=dict)
    checks: List[CheckResult] = Field(default_factory=list)
    skipped: List[SkippedCheck] = Field(default_factory=list)
    wall_time: Optional[float] = None

    model_config = {"populate_by_name": True}

    @field_validator("status")
    @classmethod
    def _known_status(cls, v: str) -> str:
        v = (v or "").lower().strip()
        if v not in STATUSES:
            logger.error("unsupported status %r", v)
            raise ValueError(f"unsupported status '{v}'")
        return v

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2, exclude_none=True)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True, exclude_none=True)
