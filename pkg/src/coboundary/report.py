"""Check outcomes shared by every verification module."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

from .scalars import CycloRational, Scalar, scalar_to_str

PASS = "pass"
FAIL = "fail"
NOT_DERIVABLE = "not-derivable-at-degree"
STATUSES = (PASS, FAIL, NOT_DERIVABLE)


def combine(statuses: Iterable[str]) -> str:
    """Fail dominates, then not-derivable; an empty collection passes."""
    statuses = list(statuses)
    if FAIL in statuses:
        return FAIL
    if NOT_DERIVABLE in statuses:
        return NOT_DERIVABLE
    return PASS


def jsonable(obj: Any) -> Any:
    """Recursively convert exact values into JSON-friendly data."""
    if isinstance(obj, (Scalar, CycloRational)):
        return scalar_to_str(obj)
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    if type(obj).__name__ == "mpq":
        return scalar_to_str(Scalar.coerce(obj))
    return str(obj)


@dataclass
class CheckReport:
    check: str
    status: str
    params: dict = field(default_factory=dict)
    witness: Any = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        out = {"check": self.check, "status": self.status, "params": jsonable(self.params)}
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        if self.details:
            out["details"] = jsonable(self.details)
        return out
