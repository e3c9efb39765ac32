"""Named identity checks with defects, shared by the verification suites."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from . import arith


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    defect: Any = None
    skipped: str | None = None

    @property
    def passed(self) -> bool:
        return self.skipped is not None or arith.is_zero(self.defect)

    @property
    def status(self) -> str:
        if self.skipped is not None:
            return "skip"
        return "pass" if self.passed else "FAIL"


@dataclass
class PropertyReport:
    title: str
    checks: list[PropertyCheck] = field(default_factory=list)

    def add(self, name: str, defect: Any) -> None:
        self.checks.append(PropertyCheck(name, arith.to_plain(arith.magnitude(defect))))

    def skip(self, name: str, reason: str) -> None:
        self.checks.append(PropertyCheck(name, None, reason))

    def extend(self, other: "PropertyReport") -> None:
        self.checks.extend(other.checks)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[PropertyCheck]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> PropertyCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self) -> list[str]:
        return [c.name for c in self.checks]


def max_defect(*values: Any) -> Any:
    """Largest magnitude among scalars and arrays; exact if all inputs are exact."""
    mags = [arith.magnitude(v) for v in values]
    if not mags:
        return arith.mpq(0)
    return max(mags)
