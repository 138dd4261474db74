"""Pass/fail reports for axiom and identity verification."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    checked: int = 1
    witness: str | None = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "passed": self.passed, "checked": self.checked}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class VerificationReport:
    """Aggregated result of a family of exact checks.

    Failures carry a human-readable witness (the offending instance and the
    two unequal values); they are report contents, never exceptions.
    """

    title: str
    checks: list[Check] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, checked: int = 1, witness: str | None = None):
        self.checks.append(Check(name, passed, checked, witness))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def merge(self, other: "VerificationReport"):
        self.checks.extend(other.checks)
        for k, v in other.notes.items():
            self.notes.setdefault(k, v)

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "passed": self.ok,
            "checks": [c.to_dict() for c in self.checks],
            "notes": {k: self.notes[k] for k in sorted(self.notes)},
        }

    def summary_lines(self) -> list[str]:
        lines = [f"== {self.title}: {'PASS' if self.ok else 'FAIL'} =="]
        for c in self.checks:
            mark = "ok  " if c.passed else "FAIL"
            lines.append(f"  [{mark}] {c.name} ({c.checked} checked)")
            if c.witness and not c.passed:
                lines.append(f"         witness: {c.witness}")
        for k in sorted(self.notes):
            lines.append(f"  note: {k} = {self.notes[k]}")
        return lines
