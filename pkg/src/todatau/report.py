"""Pass/fail reports returned by the verification routines."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    findings: list = field(default_factory=list)

    def add(self, name: str, passed: bool, detail: str = "") -> bool:
        self.checks.append(Check(name, bool(passed), detail))
        return bool(passed)

    def note(self, text: str):
        """Record a finding that is reported but does not fail the report."""
        self.findings.append(text)

    def extend(self, other: "Report", prefix: str = ""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.passed, c.detail))
        self.findings.extend(other.findings)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_text(self) -> str:
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks)"]
        for c in self.checks:
            if not c.passed or c.detail:
                lines.append(f"  [{'ok' if c.passed else 'FAIL'}] {c.name}" + (f": {c.detail}" if c.detail else ""))
        for f in self.findings:
            lines.append(f"  finding: {f}")
        return "\n".join(lines)

    def to_document(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
            "findings": list(self.findings),
        }
