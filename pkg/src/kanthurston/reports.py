from __future__ import annotations

from dataclasses import dataclass, field

from .utils import SCHEMA_VERSION, canonical_json, payload_digest


EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_INPUT = 2


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "details": self.details}


@dataclass
class RunReport:
    """Outcome of one CLI command; timings are kept out of the serialized form."""

    command: str
    input_digest: str
    kit: str | None = None
    checks: list[CheckResult] = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    error: dict | None = None
    timings: dict = field(default_factory=dict)

    def add(self, name: str, passed: bool, **details) -> CheckResult:
        check = CheckResult(name, bool(passed), details)
        self.checks.append(check)
        return check

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        if self.error is not None:
            return EXIT_INVALID_INPUT
        return EXIT_OK if self.passed else EXIT_CHECK_FAILED

    @property
    def status(self) -> str:
        return {EXIT_OK: "passed", EXIT_CHECK_FAILED: "failed"}.get(self.exit_code, "invalid")

    def to_dict(self) -> dict:
        payload = {
            "schema": SCHEMA_VERSION,
            "kind": "run_report",
            "command": self.command,
            "input_digest": self.input_digest,
            "kit": self.kit,
            "status": self.status,
            "exit_code": self.exit_code,
            "checks": [c.to_dict() for c in self.checks],
            "counts": self.counts,
            "results": self.results,
        }
        if self.error is not None:
            payload["error"] = self.error
        return payload

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    def digest(self) -> str:
        return payload_digest(self.to_dict())

    def to_text(self) -> str:
        lines = [f"{self.command}: {self.status} (exit {self.exit_code})"]
        if self.error is not None:
            lines.append(f"  error [{self.error.get('code')}]: {self.error.get('message')}")
        for check in self.checks:
            mark = "ok" if check.passed else "FAIL"
            lines.append(f"  [{mark}] {check.name}")
        for key, value in sorted(self.counts.items()):
            lines.append(f"  {key}: {value}")
        for key, value in sorted(self.results.items()):
            if isinstance(value, str) and "\n" in value:
                lines.append(f"  {key}:")
                lines.extend(f"    {row}" for row in value.splitlines())
            else:
                lines.append(f"  {key}: {canonical_json(value)}")
        return "\n".join(lines)
