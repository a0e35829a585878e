"""Law reports: one violation per line, axiom tag plus tuple ids."""

from __future__ import annotations

from dataclasses import dataclass, field


class InternalInvariantError(RuntimeError):
    """A structural guarantee the code itself relies on was violated."""


@dataclass(frozen=True)
class Violation:
    tag: str
    ids: tuple
    detail: str = ""

    def line(self) -> str:
        ids = ",".join(str(i) for i in self.ids)
        return f"{self.tag}\t{ids}" + (f"\t{self.detail}" if self.detail else "")


@dataclass
class LawReport:
    name: str
    violations: list = field(default_factory=list)

    def add(self, tag, ids, detail=""):
        self.violations.append(Violation(tag, tuple(ids), detail))

    @property
    def ok(self) -> bool:
        return not self.violations

    def extend(self, other: "LawReport"):
        self.violations.extend(other.violations)

    def lines(self):
        return sorted(v.line() for v in self.violations)

    def tags(self):
        return {v.tag for v in self.violations}

    def __str__(self):
        if self.ok:
            return f"{self.name}: ok"
        return f"{self.name}: {len(self.violations)} violation(s)\n" + \
            "\n".join(self.lines())

    def summary(self) -> dict:
        return {
            "name": self.name,
            "ok": self.ok,
            "violations": [
                {"tag": v.tag, "ids": list(v.ids), "detail": v.detail}
                for v in self.violations
            ],
        }
