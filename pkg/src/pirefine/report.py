"""Check reports: per-item verdicts aggregated into a pass/fail/inconclusive status."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
UNKNOWN = "unknown"
VACUOUS = "vacuous"

INCONCLUSIVE = "inconclusive"


@dataclass
class CheckItem:
    check: str
    status: str
    subject: dict
    witness: Any = None
    note: str = ""

    def to_dict(self) -> dict:
        d = {"check": self.check, "status": self.status, "subject": self.subject}
        if self.witness is not None:
            d["witness"] = self.witness
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class CheckReport:
    """Outcome of one property check over a corpus.

    ``parts`` contribute to the status like items do.  A failed or
    inconclusive precondition turns the whole report inconclusive: the
    checked property was not in force, so its items prove nothing.
    """

    name: str
    items: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    parts: dict = field(default_factory=dict)
    preconditions: dict = field(default_factory=dict)

    def add(self, check: str, status: str, subject: dict, witness=None, note: str = "") -> CheckItem:
        item = CheckItem(check, status, subject, witness, note)
        self.items.append(item)
        return item

    def counts(self) -> dict:
        c = Counter(i.status for i in self.items)
        return {s: c.get(s, 0) for s in (PASS, FAIL, UNKNOWN, VACUOUS)}

    def counts_by_check(self) -> dict:
        out: dict = {}
        for i in self.items:
            out.setdefault(i.check, Counter())[i.status] += 1
        return {k: dict(sorted(v.items())) for k, v in out.items()}

    def failures(self, check: str | None = None) -> list:
        return [i for i in self.items if i.status == FAIL and (check is None or i.check == check)]

    def unknowns(self) -> list:
        return [i for i in self.items if i.status == UNKNOWN]

    @property
    def n_failures(self) -> int:
        return len(self.failures()) + sum(p.n_failures for p in self.parts.values())

    @property
    def n_unknowns(self) -> int:
        return len(self.unknowns()) + sum(p.n_unknowns for p in self.parts.values())

    @property
    def status(self) -> str:
        if any(p.status != PASS for p in self.preconditions.values()):
            return INCONCLUSIVE
        if self.n_failures:
            return FAIL
        if self.n_unknowns or any(p.status == INCONCLUSIVE for p in self.parts.values()):
            return INCONCLUSIVE
        return PASS

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        d: dict = {
            "name": self.name,
            "status": self.status,
            "counts": self.counts(),
            "counts_by_check": self.counts_by_check(),
            "meta": self.meta,
            "items": [i.to_dict() for i in self.items],
        }
        if self.preconditions:
            d["preconditions"] = {k: v.to_dict() for k, v in self.preconditions.items()}
        if self.parts:
            d["parts"] = {k: v.to_dict() for k, v in self.parts.items()}
        return d

    def render(self, indent: str = "", max_listed: int = 20) -> str:
        lines = [f"{indent}{self.name}: {self.status.upper()}"]
        for k, v in self.meta.items():
            lines.append(f"{indent}  {k}: {v}")
        for check, counts in self.counts_by_check().items():
            summary = ", ".join(f"{n} {s}" for s, n in counts.items())
            lines.append(f"{indent}  [{check}] {summary}")
        listed = [i for i in self.items if i.status in (FAIL, UNKNOWN)]
        for item in listed[:max_listed]:
            subject = "; ".join(f"{k}={_flat(v)}" for k, v in item.subject.items())
            lines.append(f"{indent}  {item.status.upper()} {item.check}: {subject}")
            if item.witness is not None:
                lines.append(f"{indent}    witness: {_flat(item.witness)}")
            if item.note:
                lines.append(f"{indent}    note: {item.note}")
        if len(listed) > max_listed:
            lines.append(f"{indent}  ... {len(listed) - max_listed} more")
        for label, group in (("precondition", self.preconditions), ("part", self.parts)):
            for name, sub in group.items():
                lines.append(f"{indent}  {label} {name}:")
                lines.append(sub.render(indent + "    ", max_listed))
        return "\n".join(lines)


def _flat(v) -> str:
    if isinstance(v, (list, tuple)):
        return "{" + ", ".join(_flat(x) for x in v) + "}"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_flat(x)}" for k, x in v.items()) + "}"
    return str(v)
