"""Check records and their reduction across sample points."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

DEFAULT_TOL = 1e-8


def magnitude(x) -> float:
    a = np.asarray(x, dtype=float)
    return float(np.max(np.abs(a))) if a.size else 0.0


def holds(residual: float, scale: float, tol: float) -> bool:
    """Pass rule shared by every check: residual <= tol * max(1, scale)."""
    return bool(residual <= tol * max(1.0, float(scale)))


@dataclass
class CheckResult:
    name: str
    residual: Optional[float]
    tolerance: float
    passed: Optional[bool]  # None when skipped
    point: Optional[tuple] = None
    note: Optional[str] = None
    values: dict = field(default_factory=dict)

    @property
    def skipped(self) -> bool:
        return self.passed is None


class CheckReport:
    """Ordered collection of check results, addressable by name."""

    def __init__(self, results: Iterable[CheckResult] = ()):
        self.results: list[CheckResult] = list(results)

    def __iter__(self):
        return iter(self.results)

    def __len__(self):
        return len(self.results)

    def __getitem__(self, name: str) -> CheckResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(r.name == name for r in self.results)

    def names(self) -> list[str]:
        return [r.name for r in self.results]

    def extend(self, other: Iterable[CheckResult]):
        self.results.extend(other)

    @property
    def passed(self) -> bool:
        return all(r.passed is not False for r in self.results)

    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if r.passed is False]

    @classmethod
    def reduce(cls, reports: list["CheckReport"]) -> "CheckReport":
        """Merge per-point reports by check name.

        The residual is the maximum over points that ran the check; ties go
        to the lowest point index.  A check passes only if it passed at every
        point where it ran.
        """
        order: list[str] = []
        by_name: dict[str, list[CheckResult]] = {}
        for rep in reports:
            for r in rep:
                if r.name not in by_name:
                    order.append(r.name)
                    by_name[r.name] = []
                by_name[r.name].append(r)
        out = []
        for name in order:
            rs = by_name[name]
            ran = [r for r in rs if not r.skipped]
            if not ran:
                first = rs[0]
                out.append(CheckResult(name, None, first.tolerance, None, first.point, first.note, dict(first.values)))
                continue
            worst = ran[0]
            for r in ran[1:]:
                if (r.residual or 0.0) > (worst.residual or 0.0):
                    worst = r
            failed = [r for r in ran if r.passed is False]
            if failed and worst.passed is not False:
                worst = max(failed, key=lambda r: r.residual or 0.0)
            note = worst.note
            if len(ran) < len(rs):
                extra = f"skipped at {len(rs) - len(ran)} of {len(rs)} points"
                note = f"{note}; {extra}" if note else extra
            out.append(
                CheckResult(
                    name,
                    worst.residual,
                    worst.tolerance,
                    not failed,
                    worst.point,
                    note,
                    dict(worst.values),
                )
            )
        return cls(out)


class Checker:
    """Accumulates check results at one point under one tolerance."""

    def __init__(self, point, tol: float):
        self.point = tuple(point)
        self.tol = tol
        self.report = CheckReport()

    def _add(self, name, residual, passed, note=None, values=None):
        r = CheckResult(name, residual, self.tol, passed, self.point, note, dict(values or {}))
        self.report.results.append(r)
        return r

    def holds(self, residual: float, scale: float) -> bool:
        return holds(residual, scale, self.tol)

    def identity(self, name: str, *terms, values=None, note=None) -> CheckResult:
        """Record ``sum(terms) == 0``; each term is a number or an array."""
        total = sum(np.asarray(t, dtype=float) for t in terms)
        residual = magnitude(total)
        scale = max(magnitude(t) for t in terms)
        return self._add(name, residual, self.holds(residual, scale), note, values)

    def condition(self, name: str, residual: float, scale: float = 1.0, values=None, note=None):
        """Record a precomputed residual judged against ``scale``."""
        residual = float(residual)
        return self._add(name, residual, self.holds(residual, scale), note, values)

    def equivalence(self, name, lhs, rhs, values=None, implication=False) -> CheckResult:
        """Observational check of ``lhs <=> rhs`` (or ``lhs => rhs``).

        ``lhs`` and ``rhs`` are ``(residual, scale)`` pairs of the conditions.
        The reported residual is the largest residual among the sides that
        were judged to hold.
        """
        lhs_ok = self.holds(*lhs)
        rhs_ok = self.holds(*rhs)
        passed = (not lhs_ok or rhs_ok) if implication else (lhs_ok == rhs_ok)
        held = [r for (r, _), ok in ((lhs, lhs_ok), (rhs, rhs_ok)) if ok]
        vals = {
            "lhs_residual": float(lhs[0]),
            "rhs_residual": float(rhs[0]),
            "lhs_holds": lhs_ok,
            "rhs_holds": rhs_ok,
        }
        vals.update(values or {})
        return self._add(name, float(max(held, default=0.0)), passed, None, vals)

    def skip(self, name: str, reason: str) -> CheckResult:
        return self._add(name, None, None, reason)
