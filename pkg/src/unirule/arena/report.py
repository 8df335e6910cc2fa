"""Scenario-level reporting: one BT fit per cell, errors isolated per cell.

Cells are the 12 (language, context_type) scenarios, the per-language and
per-context-type pools, and the overall pool. Pooling means refitting on
the union of judgments, not averaging per-scenario coefficients. A fit
failure (disconnected cell, separation) is recorded on its cell and never
aborts the others.
"""

import csv
import warnings
from dataclasses import dataclass, field

from unirule.errors import UniruleError
from unirule.arena.bt import BTFit, build_win_matrix, fit_bt, sandwich_se
from unirule.arena.judging import first_position_win_fraction

DEFAULT_ANCHOR = "baseline"
POSITION_BIAS_BOUNDS = (0.4, 0.6)

CELL_KINDS = ("scenario", "language", "context_type", "overall")

CSV_FIELDS = ("scenario", "method", "xi", "se", "ci_low", "ci_high", "significant")


class PositionBiasWarning(UserWarning):
    """First-position win fraction left the expected band."""


@dataclass
class CellResult:
    kind: str  # scenario | language | context_type | overall
    key: str  # "splunk/cti", "splunk/*", "*/cti", "*/*"
    n_judgments: int
    fit: BTFit | None = None
    error: str | None = None

    def significant(self, method: str) -> bool:
        """CI excludes zero."""
        if self.fit is None or self.fit.ci_low is None:
            return False
        i = self.fit.methods.index(method)
        return bool(self.fit.ci_low[i] > 0.0 or self.fit.ci_high[i] < 0.0)


@dataclass
class ArenaReport:
    anchor: str
    cells: list = field(default_factory=list)
    first_position_win_fraction: float | None = None
    position_bias_flagged: bool = False

    def cell(self, key: str) -> CellResult:
        for c in self.cells:
            if c.key == key:
                return c
        raise KeyError(f"no cell {key!r}")

    def cells_of_kind(self, kind: str) -> list:
        return [c for c in self.cells if c.kind == kind]

    def to_table(self) -> dict:
        """JSON-ready structured table of every cell."""
        rows = []
        for c in self.cells:
            row = {
                "kind": c.kind,
                "key": c.key,
                "n_judgments": c.n_judgments,
                "error": c.error,
            }
            if c.fit is not None:
                row["methods"] = list(c.fit.methods)
                row["anchor"] = c.fit.anchor
                row["xi"] = [round(float(v), 6) for v in c.fit.xi]
                row["se"] = [round(float(v), 6) for v in c.fit.se]
                row["ci_low"] = [round(float(v), 6) for v in c.fit.ci_low]
                row["ci_high"] = [round(float(v), 6) for v in c.fit.ci_high]
                row["significant"] = [c.significant(m) for m in c.fit.methods]
                row["converged"] = c.fit.converged
                row["gradient_norm"] = float(c.fit.gradient_norm)
            rows.append(row)
        return {
            "anchor": self.anchor,
            "cells": rows,
            "audit": {
                "first_position_win_fraction": self.first_position_win_fraction,
                "position_bias_flagged": self.position_bias_flagged,
            },
        }


def _fit_cell(kind: str, key: str, judgments, anchor: str) -> CellResult:
    cell = CellResult(kind=kind, key=key, n_judgments=len(judgments))
    try:
        matrix = build_win_matrix(judgments)
        if anchor not in matrix.methods:
            raise UniruleError(f"anchor {anchor!r} absent from cell {key!r}")
        fit = fit_bt(matrix, anchor)
        sandwich_se(fit, judgments)
        cell.fit = fit
    except (UniruleError, ValueError) as exc:
        cell.error = f"{type(exc).__name__}: {exc}"
    return cell


def scenario_report(judgments, anchor: str = DEFAULT_ANCHOR) -> ArenaReport:
    """Fit per scenario, per language, per context type, and overall."""
    judgments = list(judgments)
    if not judgments:
        raise ValueError("no judgments to report on")

    by_scenario: dict = {}
    by_language: dict = {}
    by_context: dict = {}
    for j in judgments:
        language, context_type = j.scenario
        by_scenario.setdefault((language, context_type), []).append(j)
        by_language.setdefault(language, []).append(j)
        by_context.setdefault(context_type, []).append(j)

    report = ArenaReport(anchor=anchor)
    for (language, context_type), group in sorted(by_scenario.items()):
        report.cells.append(
            _fit_cell("scenario", f"{language}/{context_type}", group, anchor)
        )
    for language, group in sorted(by_language.items()):
        report.cells.append(_fit_cell("language", f"{language}/*", group, anchor))
    for context_type, group in sorted(by_context.items()):
        report.cells.append(_fit_cell("context_type", f"*/{context_type}", group, anchor))
    report.cells.append(_fit_cell("overall", "*/*", judgments, anchor))

    fraction = first_position_win_fraction(judgments)
    report.first_position_win_fraction = fraction
    low, high = POSITION_BIAS_BOUNDS
    if fraction is not None and not (low <= fraction <= high):
        report.position_bias_flagged = True
        warnings.warn(
            f"first-position win fraction {fraction:.3f} outside [{low}, {high}]; "
            f"judge may be position-biased",
            PositionBiasWarning,
            stacklevel=2,
        )
    return report


def csv_rows(report: ArenaReport) -> list:
    """Forest-plot rows, one per (cell, method), fitted cells only."""
    rows = []
    for c in report.cells:
        if c.fit is None:
            continue
        for i, method in enumerate(c.fit.methods):
            rows.append(
                {
                    "scenario": c.key,
                    "method": method,
                    "xi": round(float(c.fit.xi[i]), 6),
                    "se": round(float(c.fit.se[i]), 6),
                    "ci_low": round(float(c.fit.ci_low[i]), 6),
                    "ci_high": round(float(c.fit.ci_high[i]), 6),
                    "significant": c.significant(method),
                }
            )
    return rows


def write_report_csv(report: ArenaReport, path) -> int:
    rows = csv_rows(report)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return len(rows)
