"""
Input file loading and report rendering for the command handlers
"""
import csv
import io
import json
import logging
from pathlib import Path
from typing import List, Type, TypeVar

from pydantic import BaseModel, ValidationError

from app.models import HilbertReport, IdentityReport, MCReport, VerifyReport

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)

# Failures that mean "bad input" rather than "failed check"
INPUT_ERRORS = (ValueError, ArithmeticError, RuntimeError, ValidationError, json.JSONDecodeError, OSError)


class ReportService:
    def load(self, path: str, model: Type[ModelT]) -> ModelT:
        """Read a JSON file into a pydantic model"""
        text = Path(path).read_text(encoding="utf-8")
        logger.info(f"🔄 reading {model.__name__} from {path}")
        return model.model_validate(json.loads(text))

    def render(self, report: BaseModel, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(report.model_dump(mode="json", exclude_none=True), indent=2) + "\n"
        if fmt == "csv":
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerows(self.rows(report))
            return buffer.getvalue()
        if fmt == "text":
            return "\n".join(self.text_lines(report)) + "\n"
        raise ValueError(f"unknown output format {fmt!r}")

    def rows(self, report: BaseModel) -> List[List[str]]:
        """Long-format table: one row per coefficient or per check"""
        if isinstance(report, HilbertReport):
            rows = [["series", "i", "j", "k", "coeff"]]
            for i, row in enumerate(report.hA.entries):
                for j, entry in enumerate(row):
                    rows += [["hA", str(i), str(j), str(k), c] for k, c in enumerate(entry)]
            for name in ("zeta", "hOA"):
                series = getattr(report, name)
                if series is not None:
                    rows += [[name, "", "", str(k), c] for k, c in enumerate(series.coeffs)]
            for name, series in (report.hochschild or {}).items():
                rows += [[name, "", "", str(k), c] for k, c in enumerate(series.coeffs)]
            return rows
        if isinstance(report, VerifyReport):
            return [["name", "passed", "first_diff", "detail"]] + [
                [c.name, str(c.passed).lower(), "" if c.first_diff is None else str(c.first_diff), c.detail]
                for c in report.checks
            ]
        if isinstance(report, MCReport):
            target = report.target or [""] * len(report.mean)
            return [["k", "mean", "mean_imag", "stderr", "target"]] + [
                [str(k), m, mi, s, t]
                for k, (m, mi, s, t) in enumerate(zip(report.mean, report.mean_imag, report.stderr, target))
            ]
        if isinstance(report, IdentityReport):
            return [["k", "lhs", "rhs"]] + [[str(k), a, b] for k, (a, b) in enumerate(zip(report.lhs, report.rhs))]
        raise ValueError(f"no table layout for {type(report).__name__}")

    def text_lines(self, report: BaseModel) -> List[str]:
        if isinstance(report, HilbertReport):
            lines = [f"{report.source}: |I| = {report.dim_I}, order {report.order}"]
            for i, row in enumerate(report.hA.entries):
                for j, entry in enumerate(row):
                    lines.append(f"h(A)[{i},{j}] = {', '.join(entry)}")
            lines.append(f"h(A) total = {', '.join(report.hA_total.coeffs)}")
            if report.zeta is not None:
                lines.append(f"zeta = {', '.join(report.zeta.coeffs)}")
            if report.hOA is not None:
                lines.append(f"h(O(A)) = {', '.join(report.hOA.coeffs)}")
            if report.expected_rep_dimension is not None:
                lines.append(f"expected dimension of Rep = {report.expected_rep_dimension}")
            lines += [f"note: {n}" for n in report.notes]
            return lines
        if isinstance(report, VerifyReport):
            lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}"
                     + ("" if c.first_diff is None else f"  (first difference at t^{c.first_diff})")
                     for c in report.checks]
            passed = sum(c.passed for c in report.checks)
            lines.append(f"{passed}/{len(report.checks)} checks passed")
            return lines
        if isinstance(report, MCReport):
            lines = [f"{report.kind}: dims {report.dims}, {report.samples} samples, seed {report.seed}"]
            target = report.target or [None] * len(report.mean)
            for k, (m, s, t) in enumerate(zip(report.mean, report.stderr, target)):
                lines.append(f"t^{k}: {m} +- {s}" + ("" if t is None else f"  target {t}"))
            lines += [f"note: {n}" for n in report.notes]
            return lines
        if isinstance(report, IdentityReport):
            verdict = "equal" if report.equal else f"differ at t^{report.first_diff}"
            return [
                f"{report.identity} to t^{report.order}: {verdict}",
                f"lhs = {', '.join(report.lhs)}",
                f"rhs = {', '.join(report.rhs)}",
            ] + [f"{key} = {value}" for key, value in report.extra.items()]
        raise ValueError(f"no text layout for {type(report).__name__}")


# Global service instance
report_service = ReportService()
