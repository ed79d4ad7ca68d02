"""
mc command: Monte Carlo estimate of the unitary matrix integral of a datum
"""
import logging
import sys
from typing import Optional, TextIO

from app.config import DEFAULT_ORDER
from app.models import DatumModel, MCReport, RunConfig
from app.routers.hilbert_router import input_path, make_services, resolve_datum
from app.services.randmat_service import RandmatService, compare_to_target
from app.services.report_service import INPUT_ERRORS, report_service

logger = logging.getLogger(__name__)


def build_report(model: DatumModel, config: RunConfig) -> MCReport:
    N = DEFAULT_ORDER if config.order is None else config.order
    datum, prepro = make_services(config)
    source, d = resolve_datum(model, datum, prepro)
    if not config.dims:
        raise ValueError("mc needs --dims, one unitary size per vertex")
    estimate = RandmatService(threads=config.threads).mc_matrix_integral(
        d, config.dims, N, config.samples, config.seed, divide_lambda=config.divide_lambda)
    target = datum.hilbert_OA(d, N) if config.divide_lambda else datum.zeta(d, N)
    checks = compare_to_target(estimate, [float(c) for c in target.coeffs])
    notes = list(estimate.notes)
    for c in checks:
        if not c.passed:
            sigmas = "inf" if c.sigmas is None else f"{c.sigmas:.2f}"
            notes.append(f"t^{c.index}: mean {c.mean:.4f} is {sigmas} standard errors from {c.target:g}")
    data = estimate.to_json()
    return MCReport(
        kind=f"{source}, {'zeta/lambda' if config.divide_lambda else 'zeta'}",
        dims=list(config.dims),
        order=N,
        samples=config.samples,
        seed=config.seed,
        mean=data["mean"],
        mean_imag=data["mean_imag"],
        stderr=data["stderr"],
        target=[str(c) for c in target.coeffs],
        passed=all(c.passed for c in checks),
        notes=notes,
    )


def cmd_mc(config: RunConfig, out: Optional[TextIO] = None) -> int:
    """0 when every coefficient is inside its band, 1 otherwise, 2 on bad input"""
    try:
        model = report_service.load(input_path(config), DatumModel)
        report = build_report(model, config)
    except INPUT_ERRORS as e:
        logger.error(f"❌ mc failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    (out or sys.stdout).write(report_service.render(report, config.format))
    return 0 if report.passed else 1
