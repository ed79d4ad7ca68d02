"""
identity command: both sides of the affine product identity and the D(t) table for a quiver file
"""
import logging
import sys
from typing import Optional, TextIO

from app.config import DEFAULT_ORDER
from app.models import IdentityReport, QuiverModel, RunConfig
from app.routers.hilbert_router import input_path, make_services
from app.services.report_service import INPUT_ERRORS, report_service
from app.services.series_service import first_difference

logger = logging.getLogger(__name__)


def build_report(Q: QuiverModel, config: RunConfig) -> IdentityReport:
    N = DEFAULT_ORDER if config.order is None else config.order
    _, prepro = make_services(config)
    report = prepro.affine_identity_check(Q, N)
    computed, closed = prepro.dynkin_D_polynomial(Q, N)
    diff = first_difference(computed, closed)
    extra = dict(report.extra)
    extra["det"] = [str(c) for c in computed.coeffs]
    extra["det_closed_form"] = [str(c) for c in closed.coeffs]
    extra["det_equal"] = diff is None
    extra["hOPi"] = [str(c) for c in prepro.affine_OPi_series(Q, N).coeffs]
    return report.model_copy(update={"extra": extra})


def cmd_identity(config: RunConfig, out: Optional[TextIO] = None) -> int:
    """0 when both identities hold, 1 when one fails, 2 on bad input"""
    try:
        Q = report_service.load(input_path(config), QuiverModel)
        report = build_report(Q, config)
    except INPUT_ERRORS as e:
        logger.error(f"❌ identity failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    (out or sys.stdout).write(report_service.render(report, config.format))
    return 0 if report.equal and report.extra["det_equal"] else 1
