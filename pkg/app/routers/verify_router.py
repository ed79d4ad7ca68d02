"""
verify command: the bundled acceptance battery
"""
import logging
import sys
from typing import Optional, TextIO

from pydantic import ValidationError

from app.models import RunConfig
from app.services.report_service import report_service
from app.services.verify_service import VerifyService

logger = logging.getLogger(__name__)

# the battery reads no files, so only options can be malformed
OPTION_ERRORS = (ValueError, ValidationError)
INTERNAL_ERRORS = (ArithmeticError, RuntimeError)


def cmd_verify(config: RunConfig, out: Optional[TextIO] = None) -> int:
    """0 when every check passes, 1 on any failing check, 2 on bad options, 3 when a suite breaks"""
    service = VerifyService(
        seed=config.seed,
        samples=config.samples,
        path_cap=config.path_cap,
        det_bound=config.det_bound,
        threads=config.threads,
    )
    try:
        report = service.run(config.suite, config.order)
    except INTERNAL_ERRORS as e:
        logger.exception(f"❌ suite {config.suite} raised {type(e).__name__}")
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3
    except OPTION_ERRORS as e:
        logger.error(f"❌ verify failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    (out or sys.stdout).write(report_service.render(report, config.format))
    if not report.passed:
        first = next(c for c in report.checks if not c.passed)
        where = "" if first.first_diff is None else f" at t^{first.first_diff}"
        print(f"FAILED: {first.name}{where}", file=sys.stderr)
        return 1
    return 0
