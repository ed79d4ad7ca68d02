"""
hilbert command: closed-form series for one datum file
"""
import logging
import sys
from typing import List, Optional, TextIO, Tuple

from app.config import DEFAULT_ORDER
from app.models import DatumModel, HilbertReport, MatSeriesModel, RunConfig, SeriesModel
from app.services.algebra_service import AlgebraService
from app.services.datum_service import RCI_NOTE, DatumService, VLDatum
from app.services.monomial_service import MonomialPresentation, MonomialService, strongly_free
from app.services.prepro_service import PreproService
from app.services.quiver_service import WILD, classify
from app.services.report_service import INPUT_ERRORS, report_service
from app.services.series_service import MatSeries, TruncSeries, sym_exp

logger = logging.getLogger(__name__)


def make_services(config: RunConfig) -> Tuple[DatumService, PreproService]:
    """Services honouring the run's caps"""
    algebra = AlgebraService(path_cap=config.path_cap)
    datum = DatumService(algebra=algebra, det_bound=config.det_bound)
    return datum, PreproService(datum=datum, algebra=algebra, det_bound=config.det_bound)


def input_path(config: RunConfig) -> str:
    if not config.inputs:
        raise ValueError(f"{config.command} needs an input file")
    return config.inputs[0]


def resolve_datum(model: DatumModel, datum: DatumService, prepro: PreproService) -> Tuple[str, VLDatum]:
    """The (V,L)-datum a datum file describes, with a short label for reports"""
    if model.preprojective is not None:
        return "preprojective", prepro.preprojective_datum(model.preprojective)
    if model.partial is not None:
        result = prepro.partial_preprojective(model.partial.quiver, model.partial.J, 0)
        return "partial preprojective", datum.datum_from_presentation(result.presentation)
    if model.presentation is not None:
        return "presentation", datum.datum_from_model(model)
    if model.monomial is not None:
        p = MonomialPresentation.from_model(model.monomial)
        return "monomial", datum.datum_from_presentation(p.to_presentation())
    return "explicit datum", datum.datum_from_model(model)


def _series(s: TruncSeries) -> SeriesModel:
    return SeriesModel(**s.to_json())


def build_report(model: DatumModel, config: RunConfig) -> HilbertReport:
    N = DEFAULT_ORDER if config.order is None else config.order
    datum, prepro = make_services(config)
    notes: List[str] = []
    classification = None
    hochschild = None

    if model.preprojective is not None:
        Q = model.preprojective
        verdict = classify(Q)
        wild = verdict.kind == WILD
        series = prepro.hilbert_preprojective(Q, N, include_OPi=wild)
        notes += list(series.notes)
        classification = verdict.to_json()
        source, d = "preprojective", prepro.preprojective_datum(Q)
        hA, hOA = series.hPi, series.hOPi
        zeta = datum.zeta(d, N)
        if wild:
            hochschild = {k: SeriesModel(**v) for k, v in datum.hochschild_series(d, N).to_json().items()}
        else:
            notes.append(f"h(O(Pi)) is not reported for {verdict.kind} quivers")
    elif model.partial is not None:
        series = prepro.partial_preprojective(model.partial.quiver, model.partial.J, N)
        source, d = "partial preprojective", datum.datum_from_presentation(series.presentation)
        hA, hOA, zeta = series.h, series.hO, None
        notes.append("no lambda factor: h(O(A)) is the zeta product of the partial Cartan series")
    elif model.monomial is not None:
        p = MonomialPresentation.from_model(model.monomial)
        words = MonomialService(threads=config.threads)
        source, d = "monomial", datum.datum_from_presentation(p.to_presentation())
        hA = MatSeries([[words.count_normal_words(p, N)]])
        hOA = sym_exp(words.count_cyclic_avoiding(p, N) - 1)
        zeta = datum.zeta(d, N)
        if strongly_free(p):
            hochschild = {k: SeriesModel(**v) for k, v in datum.hochschild_series(d, N).to_json().items()}
        else:
            logger.warning("⚠️ overlapping relation words, zeta may differ from h(O(A))")
            notes.append("relation words overlap: h(A) and h(O(A)) are word counts, zeta is only the closed form")
    else:
        source, d = resolve_datum(model, datum, prepro)
        hA, zeta, hOA = datum.hilbert_A(d, N), datum.zeta(d, N), datum.hilbert_OA(d, N)
        hochschild = {k: SeriesModel(**v) for k, v in datum.hochschild_series(d, N).to_json().items()}
        logger.warning(f"⚠️ {RCI_NOTE}")
        notes.append(RCI_NOTE)

    expected = None
    if config.dims:
        expected = str(datum.expected_rep_dimension(d, config.dims))

    return HilbertReport(
        source=source,
        order=N,
        dim_I=d.dim_I,
        hA=MatSeriesModel(**hA.to_json()),
        hA_total=_series(hA.total()),
        zeta=None if zeta is None else _series(zeta),
        hOA=None if hOA is None else _series(hOA),
        m=[str(x) for x in d.m],
        hochschild=hochschild,
        expected_rep_dimension=expected,
        classification=classification,
        notes=notes,
    )


def cmd_hilbert(config: RunConfig, out: Optional[TextIO] = None) -> int:
    """Series tables for a datum file; 2 on bad input"""
    try:
        model = report_service.load(input_path(config), DatumModel)
        report = build_report(model, config)
    except INPUT_ERRORS as e:
        logger.error(f"❌ hilbert failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    logger.info(f"✅ hilbert report for {report.source} at order {report.order}")
    (out or sys.stdout).write(report_service.render(report, config.format))
    return 0
