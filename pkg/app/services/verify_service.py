"""
Verification battery: closed-form series against independent oracles
"""
import logging
import math
import random
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional

from app.config import DEFAULT_SAMPLES, DEFAULT_SEED, DET_BOUND, PATH_CAP, THREADS
from app.models import CheckResult, VerifyReport
from app.services.algebra_service import AlgebraService, Presentation, first_nonzero
from app.services.catalog_service import catalog_service
from app.services.datum_service import DatumService, VLDatum
from app.services.monomial_service import (
    INCONCLUSIVE,
    NONE_EXISTS,
    WITNESS,
    MonomialPresentation,
    MonomialService,
    closed_form_normal_words,
    strongly_free,
)
from app.services.prepro_service import PreproService
from app.services.quiver_service import extending_vertex, make_quiver
from app.services.randmat_service import RandmatService, compare_to_target, ds_exact
from app.services.series_service import (
    MatSeries,
    TruncSeries,
    first_difference,
    mat_det,
    mat_inv,
    power_product,
    sym_exp,
    sym_log,
)

logger = logging.getLogger(__name__)

SUITE_ORDERS: Dict[str, int] = {
    "affine": 30,
    "dtable": 30,
    "molien": 24,
    "oracle": 6,
    "monomial": 12,
    "riemsur": 10,
    "partial": 5,
    "super": 50,
    "properties": 12,
    "cq": 8,
    "mc": 4,
}
SUITES = tuple(SUITE_ORDERS) + ("all",)


def _strings(series: TruncSeries) -> List[str]:
    return [str(c) for c in series.coeffs]


def series_check(name: str, expected: TruncSeries, actual: TruncSeries, detail: str = "") -> CheckResult:
    diff = first_difference(expected, actual)
    if expected.order != actual.order and diff is None:
        diff = min(expected.order, actual.order) + 1
    return CheckResult(
        name=name,
        passed=diff is None,
        first_diff=diff,
        detail=detail,
        expected=_strings(expected),
        actual=_strings(actual),
    )


def matrix_check(name: str, expected: MatSeries, actual: MatSeries, detail: str = "") -> CheckResult:
    if expected.dim != actual.dim or expected.order != actual.order:
        return CheckResult(name=name, passed=False, detail=f"shape mismatch {detail}".strip())
    found = first_nonzero(expected - actual)
    if found is None:
        return CheckResult(name=name, passed=True, detail=detail)
    k, i, j = found
    return CheckResult(
        name=name,
        passed=False,
        first_diff=k,
        detail=f"entry ({i},{j}) {detail}".strip(),
        expected=_strings(expected[i, j]),
        actual=_strings(actual[i, j]),
    )


def flag_check(name: str, passed: bool, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=passed, detail=detail)


class VerifyService:
    def __init__(self, seed: int = DEFAULT_SEED, samples: int = DEFAULT_SAMPLES, path_cap: int = PATH_CAP,
                 det_bound: int = DET_BOUND, threads: int = THREADS):
        self.seed = seed
        self.samples = samples
        self.threads = threads
        self.algebra = AlgebraService(path_cap=path_cap)
        self.datum = DatumService(algebra=self.algebra, det_bound=det_bound)
        self.prepro = PreproService(datum=self.datum, algebra=self.algebra, det_bound=det_bound)
        self.monomial = MonomialService(threads=threads)
        self.randmat = RandmatService(threads=threads)
        self.suites: Dict[str, Callable[[int], List[CheckResult]]] = {
            "affine": self.affine_suite,
            "dtable": self.dtable_suite,
            "molien": self.molien_suite,
            "oracle": self.oracle_suite,
            "monomial": self.monomial_suite,
            "riemsur": self.riemsur_suite,
            "partial": self.partial_suite,
            "super": self.super_suite,
            "properties": self.properties_suite,
            "cq": self.cq_suite,
            "mc": self.mc_suite,
        }

    def run(self, suite: str, order: Optional[int] = None) -> VerifyReport:
        if suite not in SUITES:
            raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
        names = list(self.suites) if suite == "all" else [suite]
        checks: List[CheckResult] = []
        for name in names:
            suite_order = SUITE_ORDERS[name] if order is None else order
            logger.info(f"🔄 suite {name} at order {suite_order}")
            results = self.suites[name](suite_order)
            failed = [c.name for c in results if not c.passed]
            if failed:
                logger.error(f"❌ suite {name}: {len(failed)} failing check(s): {failed[0]}")
            else:
                logger.info(f"✅ suite {name}: {len(results)} checks passed")
            checks.extend(results)
        return VerifyReport(
            suite=suite,
            order=-1 if order is None else order,
            passed=all(c.passed for c in checks),
            checks=checks,
        )

    # -- affine Dynkin ---------------------------------------------------

    def affine_suite(self, order: int) -> List[CheckResult]:
        def one_shape(item):
            name, Q = item
            report = self.prepro.affine_identity_check(Q, order)
            results = [CheckResult(
                name=f"affine product identity {name}",
                passed=report.equal,
                first_diff=report.first_diff,
                detail=f"extending vertices {sorted(report.extra['extending_vertices'])}",
            )]
            o = Q.index(extending_vertex(Q))
            hPi = self.prepro.hilbert_preprojective(Q, order, include_OPi=False).hPi
            results.append(series_check(f"h(Pi)_oo is the kind-2 diagonal {name}",
                                        self.prepro.extending_diagonal(Q, order), hPi[o, o]))
            return results

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            per_shape = list(pool.map(one_shape, catalog_service.affine_quivers()))
        checks = [c for results in per_shape for c in results]

        z = math.pi / 5
        _, kind1 = self.prepro.chebyshev_values(2 * math.cos(z), 6)
        worst = max(abs(kind1[k] - 2 * math.cos(k * z)) for k in range(1, 7))
        checks.append(flag_check("kind-1 values at 2cos(pi/5) are 2cos(k pi/5)", worst < 1e-12, f"max error {worst:.2e}"))
        return checks

    def dtable_suite(self, order: int) -> List[CheckResult]:
        checks = []
        for name, Q in catalog_service.affine_quivers():
            computed, closed = self.prepro.dynkin_D_polynomial(Q, order)
            detail = "" if order >= 2 * len(Q.vertices) else "order below the polynomial degree"
            checks.append(series_check(f"D(t) table {name}", closed, computed, detail))
        return checks

    def molien_suite(self, order: int) -> List[CheckResult]:
        checks = []
        for n, Q in catalog_service.cyclic_affine_quivers():
            group = self.prepro.cyclic_group(n)
            checks.append(series_check(f"Molien series of Z/{n}", self.prepro.extending_diagonal(Q, order),
                                       self.prepro.molien_series(group, order)))
        for name, Q in catalog_service.affine_quivers():
            if name.startswith("~A"):
                continue
            group = self.prepro.mckay_group(name)
            checks.append(series_check(f"Molien series of {group.name} ({name})",
                                       self.prepro.extending_diagonal(Q, order),
                                       self.prepro.molien_series(group, order), "numerical group"))
        return checks

    # -- brute-force oracle ----------------------------------------------

    def _oracle_checks(self, name: str, d: VLDatum, order: int) -> List[CheckResult]:
        p = d.presentation
        hA = self.datum.hilbert_A(d, order)
        brute = self.algebra.brute_algebra_matrix(p, order)
        checks = [matrix_check(f"h(A) against the brute-force oracle: {name}", brute, hA)]
        cyclic = self.algebra.brute_cyclic_dims(p, order)
        positive = cyclic - TruncSeries.monomial(0, d.dim_I, order)
        checks.append(series_check(f"h(O(A)) against Sym of cyclic dimensions: {name}",
                                   sym_exp(positive), self.datum.hilbert_OA(d, order)))
        defect = self.algebra.anick_defect(p, brute, self.datum.hV(d, order), self.datum.hL(d, order))
        found = first_nonzero(defect)
        checks.append(flag_check(f"Euler defect vanishes: {name}", found is None,
                                 "" if found is None else f"first nonzero at t^{found[0]}"))
        return checks

    def oracle_suite(self, order: int) -> List[CheckResult]:
        checks = []
        for name, Q in catalog_service.wild_quivers():
            d = self.prepro.preprojective_datum(Q)
            checks.extend(self._oracle_checks(f"preprojective {name}", d, order))
            m = self.algebra.compute_L_circ(d.presentation, order)
            checks.append(series_check(f"L° is one-dimensional in weight 2: {name}",
                                       TruncSeries.monomial(2, 1, order), m))

        loop = self.prepro.preprojective_datum(make_quiver([0], [(0, 0)]))
        product = self.datum.free_product_datum(loop, _renamed(loop))
        checks.append(matrix_check(
            "free product formula against the concatenated presentation",
            self.algebra.brute_algebra_matrix(product.presentation, order),
            self.datum.free_product(loop, loop, order),
        ))
        free = self.datum.datum_from_presentation(Presentation(make_quiver([0], [(0, 0), (0, 0)]), []))
        checks.append(matrix_check("free algebra on 2 loops", self.algebra.brute_algebra_matrix(free.presentation, order),
                                   mat_inv(MatSeries.identity(1, order) - self.datum.hV(free, order))))
        return checks

    # -- monomial algebras -----------------------------------------------

    def _monomial_checks(self, name: str, p: MonomialPresentation, order: int) -> List[CheckResult]:
        checks = [flag_check(f"strongly free: {name}", strongly_free(p))]
        checks.append(series_check(f"normal words against the closed form: {name}",
                                   closed_form_normal_words(p, order), self.monomial.count_normal_words(p, order)))
        d = self.datum.datum_from_presentation(p.to_presentation())
        cyclic = self.monomial.count_cyclic_avoiding(p, order)
        checks.append(series_check(f"Sym of cyclic words equals zeta: {name}",
                                   self.datum.zeta(d, order), sym_exp(cyclic - 1)))
        return checks

    def monomial_suite(self, order: int) -> List[CheckResult]:
        checks = []
        for name, p in catalog_service.monomial_presentations():
            checks.extend(self._monomial_checks(name, p, order))
        rng = random.Random(self.seed)
        for k in range(5):
            words = self.monomial.random_strongly_free(rng, letters=2, max_length=6)
            p = MonomialPresentation(("x", "y"), (1, 1), tuple(words))
            label = ", ".join(p.spell(w) for w in words)
            checks.extend(self._monomial_checks(f"random set {k + 1} ({label})", p, order))

        verdict = self.monomial.admissible_search([1, 1], [4])
        checks.append(flag_check("(1,1;4) is admissible", verdict.status == WITNESS,
                                 " ".join("".join("xy"[x] for x in w) for w in verdict.words)))
        verdict = self.monomial.admissible_search([1, 1], [4, 5])
        checks.append(flag_check("(1,1;4,5) is admissible", verdict.status == WITNESS,
                                 " ".join("".join("xy"[x] for x in w) for w in verdict.words)))
        for s in range(1, 7):
            verdict = self.monomial.admissible_search([1, 1], [2, s])
            checks.append(flag_check(f"(1,1;2,{s}) is not admissible", verdict.status == NONE_EXISTS,
                                     "search inconclusive" if verdict.status == INCONCLUSIVE else ""))
        partner = self.monomial.minimal_admissible_partner(4, 8)
        checks.append(flag_check("smallest s with (1,1;4,s) admissible is 5", partner == 5, f"got {partner}"))
        return checks

    # -- one-relator algebras and partial preprojectives ------------------

    def riemsur_suite(self, order: int) -> List[CheckResult]:
        g, n = 2, 2
        closed = self.prepro.a_g_n_series(g, n, order)
        hV = MatSeries([[TruncSeries.monomial(1, 2 * g, order)]])
        hL = MatSeries([[TruncSeries.monomial(2, 1, order)]])
        hD, hOD = self.prepro.truncated_polynomial_ring(n, order)
        checks = [
            series_check("h(A_{2,2}) against the circle product", closed["hA"],
                         self.datum.circ_product_hilbert(hV, hL, hD, order)[0, 0]),
            series_check("h(O(A_{2,2})) against the circle product", closed["hOA"],
                         self.datum.circ_product_OA(hV, hL, hD, hOD, [0], order)),
        ]
        loops = self.prepro.hilbert_preprojective(catalog_service.wild_quivers()[0][1], order)
        first = self.prepro.a_g_n_series(g, 1, order)
        checks.append(series_check("A_{2,1} is the preprojective algebra of 2 loops", loops.hPi[0, 0], first["hA"]))
        checks.append(series_check("O(A_{2,1}) matches h(O(Pi))", loops.hOPi, first["hOA"]))
        try:
            self.prepro.a_g_n_series(1, 2, order)
            refused = False
        except ValueError:
            refused = True
        checks.append(flag_check("g = 1 is refused", refused))
        return checks

    def partial_suite(self, order: int) -> List[CheckResult]:
        checks = []
        for name, Q, J in catalog_service.partial_cases():
            result = self.prepro.partial_preprojective(Q, J, order)
            p = result.presentation
            checks.append(matrix_check(f"partial preprojective against the oracle: {name}",
                                       self.algebra.brute_algebra_matrix(p, order), result.h))
            checks.append(series_check(f"L° vanishes: {name}", TruncSeries.zero(order),
                                       self.algebra.compute_L_circ(p, order)))
            cyclic = self.algebra.brute_cyclic_dims(p, order) - TruncSeries.monomial(0, p.vertex_count, order)
            checks.append(series_check(f"h(O) against Sym of cyclic dimensions: {name}", sym_exp(cyclic), result.hO))
        return checks

    # -- super and property suites ---------------------------------------

    def super_suite(self, order: int) -> List[CheckResult]:
        odd = self.datum.free_datum([], odd=[1])
        euler = power_product({k: 1 for k in range(1, order + 1, 2)}, order)
        checks = [
            series_check("zeta of one odd generator is prod (1 - t^odd)", euler, self.datum.zeta(odd, order)),
            series_check("Cartan polynomial of one odd generator", TruncSeries.from_poly([1, 1], order),
                         self.datum.cartan_poly(odd, order)[0, 0]),
            series_check("lambda for m = (0,0,2,1)", power_product({2: 2, 3: 1}, order),
                         self.datum.lambda_poly(self.datum.make_datum(1, [[[0, 2]]], [[[0, 0, 2, 1]]], [0, 0, 2, 1]),
                                                order)),
        ]
        return checks

    def properties_suite(self, order: int) -> List[CheckResult]:
        rng = random.Random(self.seed)
        bad = 0
        for _ in range(200):
            f = TruncSeries([0] + [rng.randint(-3, 3) for _ in range(order)], order)
            if sym_log(sym_exp(f)) != f:
                bad += 1
        checks = [flag_check("sym_log inverts sym_exp on 200 random series", bad == 0, f"{bad} failures")]

        bad = 0
        for _ in range(100):
            n = rng.randint(1, 4)
            layers = [[[int(i == j) for j in range(n)] for i in range(n)],
                      [[-rng.randint(0, 3) for _ in range(n)] for _ in range(n)],
                      [[rng.randint(0, 1) if i == j else 0 for j in range(n)] for i in range(n)]]
            m = MatSeries.from_coefficients(layers, order)
            if mat_inv(m) * m != MatSeries.identity(n, order):
                bad += 1
        checks.append(flag_check("mat_inv on 100 random Cartan-shaped matrices", bad == 0, f"{bad} failures"))

        bad = 0
        for _ in range(100):
            n = rng.randint(1, 4)
            a, b = (MatSeries.from_coefficients(
                [[[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)] for _ in range(3)], order) for _ in range(2))
            if mat_det(a * b) != mat_det(a) * mat_det(b):
                bad += 1
        checks.append(flag_check("det is multiplicative on 100 random pairs", bad == 0, f"{bad} failures"))

        for name, d in self._catalog_data():
            hh = self.datum.hochschild_series(d, order)
            checks.append(series_check(f"Euler identity of Hochschild series: {name}", TruncSeries.zero(order),
                                       self.datum.euler_defect(d, hh)))
        return checks

    def _catalog_data(self) -> List:
        data = [(f"preprojective {name}", self.prepro.preprojective_datum(Q)) for name, Q in catalog_service.wild_quivers()]
        data += [(f"monomial {name}", self.datum.datum_from_presentation(p.to_presentation()))
                 for name, p in catalog_service.monomial_presentations()]
        data.append(("free on 2 generators", self.datum.free_datum([1, 1])))
        data.append(("one odd generator", self.datum.free_datum([], odd=[1])))
        return data

    def cq_suite(self, order: int) -> List[CheckResult]:
        dims = self.algebra.brute_algebra_dims(catalog_service.quantum_plane(2), order)
        return [series_check("C_q[x,y] with q = 2 has dimensions 1,2,3,...",
                             TruncSeries(list(range(1, order + 2)), order), dims)]

    # -- Monte Carlo -----------------------------------------------------

    def mc_suite(self, order: int) -> List[CheckResult]:
        checks = []
        bands = [
            ("E|Tr u|^2 at d=6", [(1, 1, 1)], 0.9, 1.1),
            ("E|Tr u^2|^2 at d=6", [(2, 1, 1)], 1.8, 2.2),
            ("E[Tr u conj Tr u^2] at d=6", [(1, 1, 0), (2, 0, 1)], -0.1, 0.1),
        ]
        for name, spec, low, high in bands:
            est = self.randmat.ds_moment(6, spec, self.samples, self.seed)
            mean, imag = est.mean[0], est.mean_imag[0]
            inside = low <= mean <= high and abs(imag) <= 0.1
            checks.append(flag_check(name, inside, f"mean {mean:.4f}{imag:+.4f}i, exact {ds_exact(spec)}"))

        free = self.datum.free_datum([1])
        est = self.randmat.mc_matrix_integral(free, [8], order, self.samples, self.seed)
        target = self.datum.zeta(free, order)
        checks.extend(self._mc_checks("free algebra on 1 generator, d=8", est, target))

        loops = self.prepro.preprojective_datum(catalog_service.wild_quivers()[0][1])
        low_order = min(order, 2)
        est = self.randmat.mc_matrix_integral(loops, [10], low_order, self.samples, self.seed, divide_lambda=True)
        checks.extend(self._mc_checks("preprojective 2 loops, d=10, divided by lambda", est,
                                      self.datum.hilbert_OA(loops, low_order)))
        return checks

    def _mc_checks(self, name: str, est, target: TruncSeries) -> List[CheckResult]:
        results = compare_to_target(est, [float(c) for c in target.coeffs])
        failed = [c for c in results if not c.passed]
        return [CheckResult(
            name=name,
            passed=not failed,
            first_diff=failed[0].index if failed else None,
            detail="; ".join(f"t^{c.index}: {c.mean:.3f} vs {c.target:g}" for c in results),
            expected=[str(c) for c in target.coeffs],
            actual=[f"{m:.4f}" for m in est.mean],
        )]


def _renamed(d: VLDatum) -> VLDatum:
    """The same datum with edges renamed so that it can be concatenated with itself"""
    p = d.presentation
    quiver = p.quiver.model_copy(update={"edges": [
        e.model_copy(update={"name": f"{name}'"}) for e, name in zip(p.quiver.edges, p.quiver.edge_names())
    ]})
    return VLDatum(d.dim_I, d.dimsV, d.dimsL, d.m, Presentation(quiver, list(p.relations)))
