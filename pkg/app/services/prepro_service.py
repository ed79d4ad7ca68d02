"""
Preprojective algebras, Chebyshev matrix polynomials, affine Dynkin identities and Molien series
"""
import cmath
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Poly, cyclotomic_poly, symbols

from app.config import DET_BOUND
from app.models import IdentityReport, QuiverModel
from app.services.algebra_service import AlgebraService, NCPoly, Presentation, algebra_service
from app.services.datum_service import DatumService, VLDatum, datum_service
from app.services.quiver_service import (
    DYNKIN,
    EXTENDED_DYNKIN,
    WILD,
    AdjacencyMatrix,
    Classification,
    adjacency,
    cartan_matrix_series,
    classify,
    double,
    is_connected,
)
from app.services.series_service import (
    MatSeries,
    TruncSeries,
    first_difference,
    infinite_product_zeta,
    mat_det,
    mat_inv,
    power_product,
    substitute_power,
    sym_exp,
)

logger = logging.getLogger(__name__)

DYNKIN_WARNING = (
    "h(Pi) = (1 - tc + t^2)^-1 fails for Dynkin quivers (Pi is finite dimensional); "
    "values are the formal series only"
)
MOLIEN_TOLERANCE = 1e-10
GROUP_CAP = 1000
E_FACTORS = {6: [4, 6, 6], 7: [4, 6, 8], 8: [4, 6, 10]}


@dataclass(frozen=True)
class PreprojectiveSeries:
    hPi: MatSeries
    hOPi: Optional[TruncSeries]
    classification: Classification
    notes: Tuple[str, ...] = ()


@dataclass(frozen=True)
class PartialSeries:
    h: MatSeries
    hO: TruncSeries
    presentation: Presentation


@dataclass(frozen=True)
class ChebyshevTable:
    """kind2[k] = phi_k(c) from 1/(1 - tx + t^2); kind1[k] = phi_k - phi_{k-2} for k >= 2"""

    base: Tuple[Tuple[int, ...], ...]
    kind2: Tuple[Tuple[Tuple[int, ...], ...], ...]
    kind1: Tuple[Tuple[Tuple[int, ...], ...], ...]

    def kind2_entry(self, k: int, i: int, j: int) -> int:
        return self.kind2[k][i][j]

    def kind1_entry(self, k: int, i: int, j: int) -> int:
        return self.kind1[k][i][j]


@dataclass(frozen=True)
class FiniteSubgroupSL2:
    """
    A finite subgroup of SL_2(C).

    Cyclic groups are kept symbolically (exponents of a primitive n-th root
    of unity); the binary polyhedral groups carry numerical 2x2 matrices.
    """

    name: str
    order: int
    cyclic_n: Optional[int] = None
    elements: Tuple[np.ndarray, ...] = field(default=(), compare=False, repr=False)

    @property
    def exact(self) -> bool:
        return self.cyclic_n is not None


def _matmul(x: Sequence[Sequence[int]], y: Sequence[Sequence[int]]) -> List[List[int]]:
    n = len(x)
    return [[sum(x[i][k] * y[k][j] for k in range(n) if x[i][k]) for j in range(n)] for i in range(n)]


def _freeze(m: Sequence[Sequence[int]]) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(row) for row in m)


def _quaternion(a: float, b: float, c: float, d: float) -> np.ndarray:
    """a + bi + cj + dk as an SU(2) matrix"""
    return np.array([[complex(a, b), complex(c, d)], [complex(-c, d), complex(a, -b)]])


def _closure(generators: Sequence[np.ndarray]) -> List[np.ndarray]:
    """All products of the generators, deduplicated up to 1e-8"""
    elements = [np.eye(2, dtype=complex)]
    stack = np.array(elements)
    frontier = list(elements)
    while frontier:
        fresh = []
        for g in frontier:
            for s in generators:
                h = g @ s
                if not np.any(np.all(np.abs(stack - h) < 1e-8, axis=(1, 2))):
                    elements.append(h)
                    fresh.append(h)
                    stack = np.array(elements)
        if len(elements) > GROUP_CAP:
            raise RuntimeError(f"group closure exceeded {GROUP_CAP} elements")
        frontier = fresh
    return sorted(elements, key=lambda m: tuple(np.round(np.concatenate([m.real.ravel(), m.imag.ravel()]), 6)))


class PreproService:
    def __init__(self, datum: Optional[DatumService] = None, algebra: Optional[AlgebraService] = None,
                 det_bound: Optional[int] = None):
        self.datum = datum or datum_service
        self.algebra = algebra or algebra_service
        self.det_bound = DET_BOUND if det_bound is None else det_bound

    # -- preprojective algebras ------------------------------------------

    def _check_quiver(self, Q: QuiverModel) -> None:
        if any(e.degree != 1 for e in Q.edges):
            raise ValueError("preprojective constructions need all edge degrees equal to 1")
        if not is_connected(Q):
            raise ValueError("quiver is disconnected")

    def preprojective_presentation(self, Q: QuiverModel, vertices: Optional[Sequence[int]] = None) -> Presentation:
        """
        Doubled quiver with sum_{a: tail i} a a* - sum_{a: head i} a* a at each chosen vertex.

        Paths compose left to right, so a a* runs from the tail of a back to it.
        """
        self._check_quiver(Q)
        doubled = double(Q).as_quiver()
        edge_count = len(Q.edges)
        chosen = range(len(Q.vertices)) if vertices is None else vertices
        relations: List[NCPoly] = []
        for i in chosen:
            terms: List[Tuple[Fraction, Tuple[int, ...]]] = []
            for k, e in enumerate(Q.edges):
                if Q.index(e.tail) == i:
                    terms.append((Fraction(1), (k, k + edge_count)))
                if Q.index(e.head) == i:
                    terms.append((Fraction(-1), (k + edge_count, k)))
            if not terms:
                continue
            rho = self.algebra.make_poly(doubled, terms)
            if not rho.is_zero():
                relations.append(rho)
        return Presentation(doubled, relations)

    def preprojective_datum(self, Q: QuiverModel) -> VLDatum:
        """h(V) = t c, h(L) = t^2 1, m_2 = 1, with the explicit relations attached"""
        if not Q.edges:
            raise ValueError("preprojective datum needs at least one edge")
        presentation = self.preprojective_presentation(Q)
        c = adjacency(presentation.quiver)
        n = len(c)
        V = [[[0, c[i][j], 0] for j in range(n)] for i in range(n)]
        L = [[[0, 0, int(i == j)] for j in range(n)] for i in range(n)]
        return self.datum.make_datum(n, V, L, [0, 0, 1], presentation)

    def hilbert_preprojective(self, Q: QuiverModel, N: int, include_OPi: bool = True) -> PreprojectiveSeries:
        self._check_quiver(Q)
        verdict = classify(Q)
        c = adjacency(double(Q))
        cartan = cartan_matrix_series(c, N)
        notes: List[str] = []
        if verdict.kind == DYNKIN:
            logger.warning(f"⚠️ {verdict.type}: {DYNKIN_WARNING}")
            notes.append(DYNKIN_WARNING)
        hOPi = None
        if include_OPi:
            if verdict.kind != WILD:
                raise ValueError(
                    f"h(O(Pi)) needs a quiver that is neither Dynkin nor extended Dynkin; got {verdict.kind} {verdict.type}"
                )
            lam = TruncSeries.from_poly({0: 1, 2: -1}, N)
            hOPi = infinite_product_zeta(cartan, self.det_bound) * lam.inverse()
        return PreprojectiveSeries(mat_inv(cartan), hOPi, verdict, tuple(notes))

    def partial_preprojective(self, Q: QuiverModel, J: Sequence[str], N: int) -> PartialSeries:
        """Relations only at vertices outside J: h = (1 - c t + t^2 1_{I-J})^-1, no lambda factor"""
        self._check_quiver(Q)
        if not J:
            raise ValueError("J must be nonempty")
        unknown = [v for v in J if v not in Q.vertices]
        if unknown:
            raise ValueError(f"unknown vertex {unknown[0]!r} in J")
        frozen = {Q.index(v) for v in J}
        free = [i for i in range(len(Q.vertices)) if i not in frozen]
        presentation = self.preprojective_presentation(Q, free)
        c = adjacency(presentation.quiver)
        n = len(c)
        cartan = MatSeries([[TruncSeries.from_poly({0: int(i == j), 1: -c[i][j], 2: int(i == j and i not in frozen)}, N)
                             for j in range(n)] for i in range(n)])
        return PartialSeries(mat_inv(cartan), infinite_product_zeta(cartan, self.det_bound), presentation)

    # -- Chebyshev polynomials -------------------------------------------

    def chebyshev(self, c: AdjacencyMatrix, K: int) -> ChebyshevTable:
        n = len(c)
        one = [[int(i == j) for j in range(n)] for i in range(n)]
        kind2 = [one, [list(row) for row in c]]
        for k in range(2, K + 1):
            step = _matmul(c, kind2[k - 1])
            kind2.append([[step[i][j] - kind2[k - 2][i][j] for j in range(n)] for i in range(n)])
        kind2 = kind2[: K + 1]
        kind1 = [one, [list(row) for row in c]][: K + 1]
        for k in range(2, K + 1):
            kind1.append([[kind2[k][i][j] - kind2[k - 2][i][j] for j in range(n)] for i in range(n)])
        return ChebyshevTable(_freeze(c), tuple(_freeze(m) for m in kind2), tuple(_freeze(m) for m in kind1))

    def chebyshev_values(self, x: float, K: int) -> Tuple[List[float], List[float]]:
        """Scalar (kind2, kind1) values; kind1 at x = 2cos z is 2cos(kz) for k >= 1"""
        kind2 = [1.0, float(x)]
        for k in range(2, K + 1):
            kind2.append(x * kind2[k - 1] - kind2[k - 2])
        kind1 = [1.0, float(x)] + [kind2[k] - kind2[k - 2] for k in range(2, K + 1)]
        return kind2[: K + 1], kind1[: K + 1]

    # -- affine Dynkin identities ----------------------------------------

    def _require_affine(self, Q: QuiverModel) -> Classification:
        verdict = classify(Q)
        if verdict.kind != EXTENDED_DYNKIN:
            raise ValueError(f"quiver is {verdict.kind} ({verdict.type}), not extended Dynkin")
        return verdict

    def cartan_det(self, Q: QuiverModel, N: int) -> TruncSeries:
        """det(1 - tc + t^2 1) for the doubled quiver"""
        return mat_det(cartan_matrix_series(adjacency(double(Q)), N), self.det_bound)

    def affine_identity_check(self, Q: QuiverModel, N: int) -> IdentityReport:
        """prod_r det(1 - t^r c + t^2r 1) against prod_k (1 - t^k)^(kind1_k(c)_oo), per extending vertex"""
        verdict = self._require_affine(Q)
        c = adjacency(double(Q))
        det = self.cartan_det(Q, N)
        lhs = TruncSeries.one(N)
        for r in range(1, N + 1):
            lhs = lhs * substitute_power(det, r)
        table = self.chebyshev(c, N)
        rhs = None
        per_vertex: Dict[str, bool] = {}
        first_diff = None
        for o in verdict.extending_vertices:
            index = Q.index(o)
            candidate = power_product({k: table.kind1_entry(k, index, index) for k in range(1, N + 1)}, N)
            diff = first_difference(lhs, candidate)
            per_vertex[o] = diff is None
            if diff is not None and first_diff is None:
                first_diff = diff
            if rhs is None:
                rhs = candidate
        equal = all(per_vertex.values())
        if equal:
            logger.info(f"✅ affine identity holds for {verdict.type} to t^{N}")
        else:
            logger.error(f"❌ affine identity fails for {verdict.type} at t^{first_diff}")
        return IdentityReport(
            identity="affine_product",
            order=N,
            equal=equal,
            first_diff=first_diff,
            lhs=[str(x) for x in lhs],
            rhs=[str(x) for x in rhs],
            extra={"type": verdict.type, "extending_vertices": per_vertex},
        )

    def dynkin_D_closed_form(self, type_name: str, N: int) -> TruncSeries:
        """Closed form of det(1 - tc + t^2 1) for an extended Dynkin type name like ~D5"""
        family, rank = type_name.lstrip("~")[0], int(type_name.lstrip("~")[1:])
        # factors (1 - t^k), all but the A family divided by (1 - t^2)
        if family == "A":
            factors, divide = [rank + 1, rank + 1], False
        elif family == "D" and rank >= 4:
            factors, divide = [4, 4, 2 * rank - 4], True
        elif family == "E" and rank in E_FACTORS:
            factors, divide = E_FACTORS[rank], True
        else:
            raise ValueError(f"no closed form for {type_name}")
        value = TruncSeries.one(N)
        for k in factors:
            value = value * TruncSeries.from_poly({0: 1, k: -1}, N)
        if divide:
            value = value * TruncSeries.from_poly({0: 1, 2: -1}, N).inverse()
        return value

    def dynkin_D_polynomial(self, Q: QuiverModel, N: int) -> Tuple[TruncSeries, TruncSeries]:
        """(computed det, closed form); the two are equal polynomials once N >= 2|I|"""
        verdict = self._require_affine(Q)
        return self.cartan_det(Q, N), self.dynkin_D_closed_form(verdict.type, N)

    def affine_OPi_series(self, Q: QuiverModel, N: int) -> TruncSeries:
        """prod_{k>=1} (1 - t^k)^(-kind2_k(c)_oo) at an extending vertex o"""
        verdict = self._require_affine(Q)
        o = Q.index(verdict.extending_vertices[0])
        table = self.chebyshev(adjacency(double(Q)), N)
        return power_product({k: -table.kind2_entry(k, o, o) for k in range(1, N + 1)}, N)

    def extending_diagonal(self, Q: QuiverModel, N: int) -> TruncSeries:
        """sum_k kind2_k(c)_oo t^k"""
        verdict = self._require_affine(Q)
        o = Q.index(verdict.extending_vertices[0])
        table = self.chebyshev(adjacency(double(Q)), N)
        return TruncSeries([table.kind2_entry(k, o, o) for k in range(N + 1)], N)

    # -- finite subgroups of SL2 and Molien series -----------------------

    def cyclic_group(self, n: int) -> FiniteSubgroupSL2:
        if n < 1:
            raise ValueError(f"cyclic group order must be positive, got {n}")
        return FiniteSubgroupSL2(f"Z/{n}", n, cyclic_n=n)

    def binary_polyhedral_group(self, kind: str, n: int = 0) -> FiniteSubgroupSL2:
        """Binary dihedral (order 4n), tetrahedral, octahedral or icosahedral group"""
        golden = (1 + math.sqrt(5)) / 2
        i_unit = _quaternion(0, 1, 0, 0)
        j_unit = _quaternion(0, 0, 1, 0)
        if kind == "dihedral":
            if n < 2:
                raise ValueError(f"binary dihedral group needs n >= 2, got {n}")
            angle = cmath.exp(1j * math.pi / n)
            generators = [np.array([[angle, 0], [0, angle.conjugate()]]), np.array([[0, 1], [-1, 0]], dtype=complex)]
            name, expected = f"BD{4 * n}", 4 * n
        elif kind == "tetrahedral":
            generators = [i_unit, j_unit, _quaternion(0.5, 0.5, 0.5, 0.5)]
            name, expected = "2T", 24
        elif kind == "octahedral":
            generators = [i_unit, j_unit, _quaternion(0.5, 0.5, 0.5, 0.5), _quaternion(1 / math.sqrt(2), 1 / math.sqrt(2), 0, 0)]
            name, expected = "2O", 48
        elif kind == "icosahedral":
            generators = [i_unit, _quaternion(0.5, 0.5, 0.5, 0.5), _quaternion(golden / 2, 1 / (2 * golden), 0.5, 0)]
            name, expected = "2I", 120
        else:
            raise ValueError(f"unknown binary polyhedral group {kind!r}")
        elements = _closure(generators)
        if len(elements) != expected:
            raise RuntimeError(f"{name} closure produced {len(elements)} elements, expected {expected}")
        for g in elements:
            if abs(np.linalg.det(g) - 1) > 1e-9:
                raise RuntimeError(f"{name} element with determinant {np.linalg.det(g)}")
        return FiniteSubgroupSL2(name, expected, elements=tuple(elements))

    def mckay_group(self, type_name: str) -> FiniteSubgroupSL2:
        """The subgroup of SL2 whose McKay quiver is the given extended Dynkin type"""
        family, rank = type_name.lstrip("~")[0], int(type_name.lstrip("~")[1:])
        if family == "A":
            return self.cyclic_group(rank + 1)
        if family == "D":
            return self.binary_polyhedral_group("dihedral", rank - 2)
        kinds = {6: "tetrahedral", 7: "octahedral", 8: "icosahedral"}
        if family == "E" and rank in kinds:
            return self.binary_polyhedral_group(kinds[rank])
        raise ValueError(f"no McKay group for {type_name}")

    def molien_series(self, G: FiniteSubgroupSL2, N: int) -> TruncSeries:
        """(1/|G|) sum_g 1/det(1 - t g), coefficient m being the average of kind2_m(tr g)"""
        if G.exact:
            return self._molien_cyclic(G.cyclic_n, N)
        totals = [0.0] * (N + 1)
        for g in G.elements:
            trace = float(np.trace(g).real)
            values, _ = self.chebyshev_values(trace, N)
            for m, v in enumerate(values):
                totals[m] += v
        coeffs = []
        for m, total in enumerate(totals):
            average = total / G.order
            value = Fraction(average).limit_denominator(G.order)
            if abs(float(value) - average) > MOLIEN_TOLERANCE * max(1.0, abs(average)) or value.denominator != 1:
                raise ArithmeticError(f"Molien coefficient t^{m} = {average} is not an integer")
            coeffs.append(int(value))
        return TruncSeries(coeffs, N)

    def _molien_cyclic(self, n: int, N: int) -> TruncSeries:
        """Exact average over diag(z^k, z^-k), arithmetic in Q[x]/Phi_n(x)"""
        x = symbols("x")
        modulus = Poly(cyclotomic_poly(n, x), x)
        sums = [Poly(0, x) for _ in range(N + 1)]
        for k in range(n):
            trace = Poly(x ** (k % n) + x ** ((-k) % n), x).rem(modulus)
            previous, current = Poly(1, x), trace
            sums[0] += previous
            if N >= 1:
                sums[1] += current
            for m in range(2, N + 1):
                previous, current = current, (trace * current - previous).rem(modulus)
                sums[m] += current
        coeffs = []
        for m, total in enumerate(sums):
            total = total.rem(modulus)
            if total.degree() > 0:
                raise ArithmeticError(f"Molien sum at t^{m} is not rational: {total}")
            value = Fraction(int(total.coeff_monomial(1)), n)
            if value.denominator != 1:
                raise ArithmeticError(f"Molien coefficient t^{m} = {value} is not an integer")
            coeffs.append(int(value))
        return TruncSeries(coeffs, N)

    # -- one-relator algebras A_{g,n} ------------------------------------

    def a_g_n_series(self, g: int, n: int, N: int) -> Dict[str, TruncSeries]:
        """
        A_{g,n} = C<x_1..x_g, y_1..y_g>/((sum [x_i, y_i])^n).

        n = 1 is the preprojective algebra of the g-loop quiver.
        """
        if g == 1:
            raise ValueError("the formula fails if g = 1")
        if g < 1 or n < 1:
            raise ValueError(f"need g > 1 and n >= 1, got g={g}, n={n}")
        one = TruncSeries.one(N)
        if n == 1:
            denominator = TruncSeries.from_poly({0: 1, 1: -2 * g, 2: 1}, N)
            hA = denominator.inverse()
            hOA = TruncSeries.from_poly({0: 1, 2: -1}, N).inverse()
            for s in range(1, N + 1):
                hOA = hOA * substitute_power(denominator, s).inverse()
            return {"hA": hA, "hOA": hOA}
        denominator = TruncSeries.from_poly({0: 1, 1: -2 * g, 2 * n + 1: 2 * g, 2 * n + 2: -1}, N)
        numerator = TruncSeries.from_poly({0: 1, 2 * n: -1}, N)
        hA = numerator * denominator.inverse()
        hOA = one
        for s in range(1, N + 1):
            factor = TruncSeries.from_poly({0: 1, 2 * (n - 1 + s): -1}, N)
            hOA = hOA * factor * substitute_power(denominator, s).inverse()
        return {"hA": hA, "hOA": hOA}

    def truncated_polynomial_ring(self, n: int, N: int) -> Tuple[MatSeries, TruncSeries]:
        """h(D) and h(O(D)) for D = C[z]/(z^n), deg z = 2"""
        hD = TruncSeries.from_poly({2 * k: 1 for k in range(n)}, N)
        hOD = TruncSeries.one(N)
        for i in range(1, n):
            hOD = hOD * TruncSeries.from_poly({0: 1, 2 * i: -1}, N).inverse()
        return MatSeries([[hD]]), hOD

    # -- quiver varieties ------------------------------------------------

    def quiver_variety_exponents(self, Q: QuiverModel, w: Sequence[int], K: int) -> List[int]:
        """<w, kind2_k(c) w> for k = 0..K"""
        if len(w) != len(Q.vertices):
            raise ValueError(f"dimension vector needs {len(Q.vertices)} entries, got {len(w)}")
        table = self.chebyshev(adjacency(double(Q)), K)
        n = len(w)
        return [sum(table.kind2_entry(k, i, j) * w[i] * w[j] for i in range(n) for j in range(n))
                for k in range(K + 1)]

    def quiver_variety_limit_series(self, Q: QuiverModel, w: Sequence[int], N: int) -> TruncSeries:
        """zeta(Q) prod_{k>=0} (1 - t^(k+2))^(-<w, kind2_k(c) w>)"""
        self._check_quiver(Q)
        verdict = classify(Q)
        if verdict.kind == DYNKIN:
            raise ValueError(f"quiver variety limit needs a non-Dynkin quiver; got {verdict.type}")
        if any(x < 0 for x in w) or not any(w):
            raise ValueError("dimension vector w must be nonnegative and nonzero")
        exponents = self.quiver_variety_exponents(Q, w, max(N - 2, 0))
        zeta = infinite_product_zeta(cartan_matrix_series(adjacency(double(Q)), N), self.det_bound)
        framing = TruncSeries.from_poly({k + 2: e for k, e in enumerate(exponents)}, N)
        return zeta * sym_exp(framing)


# Global service instance
prepro_service = PreproService()
