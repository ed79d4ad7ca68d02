"""
(V,L)-data and their closed-form Hilbert series
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from app.config import DET_BOUND
from app.models import DatumModel, EdgeModel, QuiverModel
from app.services.algebra_service import AlgebraService, NCPoly, Presentation, algebra_service
from app.services.series_service import (
    MatSeries,
    TruncSeries,
    infinite_product_zeta,
    mat_inv,
    power_product,
    sym_log,
)

logger = logging.getLogger(__name__)

DimTable = Tuple[Tuple[Tuple[int, ...], ...], ...]

RCI_NOTE = (
    "h(O(A)) = zeta/lambda assumes A is an RCI or asymptotic RCI; "
    "the hypothesis is not checked"
)


@dataclass(frozen=True)
class VLDatum:
    """
    Signed graded dimensions of V and L, indexed [i][j][r].

    Odd parts enter with a minus sign, so every series below is the
    super-dimension series.
    """

    dim_I: int
    dimsV: DimTable
    dimsL: DimTable
    m: Tuple[int, ...]
    presentation: Optional[Presentation] = field(default=None, compare=False)

    @property
    def max_weight(self) -> int:
        return max(len(self.dimsV[0][0]), len(self.dimsL[0][0]), len(self.m)) - 1


@dataclass(frozen=True)
class HochschildSeries:
    hHH0: TruncSeries
    hHH1: TruncSeries
    hHH2: TruncSeries

    def to_json(self) -> Dict[str, object]:
        return {"hHH0": self.hHH0.to_json(), "hHH1": self.hHH1.to_json(), "hHH2": self.hHH2.to_json()}


def _table(dim_I: int, rows: Sequence[Sequence[Sequence[int]]], name: str) -> DimTable:
    if len(rows) != dim_I or any(len(row) != dim_I for row in rows):
        raise ValueError(f"{name} must be {dim_I}x{dim_I}")
    width = max((len(cell) for row in rows for cell in row), default=0)
    width = max(width, 1)
    table = tuple(tuple(tuple(int(x) for x in cell) + (0,) * (width - len(cell)) for cell in row) for row in rows)
    if any(cell[0] for row in table for cell in row):
        raise ValueError(f"{name} must vanish in weight 0 (positively graded)")
    return table


def _pad(table: DimTable, width: int) -> DimTable:
    return tuple(tuple(cell + (0,) * (width - len(cell)) for cell in row) for row in table)


def _series_matrix(table: DimTable, order: int) -> MatSeries:
    return MatSeries([[TruncSeries.from_poly(list(cell), order) for cell in row] for row in table])


class DatumService:
    def __init__(self, algebra: Optional[AlgebraService] = None, det_bound: Optional[int] = None):
        self.algebra = algebra or algebra_service
        self.det_bound = DET_BOUND if det_bound is None else det_bound

    # -- construction ----------------------------------------------------

    def make_datum(
        self,
        dim_I: int,
        dimsV: Sequence[Sequence[Sequence[int]]],
        dimsL: Optional[Sequence[Sequence[Sequence[int]]]] = None,
        m: Optional[Sequence[int]] = None,
        presentation: Optional[Presentation] = None,
    ) -> VLDatum:
        if dim_I < 1:
            raise ValueError(f"dim_I must be positive, got {dim_I}")
        V = _table(dim_I, dimsV, "dimsV")
        L = _table(dim_I, dimsL if dimsL is not None else [[[0]] * dim_I for _ in range(dim_I)], "dimsL")
        width = max(len(V[0][0]), len(L[0][0]), len(m) if m is not None else 0)
        V, L = _pad(V, width), _pad(L, width)
        if m is None:
            if presentation is not None:
                m = list(self.algebra.compute_L_circ(presentation, width - 1).coeffs)
            elif any(x for row in L for cell in row for x in cell):
                raise ValueError("m is required when L is nonzero and no presentation is given")
            else:
                m = [0] * width
        m = tuple(int(x) for x in m) + (0,) * (width - len(m))
        if m[0]:
            raise ValueError("m must vanish in weight 0")
        datum = VLDatum(dim_I, V, L, m, presentation)
        if presentation is not None:
            self._check_against(datum, presentation)
        return datum

    def _check_against(self, d: VLDatum, p: Presentation) -> None:
        """dimsV, dimsL and m must be those of the presentation"""
        expected = self.datum_from_presentation(p, d.max_weight)
        if expected.dim_I != d.dim_I:
            raise ValueError("presentation has a different vertex count")
        width = max(d.max_weight, expected.max_weight) + 1
        if _pad(expected.dimsV, width) != _pad(d.dimsV, width):
            raise ValueError("dimsV disagrees with the attached presentation")
        if _pad(expected.dimsL, width) != _pad(d.dimsL, width):
            raise ValueError("dimsL disagrees with the attached presentation")
        if expected.m + (0,) * (width - len(expected.m)) != d.m + (0,) * (width - len(d.m)):
            raise ValueError("m disagrees with compute_L_circ of the attached presentation")

    def datum_from_presentation(self, p: Presentation, weight: Optional[int] = None) -> VLDatum:
        n = p.vertex_count
        edges = self.algebra.edge_table(p.quiver)
        top = max([d for _, _, d in edges] + [rho.weight for rho in p.relations] + [1])
        if weight is not None:
            top = max(top, weight)
        V = [[[0] * (top + 1) for _ in range(n)] for _ in range(n)]
        for t, h, d in edges:
            V[t][h][d] += 1
        L = self.algebra.relation_dims(p, top)
        m = self.algebra.compute_L_circ(p, top).coeffs
        return VLDatum(n, _table(n, V, "dimsV"), _table(n, L, "dimsL"), tuple(m), p)

    def datum_from_model(self, model: DatumModel) -> VLDatum:
        """Explicit dimensions, or an attached presentation"""
        if model.presentation is not None:
            return self.datum_from_presentation(self.algebra.presentation_from_model(model.presentation))
        if model.dimsV is None:
            raise ValueError("datum file has no explicit dimensions or presentation")
        dim_I = model.dim_I if model.dim_I is not None else len(model.dimsV)
        return self.make_datum(dim_I, model.dimsV, model.dimsL, model.m)

    def free_datum(self, generators: Sequence[int], odd: Sequence[int] = ()) -> VLDatum:
        """One vertex, even generators of the given degrees plus odd generators"""
        width = max(list(generators) + list(odd) + [1]) + 1
        cell = [0] * width
        for deg in generators:
            cell[deg] += 1
        for deg in odd:
            cell[deg] -= 1
        return self.make_datum(1, [[cell]])

    # -- series ----------------------------------------------------------

    def hV(self, d: VLDatum, N: int) -> MatSeries:
        return _series_matrix(d.dimsV, N)

    def hL(self, d: VLDatum, N: int) -> MatSeries:
        return _series_matrix(d.dimsL, N)

    def cartan_poly(self, d: VLDatum, N: int) -> MatSeries:
        """1 - h(V) + h(L)"""
        return MatSeries.identity(d.dim_I, N) - self.hV(d, N) + self.hL(d, N)

    def hilbert_A(self, d: VLDatum, N: int) -> MatSeries:
        return mat_inv(self.cartan_poly(d, N))

    def m_series(self, d: VLDatum, N: int) -> TruncSeries:
        return TruncSeries.from_poly(list(d.m), N)

    def lambda_poly(self, d: VLDatum, N: int) -> TruncSeries:
        """prod_r (1 - t^r)^(m_r)"""
        return power_product({r: x for r, x in enumerate(d.m) if r and x}, N)

    def zeta(self, d: VLDatum, N: int) -> TruncSeries:
        return infinite_product_zeta(self.cartan_poly(d, N), self.det_bound)

    def hilbert_OA(self, d: VLDatum, N: int) -> TruncSeries:
        logger.debug(f"⚠️ {RCI_NOTE}")
        return self.zeta(d, N) * self.lambda_poly(d, N).inverse()

    def hochschild_series(self, d: VLDatum, N: int) -> HochschildSeries:
        """HH_2 = L°, HH_0 = R + Sym-log of h(O(A)), HH_1 from the four-term exact sequence"""
        hOA = self.hilbert_OA(d, N)
        positive = sym_log(hOA)
        hHH2 = self.m_series(d, N)
        hHH0 = positive + d.dim_I
        hHH1 = positive + hHH2
        return HochschildSeries(hHH0, hHH1, hHH2)

    def euler_defect(self, d: VLDatum, hh: HochschildSeries) -> TruncSeries:
        """|I| - hHH0 + hHH1 - hHH2, zero coefficientwise"""
        return hh.hHH1 - hh.hHH0 - hh.hHH2 + d.dim_I

    def sym_hh1_series(self, d: VLDatum, N: int) -> TruncSeries:
        """h(Sym HH_1) = zeta / lambda^2"""
        return self.zeta(d, N) * (self.lambda_poly(d, N) ** -2)

    def expected_rep_dimension(self, d: VLDatum, dims: Sequence[int]) -> int:
        """dim V_d - dim L_d + dim L° for the dimension vector d"""
        if len(dims) != d.dim_I:
            raise ValueError(f"dimension vector needs {d.dim_I} entries, got {len(dims)}")
        total = 0
        for i in range(d.dim_I):
            for j in range(d.dim_I):
                total += (sum(d.dimsV[i][j]) - sum(d.dimsL[i][j])) * dims[i] * dims[j]
        return total + sum(d.m)

    # -- products --------------------------------------------------------

    def free_product(self, d1: VLDatum, d2: VLDatum, N: int) -> MatSeries:
        """(h(A1)^-1 + h(A2)^-1 - 1)^-1 over the same R"""
        if d1.dim_I != d2.dim_I:
            raise ValueError(f"shape mismatch: |I| = {d1.dim_I} vs {d2.dim_I}")
        one = MatSeries.identity(d1.dim_I, N)
        return mat_inv(mat_inv(self.hilbert_A(d1, N)) + mat_inv(self.hilbert_A(d2, N)) - one)

    def free_product_datum(self, d1: VLDatum, d2: VLDatum) -> VLDatum:
        """(V1 + V2, L1 + L2), with the concatenated presentation when both have one"""
        if d1.dim_I != d2.dim_I:
            raise ValueError(f"shape mismatch: |I| = {d1.dim_I} vs {d2.dim_I}")
        width = max(d1.max_weight, d2.max_weight) + 1
        V1, V2 = _pad(d1.dimsV, width), _pad(d2.dimsV, width)
        L1, L2 = _pad(d1.dimsL, width), _pad(d2.dimsL, width)
        n = d1.dim_I
        V = [[[a + b for a, b in zip(V1[i][j], V2[i][j])] for j in range(n)] for i in range(n)]
        L = [[[a + b for a, b in zip(L1[i][j], L2[i][j])] for j in range(n)] for i in range(n)]
        m1 = d1.m + (0,) * (width - len(d1.m))
        m2 = d2.m + (0,) * (width - len(d2.m))
        presentation = None
        if d1.presentation is not None and d2.presentation is not None:
            presentation = concatenate_presentations(d1.presentation, d2.presentation)
        return VLDatum(n, _table(n, V, "dimsV"), _table(n, L, "dimsL"),
                       tuple(a + b for a, b in zip(m1, m2)), presentation)

    def circ_product_hilbert(self, hV: MatSeries, hL: MatSeries, hD: MatSeries, N: int) -> MatSeries:
        """[1 - h(D)(h(V) - h(L))]^-1 h(D), for B an NCCI"""
        hV, hL, hD = (_at_order(x, N) for x in (hV, hL, hD))
        one = MatSeries.identity(hV.dim, N)
        return mat_inv(one - hD * (hV - hL)) * hD

    def circ_product_OA(
        self, hV: MatSeries, hL: MatSeries, hD: MatSeries, hOD: TruncSeries, mQ: Sequence[int], N: int
    ) -> TruncSeries:
        """h(O(D)) / (lambda(Q) prod_s det(1 - h(D)(h(V) - h(L)))(t^s)), for B an asymptotic RCI"""
        hV, hL, hD = (_at_order(x, N) for x in (hV, hL, hD))
        if hOD.order < N:
            raise ValueError(f"order mismatch: h(O(D)) has order {hOD.order}, need {N}")
        hOD = hOD.truncate(N)
        one = MatSeries.identity(hV.dim, N)
        lam = power_product({r: x for r, x in enumerate(mQ) if r and x}, N)
        return hOD * lam.inverse() * infinite_product_zeta(one - hD * (hV - hL), self.det_bound)


def _at_order(m: MatSeries, N: int) -> MatSeries:
    if m.order < N:
        raise ValueError(f"order mismatch: input has order {m.order}, need {N}")
    return m if m.order == N else m.truncate(N)


def concatenate_presentations(p1: Presentation, p2: Presentation) -> Presentation:
    """Generators and relations of both, over the same vertex set"""
    if p1.quiver.vertices != p2.quiver.vertices:
        raise ValueError("free product needs the same vertex set on both sides")
    names1, names2 = p1.quiver.edge_names(), p2.quiver.edge_names()
    if set(names1) & set(names2):
        raise ValueError("edge names collide between the two presentations")
    edges: List[EdgeModel] = [e.model_copy(update={"name": name}) for e, name in zip(p1.quiver.edges, names1)]
    edges += [e.model_copy(update={"name": name}) for e, name in zip(p2.quiver.edges, names2)]
    shift = len(p1.quiver.edges)
    moved = [
        NCPoly(tuple((tuple(e + shift for e in path), c) for path, c in rho.terms), rho.tail, rho.head, rho.weight)
        for rho in p2.relations
    ]
    return Presentation(QuiverModel(vertices=p1.quiver.vertices, edges=edges), list(p1.relations) + moved)


# Global service instance
datum_service = DatumService()
