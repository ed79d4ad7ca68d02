"""
Brute-force oracle for quotients of weighted path algebras.

Graded dimensions of A = F/(relations), of the commutator quotient
A/[A,A] and of L ∩ [F,F] are computed by exact rational linear algebra,
one weight at a time. Nothing here uses floating point.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from app.config import PATH_CAP
from app.models import PresentationModel, QuiverModel
from app.services.series_service import MatSeries, TruncSeries

logger = logging.getLogger(__name__)

PathKey = Tuple[int, ...]
Vector = Dict[tuple, Fraction]


@dataclass(frozen=True)
class Path:
    edges: PathKey
    tail: int
    head: int
    weight: int


@dataclass(frozen=True)
class NCPoly:
    """Homogeneous element of the path algebra: terms share tail, head and weight"""

    terms: Tuple[Tuple[PathKey, Fraction], ...]
    tail: int
    head: int
    weight: int

    def as_vector(self) -> Vector:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms


@dataclass
class Presentation:
    quiver: QuiverModel
    relations: List[NCPoly] = field(default_factory=list)

    @property
    def vertex_count(self) -> int:
        return len(self.quiver.vertices)


@dataclass(frozen=True)
class CommutatorSubspace:
    weight: int
    spanning: Tuple[NCPoly, ...]
    rank: int
    quotient_dim: int


class EchelonBasis:
    """Rows with pairwise distinct leading keys (the largest key of each row)"""

    def __init__(self):
        self.rows: Dict[tuple, Vector] = {}

    def __len__(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Vector) -> Vector:
        vec = {k: c for k, c in vec.items() if c}
        while vec:
            lead = max(vec)
            row = self.rows.get(lead)
            if row is None:
                return vec
            factor = vec[lead]
            for k, c in row.items():
                value = vec.get(k, 0) - factor * c
                if value:
                    vec[k] = value
                else:
                    vec.pop(k, None)
        return vec

    def insert(self, vec: Vector) -> bool:
        """Reduce and add; False when the vector was already in the span"""
        vec = self.reduce(vec)
        if not vec:
            return False
        self.insert_reduced(vec)
        return True

    def insert_reduced(self, vec: Vector) -> None:
        lead = max(vec)
        pivot = vec[lead]
        self.rows[lead] = {k: c / pivot for k, c in vec.items()} if pivot != 1 else vec


def rotation_class(edges: PathKey) -> PathKey:
    """Lexicographically smallest rotation of a closed path"""
    return min(edges[k:] + edges[:k] for k in range(len(edges)))


class AlgebraService:
    def __init__(self, path_cap: Optional[int] = None):
        self.path_cap = PATH_CAP if path_cap is None else path_cap

    # -- presentations ---------------------------------------------------

    def edge_table(self, q: QuiverModel) -> List[Tuple[int, int, int]]:
        """(tail index, head index, degree) per edge"""
        return [(q.index(e.tail), q.index(e.head), e.degree) for e in q.edges]

    def make_poly(self, q: QuiverModel, terms: Sequence[Tuple[Fraction, PathKey]]) -> NCPoly:
        edges = self.edge_table(q)
        collected: Dict[PathKey, Fraction] = {}
        shape = None
        for coeff, path in terms:
            if not path:
                raise ValueError("relations must have positive weight")
            for a, b in zip(path, path[1:]):
                if edges[a][1] != edges[b][0]:
                    raise ValueError(f"edges {a} and {b} do not compose")
            key = (edges[path[0]][0], edges[path[-1]][1], sum(edges[e][2] for e in path))
            if shape is None:
                shape = key
            elif key != shape:
                raise ValueError("relation is not homogeneous in (tail, head, weight)")
            collected[path] = collected.get(path, Fraction(0)) + Fraction(coeff)
        if shape is None:
            raise ValueError("empty relation")
        nonzero = tuple(sorted((p, c) for p, c in collected.items() if c))
        return NCPoly(nonzero, *shape)

    def presentation_from_model(self, model: PresentationModel) -> Presentation:
        q = model.quiver
        names = {name: k for k, name in enumerate(q.edge_names())}
        relations = []
        for terms in model.relations:
            parsed = []
            for term in terms:
                try:
                    path = tuple(names[name] for name in term.path)
                except KeyError as e:
                    raise ValueError(f"unknown edge {e.args[0]!r} in relation") from e
                parsed.append((Fraction(term.coeff), path))
            poly = self.make_poly(q, parsed)
            if poly.is_zero():
                raise ValueError("relation cancels to zero")
            relations.append(poly)
        return Presentation(quiver=q, relations=relations)

    # -- paths -----------------------------------------------------------

    def _paths_from(self, q: QuiverModel, start: int, r: int) -> Iterator[PathKey]:
        """Paths of weight exactly r >= 1 with tail `start`, lexicographic order"""
        edges = self.edge_table(q)
        outgoing: Dict[int, List[int]] = {}
        for k, (t, _, _) in enumerate(edges):
            outgoing.setdefault(t, []).append(k)
        stack: List[Tuple[PathKey, int, int]] = [((), start, 0)]
        produced = 0
        while stack:
            path, vertex, weight = stack.pop()
            if weight == r:
                produced += 1
                if produced > self.path_cap:
                    raise RuntimeError(f"path cap exceeded ({self.path_cap}) at weight {r}; raise --path-cap")
                yield path
                continue
            for k in reversed(outgoing.get(vertex, [])):
                w = weight + edges[k][2]
                if w <= r:
                    stack.append((path + (k,), edges[k][1], w))

    def enumerate_paths(self, q: QuiverModel, r: int) -> List[Path]:
        """All paths of weight exactly r, ordered by (edge sequence, tail)"""
        if r < 0:
            raise ValueError(f"weight must be nonnegative, got {r}")
        if r == 0:
            return [Path((), v, v, 0) for v in range(len(q.vertices))]
        edges = self.edge_table(q)
        keys: List[PathKey] = []
        for start in range(len(q.vertices)):
            keys.extend(self._paths_from(q, start, r))
            if len(keys) > self.path_cap:
                raise RuntimeError(f"path cap exceeded ({self.path_cap}) at weight {r}; raise --path-cap")
        keys.sort()
        return [Path(k, edges[k[0]][0], edges[k[-1]][1], r) for k in keys]

    def path_counts(self, q: QuiverModel, order: int) -> MatSeries:
        """h(F) entrywise by counting, without enumeration"""
        n = len(q.vertices)
        edges = self.edge_table(q)
        counts = [[[int(i == j) for j in range(n)] for i in range(n)]]
        for r in range(1, order + 1):
            layer = [[0] * n for _ in range(n)]
            for t, h, d in edges:
                if d <= r:
                    previous = counts[r - d]
                    for i in range(n):
                        if previous[i][t]:
                            layer[i][h] += previous[i][t]
            counts.append(layer)
        return MatSeries.from_coefficients(counts, order)

    # -- ideal components ------------------------------------------------

    def _ideal_bases(self, p: Presentation, order: int) -> List[EchelonBasis]:
        """Echelon bases of I[r], r = 0..order, via I[r] = sum_e e.I[r-deg e] + sum_rho rho.F[r-|rho|]"""
        edges = self.edge_table(p.quiver)
        bases: List[EchelonBasis] = [EchelonBasis()]
        for r in range(1, order + 1):
            basis = EchelonBasis()
            for k, (_, head, degree) in enumerate(edges):
                if degree > r:
                    continue
                for lead, row in bases[r - degree].rows.items():
                    first = next(iter(row))
                    if edges[first[0]][0] != head:
                        continue
                    basis.rows[(k,) + lead] = {(k,) + path: c for path, c in row.items()}
            for rho in p.relations:
                if rho.weight > r:
                    continue
                rest = r - rho.weight
                tails = [()] if rest == 0 else self._paths_from(p.quiver, rho.head, rest)
                for q in tails:
                    basis.insert({path + q: c for path, c in rho.terms})
            bases.append(basis)
            logger.info(f"✅ weight {r}: ideal rank {len(basis)}")
        return bases

    def brute_algebra_matrix(self, p: Presentation, order: int) -> MatSeries:
        """h(A) entrywise: dim F[r]_ij minus the rank of the ideal component"""
        logger.info(f"🔄 brute-force algebra dimensions to order {order}")
        edges = self.edge_table(p.quiver)
        free = self.path_counts(p.quiver, order)
        bases = self._ideal_bases(p, order)
        layers = [free.coefficient_matrix(0)]
        for r in range(1, order + 1):
            layer = free.coefficient_matrix(r)
            for row in bases[r].rows.values():
                path = next(iter(row))
                layer[edges[path[0]][0]][edges[path[-1]][1]] -= 1
            layers.append(layer)
        return MatSeries.from_coefficients(layers, order)

    def brute_algebra_dims(self, p: Presentation, order: int) -> TruncSeries:
        return self.brute_algebra_matrix(p, order).total()

    # -- commutators -----------------------------------------------------

    def _closed(self, q: QuiverModel, path: PathKey) -> bool:
        edges = self.edge_table(q)
        return edges[path[0]][0] == edges[path[-1]][1]

    def _project(self, q: QuiverModel, vec: Vector) -> Vector:
        """Image in F/[F,F]: closed paths go to their rotation class, the rest to zero"""
        edges = self.edge_table(q)
        image: Vector = {}
        for path, c in vec.items():
            if edges[path[0]][0] == edges[path[-1]][1]:
                key = rotation_class(path)
                image[key] = image.get(key, 0) + c
        return {k: c for k, c in image.items() if c}

    def necklace_count(self, q: QuiverModel, r: int) -> int:
        """dim (F/[F,F])[r]: rotation classes of closed paths"""
        if r == 0:
            return len(q.vertices)
        classes = set()
        for start in range(len(q.vertices)):
            for path in self._paths_from(q, start, r):
                if self._closed(q, path):
                    classes.add(rotation_class(path))
        return len(classes)

    def commutator_subspace(self, q: QuiverModel, r: int) -> CommutatorSubspace:
        """
        [F,F][r]: open paths, and w - rot(w) for closed w.

        Single-step rotations span the same space as all rotation cuts.
        """
        if r < 1:
            raise ValueError(f"commutator subspace needs weight >= 1, got {r}")
        edges = self.edge_table(q)
        spanning: List[NCPoly] = []
        open_count = 0
        closed = EchelonBasis()
        total = 0
        for start in range(len(q.vertices)):
            for path in self._paths_from(q, start, r):
                total += 1
                tail, head = edges[path[0]][0], edges[path[-1]][1]
                if tail != head:
                    open_count += 1
                    spanning.append(NCPoly(((path, Fraction(1)),), tail, head, r))
                    continue
                turned = path[1:] + path[:1]
                if turned == path:
                    continue
                terms = tuple(sorted([(path, Fraction(1)), (turned, Fraction(-1))]))
                poly = NCPoly(terms, tail, tail, r)
                spanning.append(poly)
                closed.insert(poly.as_vector())
        rank = open_count + len(closed)
        return CommutatorSubspace(r, tuple(spanning), rank, total - rank)

    def compute_L_circ(self, p: Presentation, order: int) -> TruncSeries:
        """m_r = dim (span of relations)[r] ∩ [F,F][r]"""
        m = [0] * (order + 1)
        for r in range(1, order + 1):
            span = EchelonBasis()
            for rho in p.relations:
                if rho.weight == r:
                    span.insert(rho.as_vector())
            if not span.rows:
                continue
            image = EchelonBasis()
            for row in span.rows.values():
                image.insert(self._project(p.quiver, row))
            m[r] = len(span) - len(image)
        return TruncSeries(m, order)

    def relation_dims(self, p: Presentation, order: int) -> List[List[List[int]]]:
        """dims[i][j][r] of the span of the relations (independent part only)"""
        n = p.vertex_count
        dims = [[[0] * (order + 1) for _ in range(n)] for _ in range(n)]
        spans: Dict[Tuple[int, int, int], EchelonBasis] = {}
        for rho in p.relations:
            if rho.weight > order:
                continue
            key = (rho.tail, rho.head, rho.weight)
            if spans.setdefault(key, EchelonBasis()).insert(rho.as_vector()):
                dims[rho.tail][rho.head][rho.weight] += 1
        return dims

    def brute_cyclic_dims(self, p: Presentation, order: int) -> TruncSeries:
        """dim (A/[A,A])[r] = necklaces(r) - rank of the trace classes of rho.F"""
        logger.info(f"🔄 brute-force cyclic dimensions to order {order}")
        dims = [p.vertex_count]
        for r in range(1, order + 1):
            image = EchelonBasis()
            for rho in p.relations:
                if rho.weight > r:
                    continue
                rest = r - rho.weight
                tails = [()] if rest == 0 else self._paths_from(p.quiver, rho.head, rest)
                for q in tails:
                    vec = self._project(p.quiver, {path + q: c for path, c in rho.terms})
                    if vec:
                        image.insert(vec)
            dims.append(self.necklace_count(p.quiver, r) - len(image))
        return TruncSeries(dims, order)

    # -- Euler defect ----------------------------------------------------

    def anick_defect(self, p: Presentation, hA: MatSeries, hV: MatSeries, hL: MatSeries) -> MatSeries:
        """h(A)·(h(A)·(1 - h(V) + h(L)) - 1); zero exactly when h(A) is the predicted inverse"""
        n = p.vertex_count
        for name, m in (("h(A)", hA), ("h(V)", hV), ("h(L)", hL)):
            if m.dim != n:
                raise ValueError(f"shape mismatch: {name} is {m.dim}x{m.dim}, quiver has {n} vertices")
        one = MatSeries.identity(n, hA.order)
        return hA * (hA * (one - hV + hL) - one)


def first_nonzero(m: MatSeries) -> Optional[Tuple[int, int, int]]:
    """(power, i, j) of the lowest nonzero coefficient"""
    for k in range(m.order + 1):
        for i in range(m.dim):
            for j in range(m.dim):
                if m.entries[i][j].coeffs[k]:
                    return k, i, j
    return None


# Global service instance
algebra_service = AlgebraService()
