"""
Quiver service: doubling, adjacency matrices, Dynkin / extended Dynkin classification
"""
import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from app.models import EdgeModel, QuiverModel
from app.services.series_service import MatSeries, TruncSeries

logger = logging.getLogger(__name__)

AdjacencyMatrix = List[List[int]]

DYNKIN = "Dynkin"
EXTENDED_DYNKIN = "ExtendedDynkin"
WILD = "Wild"


@dataclass(frozen=True)
class DoubledEdge:
    name: str
    tail: str
    head: str
    degree: int
    starred: bool


@dataclass(frozen=True)
class DoubledQuiver:
    base: QuiverModel
    edges: Tuple[DoubledEdge, ...]

    @property
    def vertices(self) -> List[str]:
        return self.base.vertices

    def as_quiver(self) -> QuiverModel:
        return QuiverModel(
            vertices=self.base.vertices,
            edges=[EdgeModel(tail=e.tail, head=e.head, degree=e.degree, name=e.name) for e in self.edges],
        )


@dataclass(frozen=True)
class Classification:
    kind: str
    type: str
    extending_vertices: Tuple[str, ...] = ()

    def to_json(self) -> Dict[str, object]:
        return {"kind": self.kind, "type": self.type, "extending_vertices": list(self.extending_vertices)}


def make_quiver(vertices: Sequence[object], edges: Sequence[Tuple[object, object]], degree: int = 1) -> QuiverModel:
    """Build a quiver from (tail, head) pairs, all of one degree"""
    return QuiverModel(
        vertices=[str(v) for v in vertices],
        edges=[EdgeModel(tail=str(t), head=str(h), degree=degree) for t, h in edges],
    )


def star_name(name: str) -> str:
    return f"{name}*"


def double(q: QuiverModel) -> DoubledQuiver:
    """Originals first, then the reversed a* in the same order"""
    names = q.edge_names()
    originals = [DoubledEdge(n, e.tail, e.head, e.degree, False) for n, e in zip(names, q.edges)]
    stars = [DoubledEdge(star_name(n), e.head, e.tail, e.degree, True) for n, e in zip(names, q.edges)]
    return DoubledQuiver(base=q, edges=tuple(originals + stars))


def adjacency(q) -> AdjacencyMatrix:
    """c_ij = number of edges i -> j (of a doubled quiver, or of any quiver)"""
    vertices = q.vertices
    index = {v: k for k, v in enumerate(vertices)}
    c = [[0] * len(vertices) for _ in vertices]
    for e in q.edges:
        c[index[e.tail]][index[e.head]] += 1
    return c


def cartan_matrix_series(c: AdjacencyMatrix, order: int) -> MatSeries:
    """1 - t*c + t^2*1"""
    n = len(c)
    return MatSeries([[TruncSeries.from_poly({0: int(i == j), 1: -c[i][j], 2: int(i == j)}, order)
                       for j in range(n)] for i in range(n)])


def is_connected(q: QuiverModel) -> bool:
    neighbours: Dict[str, set] = {v: set() for v in q.vertices}
    for e in q.edges:
        neighbours[e.tail].add(e.head)
        neighbours[e.head].add(e.tail)
    seen = {q.vertices[0]}
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for w in neighbours[v] - seen:
            seen.add(w)
            queue.append(w)
    return len(seen) == len(q.vertices)


# ---------------------------------------------------------------------------
# Shape catalog
# ---------------------------------------------------------------------------

def _arms_quiver(arms: Sequence[int]) -> QuiverModel:
    """A star: center 0 with arms of the given lengths"""
    vertices = [0]
    edges = []
    for length in arms:
        previous = 0
        for _ in range(length):
            v = len(vertices)
            vertices.append(v)
            edges.append((previous, v))
            previous = v
    return make_quiver(vertices, edges)


def dynkin_shape(family: str, n: int) -> QuiverModel:
    """A_n, D_n, E_6, E_7, E_8 with the standard vertex count n"""
    if family == "A" and n >= 1:
        return make_quiver(range(n), [(k, k + 1) for k in range(n - 1)])
    if family == "D" and n >= 4:
        return _arms_quiver([1, 1, n - 3])
    if family == "E" and n in (6, 7, 8):
        return _arms_quiver([1, 2, n - 4])
    raise ValueError(f"no Dynkin diagram {family}{n}")


def affine_shape(family: str, n: int) -> QuiverModel:
    """Extended diagrams ~A_n, ~D_n, ~E_n on n + 1 vertices"""
    if family == "A":
        if n == 0:
            return make_quiver([0], [(0, 0)])
        if n == 1:
            return make_quiver([0, 1], [(0, 1), (0, 1)])
        if n >= 2:
            return make_quiver(range(n + 1), [(k, (k + 1) % (n + 1)) for k in range(n + 1)])
    if family == "D" and n >= 4:
        spine = list(range(n - 3))
        edges = [(k, k + 1) for k in range(len(spine) - 1)]
        leaf = len(spine)
        for anchor in (spine[0], spine[0], spine[-1], spine[-1]):
            edges.append((anchor, leaf))
            leaf += 1
        return make_quiver(range(leaf), edges)
    if family == "E":
        arms = {6: [2, 2, 2], 7: [1, 3, 3], 8: [1, 2, 5]}.get(n)
        if arms:
            return _arms_quiver(arms)
    raise ValueError(f"no extended Dynkin diagram ~{family}{n}")


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------

def _undirected(q: QuiverModel) -> Tuple[Dict[str, int], Dict[Tuple[str, str], int], Dict[str, List[str]]]:
    loops: Dict[str, int] = {v: 0 for v in q.vertices}
    multiplicity: Dict[Tuple[str, str], int] = {}
    neighbours: Dict[str, List[str]] = {v: [] for v in q.vertices}
    order = {v: k for k, v in enumerate(q.vertices)}
    for e in q.edges:
        if e.tail == e.head:
            loops[e.tail] += 1
            continue
        key = tuple(sorted((e.tail, e.head), key=order.__getitem__))
        multiplicity[key] = multiplicity.get(key, 0) + 1
        neighbours[e.tail].append(e.head)
        neighbours[e.head].append(e.tail)
    return loops, multiplicity, neighbours


def _arm(start: str, came_from: str, neighbours: Dict[str, List[str]]) -> Tuple[int, str]:
    """Length of the path from a branch vertex out to a leaf, and the leaf"""
    length, previous, current = 1, came_from, start
    while True:
        onward = [w for w in neighbours[current] if w != previous]
        if not onward:
            return length, current
        if len(onward) > 1:
            return -1, current
        previous, current = current, onward[0]
        length += 1


def classify(q: QuiverModel) -> Classification:
    """Exact shape recognition of simply laced Dynkin and extended Dynkin quivers"""
    if any(e.degree != 1 for e in q.edges):
        raise ValueError("classify requires all edge degrees equal to 1")
    if not is_connected(q):
        raise ValueError("classify requires a connected quiver")

    n = len(q.vertices)
    loops, multiplicity, neighbours = _undirected(q)
    total_loops = sum(loops.values())

    if total_loops:
        if n == 1 and total_loops == 1:
            return Classification(EXTENDED_DYNKIN, "~A0", tuple(q.vertices))
        return Classification(WILD, "wild")
    if any(m > 1 for m in multiplicity.values()):
        if n == 2 and list(multiplicity.values()) == [2]:
            return Classification(EXTENDED_DYNKIN, "~A1", tuple(q.vertices))
        return Classification(WILD, "wild")

    edge_count = sum(multiplicity.values())
    degrees = {v: len(neighbours[v]) for v in q.vertices}
    if edge_count == n:
        if all(d == 2 for d in degrees.values()):
            return Classification(EXTENDED_DYNKIN, f"~A{n - 1}", tuple(q.vertices))
        return Classification(WILD, "wild")
    if edge_count > n:
        return Classification(WILD, "wild")

    # a tree from here on
    branches = [v for v in q.vertices if degrees[v] >= 3]
    if not branches:
        return Classification(DYNKIN, f"A{n}")
    if len(branches) == 1:
        center = branches[0]
        arms = sorted((_arm(w, center, neighbours) for w in neighbours[center]), key=lambda a: a[0])
        lengths = tuple(length for length, _ in arms)
        if degrees[center] == 4:
            if lengths == (1, 1, 1, 1):
                return Classification(EXTENDED_DYNKIN, "~D4", tuple(leaf for _, leaf in arms))
            return Classification(WILD, "wild")
        if degrees[center] > 4:
            return Classification(WILD, "wild")
        p, s, r = lengths
        if (p, s) == (1, 1):
            return Classification(DYNKIN, f"D{n}")
        if (p, s) == (1, 2) and r in (2, 3, 4):
            return Classification(DYNKIN, f"E{n}")
        if lengths == (2, 2, 2):
            return Classification(EXTENDED_DYNKIN, "~E6", tuple(leaf for _, leaf in arms))
        if lengths == (1, 3, 3):
            return Classification(EXTENDED_DYNKIN, "~E7", tuple(leaf for length, leaf in arms if length == 3))
        if lengths == (1, 2, 5):
            return Classification(EXTENDED_DYNKIN, "~E8", tuple(leaf for length, leaf in arms if length == 5))
        return Classification(WILD, "wild")
    if len(branches) == 2 and all(degrees[b] == 3 for b in branches):
        leaves = []
        for b in branches:
            short = [leaf for w in neighbours[b] for length, leaf in [_arm(w, b, neighbours)]
                     if length == 1 and degrees[w] == 1]
            if len(short) != 2:
                return Classification(WILD, "wild")
            leaves.extend(short)
        return Classification(EXTENDED_DYNKIN, f"~D{n - 1}", tuple(sorted(leaves, key=q.index)))
    return Classification(WILD, "wild")


def extending_vertex(q: QuiverModel) -> str:
    verdict = classify(q)
    if verdict.kind != EXTENDED_DYNKIN:
        raise ValueError(f"quiver is {verdict.kind} ({verdict.type}), not extended Dynkin")
    return verdict.extending_vertices[0]
