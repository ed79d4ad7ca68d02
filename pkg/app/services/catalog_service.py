"""
Bundled quivers and presentations used by the verification suites
"""
from fractions import Fraction
from typing import List, Tuple

from app.models import QuiverModel
from app.services.algebra_service import Presentation, algebra_service
from app.services.monomial_service import MonomialPresentation
from app.services.quiver_service import affine_shape, dynkin_shape, make_quiver


class CatalogService:
    def wild_quivers(self) -> List[Tuple[str, QuiverModel]]:
        """Connected quivers that are neither Dynkin nor extended Dynkin"""
        return [
            ("one vertex, 2 loops", make_quiver([0], [(0, 0), (0, 0)])),
            ("two vertices, 3 edges", make_quiver([0, 1], [(0, 1), (0, 1), (0, 1)])),
            ("triangle with a doubled edge", make_quiver([0, 1, 2], [(0, 1), (0, 1), (1, 2), (2, 0)])),
            ("loop and an edge", make_quiver([0, 1], [(0, 0), (0, 1)])),
            ("star with 5 spokes", make_quiver(range(6), [(0, k) for k in range(1, 6)])),
        ]

    def affine_quivers(self) -> List[Tuple[str, QuiverModel]]:
        shapes = [("A", n) for n in range(1, 8)] + [("D", n) for n in range(4, 9)] + [("E", n) for n in (6, 7, 8)]
        return [(f"~{family}{n}", affine_shape(family, n)) for family, n in shapes]

    def cyclic_affine_quivers(self) -> List[Tuple[int, QuiverModel]]:
        """(n, ~A_{n-1}) for the cyclic groups Z/n, 2 <= n <= 6"""
        return [(n, affine_shape("A", n - 1)) for n in range(2, 7)]

    def monomial_presentations(self) -> List[Tuple[str, MonomialPresentation]]:
        return [
            ("xy", MonomialPresentation.from_words("xy", ["xy"])),
            ("x^2y^2", MonomialPresentation.from_words("xy", ["xxyy"])),
            ("x^2y^2, xyxy^2", MonomialPresentation.from_words("xy", ["xxyy", "xyxyy"])),
            ("x^3y", MonomialPresentation.from_words("xy", ["xxxy"])),
        ]

    def partial_cases(self) -> List[Tuple[str, QuiverModel, List[str]]]:
        return [
            ("A2, J = {0}", dynkin_shape("A", 2), ["0"]),
            ("A3, J = {middle}", dynkin_shape("A", 3), ["1"]),
        ]

    def quantum_plane(self, q: int = 2) -> Presentation:
        """C<x,y>/(xy - q yx)"""
        quiver = QuiverModel(vertices=["0"], edges=[
            {"tail": "0", "head": "0", "name": "x"},
            {"tail": "0", "head": "0", "name": "y"},
        ])
        relation = algebra_service.make_poly(quiver, [(Fraction(1), (0, 1)), (Fraction(-q), (1, 0))])
        return Presentation(quiver, [relation])


# Global service instance
catalog_service = CatalogService()
