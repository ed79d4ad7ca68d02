"""
Pydantic models for input files, run configuration and reports
"""
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config import OUTPUT_FORMATS, THREADS


# Quiver Models
class EdgeModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    tail: str
    head: str
    degree: int = 1
    name: Optional[str] = None

    @field_validator("tail", "head", "name", mode="before")
    @classmethod
    def _stringify(cls, value):
        return None if value is None else str(value)

    @field_validator("degree")
    @classmethod
    def _positive_degree(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"edge degree must be >= 1, got {value}")
        return value


class QuiverModel(BaseModel):
    model_config = ConfigDict(frozen=True)

    vertices: List[str]
    edges: List[EdgeModel] = []

    @field_validator("vertices", mode="before")
    @classmethod
    def _stringify_vertices(cls, value):
        return [str(v) for v in value]

    @model_validator(mode="after")
    def _check_endpoints(self):
        if not self.vertices:
            raise ValueError("quiver needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex labels")
        known = set(self.vertices)
        for edge in self.edges:
            if edge.tail not in known or edge.head not in known:
                raise ValueError(f"edge {edge.tail}->{edge.head} references an unknown vertex")
        names = self.edge_names()
        if len(set(names)) != len(names):
            raise ValueError("duplicate edge names")
        return self

    def index(self, vertex: str) -> int:
        return self.vertices.index(vertex)

    def edge_names(self) -> List[str]:
        return [e.name if e.name is not None else f"a{k}" for k, e in enumerate(self.edges)]


# Presentation Models
class TermModel(BaseModel):
    coeff: str = "1"
    path: List[str]

    @field_validator("coeff", mode="before")
    @classmethod
    def _stringify(cls, value):
        return str(value)


class PresentationModel(BaseModel):
    quiver: QuiverModel
    relations: List[List[TermModel]] = []


class LetterModel(BaseModel):
    name: str
    degree: int = 1

    @field_validator("degree")
    @classmethod
    def _positive_degree(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"generator degree must be >= 1, got {value}")
        return value


class MonomialPresentationModel(BaseModel):
    alphabet: List[LetterModel]
    relations: List[List[str]] = []

    @model_validator(mode="after")
    def _check_words(self):
        names = [letter.name for letter in self.alphabet]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        for word in self.relations:
            if not word:
                raise ValueError("relation words must be nonempty")
            for letter in word:
                if letter not in names:
                    raise ValueError(f"unknown generator {letter!r} in relation")
        return self


# Datum Models
class PartialModel(BaseModel):
    quiver: QuiverModel
    J: List[str]

    @field_validator("J", mode="before")
    @classmethod
    def _stringify(cls, value):
        return [str(v) for v in value]


class DatumModel(BaseModel):
    """A (V,L)-datum file: explicit signed dimensions, or one of the builders"""

    dim_I: Optional[int] = None
    dimsV: Optional[List[List[List[int]]]] = None
    dimsL: Optional[List[List[List[int]]]] = None
    m: Optional[List[int]] = None
    preprojective: Optional[QuiverModel] = None
    partial: Optional[PartialModel] = None
    presentation: Optional[PresentationModel] = None
    monomial: Optional[MonomialPresentationModel] = None

    @model_validator(mode="after")
    def _one_source(self):
        sources = (self.preprojective, self.partial, self.presentation, self.monomial)
        builders = [b for b in sources if b is not None]
        explicit = self.dimsV is not None
        if len(builders) + int(explicit) != 1:
            raise ValueError("datum needs exactly one of: dimsV, preprojective, partial, presentation, monomial")
        return self


# Run Configuration
class RunConfig(BaseModel):
    command: str
    inputs: List[str] = []
    order: Optional[int] = Field(default=None, ge=0)
    seed: int
    samples: int = Field(ge=2)
    format: str = "json"
    path_cap: int = Field(ge=1)
    det_bound: int = Field(ge=1)
    suite: str = "all"
    dims: List[int] = []
    divide_lambda: bool = False
    threads: int = Field(default=THREADS, ge=1)

    @field_validator("format")
    @classmethod
    def _known_format(cls, value: str) -> str:
        if value not in OUTPUT_FORMATS:
            raise ValueError(f"format must be one of {', '.join(OUTPUT_FORMATS)}")
        return value


# Report Models
class CheckResult(BaseModel):
    name: str
    passed: bool
    first_diff: Optional[int] = None
    detail: str = ""
    expected: Optional[List[str]] = None
    actual: Optional[List[str]] = None


class VerifyReport(BaseModel):
    suite: str
    order: int
    passed: bool
    checks: List[CheckResult]


class IdentityReport(BaseModel):
    identity: str
    order: int
    equal: bool
    first_diff: Optional[int] = None
    lhs: List[str]
    rhs: List[str]
    extra: Dict[str, Any] = {}


class SeriesModel(BaseModel):
    order: int
    coeffs: List[str]


class MatSeriesModel(BaseModel):
    dim: int
    order: int
    entries: List[List[List[str]]]


class HilbertReport(BaseModel):
    source: str
    order: int
    dim_I: int
    hA: MatSeriesModel
    hA_total: SeriesModel
    zeta: Optional[SeriesModel] = None
    hOA: Optional[SeriesModel] = None
    m: List[str] = []
    hochschild: Optional[Dict[str, SeriesModel]] = None
    expected_rep_dimension: Optional[str] = None
    classification: Optional[Dict[str, Any]] = None
    notes: List[str] = []


# Monte Carlo Models
class MCEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: Tuple[float, ...]
    mean_imag: Tuple[float, ...]
    stderr: Tuple[float, ...]
    samples: int
    seed: int
    dims: Tuple[int, ...]
    notes: Tuple[str, ...] = ()

    def to_json(self) -> Dict[str, object]:
        return {
            "mean": [repr(x) for x in self.mean],
            "mean_imag": [repr(x) for x in self.mean_imag],
            "stderr": [repr(x) for x in self.stderr],
            "samples": str(self.samples),
            "seed": str(self.seed),
            "dims": [str(d) for d in self.dims],
        }


class CoefficientCheck(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    target: float
    mean: float
    sigmas: Optional[float] = None
    passed: bool


class MCReport(BaseModel):
    kind: str
    dims: List[int]
    order: int
    samples: int
    seed: int
    mean: List[str]
    mean_imag: List[str]
    stderr: List[str]
    target: Optional[List[str]] = None
    passed: Optional[bool] = None
    notes: List[str] = []
