"""Closed-form properties of Kronecker products of star graphs.

Nothing here materializes the full graph. Every count is computed from the
constituent stars with Python ints, so designs well past 10^30 edges are exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from itertools import combinations
from operator import mul

from krongraph.distribution import DegreeDistribution
from krongraph.sparse import SparseMatrix, closed_wedge_sum, degrees

MAX_SUBSET_FACTORS = 30


class Loop(str, enum.Enum):
    NONE = "none"
    CENTER = "center"
    LEAF = "leaf"


@dataclass(frozen=True)
class FactorSpec:
    """A star with ``m_hat`` points; vertex 0 is the center."""

    m_hat: int
    loop: Loop = Loop.NONE

    def __post_init__(self):
        if isinstance(self.m_hat, bool) or not isinstance(self.m_hat, int):
            raise TypeError(f"m_hat must be an int, got {self.m_hat!r}")
        if self.m_hat < 2:
            raise ValueError(f"m_hat must be >= 2, got {self.m_hat}")
        object.__setattr__(self, "loop", Loop(self.loop))

    @property
    def vertices(self) -> int:
        return self.m_hat + 1

    @property
    def nnz(self) -> int:
        return 2 * self.m_hat + (self.loop is not Loop.NONE)

    @property
    def loop_vertex(self) -> int | None:
        return {Loop.NONE: None, Loop.CENTER: 0, Loop.LEAF: self.m_hat}[self.loop]

    @property
    def loop_vertex_degree(self) -> int | None:
        # row nnz of the looped vertex, counting the loop once
        return {Loop.NONE: None, Loop.CENTER: self.m_hat + 1, Loop.LEAF: 2}[self.loop]


class DesignError(ValueError):
    pass


@dataclass(frozen=True)
class GraphDesign:
    """Ordered star factors; ``remove_loop`` drops the single global self-loop."""

    factors: tuple[FactorSpec, ...]
    remove_loop: bool = False
    allow_mixed_loops: bool = False

    def __post_init__(self):
        factors = tuple(self.factors)
        object.__setattr__(self, "factors", factors)
        if not factors:
            raise DesignError("a design needs at least one factor")
        if self.remove_loop and not self.has_global_loop:
            raise DesignError("remove_loop requires a self-loop on every factor")
        placements = {f.loop for f in factors}
        if len(placements) > 1 and not self.allow_mixed_loops:
            raise DesignError(
                f"mixed loop placements {sorted(p.value for p in placements)}; "
                "set allow_mixed_loops to permit them"
            )

    @classmethod
    def stars(cls, m_hats, loop: Loop | str = Loop.NONE, remove_loop: bool = False) -> GraphDesign:
        return cls(tuple(FactorSpec(m, Loop(loop)) for m in m_hats), remove_loop)

    @property
    def m_hats(self) -> tuple[int, ...]:
        return tuple(f.m_hat for f in self.factors)

    @property
    def has_global_loop(self) -> bool:
        """The product has a diagonal entry iff every factor has one."""
        return all(f.loop is not Loop.NONE for f in self.factors)

    def loop_position(self) -> int | None:
        """Vertex index of the single diagonal entry of the full product."""
        if not self.has_global_loop:
            return None
        pos = 0
        for f in self.factors:
            pos = pos * f.vertices + f.loop_vertex
        return pos


@lru_cache(maxsize=None)
def star_matrix(f: FactorSpec) -> SparseMatrix:
    m = f.m_hat
    leaves = list(range(1, m + 1))
    rr = [0] * m + leaves
    cc = leaves + [0] * m
    if f.loop_vertex is not None:
        rr.append(f.loop_vertex)
        cc.append(f.loop_vertex)
    return SparseMatrix.from_triples(m + 1, m + 1, rr, cc)


@lru_cache(maxsize=None)
def _factor_wedges(f: FactorSpec) -> int:
    return closed_wedge_sum(star_matrix(f))


@lru_cache(maxsize=None)
def _factor_degrees(f: FactorSpec) -> DegreeDistribution:
    return degrees(star_matrix(f))


def _prod(values) -> int:
    return reduce(mul, values, 1)


def loop_vertex_degree(d: GraphDesign) -> int | None:
    if not d.has_global_loop:
        return None
    return _prod(f.loop_vertex_degree for f in d.factors)


def predict_vertices(d: GraphDesign) -> int:
    return _prod(f.vertices for f in d.factors)


def predict_edges(d: GraphDesign) -> int:
    """Number of nonzero adjacency entries (directed count, no halving)."""
    return _prod(star_matrix(f).nnz for f in d.factors) - int(d.remove_loop)


def predict_degree_distribution(d: GraphDesign) -> DegreeDistribution:
    dist = DegreeDistribution({1: 1})
    for f in d.factors:
        dist = dist.convolve(_factor_degrees(f))
    if d.remove_loop:
        dv = loop_vertex_degree(d)
        dist = dist.move_one(dv, dv - 1)
    return dist


def closed_wedges(d: GraphDesign) -> int:
    return _prod(_factor_wedges(f) for f in d.factors)


def predict_triangles(d: GraphDesign) -> int:
    """Triangles on distinct vertices.

    A single self-loop on a vertex of degree d_v (loop included) contributes
    3*d_v - 2 closed wedges and no triangle, so it is subtracted whether or
    not the loop is later removed from the output.
    """
    numerator = closed_wedges(d)
    if d.has_global_loop:
        numerator -= 3 * loop_vertex_degree(d) - 2
    if numerator % 6:
        raise ArithmeticError(f"triangle numerator {numerator} is not divisible by 6")
    return numerator // 6


@dataclass(frozen=True)
class AlphaReport:
    """Power-law slope as the exact pair log(n1) / log(d_max)."""

    n1: int
    d_max: int

    @property
    def value(self) -> float:
        return math.log(self.n1) / math.log(self.d_max)

    @property
    def is_one(self) -> bool:
        return self.n1 == self.d_max

    def __str__(self) -> str:
        return f"log({self.n1})/log({self.d_max}) ~= {self.value:.6f}"


def power_law_alpha(dist: DegreeDistribution) -> AlphaReport:
    n1 = dist.get_count(1)
    if n1 == 0:
        raise ValueError("alpha is undefined: no vertices of degree 1")
    d_max = dist.max_degree
    if d_max <= 1:
        raise ValueError("alpha is undefined: maximum degree is 1")
    return AlphaReport(n1, d_max)


@dataclass(frozen=True)
class PowerLawCheck:
    valid: bool
    subset_products: int
    collisions: dict[int, list[tuple[int, ...]]] = field(default_factory=dict)


def validate_power_law(d: GraphDesign) -> PowerLawCheck:
    """Distinct subset products of the m_hat values give n(d) = prod(m_hat) / d."""
    m_hats = d.m_hats
    if len(m_hats) > MAX_SUBSET_FACTORS:
        raise OverflowError(f"{len(m_hats)} factors: 2^{len(m_hats)} subsets is too many to enumerate")
    seen: dict[int, list[tuple[int, ...]]] = {}
    for r in range(len(m_hats) + 1):
        for subset in combinations(range(len(m_hats)), r):
            seen.setdefault(_prod(m_hats[k] for k in subset), []).append(subset)
    collisions = {p: s for p, s in seen.items() if len(s) > 1}
    return PowerLawCheck(not collisions, 2 ** len(m_hats), collisions)


@dataclass(frozen=True)
class DesignReport:
    vertices: int
    edges: int
    triangles: int
    distribution: DegreeDistribution
    alpha: AlphaReport
    loop_vertex_degree: int | None
    power_law_valid: bool
    closed_wedges: int
    self_loops: int

    def summary_lines(self) -> list[str]:
        return [
            f"vertices\t{self.vertices}",
            f"edges\t{self.edges}",
            f"triangles\t{self.triangles}",
            f"alpha_n1\t{self.alpha.n1}",
            f"alpha_dmax\t{self.alpha.d_max}",
            f"alpha\t{self.alpha.value:.6f}",
            f"power_law_valid\t{str(self.power_law_valid).lower()}",
            f"loop_vertex_degree\t{'-' if self.loop_vertex_degree is None else self.loop_vertex_degree}",
            f"degree_classes\t{len(self.distribution)}",
        ]


def design_report(d: GraphDesign) -> DesignReport:
    dist = predict_degree_distribution(d)
    report = DesignReport(
        vertices=predict_vertices(d),
        edges=predict_edges(d),
        triangles=predict_triangles(d),
        distribution=dist,
        alpha=power_law_alpha(dist),
        loop_vertex_degree=loop_vertex_degree(d),
        power_law_valid=validate_power_law(d).valid,
        closed_wedges=closed_wedges(d),
        self_loops=int(d.has_global_loop and not d.remove_loop),
    )
    if dist.vertices != report.vertices or dist.endpoints != report.edges:
        raise ArithmeticError("degree distribution disagrees with vertex/edge predictions")
    return report
