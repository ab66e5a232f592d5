"""Exact design, parallel generation and verification of Kronecker power-law graphs."""

from krongraph.design import (
    DesignReport,
    FactorSpec,
    GraphDesign,
    Loop,
    design_report,
    predict_degree_distribution,
    predict_edges,
    predict_triangles,
    predict_vertices,
    power_law_alpha,
    star_matrix,
    validate_power_law,
)
from krongraph.distribution import DegreeDistribution
from krongraph.generator import GenPlan, generate_all, generate_chunk, generate_incidence, plan
from krongraph.sparse import SparseMatrix, closed_wedge_sum, degrees, incidence_pair, kron, matmul
from krongraph.verifier import diff, measure

__all__ = [
    "DegreeDistribution", "DesignReport", "FactorSpec", "GenPlan", "GraphDesign", "Loop",
    "SparseMatrix", "closed_wedge_sum", "degrees", "design_report", "diff", "generate_all",
    "generate_chunk", "generate_incidence", "incidence_pair", "kron", "matmul", "measure", "plan",
    "power_law_alpha", "predict_degree_distribution", "predict_edges", "predict_triangles",
    "predict_vertices", "star_matrix", "validate_power_law",
]
