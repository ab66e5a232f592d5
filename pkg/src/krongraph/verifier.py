"""Measure generated edge shards and diff them against a design report."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from krongraph.design import DesignReport
from krongraph.distribution import DegreeDistribution

DEFAULT_TRIANGLE_MAX_EDGES = 5_000_000


class ShardFormatError(ValueError):
    def __init__(self, path, lineno: int, msg: str):
        super().__init__(f"{path}:{lineno}: {msg}")
        self.path, self.lineno = path, lineno


class TriangleBoundError(RuntimeError):
    pass


def _scan_lines(path: Path, shift: int, vertex_count: int) -> np.ndarray:
    """Slow path: parse line by line so errors carry a line number."""
    pairs = []
    with open(path, encoding="ascii", errors="replace") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.endswith("\n"):
                raise ShardFormatError(path, lineno, "missing trailing newline")
            parts = line[:-1].split("\t")
            if len(parts) != 2 or not all(p.isdigit() for p in parts):
                raise ShardFormatError(path, lineno, f"expected '<src>\\t<dst>', got {line[:-1]!r}")
            u, v = int(parts[0]) - shift, int(parts[1]) - shift
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ShardFormatError(path, lineno, f"vertex index out of range [0, {vertex_count})")
            pairs.append((u, v))
    return np.asarray(pairs, dtype=np.int64).reshape(-1, 2)


def read_shard(path: str | os.PathLike, vertex_count: int, one_based: bool = False) -> np.ndarray:
    """Return an (n, 2) int64 array of 0-based edges."""
    path = Path(path)
    shift = int(one_based)
    if vertex_count > np.iinfo(np.int64).max:
        return _scan_lines(path, shift, vertex_count)
    text = path.read_bytes()
    if not text:
        return np.empty((0, 2), dtype=np.int64)
    try:
        if not text.endswith(b"\n") or b" " in text or b"\r" in text:
            raise ValueError
        edges = np.loadtxt(path, dtype=np.int64, delimiter="\t", ndmin=2, comments=None)
        if edges.shape[1] != 2:
            raise ValueError
    except ValueError:
        return _scan_lines(path, shift, vertex_count)
    edges -= shift
    if edges.size and (edges.min() < 0 or edges.max() >= vertex_count):
        return _scan_lines(path, shift, vertex_count)
    return edges


@dataclass(frozen=True)
class EmpiricalStats:
    vertex_count: int
    vertices_touched: int
    edge_count: int
    distribution: DegreeDistribution
    self_loops: int
    duplicate_edges: int
    closed_wedges: int | None = None
    triangles: int | None = None


def _unique_pairs(edges: np.ndarray, vertex_count: int) -> np.ndarray:
    if vertex_count <= 3_037_000_499:  # vertex_count**2 fits int64
        keys = np.unique(edges[:, 0] * vertex_count + edges[:, 1])
        return np.column_stack([keys // vertex_count, keys % vertex_count])
    return np.unique(edges, axis=0)


def count_closed_wedges(edges: np.ndarray) -> int:
    """Sum over distinct off-diagonal entries (i, j) of |row(i) & col(j)|.

    Equals six times the triangle count when the pattern is symmetric.
    """
    out_nbrs: dict[int, set[int]] = {}
    in_nbrs: dict[int, set[int]] = {}
    pairs = [(u, v) for u, v in edges.tolist() if u != v]
    for u, v in pairs:
        out_nbrs.setdefault(u, set()).add(v)
        in_nbrs.setdefault(v, set()).add(u)
    total = 0
    for u, v in pairs:
        a, b = out_nbrs[u], in_nbrs[v]
        total += len(a & b) if len(a) <= len(b) else len(b & a)
    return total


def measure(shards, vertex_count: int, count_triangles: bool = False, one_based: bool = False,
            max_triangle_edges: int = DEFAULT_TRIANGLE_MAX_EDGES) -> EmpiricalStats:
    """Degree distribution (row nnz), duplicates, self-loops and optional triangles.

    Vertices never seen as a source are reported at degree 0.
    """
    parts = [read_shard(p, vertex_count, one_based) for p in shards]
    edges = np.concatenate(parts) if parts else np.empty((0, 2), dtype=np.int64)
    n = int(edges.shape[0])
    distinct = _unique_pairs(edges, vertex_count) if n else edges
    src_ids, row_nnz = np.unique(edges[:, 0], return_counts=True)
    deg_values, deg_counts = np.unique(row_nnz, return_counts=True)
    dist = dict(zip(deg_values.tolist(), deg_counts.tolist()))
    touched = int(np.unique(edges).size)
    isolated = vertex_count - int(src_ids.size)
    if isolated:
        dist[0] = dist.get(0, 0) + isolated

    wedges = triangles = None
    if count_triangles:
        if n > max_triangle_edges:
            raise TriangleBoundError(f"{n} edges exceed the triangle bound {max_triangle_edges}")
        wedges = count_closed_wedges(distinct)
        triangles = wedges // 6 if wedges % 6 == 0 else None

    return EmpiricalStats(
        vertex_count=vertex_count,
        vertices_touched=touched,
        edge_count=n,
        distribution=DegreeDistribution(dist),
        self_loops=int(np.count_nonzero(edges[:, 0] == edges[:, 1])),
        duplicate_edges=n - int(distinct.shape[0]),
        closed_wedges=wedges,
        triangles=triangles,
    )


@dataclass(frozen=True)
class Mismatch:
    field: str
    predicted: object
    measured: object


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    mismatches: list[Mismatch] = field(default_factory=list)
    distribution_mismatches: list[tuple[int, int, int]] = field(default_factory=list)
    checked: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "mismatches": [vars(m) for m in self.mismatches],
            "distribution_mismatches": [
                {"degree": d, "predicted": p, "measured": m} for d, p, m in self.distribution_mismatches
            ],
        }

    def to_text(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=str) + "\n"


def diff(predicted: DesignReport, measured: EmpiricalStats) -> VerificationReport:
    """Exact field-by-field comparison; any difference fails the report."""
    pairs = [
        ("vertices", predicted.vertices, measured.distribution.vertices),
        ("edges", predicted.edges, measured.edge_count),
        ("self_loops", predicted.self_loops, measured.self_loops),
        ("duplicate_edges", 0, measured.duplicate_edges),
    ]
    if measured.closed_wedges is not None:
        pairs.append(("triangles", predicted.triangles, measured.triangles))
    mismatches = [Mismatch(name, p, m) for name, p, m in pairs if p != m]

    pd, md = predicted.distribution, measured.distribution
    dist_mismatches = [
        (d, pd.get_count(d), md.get_count(d))
        for d in sorted(set(pd) | set(md))
        if pd.get_count(d) != md.get_count(d)
    ]
    checked = [name for name, _, _ in pairs] + ["distribution"]
    return VerificationReport(not mismatches and not dist_mismatches, mismatches, dist_mismatches, checked)
