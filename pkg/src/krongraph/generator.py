"""Communication-free parallel edge generation via a B (x) C split.

The factor list is split into a leading product B and a trailing product C.
B's column-major triples are cut into ``workers`` contiguous chunks; chunk p
emits kron(B_p, C) using only the plan, so chunks never talk to each other.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import numpy as np

from krongraph.design import GraphDesign, predict_edges, star_matrix
from krongraph.sparse import (
    INT64_MAX,
    IncidencePair,
    SparseMatrix,
    incidence_pair,
    kron,
    kron_all,
    kron_incidence,
)

EDGE_BYTES = 16  # two int64 indices per edge
DEFAULT_MEMORY_BUDGET = 8 * 2**30
DEFAULT_C_MAX_NNZ = 2**20
DEFAULT_BATCH_EDGES = 2**20
DEFAULT_INCIDENCE_MAX_EDGES = 10**7


class PlanError(ValueError):
    pass


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class WorkerChunk:
    worker_id: int
    start: int  # half-open range into b's column-major triples
    stop: int
    col_base: int

    @property
    def triples(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True, eq=False)
class GenPlan:
    design: GraphDesign
    split_index: int
    workers: int
    b: SparseMatrix
    c: SparseMatrix
    chunks: tuple[WorkerChunk, ...]
    memory_budget: int | None = DEFAULT_MEMORY_BUDGET

    @property
    def vertices(self) -> int:
        return self.b.rows * self.c.rows

    @property
    def total_entries(self) -> int:
        return self.b.nnz * self.c.nnz

    @property
    def max_chunk_bytes(self) -> int:
        return max(ch.triples for ch in self.chunks) * self.c.nnz * EDGE_BYTES

    def loop_triples(self) -> tuple[int, int] | None:
        """Positions of the diagonal entry in b's and c's triple order."""
        if not self.design.remove_loop:
            return None
        return _diagonal_position(self.b), _diagonal_position(self.c)

    def loop_owner(self) -> int | None:
        pos = self.loop_triples()
        if pos is None:
            return None
        return next(ch.worker_id for ch in self.chunks if ch.start <= pos[0] < ch.stop)


def _diagonal_position(m: SparseMatrix) -> int:
    hits = np.flatnonzero(m.row_idx == m.col_idx)
    if hits.size != 1:
        raise PlanError(f"expected exactly one diagonal entry, found {hits.size}")
    return int(hits[0])


def default_split(design: GraphDesign, workers: int = 1, c_max_nnz: int = DEFAULT_C_MAX_NNZ) -> int:
    """Largest trailing C with nnz(C) <= c_max_nnz that leaves B at least ``workers`` triples."""
    nnz = [star_matrix(f).nnz for f in design.factors]
    n = len(nnz)
    for split in range(1, n):
        c_nnz, b_nnz = math.prod(nnz[split:]), math.prod(nnz[:split])
        if c_nnz <= c_max_nnz and b_nnz >= workers:
            return split
    return n - 1


def partition(n: int, parts: int) -> list[tuple[int, int]]:
    """Split range(n) into ``parts`` contiguous ranges whose sizes differ by at most one."""
    base, extra = divmod(n, parts)
    out, start = [], 0
    for p in range(parts):
        stop = start + base + (p < extra)
        out.append((start, stop))
        start = stop
    return out


def plan(
    design: GraphDesign,
    split_index: int | None = None,
    workers: int = 1,
    memory_budget: int | None = DEFAULT_MEMORY_BUDGET,
) -> GenPlan:
    n = len(design.factors)
    if n < 2:
        raise PlanError("a B/C split needs at least two factors")
    if split_index is None:
        split_index = default_split(design, workers)
    if not 1 <= split_index < n:
        raise PlanError(f"split_index must be in [1, {n - 1}], got {split_index}")
    if workers < 1:
        raise PlanError("workers must be >= 1")
    stars = [star_matrix(f) for f in design.factors]
    b = kron_all(stars[:split_index])
    c = kron_all(stars[split_index:])
    if b.rows * c.rows > INT64_MAX:
        raise OverflowError(f"{b.rows * c.rows} vertices exceed int64 edge indices")
    if workers > b.nnz:
        raise PlanError(f"{workers} workers but B has only {b.nnz} triples")
    chunks = tuple(
        WorkerChunk(p, start, stop, int(b.col_idx[start]))
        for p, (start, stop) in enumerate(partition(b.nnz, workers))
    )
    gp = GenPlan(design, split_index, workers, b, c, chunks, memory_budget)
    if memory_budget is not None and gp.max_chunk_bytes > memory_budget:
        raise PlanError(
            f"per-worker estimate {gp.max_chunk_bytes} bytes exceeds budget {memory_budget}; "
            "add workers or raise the budget"
        )
    return gp


def worker_block(gp: GenPlan, worker_id: int) -> tuple[SparseMatrix, int]:
    """In-memory A_p = B_p (x) C with B_p's columns rebased to the chunk minimum.

    Returns the block and the column offset that maps its columns back to
    global vertex ids.
    """
    ch = gp.chunks[worker_id]
    sl = slice(ch.start, ch.stop)
    cols = gp.b.col_idx[sl] - ch.col_base
    b_p = SparseMatrix.from_triples(gp.b.rows, int(cols.max()) + 1, gp.b.row_idx[sl], cols, gp.b.values[sl])
    return kron(b_p, gp.c), ch.col_base * gp.c.cols


class EdgeSink(Protocol):
    def write(self, src: np.ndarray, dst: np.ndarray) -> None: ...


class CountingSink:
    def __init__(self):
        self.edges = 0

    def write(self, src, dst):
        self.edges += int(src.size)


class ArraySink:
    def __init__(self):
        self._src, self._dst = [], []

    def write(self, src, dst):
        self._src.append(src.copy())
        self._dst.append(dst.copy())

    def edges(self) -> np.ndarray:
        if not self._src:
            return np.empty((0, 2), dtype=np.int64)
        return np.column_stack([np.concatenate(self._src), np.concatenate(self._dst)])


class TsvSink:
    def __init__(self, fh, one_based: bool = False):
        self.fh = fh
        self.shift = int(one_based)

    def write(self, src, dst):
        if src.size:
            s, t = (src + self.shift).tolist(), (dst + self.shift).tolist()
            self.fh.write("\n".join(map("{}\t{}".format, s, t)))
            self.fh.write("\n")


@dataclass(frozen=True)
class ChunkSummary:
    worker_id: int
    edges: int
    loop_skipped: bool


def generate_chunk(gp: GenPlan, worker_id: int, sink: EdgeSink,
                   batch_edges: int = DEFAULT_BATCH_EDGES) -> ChunkSummary:
    """Emit the edges of chunk ``worker_id``: B-triple order outer, C order inner."""
    if not 0 <= worker_id < gp.workers:
        raise PlanError(f"worker_id {worker_id} out of range [0, {gp.workers})")
    ch = gp.chunks[worker_id]
    c_rows, c_cols = gp.c.rows, gp.c.cols
    ci, cj = gp.c.row_idx, gp.c.col_idx
    loop = gp.loop_triples()
    step = max(1, batch_edges // max(1, gp.c.nnz))
    emitted, skipped = 0, False
    for lo in range(ch.start, ch.stop, step):
        hi = min(lo + step, ch.stop)
        src = (gp.b.row_idx[lo:hi, None] * c_rows + ci[None, :]).ravel()
        dst = (gp.b.col_idx[lo:hi, None] * c_cols + cj[None, :]).ravel()
        if loop is not None and lo <= loop[0] < hi:
            drop = (loop[0] - lo) * gp.c.nnz + loop[1]
            if src[drop] != dst[drop]:
                raise GenerationError("loop position does not land on the diagonal")
            src, dst = np.delete(src, drop), np.delete(dst, drop)
            skipped = True
        sink.write(src, dst)
        emitted += int(src.size)
    return ChunkSummary(worker_id, emitted, skipped)


def run_chunks(gp: GenPlan, sink_factory: Callable[[int], EdgeSink], jobs: int = 1) -> list[ChunkSummary]:
    """Run every chunk on a pool of ``jobs`` threads; results come back in worker order."""
    jobs = max(1, min(jobs, gp.workers))
    if jobs == 1:
        return [generate_chunk(gp, p, sink_factory(p)) for p in range(gp.workers)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(generate_chunk, gp, p, sink_factory(p)) for p in range(gp.workers)]
        return [f.result() for f in futures]


def shard_name(worker_id: int, workers: int, prefix: str = "edges") -> str:
    width = max(5, len(str(workers - 1)))
    return f"{prefix}_{worker_id:0{width}d}.tsv"


def design_to_dict(d: GraphDesign) -> dict:
    return {
        "factors": [{"m_hat": f.m_hat, "loop": f.loop.value} for f in d.factors],
        "remove_loop": d.remove_loop,
        "allow_mixed_loops": d.allow_mixed_loops,
    }


def _plan_header(gp: GenPlan) -> dict:
    return {
        "design": design_to_dict(gp.design),
        "split_index": gp.split_index,
        "workers": gp.workers,
        "vertices": gp.vertices,
        "b": {"vertices": gp.b.rows, "nnz": gp.b.nnz},
        "c": {"vertices": gp.c.rows, "nnz": gp.c.nnz},
        "predicted_edges": predict_edges(gp.design),
    }


def generate_all(gp: GenPlan, output: str | os.PathLike, jobs: int = 1, one_based: bool = False) -> dict:
    """Write one TSV shard per worker plus ``manifest.json``; returns the manifest."""
    out = Path(output)
    out.mkdir(parents=True, exist_ok=True)
    results: dict[int, ChunkSummary | BaseException] = {}

    def run(p: int):
        try:
            with open(out / shard_name(p, gp.workers), "w", encoding="ascii", newline="\n") as fh:
                results[p] = generate_chunk(gp, p, TsvSink(fh, one_based))
        except BaseException as exc:  # recorded in the manifest, re-raised below
            results[p] = exc

    with ThreadPoolExecutor(max_workers=max(1, min(jobs, gp.workers))) as pool:
        list(pool.map(run, range(gp.workers)))

    shards, failed = [], []
    for p in range(gp.workers):
        res, ch = results[p], gp.chunks[p]
        entry = {"worker_id": p, "file": shard_name(p, gp.workers), "triple_range": [ch.start, ch.stop]}
        if isinstance(res, ChunkSummary):
            entry.update(status="ok", edges=res.edges, loop_skipped=res.loop_skipped)
        else:
            entry.update(status="failed", error=repr(res))
            failed.append(p)
        shards.append(entry)
    total = sum(s.get("edges", 0) for s in shards)
    manifest = _plan_header(gp) | {
        "one_based": one_based,
        "loop_removed_by": next((s["worker_id"] for s in shards if s.get("loop_skipped")), None),
        "shards": shards,
        "total_edges": total,
        "complete": not failed,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    if failed:
        first = results[failed[0]]
        raise GenerationError(f"workers {failed} failed; partial shards flagged in manifest") from first
    if total != manifest["predicted_edges"]:
        raise GenerationError(f"emitted {total} edges, predicted {manifest['predicted_edges']}")
    return manifest


def plan_incidence(gp: GenPlan) -> IncidencePair:
    """Incidence pair whose edge ids follow the generator's emission order.

    Built as kron(incidence(B), incidence(C)); the removed self-loop's row is
    dropped and later edge ids shift down by one.
    """
    pair = kron_incidence(incidence_pair(gp.b), incidence_pair(gp.c))
    loop = gp.loop_triples()
    if loop is None:
        return pair
    drop = loop[0] * gp.c.nnz + loop[1]

    def without_row(m: SparseMatrix) -> SparseMatrix:
        keep = m.row_idx != drop
        rows = m.row_idx[keep]
        rows = rows - (rows > drop)
        return SparseMatrix.from_triples(m.rows - 1, m.cols, rows, m.col_idx[keep], m.values[keep])

    return IncidencePair(without_row(pair.e_out), without_row(pair.e_in))


def generate_incidence(gp: GenPlan, output: str | os.PathLike, one_based: bool = False,
                       max_edges: int = DEFAULT_INCIDENCE_MAX_EDGES) -> dict:
    """Write (edge-id, vertex-id) out/in shard pairs, split like the edge shards."""
    edges = predict_edges(gp.design)
    if edges > max_edges:
        raise PlanError(f"incidence output of {edges} rows exceeds bound {max_edges}")
    pair = plan_incidence(gp)
    # one entry per incidence row: scatter it into a per-edge vertex id
    v_out = np.empty(pair.edges, dtype=np.int64)
    v_out[pair.e_out.row_idx] = pair.e_out.col_idx
    v_in = np.empty(pair.edges, dtype=np.int64)
    v_in[pair.e_in.row_idx] = pair.e_in.col_idx

    out = Path(output)
    out.mkdir(parents=True, exist_ok=True)
    owner = gp.loop_owner()
    shards, start = [], 0
    for ch in gp.chunks:
        stop = start + ch.triples * gp.c.nnz - (ch.worker_id == owner)
        ids = np.arange(start, stop, dtype=np.int64)
        names = {}
        for kind, vert in (("out", v_out), ("in", v_in)):
            name = shard_name(ch.worker_id, gp.workers, prefix=f"incidence_{kind}")
            with open(out / name, "w", encoding="ascii", newline="\n") as fh:
                TsvSink(fh, one_based).write(ids, vert[start:stop])
            names[kind] = name
        shards.append({"worker_id": ch.worker_id, "out": names["out"], "in": names["in"],
                       "edge_range": [start, stop], "edges": stop - start})
        start = stop
    manifest = _plan_header(gp) | {"one_based": one_based, "shards": shards, "total_edges": start}
    (out / "incidence_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest
