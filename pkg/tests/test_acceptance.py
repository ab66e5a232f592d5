"""Exit criteria. Every design-mode check is exact; one summary line per criterion."""

import functools
import itertools
import json
import os
import random
import time

import numpy as np
import pytest

from krongraph import design as design_mod
from krongraph.design import (
    FactorSpec,
    GraphDesign,
    Loop,
    closed_wedges,
    design_report,
    loop_vertex_degree,
    predict_degree_distribution,
    predict_edges,
    predict_triangles,
    predict_vertices,
    star_matrix,
)
from krongraph.generator import CountingSink, generate_all, generate_incidence, plan, run_chunks
from krongraph.sparse import SparseMatrix, degrees, kron, kron_all, matmul, triangle_count
from krongraph.verifier import diff, measure
from oracles import (
    dense_degree_distribution,
    materialize,
    triangles_trace,
    triangles_vertex_triples,
)

RESULTS: dict[tuple[int, str], tuple[str, str, str]] = {}

FIG4 = [3, 4, 5, 9, 16, 25, 81, 256]
FIG5 = [3, 4, 5, 9, 16, 25, 81, 256, 625]
FIG7 = [3, 4, 5, 7, 11, 9, 16, 25, 49, 81, 121, 256, 625, 2401, 14641]

# values printed in the figure captions
FIG2_BOTTOM_CAPTION_TRIANGLES = 3
FIG6_CAPTION_TRIANGLES = 12_720_651_636_552_426


def criterion(number: int, title: str, part: str = ""):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            key = (number, part)
            try:
                detail = fn(*args, **kwargs)
            except pytest.skip.Exception as exc:
                RESULTS[key] = ("SKIP", title, str(exc))
                raise
            except BaseException as exc:
                RESULTS[key] = ("FAIL", title, f"{type(exc).__name__}: {exc}".splitlines()[0])
                raise
            RESULTS[key] = ("PASS", title, detail or "")

        return wrapper

    return deco


def clear_caches():
    for fn in (design_mod.star_matrix, design_mod._factor_wedges, design_mod._factor_degrees):
        fn.cache_clear()


def timed_report(d):
    clear_caches()
    t0 = time.perf_counter()
    r = design_report(d)
    return r, time.perf_counter() - t0


def shards_of(manifest, directory):
    return [directory / s["file"] for s in manifest["shards"]]


@criterion(1, "stars {5,3}: distribution, counts, measured graph")
def test_criterion_1_fig1(tmp_path):
    d = GraphDesign.stars([5, 3])
    r, elapsed = timed_report(d)
    assert r.distribution == {1: 15, 3: 5, 5: 3, 15: 1}
    assert (r.vertices, r.edges, r.triangles) == (24, 60, 0)
    assert elapsed < 1.0

    dense = materialize([(5, "none"), (3, "none")], False)
    assert dense_degree_distribution(dense) == r.distribution
    assert int(dense.sum()) == 60 and triangles_trace(dense) == 0

    manifest = generate_all(plan(d, 1, 2), tmp_path)
    stats = measure(shards_of(manifest, tmp_path), r.vertices, count_triangles=True)
    assert diff(r, stats).passed
    return f"design {elapsed * 1e3:.2f} ms"


@criterion(2, "center loops 15 triangles, leaf loops 1 triangle")
def test_criterion_2_fig2(tmp_path):
    top = GraphDesign.stars([5, 3], "center", True)
    assert predict_triangles(top) == 15
    manifest = generate_all(plan(top, 1, 2), tmp_path / "top")
    stats = measure(shards_of(manifest, tmp_path / "top"), 24, count_triangles=True)
    assert stats.triangles == 15 and diff(design_report(top), stats).passed

    bottom = GraphDesign.stars([5, 3], "leaf", True)
    predicted = predict_triangles(bottom)
    brute = triangles_vertex_triples(materialize([(5, "leaf"), (3, "leaf")], True))
    assert predicted == brute == 1
    manifest = generate_all(plan(bottom, 1, 2), tmp_path / "bottom")
    stats = measure(shards_of(manifest, tmp_path / "bottom"), 24, count_triangles=True)
    assert stats.triangles == 1 and diff(design_report(bottom), stats).passed
    assert predicted != FIG2_BOTTOM_CAPTION_TRIANGLES
    return f"known discrepancy: caption says {FIG2_BOTTOM_CAPTION_TRIANGLES}, brute force gives {brute}"


@criterion(3, "trillion-edge design, center loops")
def test_criterion_3_fig4():
    r, elapsed = timed_report(GraphDesign.stars(FIG4, "center", True))
    assert r.vertices == 11_177_649_600
    assert r.edges == 1_853_002_140_758
    assert r.triangles == 6_777_007_252_427
    assert elapsed < 1.0
    return f"{elapsed * 1e3:.1f} ms"


@criterion(4, "quadrillion-edge design, no loops")
def test_criterion_4_fig5():
    r = design_report(GraphDesign.stars(FIG5))
    assert r.vertices == 6_997_208_649_600
    assert r.edges == 1_433_272_320_000_000
    assert r.triangles == 0


@criterion(5, "quadrillion-edge design, center loops")
def test_criterion_5_fig6():
    d = GraphDesign.stars(FIG5, "center", True)
    r = design_report(d)
    assert r.edges == 2_318_105_678_089_508
    assert r.triangles == 12_720_651_636_552_427
    # the numerator is an exact multiple of 6, so no rounding is involved
    assert (closed_wedges(d) - 3 * loop_vertex_degree(d) + 2) % 6 == 0
    delta = r.triangles - FIG6_CAPTION_TRIANGLES
    assert delta == 1
    return f"pinned: caption {FIG6_CAPTION_TRIANGLES}, exact {r.triangles} (delta {delta})"


@criterion(6, "decetta-scale design, leaf loops")
def test_criterion_6_fig7():
    r, elapsed = timed_report(GraphDesign.stars(FIG7, "leaf", True))
    assert r.vertices == 144_111_718_793_178_936_483_840_000
    assert r.edges == 2_705_963_586_782_877_716_483_871_216_764
    assert r.triangles == 178_940_587
    assert elapsed < 60.0
    return f"{elapsed:.2f} s, {len(r.distribution)} degree classes"


WORKER_COUNTS = (1, 2, 4, 7)
MAX_ORACLE_VERTICES = 1500  # dense trace(A^3) oracle stays fast below this


def random_designs(count=24, seed=20240101):
    """Uniform-loop designs, N_k in 2..4, m_hat in 2..9, cycling the loop policies."""
    rng = random.Random(seed)
    out = []
    policies = itertools.cycle([Loop.NONE, Loop.CENTER, Loop.LEAF])
    while len(out) < count:
        loop = next(policies)
        while True:
            n = rng.randint(2, 4)
            m_hats = [rng.randint(2, 9) for _ in range(n)]
            d = GraphDesign.stars(m_hats, loop, remove_loop=loop is not Loop.NONE)
            nnz = [f.nnz for f in d.factors]
            splits = [k for k in range(1, n) if np.prod(nnz[:k]) >= max(WORKER_COUNTS)]
            if predict_vertices(d) <= MAX_ORACLE_VERTICES and splits:
                out.append((d, rng.choice(splits)))
                break
    return out


@pytest.fixture(scope="module")
def desk_designs():
    return random_designs()


@criterion(7, "round trip over randomized desk-scale designs")
def test_criterion_7_round_trip(desk_designs, tmp_path):
    assert len(desk_designs) >= 20
    assert {d.factors[0].loop for d, _ in desk_designs} == set(Loop)
    for k, (d, split) in enumerate(desk_designs):
        r = design_report(d)
        dense = materialize([(f.m_hat, f.loop.value) for f in d.factors], d.remove_loop)
        assert triangles_trace(dense) == r.triangles
        edge_sets = []
        for w in WORKER_COUNTS:
            out = tmp_path / f"d{k}_w{w}"
            manifest = generate_all(plan(d, split, w), out, jobs=min(w, 4))
            assert manifest["total_edges"] == r.edges
            stats = measure(shards_of(manifest, out), r.vertices, count_triangles=True)
            report = diff(r, stats)
            assert report.passed, (d, w, report.to_dict())
            lines = sorted(ln for p in shards_of(manifest, out) for ln in p.read_text().splitlines())
            edge_sets.append(lines)
        assert all(s == edge_sets[0] for s in edge_sets[1:])
        expected = sorted(f"{i}\t{j}" for i, j in np.argwhere(dense).tolist())
        assert edge_sets[0] == expected
    return f"{len(desk_designs)} designs x workers {WORKER_COUNTS}"


@criterion(8, "chunk balance", part="a")
def test_criterion_8_balance():
    cases = 0
    for m_hats, loop in [([3, 4, 5], "none"), ([3, 4, 5, 9], "center"), ([2, 7, 3, 4], "leaf")]:
        d = GraphDesign.stars(m_hats, loop, loop != "none")
        for split in range(1, len(m_hats)):
            b_nnz = int(np.prod([f.nnz for f in d.factors[:split]]))
            for workers in range(1, min(b_nnz, 64) + 1):
                sizes = [ch.triples for ch in plan(d, split, workers, memory_budget=None).chunks]
                assert sum(sizes) == b_nnz
                imbalance = max(sizes) - min(sizes)
                assert imbalance == 0 if b_nnz % workers == 0 else imbalance <= 1
                cases += 1
    return f"{cases} (design, split, workers) cases"


def usable_cores() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


@pytest.mark.slow
@criterion(8, "4-thread throughput >= 2.5x 1-thread on ~1e8 edges", part="b")
def test_criterion_8_scaling():
    d = GraphDesign.stars([3, 4, 5, 9, 16, 256])
    gp = plan(d, 5, 64, memory_budget=None)
    assert gp.total_entries == 141_557_760

    def rate(jobs):
        t0 = time.perf_counter()
        summaries = run_chunks(gp, lambda p: CountingSink(), jobs=jobs)
        elapsed = time.perf_counter() - t0
        assert sum(s.edges for s in summaries) == gp.total_entries
        return gp.total_entries / elapsed

    r1 = rate(1)
    cores = usable_cores()
    if cores < 4:
        pytest.skip(f"needs >= 4 cores, machine has {cores}; 1-thread rate {r1:.3e} edges/s")
    r4 = rate(4)
    assert r4 >= 2.5 * r1, f"speedup {r4 / r1:.2f}x"
    return f"speedup {r4 / r1:.2f}x ({r1:.3e} -> {r4:.3e} edges/s)"


def read_pairs(path):
    rows = [ln.split("\t") for ln in path.read_text().splitlines()]
    return np.array(rows, dtype=np.int64).reshape(-1, 2)


@criterion(9, "incidence pair reconstructs the adjacency")
def test_criterion_9_incidence(desk_designs, tmp_path):
    for k, (d, split) in enumerate(desk_designs):
        gp = plan(d, split, 4)
        out = tmp_path / f"inc{k}"
        manifest = generate_incidence(gp, out)
        e = manifest["total_edges"]
        outs = np.concatenate([read_pairs(out / s["out"]) for s in manifest["shards"]])
        ins = np.concatenate([read_pairs(out / s["in"]) for s in manifest["shards"]])
        e_out = SparseMatrix.from_triples(e, gp.vertices, outs[:, 0], outs[:, 1])
        e_in = SparseMatrix.from_triples(e, gp.vertices, ins[:, 0], ins[:, 1])
        dense = materialize([(f.m_hat, f.loop.value) for f in d.factors], d.remove_loop)
        assert matmul(e_out.transpose(), e_in) == SparseMatrix.from_dense(dense)
    return f"{len(desk_designs)} designs"


EXHAUSTIVE_SPECS = [FactorSpec(m, loop) for m in range(2, 6) for loop in Loop]


@criterion(10, "algebraic identities on all star factors m_hat <= 5, N_k <= 3")
def test_criterion_10_algebra():
    stars = {f: star_matrix(f) for f in EXHAUSTIVE_SPECS}
    by_size: dict[int, list] = {}
    for f, m in stars.items():
        by_size.setdefault(m.rows, []).append(m)

    mixed = 0
    for ac_group, bd_group in itertools.product(by_size.values(), repeat=2):
        for a, c in itertools.product(ac_group, repeat=2):
            ac = matmul(a, c)
            for b, dd in itertools.product(bd_group, repeat=2):
                assert matmul(kron(a, b), kron(c, dd)) == kron(ac, matmul(b, dd))
                mixed += 1

    mats = list(stars.values())
    for a, b in itertools.product(mats, repeat=2):
        ab = kron(a, b)
        assert ab.nnz == a.nnz * b.nnz and ab.rows == a.rows * b.rows
        for c in mats:
            assert kron(ab, c) == kron(a, kron(b, c))

    designs = 0
    for n in (1, 2, 3):
        for specs in itertools.product(EXHAUSTIVE_SPECS, repeat=n):
            loops = {f.loop for f in specs}
            all_looped = Loop.NONE not in loops
            for remove in {False, all_looped}:
                d = GraphDesign(specs, remove_loop=remove, allow_mixed_loops=True)
                dist = predict_degree_distribution(d)
                assert dist.vertices == predict_vertices(d)
                assert dist.endpoints == predict_edges(d)
                s = closed_wedges(d)
                numerator = s - (3 * loop_vertex_degree(d) - 2 if all_looped else 0)
                assert numerator % 6 == 0
                designs += 1
                if n <= 2:
                    a = kron_all(stars[f] for f in specs)
                    if remove:
                        v = d.loop_position()
                        a = a.without_entry(v, v)
                    assert degrees(a) == dist
                    if not a.diagonal_nnz():
                        assert triangle_count(a) == predict_triangles(d)
    return f"{mixed} mixed-product cases, {len(mats) ** 3} associativity triples, {designs} designs"
