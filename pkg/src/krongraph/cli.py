"""``krongraph design|generate|verify CONFIG``.

Reports go to stdout, diagnostics to stderr. Exit status: 0 pass, 1 failed
verification or generation, 2 bad config or arguments.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from krongraph.config import ConfigError, DesignConfig, load_config
from krongraph.design import design_report, validate_power_law
from krongraph.generator import GenerationError, PlanError, generate_all, generate_incidence, plan
from krongraph.verifier import ShardFormatError, TriangleBoundError, diff, measure


def _apply_overrides(cfg: DesignConfig, args) -> DesignConfig:
    for attr, value in (
        ("split_index", getattr(args, "split", None)),
        ("workers", getattr(args, "workers", None)),
        ("jobs", getattr(args, "jobs", None)),
        ("out", getattr(args, "out", None)),
        ("memory_budget", getattr(args, "memory_budget", None)),
    ):
        if value is not None:
            setattr(cfg, attr, value)
    if getattr(args, "one_based", False):
        cfg.one_based = True
    return cfg


def cmd_design(cfg: DesignConfig, args) -> int:
    t0 = time.perf_counter()
    report = design_report(cfg.design)
    print("\n".join(report.summary_lines()))
    check = validate_power_law(cfg.design)
    for product, subsets in sorted(check.collisions.items()):
        print(f"warning: subset product {product} repeats for factor subsets {subsets}", file=sys.stderr)
    if args.distribution:
        Path(args.distribution).write_text(report.distribution.to_tsv())
    print(f"design computed in {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    if args.require_power_law and not report.power_law_valid:
        return 1
    return 0


def cmd_generate(cfg: DesignConfig, args) -> int:
    if not cfg.out:
        raise ConfigError("no output directory: use --out or an 'out' line", source=cfg.source)
    gp = plan(cfg.design, cfg.split_index, cfg.workers, cfg.memory_budget)
    t0 = time.perf_counter()
    manifest = generate_all(gp, cfg.out, jobs=cfg.jobs, one_based=cfg.one_based)
    elapsed = time.perf_counter() - t0
    if args.incidence:
        generate_incidence(gp, cfg.out, one_based=cfg.one_based)
    print(f"split_index\t{gp.split_index}")
    print(f"workers\t{gp.workers}")
    print(f"total_edges\t{manifest['total_edges']}")
    print(f"loop_removed_by\t{'-' if manifest['loop_removed_by'] is None else manifest['loop_removed_by']}")
    rate = manifest["total_edges"] / elapsed if elapsed > 0 else float("inf")
    print(f"generated {manifest['total_edges']} edges in {elapsed:.3f}s ({rate:.3e} edges/s)", file=sys.stderr)
    return 0


def cmd_verify(cfg: DesignConfig, args) -> int:
    shard_dir = Path(args.shards or cfg.out or ".")
    manifest_path = shard_dir / "manifest.json"
    one_based = cfg.one_based
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text())
        one_based = one_based or manifest.get("one_based", False)
        files = [shard_dir / s["file"] for s in manifest["shards"]]
        if not manifest.get("complete", True):
            print("warning: manifest marks the run incomplete", file=sys.stderr)
    else:
        files = sorted(shard_dir.glob("edges_*.tsv"))
    predicted = design_report(cfg.design)
    stats = measure(files, predicted.vertices, count_triangles=args.triangles, one_based=one_based)
    result = diff(predicted, stats)
    out = result.to_dict() | {
        "measured": {
            "edges": stats.edge_count,
            "self_loops": stats.self_loops,
            "duplicate_edges": stats.duplicate_edges,
            "triangles": stats.triangles,
            "degree_classes": len(stats.distribution),
        }
    }
    print(json.dumps(out, indent=2))
    return 0 if result.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="krongraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="print exact predicted properties")
    p.add_argument("config")
    p.add_argument("--distribution", metavar="PATH", help="write degree<TAB>count TSV")
    p.add_argument("--require-power-law", action="store_true",
                   help="exit 1 when subset products of m_hat collide")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("generate", help="write edge shards and a manifest")
    p.add_argument("config")
    p.add_argument("--out", metavar="DIR")
    p.add_argument("--workers", type=int, help="number of chunks (shards)")
    p.add_argument("--jobs", type=int, help="threads executing the chunks")
    p.add_argument("--split", type=int, help="number of leading factors in B")
    p.add_argument("--memory-budget", type=int, metavar="BYTES")
    p.add_argument("--one-based", action="store_true")
    p.add_argument("--incidence", action="store_true", help="also write incidence shards")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="measure shards and diff against the design")
    p.add_argument("config")
    p.add_argument("shards", nargs="?", help="shard directory (default: config 'out')")
    p.add_argument("--triangles", action="store_true")
    p.add_argument("--one-based", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        return args.func(cfg, args)
    except (ConfigError, PlanError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GenerationError, ShardFormatError, TriangleBoundError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
