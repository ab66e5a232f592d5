"""Line-oriented design configs.

Example::

    # trillion-edge verified graph
    star 3 center
    star 4 center
    remove_loop yes
    split 6
    workers 64

One ``star <m_hat> [none|center|leaf]`` line per factor, in Kronecker order.
Everything after ``#`` is a comment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from krongraph.design import DesignError, FactorSpec, GraphDesign, Loop
from krongraph.generator import DEFAULT_MEMORY_BUDGET


class ConfigError(ValueError):
    def __init__(self, msg: str, lineno: int | None = None, source: str = "<config>"):
        where = f"{source}:{lineno}: " if lineno is not None else f"{source}: "
        super().__init__(where + msg)
        self.lineno = lineno


_BOOLS = {"yes": True, "true": True, "1": True, "no": False, "false": False, "0": False}


@dataclass
class DesignConfig:
    design: GraphDesign
    split_index: int | None = None
    workers: int = 1
    jobs: int = 1
    out: str | None = None
    memory_budget: int | None = DEFAULT_MEMORY_BUDGET
    one_based: bool = False
    source: str = "<config>"


def _int(value: str, lineno: int, source: str, minimum: int = 0) -> int:
    try:
        n = int(value.replace("_", "").replace(",", ""))
    except ValueError:
        raise ConfigError(f"expected an integer, got {value!r}", lineno, source) from None
    if n < minimum:
        raise ConfigError(f"value must be >= {minimum}, got {n}", lineno, source)
    return n


def parse_config(text: str, source: str = "<config>") -> DesignConfig:
    factors: list[FactorSpec] = []
    opts: dict = {}
    remove_loop = allow_mixed = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        key = key.lower()
        if key == "star":
            if len(args) not in (1, 2):
                raise ConfigError("usage: star <m_hat> [none|center|leaf]", lineno, source)
            m_hat = _int(args[0], lineno, source)
            if m_hat < 2:
                raise ConfigError(f"m_hat must be >= 2, got {m_hat}", lineno, source)
            loop = args[1].lower() if len(args) == 2 else "none"
            if loop not in {p.value for p in Loop}:
                raise ConfigError(f"unknown loop placement {loop!r}", lineno, source)
            factors.append(FactorSpec(m_hat, Loop(loop)))
            continue
        if len(args) != 1:
            raise ConfigError(f"{key} takes exactly one value", lineno, source)
        value = args[0]
        if key in ("remove_loop", "allow_mixed_loops", "one_based"):
            if value.lower() not in _BOOLS:
                raise ConfigError(f"expected yes/no, got {value!r}", lineno, source)
            flag = _BOOLS[value.lower()]
            if key == "remove_loop":
                remove_loop = flag
            elif key == "allow_mixed_loops":
                allow_mixed = flag
            else:
                opts["one_based"] = flag
        elif key == "split":
            opts["split_index"] = _int(value, lineno, source, 1)
        elif key in ("workers", "jobs"):
            opts[key] = _int(value, lineno, source, 1)
        elif key == "memory_budget":
            opts["memory_budget"] = None if value.lower() == "none" else _int(value, lineno, source, 1)
        elif key == "out":
            opts["out"] = value
        else:
            raise ConfigError(f"unknown key {key!r}", lineno, source)
    if not factors:
        raise ConfigError("no 'star' lines", source=source)
    try:
        design = GraphDesign(tuple(factors), remove_loop, allow_mixed)
    except DesignError as exc:
        raise ConfigError(str(exc), source=source) from None
    return DesignConfig(design=design, source=source, **opts)


def load_config(path: str | os.PathLike) -> DesignConfig:
    path = Path(path)
    return parse_config(path.read_text(), source=str(path))
