"""Exact degree distributions keyed by arbitrary-precision integers."""

from __future__ import annotations

from collections.abc import Iterator, Mapping


class DegreeDistribution(Mapping):
    """Immutable sorted map ``degree -> number of vertices with that degree``.

    Degrees and counts are plain Python ints, so distributions of graphs
    with 10^30 edges stay exact. Zero counts are never stored.
    """

    __slots__ = ("_counts", "_hash")

    def __init__(self, counts: Mapping[int, int] | None = None):
        items = {}
        for degree, count in (counts or {}).items():
            degree, count = int(degree), int(count)
            if degree < 0 or count < 0:
                raise ValueError(f"negative degree or count: ({degree}, {count})")
            if count:
                items[degree] = count
        self._counts = dict(sorted(items.items()))
        self._hash = None

    def __getitem__(self, degree: int) -> int:
        return self._counts[degree]

    def __iter__(self) -> Iterator[int]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __eq__(self, other) -> bool:
        if isinstance(other, DegreeDistribution):
            return self._counts == other._counts
        if isinstance(other, Mapping):
            return self._counts == {k: v for k, v in other.items() if v}
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._counts.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"DegreeDistribution({self._counts!r})"

    @property
    def vertices(self) -> int:
        return sum(self._counts.values())

    @property
    def endpoints(self) -> int:
        """Sum of degree * count, i.e. the nnz of the adjacency matrix."""
        return sum(d * c for d, c in self._counts.items())

    @property
    def max_degree(self) -> int:
        return next(reversed(self._counts)) if self._counts else 0

    def get_count(self, degree: int) -> int:
        return self._counts.get(degree, 0)

    def convolve(self, other: DegreeDistribution) -> DegreeDistribution:
        """Distribution of a Kronecker product: degrees multiply, counts multiply."""
        out: dict[int, int] = {}
        for d1, c1 in self._counts.items():
            for d2, c2 in other._counts.items():
                d = d1 * d2
                out[d] = out.get(d, 0) + c1 * c2
        return DegreeDistribution(out)

    def move_one(self, degree: int, new_degree: int) -> DegreeDistribution:
        """Move a single vertex from ``degree`` to ``new_degree``."""
        if self._counts.get(degree, 0) < 1:
            raise ValueError(f"no vertex with degree {degree} to move")
        out = dict(self._counts)
        out[degree] -= 1
        out[new_degree] = out.get(new_degree, 0) + 1
        return DegreeDistribution(out)

    def to_tsv(self) -> str:
        return "".join(f"{d}\t{c}\n" for d, c in self._counts.items())
