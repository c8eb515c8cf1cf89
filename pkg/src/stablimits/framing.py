"""Hyperplane arrangement on the framing torus of a quiver frame.

A rational point w picks out the hyperplanes w_i - w_j = n it sits on, an
integrality block partition of the framing coordinates, a cyclic order, and
a tensor-product decomposition of the fixed components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

from .chars import Character


@dataclass(frozen=True)
class FramingPoint:
    """A rational point in the framing weight space, one coordinate per a_i."""

    coordinates: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "coordinates", tuple(Fraction(c) for c in self.coordinates)
        )

    def __len__(self) -> int:
        return len(self.coordinates)

    def weight(self, names: tuple[str, ...] | None = None) -> dict[str, Fraction]:
        if names is None:
            names = default_names(len(self))
        if len(names) != len(self):
            raise ValueError("one name per coordinate required")
        return dict(zip(names, self.coordinates))


def default_names(k: int) -> tuple[str, ...]:
    return tuple(f"a{i + 1}" for i in range(k))


def active_hyperplanes(point: FramingPoint) -> list[tuple[int, int, int]]:
    """Triples (i, j, n), i < j 1-based, with w_i - w_j = n integral."""
    out = []
    w = point.coordinates
    for i in range(len(w)):
        for j in range(i + 1, len(w)):
            diff = w[i] - w[j]
            if diff.denominator == 1:
                out.append((i + 1, j + 1, int(diff)))
    return out


@dataclass(frozen=True)
class BlockPartition:
    """Partition of 1..k by the relation w_i - w_j integral."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "blocks",
            tuple(sorted(tuple(sorted(b)) for b in self.blocks)),
        )

    @property
    def ground_size(self) -> int:
        return sum(len(b) for b in self.blocks)

    def block_of(self, i: int) -> int:
        for k, b in enumerate(self.blocks):
            if i in b:
                return k
        raise ValueError(f"index {i} not covered by {self.blocks}")

    def same_block(self, i: int, j: int) -> bool:
        return self.block_of(i) == self.block_of(j)

    def refines(self, other: "BlockPartition") -> bool:
        """True if every block of self sits inside a block of other."""
        return all(
            len({other.block_of(i) for i in block}) == 1 for block in self.blocks
        )


def index_blocks(point: FramingPoint) -> BlockPartition:
    k = len(point)
    parent = list(range(k))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j, _ in active_hyperplanes(point):
        ri, rj = find(i - 1), find(j - 1)
        if ri != rj:
            parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for x in range(k):
        groups.setdefault(find(x), []).append(x + 1)
    return BlockPartition(tuple(tuple(g) for g in groups.values()))


def cyclic_order(point: FramingPoint) -> int:
    """Least b >= 1 with b * w integral; integer drifts are invisible mod 1."""
    return math.lcm(*(int((c % 1).denominator) for c in point.coordinates))


def normal_character_crosses_blocks(i: int, j: int, blocks: BlockPartition) -> bool:
    """Whether the ratio character a_i / a_j survives into the normal bundle
    (equivalently, i and j lie in different blocks)."""
    if i == j:
        raise ValueError("need two distinct framing indices")
    return not blocks.same_block(i, j)


@dataclass(frozen=True)
class QuiverFrame:
    """Framing dimensions and dimension vector, one entry per quiver vertex."""

    framing_dims: tuple[int, ...]
    dims: tuple[int, ...]

    def __post_init__(self):
        if len(self.framing_dims) != len(self.dims):
            raise ValueError("framing_dims and dims must have equal length")
        if any(r < 0 for r in self.framing_dims) or any(n < 0 for n in self.dims):
            raise ValueError("dimensions must be nonnegative")

    @property
    def vertex_count(self) -> int:
        return len(self.dims)

    @property
    def total_framing(self) -> int:
        return sum(self.framing_dims)

    def coordinate_vertex(self, i: int) -> int:
        """Vertex (1-based) owning the 1-based framing coordinate i."""
        acc = 0
        for v, r in enumerate(self.framing_dims, start=1):
            acc += r
            if i <= acc:
                return v
        raise ValueError(f"coordinate {i} exceeds total framing {acc}")


def framing_split(frame: QuiverFrame, blocks: BlockPartition) -> list[tuple[int, ...]]:
    """Per-block framing dimension vectors r_k induced by the partition."""
    if blocks.ground_size != frame.total_framing:
        raise ValueError("partition does not cover the framing coordinates")
    out = []
    for block in blocks.blocks:
        r = [0] * frame.vertex_count
        for i in block:
            r[frame.coordinate_vertex(i) - 1] += 1
        out.append(tuple(r))
    return out


def weak_compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All tuples of `parts` nonnegative integers summing to n, lexicographic."""
    if parts == 0:
        if n == 0:
            yield ()
        return
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in weak_compositions(n - first, parts - 1):
            yield (first, *rest)


def enumerate_fixed_components(
    frame: QuiverFrame, blocks: BlockPartition
) -> list[tuple[tuple[int, ...], ...]]:
    """All splittings of the dimension vector across the blocks.

    Each element is a tuple (n_1, ..., n_m) of per-block dimension vectors
    with componentwise sum equal to the frame's dimension vector; it labels
    the product component X(n_1, r_1) x ... x X(n_m, r_m).
    """
    m = len(blocks.blocks)
    per_vertex = [list(weak_compositions(n, m)) for n in frame.dims]
    out = []
    for choice in product(*per_vertex):
        # choice[v][k] = dimension of vertex v assigned to block k
        out.append(tuple(tuple(choice[v][k] for v in range(frame.vertex_count)) for k in range(m)))
    return out


def component_count(frame: QuiverFrame, blocks: BlockPartition) -> int:
    m = len(blocks.blocks)
    count = 1
    for n in frame.dims:
        count *= math.comb(n + m - 1, m - 1)
    return count


def invariant_polarization_split(
    P: Character, point: FramingPoint, names: tuple[str, ...] | None = None
) -> tuple[Character, Character]:
    """Split a character into the part pairing integrally with the framing
    point (invariant) and the rest (moving)."""
    weight = point.weight(names)
    invariant = P.invariant_part(weight)
    return invariant, P - invariant


def framing_report(
    frame: QuiverFrame | None, point: FramingPoint
) -> dict:
    """Everything the arrangement knows about one rational point."""
    blocks = index_blocks(point)
    out = {
        "point": [str(c) for c in point.coordinates],
        "active_hyperplanes": [list(h) for h in active_hyperplanes(point)],
        "blocks": [list(b) for b in blocks.blocks],
        "cyclic_order": cyclic_order(point),
    }
    if frame is not None:
        components = enumerate_fixed_components(frame, blocks)
        out["framing_split"] = [list(r) for r in framing_split(frame, blocks)]
        out["component_count"] = len(components)
        out["components"] = [[list(n) for n in comp] for comp in components]
    return out
