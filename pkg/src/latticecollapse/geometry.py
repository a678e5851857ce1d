"""Periodic null lattice: vertices, links, causal order and spacelike surfaces.

Vertices are identified by their row-major id ``1..depth``.  Vertex ``(r, c)``
(rows from 1, columns mod ``N``) receives its left-going link from
``(r-1, c)`` and its right-going link from ``(r-1, c-1)``; its outgoing
left-going link feeds ``(r+1, c)`` and the right-going one ``(r+1, c+1)``.
Row 0 stands for the initial surface.

Every left-going chain and every right-going chain owns one Hilbert-space slot
for its whole life: an outgoing link takes the slot of the ingoing link of
the same direction.  Initial link ``k`` sits in slot ``k``, alternating
left/right by column.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

LEFT = "L"
RIGHT = "R"


class GeometryError(ValueError):
    pass


class LabellingError(GeometryError):
    """Raised when a vertex ordering is not a linear extension.

    ``pair`` holds the offending labels ``(i, j)`` with ``i < j`` although
    ``v_j`` lies in the causal past of ``v_i``.
    """

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


@dataclass(frozen=True)
class LatticeSpec:
    width: int
    depth: int

    def __post_init__(self):
        if not isinstance(self.width, int) or self.width < 1:
            raise GeometryError(f"width must be a positive integer, got {self.width!r}")
        if not isinstance(self.depth, int) or self.depth < 1:
            raise GeometryError(f"depth must be a positive integer, got {self.depth!r}")


@dataclass(frozen=True)
class Vertex:
    id: int
    row: int
    column: int


@dataclass(frozen=True)
class Link:
    """A lattice link.

    Initial links carry ``position`` (their place ``0..2N-1`` on the initial
    surface) and ``source=None``; all others carry the id of the vertex they
    leave.
    """

    direction: str
    slot: int
    source: int | None = None
    position: int | None = None

    @property
    def initial(self) -> bool:
        return self.source is None


@dataclass(frozen=True)
class NaturalLabelling:
    """Evolution order: ``order[i - 1]`` is the vertex id labelled ``v_i``."""

    order: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.order)

    def vertex(self, i: int) -> int:
        return self.order[i - 1]

    def label_of(self, vertex_id: int) -> int:
        return self.order.index(vertex_id) + 1

    def link_label(self, link: Link) -> int | None:
        """Index ``a`` of ``l_a`` under this labelling (None for initial links)."""
        if link.initial:
            return None
        i = self.label_of(link.source)
        return 2 * i - 1 if link.direction == LEFT else 2 * i

    def link(self, geometry: "LatticeGeometry", a: int) -> Link:
        """The link labelled ``l_a``."""
        vid = self.vertex((a + 1) // 2)
        return geometry.outgoing(vid)[0 if a % 2 == 1 else 1]


@dataclass(frozen=True)
class SpatialSurface:
    step: int
    links: tuple[Link, ...]  # indexed by slot


@dataclass(frozen=True)
class LatticeGeometry:
    spec: LatticeSpec
    vertices: tuple[Vertex, ...]
    initial_links: tuple[Link, ...]
    # reach[v] = ids strictly to the causal future of v
    reach: dict[int, frozenset[int]] = field(repr=False)
    default_labelling: NaturalLabelling = field(repr=False)

    @property
    def width(self) -> int:
        return self.spec.width

    @property
    def depth(self) -> int:
        return self.spec.depth

    @property
    def n_slots(self) -> int:
        return 2 * self.spec.width

    def vertex(self, vertex_id: int) -> Vertex:
        if not 1 <= vertex_id <= self.depth:
            raise GeometryError(f"no vertex {vertex_id} in a lattice of depth {self.depth}")
        return self.vertices[vertex_id - 1]

    def vertex_id(self, row: int, column: int) -> int:
        return (row - 1) * self.width + column % self.width + 1

    def ingoing(self, vertex_id: int) -> tuple[Link, Link]:
        """(left-going, right-going) ingoing links of a vertex."""
        v = self.vertex(vertex_id)
        N = self.width
        if v.row == 1:
            return (self.initial_links[2 * v.column],
                    self.initial_links[2 * ((v.column - 1) % N) + 1])
        left_src = self.vertex_id(v.row - 1, v.column)
        right_src = self.vertex_id(v.row - 1, v.column - 1)
        return self.outgoing(left_src)[0], self.outgoing(right_src)[1]

    def outgoing(self, vertex_id: int) -> tuple[Link, Link]:
        """(left-going, right-going) outgoing links of a vertex."""
        v = self.vertex(vertex_id)
        N = self.width
        return (Link(LEFT, 2 * v.column, source=vertex_id),
                Link(RIGHT, 2 * ((v.column - v.row) % N) + 1, source=vertex_id))

    def successors(self, vertex_id: int) -> tuple[int, ...]:
        v = self.vertex(vertex_id)
        out = {self.vertex_id(v.row + 1, v.column), self.vertex_id(v.row + 1, v.column + 1)}
        return tuple(sorted(w for w in out if w <= self.depth))

    def precedes(self, a: int, b: int) -> bool:
        """Strict causal order on vertex ids."""
        return b in self.reach[a]

    def link_precedes(self, a: Link, b: Link) -> bool:
        if b.initial:
            return False
        if a.initial:
            # an initial link feeds exactly one vertex of row 1
            target = self._initial_target(a)
            return target == b.source or self.precedes(target, b.source)
        if a.source == b.source:
            return False
        v = self.vertex(a.source)
        target = self.vertex_id(v.row + 1, v.column + (0 if a.direction == LEFT else 1))
        if target > self.depth:
            return False
        return target == b.source or self.precedes(target, b.source)

    def spacelike(self, a: Link, b: Link) -> bool:
        return a != b and not self.link_precedes(a, b) and not self.link_precedes(b, a)

    def _initial_target(self, link: Link) -> int:
        c = link.position // 2
        column = c if link.direction == LEFT else c + 1
        return self.vertex_id(1, column)

    def slot_of(self, link: Link) -> int:
        return link.slot


def build_lattice(spec: LatticeSpec) -> LatticeGeometry:
    N, depth = spec.width, spec.depth
    vertices = tuple(Vertex(i, (i - 1) // N + 1, (i - 1) % N) for i in range(1, depth + 1))
    initial = tuple(Link(LEFT if k % 2 == 0 else RIGHT, k, position=k) for k in range(2 * N))

    reach: dict[int, frozenset[int]] = {}
    for v in reversed(vertices):
        future: set[int] = set()
        for col in (v.column, v.column + 1):
            w = v.row * N + col % N + 1
            if w <= depth:
                future.add(w)
                future |= reach[w]
        reach[v.id] = frozenset(future)

    return LatticeGeometry(
        spec=spec,
        vertices=vertices,
        initial_links=initial,
        reach=reach,
        default_labelling=NaturalLabelling(tuple(range(1, depth + 1))),
    )


def validate_labelling(geometry: LatticeGeometry, candidate: Sequence[int]) -> NaturalLabelling:
    """Accept ``candidate`` (vertex ids in evolution order) iff it is a linear extension."""
    order = tuple(int(x) for x in candidate)
    if sorted(order) != list(range(1, geometry.depth + 1)):
        raise LabellingError(f"labelling must be a permutation of 1..{geometry.depth}")
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if geometry.precedes(order[j], order[i]):
                raise LabellingError(
                    f"v_{i + 1} (vertex {order[i]}) is in the causal future of "
                    f"v_{j + 1} (vertex {order[j]})",
                    pair=(i + 1, j + 1),
                )
    return NaturalLabelling(order)


def surface_at(geometry: LatticeGeometry, labelling: NaturalLabelling, n: int) -> SpatialSurface:
    """The surface with exactly ``v_1..v_n`` between it and the initial surface."""
    if not 0 <= n <= geometry.depth:
        raise GeometryError(f"surface index {n} outside 0..{geometry.depth}")
    links = list(geometry.initial_links)
    for i in range(1, n + 1):
        vid = labelling.vertex(i)
        for inc, out in zip(geometry.ingoing(vid), geometry.outgoing(vid)):
            if links[inc.slot] != inc:
                raise GeometryError(f"vertex {vid} evolved before its causal past")
            links[out.slot] = out
    return SpatialSurface(n, tuple(links))


def vertex_slots(geometry: LatticeGeometry, vertex_id: int) -> tuple[int, int]:
    """Slots (left, right) touched by the elementary motion across a vertex."""
    left, right = geometry.outgoing(vertex_id)
    return left.slot, right.slot
