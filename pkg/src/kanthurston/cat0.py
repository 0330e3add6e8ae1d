"""Hyperplanes, half-spaces, convex hulls and fixed points in CAT(0) cube complexes."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx
from networkx.utils import UnionFind

from .complexes.cube import CubeComplex, face_slot
from .complexes.links import cubicality_check, gromov_check
from .complexes.maps import CellularMap, check_cellular_map
from .errors import ComplexError, FixedPointError, HalfspaceError


LOGGER = logging.getLogger(__name__)

# (edge id, +1 along the edge's own direction, -1 against it)
DirectedEdge = tuple[int, int]


@dataclass(frozen=True, eq=False)
class HyperplaneDecomposition:
    complex: CubeComplex
    classes: tuple[frozenset[DirectedEdge], ...]
    class_of: dict[DirectedEdge, int]
    opposite: tuple[int, ...]
    _sides: dict = field(default_factory=dict, repr=False)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((h, o) for h, o in enumerate(self.opposite) if h < o)

    def edges_of(self, pair: tuple[int, int]) -> frozenset[int]:
        return frozenset(e for e, _sign in self.classes[pair[0]])

    def sides(self, pair: tuple[int, int]) -> tuple[frozenset[int], frozenset[int]]:
        cached = self._sides.get(pair)
        if cached is None:
            cached = halfspaces(self.complex, pair, self)
            self._sides[pair] = cached
        return cached

    def membership(self, v: int) -> tuple[int, ...]:
        """Which side of every hyperplane pair the vertex lies on."""
        return tuple(0 if v in self.sides(pair)[0] else 1 for pair in self.pairs)


def _square_parallels(c: CubeComplex, square: int):
    for k in (1, 2):
        (e1, s1), (e2, s2) = c.faces[square][face_slot(k, -1)], c.faces[square][face_slot(k, 1)]
        yield (e1, s1[0]), (e2, s2[0])
        yield (e1, -s1[0]), (e2, -s2[0])


def hyperplanes(c: CubeComplex, *, check: bool = True) -> HyperplaneDecomposition:
    """Union-find over directed edges; two are related when parallel in a square."""
    if check:
        if not cubicality_check(c).cubical:
            raise HalfspaceError("Hyperplanes need a cubical complex.", code="PRECONDITION", details={"check": "cubicality"})
        if not gromov_check(c, stop_early=True).passed:
            raise HalfspaceError("Hyperplanes need a locally CAT(0) complex.", code="PRECONDITION", details={"check": "gromov"})
    uf = UnionFind()
    for e in c.cells_of_dim(1):
        uf[(e, 1)]
        uf[(e, -1)]
    for square in c.cells_of_dim(2):
        for a, b in _square_parallels(c, square):
            uf.union(a, b)
    classes = sorted((frozenset(s) for s in uf.to_sets()), key=min)
    class_of = {d: h for h, members in enumerate(classes) for d in members}
    opposite = []
    for h, members in enumerate(classes):
        e, sign = min(members)
        o = class_of[(e, -sign)]
        if o == h:
            raise HalfspaceError("A hyperplane is one-sided.", code="PRECONDITION", details={"edge": e})
        opposite.append(o)
    for square in c.cells_of_dim(2):
        counts: dict[int, int] = {}
        for a, b in _square_parallels(c, square):
            for d in (a, b):
                counts[class_of[d]] = counts.get(class_of[d], 0) + 1
        if max(counts.values()) > 2:
            raise HalfspaceError("A hyperplane crosses a square twice.", code="PRECONDITION", details={"square": square})
    result = HyperplaneDecomposition(c, tuple(classes), class_of, tuple(opposite))
    LOGGER.info("hyperplanes: %d opposite pairs over %d edges", len(result.pairs), len(c.cells_of_dim(1)))
    return result


def halfspaces(
    c: CubeComplex, pair: tuple[int, int], decomposition: HyperplaneDecomposition | None = None
) -> tuple[frozenset[int], frozenset[int]]:
    """Vertex components of C minus the open carrier; tails of the first class come first."""
    decomposition = decomposition if decomposition is not None else hyperplanes(c)
    cut = decomposition.edges_of(pair)
    graph = nx.Graph()
    graph.add_nodes_from(c.vertices())
    for e in c.cells_of_dim(1):
        if e not in cut:
            graph.add_edge(*c.edge_endpoints(e))
    components = [frozenset(comp) for comp in nx.connected_components(graph)]
    if len(components) > 2:
        raise HalfspaceError(
            "Removing the hyperplane leaves more than two components.",
            code="MORE_THAN_TWO_COMPONENTS",
            details={"components": len(components)},
        )
    if len(components) < 2:
        raise HalfspaceError("The hyperplane does not separate the complex.", code="NOT_SEPARATING")
    e, sign = min(decomposition.classes[pair[0]])
    a, b = c.edge_endpoints(e)
    tail = a if sign > 0 else b
    first, second = components
    return (first, second) if tail in first else (second, first)


def skeleton_distance(c: CubeComplex, v: int, w: int) -> int:
    try:
        return nx.shortest_path_length(c.one_skeleton(), v, w)
    except nx.NetworkXNoPath:
        raise ComplexError("The vertices lie in different components.", code="disconnected", details={"vertices": [v, w]}) from None


def separating_pairs(c: CubeComplex, v: int, w: int, decomposition: HyperplaneDecomposition | None = None) -> int:
    decomposition = decomposition if decomposition is not None else hyperplanes(c)
    count = 0
    for pair in decomposition.pairs:
        first, _second = decomposition.sides(pair)
        if (v in first) != (w in first):
            count += 1
    return count


def full_span(c: CubeComplex, vertices: Iterable[int]) -> frozenset[int]:
    members = frozenset(vertices)
    return frozenset(cell for cell in range(len(c)) if set(c.corners(cell)) <= members)


def convex_hull(
    c: CubeComplex, cells: Iterable[int], decomposition: HyperplaneDecomposition | None = None
) -> frozenset[int]:
    """Cells spanned by the intersection of every half-space holding all the input vertices."""
    points = set()
    for cell in cells:
        points.update(c.corners(cell))
    if not points:
        raise HalfspaceError("The hull of an empty set is undefined.", code="empty_input")
    decomposition = decomposition if decomposition is not None else hyperplanes(c)
    hull = set(c.vertices())
    for pair in decomposition.pairs:
        first, second = decomposition.sides(pair)
        if points <= first:
            hull &= first
        elif points <= second:
            hull &= second
    result = full_span(c, hull)
    LOGGER.debug("convex hull of %d vertices: %d vertices", len(points), len(hull))
    return result


def _orbit(generators: Sequence[CellularMap], start: int) -> frozenset[int]:
    seen = {start}
    stack = [start]
    while stack:
        cell = stack.pop()
        for g in generators:
            image = g.images[cell][0]
            if image not in seen:
                seen.add(image)
                stack.append(image)
    return frozenset(seen)


def fixed_point(
    c: CubeComplex,
    generators: Sequence[CellularMap],
    decomposition: HyperplaneDecomposition | None = None,
) -> int:
    """A setwise-invariant cell of minimal dimension; its barycentre is fixed by the group."""
    for g in generators:
        if not g.is_total() or len(g.image_cells()) != len(c):
            raise FixedPointError("Generators must be cellular automorphisms.", code="not_automorphism")
        check_cellular_map(g)

    def invariant(cell: int) -> bool:
        return all(g.images[cell][0] == cell for g in generators)

    for v in c.vertices():
        if invariant(v):
            return v
    orbit = _orbit(generators, c.vertices()[0])
    hull = convex_hull(c, orbit, decomposition)
    candidates = sorted((cell for cell in hull if invariant(cell)), key=lambda x: (c.dims[x], x))
    if not candidates:
        raise FixedPointError("No invariant cube in the orbit hull.", code="NO_INVARIANT_CUBE")
    LOGGER.info("fixed point: cell %d of dimension %d", candidates[0], c.dims[candidates[0]])
    return candidates[0]


def ascending_chain_check(c: CubeComplex) -> bool:
    """Finite complexes with dimension-lowering face maps have no infinite ascending chain of cells."""
    return all(c.dims[t] < d for d, entries in zip(c.dims, c.faces) for t, _s in entries)
