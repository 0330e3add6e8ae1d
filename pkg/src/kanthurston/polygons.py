"""Square-tiled discs with marked corners: curvature, Gauss-Bonnet and the constructors."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Hashable, Sequence

import networkx as nx

from .complexes.cube import CubeComplex, CubeComplexBuilder, cubical_subdivision, disjoint_union, face_slot, identify
from .complexes.links import vertex_link
from .errors import PolygonError


LOGGER = logging.getLogger(__name__)

# A boundary step: (edge id, +1 when traversed start -> end, -1 otherwise).
Step = tuple[int, int]

K_OK = "OK"
K_UNDERDETERMINED = "UNDERDETERMINED"
K_NON_INTEGRAL = "NON_INTEGRAL"
K_NEGATIVE = "NEGATIVE"
K_BAD_ZERO_PATTERN = "BAD_ZERO_PATTERN"
K_INCONSISTENT = "INCONSISTENT"


class SquareTiling:
    """Builds a square complex from squares named by their four corner keys."""

    def __init__(self):
        self._builder = CubeComplexBuilder()
        self._vertices: dict[Hashable, int] = {}
        self._edges: dict[frozenset, tuple[int, Hashable]] = {}
        self.coords: dict[int, tuple[float, float]] = {}

    def vertex(self, key: Hashable, coord: tuple[float, float] | None = None) -> int:
        v = self._vertices.get(key)
        if v is None:
            v = self._builder.add_vertex(key)
            self._vertices[key] = v
            if coord is not None:
                self.coords[v] = coord
        return v

    def edge(self, a: Hashable, b: Hashable) -> tuple[int, tuple[int]]:
        key = frozenset((a, b))
        hit = self._edges.get(key)
        if hit is None:
            e = self._builder.add_edge(self.vertex(a), self.vertex(b), ("e", a, b))
            self._edges[key] = (e, a)
            return e, (1,)
        e, start = hit
        return e, ((1,) if start == a else (-1,))

    def square(self, c00: Hashable, c10: Hashable, c01: Hashable, c11: Hashable, name=None) -> int:
        left = self.edge(c00, c01)
        right = self.edge(c10, c11)
        bottom = self.edge(c00, c10)
        top = self.edge(c01, c11)
        return self._builder.add_square(left, right, bottom, top, name)

    def lattice_square(self, x: int, y: int) -> int:
        for px, py in ((x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)):
            self.vertex((px, py), (float(px), float(py)))
        return self.square((x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1), ("sq", x, y))

    def vertex_id(self, key: Hashable) -> int:
        try:
            return self._vertices[key]
        except KeyError:
            raise PolygonError(f"No vertex at {key!r}.", code="unknown_vertex") from None

    def has_vertex(self, key: Hashable) -> bool:
        return key in self._vertices

    def build(self) -> CubeComplex:
        return self._builder.build()


@dataclass(frozen=True)
class TessellatedPolygon:
    carrier: CubeComplex
    boundary: tuple[Step, ...]
    corners: tuple[int, ...]
    coords: dict[int, tuple[float, float]] | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return len(self.corners)

    @property
    def perimeter(self) -> int:
        return len(self.boundary)

    @property
    def side_lengths(self) -> tuple[int, ...]:
        p = self.perimeter
        out = []
        for i, start in enumerate(self.corners):
            end = self.corners[(i + 1) % self.n]
            out.append((end - start) % p or p)
        return tuple(out)

    @property
    def square_count(self) -> int:
        return len(self.carrier.cells_of_dim(2))

    def step_start(self, position: int) -> int:
        edge, orient = self.boundary[position % self.perimeter]
        a, b = self.carrier.edge_endpoints(edge)
        return a if orient > 0 else b

    def boundary_vertices(self) -> tuple[int, ...]:
        return tuple(self.step_start(k) for k in range(self.perimeter))

    def corner_vertices(self) -> tuple[int, ...]:
        return tuple(self.step_start(c) for c in self.corners)

    def side_steps(self, i: int) -> tuple[Step, ...]:
        start = self.corners[i]
        return tuple(self.boundary[(start + k) % self.perimeter] for k in range(self.side_lengths[i]))

    @cached_property
    def degrees(self) -> dict[int, int]:
        return dict(self.carrier.one_skeleton().degree())

    def degree(self, v: int) -> int:
        return self.degrees[v]

    def to_dict(self) -> dict:
        return {
            "boundary": [[e, o] for e, o in self.boundary],
            "corners": list(self.corners),
            "side_lengths": list(self.side_lengths),
        }


def _boundary_orientations(c: CubeComplex) -> dict[int, int]:
    """Boundary edges (in exactly one square) with the orientation induced by that square."""
    count: dict[int, int] = {}
    orient: dict[int, int] = {}
    for sq in c.cells_of_dim(2):
        for k in (1, 2):
            base = 1 if k == 1 else -1
            for eps in (-1, 1):
                edge, s = c.faces[sq][face_slot(k, eps)]
                count[edge] = count.get(edge, 0) + 1
                orient[edge] = base * eps * s[0]
    for edge in c.cells_of_dim(1):
        hits = count.get(edge, 0)
        if hits == 0 or hits > 2:
            raise PolygonError(f"Edge {edge} lies in {hits} squares.", code="NOT_A_DISC", details={"edge": edge})
    return {e: orient[e] for e, hits in count.items() if hits == 1}


def trace_boundary(c: CubeComplex, start: int) -> tuple[Step, ...]:
    outgoing: dict[int, Step] = {}
    for edge, o in sorted(_boundary_orientations(c).items()):
        a, b = c.edge_endpoints(edge)
        tail = a if o > 0 else b
        if tail in outgoing:
            raise PolygonError("Boundary is pinched at a vertex.", code="NOT_A_DISC", details={"vertex": tail})
        outgoing[tail] = (edge, o)
    if start not in outgoing:
        raise PolygonError(f"Vertex {start} is not on the boundary.", code="NOT_A_DISC", details={"vertex": start})
    steps = []
    cur = start
    while True:
        edge, o = outgoing[cur]
        steps.append((edge, o))
        a, b = c.edge_endpoints(edge)
        cur = b if o > 0 else a
        if cur == start:
            break
        if cur not in outgoing or len(steps) > len(outgoing):
            raise PolygonError("Boundary does not close up.", code="NOT_A_DISC")
    if len(steps) != len(outgoing):
        raise PolygonError("Boundary has more than one component.", code="NOT_A_DISC")
    return tuple(steps)


def validate_disc(c: CubeComplex) -> None:
    if c.dimension != 2:
        raise PolygonError("A polygon carrier is 2-dimensional.", code="NOT_A_DISC")
    if c.euler_characteristic() != 1:
        raise PolygonError("Euler characteristic differs from 1.", code="NOT_A_DISC", details={"euler": c.euler_characteristic()})
    if not nx.is_connected(c.one_skeleton()):
        raise PolygonError("Carrier is disconnected.", code="NOT_A_DISC")
    boundary = _boundary_orientations(c)
    on_boundary = set()
    for edge in boundary:
        on_boundary.update(c.edge_endpoints(edge))
    for v in c.vertices():
        graph = vertex_link(c, v).graph()
        degrees = sorted(d for _n, d in graph.degree())
        if not degrees or not nx.is_connected(graph):
            raise PolygonError(f"Vertex {v} has a disconnected link.", code="NOT_A_DISC", details={"vertex": v})
        ends = sum(1 for d in degrees if d == 1)
        if any(d not in (1, 2) for d in degrees) or ends != (2 if v in on_boundary else 0):
            raise PolygonError(f"Vertex {v} is not a manifold point.", code="NOT_A_DISC", details={"vertex": v})


def polygon_from_carrier(
    c: CubeComplex,
    corner_vertices: Sequence[int],
    coords: dict[int, tuple[float, float]] | None = None,
    *,
    validate: bool = True,
) -> TessellatedPolygon:
    if len(corner_vertices) < 3:
        raise PolygonError("A polygon needs at least three corners.", code="OUT_OF_RANGE")
    if validate:
        validate_disc(c)
    steps = trace_boundary(c, corner_vertices[0])
    starts = {}
    for k, (edge, o) in enumerate(steps):
        a, b = c.edge_endpoints(edge)
        starts[a if o > 0 else b] = k
    positions = []
    for v in corner_vertices:
        if v not in starts:
            raise PolygonError(f"Corner vertex {v} is not on the boundary.", code="NOT_A_DISC", details={"vertex": v})
        positions.append(starts[v])
    if len(set(positions)) != len(positions) or positions != sorted(positions):
        raise PolygonError("Corners are not distinct and in boundary order.", code="NOT_A_DISC", details={"corners": positions})
    return TessellatedPolygon(c, steps, tuple(positions), coords)


def curvature(s: TessellatedPolygon, v: int) -> int:
    if not 0 <= v < len(s.carrier) or s.carrier.dims[v] != 0:
        raise PolygonError(f"Unknown vertex {v}.", code="unknown_vertex", details={"vertex": v})
    degree = s.degree(v)
    corners = set(s.corner_vertices())
    if v in corners:
        return 2 - degree
    if v in set(s.boundary_vertices()):
        return 3 - degree
    return 4 - degree


def curvatures(s: TessellatedPolygon) -> dict[int, int]:
    return {v: curvature(s, v) for v in s.carrier.vertices()}


def gauss_bonnet(s: TessellatedPolygon) -> int:
    total = sum(curvatures(s).values())
    if total != 4 - s.n:
        raise PolygonError(
            f"Total curvature {total} differs from {4 - s.n}.",
            code="GAUSS_BONNET",
            details={"total": total, "n": s.n},
        )
    return total


def is_cat0_polygon(s: TessellatedPolygon) -> tuple[bool, tuple[int, ...]]:
    positive = tuple(v for v, c in sorted(curvatures(s).items()) if c > 0)
    return not positive, positive


def rotate(s: TessellatedPolygon, k: int) -> TessellatedPolygon:
    """Renumber corners so that corner k becomes corner 0."""
    k %= s.n
    shift = s.corners[k]
    boundary = s.boundary[shift:] + s.boundary[:shift]
    corners = tuple(sorted((c - shift) % s.perimeter for c in s.corners))
    return TessellatedPolygon(s.carrier, boundary, corners, s.coords)


def insert_corner(s: TessellatedPolygon, i: int, k: int) -> TessellatedPolygon:
    if not 0 <= i < s.n:
        raise PolygonError(f"No side {i}.", code="OUT_OF_RANGE", details={"side": i})
    length = s.side_lengths[i]
    if not 0 < k < length:
        raise PolygonError(
            f"Cannot place a corner {k} steps into a side of length {length}.",
            code="OUT_OF_RANGE",
            details={"side": i, "k": k, "length": length},
        )
    position = (s.corners[i] + k) % s.perimeter
    corners = tuple(sorted(set(s.corners) | {position}))
    return TessellatedPolygon(s.carrier, s.boundary, corners, s.coords)


def rectangle(width: int, height: int) -> TessellatedPolygon:
    if width < 1 or height < 1:
        raise PolygonError("Rectangle sides must be positive.", code="OUT_OF_RANGE")
    tiling = SquareTiling()
    for x in range(width):
        for y in range(height):
            tiling.lattice_square(x, y)
    c = tiling.build()
    corners = [tiling.vertex_id(p) for p in ((0, 0), (width, 0), (width, height), (0, height))]
    return polygon_from_carrier(c, corners, tiling.coords)


def collar(s: TessellatedPolygon, i: int) -> TessellatedPolygon:
    """Attach a 1 x l_i strip along side i."""
    if not 0 <= i < s.n:
        raise PolygonError(f"No side {i}.", code="OUT_OF_RANGE", details={"side": i})
    steps = s.side_steps(i)
    length = len(steps)
    strip = SquareTiling()
    for x in range(length):
        strip.lattice_square(x, 0)
    strip_complex = strip.build()
    union, offsets = disjoint_union(CubeComplex(s.carrier.dims, s.carrier.faces), CubeComplex(strip_complex.dims, strip_complex.faces))
    shift = offsets[1]
    pairs = []
    for x in range(length):
        bottom, _g = strip.edge((x, 0), (x + 1, 0))
        edge, orient = steps[length - 1 - x]
        pairs.append((shift + bottom, edge, (-orient,)))
    glued, qmap = identify(union, pairs)
    moved = []
    old_corners = s.corner_vertices()
    for idx, v in enumerate(old_corners):
        if idx == i:
            moved.append(qmap[shift + strip.vertex_id((length, 1))][0])
        elif idx == (i + 1) % s.n:
            moved.append(qmap[shift + strip.vertex_id((0, 1))][0])
        else:
            moved.append(qmap[v][0])
    out = polygon_from_carrier(glued, moved, validate=False)
    LOGGER.debug("collar side %d: %d -> %d squares", i, s.square_count, out.square_count)
    return out


def collar_all(s: TessellatedPolygon) -> TessellatedPolygon:
    out = s
    for i in range(s.n):
        out = collar(out, i)
    return out


def collar_all_iter(s: TessellatedPolygon, m: int) -> TessellatedPolygon:
    out = s
    for _ in range(m):
        out = collar_all(out)
    return out


def subdivide_polygon(s: TessellatedPolygon) -> TessellatedPolygon:
    sub, index = cubical_subdivision(CubeComplex(s.carrier.dims, s.carrier.faces))
    corners = [index[(v, ())] for v in s.corner_vertices()]
    coords = None
    if s.coords:
        coords = {}
        for (cell, code), new in index.items():
            if any(code):
                continue
            pts = [s.coords[v] for v in s.carrier.corners(cell)]
            coords[new] = (2 * sum(p[0] for p in pts) / len(pts), 2 * sum(p[1] for p in pts) / len(pts))
    return polygon_from_carrier(sub, corners, coords, validate=False)


def _perimeter_point(pos: int, width: int, height: int) -> tuple[int, int]:
    p = 2 * (width + height)
    pos %= p
    if pos <= width:
        return pos, 0
    if pos <= width + height:
        return width, pos - width
    if pos <= 2 * width + height:
        return width - (pos - width - height), height
    return 0, height - (pos - 2 * width - height)


def _side_of(pos: int, width: int, height: int) -> int:
    """Side index (0 bottom, 1 right, 2 top, 3 left) of the half-open stretch starting at pos."""
    bounds = (width, width + height, 2 * width + height, 2 * (width + height))
    for k, b in enumerate(bounds):
        if pos < b:
            return k
    return 3


def corner_cut_rectangle(width: int, height: int, lengths: Sequence[int], offset: int = 0) -> TessellatedPolygon:
    """Cut a box off every rectangle corner that is not a marked point."""
    lengths = tuple(int(x) for x in lengths)
    p = 2 * (width + height)
    if width < 1 or height < 1:
        raise PolygonError("Rectangle sides must be positive.", code="OUT_OF_RANGE")
    if len(lengths) < 3 or any(x < 1 for x in lengths):
        raise PolygonError("Need at least three positive side lengths.", code="OUT_OF_RANGE")
    if sum(lengths) != p:
        raise PolygonError(
            f"Side lengths sum to {sum(lengths)}, the rectangle perimeter is {p}.",
            code="OUT_OF_RANGE",
            details={"perimeter": p},
        )
    marked = []
    pos = offset % p
    for length in lengths:
        marked.append(pos)
        pos = (pos + length) % p
    marked_set = set(marked)
    rect_corners = (0, width, width + height, 2 * width + height)
    boxes = []
    for j, w in enumerate(rect_corners):
        if w in marked_set:
            continue
        before = max((m for m in marked if m < w), default=None)
        if before is None:
            before = max(marked)
        after = min((m for m in marked if m > w), default=None)
        if after is None:
            after = min(marked)
        prev_corner = rect_corners[j - 1]
        next_corner = rect_corners[(j + 1) % 4]
        if (w - before) % p > (w - prev_corner) % p or (after - w) % p > (next_corner - w) % p:
            raise PolygonError(
                f"Cut at rectangle corner {j} runs past an adjacent side.",
                code="OVERLAP",
                details={"corner": j},
            )
        pts = [_perimeter_point(x, width, height) for x in (before, w, after)]
        xs = [q[0] for q in pts]
        ys = [q[1] for q in pts]
        boxes.append((j, min(xs), max(xs), min(ys), max(ys)))
    for a in range(len(boxes)):
        for b in range(a + 1, len(boxes)):
            ja, x0, x1, y0, y1 = boxes[a]
            jb, u0, u1, v0, v1 = boxes[b]
            if x0 <= u1 and u0 <= x1 and y0 <= v1 and v0 <= y1:
                raise PolygonError(
                    f"Cuts at rectangle corners {ja} and {jb} meet.",
                    code="OVERLAP",
                    details={"corners": [ja, jb]},
                )
    tiling = SquareTiling()
    for x in range(width):
        for y in range(height):
            if any(x0 <= x < x1 and y0 <= y < y1 for _j, x0, x1, y0, y1 in boxes):
                continue
            tiling.lattice_square(x, y)
    points = [_perimeter_point(m, width, height) for m in marked]
    missing = [list(q) for q in points if not tiling.has_vertex(q)]
    if missing:
        raise PolygonError("A marked point was cut away.", code="OVERLAP", details={"points": missing})
    c = tiling.build()
    poly = polygon_from_carrier(c, [tiling.vertex_id(q) for q in points], tiling.coords)
    if poly.side_lengths != lengths:
        raise PolygonError("Cut polygon does not have the requested sides.", code="OVERLAP", details={"sides": list(poly.side_lengths)})
    return poly


def corner_cut_search(width: int, height: int, lengths: Sequence[int]) -> tuple[TessellatedPolygon, int, bool]:
    """Try every offset and both orientations; returns (polygon, offset, reversed)."""
    p = 2 * (width + height)
    last: PolygonError | None = None
    for flipped in (False, True):
        seq = tuple(reversed(lengths)) if flipped else tuple(lengths)
        for offset in range(p):
            try:
                return corner_cut_rectangle(width, height, seq, offset), offset, flipped
            except PolygonError as exc:
                last = exc
    raise PolygonError("No placement of the marked points works.", code="OVERLAP", details={"last": last.to_dict() if last else None})


@dataclass(frozen=True)
class KSolution:
    status: str
    k: tuple[int, ...] | None = None
    positions: tuple[int, ...] = ()

    @property
    def feasible(self) -> bool:
        return self.status in (K_OK, K_UNDERDETERMINED)

    def to_dict(self) -> dict:
        return {"status": self.status, "k": list(self.k) if self.k is not None else None, "positions": list(self.positions)}


def _zero_pattern_ok(k: Sequence[int]) -> bool:
    n = len(k)
    zeros = [i for i, v in enumerate(k) if v == 0]
    if len(zeros) <= 1:
        return True
    if len(zeros) == 2:
        a, b = zeros
        return (b - a) % n == 1 or (a - b) % n == 1
    return False


def _grade(k: Sequence[int]) -> KSolution:
    negative = tuple(i for i, v in enumerate(k) if v < 0)
    if negative:
        return KSolution(K_NEGATIVE, tuple(k), negative)
    if not _zero_pattern_ok(k):
        return KSolution(K_BAD_ZERO_PATTERN, tuple(k), tuple(i for i, v in enumerate(k) if v == 0))
    return KSolution(K_OK, tuple(k))


def solve_k(lengths: Sequence[int]) -> KSolution:
    """Solve l_i = k_i + k_{i+2} (indices mod n) for the rectangle sizes of a single-vertex polygon."""
    l = tuple(int(x) for x in lengths)
    n = len(l)
    if n < 3:
        raise PolygonError("Need at least three sides.", code="OUT_OF_RANGE")
    if n % 4:
        m = n if n % 2 else n // 2
        doubled = []
        for i in range(n):
            doubled.append(sum((-1) ** j * l[(i + 2 * j) % n] for j in range(m)))
        odd = tuple(i for i, v in enumerate(doubled) if v % 2)
        if odd:
            return KSolution(K_NON_INTEGRAL, None, odd)
        k = tuple(v // 2 for v in doubled)
        bad = tuple(i for i in range(n) if k[i] + k[(i + 2) % n] != l[i])
        if bad:
            return KSolution(K_INCONSISTENT, k, bad)
        return _grade(k)

    half = n // 2
    for parity in (0, 1):
        alt = sum((-1) ** j * l[(parity + 2 * j) % n] for j in range(half))
        if alt:
            return KSolution(K_INCONSISTENT, None, (parity,))

    def fill(t: int, u: int) -> tuple[int, ...]:
        k = [0] * n
        k[0] = t
        k[1] = u
        for i in range(2, n):
            k[i] = l[i - 2] - k[i - 2]
        return tuple(k)

    best = None
    for t in range(max(l) + 1):
        for u in range(max(l) + 1):
            k = fill(t, u)
            if min(k) < 0 or not _zero_pattern_ok(k):
                continue
            key = (-min(k), k)
            if best is None or key < best[0]:
                best = (key, k)
    if best is None:
        return _grade(fill(0, 0))
    return KSolution(K_UNDERDETERMINED, best[1])


def _point_key(i: int, x: int, y: int, n: int):
    if x == 0 and y == 0:
        return "center"
    if y == 0:
        return ("ray", i, x)
    if x == 0:
        return ("ray", (i + 1) % n, y)
    return ("R", i, x, y)


def single_vertex_polygon(lengths: Sequence[int]) -> TessellatedPolygon:
    """Glue rectangles k_i x k_{i+1} around one vertex; corner i is the far corner of rectangle i."""
    solution = solve_k(lengths)
    if not solution.feasible:
        raise PolygonError(
            f"Side lengths {tuple(lengths)} admit no single-vertex polygon ({solution.status}).",
            code=solution.status,
            details=solution.to_dict(),
        )
    k = solution.k
    n = len(k)
    tiling = SquareTiling()
    for i in range(n):
        for x in range(k[i]):
            for y in range(k[(i + 1) % n]):
                tiling.square(
                    _point_key(i, x, y, n),
                    _point_key(i, x + 1, y, n),
                    _point_key(i, x, y + 1, n),
                    _point_key(i, x + 1, y + 1, n),
                    ("sq", i, x, y),
                )
    c = tiling.build()
    corners = [tiling.vertex_id(_point_key(i, k[i], k[(i + 1) % n], n)) for i in range(n)]
    poly = polygon_from_carrier(c, corners)
    if poly.side_lengths != tuple(lengths):
        raise PolygonError("Glued polygon does not have the requested sides.", code=K_INCONSISTENT, details={"sides": list(poly.side_lengths)})
    return poly


def regular_right_pentagon(m: int) -> TessellatedPolygon:
    if m < 1:
        raise PolygonError("Pentagon size must be at least 1.", code="OUT_OF_RANGE")
    return single_vertex_polygon((2 * m,) * 5)


def four_saddle_octagon() -> TessellatedPolygon:
    """CAT(0) octagon with seven sides 2 and one side 4, cut from a 5 x 4 rectangle."""
    return corner_cut_rectangle(5, 4, (2, 2, 2, 2, 2, 2, 2, 4), 0)


def strip_coords(s: TessellatedPolygon) -> TessellatedPolygon:
    return replace(s, coords=None)
