"""The acyclic kit (A', A, tau, j) and the functor X -> T_X built simplex by simplex.

Every cell of T_X and U_X carries a provenance label naming the simplex of X whose
insertion created it; T_W for a subcomplex W is the set of cells labelled by W.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .complexes.cube import (
    CubeComplex,
    CubeComplexBuilder,
    Face,
    Sym,
    disjoint_union,
    extract,
    face_slot,
    glue,
    identify,
    interval,
    product,
    standard_cube,
    sym_compose,
    sym_identity,
)
from .complexes.links import gromov_check, is_combinatorially_convex
from .complexes.maps import (
    CellularMap,
    Involution,
    check_cellular_map,
    check_involution,
    fixed_cells,
    fixed_subcomplex,
    identity_map,
    induced_map,
    propagate_map,
    quotient_by_involution,
)
from .complexes.simplicial import DeltaComplex, category_c_check
from .errors import ComplexError, KitError, MapError
from .homology import HomologyGroups, complex_homology, is_acyclic, relative_homology


LOGGER = logging.getLogger(__name__)

JOURNEY = 4
TORUS_HALF = 4

# One step of an edge loop: (edge id, +1 when traversed start -> end).
Step = tuple[int, int]


# ---------------------------------------------------------------------------
# Cylinders and tori
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MappingCylinder:
    """(T x [0, n] + U) / (t, n) ~ f(t); U keeps its cell ids."""

    complex: CubeComplex
    qmap: tuple[Face, ...]
    length: int
    source_size: int
    target_size: int

    def level(self, cell: int, k: int) -> Face:
        """Image of the source cell at interval vertex k."""
        return self.qmap[self.target_size + cell * (2 * self.length + 1) + k]

    def base_cells(self) -> tuple[int, ...]:
        return tuple(self.level(t, 0)[0] for t in range(self.source_size))


def mapping_cylinder(f: CellularMap, length: int) -> MappingCylinder:
    if length < 1:
        raise MapError("Cylinder length must be positive.", code="out_of_range")
    if not f.is_total():
        raise MapError("A mapping cylinder needs a map defined on every cell.", code="not_total")
    check_cellular_map(f)
    source, target = f.source, f.target
    bar = interval(length)
    width = len(bar)
    prism = product(CubeComplex(source.dims, source.faces), bar)
    union, offsets = disjoint_union(CubeComplex(target.dims, target.faces), CubeComplex(prism.dims, prism.faces))
    pairs = []
    for t in range(len(source)):
        y, g = f.images[t]
        pairs.append((offsets[1] + t * width + length, y, g))
    quotient, qmap = identify(union, pairs)
    LOGGER.debug("mapping cylinder of length %d: %d cells", length, len(quotient))
    return MappingCylinder(quotient, qmap, length, len(source), len(target))


@dataclass(frozen=True)
class MappingTorus:
    """Y x [-h, h] with (y, h) ~ (f y, -h); the involution (y, t) -> (rho y, -t) when given."""

    complex: CubeComplex
    qmap: tuple[Face, ...]
    half: int
    tau: Involution | None = None

    @property
    def width(self) -> int:
        return 4 * self.half + 1

    def vertex_layer(self, cell: int, k: int) -> Face:
        """Cell ``cell`` of Y at height k - half."""
        return self.qmap[cell * self.width + k]

    def edge_layer(self, cell: int, k: int) -> Face:
        """Cell ``cell`` of Y times the k-th unit interval."""
        return self.qmap[cell * self.width + 2 * self.half + 1 + k]


def _reflection_images(rho: CellularMap, y_complex: CubeComplex, half: int) -> dict[int, Face]:
    span = 2 * half
    width = 2 * span + 1
    images = {}
    for y, d in enumerate(y_complex.dims):
        z, g = rho.images[y]
        for k in range(span + 1):
            images[y * width + k] = (z * width + span - k, g)
        for k in range(span):
            images[y * width + span + 1 + k] = (z * width + span + 1 + (span - 1 - k), tuple(g) + (-(d + 1),))
    return images


def mapping_torus(f: CellularMap, half_length: int = TORUS_HALF) -> MappingTorus:
    if len(f.source) != len(f.target):
        raise MapError("A mapping torus needs a self-map.", code="not_endomorphism")
    if not f.is_total():
        raise MapError("A mapping torus needs a map defined on every cell.", code="not_total")
    y_complex = f.source
    span = 2 * half_length
    bar = interval(span, -half_length)
    width = len(bar)
    layers = product(CubeComplex(y_complex.dims, y_complex.faces), bar)
    pairs = []
    for y in range(len(y_complex)):
        z, g = f.images[y]
        pairs.append((y * width + span, z * width, g))
    quotient, qmap = identify(layers, pairs)
    tau = None
    if isinstance(f, Involution):
        lifted = induced_map(qmap, quotient, qmap, quotient, _reflection_images(f, y_complex, half_length))
        tau = Involution(quotient, quotient, lifted.images)
        check_involution(tau)
    LOGGER.info("mapping torus: %s", quotient.cell_counts())
    return MappingTorus(quotient, qmap, half_length, tau)


# ---------------------------------------------------------------------------
# Kits
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AcyclicKit:
    name: str
    aprime: CubeComplex
    a_cells: frozenset[int]
    tau: Involution
    a0: int
    j: tuple[Step, ...]
    fixed_set_is_a: bool = False

    @cached_property
    def a_complex(self) -> tuple[CubeComplex, tuple[int, ...]]:
        return extract(self.aprime, self.a_cells)

    @cached_property
    def a_index(self) -> dict[int, int]:
        return {parent: local for local, parent in enumerate(self.a_complex[1])}

    @property
    def dims(self) -> tuple[int, int]:
        return self.a_complex[0].dimension, self.aprime.dimension

    def loop_vertices(self) -> tuple[int, ...]:
        """Vertices j(0), ..., j(JOURNEY - 1); the constant loop stays at a0."""
        if not self.j:
            return (self.a0,) * JOURNEY
        return tuple(_step_tail(self.aprime, step) for step in self.j)


def _step_tail(c: CubeComplex, step: Step) -> int:
    a, b = c.edge_endpoints(step[0])
    return a if step[1] > 0 else b


def _step_head(c: CubeComplex, step: Step) -> int:
    a, b = c.edge_endpoints(step[0])
    return b if step[1] > 0 else a


@dataclass(frozen=True)
class KitReport:
    name: str
    dims: tuple[int, int]
    a_acyclic: bool | None
    aprime_acyclic: bool | None
    quotient_acyclic: bool | None

    @property
    def passed(self) -> bool:
        return all(v is not False for v in (self.a_acyclic, self.aprime_acyclic, self.quotient_acyclic))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "dims": list(self.dims),
            "a_acyclic": self.a_acyclic,
            "aprime_acyclic": self.aprime_acyclic,
            "quotient_acyclic": self.quotient_acyclic,
            "passed": self.passed,
        }


def validate_kit(kit: AcyclicKit, *, homology: bool = True) -> KitReport:
    """Structural checks raise KitError; homology results are reported."""
    c = kit.aprime
    try:
        check_involution(kit.tau)
    except MapError as exc:
        raise KitError(f"Kit involution is invalid: {exc}", code="bad_involution", details=exc.to_dict()) from exc
    if not c.is_subcomplex(kit.a_cells):
        raise KitError("A is not a subcomplex of A'.", code="not_subcomplex")
    fixed = fixed_cells(c, kit.tau)
    if not kit.a_cells <= fixed:
        raise KitError("A is not pointwise fixed by tau.", code="not_fixed")
    if kit.fixed_set_is_a and fixed != kit.a_cells:
        raise KitError("The fixed set of tau is larger than A.", code="fixed_set", details={"extra": len(fixed - kit.a_cells)})
    if kit.a0 not in kit.a_cells or c.dims[kit.a0] != 0:
        raise KitError("a0 is not a vertex of A.", code="bad_base_point")
    if len(kit.j) not in (0, JOURNEY):
        raise KitError(f"The loop j must be constant or have {JOURNEY} edges.", code="bad_loop")
    cursor = kit.a0
    for step in kit.j:
        if step[0] not in kit.a_cells or c.dims[step[0]] != 1:
            raise KitError("The loop j leaves A.", code="bad_loop", details={"edge": step[0]})
        if _step_tail(c, step) != cursor:
            raise KitError("The loop j is not an edge path.", code="bad_loop", details={"edge": step[0]})
        cursor = _step_head(c, step)
    if cursor != kit.a0:
        raise KitError("The loop j does not close up at a0.", code="bad_loop")
    a_ok = aprime_ok = quotient_ok = None
    if homology:
        a_ok = is_acyclic(kit.a_complex[0])
        aprime_ok = is_acyclic(c)
        quotient_ok = is_acyclic(quotient_by_involution(c, kit.tau)[0])
    report = KitReport(kit.name, kit.dims, a_ok, aprime_ok, quotient_ok)
    LOGGER.info("kit %s: dims %s, acyclic A=%s A'=%s quotient=%s", kit.name, kit.dims, a_ok, aprime_ok, quotient_ok)
    return report


def _square_loop(c: CubeComplex, square: int) -> tuple[Step, ...]:
    """Boundary of a square as a closed 4-step loop starting at its (-1, -1) corner."""
    steps = []
    for k, eps in ((2, -1), (1, 1), (2, 1), (1, -1)):
        edge, s = c.faces[square][face_slot(k, eps)]
        base = 1 if k == 1 else -1
        steps.append((edge, base * eps * s[0]))
    return tuple(steps)


def mock_kit() -> AcyclicKit:
    """A = A' = a single vertex, the trivial involution and j the constant loop.

    i_X then collapses every petal onto the vertex, so each cylinder is a cone.
    """
    point = standard_cube(0)
    tau = Involution(point, point, identity_map(point).images)
    return AcyclicKit("mock", point, frozenset((0,)), tau, 0, ())


def cube_kit() -> AcyclicKit:
    """Unit 3-cube with A its bottom square, the trivial involution and j the boundary of A."""
    cube = standard_cube(3)
    top = len(cube) - 1
    bottom, _g = cube.face_of(top, (0, 0, -1))
    loop = _square_loop(cube, bottom)
    tau = Involution(cube, cube, identity_map(cube).images)
    a0 = _step_tail(cube, loop[0])
    return AcyclicKit("cube", cube, cube.closure((bottom,)), tau, a0, loop)


def _chase(chain: Sequence[tuple[Face, ...]], cell: int) -> Face:
    """Follow a cell through successive quotient maps, composing the frame changes."""
    total: Sym | None = None
    for qmap in chain:
        cell, g = qmap[cell]
        total = g if total is None else sym_compose(g, total)
    return cell, total


def build_aa_pair() -> AcyclicKit:
    """The 3-dimensional pair: mapping torus of the acyctwo involution, pinched, then a copy of Y glued on two petals."""
    from .presentation_complexes import acyctwo_complex

    pc, tau_y, _rotation = acyctwo_complex()
    y_complex = pc.complex
    y0 = pc.center
    torus = mapping_torus(tau_y, TORUS_HALF)
    x1 = torus.complex
    span = 2 * TORUS_HALF
    middle = torus.vertex_layer(y0, TORUS_HALF)[0]
    end = torus.vertex_layer(y0, span)[0]
    x2, q2 = identify(x1, [(middle, end, ())])
    tau_2 = Involution(x2, x2, induced_map(q2, x2, q2, x2, torus.tau.images).images)
    check_involution(tau_2)

    def in_x2(cell: int, k: int, *, edge: bool) -> Face:
        first = torus.edge_layer(cell, k) if edge else torus.vertex_layer(cell, k)
        cell2, g2 = q2[first[0]]
        return cell2, sym_compose(g2, first[1])

    seeds = {}
    first_petal = pc.petals[1]
    third_petal = pc.petals[3]
    for k in range(JOURNEY):
        e, g = in_x2(y0, k, edge=True)
        seeds[e] = (first_petal[k], g)
        e, g = in_x2(y0, JOURNEY + k, edge=True)
        seeds[e] = (third_petal[JOURNEY - 1 - k], (-g[0],))
    phi = propagate_map(x2, y_complex, seeds)
    pushout = glue(x2, y_complex, phi)
    aprime = pushout.complex
    qmap = pushout.maps[0] + pushout.maps[1]
    offset = len(x2)
    images = dict(tau_2.images)
    for y, (z, g) in tau_y.images.items():
        images[offset + y] = (offset + z, g)
    tau = Involution(aprime, aprime, induced_map(qmap, aprime, qmap, aprime, images).images)
    check_involution(tau)

    chain = (torus.qmap, q2, pushout.maps[0])
    width = torus.width
    a_cells = frozenset(_chase(chain, y * width + span)[0] for y in range(len(y_complex)))
    a0 = _chase(chain, y0 * width + span)[0]
    loop = []
    for edge in pc.petals[1]:
        cell, g = _chase(chain, edge * width + span)
        loop.append((cell, g[0]))
    kit = AcyclicKit("genuine", aprime, a_cells, tau, a0, tuple(loop), fixed_set_is_a=True)
    LOGGER.info("genuine kit: A' cells %s, A has %d cells", aprime.cell_counts(), len(a_cells))
    return kit


def load_kit(name: str) -> AcyclicKit:
    if name == "mock":
        return mock_kit()
    if name == "cube":
        return cube_kit()
    if name == "genuine":
        return build_aa_pair()
    raise KitError(f"Unknown kit {name!r}.", code="unknown_kit")


# ---------------------------------------------------------------------------
# The functor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CellLabel:
    """Provenance of a cell: the simplex that created it plus a local key."""

    owner: int | None
    kind: str
    parts: tuple = ()

    def relabel(self, simplex_map: dict[int, int]) -> "CellLabel":
        owner = simplex_map[self.owner] if self.owner is not None else None
        parts = tuple(p.relabel(simplex_map) if isinstance(p, CellLabel) else p for p in self.parts)
        return CellLabel(owner, self.kind, parts)

    def to_json(self):
        return [self.owner, self.kind, [p.to_json() if isinstance(p, CellLabel) else p for p in self.parts]]


BASE_LABEL = CellLabel(None, "base")


@dataclass(frozen=True, eq=False)
class KtResult:
    x: DeltaComplex
    kit_name: str
    T: CubeComplex
    tau: Involution
    labels: tuple[CellLabel, ...]
    order: tuple[int, ...]
    U: CubeComplex | None = None
    tau_u: Involution | None = None
    u_labels: tuple[CellLabel, ...] = ()
    i_map: CellularMap | None = None
    kit_dims: tuple[int, int] = (2, 3)

    @cached_property
    def owners(self) -> tuple[int | None, ...]:
        return tuple(label.owner for label in self.labels)

    @cached_property
    def label_index(self) -> dict[CellLabel, int]:
        return {label: cell for cell, label in enumerate(self.labels)}

    @property
    def dims(self) -> tuple[int, int | None]:
        return self.T.dimension, (self.U.dimension if self.U is not None else None)

    def cells_over(self, simplices: Iterable[int]) -> frozenset[int]:
        """Cells of T_W for the subcomplex W spanned by the given simplices."""
        members: set[int] = set()
        for s in simplices:
            members |= self.x.closure(s)
        return frozenset(cell for cell, owner in enumerate(self.owners) if owner in members)

    def u_cells_over(self, simplices: Iterable[int]) -> frozenset[int]:
        members: set[int] = set()
        for s in simplices:
            members |= self.x.closure(s)
        return frozenset(cell for cell, label in enumerate(self.u_labels) if label.owner is None or label.owner in members)

    def skeleton_cells(self, k: int) -> frozenset[int]:
        return self.cells_over(self.x.simplices(k) + tuple(s for s in range(len(self.x)) if self.x.dims[s] < k))

    def summary(self) -> dict:
        return {
            "kit": self.kit_name,
            "x_cells": list(self.x.cell_counts()),
            "t_cells": list(self.T.cell_counts()),
            "u_cells": list(self.U.cell_counts()) if self.U is not None else None,
            "dims": list(self.dims),
        }


def insertion_order(x: DeltaComplex) -> tuple[int, ...]:
    return tuple(sorted(range(len(x)), key=lambda s: (x.dims[s], s)))


class _KtBuilder:
    def __init__(self, kit: AcyclicKit, x: DeltaComplex, with_u: bool):
        self.kit = kit
        self.x = x
        self.with_u = with_u
        self.top = x.dimension
        self.t: CubeComplex = CubeComplex((), ())
        self.t_labels: list[CellLabel] = []
        self.tau_t: dict[int, Face] = {}
        self.u: CubeComplex = CubeComplex((0,), ((),))
        self.u_labels: list[CellLabel] = [BASE_LABEL]
        self.tau_u: dict[int, Face] = {0: (0, ())}
        self.i: dict[int, Face] = {}
        self.t_index: dict[CellLabel, int] = {}

    def needs_u(self, dim: int) -> bool:
        return self.with_u or dim < self.top

    def low_skeleton(self) -> None:
        x = self.x
        builder = CubeComplexBuilder()
        labels = []
        vertex_of = {}
        for v in x.simplices(0):
            vertex_of[v] = builder.add_vertex()
            labels.append(CellLabel(v, "v"))
        paths = []
        for e in x.simplices(1):
            v0, v1 = x.vertices_of(e)
            points = [vertex_of[v0]]
            for k in range(1, JOURNEY):
                points.append(builder.add_vertex())
                labels.append(CellLabel(e, "mid", (k,)))
            points.append(vertex_of[v1])
            segs = []
            for k in range(JOURNEY):
                segs.append(builder.add_edge(points[k], points[k + 1]))
                labels.append(CellLabel(e, "seg", (k,)))
            paths.append((e, points, segs))
        self.t = builder.build(validate=False)
        self.set_t_labels(labels)
        self.tau_t = {c: (c, sym_identity(d)) for c, d in enumerate(self.t.dims)}
        for v in vertex_of.values():
            self.i[v] = (0, ())

        if not paths or not self.needs_u(1):
            return
        kit = self.kit
        copies = [kit.aprime] * len(paths)
        union, offsets = disjoint_union(self.u, *(CubeComplex(c.dims, c.faces) for c in copies))
        pairs = [(off + kit.a0, 0, ()) for off in offsets[1:]]
        u_new, qmap = identify(union, pairs)
        labels_u = self._root_labels(
            qmap,
            len(u_new),
            lambda cell: BASE_LABEL if cell == 0 else self._copy_label(paths, offsets, cell),
        )
        tau_images = {0: (0, ())}
        for (e, _points, _segs), off in zip(paths, offsets[1:]):
            for a, (b, g) in kit.tau.images.items():
                tau_images[off + a] = (off + b, g)
        self.tau_u = induced_map(qmap, u_new, qmap, u_new, tau_images).images
        i_images = {}
        loop_vertices = kit.loop_vertices()
        for (e, points, segs), off in zip(paths, offsets[1:]):
            for k in range(1, JOURNEY):
                i_images[points[k]] = qmap[off + loop_vertices[k]]
            for k, seg in enumerate(segs):
                if not kit.j:
                    i_images[seg] = qmap[off + kit.a0]
                    continue
                edge, orient = kit.j[k]
                target, g = qmap[off + edge]
                i_images[seg] = (target, sym_compose(g, (orient,)))
        for v in vertex_of.values():
            i_images[v] = (0, ())
        self.u = u_new
        self.u_labels = labels_u
        self.i = i_images

    @staticmethod
    def _copy_label(paths, offsets, cell: int) -> CellLabel:
        for (e, _points, _segs), off, nxt in zip(paths, offsets[1:], offsets[2:] + (None,)):
            if cell >= off and (nxt is None or cell < nxt):
                return CellLabel(e, "A'", (cell - off,))
        raise ComplexError(f"Cell {cell} belongs to no kit copy.", code="unknown_cell")

    @staticmethod
    def _root_labels(qmap: Sequence[Face], size: int, label_of) -> list[CellLabel]:
        labels: list[CellLabel | None] = [None] * size
        for cell, (new, _g) in enumerate(qmap):
            if labels[new] is None:
                labels[new] = label_of(cell)
        return labels

    def add_simplex(self, sigma: int) -> None:
        x = self.x
        kit = self.kit
        boundary = x.boundary_closure(sigma)
        t_tau = Involution(self.t, self.t, self.tau_t)
        fixed_all = fixed_cells(self.t, t_tau)
        fixed = sorted(c for c in fixed_all if self.t_labels[c].owner in boundary)
        t_prime, tp_parent = extract(self.t, fixed)
        tp_index = {p: k for k, p in enumerate(tp_parent)}
        u_bd = [u for u, label in enumerate(self.u_labels) if label.owner is None or label.owner in boundary]
        u_prime, up_parent = extract(self.u, u_bd)
        up_index = {p: k for k, p in enumerate(up_parent)}

        bar = interval(JOURNEY)
        width = len(bar)
        prism = product(t_prime, bar)
        union, offs = disjoint_union(
            CubeComplex(self.t.dims, self.t.faces),
            CubeComplex(u_prime.dims, u_prime.faces),
            CubeComplex(prism.dims, prism.faces),
        )
        pairs = []
        for t, parent in enumerate(tp_parent):
            pairs.append((offs[2] + t * width, parent, sym_identity(t_prime.dims[t])))
            u, g = self.i[parent]
            pairs.append((offs[2] + t * width + JOURNEY, offs[1] + up_index[u], g))
        t_new, qmap = identify(union, pairs)
        if any(qmap[c][0] != c for c in range(len(self.t))):
            raise ComplexError("Gluing the cylinder merged cells of the previous stage.", code="inconsistent_gluing")

        def t_label(cell: int) -> CellLabel:
            if cell < offs[1]:
                return self.t_labels[cell]
            if cell < offs[2]:
                return CellLabel(sigma, "u", (self.u_labels[up_parent[cell - offs[1]]],))
            t, k = divmod(cell - offs[2], width)
            return CellLabel(sigma, "cyl", (self.t_labels[tp_parent[t]], k))

        labels = self._root_labels(qmap, len(t_new), t_label)
        tau_images: dict[int, Face] = dict(self.tau_t)
        for local, parent in enumerate(up_parent):
            u2, g = self.tau_u[parent]
            tau_images[offs[1] + local] = (offs[1] + up_index[u2], g)
        for cell in range(offs[2], len(union)):
            tau_images[cell] = (cell, sym_identity(union.dims[cell]))
        tau_new = induced_map(qmap, t_new, qmap, t_new, tau_images).images

        if self.needs_u(x.dims[sigma]):
            self._extend_u(sigma, t_prime, tp_parent, tp_index, up_parent, offs, width, union, qmap, t_new)
        self.t = t_new
        self.set_t_labels(labels)
        self.tau_t = tau_new
        LOGGER.debug("simplex %d (dim %d): T has %d cells", sigma, x.dims[sigma], len(t_new))

    def _extend_u(self, sigma, t_prime, tp_parent, tp_index, up_parent, offs, width, union, qmap, t_new) -> None:
        kit = self.kit
        a_complex, a_parent = kit.a_complex
        a_index = kit.a_index
        n_a = len(a_complex)
        x0 = self.x.vertices_of(sigma)[0]
        w0 = self.t_index_of(CellLabel(x0, "v"))
        if w0 not in tp_index:
            raise ComplexError("The initial vertex of a simplex is not fixed by tau.", code="not_fixed")
        w0_local = tp_index[w0]
        a0_local = a_index[kit.a0]
        slab = product(t_prime, a_complex)
        union_u, offs_u = disjoint_union(
            CubeComplex(self.u.dims, self.u.faces),
            CubeComplex(slab.dims, slab.faces),
            CubeComplex(kit.aprime.dims, kit.aprime.faces),
        )
        pairs = []
        for t, parent in enumerate(tp_parent):
            u, g = self.i[parent]
            pairs.append((offs_u[1] + t * n_a + a0_local, u, g))
        for a in range(n_a):
            pairs.append((offs_u[1] + w0_local * n_a + a, offs_u[2] + a_parent[a], sym_identity(a_complex.dims[a])))
        u_new, q_u = identify(union_u, pairs)

        def u_label(cell: int) -> CellLabel:
            if cell < offs_u[1]:
                return self.u_labels[cell]
            if cell < offs_u[2]:
                t, a = divmod(cell - offs_u[1], n_a)
                return CellLabel(sigma, "TA", (self.t_labels[tp_parent[t]], a_parent[a]))
            return CellLabel(sigma, "A'", (cell - offs_u[2],))

        u_labels = self._root_labels(q_u, len(u_new), u_label)
        tau_images: dict[int, Face] = dict(self.tau_u)
        for cell in range(offs_u[1], offs_u[2]):
            tau_images[cell] = (cell, sym_identity(union_u.dims[cell]))
        for a, (b, g) in kit.tau.images.items():
            tau_images[offs_u[2] + a] = (offs_u[2] + b, g)
        tau_u_new = induced_map(q_u, u_new, q_u, u_new, tau_images).images

        loop_vertices = [a_index[v] for v in kit.loop_vertices()]
        i_images: dict[int, Face] = dict(self.i)
        for local, parent in enumerate(up_parent):
            i_images[offs[1] + local] = (parent, sym_identity(union.dims[offs[1] + local]))
        for t in range(len(tp_parent)):
            d = t_prime.dims[t]
            base = offs_u[1] + t * n_a
            for k in range(JOURNEY + 1):
                i_images[offs[2] + t * width + k] = (base + loop_vertices[k % JOURNEY], sym_identity(d))
            for k in range(JOURNEY):
                cell = offs[2] + t * width + JOURNEY + 1 + k
                if not kit.j:
                    i_images[cell] = (base + a_index[kit.a0], sym_identity(d))
                    continue
                edge, orient = kit.j[k]
                i_images[cell] = (base + a_index[edge], sym_identity(d) + (orient * (d + 1),))
        self.i = induced_map(qmap, t_new, q_u, u_new, i_images).images
        self.u = u_new
        self.u_labels = u_labels
        self.tau_u = tau_u_new

    def set_t_labels(self, labels: list[CellLabel]) -> None:
        self.t_labels = labels
        self.t_index = {label: cell for cell, label in enumerate(labels)}

    def t_index_of(self, label: CellLabel) -> int:
        cell = self.t_index.get(label)
        if cell is None:
            raise ComplexError(f"No cell labelled {label}.", code="unknown_cell")
        return cell


def kt_build(kit: AcyclicKit, x: DeltaComplex, *, with_u: bool = False, verify: bool = False) -> KtResult:
    """Build T_X (and U_X when asked) inserting simplices by dimension, then id."""
    x.validate()
    if not category_c_check(x):
        raise ComplexError("The complex has a simplex with repeated edges.", code="not_in_category")
    builder = _KtBuilder(kit, x, with_u)
    order = insertion_order(x)
    builder.low_skeleton()
    for sigma in order:
        if x.dims[sigma] >= 2:
            builder.add_simplex(sigma)
    tau = Involution(builder.t, builder.t, builder.tau_t)
    u = tau_u = i_map = None
    u_labels: tuple[CellLabel, ...] = ()
    if with_u:
        u = builder.u
        tau_u = Involution(u, u, builder.tau_u)
        u_labels = tuple(builder.u_labels)
        i_map = CellularMap(builder.t, u, builder.i)
    if verify:
        check_involution(tau)
        if with_u:
            check_involution(tau_u)
            check_cellular_map(i_map)
    result = KtResult(
        x, kit.name, builder.t, tau, tuple(builder.t_labels), order, u, tau_u, u_labels, i_map, kit_dims=kit.dims
    )
    LOGGER.info("kt_build (%s kit): X %s -> T %s", kit.name, x.cell_counts(), builder.t.cell_counts())
    return result


def kt_fixed(r: KtResult) -> CubeComplex:
    return fixed_subcomplex(r.T, r.tau)[0]


def kt_quotient(r: KtResult) -> CubeComplex:
    return quotient_by_involution(r.T, r.tau)[0]


# ---------------------------------------------------------------------------
# Maps of Delta-complexes and their images
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DeltaMap:
    source: DeltaComplex
    target: DeltaComplex
    images: dict[int, int]

    def check(self) -> None:
        src, tgt = self.source, self.target
        if set(self.images) != set(range(len(src))):
            raise MapError("A Delta-map must be defined on every simplex.", code="not_total")
        for s, fs in self.images.items():
            if not 0 <= fs < len(tgt) or tgt.dims[fs] != src.dims[s]:
                raise MapError(f"Simplex {s} maps to a simplex of another dimension.", code="dimension", details={"simplex": s})
            for i, face in enumerate(src.faces[s]):
                if self.images[face] != tgt.faces[fs][i]:
                    raise MapError(f"Map does not commute with face {i} of simplex {s}.", code="not_simplicial", details={"simplex": s})
            verts = src.vertices_of(s)
            if len({self.images[v] for v in verts}) != len(set(verts)):
                raise MapError(f"Map is not injective on simplex {s}.", code="not_injective_on_simplex", details={"simplex": s})


def identity_delta_map(x: DeltaComplex) -> DeltaMap:
    return DeltaMap(x, x, {s: s for s in range(len(x))})


def compose_delta_maps(g: DeltaMap, f: DeltaMap) -> DeltaMap:
    return DeltaMap(f.source, g.target, {s: g.images[t] for s, t in f.images.items()})


def kt_map(f: DeltaMap, source: KtResult, target: KtResult) -> CellularMap:
    """T_f: match cells by relabelled provenance."""
    f.check()
    if source.x is not f.source or target.x is not f.target:
        raise MapError("Results were not built over the map's complexes.", code="mismatch")
    index = target.label_index
    images = {}
    for cell, label in enumerate(source.labels):
        image = label.relabel(f.images)
        hit = index.get(image)
        if hit is None:
            raise MapError(f"Cell {cell} has no counterpart in the target.", code="missing_cell", details={"cell": cell})
        images[cell] = (hit, sym_identity(source.T.dims[cell]))
    result = CellularMap(source.T, target.T, images)
    check_cellular_map(result)
    return result


# ---------------------------------------------------------------------------
# The telescope T'
# ---------------------------------------------------------------------------


def t_prime_build(kit: AcyclicKit, x: DeltaComplex, result: KtResult | None = None) -> CubeComplex:
    """Iterated mapping cylinder of T_{X^0} -> T_{X^1} -> ... -> T_{X^n}."""
    r = result if result is not None else kt_build(kit, x)
    stages = []
    for k in range(x.dimension + 1):
        cells = frozenset(c for c, owner in enumerate(r.owners) if x.dims[owner] <= k)
        stages.append(extract(r.T, cells))
    current, parents = stages[0]
    position = {p: k for k, p in enumerate(parents)}
    bar = interval(1)
    width = len(bar)
    for k in range(1, len(stages)):
        prev, prev_parents = stages[k - 1]
        nxt, nxt_parents = stages[k]
        nxt_index = {p: n for n, p in enumerate(nxt_parents)}
        prism = product(prev, bar)
        union, offs = disjoint_union(current, CubeComplex(prism.dims, prism.faces), nxt)
        pairs = []
        for c, p in enumerate(prev_parents):
            ident = sym_identity(prev.dims[c])
            pairs.append((offs[1] + c * width, position[p], ident))
            pairs.append((offs[1] + c * width + 1, offs[2] + nxt_index[p], ident))
        current, qmap = identify(union, pairs)
        position = {p: qmap[offs[2] + n][0] for n, p in enumerate(nxt_parents)}
    LOGGER.info("telescope over %d stages: %s", len(stages), current.cell_counts())
    return current


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiltrationReport:
    rows: tuple[dict, ...]
    homology_t: HomologyGroups
    homology_x: HomologyGroups
    extra: tuple[dict, ...] = ()

    @property
    def homology_match(self) -> bool:
        return self.homology_t.signature() == self.homology_x.signature()

    @property
    def passed(self) -> bool:
        return self.homology_match and all(row["ok"] for row in self.rows) and all(e["ok"] for e in self.extra)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "rows": list(self.rows),
            "homology_t": self.homology_t.to_dict(),
            "homology_x": self.homology_x.to_dict(),
            "homology_match": self.homology_match,
            "extra": list(self.extra),
        }


def _stage(r: KtResult, k: int) -> frozenset[int]:
    return frozenset(c for c, owner in enumerate(r.owners) if r.x.dims[owner] <= k)


def filtration_check(
    r: KtResult,
    *,
    fixed: bool = True,
    quotient: bool = True,
    subcomplexes: Iterable[Iterable[int]] = (),
    kit: AcyclicKit | None = None,
) -> FiltrationReport:
    """Relative homology of consecutive skeleta, then whole-space comparisons."""
    x = r.x
    rows = []
    for k in range(x.dimension + 1):
        upper = _stage(r, k)
        lower = _stage(r, k - 1) if k else frozenset()
        sub, parents = extract(r.T, upper)
        local = {p: n for n, p in enumerate(parents)}
        groups = relative_homology(sub, [local[c] for c in lower])
        expected = len(x.simplices(k))
        observed = {g.degree: g.betti for g in groups.groups if g.betti}
        torsion = [g.degree for g in groups.groups if g.torsion]
        ok = not torsion and observed == ({k: expected} if expected else {})
        rows.append({"k": k, "expected_rank": expected, "betti": groups.betti, "torsion_degrees": torsion, "ok": ok})
    h_t = complex_homology(r.T)
    h_x = complex_homology(x)
    extra = []
    if fixed:
        h_fixed = complex_homology(kt_fixed(r))
        extra.append({"check": "fixed_set", "ok": h_fixed.signature() == h_x.signature()})
    if quotient:
        h_quot = complex_homology(kt_quotient(r))
        extra.append({"check": "quotient", "ok": h_quot.signature() == h_x.signature()})
    if subcomplexes:
        if kit is None:
            raise KitError("Label checks against sub-builds need the kit.", code="missing_kit")
        for simplices in subcomplexes:
            extra.append(_label_check(r, kit, tuple(simplices)))
    report = FiltrationReport(tuple(rows), h_t, h_x, tuple(extra))
    LOGGER.info("filtration check: %s", "pass" if report.passed else "fail")
    return report


def _label_check(r: KtResult, kit: AcyclicKit, simplices: tuple[int, ...]) -> dict:
    """T_W built on its own has exactly the labels of the cells of T_X lying over W."""
    x = r.x
    members: set[int] = set()
    for s in simplices:
        members |= x.closure(s)
    order = sorted(members, key=lambda s: (x.dims[s], s))
    local = {s: n for n, s in enumerate(order)}
    faces = tuple(tuple(local[f] for f in x.faces[s]) for s in order)
    w = DeltaComplex(tuple(x.dims[s] for s in order), faces)
    sub = kt_build(kit, w)
    back = {n: s for s, n in local.items()}
    built = {label.relabel(back) for label in sub.labels}
    cells = r.cells_over(simplices)
    over = {r.labels[c] for c in cells}
    return {
        "check": "preimage",
        "simplices": list(simplices),
        "ok": built == over and r.T.is_subcomplex(cells),
    }


def dimension_law(r: KtResult, *, fixed: bool = False) -> dict:
    """dim T = dim X and dim U = dim X + 1, except where the kit's own cells dominate.

    A 3-dimensional A' over a 2-dimensional A gives dim T = 3 for dim X = 2 and
    dim U = 3 for dim X = 1. When A is a point the constant loop collapses every
    slab T' x A onto U, so U stays as small as A' and dim T = dim X throughout.
    """
    dim_x = r.x.dimension
    dim_a, dim_aprime = r.kit_dims
    expected_t = max(2, dim_aprime) if dim_x == 2 else dim_x
    out = {"dim_x": dim_x, "dim_t": r.T.dimension, "expected_t": expected_t}
    ok = r.T.dimension == expected_t
    if r.U is not None:
        if dim_x <= 0:
            expected_u = 0
        elif dim_x == 1 or dim_a == 0:
            expected_u = dim_aprime
        else:
            expected_u = max(dim_aprime, dim_x - 1 + dim_a)
        out.update(dim_u=r.U.dimension, expected_u=expected_u)
        ok = ok and r.U.dimension == expected_u
    if fixed:
        dim_fixed = kt_fixed(r).dimension
        out.update(dim_fixed=dim_fixed)
        ok = ok and dim_fixed == dim_x
    out["ok"] = ok
    return out


def convexity_check(r: KtResult, subcomplexes: Iterable[Iterable[int]]) -> list[dict]:
    out = []
    for simplices in subcomplexes:
        simplices = tuple(simplices)
        cells = r.cells_over(simplices)
        out.append({"simplices": list(simplices), "convex": bool(cells) and is_combinatorially_convex(r.T, cells)})
    return out


def locally_cat0(r: KtResult) -> dict:
    report = gromov_check(r.T, stop_early=True)
    payload = {"t": report.to_dict()}
    if r.U is not None:
        payload["u"] = gromov_check(r.U, stop_early=True).to_dict()
    return payload
