from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product as cartesian
from typing import Iterable

import networkx as nx

from ..errors import ComplexError
from .cube import CubeComplex, corner_codes, face_slot, sym_compose
from .simplicial import SimplicialComplex, is_flag


LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimplexComplex:
    """Link-like complex: simplices may repeat vertices or share vertex sets.

    ``vertices`` holds link-vertex labels (edge id, end sign); ``simplices[k]`` lists vertex
    positions; ``carriers[k]`` is the (cube, corner) the simplex comes from.
    """

    vertices: tuple
    simplices: tuple[tuple[int, ...], ...]
    faces: tuple[tuple[int, ...], ...]
    carriers: tuple[tuple[int, tuple[int, ...]], ...]

    @property
    def dimension(self) -> int:
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def problems(self) -> list[dict]:
        out = []
        seen: dict[frozenset, int] = {}
        for idx, verts in enumerate(self.simplices):
            if len(set(verts)) != len(verts):
                out.append({"reason": "repeated_vertex", "simplex": idx, "carrier": list(self.carriers[idx][:1])})
                continue
            key = frozenset(verts)
            if key in seen:
                out.append({"reason": "shared_vertex_set", "simplex": idx, "other": seen[key]})
            else:
                seen[key] = idx
        return out

    @property
    def is_simplicial(self) -> bool:
        return not self.problems()

    def to_simplicial(self) -> SimplicialComplex:
        if not self.is_simplicial:
            raise ComplexError("Link is not a simplicial complex.", code="not_simplicial", details={"problems": self.problems()})
        return SimplicialComplex.from_facets(
            [[self.vertices[i] for i in verts] for verts in self.simplices],
            vertices=self.vertices,
        )

    def graph(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        for verts in self.simplices:
            if len(verts) == 2:
                graph.add_edge(self.vertices[verts[0]], self.vertices[verts[1]])
        return graph


def _incidence(c: CubeComplex) -> dict[int, list[tuple[int, tuple[int, ...]]]]:
    cached = c._cache.get("incidence")
    if cached is None:
        cached = {v: [] for v in c.vertices()}
        collapsed = c.collapsed_cells()
        for cube, d in enumerate(c.dims):
            # collapsed cells are cones, not cubes, and add no link simplices
            if d == 0 or cube in collapsed:
                continue
            for corner, vertex in zip(corner_codes(d), c.corners(cube)):
                cached[vertex].append((cube, corner))
        c._cache["incidence"] = cached
    return cached


def vertex_link(c: CubeComplex, v: int) -> SimplexComplex:
    if not 0 <= v < len(c) or c.dims[v] != 0:
        raise ComplexError(f"Unknown vertex {v}.", code="unknown_vertex", details={"vertex": v})
    entries = sorted(_incidence(c)[v], key=lambda item: (c.dims[item[0]], item[0], item[1]))
    position = {entry: idx for idx, entry in enumerate(entries)}
    vertex_labels: list = []
    vertex_index: dict = {}
    simplices = []
    faces = []
    for cube, corner in entries:
        d = c.dims[cube]
        verts = []
        for i in range(1, d + 1):
            code = corner[: i - 1] + (0,) + corner[i:]
            edge, g = c.face_of(cube, code)
            end = corner[i - 1] if g[0] > 0 else -corner[i - 1]
            label = (edge, end)
            if label not in vertex_index:
                vertex_index[label] = len(vertex_labels)
                vertex_labels.append(label)
            verts.append(vertex_index[label])
        simplices.append(tuple(verts))
        if d >= 2:
            sub = []
            for i in range(1, d + 1):
                target, s = c.faces[cube][face_slot(i, corner[i - 1])]
                moved = sym_compose(s, corner[: i - 1] + corner[i:])
                sub.append(position[(target, moved)])
            faces.append(tuple(sub))
        else:
            faces.append(())
    return SimplexComplex(tuple(vertex_labels), tuple(simplices), tuple(faces), tuple(entries))


@dataclass(frozen=True)
class GromovReport:
    passed: bool
    vertices_checked: int
    failures: tuple[dict, ...]

    def to_dict(self) -> dict:
        return {"passed": self.passed, "vertices_checked": self.vertices_checked, "failures": list(self.failures)}


def gromov_check(c: CubeComplex, *, stop_early: bool = False) -> GromovReport:
    """Every vertex link must be a flag simplicial complex."""
    failures = []
    checked = 0
    for v in c.vertices():
        checked += 1
        link = vertex_link(c, v)
        problems = link.problems()
        if problems:
            failures.append({"vertex": v, "reason": "not_simplicial", "witness": problems[0]})
        else:
            flag = is_flag(link.to_simplicial())
            if not flag.flag:
                failures.append({"vertex": v, "reason": "not_flag", "witness": [list(x) for x in flag.witness]})
        if failures and stop_early:
            break
    report = GromovReport(not failures, checked, tuple(failures))
    LOGGER.info("gromov check: %d vertices, %d failures", checked, len(failures))
    return report


@dataclass(frozen=True)
class CubicalityReport:
    cubes_embed: bool
    intersections_are_faces: bool
    links_simplicial: bool

    @property
    def cubical(self) -> bool:
        return self.cubes_embed and self.intersections_are_faces and self.links_simplicial

    def to_dict(self) -> dict:
        return {
            "cubes_embed": self.cubes_embed,
            "intersections_are_faces": self.intersections_are_faces,
            "links_simplicial": self.links_simplicial,
        }


def _cube_embeds(c: CubeComplex, cube: int) -> bool:
    d = c.dims[cube]
    seen = set()
    for code in cartesian((-1, 0, 1), repeat=d):
        target, _s = c.face_of(cube, code)
        if target in seen:
            return False
        seen.add(target)
    return True


def _intersections_are_faces(c: CubeComplex) -> bool:
    closures = {}
    for cell, d in enumerate(c.dims):
        if d:
            closures[cell] = c.closure((cell,))
    incidence = _incidence(c)
    for v in c.vertices():
        cubes = sorted({cube for cube, _corner in incidence[v]})
        for i, a in enumerate(cubes):
            for b in cubes[i + 1 :]:
                common = closures[a] & closures[b]
                top = max(common, key=lambda x: (c.dims[x], -x))
                if closures.get(top, frozenset((top,))) != common:
                    return False
    return True


def cubicality_check(c: CubeComplex) -> CubicalityReport:
    embed = all(_cube_embeds(c, cube) for cube, d in enumerate(c.dims) if d)
    meets = _intersections_are_faces(c)
    simplicial = all(vertex_link(c, v).is_simplicial for v in c.vertices())
    return CubicalityReport(embed, meets, simplicial)


def is_combinatorially_convex(c: CubeComplex, cells: Iterable[int]) -> bool:
    """Connected subcomplex whose vertex links are full in the ambient links."""
    members = frozenset(cells)
    if not c.is_subcomplex(members):
        raise ComplexError("Not a subcomplex.", code="not_subcomplex")
    verts = [x for x in members if c.dims[x] == 0]
    if not verts:
        return False
    graph = nx.Graph()
    graph.add_nodes_from(verts)
    for x in members:
        if c.dims[x] == 1:
            a, b = c.edge_endpoints(x)
            graph.add_edge(a, b)
    if not nx.is_connected(graph):
        return False
    for v in verts:
        link = vertex_link(c, v)
        inside = {i for i, (cube, _corner) in enumerate(link.carriers) if cube in members}
        link_verts = {link.simplices[i][0] for i in inside if len(link.simplices[i]) == 1}
        for idx, simplex in enumerate(link.simplices):
            if idx not in inside and set(simplex) <= link_verts:
                return False
    return True
