"""Small named complexes used as fixtures and by the corpus."""

from __future__ import annotations

from itertools import combinations

from ..errors import ComplexError
from .cube import CubeComplex, CubeComplexBuilder, interval, standard_cube, sym_compose
from .maps import CellularMap, Involution, propagate_map
from .simplicial import DeltaComplex, SimplicialComplex


def one_square_torus() -> CubeComplex:
    builder = CubeComplexBuilder()
    v = builder.add_vertex("v")
    a = builder.add_edge(v, v, "a")
    b = builder.add_edge(v, v, "b")
    builder.add_square((b, (1,)), (b, (1,)), (a, (1,)), (a, (1,)), "square")
    return builder.build()


def one_square_sphere() -> CubeComplex:
    """Adjacent sides folded together; three vertices."""
    builder = CubeComplexBuilder()
    p = builder.add_vertex("p")
    x = builder.add_vertex("x")
    q = builder.add_vertex("q")
    a = builder.add_edge(p, x, "a")
    b = builder.add_edge(x, q, "b")
    builder.add_square((a, (1,)), (b, (1,)), (a, (1,)), (b, (1,)), "square")
    return builder.build()


def one_square_mobius() -> CubeComplex:
    builder = CubeComplexBuilder()
    p = builder.add_vertex("p")
    q = builder.add_vertex("q")
    bottom = builder.add_edge(p, q, "bottom")
    top = builder.add_edge(q, p, "top")
    side = builder.add_edge(p, q, "side")
    builder.add_square((side, (1,)), (side, (-1,)), (bottom, (1,)), (top, (1,)), "square")
    return builder.build()


def cycle(length: int) -> CubeComplex:
    """Closed loop of ``length`` unit edges."""
    if length < 1:
        raise ComplexError("A cycle needs at least one edge.", code="out_of_range")
    builder = CubeComplexBuilder()
    verts = [builder.add_vertex(("v", k)) for k in range(length)]
    for k in range(length):
        builder.add_edge(verts[k], verts[(k + 1) % length], ("e", k))
    return builder.build()


def path(length: int) -> CubeComplex:
    return interval(length)


def tree(branching: int, depth: int) -> CubeComplex:
    """Rooted tree with every internal vertex having ``branching`` children."""
    builder = CubeComplexBuilder()
    root = builder.add_vertex(())
    layer = [(root, ())]
    for _ in range(depth):
        nxt = []
        for parent, label in layer:
            for child in range(branching):
                child_label = label + (child,)
                v = builder.add_vertex(child_label)
                builder.add_edge(parent, v, ("e",) + child_label)
                nxt.append((v, child_label))
        layer = nxt
    return builder.build()


def cube_symmetry(n: int, sym) -> Involution | CellularMap:
    """Automorphism of the standard n-cube induced by a signed permutation."""
    cube = standard_cube(n)
    top = len(cube) - 1
    images = propagate_map(cube, cube, {top: (top, tuple(sym))}).images
    twice = sym_compose(tuple(sym), tuple(sym))
    if all(v == i for i, v in enumerate(twice, start=1)):
        return Involution(cube, cube, images)
    return CellularMap(cube, cube, images)


def square_rotation() -> Involution:
    """Half-turn of a single square."""
    return cube_symmetry(2, (-1, -2))


def edge_swap() -> Involution:
    edge = interval(1)
    return Involution(edge, edge, {0: (1, ()), 1: (0, ()), 2: (2, (-1,))})


def delta_simplex(n: int) -> DeltaComplex:
    return SimplicialComplex.from_facets([range(n + 1)]).to_delta()


def delta_boundary(n: int) -> DeltaComplex:
    if n < 1:
        raise ComplexError("The boundary of a simplex needs n >= 1.", code="out_of_range")
    return SimplicialComplex.from_facets(combinations(range(n + 1), n)).to_delta()


def two_triangle_torus() -> DeltaComplex:
    dims = (0, 1, 1, 1, 2, 2)
    faces = ((), (0, 0), (0, 0), (0, 0), (2, 3, 1), (1, 3, 2))
    names = ("v", "a", "b", "c", "upper", "lower")
    return DeltaComplex(dims, faces, names)


def dunce_hat() -> DeltaComplex:
    """One vertex, one edge, one triangle whose three edges are that edge."""
    return DeltaComplex((0, 1, 2), ((), (0, 0), (1, 1, 1)), ("v", "a", "t"))
