"""Square 2-complexes from presentations: a rose of petals with tessellated polygon cells."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .complexes.cube import CubeComplex, CubeComplexBuilder, disjoint_union, identify, sym_compose, sym_identity
from .complexes.links import SimplexComplex, vertex_link
from .complexes.maps import CellularMap, Involution, check_cellular_map, check_involution, induced_map
from .complexes.simplicial import SimplicialComplex
from .errors import PresentationError
from .homology import HomologyGroups, presentation_h1_h2
from .polygons import (
    TessellatedPolygon,
    collar_all_iter,
    four_saddle_octagon,
    is_cat0_polygon,
    regular_right_pentagon,
    rotate,
    single_vertex_polygon,
    subdivide_polygon,
)
from .words import (
    Presentation,
    Word,
    coset_enumeration,
    invert,
    is_cyclically_reduced,
    meeting_points,
    meeting_points_distinct,
    parse_word,
    power,
)


LOGGER = logging.getLogger(__name__)

DEFAULT_PETAL_LENGTH = 4

__all__ = [
    "PresentationComplex",
    "PresentationComplexSpec",
    "acycone_complex",
    "acycone_presentation",
    "acyctwo_complex",
    "acyctwo_octagon",
    "acyctwo_presentation",
    "fewquot_certificate",
    "fewquot_complex",
    "fewquot_presentation",
    "lift_symmetry",
    "link_graph_yn",
    "meeting_points",
    "meeting_points_distinct",
    "presentation_complex",
    "y_n",
    "y_n_presentation",
]


@dataclass(frozen=True)
class PresentationComplexSpec:
    presentation: Presentation
    polygons: tuple[TessellatedPolygon, ...]
    petal_length: int = DEFAULT_PETAL_LENGTH
    a_letters: tuple[int, ...] = ()

    def validate(self) -> None:
        p = self.presentation
        length = self.petal_length
        if length < 2 or length % 2:
            raise PresentationError(f"Petal length must be even and at least 2, got {length}.", code="bad_petal_length")
        if len(self.polygons) != len(p.relators):
            raise PresentationError("One polygon per relator is required.", code="bad_polygons")
        for j, (word, poly) in enumerate(zip(p.relators, self.polygons)):
            if not is_cyclically_reduced(word):
                raise PresentationError(f"Relator {j} is not cyclically reduced.", code="not_reduced", details={"relator": j})
            expected = tuple(length * s for s in p.side_lengths(j))
            if poly.side_lengths != expected:
                raise PresentationError(
                    f"Polygon of relator {j} has sides {poly.side_lengths}, expected {expected}.",
                    code="side_length_mismatch",
                    details={"relator": j, "sides": list(poly.side_lengths), "expected": list(expected)},
                )
            cat0, positive = is_cat0_polygon(poly)
            if not cat0:
                raise PresentationError(
                    f"Polygon of relator {j} is not CAT(0).",
                    code="polygon_not_cat0",
                    details={"relator": j, "positive_vertices": list(positive)},
                )


@dataclass(frozen=True)
class PresentationComplex:
    spec: PresentationComplexSpec
    complex: CubeComplex
    center: int
    petals: dict[int, tuple[int, ...]]
    cells: tuple[tuple[int, ...], ...]
    symmetry: CellularMap | None = None
    quotient_map: tuple = field(default=(), repr=False, compare=False)
    offsets: tuple[int, ...] = field(default=(), repr=False, compare=False)

    @property
    def presentation(self) -> Presentation:
        return self.spec.presentation

    def center_link(self) -> SimplexComplex:
        return vertex_link(self.complex, self.center)

    def rose_cells(self, generators=None) -> frozenset[int]:
        gens = generators if generators is not None else self.petals.keys()
        edges = [e for g in gens for e in self.petals[g]]
        return self.complex.closure(edges)

    def involution(self) -> Involution:
        if not isinstance(self.symmetry, Involution):
            raise PresentationError("This complex carries no involution.", code="no_involution")
        return self.symmetry


def _build_rose(p: Presentation, length: int) -> tuple[CubeComplex, dict[int, tuple[int, ...]], dict[int, tuple[int, ...]]]:
    builder = CubeComplexBuilder()
    center = builder.add_vertex("o")
    edges: dict[int, tuple[int, ...]] = {}
    inner: dict[int, tuple[int, ...]] = {}
    for g in range(1, p.generators + 1):
        name = p.name(g)
        verts = [center] + [builder.add_vertex(("petal", name, m)) for m in range(1, length)] + [center]
        edges[g] = tuple(builder.add_edge(verts[m], verts[m + 1], ("petal", name, m)) for m in range(length))
        inner[g] = tuple(verts[1:-1])
    return builder.build(), edges, inner


def presentation_complex(spec: PresentationComplexSpec, symmetry=None) -> PresentationComplex:
    """Glue each relator polygon to the rose along its boundary word.

    ``symmetry`` is a signed generator permutation; it defaults to the presentation's own.
    """
    spec.validate()
    p = spec.presentation
    length = spec.petal_length
    if length == 2:
        LOGGER.warning("petal length 2: only the universal cover is CAT(0)")
    rose, petal_edges, _inner = _build_rose(p, length)
    pieces = [rose]
    for j, poly in enumerate(spec.polygons):
        names = tuple(("relator", j, cell) for cell in range(len(poly.carrier)))
        pieces.append(CubeComplex(poly.carrier.dims, poly.carrier.faces, names))
    union, offsets = disjoint_union(*pieces)
    pairs = []
    for j, poly in enumerate(spec.polygons):
        word = p.relators[j]
        base = offsets[j + 1]
        for q, (edge, orient) in enumerate(poly.boundary):
            letter = word[q // length]
            m = q % length
            if letter > 0:
                pairs.append((base + edge, petal_edges[letter][m], (orient,)))
            else:
                pairs.append((base + edge, petal_edges[-letter][length - 1 - m], (-orient,)))
    glued, qmap = identify(union, pairs)
    cells = tuple(
        tuple(sorted({qmap[offsets[j + 1] + sq][0] for sq in poly.carrier.cells_of_dim(2)}))
        for j, poly in enumerate(spec.polygons)
    )
    petals = {g: tuple(qmap[e][0] for e in edges) for g, edges in petal_edges.items()}
    result = PresentationComplex(spec, glued, qmap[0][0], petals, cells, None, qmap, offsets)
    LOGGER.info(
        "presentation complex: %d generators, %d relators, cells %s",
        p.generators,
        len(p.relators),
        glued.cell_counts(),
    )
    perm = symmetry if symmetry is not None else p.generator_permutation
    if perm is not None:
        result = PresentationComplex(spec, glued, result.center, petals, cells, lift_symmetry(result, perm), qmap, offsets)
    return result


def lift_symmetry(pc: PresentationComplex, perm) -> CellularMap:
    """Cellular automorphism induced by a generator permutation that permutes relators without shifts."""
    p = pc.presentation
    perm = tuple(perm)
    length = pc.spec.petal_length
    action = p.relator_action(perm)
    rose, petal_edges, inner = _build_rose(p, length)
    images: dict[int, tuple[int, tuple[int, ...]]] = {0: (0, ())}
    for g in range(1, p.generators + 1):
        t = perm[g - 1]
        tg = abs(t)
        for m in range(1, length):
            src = inner[g][m - 1]
            images[src] = (inner[tg][m - 1] if t > 0 else inner[tg][length - m - 1], ())
        for m in range(length):
            if t > 0:
                images[petal_edges[g][m]] = (petal_edges[tg][m], (1,))
            else:
                images[petal_edges[g][m]] = (petal_edges[tg][length - 1 - m], (-1,))
    polys = pc.spec.polygons
    for j, (k, shift) in enumerate(action):
        same = polys[j] is polys[k] or (
            polys[j].carrier.dims == polys[k].carrier.dims
            and polys[j].carrier.faces == polys[k].carrier.faces
            and polys[j].boundary == polys[k].boundary
        )
        if shift or not same:
            raise PresentationError(
                f"Relator {j} maps to relator {k} with shift {shift}; only shift-free maps between equal polygons lift.",
                code="unsupported_symmetry",
                details={"relator": j, "image": k, "shift": shift},
            )
        carrier = polys[j].carrier
        for cell in range(len(carrier)):
            images[pc.offsets[j + 1] + cell] = (pc.offsets[k + 1] + cell, sym_identity(carrier.dims[cell]))
    lifted = induced_map(pc.quotient_map, pc.complex, pc.quotient_map, pc.complex, images)
    check_cellular_map(lifted)
    if all(abs(v) == i and v > 0 for i, v in enumerate(_square(perm), start=1)):
        tau = Involution(lifted.source, lifted.target, lifted.images)
        check_involution(tau)
        return tau
    return lifted


def _square(perm: tuple[int, ...]) -> tuple[int, ...]:
    return sym_compose(perm, perm)


def _letter_names(n: int, prefix: str) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(1, n + 1))


def y_n_presentation(n: int) -> Presentation:
    if n < 5:
        raise PresentationError(f"Y(n) needs n >= 5, got {n}.", code="out_of_range")

    def a(i: int) -> int:
        return (i - 1) % n + 1

    relators = tuple((a(i), a(i + 1), -a(i + 3), -a(i + 1), a(i + 3)) for i in range(1, n + 1))
    sides = tuple((1, 1, 1, 1, 1) for _ in range(n))
    rotation = tuple(a(i + 1) for i in range(1, n + 1))
    return Presentation(n, relators, _letter_names(n, "a"), sides, rotation)


def y_n(n: int, petal_length: int = DEFAULT_PETAL_LENGTH) -> PresentationComplex:
    """n regular right-angled pentagons on an n-petalled rose; the Z/n rotation is attached."""
    if petal_length < 2 or petal_length % 2:
        raise PresentationError(f"Petal length must be even and at least 2, got {petal_length}.", code="bad_petal_length")
    p = y_n_presentation(n)
    pentagon = regular_right_pentagon(petal_length // 2)
    spec = PresentationComplexSpec(p, (pentagon,) * n, petal_length)
    return presentation_complex(spec)


def link_graph_yn(n: int) -> SimplicialComplex:
    """Central vertex link of Y(n) from its adjacency lists; vertices are (i, "i") and (i, "o")."""
    if n < 5:
        raise PresentationError(f"Y(n) needs n >= 5, got {n}.", code="out_of_range")

    def idx(i: int) -> int:
        return (i - 1) % n + 1

    edges = set()
    for i in range(1, n + 1):
        inward = (idx(i), "i")
        for j, end in ((i + 1, "o"), (i + 2, "i"), (i - 2, "i"), (i + 2, "o"), (i - 3, "o")):
            edges.add(frozenset((inward, (idx(j), end))))
        outward = (idx(i), "o")
        for j, end in ((i + 3, "i"), (i - 1, "i"), (i - 2, "i"), (i + 2, "o"), (i - 2, "o")):
            edges.add(frozenset((outward, (idx(j), end))))
    verts = [(i, end) for i in range(1, n + 1) for end in ("i", "o")]
    return SimplicialComplex.from_facets(edges, vertices=verts)


ACYCONE_RELATORS = (
    "abcdef",
    "ab^-1c^2f^-1e^2d^-1",
    "a^2fc^2bed",
    "ad^-2cb^-2ef^-1",
    "ad^2cf^2eb^2",
    "af^-2cd^-1eb^-2",
)


def acycone_presentation() -> Presentation:
    names = tuple("abcdef")
    relators = tuple(parse_word(text, names) for text in ACYCONE_RELATORS)
    return Presentation(6, relators, names)


def _polygons_by_sides(p: Presentation, petal_length: int) -> tuple[TessellatedPolygon, ...]:
    built: dict[tuple[int, ...], TessellatedPolygon] = {}
    out = []
    for j in range(len(p.relators)):
        sides = tuple(petal_length * s for s in p.side_lengths(j))
        if sides not in built:
            built[sides] = single_vertex_polygon(sides)
        out.append(built[sides])
    return tuple(out)


def acycone_complex(petal_length: int = DEFAULT_PETAL_LENGTH) -> PresentationComplex:
    p = acycone_presentation()
    spec = PresentationComplexSpec(p, _polygons_by_sides(p, petal_length), petal_length, a_letters=(1, 3, 5))
    return presentation_complex(spec)


def _acyctwo_block(letter: int, partner: int) -> Word:
    return (letter, partner, -letter, -letter, -partner, letter)


def acyctwo_presentation() -> Presentation:
    n = 4

    def a(i: int) -> int:
        return (i - 1) % n + 1

    def b(i: int) -> int:
        return n + a(i)

    def big_a(i: int) -> Word:
        return _acyctwo_block(a(i), a(i + 2))

    def big_b(i: int) -> Word:
        return _acyctwo_block(b(i), b(i + 2))

    relators = []
    sides = []
    for i in range(1, n + 1):
        word = (a(i),) + big_a(i)
        for step in range(1, n):
            word += big_b(i) + big_a(i + step)
        word += big_b(i)
        relators.append(word)
        sides.append((7,) + (6,) * 7)
    for i in range(1, n + 1):
        word = (b(i),) + big_b(i)
        for step in range(n):
            word += invert(big_a(i + step))
            if step < n - 1:
                word += big_b(i)
        relators.append(word)
        sides.append((7,) + (6,) * 7)
    tau = tuple(a(i + 2) for i in range(1, n + 1)) + tuple(b(i + 2) for i in range(1, n + 1))
    names = _letter_names(n, "a") + _letter_names(n, "b")
    return Presentation(2 * n, tuple(relators), names, tuple(sides), tau)


def acyctwo_rotation() -> tuple[int, ...]:
    """Generator action of 1 in Z/4: a_i -> a_{i+1}, b_i -> b_{i+1}."""
    return (2, 3, 4, 1, 6, 7, 8, 5)


def acyctwo_octagon() -> TessellatedPolygon:
    """Sides (28, 24 x 7): the five-times collared four-saddle octagon, subdivided, long side first."""
    return rotate(subdivide_polygon(collar_all_iter(four_saddle_octagon(), 5)), 7)


def acyctwo_complex() -> tuple[PresentationComplex, Involution, CellularMap]:
    p = acyctwo_presentation()
    octagon = acyctwo_octagon()
    spec = PresentationComplexSpec(p, (octagon,) * len(p.relators), DEFAULT_PETAL_LENGTH, a_letters=(1, 2, 3, 4))
    pc = presentation_complex(spec)
    rotation = lift_symmetry(pc, acyctwo_rotation())
    return pc, pc.involution(), rotation


def fewquot_presentation(big_n: int) -> Presentation:
    if big_n < 1:
        raise PresentationError(f"N must be at least 1, got {big_n}.", code="out_of_range")
    n = 3

    def a(i: int) -> int:
        return (i - 1) % n + 1

    def b(i: int) -> int:
        return n + a(i)

    def block(x: int, y: int) -> Word:
        return power(x, big_n) + power(y, -2 * big_n) + power(x, big_n)

    def big_a(i: int) -> Word:
        return block(a(i), a(i + 1))

    def big_b(i: int) -> Word:
        return block(b(i), b(i + 1))

    relators = []
    sides = []
    side = 4 * big_n
    for i in range(1, n + 1):
        relators.append((a(i),) + big_a(i) + big_b(1) + big_a(i + 1) + big_b(2) + big_a(i + 2) + big_b(3))
        sides.append((side + 1,) + (side,) * 5)
    for i in range(1, n + 1):
        relators.append(
            (b(i),)
            + big_b(i)
            + invert(big_a(1))
            + big_b(i + 1)
            + invert(big_a(2))
            + big_b(i + 2)
            + invert(big_a(3))
        )
        sides.append((side + 1,) + (side,) * 5)
    names = _letter_names(n, "a") + _letter_names(n, "b")
    return Presentation(2 * n, tuple(relators), names, tuple(sides))


def fewquot_complex(big_n: int, petal_length: int = DEFAULT_PETAL_LENGTH) -> PresentationComplex:
    p = fewquot_presentation(big_n)
    spec = PresentationComplexSpec(p, _polygons_by_sides(p, petal_length), petal_length, a_letters=(1, 2, 3))
    return presentation_complex(spec)


@dataclass(frozen=True)
class QuotientCertificate:
    """Evidence that adding x^N = 1 for every generator kills the group."""

    big_n: int
    h1: HomologyGroups
    cosets: int | None
    max_cosets: int

    @property
    def h1_trivial(self) -> bool:
        return self.h1[1].trivial

    @property
    def trivial(self) -> bool | None:
        if self.cosets is None:
            return None
        return self.cosets == 1

    def to_dict(self) -> dict:
        return {
            "N": self.big_n,
            "h1_trivial": self.h1_trivial,
            "cosets": self.cosets,
            "max_cosets": self.max_cosets,
            "trivial": self.trivial,
        }


def fewquot_certificate(big_n: int, max_cosets: int = 10_000) -> QuotientCertificate:
    p = fewquot_presentation(big_n)
    extra = tuple(power(g, big_n) for g in range(1, p.generators + 1))
    enlarged = Presentation(p.generators, p.relators + extra, p.names)
    h1 = presentation_h1_h2(enlarged)
    cosets = coset_enumeration(enlarged, max_cosets=max_cosets)
    LOGGER.info("fewquot N=%d: H_1 %s, cosets %s", big_n, h1[1], cosets)
    return QuotientCertificate(big_n, h1, cosets, max_cosets)
