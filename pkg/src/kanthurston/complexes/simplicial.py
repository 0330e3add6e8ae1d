from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Iterable

import networkx as nx

from ..errors import ComplexError


LOGGER = logging.getLogger(__name__)


def _key(value) -> str:
    return repr(value)


@dataclass(frozen=True)
class SimplicialComplex:
    vertices: tuple
    faces: frozenset

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[Hashable]], vertices: Iterable[Hashable] = ()) -> "SimplicialComplex":
        closed: set[frozenset] = set()
        for facet in facets:
            members = frozenset(facet)
            if not members:
                continue
            items = sorted(members, key=_key)
            for size in range(1, len(items) + 1):
                for sub in combinations(items, size):
                    closed.add(frozenset(sub))
        verts = set(vertices)
        for face in closed:
            verts.update(face)
        for v in verts:
            closed.add(frozenset((v,)))
        return cls(tuple(sorted(verts, key=_key)), frozenset(closed))

    @property
    def dimension(self) -> int:
        return max((len(f) - 1 for f in self.faces), default=-1)

    def simplices(self, k: int) -> list[tuple]:
        out = [tuple(sorted(f, key=_key)) for f in self.faces if len(f) == k + 1]
        return sorted(out, key=lambda t: tuple(_key(v) for v in t))

    def facets(self) -> list[frozenset]:
        faces = self.faces
        out = []
        for f in faces:
            if not any(f < g for g in faces if len(g) == len(f) + 1):
                out.append(f)
        return sorted(out, key=lambda f: (len(f), sorted(_key(v) for v in f)))

    def one_skeleton(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(tuple(f) for f in self.faces if len(f) == 2)
        return graph

    def validate(self) -> None:
        verts = set(self.vertices)
        for f in self.faces:
            if not f:
                raise ComplexError("Empty simplex.", code="malformed")
            if not f <= verts:
                raise ComplexError("Simplex uses an unknown vertex.", code="unknown_cell")
            for v in f:
                if len(f) > 1 and f - {v} not in self.faces:
                    raise ComplexError("Face family is not downward closed.", code="not_closed")
        for v in verts:
            if frozenset((v,)) not in self.faces:
                raise ComplexError(f"Vertex {v!r} has no singleton face.", code="not_closed")

    def to_delta(self) -> "DeltaComplex":
        order = {v: i for i, v in enumerate(self.vertices)}
        simplices = sorted(
            (tuple(sorted(f, key=lambda v: order[v])) for f in self.faces),
            key=lambda t: (len(t), [order[v] for v in t]),
        )
        index = {s: i for i, s in enumerate(simplices)}
        faces = []
        for s in simplices:
            if len(s) == 1:
                faces.append(())
            else:
                faces.append(tuple(index[s[:i] + s[i + 1 :]] for i in range(len(s))))
        return DeltaComplex(tuple(len(s) - 1 for s in simplices), tuple(faces), tuple(simplices))


@dataclass(frozen=True)
class FlagReport:
    flag: bool
    witness: tuple | None = None


def is_flag(s: SimplicialComplex) -> FlagReport:
    """Every clique of the 1-skeleton must span a simplex; the witness is a smallest missing clique."""
    graph = s.one_skeleton()
    for clique in nx.enumerate_all_cliques(graph):
        if len(clique) < 3:
            continue
        if frozenset(clique) not in s.faces:
            return FlagReport(False, tuple(sorted(clique, key=_key)))
    return FlagReport(True, None)


def is_full_subcomplex(sub: SimplicialComplex, whole: SimplicialComplex) -> bool:
    if not sub.faces <= whole.faces:
        raise ComplexError("Not a subcomplex.", code="not_subcomplex")
    verts = set(sub.vertices)
    return all(f in sub.faces for f in whole.faces if f <= verts)


@dataclass(frozen=True, eq=False)
class DeltaComplex:
    """Semi-simplicial set: faces[s] = (d_0 s, ..., d_n s); d_0 of an edge is its end."""

    dims: tuple[int, ...]
    faces: tuple[tuple[int, ...], ...]
    names: tuple | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.dims)

    @property
    def dimension(self) -> int:
        return max(self.dims) if self.dims else -1

    def simplices(self, k: int) -> tuple[int, ...]:
        return tuple(i for i, d in enumerate(self.dims) if d == k)

    def cell_counts(self) -> tuple[int, ...]:
        counts = [0] * (self.dimension + 1)
        for d in self.dims:
            counts[d] += 1
        return tuple(counts)

    def euler_characteristic(self) -> int:
        return sum(-c if k % 2 else c for k, c in enumerate(self.cell_counts()))

    def restrict(self, simplex: int, indices: Iterable[int]) -> int:
        """The face of ``simplex`` spanned by the given vertex positions."""
        keep = set(indices)
        current = simplex
        for i in range(self.dims[simplex], -1, -1):
            if i not in keep:
                current = self.faces[current][i]
        return current

    def vertices_of(self, simplex: int) -> tuple[int, ...]:
        return tuple(self.restrict(simplex, (k,)) for k in range(self.dims[simplex] + 1))

    def closure(self, simplex: int) -> frozenset[int]:
        seen: set[int] = set()
        stack = [simplex]
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(self.faces[cur])
        return frozenset(seen)

    def boundary_closure(self, simplex: int) -> frozenset[int]:
        out: set[int] = set()
        for f in self.faces[simplex]:
            out |= self.closure(f)
        return frozenset(out)

    def is_subcomplex(self, simplices: Iterable[int]) -> bool:
        members = set(simplices)
        return all(f in members for s in members for f in self.faces[s])

    def skeleton(self, k: int) -> frozenset[int]:
        return frozenset(i for i, d in enumerate(self.dims) if d <= k)

    def validate(self) -> None:
        n = len(self.dims)
        for s, d in enumerate(self.dims):
            entries = self.faces[s]
            expected = d + 1 if d > 0 else 0
            if len(entries) != expected:
                raise ComplexError(f"Simplex {s} has {len(entries)} faces.", code="malformed", details={"cell": s})
            for f in entries:
                if not 0 <= f < n:
                    raise ComplexError(f"Simplex {s} has unknown face {f}.", code="unknown_cell", details={"cell": s})
                if self.dims[f] != d - 1:
                    raise ComplexError(f"Face {f} of simplex {s} has wrong dimension.", code="face_dimension", details={"cell": s})
            if d >= 2:
                for j in range(d + 1):
                    for i in range(j):
                        left = self.faces[entries[j]][i]
                        right = self.faces[entries[i]][j - 1]
                        if left != right:
                            raise ComplexError(
                                f"Simplicial identity d_{i} d_{j} = d_{j - 1} d_{i} fails on simplex {s}.",
                                code="face_identity",
                                details={"cell": s, "i": i, "j": j},
                            )


def category_c_check(x: DeltaComplex) -> bool:
    """True iff the edges of every simplex are pairwise distinct."""
    for s, d in enumerate(x.dims):
        if d < 2:
            continue
        edges = [x.restrict(s, pair) for pair in combinations(range(d + 1), 2)]
        if len(set(edges)) != len(edges):
            return False
    return True


def _chains_to_full(n: int, length: int) -> list[tuple[tuple[int, ...], ...]]:
    """Strict chains F_0 < ... < F_{length-1} = {0..n} of index subsets."""
    full = tuple(range(n + 1))
    out: list[tuple[tuple[int, ...], ...]] = []

    def extend(chain: list[tuple[int, ...]]):
        if len(chain) == length:
            out.append(tuple(reversed(chain)))
            return
        top = chain[-1]
        for size in range(len(top) - 1, 0, -1):
            for sub in combinations(top, size):
                chain.append(sub)
                extend(chain)
                chain.pop()

    extend([full])
    return sorted(out)


def barycentric_subdivision(x: DeltaComplex | SimplicialComplex) -> DeltaComplex:
    """Simplices are (carrier simplex, chain of its faces ending at itself)."""
    if isinstance(x, SimplicialComplex):
        x = x.to_delta()
    index: dict[tuple[int, tuple], int] = {}
    dims: list[int] = []
    faces: list[tuple[int, ...]] = []
    names: list = []
    top = x.dimension
    for k in range(top + 1):
        for s, n in enumerate(x.dims):
            if n < k:
                continue
            for chain in _chains_to_full(n, k + 1):
                entries = []
                for i in range(k):
                    entries.append(index[(s, chain[:i] + chain[i + 1 :])])
                if k:
                    carrier = chain[k - 1]
                    face = x.restrict(s, carrier)
                    pos = {v: j for j, v in enumerate(carrier)}
                    relabeled = tuple(tuple(pos[v] for v in f) for f in chain[:k])
                    entries.append(index[(face, relabeled)])
                index[(s, chain)] = len(dims)
                dims.append(k)
                faces.append(tuple(entries))
                names.append((s, chain))
    result = DeltaComplex(tuple(dims), tuple(faces), tuple(names))
    LOGGER.debug("barycentric subdivision: %d simplices -> %d", len(x), len(result))
    return result
