from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Iterable, Sequence

import networkx as nx

from ..errors import ComplexError


LOGGER = logging.getLogger(__name__)

# A signed coordinate permutation of [-1, 1]^n, 1-based: (S_s x)_i = sign(s_i) * x_|s_i|.
Sym = tuple[int, ...]
# A face entry (target cell, sym): chi_cell o iota_{k,eps} = chi_target o S_sym.
# A collapsed face points at a lower-dimensional cell; its sym is then a projection
# with one entry per coordinate of the target.
Face = tuple[int, Sym]

_IDENTITIES: dict[int, Sym] = {}


def sym_identity(n: int) -> Sym:
    sym = _IDENTITIES.get(n)
    if sym is None:
        sym = tuple(range(1, n + 1))
        _IDENTITIES[n] = sym
    return sym


def is_identity(sym: Sym) -> bool:
    return all(value == idx for idx, value in enumerate(sym, start=1))


def sym_compose(s: Sym, r: Sequence[int]) -> tuple[int, ...]:
    """S_s o S_r. Also transports a corner/code vector r into the target frame."""
    return tuple(r[v - 1] if v > 0 else -r[-v - 1] for v in s)


def sym_inverse(s: Sym) -> Sym:
    out = [0] * len(s)
    for idx, value in enumerate(s, start=1):
        out[abs(value) - 1] = idx if value > 0 else -idx
    return tuple(out)


def sym_det(s: Sym) -> int:
    sign = -1 if sum(1 for v in s if v < 0) % 2 else 1
    perm = [abs(v) - 1 for v in s]
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        cursor = start
        while not seen[cursor]:
            seen[cursor] = True
            cursor = perm[cursor]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def is_projection(s: Sequence[int], n: int) -> bool:
    """A signed coordinate projection [-1, 1]^n -> [-1, 1]^len(s); bijective syms included."""
    picked = [abs(int(v)) for v in s]
    return len(set(picked)) == len(picked) and all(1 <= a <= n for a in picked)


def sym_through(q: Sequence[int], s: Sequence[int]) -> Sym | None:
    """The h with S_q = S_h o S_s, or None when q reads a coordinate that s drops."""
    position = {abs(v): (idx if v > 0 else -idx) for idx, v in enumerate(s, start=1)}
    out = []
    for v in q:
        hit = position.get(abs(v))
        if hit is None:
            return None
        out.append(hit if v > 0 else -hit)
    return tuple(out)


def transport(s: Sym, j: int, delta: int) -> tuple[int, int, Sym]:
    """Solve S_s o iota_{j,delta} = iota_{i,eps} o S_r for (i, eps, r)."""
    i = 0
    eps = 0
    r: list[int] = []
    for m, value in enumerate(s, start=1):
        a = abs(value)
        sign = 1 if value > 0 else -1
        if a == j:
            i = m
            eps = sign * delta
        else:
            r.append(sign * (a if a < j else a - 1))
    return i, eps, tuple(r)


def face_slot(k: int, eps: int) -> int:
    return 2 * (k - 1) + (1 if eps > 0 else 0)


def corner_codes(d: int) -> list[tuple[int, ...]]:
    return list(cartesian((-1, 1), repeat=d))


@dataclass(frozen=True, eq=False)
class CubeComplex:
    """Cells glued along face maps; ids are positions in ``dims``."""

    dims: tuple[int, ...]
    faces: tuple[tuple[Face, ...], ...]
    names: tuple | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.dims)

    @property
    def dimension(self) -> int:
        return max(self.dims) if self.dims else -1

    def name(self, cell: int):
        if self.names is None:
            return None
        return self.names[cell]

    def cells_of_dim(self, k: int) -> tuple[int, ...]:
        key = ("by_dim", k)
        cached = self._cache.get(key)
        if cached is None:
            cached = tuple(idx for idx, d in enumerate(self.dims) if d == k)
            self._cache[key] = cached
        return cached

    def vertices(self) -> tuple[int, ...]:
        return self.cells_of_dim(0)

    def cell_counts(self) -> tuple[int, ...]:
        counts = [0] * (self.dimension + 1)
        for d in self.dims:
            counts[d] += 1
        return tuple(counts)

    def euler_characteristic(self) -> int:
        return sum(-c if k % 2 else c for k, c in enumerate(self.cell_counts()))

    def face(self, cell: int, k: int, eps: int) -> Face:
        return self.faces[cell][face_slot(k, eps)]

    def restrict(self, cell: int, sym: Sym, j: int, delta: int) -> Face:
        """Given a partial face chi = chi_cell o S_sym, restrict further along iota_{j,delta}."""
        i, eps, r = transport(sym, j, delta)
        if i == 0:
            return cell, r
        target, s = self.faces[cell][face_slot(i, eps)]
        return target, sym_compose(s, r)

    def face_of(self, cell: int, code: Sequence[int]) -> Face:
        """Face of ``cell`` fixing coordinate p at code[p] when code[p] != 0."""
        target = cell
        sym = sym_identity(self.dims[cell])
        for p in range(len(code), 0, -1):
            value = code[p - 1]
            if value:
                target, sym = self.restrict(target, sym, p, value)
        return target, sym

    def corners(self, cell: int) -> tuple[int, ...]:
        """Vertex ids at the corners of ``cell``, ordered as ``corner_codes(dim)``."""
        table = self._cache.setdefault("corners", {})
        hit = table.get(cell)
        if hit is not None:
            return hit
        d = self.dims[cell]
        if d == 0:
            result: tuple[int, ...] = (cell,)
        else:
            lookups: dict[int, dict] = {}
            out = []
            for eps in corner_codes(d):
                target, s = self.faces[cell][face_slot(d, eps[-1])]
                sub = self.corners(target)
                e = self.dims[target]
                if e not in lookups:
                    lookups[e] = {code: idx for idx, code in enumerate(corner_codes(e))}
                out.append(sub[lookups[e][sym_compose(s, eps[:-1])]])
            result = tuple(out)
        table[cell] = result
        return result

    def collapsed_cells(self) -> frozenset[int]:
        """Cells with a collapsed face somewhere in their closure."""
        cached = self._cache.get("collapsed")
        if cached is None:
            out: set[int] = set()
            for cell in sorted(range(len(self.dims)), key=self.dims.__getitem__):
                d = self.dims[cell]
                if any(self.dims[t] != d - 1 or t in out for t, _s in self.faces[cell]):
                    out.add(cell)
            cached = frozenset(out)
            self._cache["collapsed"] = cached
        return cached

    def edge_endpoints(self, edge: int) -> tuple[int, int]:
        if self.dims[edge] != 1:
            raise ComplexError(f"Cell {edge} is not an edge.", code="not_an_edge", details={"cell": edge})
        minus, plus = self.faces[edge]
        return minus[0], plus[0]

    def closure(self, cells: Iterable[int]) -> frozenset[int]:
        seen: set[int] = set()
        stack = [int(c) for c in cells]
        while stack:
            cell = stack.pop()
            if cell in seen:
                continue
            seen.add(cell)
            stack.extend(t for t, _s in self.faces[cell])
        return frozenset(seen)

    def is_subcomplex(self, cells: Iterable[int]) -> bool:
        members = set(cells)
        return all(t in members for cell in members for t, _s in self.faces[cell])

    def cofaces(self) -> tuple[tuple[int, ...], ...]:
        cached = self._cache.get("cofaces")
        if cached is None:
            out: list[list[int]] = [[] for _ in self.dims]
            for cell, entries in enumerate(self.faces):
                for target, _s in entries:
                    out[target].append(cell)
            cached = tuple(tuple(row) for row in out)
            self._cache["cofaces"] = cached
        return cached

    def one_skeleton(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices())
        for edge in self.cells_of_dim(1):
            a, b = self.edge_endpoints(edge)
            graph.add_edge(a, b, key=edge)
        return graph

    def validate(self) -> None:
        """Raise ComplexError unless dimensions, syms and the cubical identities are consistent."""
        n = len(self.dims)
        if len(self.faces) != n:
            raise ComplexError("Face table length differs from cell count.", code="malformed")
        for cell, d in enumerate(self.dims):
            entries = self.faces[cell]
            if len(entries) != 2 * d:
                raise ComplexError(
                    f"Cell {cell} of dimension {d} has {len(entries)} faces.",
                    code="malformed",
                    details={"cell": cell},
                )
            for target, s in entries:
                if not 0 <= target < n:
                    raise ComplexError(f"Cell {cell} has unknown face {target}.", code="unknown_cell", details={"cell": cell})
                if self.dims[target] > d - 1 or len(s) != self.dims[target]:
                    raise ComplexError(
                        f"Face {target} of cell {cell} has dimension {self.dims[target]}.",
                        code="face_dimension",
                        details={"cell": cell, "face": target},
                    )
                if not is_projection(s, d - 1):
                    raise ComplexError(f"Cell {cell} carries an invalid symmetry {s}.", code="bad_sym", details={"cell": cell})
            for k in range(1, d + 1):
                for l in range(k + 1, d + 1):
                    for eps in (-1, 1):
                        for delta in (-1, 1):
                            t1, s1 = self.faces[cell][face_slot(k, eps)]
                            t2, s2 = self.faces[cell][face_slot(l, delta)]
                            first = self.restrict(t1, s1, l - 1, delta)
                            second = self.restrict(t2, s2, k, eps)
                            if first != second:
                                raise ComplexError(
                                    f"Cubical identity fails on cell {cell} for directions {k},{l}.",
                                    code="face_identity",
                                    details={"cell": cell, "directions": [k, l], "signs": [eps, delta]},
                                )


class CubeComplexBuilder:
    def __init__(self):
        self._dims: list[int] = []
        self._faces: list[tuple[Face, ...]] = []
        self._names: list = []

    def __len__(self) -> int:
        return len(self._dims)

    def add_vertex(self, name=None) -> int:
        self._dims.append(0)
        self._faces.append(())
        self._names.append(name)
        return len(self._dims) - 1

    def add_cube(self, faces: Sequence[Face], name=None) -> int:
        if len(faces) % 2:
            raise ComplexError("A cube needs an even number of faces.", code="malformed")
        d = len(faces) // 2
        normalized = []
        for target, s in faces:
            target = int(target)
            if not 0 <= target < len(self._dims) or self._dims[target] != d - 1:
                raise ComplexError(f"Face {target} cannot bound a {d}-cube.", code="face_dimension", details={"face": target})
            normalized.append((target, tuple(int(v) for v in s)))
        self._dims.append(d)
        self._faces.append(tuple(normalized))
        self._names.append(name)
        return len(self._dims) - 1

    def add_edge(self, start: int, end: int, name=None) -> int:
        return self.add_cube(((start, ()), (end, ())), name=name)

    def add_square(self, left: Face, right: Face, bottom: Face, top: Face, name=None) -> int:
        """Square with x-direction 1 (left/right fix x) and y-direction 2 (bottom/top fix y)."""
        return self.add_cube((left, right, bottom, top), name=name)

    def build(self, *, validate: bool = True) -> CubeComplex:
        names = tuple(self._names) if any(n is not None for n in self._names) else None
        complex_ = CubeComplex(dims=tuple(self._dims), faces=tuple(self._faces), names=names)
        if validate:
            complex_.validate()
        return complex_


@dataclass(frozen=True)
class Pushout:
    """Result of an identification: the complex plus, per summand, old cell -> (new cell, sym)."""

    complex: CubeComplex
    maps: tuple[tuple[Face, ...], ...]


def disjoint_union(*parts: CubeComplex) -> tuple[CubeComplex, tuple[int, ...]]:
    dims: list[int] = []
    faces: list[tuple[Face, ...]] = []
    names: list = []
    offsets = []
    has_names = any(p.names is not None for p in parts)
    for part in parts:
        offset = len(dims)
        offsets.append(offset)
        dims.extend(part.dims)
        faces.extend(tuple((t + offset, s) for t, s in entries) for entries in part.faces)
        names.extend(part.names if part.names is not None else [None] * len(part))
    return CubeComplex(tuple(dims), tuple(faces), tuple(names) if has_names else None), tuple(offsets)


def identify(c: CubeComplex, pairs: Iterable[tuple[int, int, Sym]]) -> tuple[CubeComplex, tuple[Face, ...]]:
    """Quotient of ``c`` by chi_x = chi_y o S_g for each (x, y, g), closed under faces.

    When y has lower dimension than x, g is a projection and x collapses onto y.
    Returns the quotient and, for every old cell, (new cell, G) with chi_old = chi_new o S_G;
    G is a projection exactly for the collapsed cells.
    Surviving cells keep their relative order; a class is represented by its smallest id.
    """
    n = len(c)
    dims = c.dims
    parent = list(range(n))
    link: list[Sym | None] = [None] * n
    collapsed: dict[int, Face] = {}

    def find(x: int) -> int:
        path = []
        while parent[x] != x:
            path.append(x)
            x = parent[x]
        root = x
        acc = sym_identity(dims[root])
        for y in reversed(path):
            acc = sym_compose(acc, link[y])
            parent[y] = root
            link[y] = acc
        return root

    def total(x: int, root: int) -> Sym:
        return link[x] if x != root else sym_identity(dims[x])

    def resolve(x: int) -> Face:
        root = find(x)
        gx = total(x, root)
        hit = collapsed.get(root)
        if hit is None:
            return root, gx
        z, h = resolve(hit[0])
        return z, sym_compose(sym_compose(h, hit[1]), gx)

    def settle(y: int, g: Sym) -> Face:
        z, h = resolve(y)
        return z, sym_compose(h, g)

    def relate(t: int, s: Sym, t2: int, q: Sym) -> tuple[int, int, Sym]:
        # chi_t o S_s = chi_t2 o S_q, rewritten as a pair with the larger cell first.
        if dims[t] >= dims[t2]:
            x, y, g = t, t2, sym_through(q, s)
        else:
            x, y, g = t2, t, sym_through(s, q)
        if g is None:
            raise ComplexError(
                f"Cells {t} and {t2} are collapsed along different coordinates.",
                code="inconsistent_collapse",
                details={"cells": [t, t2]},
            )
        return x, y, g

    queue = deque((int(x), int(y), tuple(g)) for x, y, g in pairs)
    merges = 0
    while queue:
        x, y, g = queue.popleft()
        if dims[x] < dims[y] or len(g) != dims[y]:
            raise ComplexError(
                f"Cannot identify cells {x} and {y} of different dimension.",
                code="dimension_mismatch",
                details={"cells": [x, y]},
            )
        rx = find(x)
        if dims[x] > dims[y]:
            g = sym_through(g, total(x, rx))
            known = collapsed.get(rx)
            if known is not None:
                if settle(*known) != settle(y, g):
                    queue.append(relate(known[0], known[1], y, g))
                continue
            collapsed[rx] = (y, g)
            for k in range(1, dims[rx] + 1):
                for eps in (-1, 1):
                    t, s = c.faces[rx][face_slot(k, eps)]
                    t2, q = c.restrict(y, g, k, eps)
                    queue.append(relate(t, s, t2, q))
            continue
        ry = find(y)
        gx = total(x, rx)
        gy = total(y, ry)
        h = sym_compose(sym_compose(gy, g), sym_inverse(gx))
        if rx == ry:
            if not is_identity(h):
                raise ComplexError(
                    f"Cell {rx} would be identified with itself by a non-trivial symmetry {h}.",
                    code="self_identification",
                    details={"cell": rx, "sym": list(h)},
                )
            continue
        merges += 1
        if rx < ry:
            parent[ry] = rx
            link[ry] = sym_inverse(h)
            loser = ry
        else:
            parent[rx] = ry
            link[rx] = h
            loser = rx
        moved = collapsed.pop(loser, None)
        if moved is not None:
            queue.append((loser, moved[0], moved[1]))
        d = dims[rx]
        for k in range(1, d + 1):
            for eps in (-1, 1):
                t, s = c.faces[rx][face_slot(k, eps)]
                i, eps2, r = transport(h, k, eps)
                t2, s2 = c.faces[ry][face_slot(i, eps2)]
                queue.append(relate(t, s, t2, sym_compose(s2, r)))

    roots = [x for x in range(n) if find(x) == x and x not in collapsed]
    new_id = {root: idx for idx, root in enumerate(roots)}
    qmap: list[Face] = []
    for x in range(n):
        z, h = resolve(x)
        qmap.append((new_id[z], h))
    new_faces = []
    for root in roots:
        entries = []
        for t, s in c.faces[root]:
            nt, gt = qmap[t]
            entries.append((nt, sym_compose(gt, s)))
        new_faces.append(tuple(entries))
    names = tuple(c.names[r] for r in roots) if c.names is not None else None
    LOGGER.debug(
        "identify: %d cells -> %d cells (%d merges, %d collapses)", n, len(roots), merges, len(collapsed)
    )
    result = CubeComplex(tuple(dims[r] for r in roots), tuple(new_faces), names)
    return result, tuple(qmap)


def _split_map(qmap: tuple[Face, ...], offsets: Sequence[int], sizes: Sequence[int]) -> tuple[tuple[Face, ...], ...]:
    return tuple(qmap[off : off + size] for off, size in zip(offsets, sizes))


def attach(base: CubeComplex, piece: CubeComplex, images: dict[int, Face], *, check: bool = True) -> Pushout:
    """Pushout of ``base`` and ``piece`` along a cellular map from a subcomplex of ``piece`` into ``base``."""
    from .maps import CellularMap, check_cellular_map

    if check:
        if not piece.is_subcomplex(images):
            raise ComplexError("Attaching domain is not a subcomplex.", code="not_subcomplex")
        check_cellular_map(CellularMap(piece, base, dict(images)))
    union, offsets = disjoint_union(base, piece)
    pairs = ((offsets[1] + x, y, g) for x, (y, g) in images.items())
    quotient, qmap = identify(union, pairs)
    return Pushout(quotient, _split_map(qmap, offsets, (len(base), len(piece))))


def glue(a: CubeComplex, b: CubeComplex, phi) -> Pushout:
    """Glue ``a`` to ``b`` along an isomorphism ``phi`` from a subcomplex of ``a`` onto a subcomplex of ``b``."""
    from .maps import check_cellular_map

    images = phi.images
    if not a.is_subcomplex(images):
        raise ComplexError("Gluing domain is not a subcomplex.", code="not_subcomplex")
    targets = [y for y, _g in images.values()]
    if len(set(targets)) != len(targets):
        raise ComplexError("Gluing map is not injective.", code="not_injective")
    check_cellular_map(phi)
    if not b.is_subcomplex(targets):
        raise ComplexError("Gluing image is not a subcomplex.", code="not_subcomplex")
    union, offsets = disjoint_union(a, b)
    pairs = ((x, offsets[1] + y, g) for x, (y, g) in images.items())
    quotient, qmap = identify(union, pairs)
    expected = len(a) + len(b) - len(images)
    if len(quotient) != expected:
        raise ComplexError(
            "Gluing produced extra identifications.",
            code="not_injective",
            details={"expected": expected, "actual": len(quotient)},
        )
    return Pushout(quotient, _split_map(qmap, offsets, (len(a), len(b))))


def product(a: CubeComplex, b: CubeComplex) -> CubeComplex:
    """Cells (x, y) with id x * |b| + y; a-directions first."""
    nb = len(b)
    dims = []
    faces = []
    names = []
    for x in range(len(a)):
        da = a.dims[x]
        for y in range(nb):
            db = b.dims[y]
            dims.append(da + db)
            entries: list[Face] = []
            tail = tuple(range(da, da + db))
            for t, s in a.faces[x]:
                entries.append((t * nb + y, s + tail))
            head = tuple(range(1, da + 1))
            for t, s in b.faces[y]:
                entries.append((x * nb + t, head + tuple(v + da if v > 0 else v - da for v in s)))
            faces.append(tuple(entries))
            names.append((a.name(x), b.name(y)))
    has_names = a.names is not None or b.names is not None
    return CubeComplex(tuple(dims), tuple(faces), tuple(names) if has_names else None)


def interval(length: int, start: int = 0) -> CubeComplex:
    """Vertices start..start+length (ids 0..length), then unit edges oriented upwards."""
    if length < 0:
        raise ComplexError("Interval length must be non-negative.", code="out_of_range")
    builder = CubeComplexBuilder()
    for k in range(length + 1):
        builder.add_vertex(("v", start + k))
    for k in range(length):
        builder.add_edge(k, k + 1, ("e", start + k))
    return builder.build(validate=False)


def standard_cube(n: int) -> CubeComplex:
    result = interval(0)
    for _ in range(n):
        result = product(result, interval(1))
    return CubeComplex(result.dims, result.faces, None)


def grid(width: int, height: int) -> CubeComplex:
    result = product(interval(width), interval(height))
    return CubeComplex(result.dims, result.faces, None)


@dataclass(frozen=True)
class Subcomplex:
    parent: CubeComplex
    cells: frozenset[int]

    def materialize(self) -> tuple[CubeComplex, tuple[int, ...]]:
        return extract(self.parent, self.cells)


def extract(c: CubeComplex, cells: Iterable[int]) -> tuple[CubeComplex, tuple[int, ...]]:
    """Materialize a subcomplex; returns the complex and new id -> parent id."""
    members = sorted(set(int(x) for x in cells))
    if not c.is_subcomplex(members):
        raise ComplexError("Cell set is not closed under faces.", code="not_subcomplex")
    index = {old: new for new, old in enumerate(members)}
    faces = tuple(tuple((index[t], s) for t, s in c.faces[old]) for old in members)
    names = tuple(c.names[old] for old in members) if c.names is not None else None
    return CubeComplex(tuple(c.dims[old] for old in members), faces, names), tuple(members)


def cubical_subdivision(c: CubeComplex) -> tuple[CubeComplex, dict[tuple[int, tuple[int, ...]], int]]:
    """Split every d-cube into 2^d cubes.

    New cells are (cell, code) with code in {0, -1, +1}^d: 0 fixes the coordinate at the
    midpoint, +-1 keeps the half [0, +-1] free. Original vertices become (v, ()).
    """
    index: dict[tuple[int, tuple[int, ...]], int] = {}
    order: list[tuple[int, tuple[int, ...]]] = []
    for cell, d in enumerate(c.dims):
        for code in cartesian((0, -1, 1), repeat=d):
            index[(cell, code)] = len(order)
            order.append((cell, code))

    dims = []
    faces = []
    names = []
    for cell, code in order:
        free = [p for p, value in enumerate(code, start=1) if value]
        dims.append(len(free))
        names.append((c.name(cell), code) if c.names is not None else None)
        entries: list[Face] = []
        for p in free:
            side = code[p - 1]
            inner_code = code[: p - 1] + (0,) + code[p:]
            inner = (index[(cell, inner_code)], sym_identity(len(free) - 1))
            target, s = c.faces[cell][face_slot(p, side)]
            rest = code[: p - 1] + code[p:]
            moved = sym_compose(s, rest)
            rest_free = [q for q, value in enumerate(rest, start=1) if value]
            rank = {q: idx for idx, q in enumerate(rest_free, start=1)}
            local = tuple(
                (rank[abs(v)] if v > 0 else -rank[abs(v)])
                for i, v in enumerate(s, start=1)
                if moved[i - 1]
            )
            outer = (index[(target, moved)], local)
            if side > 0:
                entries.extend((inner, outer))
            else:
                entries.extend((outer, inner))
        faces.append(tuple(entries))
    result = CubeComplex(tuple(dims), tuple(faces), tuple(names) if c.names is not None else None)
    LOGGER.debug("cubical subdivision: %d cells -> %d cells", len(c), len(result))
    return result, index


def incidence_graph(c: CubeComplex) -> nx.MultiGraph:
    """Cells as nodes tagged with their dimension; one edge per face entry."""
    graph = nx.MultiGraph()
    for cell, d in enumerate(c.dims):
        graph.add_node(cell, dim=d)
    for cell, entries in enumerate(c.faces):
        for slot, (target, _s) in enumerate(entries):
            graph.add_edge(cell, target, slot=slot % 2)
    return graph


def is_isomorphic(a: CubeComplex, b: CubeComplex) -> bool:
    """Isomorphism of face-incidence graphs; exact for cubical complexes, a necessary test otherwise."""
    if a.cell_counts() != b.cell_counts():
        return False
    return nx.is_isomorphic(
        incidence_graph(a),
        incidence_graph(b),
        node_match=lambda x, y: x["dim"] == y["dim"],
    )
