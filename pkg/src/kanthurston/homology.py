from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from .complexes.cube import CubeComplex, face_slot, sym_det
from .complexes.simplicial import DeltaComplex, SimplicialComplex
from .errors import ComplexError
from .words import Presentation, cyclic_reduce, free_reduce


LOGGER = logging.getLogger(__name__)

Column = dict[int, int]


@dataclass(frozen=True)
class ChainComplex:
    """Cellular chains; ``boundaries[k]`` has one sparse column per k-cell, rows index (k-1)-cells."""

    cells: tuple[tuple[int, ...], ...]
    boundaries: tuple[tuple[Column, ...], ...]

    @property
    def top(self) -> int:
        return len(self.cells) - 1

    def rank(self, k: int) -> int:
        if 0 <= k < len(self.cells):
            return len(self.cells[k])
        return 0

    def columns(self, k: int) -> tuple[Column, ...]:
        if 1 <= k < len(self.boundaries):
            return self.boundaries[k]
        return tuple({} for _ in range(self.rank(k)))

    def dense(self, k: int) -> list[list[int]]:
        rows = self.rank(k - 1)
        out = [[0] * self.rank(k) for _ in range(rows)]
        for j, col in enumerate(self.columns(k)):
            for i, v in col.items():
                out[i][j] = v
        return out

    def check(self) -> None:
        """Raise ComplexError unless every composite of boundaries vanishes."""
        for k in range(2, len(self.boundaries)):
            lower = self.boundaries[k - 1]
            for j, col in enumerate(self.boundaries[k]):
                acc: dict[int, int] = {}
                for i, v in col.items():
                    for r, w in lower[i].items():
                        acc[r] = acc.get(r, 0) + v * w
                if any(acc.values()):
                    raise ComplexError(
                        f"Boundary of boundary is non-zero in degree {k}.",
                        code="boundary_squared",
                        details={"degree": k, "column": j},
                    )


def _cube_columns(c: CubeComplex, cells: Sequence[Sequence[int]], exclude: frozenset[int]) -> list[tuple[Column, ...]]:
    position = {}
    for group in cells:
        for idx, cell in enumerate(group):
            position[cell] = idx
    out: list[tuple[Column, ...]] = [()]
    for k in range(1, len(cells)):
        cols = []
        for cell in cells[k]:
            col: Column = {}
            for direction in range(1, k + 1):
                base = 1 if direction % 2 else -1
                for eps in (-1, 1):
                    target, s = c.faces[cell][face_slot(direction, eps)]
                    # collapsed faces have degree zero
                    if target in exclude or len(s) != k - 1:
                        continue
                    row = position[target]
                    col[row] = col.get(row, 0) + base * eps * sym_det(s)
            cols.append({r: v for r, v in col.items() if v})
        out.append(tuple(cols))
    return out


def _delta_columns(x: DeltaComplex, cells: Sequence[Sequence[int]], exclude: frozenset[int]) -> list[tuple[Column, ...]]:
    position = {}
    for group in cells:
        for idx, cell in enumerate(group):
            position[cell] = idx
    out: list[tuple[Column, ...]] = [()]
    for k in range(1, len(cells)):
        cols = []
        for cell in cells[k]:
            col: Column = {}
            for i, target in enumerate(x.faces[cell]):
                if target in exclude:
                    continue
                row = position[target]
                col[row] = col.get(row, 0) + (-1 if i % 2 else 1)
            cols.append({r: v for r, v in col.items() if v})
        out.append(tuple(cols))
    return out


def chain_complex(c, exclude: Iterable[int] = ()) -> ChainComplex:
    """Cellular chain complex of a cube, Delta or simplicial complex, optionally relative to ``exclude``."""
    if isinstance(c, SimplicialComplex):
        if exclude:
            raise ComplexError("Relative chains of a simplicial complex go through to_delta().", code="unsupported")
        c = c.to_delta()
    dropped = frozenset(exclude)
    top = c.dimension
    cells = tuple(tuple(x for x in range(len(c)) if c.dims[x] == k and x not in dropped) for k in range(top + 1))
    if isinstance(c, CubeComplex):
        boundaries = _cube_columns(c, cells, dropped)
    elif isinstance(c, DeltaComplex):
        boundaries = _delta_columns(c, cells, dropped)
    else:
        raise ComplexError(f"Cannot build chains for {type(c).__name__}.", code="unsupported")
    return ChainComplex(cells, tuple(boundaries))


def _first_smallest(matrix: list[list[int]], start: int) -> tuple[int, int] | None:
    best = None
    best_value = 0
    for i in range(start, len(matrix)):
        row = matrix[i]
        for j in range(start, len(row)):
            v = abs(row[j])
            if v and (best is None or v < best_value):
                best = (i, j)
                best_value = v
                if v == 1:
                    return best
    return best


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def _add_row(m, src, dst, factor):
    """row dst += factor * row src"""
    a = m[src]
    b = m[dst]
    for k, v in enumerate(a):
        if v:
            b[k] += factor * v


def _add_col(m, src, dst, factor):
    for row in m:
        if row[src]:
            row[dst] += factor * row[src]


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class SmithResult:
    factors: tuple[int, ...]
    left: tuple[tuple[int, ...], ...] | None = None
    right: tuple[tuple[int, ...], ...] | None = None

    @property
    def rank(self) -> int:
        return len(self.factors)


def _settle_pivot(a, u, v, t: int) -> bool:
    """Make a[t][t] divide everything below and right of it and clear row and column t."""
    rows = len(a)
    cols = len(a[0])
    while True:
        pivot = _first_smallest(a, t)
        if pivot is None:
            return False
        i, j = pivot
        if i != t:
            _swap_rows(a, i, t)
            if u is not None:
                _swap_rows(u, i, t)
        if j != t:
            _swap_cols(a, j, t)
            if v is not None:
                _swap_cols(v, j, t)
        p = a[t][t]
        changed = False
        for r in range(t + 1, rows):
            if a[r][t]:
                q = a[r][t] // p
                _add_row(a, t, r, -q)
                if u is not None:
                    _add_row(u, t, r, -q)
                changed = changed or bool(a[r][t])
        for c in range(t + 1, cols):
            if a[t][c]:
                q = a[t][c] // p
                _add_col(a, t, c, -q)
                if v is not None:
                    _add_col(v, t, c, -q)
                changed = changed or bool(a[t][c])
        if changed:
            continue
        bad = next((r for r in range(t + 1, rows) if any(a[r][c] % p for c in range(t + 1, cols))), None)
        if bad is None:
            break
        _add_row(a, bad, t, 1)
        if u is not None:
            _add_row(u, bad, t, 1)
    if a[t][t] < 0:
        a[t] = [-x for x in a[t]]
        if u is not None:
            u[t] = [-x for x in u[t]]
    return True


def smith_normal_form(m: Sequence[Sequence[int]], transforms: bool = False) -> SmithResult:
    """Invariant factors d_1 | d_2 | ... of an integer matrix; with ``transforms``, U and V with U*m*V diagonal."""
    a = [[int(v) for v in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = _identity(rows) if transforms else None
    v = _identity(cols) if transforms else None

    for t in range(min(rows, cols)):
        if not _settle_pivot(a, u, v, t):
            break

    factors = tuple(a[k][k] for k in range(min(rows, cols)) if a[k][k])
    if transforms:
        return SmithResult(factors, tuple(map(tuple, u)), tuple(map(tuple, v)))
    return SmithResult(factors)


def _sparse_reduce(columns: Sequence[Column]) -> tuple[int, list[Column]]:
    """Eliminate unit pivots; returns (number of unit pivots, residual columns)."""
    cols: dict[int, Column] = {j: dict(col) for j, col in enumerate(columns) if col}
    row_index: dict[int, set[int]] = {}
    for j, col in cols.items():
        for i in col:
            row_index.setdefault(i, set()).add(j)

    units = 0
    progress = True
    while progress:
        progress = False
        for j in sorted(cols):
            col = cols.get(j)
            if not col:
                continue
            candidates = [i for i, val in col.items() if val in (1, -1)]
            if not candidates:
                continue
            r = min(candidates, key=lambda i: (len(row_index[i]), i))
            pv = col[r]
            for other in sorted(row_index[r] - {j}):
                target = cols[other]
                factor = target[r] * pv
                for i, val in col.items():
                    nv = target.get(i, 0) - factor * val
                    if nv:
                        if i not in target:
                            row_index.setdefault(i, set()).add(other)
                        target[i] = nv
                    elif i in target:
                        del target[i]
                        row_index[i].discard(other)
                if not target:
                    del cols[other]
            for i in col:
                row_index[i].discard(j)
            del cols[j]
            del row_index[r]
            units += 1
            progress = True
    residual = [cols[j] for j in sorted(cols) if cols[j]]
    return units, residual


def boundary_invariants(columns: Sequence[Column]) -> tuple[int, tuple[int, ...]]:
    """(rank, invariant factors > 1) of a sparse integer matrix."""
    units, residual = _sparse_reduce(columns)
    if not residual:
        return units, ()
    rows = sorted({i for col in residual for i in col})
    position = {i: k for k, i in enumerate(rows)}
    dense = [[0] * len(residual) for _ in rows]
    for j, col in enumerate(residual):
        for i, v in col.items():
            dense[position[i]][j] = v
    LOGGER.debug("dense smith form on a %dx%d residue", len(rows), len(residual))
    factors = smith_normal_form(dense).factors
    return units + len(factors), tuple(f for f in factors if f > 1)


@dataclass(frozen=True)
class HomologyGroup:
    degree: int
    betti: int
    torsion: tuple[int, ...] = ()

    @property
    def trivial(self) -> bool:
        return self.betti == 0 and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.betti == 1:
            parts.append("Z")
        elif self.betti > 1:
            parts.append(f"Z^{self.betti}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return f"H_{self.degree} = " + (" + ".join(parts) if parts else "0")

    def to_dict(self) -> dict:
        return {"degree": self.degree, "betti": self.betti, "torsion": list(self.torsion)}


@dataclass(frozen=True)
class HomologyGroups:
    groups: tuple[HomologyGroup, ...]

    def __getitem__(self, degree: int) -> HomologyGroup:
        if 0 <= degree < len(self.groups):
            return self.groups[degree]
        return HomologyGroup(degree, 0, ())

    def __len__(self) -> int:
        return len(self.groups)

    @property
    def betti(self) -> tuple[int, ...]:
        return tuple(g.betti for g in self.groups)

    def is_trivial(self) -> bool:
        return all(g.trivial for g in self.groups)

    def signature(self) -> tuple[tuple[int, tuple[int, ...]], ...]:
        """Comparable form with trailing trivial degrees dropped."""
        items = [(g.betti, g.torsion) for g in self.groups]
        while items and items[-1] == (0, ()):
            items.pop()
        return tuple(items)

    def format(self) -> str:
        return "\n".join(str(g) for g in self.groups)

    def to_dict(self) -> list[dict]:
        return [g.to_dict() for g in self.groups]


def homology(cc: ChainComplex, *, reduced: bool = False) -> HomologyGroups:
    top = cc.top
    ranks = {}
    torsion = {}
    for k in range(1, top + 1):
        ranks[k], torsion[k] = boundary_invariants(cc.columns(k))
    if reduced and cc.rank(0):
        ranks[0], torsion[0] = 1, ()
    groups = []
    for k in range(top + 1):
        kernel = cc.rank(k) - ranks.get(k, 0)
        betti = kernel - ranks.get(k + 1, 0)
        groups.append(HomologyGroup(k, betti, torsion.get(k + 1, ())))
    return HomologyGroups(tuple(groups))


def reduced_homology(cc: ChainComplex) -> HomologyGroups:
    return homology(cc, reduced=True)


def complex_homology(c, *, reduced: bool = False) -> HomologyGroups:
    result = homology(chain_complex(c), reduced=reduced)
    LOGGER.info("homology: %s", "; ".join(str(g) for g in result.groups))
    return result


def relative_homology(c, sub: Iterable[int]) -> HomologyGroups:
    members = frozenset(sub)
    if not c.is_subcomplex(members):
        raise ComplexError("Relative homology needs a subcomplex.", code="not_subcomplex")
    return homology(chain_complex(c, exclude=members))


def is_acyclic(c) -> bool:
    if isinstance(c, ChainComplex):
        return reduced_homology(c).is_trivial()
    if len(c) == 0:
        return False
    return complex_homology(c, reduced=True).is_trivial()


def euler_characteristic(c) -> int:
    return c.euler_characteristic()


def cell_counts(c) -> tuple[int, ...]:
    return c.cell_counts()


def exponent_matrix(p: Presentation) -> list[list[int]]:
    """Rows are generators, columns relators: exponent sums."""
    out = [[0] * len(p.relators) for _ in range(p.generators)]
    for j, word in enumerate(p.relators):
        for letter in word:
            out[abs(letter) - 1][j] += 1 if letter > 0 else -1
    return out


def presentation_h1_h2(p: Presentation) -> HomologyGroups:
    matrix = exponent_matrix(p)
    factors = smith_normal_form(matrix).factors if matrix and matrix[0] else ()
    rank = len(factors)
    return HomologyGroups(
        (
            HomologyGroup(0, 1, ()),
            HomologyGroup(1, p.generators - rank, tuple(f for f in factors if f > 1)),
            HomologyGroup(2, len(p.relators) - rank, ()),
        )
    )


def trivializing_reduction_check(p: Presentation) -> bool:
    """Every reduced relator is a single generator and every generator appears so."""
    killed = set()
    for word in p.relators:
        reduced = cyclic_reduce(free_reduce(word))
        if len(reduced) != 1:
            return False
        killed.add(abs(reduced[0]))
    return killed == set(range(1, p.generators + 1))


def rational_betti(c) -> tuple[int, ...]:
    """Betti numbers from ranks over Q, via sympy."""
    import sympy

    cc = chain_complex(c)
    ranks = {}
    for k in range(1, cc.top + 1):
        dense = cc.dense(k)
        ranks[k] = sympy.Matrix(dense).rank() if dense and dense[0] else 0
    return tuple(cc.rank(k) - ranks.get(k, 0) - ranks.get(k + 1, 0) for k in range(cc.top + 1))
