from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ComplexError, MapError
from .cube import (
    CubeComplex,
    Face,
    face_slot,
    identify,
    is_identity,
    is_projection,
    sym_compose,
    sym_identity,
    sym_inverse,
    transport,
)


@dataclass(frozen=True, eq=False)
class CellularMap:
    """f o chi_x = chi_y o S_g for every x -> (y, g) in ``images``; partial maps are allowed."""

    source: CubeComplex
    target: CubeComplex
    images: dict[int, Face] = field(default_factory=dict)

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(self.images)

    def __call__(self, cell: int) -> Face:
        try:
            return self.images[cell]
        except KeyError:
            raise MapError(f"Cell {cell} is outside the map domain.", code="outside_domain", details={"cell": cell}) from None

    def is_total(self) -> bool:
        return len(self.images) == len(self.source)

    def image_cells(self) -> frozenset[int]:
        return frozenset(y for y, _g in self.images.values())

    def to_rows(self) -> list[list]:
        return [[x, y, list(g)] for x, (y, g) in sorted(self.images.items())]


class Involution(CellularMap):
    """A total cellular self-map squaring to the identity."""


def identity_map(c: CubeComplex) -> CellularMap:
    return CellularMap(c, c, {x: (x, sym_identity(d)) for x, d in enumerate(c.dims)})


def check_cellular_map(f: CellularMap) -> None:
    """Raise MapError unless every image is a face-compatible cell of at most the same dimension.

    A cell may land on a lower-dimensional cell through a coordinate projection.
    """
    src = f.source
    tgt = f.target
    images = f.images
    for x, (y, g) in images.items():
        if not 0 <= y < len(tgt):
            raise MapError(f"Cell {x} maps to unknown cell {y}.", code="unknown_cell", details={"cell": x})
        d = src.dims[x]
        if tgt.dims[y] > d or len(g) != tgt.dims[y]:
            raise MapError(
                f"Cell {x} of dimension {d} maps to cell {y} of dimension {tgt.dims[y]}.",
                code="dimension",
                details={"cell": x, "image": y},
            )
        if not is_projection(g, d):
            raise MapError(f"Cell {x} carries an invalid symmetry {g}.", code="bad_sym", details={"cell": x})
        for k in range(1, d + 1):
            for eps in (-1, 1):
                t, s = src.faces[x][face_slot(k, eps)]
                if t not in images:
                    raise MapError(
                        f"Face {t} of cell {x} is outside the map domain.",
                        code="not_subcomplex",
                        details={"cell": x, "face": t},
                    )
                y_t, g_t = images[t]
                if (y_t, sym_compose(g_t, s)) != tgt.restrict(y, g, k, eps):
                    raise MapError(
                        f"Map does not commute with face ({k},{eps}) of cell {x}.",
                        code="not_cellular",
                        details={"cell": x, "direction": k, "sign": eps},
                    )


def compose_maps(g: CellularMap, f: CellularMap) -> CellularMap:
    """g o f."""
    images = {}
    for x, (y, a) in f.images.items():
        z, b = g(y)
        images[x] = (z, sym_compose(b, a))
    return CellularMap(f.source, g.target, images)


def maps_equal(f: CellularMap, g: CellularMap) -> bool:
    return f.images == g.images


def as_involution(f: CellularMap) -> Involution:
    tau = Involution(f.source, f.target, dict(f.images))
    check_involution(tau)
    return tau


def check_involution(tau: CellularMap) -> None:
    if tau.source is not tau.target and len(tau.source) != len(tau.target):
        raise MapError("An involution must map a complex to itself.", code="not_endomorphism")
    if not tau.is_total():
        raise MapError("An involution must be defined on every cell.", code="not_total")
    check_cellular_map(tau)
    for x, (y, g) in tau.images.items():
        z, h = tau.images[y]
        if z != x or not is_identity(sym_compose(h, g)):
            raise MapError(f"tau o tau is not the identity on cell {x}.", code="not_involution", details={"cell": x})


def _setwise_violations(tau: CellularMap) -> list[int]:
    return [x for x, (y, g) in sorted(tau.images.items()) if y == x and not is_identity(g)]


def fixed_cells(c: CubeComplex, tau: CellularMap) -> frozenset[int]:
    """Pointwise fixed cells; raises SETWISE_NOT_POINTWISE when some cell is only setwise fixed."""
    bad = _setwise_violations(tau)
    if bad:
        raise ComplexError(
            f"Cell {bad[0]} is fixed setwise but not pointwise.",
            code="SETWISE_NOT_POINTWISE",
            details={"cell": bad[0], "cells": bad},
        )
    return frozenset(x for x, (y, _g) in tau.images.items() if y == x)


def fixed_subcomplex(c: CubeComplex, tau: CellularMap) -> tuple[CubeComplex, tuple[int, ...]]:
    from .cube import extract

    return extract(c, fixed_cells(c, tau))


def quotient_by_involution(c: CubeComplex, tau: CellularMap) -> tuple[CubeComplex, tuple[Face, ...]]:
    """Orbit complex of a cellular involution; |quotient| = (|c| + |fixed|) / 2."""
    check_involution(tau)
    fixed = fixed_cells(c, tau)
    pairs = ((x, y, g) for x, (y, g) in tau.images.items() if x < y)
    quotient, qmap = identify(c, pairs)
    if 2 * len(quotient) != len(c) + len(fixed):
        raise ComplexError(
            "Involution quotient has an unexpected number of cells.",
            code="quotient_count",
            details={"cells": len(c), "fixed": len(fixed), "quotient": len(quotient)},
        )
    return quotient, qmap


def induced_map(
    qmap_source: tuple[Face, ...],
    quotient_source: CubeComplex,
    qmap_target: tuple[Face, ...],
    quotient_target: CubeComplex,
    images: dict[int, Face],
) -> CellularMap:
    """Push a cell map on pre-quotient complexes down to the quotients.

    ``images`` maps pre-quotient source cells to pre-quotient target cells; only class
    representatives (cells with an identity quotient symmetry) are read.
    """
    out: dict[int, Face] = {}
    for old, (new, big_g) in enumerate(qmap_source):
        if new in out or not is_identity(big_g):
            continue
        if old not in images:
            continue
        y, g = images[old]
        z, h = qmap_target[y]
        out[new] = (z, sym_compose(h, g))
    return CellularMap(quotient_source, quotient_target, out)


def pull_through(qmap: tuple[Face, ...], images: dict[int, Face]) -> dict[int, Face]:
    """Compose a cell map with a quotient map on its target side."""
    out = {}
    for x, (y, g) in images.items():
        z, h = qmap[y]
        out[x] = (z, sym_compose(h, g))
    return out


def invert_iso(f: CellularMap) -> CellularMap:
    images = {y: (x, sym_inverse(g)) for x, (y, g) in f.images.items()}
    return CellularMap(f.target, f.source, images)


def propagate_map(source: CubeComplex, target: CubeComplex, seeds: dict[int, Face]) -> CellularMap:
    """Extend images given on some cells to their closures, checking consistency on shared faces."""
    images: dict[int, Face] = {}
    stack = [(int(x), (int(y), tuple(g))) for x, (y, g) in sorted(seeds.items())]
    while stack:
        x, (y, g) = stack.pop()
        known = images.get(x)
        if known is not None:
            if known != (y, g):
                raise MapError(
                    f"Cell {x} receives two different images.",
                    code="inconsistent",
                    details={"cell": x, "images": [[known[0], list(known[1])], [y, list(g)]]},
                )
            continue
        if source.dims[x] != target.dims[y]:
            raise MapError(f"Cell {x} maps to a cell of another dimension.", code="dimension", details={"cell": x})
        images[x] = (y, g)
        d = source.dims[x]
        for k in range(1, d + 1):
            for eps in (-1, 1):
                t, s = source.faces[x][face_slot(k, eps)]
                i, eps2, r = transport(g, k, eps)
                t2, s2 = target.faces[y][face_slot(i, eps2)]
                stack.append((t, (t2, sym_compose(sym_compose(s2, r), sym_inverse(s)))))
    return CellularMap(source, target, images)
