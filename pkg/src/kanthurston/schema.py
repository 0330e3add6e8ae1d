"""JSON interchange: every document carries the schema header and a ``kind``."""

from __future__ import annotations

import json
from pathlib import Path

from .complexes.cube import CubeComplex, is_projection
from .complexes.maps import CellularMap, Involution
from .complexes.simplicial import DeltaComplex, SimplicialComplex
from .errors import ComplexError, KanThurstonError, SchemaError
from .kan_thurston import AcyclicKit, DeltaMap
from .polygons import TessellatedPolygon
from .utils import SCHEMA_VERSION, canonical_json, payload_digest
from .words import Presentation


def _plain(value):
    if isinstance(value, (tuple, list)):
        return [_plain(v) for v in value]
    if isinstance(value, frozenset):
        return sorted((_plain(v) for v in value), key=canonical_json)
    return value


def _frozen(value):
    if isinstance(value, list):
        return tuple(_frozen(v) for v in value)
    return value


def _require(payload: dict, key: str):
    if key not in payload:
        raise SchemaError(f"Missing key {key!r}.", code="missing_key", details={"key": key})
    return payload[key]


def _int_list(value, what: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise SchemaError(f"{what} must be a list of integers.", code="bad_type", details={"field": what})
    return tuple(value)


def cube_to_payload(c: CubeComplex) -> dict:
    payload = {
        "kind": "cube_complex",
        "dims": list(c.dims),
        "faces": [[[t, list(s)] for t, s in entries] for entries in c.faces],
    }
    if c.names is not None:
        payload["names"] = _plain(c.names)
    return payload


def cube_from_payload(payload: dict, *, validate: bool = True) -> CubeComplex:
    dims = _int_list(_require(payload, "dims"), "dims")
    raw_faces = _require(payload, "faces")
    if not isinstance(raw_faces, list) or len(raw_faces) != len(dims):
        raise SchemaError("Face table length differs from cell count.", code="malformed")
    faces = []
    for cell, entries in enumerate(raw_faces):
        row = []
        for entry in entries:
            try:
                target, sym = entry
                sym = tuple(int(x) for x in sym)
                target = int(target)
            except (TypeError, ValueError):
                raise SchemaError(f"Cell {cell} has a malformed face entry.", code="malformed", details={"cell": cell}) from None
            if dims[cell] and not is_projection(sym, dims[cell] - 1):
                raise SchemaError(f"Cell {cell} carries an invalid symmetry.", code="bad_sym", details={"cell": cell})
            row.append((target, sym))
        faces.append(tuple(row))
    names = payload.get("names")
    c = CubeComplex(dims, tuple(faces), _frozen(names) if names is not None else None)
    if validate:
        try:
            c.validate()
        except ComplexError as exc:
            raise SchemaError(str(exc), code=exc.code, details=exc.details) from exc
    return c


def delta_to_payload(x: DeltaComplex) -> dict:
    payload = {"kind": "delta_complex", "dims": list(x.dims), "faces": [list(f) for f in x.faces]}
    if x.names is not None:
        payload["names"] = _plain(x.names)
    return payload


def delta_from_payload(payload: dict) -> DeltaComplex:
    dims = _int_list(_require(payload, "dims"), "dims")
    faces = tuple(_int_list(f, f"faces[{i}]") for i, f in enumerate(_require(payload, "faces")))
    names = payload.get("names")
    x = DeltaComplex(dims, faces, _frozen(names) if names is not None else None)
    try:
        x.validate()
    except ComplexError as exc:
        raise SchemaError(str(exc), code=exc.code, details=exc.details) from exc
    return x


def simplicial_to_payload(s: SimplicialComplex) -> dict:
    return {
        "kind": "simplicial_complex",
        "vertices": _plain(s.vertices),
        "facets": [_plain(sorted(f, key=canonical_json)) for f in s.facets()],
    }


def simplicial_from_payload(payload: dict) -> SimplicialComplex:
    vertices = [_frozen(v) for v in _require(payload, "vertices")]
    facets = [[_frozen(v) for v in f] for f in _require(payload, "facets")]
    return SimplicialComplex.from_facets(facets, vertices)


def map_to_payload(f: CellularMap) -> dict:
    payload = {
        "kind": "involution" if isinstance(f, Involution) else "cellular_map",
        "images": f.to_rows(),
    }
    if f.source is f.target:
        payload["complex"] = cube_to_payload(f.source)
    else:
        payload["source"] = cube_to_payload(f.source)
        payload["target"] = cube_to_payload(f.target)
    return payload


def map_from_payload(payload: dict) -> CellularMap:
    if "complex" in payload:
        source = target = cube_from_payload(payload["complex"])
    else:
        source = cube_from_payload(_require(payload, "source"))
        target = cube_from_payload(_require(payload, "target"))
    images = {}
    for row in _require(payload, "images"):
        try:
            x, y, g = row
            images[int(x)] = (int(y), tuple(int(v) for v in g))
        except (TypeError, ValueError):
            raise SchemaError("Malformed map row.", code="malformed", details={"row": row}) from None
    cls = Involution if payload.get("kind") == "involution" else CellularMap
    return cls(source, target, images)


def delta_map_to_payload(f: DeltaMap) -> dict:
    return {
        "kind": "delta_map",
        "source": delta_to_payload(f.source),
        "target": delta_to_payload(f.target),
        "images": [[s, t] for s, t in sorted(f.images.items())],
    }


def delta_map_from_payload(payload: dict) -> DeltaMap:
    source = delta_from_payload(_require(payload, "source"))
    target = delta_from_payload(_require(payload, "target"))
    images = {int(s): int(t) for s, t in _require(payload, "images")}
    return DeltaMap(source, target, images)


def polygon_to_payload(p: TessellatedPolygon) -> dict:
    payload = {
        "kind": "polygon",
        "carrier": cube_to_payload(p.carrier),
        "boundary": [[e, o] for e, o in p.boundary],
        "corners": list(p.corners),
    }
    if p.coords is not None:
        payload["coords"] = [[v, x, y] for v, (x, y) in sorted(p.coords.items())]
    return payload


def polygon_from_payload(payload: dict) -> TessellatedPolygon:
    carrier = cube_from_payload(_require(payload, "carrier"))
    boundary = tuple((int(e), int(o)) for e, o in _require(payload, "boundary"))
    corners = _int_list(_require(payload, "corners"), "corners")
    coords = None
    if "coords" in payload:
        coords = {int(v): (x, y) for v, x, y in payload["coords"]}
    return TessellatedPolygon(carrier, boundary, corners, coords)


def presentation_to_payload(p: Presentation) -> dict:
    return {"kind": "presentation", **p.to_dict()}


def presentation_from_payload(payload: dict) -> Presentation:
    try:
        return Presentation(
            generators=int(_require(payload, "generators")),
            relators=tuple(tuple(int(x) for x in w) for w in _require(payload, "relators")),
            names=tuple(payload["names"]) if "names" in payload else None,
            sides=tuple(tuple(s) for s in payload["sides"]) if "sides" in payload else None,
            generator_permutation=tuple(payload["generator_permutation"]) if "generator_permutation" in payload else None,
        )
    except KanThurstonError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(str(exc), code=exc.code, details=exc.details) from exc


def kit_to_payload(kit: AcyclicKit) -> dict:
    return {
        "kind": "kit",
        "name": kit.name,
        "aprime": cube_to_payload(kit.aprime),
        "a_cells": sorted(kit.a_cells),
        "tau": kit.tau.to_rows(),
        "a0": kit.a0,
        "j": [list(step) for step in kit.j],
        "fixed_set_is_a": kit.fixed_set_is_a,
    }


def kit_from_payload(payload: dict) -> AcyclicKit:
    aprime = cube_from_payload(_require(payload, "aprime"), validate=False)
    tau = Involution(aprime, aprime, {int(x): (int(y), tuple(g)) for x, y, g in _require(payload, "tau")})
    return AcyclicKit(
        name=str(_require(payload, "name")),
        aprime=aprime,
        a_cells=frozenset(_int_list(_require(payload, "a_cells"), "a_cells")),
        tau=tau,
        a0=int(_require(payload, "a0")),
        j=tuple((int(e), int(o)) for e, o in _require(payload, "j")),
        fixed_set_is_a=bool(payload.get("fixed_set_is_a", False)),
    )


_WRITERS = (
    (Involution, map_to_payload),
    (CellularMap, map_to_payload),
    (CubeComplex, cube_to_payload),
    (DeltaComplex, delta_to_payload),
    (SimplicialComplex, simplicial_to_payload),
    (TessellatedPolygon, polygon_to_payload),
    (Presentation, presentation_to_payload),
    (DeltaMap, delta_map_to_payload),
    (AcyclicKit, kit_to_payload),
)

_READERS = {
    "cube_complex": cube_from_payload,
    "delta_complex": delta_from_payload,
    "simplicial_complex": simplicial_from_payload,
    "cellular_map": map_from_payload,
    "involution": map_from_payload,
    "polygon": polygon_from_payload,
    "presentation": presentation_from_payload,
    "delta_map": delta_map_from_payload,
    "kit": kit_from_payload,
}


def to_document(obj) -> dict:
    for cls, writer in _WRITERS:
        if isinstance(obj, cls):
            return {"schema": SCHEMA_VERSION, **writer(obj)}
    raise SchemaError(f"Cannot serialize {type(obj).__name__}.", code="unsupported_kind")


def from_document(payload: dict):
    if not isinstance(payload, dict):
        raise SchemaError("A document must be a JSON object.", code="malformed")
    version = payload.get("schema")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"Unsupported schema {version!r}.", code="bad_schema", details={"schema": version})
    kind = payload.get("kind")
    reader = _READERS.get(kind)
    if reader is None:
        raise SchemaError(f"Unknown document kind {kind!r}.", code="unknown_kind", details={"kind": kind})
    return reader(payload)


def dumps(obj) -> str:
    return canonical_json(to_document(obj))


def document_digest(obj) -> str:
    return payload_digest(to_document(obj))


def write_document(path: Path, obj) -> str:
    text = dumps(obj)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n", encoding="utf-8")
    return payload_digest(to_document(obj))


def read_document(path: Path):
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SchemaError(f"Input file not found: {path}", code="missing_file", details={"path": str(path)}) from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"Invalid JSON in {path}: {exc.msg}", code="bad_json", details={"line": exc.lineno}) from exc
    return from_document(payload)
