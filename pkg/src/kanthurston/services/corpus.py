from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from ..complexes.standard import (
    delta_boundary,
    delta_simplex,
    dunce_hat,
    one_square_mobius,
    one_square_sphere,
    one_square_torus,
    two_triangle_torus,
)
from ..errors import SchemaError
from ..kan_thurston import build_aa_pair
from ..polygons import four_saddle_octagon
from ..presentation_complexes import acycone_complex, acyctwo_complex, acyctwo_presentation, y_n
from ..schema import document_digest, dumps, read_document
from ..utils import SCHEMA_VERSION, canonical_json


LOGGER = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class Fixture:
    name: str
    build: Callable[[], object]
    heavy: bool = False


FIXTURES: tuple[Fixture, ...] = (
    Fixture("torus", one_square_torus),
    Fixture("sphere_square", one_square_sphere),
    Fixture("mobius", one_square_mobius),
    Fixture("dunce_hat", dunce_hat),
    Fixture("saddle_octagon", four_saddle_octagon),
    Fixture("y7", lambda: y_n(7).complex),
    Fixture("y8", lambda: y_n(8).complex),
    Fixture("acycone", lambda: acycone_complex().complex),
    Fixture("acyctwo_presentation", acyctwo_presentation),
    Fixture("acyctwo", lambda: acyctwo_complex()[1]),
    Fixture("delta0", lambda: delta_simplex(0)),
    Fixture("delta1", lambda: delta_simplex(1)),
    Fixture("delta2", lambda: delta_simplex(2)),
    Fixture("delta3", lambda: delta_simplex(3)),
    Fixture("boundary_delta2", lambda: delta_boundary(2)),
    Fixture("boundary_delta3", lambda: delta_boundary(3)),
    Fixture("torus_delta", two_triangle_torus),
    Fixture("genuine_kit", build_aa_pair, heavy=True),
)

_BY_NAME = {f.name: f for f in FIXTURES}


@dataclass(frozen=True)
class CorpusCheck:
    name: str
    ok: bool
    reason: str = ""


class CorpusService:
    def __init__(self, corpus_dir: Path):
        self.corpus_dir = Path(corpus_dir)

    @staticmethod
    def names(*, include_heavy: bool = False) -> list[str]:
        return [f.name for f in FIXTURES if include_heavy or not f.heavy]

    @staticmethod
    def build(name: str):
        fixture = _BY_NAME.get(name)
        if fixture is None:
            raise SchemaError(f"Unknown fixture {name!r}.", code="unknown_fixture", details={"name": name})
        return fixture.build()

    def path_for(self, name: str) -> Path:
        return self.corpus_dir / f"{name}.json"

    def write(self, names: list[str] | None = None, *, include_heavy: bool = False) -> dict[str, str]:
        selected = names if names is not None else self.names(include_heavy=include_heavy)
        self.corpus_dir.mkdir(parents=True, exist_ok=True)
        digests = self.manifest()
        for name in selected:
            obj = self.build(name)
            self.path_for(name).write_text(dumps(obj) + "\n", encoding="utf-8")
            digests[name] = document_digest(obj)
            LOGGER.info("fixture %s written", name)
        manifest = {"schema": SCHEMA_VERSION, "kind": "corpus_manifest", "files": dict(sorted(digests.items()))}
        (self.corpus_dir / MANIFEST_NAME).write_text(json.dumps(manifest, ensure_ascii=True, indent=2), encoding="utf-8")
        return digests

    def manifest(self) -> dict[str, str]:
        path = self.corpus_dir / MANIFEST_NAME
        if not path.exists():
            return {}
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except Exception:
            return {}
        files = payload.get("files") if isinstance(payload, dict) else None
        return dict(files) if isinstance(files, dict) else {}

    def verify(self) -> list[CorpusCheck]:
        """Each listed file must re-serialize to itself and match its pinned digest."""
        out = []
        for name, digest in sorted(self.manifest().items()):
            path = self.path_for(name)
            if not path.exists():
                out.append(CorpusCheck(name, False, "missing"))
                continue
            text = path.read_text(encoding="utf-8").strip()
            try:
                obj = read_document(path)
            except SchemaError as exc:
                out.append(CorpusCheck(name, False, f"schema: {exc.code}"))
                continue
            if dumps(obj) != text:
                out.append(CorpusCheck(name, False, "round_trip"))
            elif document_digest(obj) != digest:
                out.append(CorpusCheck(name, False, "digest"))
            else:
                out.append(CorpusCheck(name, True))
        return out

    def matches_build(self, name: str) -> bool:
        path = self.path_for(name)
        if not path.exists():
            return False
        return canonical_json(json.loads(path.read_text(encoding="utf-8"))) == dumps(self.build(name))
