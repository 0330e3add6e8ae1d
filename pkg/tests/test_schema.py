import json
import tempfile
import unittest
from pathlib import Path

from kanthurston.complexes import standard_cube
from kanthurston.complexes.standard import delta_boundary, delta_simplex, square_rotation
from kanthurston.errors import SchemaError
from kanthurston.kan_thurston import DeltaMap, mock_kit, validate_kit
from kanthurston.polygons import rectangle
from kanthurston.presentation_complexes import y_n_presentation
from kanthurston.schema import (
    document_digest,
    dumps,
    from_document,
    read_document,
    to_document,
    write_document,
)
from kanthurston.utils import SCHEMA_VERSION


class DocumentTests(unittest.TestCase):
    def test_cube_complex(self):
        cube = standard_cube(3)
        doc = to_document(cube)
        self.assertEqual(doc["schema"], SCHEMA_VERSION)
        self.assertEqual(doc["kind"], "cube_complex")
        back = from_document(json.loads(dumps(cube)))
        self.assertEqual(back.dims, cube.dims)
        self.assertEqual(back.faces, cube.faces)
        self.assertEqual(document_digest(back), document_digest(cube))

    def test_involution_keeps_its_kind(self):
        tau = square_rotation()
        back = from_document(to_document(tau))
        self.assertEqual(type(back).__name__, "Involution")
        self.assertEqual(back.images, tau.images)

    def test_presentation_and_polygon(self):
        p = y_n_presentation(5)
        self.assertEqual(from_document(to_document(p)), p)
        rect = rectangle(2, 3)
        back = from_document(to_document(rect))
        self.assertEqual(back.side_lengths, (2, 3, 2, 3))
        self.assertEqual(back.coords, rect.coords)

    def test_delta_map_and_kit(self):
        f = DeltaMap(delta_simplex(1), delta_simplex(2), {0: 0, 1: 1, 2: 3})
        back = from_document(to_document(f))
        self.assertEqual(back.images, f.images)
        back.check()
        kit = from_document(to_document(mock_kit()))
        self.assertTrue(validate_kit(kit).passed)

    def test_malformed_documents(self):
        cases = (
            ({"schema": "other/1", "kind": "cube_complex"}, "bad_schema"),
            ({"schema": SCHEMA_VERSION, "kind": "teapot"}, "unknown_kind"),
            ({"schema": SCHEMA_VERSION, "kind": "cube_complex", "dims": [0]}, "missing_key"),
            ({"schema": SCHEMA_VERSION, "kind": "cube_complex", "dims": [0, 1], "faces": [[], [[0, []]]]}, "malformed"),
            ({"schema": SCHEMA_VERSION, "kind": "presentation", "generators": 1, "relators": [[2]]}, "bad_letter"),
        )
        for payload, code in cases:
            with self.subTest(code=code):
                with self.assertRaises(SchemaError) as ctx:
                    from_document(payload)
                self.assertEqual(ctx.exception.code, code)
        with self.assertRaises(SchemaError) as ctx:
            to_document(object())
        self.assertEqual(ctx.exception.code, "unsupported_kind")


class FileTests(unittest.TestCase):
    def test_write_and_read(self):
        with tempfile.TemporaryDirectory() as td:
            path = Path(td) / "nested" / "sphere.json"
            sphere = delta_boundary(3)
            digest = write_document(path, sphere)
            self.assertEqual(digest, document_digest(sphere))
            back = read_document(path)
            self.assertEqual(back.cell_counts(), (4, 6, 4))

    def test_read_errors(self):
        with tempfile.TemporaryDirectory() as td:
            with self.assertRaises(SchemaError) as ctx:
                read_document(Path(td) / "missing.json")
            self.assertEqual(ctx.exception.code, "missing_file")
            bad = Path(td) / "bad.json"
            bad.write_text("{not json", encoding="utf-8")
            with self.assertRaises(SchemaError) as ctx:
                read_document(bad)
            self.assertEqual(ctx.exception.code, "bad_json")


if __name__ == "__main__":
    unittest.main()
