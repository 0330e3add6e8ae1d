import os
import unittest

from kanthurston.complexes import barycentric_subdivision, compose_maps, identity_map, standard_cube
from kanthurston.complexes.maps import CellularMap, Involution
from kanthurston.complexes.simplicial import DeltaComplex
from kanthurston.complexes.standard import cycle, delta_boundary, delta_simplex, dunce_hat
from kanthurston.errors import ComplexError, KitError, MapError
from kanthurston.homology import complex_homology, is_acyclic
from kanthurston.kan_thurston import (
    JOURNEY,
    CellLabel,
    DeltaMap,
    compose_delta_maps,
    convexity_check,
    cube_kit,
    dimension_law,
    filtration_check,
    identity_delta_map,
    kt_build,
    kt_fixed,
    kt_map,
    kt_quotient,
    load_kit,
    mapping_cylinder,
    mapping_torus,
    mock_kit,
    t_prime_build,
    validate_kit,
    _KtBuilder,
)


SLOW = os.environ.get("KANTHURSTON_SLOW") == "1"


class KitTests(unittest.TestCase):
    def test_mock_kit_is_a_point_with_the_constant_loop(self):
        kit = mock_kit()
        report = validate_kit(kit)
        self.assertTrue(report.passed)
        self.assertEqual(report.dims, (0, 0))
        self.assertEqual(kit.j, ())
        self.assertEqual(kit.loop_vertices(), (kit.a0,) * JOURNEY)

    def test_cube_kit_is_valid(self):
        kit = load_kit("cube")
        report = validate_kit(kit)
        self.assertTrue(report.passed)
        self.assertEqual(report.dims, (2, 3))
        self.assertEqual(len(kit.j), JOURNEY)
        self.assertIn(kit.a0, kit.a_cells)

    def test_unknown_kit(self):
        with self.assertRaises(KitError) as ctx:
            load_kit("unknown")
        self.assertEqual(ctx.exception.code, "unknown_kit")

    @unittest.skipUnless(SLOW, "set KANTHURSTON_SLOW=1 to build the genuine kit")
    def test_genuine_kit(self):
        kit = load_kit("genuine")
        report = validate_kit(kit)
        self.assertTrue(report.passed)
        self.assertEqual(report.dims, (2, 3))


class KtBuildTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.kit = cube_kit()

    def test_small_complexes_keep_their_homology(self):
        for name, x in (
            ("point", delta_simplex(0)),
            ("edge", delta_simplex(1)),
            ("circle", delta_boundary(2)),
            ("triangle", delta_simplex(2)),
            ("sphere", delta_boundary(3)),
        ):
            with self.subTest(name=name):
                r = kt_build(self.kit, x)
                report = filtration_check(r)
                self.assertTrue(report.homology_match)
                self.assertTrue(report.passed, report.to_dict())

    def test_low_skeleton_subdivides_edges(self):
        r = kt_build(self.kit, delta_simplex(1))
        self.assertEqual(r.T.cell_counts(), (JOURNEY + 1, JOURNEY))
        self.assertEqual(r.owners.count(2), 2 * JOURNEY - 1)
        self.assertIsNone(r.U)

    def test_dimension_law(self):
        point = kt_build(self.kit, delta_simplex(0), with_u=True)
        self.assertTrue(dimension_law(point)["ok"])
        edge = kt_build(self.kit, delta_simplex(1), with_u=True, verify=True)
        law = dimension_law(edge)
        self.assertTrue(law["ok"])
        self.assertEqual(law["dim_u"], 3)
        triangle = kt_build(self.kit, delta_simplex(2), with_u=True, verify=True)
        self.assertEqual(dimension_law(triangle)["dim_t"], 3)

    def test_rejects_complexes_outside_the_category(self):
        with self.assertRaises(ComplexError) as ctx:
            kt_build(self.kit, dunce_hat())
        self.assertEqual(ctx.exception.code, "not_in_category")

    def test_labels_locate_subcomplexes(self):
        r = kt_build(self.kit, delta_simplex(2))
        report = filtration_check(r, fixed=False, quotient=False, subcomplexes=[(3,), (4, 5)], kit=self.kit)
        self.assertTrue(all(e["ok"] for e in report.extra))
        with self.assertRaises(KitError):
            filtration_check(r, subcomplexes=[(3,)])

    def test_fixed_set_and_quotient_of_the_cube_kit(self):
        r = kt_build(self.kit, delta_boundary(2))
        self.assertEqual(kt_fixed(r).cell_counts(), r.T.cell_counts())
        self.assertEqual(kt_quotient(r).cell_counts(), r.T.cell_counts())

    def test_whole_complex_is_convex(self):
        r = kt_build(self.kit, delta_simplex(2))
        (whole,) = convexity_check(r, [range(len(r.x.dims))])
        self.assertEqual(whole["simplices"], list(range(len(r.x.dims))))
        self.assertTrue(whole["convex"])

    def test_telescope_has_the_same_homology(self):
        circle = delta_boundary(2)
        telescope = t_prime_build(self.kit, circle)
        self.assertEqual(complex_homology(telescope).signature(), ((1, ()), (1, ())))
        edge = t_prime_build(self.kit, delta_simplex(1))
        self.assertEqual(complex_homology(edge).signature(), ((1, ()),))


class MockKitTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.kit = mock_kit()

    def test_barycentric_circle_has_circle_homology(self):
        x = barycentric_subdivision(delta_boundary(2))
        r = kt_build(self.kit, x)
        self.assertEqual(r.T.cell_counts(), (24, 24))
        self.assertEqual(complex_homology(r.T).signature(), ((1, ()), (1, ())))

    def test_triangle_is_a_cone(self):
        r = kt_build(self.kit, delta_simplex(2), with_u=True, verify=True)
        self.assertEqual(r.T.cell_counts(), (49, 96, 48))
        self.assertTrue(is_acyclic(r.T))
        self.assertEqual(r.U.cell_counts(), (1,))
        law = dimension_law(r)
        self.assertTrue(law["ok"], law)
        self.assertEqual((law["dim_t"], law["dim_u"]), (2, 0))

    def test_small_complexes_keep_their_homology(self):
        for name, x in (
            ("point", delta_simplex(0)),
            ("edge", delta_simplex(1)),
            ("circle", delta_boundary(2)),
            ("triangle", delta_simplex(2)),
            ("sphere", delta_boundary(3)),
        ):
            with self.subTest(name=name):
                report = filtration_check(kt_build(self.kit, x))
                self.assertTrue(report.passed, report.to_dict())

    def test_collapsed_cones_are_left_out_of_links(self):
        r = kt_build(self.kit, delta_simplex(2))
        self.assertEqual(len(r.T.collapsed_cells()), 12)
        (whole,) = convexity_check(r, [range(len(r.x.dims))])
        self.assertTrue(whole["convex"])

    def test_builder_indexes_cells_by_label(self):
        builder = _KtBuilder(self.kit, delta_simplex(1), with_u=False)
        builder.low_skeleton()
        self.assertEqual(len(builder.t_index), len(builder.t_labels))
        self.assertEqual(builder.t_index_of(CellLabel(1, "v")), 1)
        self.assertEqual(builder.t_index_of(CellLabel(2, "mid", (1,))), 2)
        self.assertEqual(builder.t_index_of(CellLabel(2, "seg", (0,))), 2 + JOURNEY - 1)
        with self.assertRaises(ComplexError) as ctx:
            builder.t_index_of(CellLabel(5, "v"))
        self.assertEqual(ctx.exception.code, "unknown_cell")


class KtMapTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.kit = mock_kit()
        cls.point = delta_simplex(0)
        cls.edge = delta_simplex(1)
        cls.triangle = delta_simplex(2)
        cls.t_point = kt_build(cls.kit, cls.point)
        cls.t_edge = kt_build(cls.kit, cls.edge)
        cls.t_triangle = kt_build(cls.kit, cls.triangle)

    def test_identity_goes_to_identity(self):
        f = kt_map(identity_delta_map(self.triangle), self.t_triangle, self.t_triangle)
        self.assertEqual(f.images, identity_map(self.t_triangle.T).images)

    def test_inclusion_and_functoriality(self):
        f = DeltaMap(self.point, self.edge, {0: 1})
        g = DeltaMap(self.edge, self.triangle, {0: 0, 1: 1, 2: 3})
        tf = kt_map(f, self.t_point, self.t_edge)
        tg = kt_map(g, self.t_edge, self.t_triangle)
        tgf = kt_map(compose_delta_maps(g, f), self.t_point, self.t_triangle)
        self.assertEqual(tgf.images, compose_maps(tg, tf).images)
        self.assertEqual(len(set(cell for cell, _g in tg.images.values())), len(self.t_edge.T))

    def test_results_must_match_the_map(self):
        g = DeltaMap(self.edge, self.triangle, {0: 0, 1: 1, 2: 3})
        with self.assertRaises(MapError) as ctx:
            kt_map(g, self.t_point, self.t_triangle)
        self.assertEqual(ctx.exception.code, "mismatch")

    def test_delta_map_checks(self):
        with self.assertRaises(MapError) as ctx:
            DeltaMap(self.edge, self.triangle, {0: 0, 1: 1}).check()
        self.assertEqual(ctx.exception.code, "not_total")
        with self.assertRaises(MapError) as ctx:
            DeltaMap(self.edge, self.triangle, {0: 0, 1: 1, 2: 6}).check()
        self.assertEqual(ctx.exception.code, "dimension")
        loop = DeltaComplex((0, 1), ((), (0, 0)))
        with self.assertRaises(MapError) as ctx:
            DeltaMap(self.edge, loop, {0: 0, 1: 0, 2: 1}).check()
        self.assertEqual(ctx.exception.code, "not_injective_on_simplex")


class CylinderTests(unittest.TestCase):
    def test_mapping_cylinder_of_the_identity(self):
        edge = standard_cube(1)
        cyl = mapping_cylinder(identity_map(edge), 2)
        self.assertEqual(cyl.complex.cell_counts(), (6, 7, 2))
        self.assertEqual(len(cyl.base_cells()), len(edge))
        with self.assertRaises(MapError):
            mapping_cylinder(identity_map(edge), 0)

    def test_mapping_cylinder_of_a_constant_map_is_a_cone(self):
        circle = cycle(4)
        point = standard_cube(0)
        constant = CellularMap(circle, point, {x: (0, ()) for x in range(len(circle))})
        cyl = mapping_cylinder(constant, 4)
        cyl.complex.validate()
        self.assertEqual(cyl.complex.cell_counts(), (17, 32, 16))
        self.assertTrue(is_acyclic(cyl.complex))
        self.assertEqual(len(set(cyl.base_cells())), len(circle))
        for t in range(len(circle)):
            self.assertEqual(cyl.level(t, 4)[0], 0)
        self.assertEqual(len(cyl.complex.collapsed_cells()), 4)

    def test_mapping_cylinder_rejects_a_map_raising_dimension(self):
        edge = standard_cube(1)
        point = standard_cube(0)
        up = CellularMap(point, edge, {0: (2, (1,))})
        with self.assertRaises(MapError) as ctx:
            mapping_cylinder(up, 2)
        self.assertEqual(ctx.exception.code, "dimension")

    def test_mapping_torus_of_a_point(self):
        point = standard_cube(0)
        flip = Involution(point, point, identity_map(point).images)
        torus = mapping_torus(flip, 4)
        self.assertEqual(torus.complex.cell_counts(), (8, 8))
        self.assertIsNotNone(torus.tau)
        self.assertEqual(complex_homology(torus.complex).betti, (1, 1))


if __name__ == "__main__":
    unittest.main()
