import unittest

from kanthurston.complexes import (
    CubeComplex,
    CubeComplexBuilder,
    SimplicialComplex,
    check_cellular_map,
    check_involution,
    compose_maps,
    cubical_subdivision,
    cubicality_check,
    disjoint_union,
    extract,
    category_c_check,
    fixed_subcomplex,
    glue,
    grid,
    gromov_check,
    identify,
    identity_map,
    interval,
    is_combinatorially_convex,
    is_flag,
    is_full_subcomplex,
    is_isomorphic,
    product,
    quotient_by_involution,
    standard_cube,
    vertex_link,
)
from kanthurston.complexes.cube import sym_compose, sym_det, sym_inverse, sym_through, transport
from kanthurston.complexes.maps import CellularMap, fixed_cells
from kanthurston.complexes.standard import (
    cycle,
    delta_simplex,
    dunce_hat,
    edge_swap,
    one_square_mobius,
    one_square_sphere,
    one_square_torus,
    square_rotation,
)
from kanthurston.errors import ComplexError, MapError


class SymmetryTests(unittest.TestCase):
    def test_inverse_and_determinant(self):
        s = (-2, 3, 1)
        self.assertEqual(sym_compose(s, sym_inverse(s)), (1, 2, 3))
        self.assertEqual(sym_det((1, 2)), 1)
        self.assertEqual(sym_det((2, 1)), -1)
        self.assertEqual(sym_det((-1, -2)), 1)

    def test_projection_factors_through_a_wider_frame(self):
        self.assertEqual(sym_through((2,), (2, 1)), (1,))
        self.assertEqual(sym_through((-1, 3), (3, -1)), (2, 1))
        self.assertIsNone(sym_through((1,), (2,)))

    def test_transport_moves_a_face_slot(self):
        i, eps, r = transport((2, 1), 1, -1)
        self.assertEqual((i, eps, r), (2, -1, (1,)))


class CubeComplexTests(unittest.TestCase):
    def test_standard_cubes(self):
        self.assertEqual(standard_cube(0).cell_counts(), (1,))
        self.assertEqual(standard_cube(2).cell_counts(), (4, 4, 1))
        self.assertEqual(standard_cube(3).cell_counts(), (8, 12, 6, 1))
        for n in range(4):
            standard_cube(n).validate()
            self.assertEqual(standard_cube(n).euler_characteristic(), 1)

    def test_corners_follow_code_order(self):
        square = standard_cube(2)
        self.assertEqual(square.corners(8), (0, 1, 3, 4))

    def test_product_and_grid(self):
        g = grid(2, 3)
        g.validate()
        self.assertEqual(g.cell_counts(), (12, 17, 6))
        self.assertTrue(is_isomorphic(product(interval(1), interval(1)), standard_cube(2)))
        self.assertFalse(is_isomorphic(grid(1, 2), standard_cube(2)))

    def test_named_complexes(self):
        self.assertEqual(one_square_torus().cell_counts(), (1, 2, 1))
        self.assertEqual(one_square_sphere().euler_characteristic(), 2)
        self.assertEqual(one_square_mobius().euler_characteristic(), 0)
        self.assertEqual(cycle(5).euler_characteristic(), 0)

    def test_validate_rejects_broken_tables(self):
        with self.assertRaises(ComplexError) as ctx:
            CubeComplex(dims=(0, 1), faces=((), ((0, ()),))).validate()
        self.assertEqual(ctx.exception.code, "malformed")
        builder = CubeComplexBuilder()
        v = builder.add_vertex()
        with self.assertRaises(ComplexError) as ctx:
            builder.add_square((v, ()), (v, ()), (v, ()), (v, ()))
        self.assertEqual(ctx.exception.code, "face_dimension")

    def test_identify_closes_an_interval_into_a_loop(self):
        loop, qmap = identify(interval(1), [(0, 1, ())])
        self.assertEqual(loop.cell_counts(), (1, 1))
        self.assertEqual(qmap[1], (0, ()))
        self.assertEqual(qmap[2][0], 1)

    def test_identify_collapses_an_edge_onto_a_vertex(self):
        point, qmap = identify(interval(1), [(2, 0, ())])
        self.assertEqual(point.cell_counts(), (1,))
        self.assertEqual(qmap, ((0, ()), (0, ()), (0, ())))

    def test_identify_rejects_mixed_dimensions(self):
        with self.assertRaises(ComplexError) as ctx:
            identify(interval(1), [(0, 2, ())])
        self.assertEqual(ctx.exception.code, "dimension_mismatch")

    def test_disjoint_union_and_extract(self):
        union, offsets = disjoint_union(standard_cube(2), interval(2))
        self.assertEqual(offsets, (0, 9))
        self.assertEqual(len(union), 14)
        sub, parents = extract(union, union.closure((12,)))
        self.assertEqual(sub.cell_counts(), (2, 1))
        self.assertEqual(parents, (9, 10, 12))
        with self.assertRaises(ComplexError):
            extract(union, (8,))

    def test_glue_two_intervals_at_a_vertex(self):
        edge = interval(1)
        pushout = glue(edge, edge, CellularMap(edge, edge, {1: (0, ())}))
        self.assertEqual(pushout.complex.cell_counts(), (3, 2))
        self.assertEqual(pushout.maps[0][1][0], pushout.maps[1][0][0])
        with self.assertRaises(ComplexError) as ctx:
            glue(edge, edge, CellularMap(edge, edge, {0: (0, ()), 1: (0, ())}))
        self.assertEqual(ctx.exception.code, "not_injective")

    def test_cubical_subdivision_counts(self):
        sub, index = cubical_subdivision(standard_cube(2))
        sub.validate()
        self.assertEqual(sub.cell_counts(), (9, 12, 4))
        self.assertEqual(sub.dims[index[(8, (0, 0))]], 0)
        torus, _index = cubical_subdivision(one_square_torus())
        self.assertEqual(torus.cell_counts(), (4, 8, 4))


class LinkTests(unittest.TestCase):
    def test_torus_is_locally_cat0_but_not_cubical(self):
        torus = one_square_torus()
        link = vertex_link(torus, 0)
        self.assertEqual(len(link.vertices), 4)
        self.assertEqual(sum(1 for s in link.simplices if len(s) == 2), 4)
        self.assertTrue(gromov_check(torus).passed)
        self.assertFalse(cubicality_check(torus).cubes_embed)

    def test_torus_becomes_cubical_after_two_subdivisions(self):
        first, _index = cubical_subdivision(one_square_torus())
        second, _index = cubical_subdivision(first)
        reports = [cubicality_check(c) for c in (one_square_torus(), first, second)]
        self.assertEqual([r.cubical for r in reports], [False, False, True])
        self.assertTrue(reports[1].cubes_embed)
        self.assertFalse(reports[1].intersections_are_faces)

    def test_folded_sphere_fails_the_link_condition(self):
        report = gromov_check(one_square_sphere())
        self.assertFalse(report.passed)
        self.assertFalse(cubicality_check(one_square_sphere()).links_simplicial)

    def test_cubes_and_grids_are_cubical(self):
        for c in (standard_cube(3), grid(2, 2)):
            self.assertTrue(cubicality_check(c).cubical)
            self.assertTrue(gromov_check(c).passed)

    def test_link_of_cube_corner_is_a_simplex(self):
        link = vertex_link(standard_cube(3), 0)
        self.assertEqual(link.dimension, 2)
        self.assertEqual(len(link.vertices), 3)

    def test_combinatorial_convexity_in_a_grid(self):
        square = product(interval(2), interval(2))
        bottom_row = {0, 5, 10, 15, 20}
        self.assertTrue(is_combinatorially_convex(square, bottom_row))
        corner_path = {0, 5, 6, 15, 8}
        self.assertFalse(is_combinatorially_convex(square, corner_path))
        self.assertFalse(is_combinatorially_convex(square, {0, 10}))
        with self.assertRaises(ComplexError):
            is_combinatorially_convex(square, {15})


class SimplicialTests(unittest.TestCase):
    def test_flag_condition(self):
        hollow = SimplicialComplex.from_facets([(1, 2), (2, 3), (1, 3)])
        report = is_flag(hollow)
        self.assertFalse(report.flag)
        self.assertEqual(report.witness, (1, 2, 3))
        self.assertTrue(is_flag(SimplicialComplex.from_facets([(1, 2, 3)])).flag)

    def test_full_subcomplexes(self):
        solid = SimplicialComplex.from_facets([(1, 2, 3)])
        hollow = SimplicialComplex.from_facets([(1, 2), (2, 3), (1, 3)])
        self.assertFalse(is_full_subcomplex(hollow, solid))
        self.assertTrue(is_full_subcomplex(SimplicialComplex.from_facets([(1, 2)]), solid))
        with self.assertRaises(ComplexError):
            is_full_subcomplex(SimplicialComplex.from_facets([(1, 4)]), solid)

    def test_edges_of_each_simplex_are_distinct(self):
        self.assertTrue(category_c_check(delta_simplex(2)))
        self.assertFalse(category_c_check(dunce_hat()))


class MapTests(unittest.TestCase):
    def test_identity_and_composition(self):
        cube = standard_cube(2)
        ident = identity_map(cube)
        check_cellular_map(ident)
        self.assertEqual(compose_maps(ident, ident).images, ident.images)

    def test_square_rotation_is_an_involution(self):
        tau = square_rotation()
        check_involution(tau)
        self.assertEqual(tau.images[0][0], 4)
        with self.assertRaises(ComplexError) as ctx:
            fixed_cells(tau.source, tau)
        self.assertEqual(ctx.exception.code, "SETWISE_NOT_POINTWISE")

    def test_edge_swap_quotient_and_fixed_set(self):
        tau = edge_swap()
        with self.assertRaises(ComplexError):
            fixed_subcomplex(tau.source, tau)
        identity = identity_map(standard_cube(1))
        quotient, _qmap = quotient_by_involution(identity.source, identity)
        self.assertEqual(quotient.cell_counts(), (2, 1))

    def test_coordinate_projection_is_cellular(self):
        square = standard_cube(2)
        edge = standard_cube(1)
        first = {a * 3 + b: (a, (1,) if a == 2 else ()) for a in range(3) for b in range(3)}
        check_cellular_map(CellularMap(square, edge, first))
        wrong = dict(first)
        wrong[8] = (2, (2,))
        with self.assertRaises(MapError) as ctx:
            check_cellular_map(CellularMap(square, edge, wrong))
        self.assertEqual(ctx.exception.code, "not_cellular")

    def test_bad_map_is_rejected(self):
        edge = interval(1)
        broken = CellularMap(edge, edge, {0: (0, ()), 1: (0, ()), 2: (2, (1,))})
        with self.assertRaises(MapError) as ctx:
            check_cellular_map(broken)
        self.assertEqual(ctx.exception.code, "not_cellular")


if __name__ == "__main__":
    unittest.main()
