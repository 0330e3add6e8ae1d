import random
import unittest

from kanthurston.cat0 import (
    ascending_chain_check,
    convex_hull,
    fixed_point,
    halfspaces,
    hyperplanes,
    separating_pairs,
    skeleton_distance,
)
from kanthurston.complexes import disjoint_union, grid, identity_map, interval, product, standard_cube
from kanthurston.complexes.maps import CellularMap
from kanthurston.complexes.standard import edge_swap, one_square_torus, square_rotation, tree
from kanthurston.errors import ComplexError, FixedPointError, HalfspaceError


class HyperplaneTests(unittest.TestCase):
    def test_cube_has_one_pair_per_direction(self):
        cube = standard_cube(3)
        decomposition = hyperplanes(cube)
        self.assertEqual(len(decomposition.pairs), 3)
        for pair in decomposition.pairs:
            first, second = halfspaces(cube, pair, decomposition)
            self.assertEqual((len(first), len(second)), (4, 4))
            self.assertEqual(len(decomposition.edges_of(pair)), 4)

    def test_torus_is_rejected(self):
        with self.assertRaises(HalfspaceError) as ctx:
            hyperplanes(one_square_torus())
        self.assertEqual(ctx.exception.code, "PRECONDITION")

    def test_separating_pairs_measure_distance(self):
        g = grid(2, 3)
        self.assertEqual(skeleton_distance(g, 0, 17), 5)
        self.assertEqual(separating_pairs(g, 0, 17), 5)
        self.assertEqual(separating_pairs(g, 0, 0), 0)

    def test_distance_needs_a_connected_complex(self):
        two_points, _offsets = disjoint_union(standard_cube(0), standard_cube(0))
        with self.assertRaises(ComplexError) as ctx:
            skeleton_distance(two_points, 0, 1)
        self.assertEqual(ctx.exception.code, "disconnected")


class ConvexHullTests(unittest.TestCase):
    def test_opposite_corners_span_the_cube(self):
        cube = standard_cube(3)
        corners = cube.corners(len(cube) - 1)
        self.assertEqual(convex_hull(cube, (corners[0], corners[-1])), frozenset(range(len(cube))))

    def test_single_vertex(self):
        cube = standard_cube(3)
        v = cube.vertices()[0]
        self.assertEqual(convex_hull(cube, (v,)), frozenset({v}))

    def test_empty_input(self):
        with self.assertRaises(HalfspaceError) as ctx:
            convex_hull(standard_cube(2), ())
        self.assertEqual(ctx.exception.code, "empty_input")


def _pieces():
    return (interval(1), interval(2), tree(2, 1), tree(3, 1), tree(2, 2))


class HyperplanePropertyTests(unittest.TestCase):
    def _samples(self):
        samples = [standard_cube(n) for n in range(5)]
        samples += [grid(2, 3), grid(3, 3), tree(2, 2), tree(3, 2)]
        rng = random.Random(11)
        for _ in range(20):
            a, b = rng.choice(_pieces()), rng.choice(_pieces())
            samples.append(product(a, b))
        return samples

    def test_separating_pairs_equal_distance(self):
        for index, c in enumerate(self._samples()):
            decomposition = hyperplanes(c)
            vertices = c.vertices()
            with self.subTest(sample=index):
                for v in vertices:
                    for w in vertices:
                        self.assertEqual(separating_pairs(c, v, w, decomposition), skeleton_distance(c, v, w))
                self.assertEqual(len({decomposition.membership(v) for v in vertices}), len(vertices))

    def test_hulls_are_convex(self):
        rng = random.Random(5)
        for index, c in enumerate(self._samples()[:10]):
            decomposition = hyperplanes(c)
            vertices = c.vertices()
            picks = rng.sample(vertices, min(2, len(vertices)))
            hull = convex_hull(c, picks, decomposition)
            with self.subTest(sample=index, picks=picks):
                self.assertTrue(set(picks) <= hull)
                self.assertEqual(convex_hull(c, hull, decomposition), hull)
                inside = [v for v in vertices if v in hull]
                for a in inside:
                    for b in inside:
                        self.assertTrue(convex_hull(c, (a, b), decomposition) <= hull)


class FixedPointTests(unittest.TestCase):
    def test_half_turn_fixes_the_square(self):
        tau = square_rotation()
        self.assertEqual(fixed_point(tau.source, [tau]), len(tau.source) - 1)

    def test_identity_fixes_a_vertex(self):
        cube = standard_cube(2)
        self.assertEqual(fixed_point(cube, [identity_map(cube)]), cube.vertices()[0])

    def test_edge_swap_fixes_the_edge(self):
        tau = edge_swap()
        self.assertEqual(fixed_point(tau.source, [tau]), 2)

    def test_rejects_partial_maps(self):
        edge = interval(1)
        partial = CellularMap(edge, edge, {0: (0, ()), 1: (0, ())})
        with self.assertRaises(FixedPointError) as ctx:
            fixed_point(edge, [partial])
        self.assertEqual(ctx.exception.code, "not_automorphism")

    def test_ascending_chains(self):
        self.assertTrue(ascending_chain_check(standard_cube(3)))
        self.assertTrue(ascending_chain_check(grid(2, 2)))


if __name__ == "__main__":
    unittest.main()
