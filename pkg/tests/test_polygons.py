import os
import random
import unittest

from kanthurston.errors import PolygonError
from kanthurston.polygons import (
    K_BAD_ZERO_PATTERN,
    K_INCONSISTENT,
    K_NEGATIVE,
    K_NON_INTEGRAL,
    K_OK,
    K_UNDERDETERMINED,
    collar,
    collar_all,
    collar_all_iter,
    corner_cut_rectangle,
    corner_cut_search,
    curvature,
    curvatures,
    four_saddle_octagon,
    gauss_bonnet,
    insert_corner,
    is_cat0_polygon,
    rectangle,
    regular_right_pentagon,
    rotate,
    single_vertex_polygon,
    solve_k,
    subdivide_polygon,
)


SLOW = os.environ.get("KANTHURSTON_SLOW") == "1"


class SolveKTests(unittest.TestCase):
    def test_odd_sided_polygons_have_unique_solutions(self):
        self.assertEqual(solve_k((2, 2, 2, 2, 2)).k, (1, 1, 1, 1, 1))
        self.assertEqual(solve_k((2, 2, 2)).status, K_OK)
        solution = solve_k((4, 2, 2, 2, 2))
        self.assertEqual(solution.status, K_OK)
        self.assertEqual(solution.k, (2, 2, 2, 0, 0))

    def test_failure_statuses(self):
        self.assertEqual(solve_k((1, 1, 1)).status, K_NON_INTEGRAL)
        negative = solve_k((6, 2, 2, 2, 2))
        self.assertEqual(negative.status, K_NEGATIVE)
        self.assertEqual(negative.positions, (3, 4))
        zeros = solve_k((1, 1, 2, 1, 1, 2))
        self.assertEqual(zeros.status, K_BAD_ZERO_PATTERN)
        self.assertEqual(zeros.k, (0, 1, 1, 0, 1, 1))
        self.assertFalse(zeros.feasible)

    def test_multiple_of_four_sides(self):
        free = solve_k((2, 2, 2, 2))
        self.assertEqual(free.status, K_UNDERDETERMINED)
        self.assertEqual(free.k, (1, 1, 1, 1))
        self.assertTrue(free.feasible)
        self.assertEqual(solve_k((2, 1, 1, 2)).status, K_INCONSISTENT)

    def test_too_few_sides(self):
        with self.assertRaises(PolygonError):
            solve_k((3, 3))


class PolygonTests(unittest.TestCase):
    def test_rectangle(self):
        rect = rectangle(2, 3)
        self.assertEqual(rect.side_lengths, (2, 3, 2, 3))
        self.assertEqual(rect.square_count, 6)
        self.assertEqual(gauss_bonnet(rect), 0)
        self.assertEqual(rotate(rect, 1).side_lengths, (3, 2, 3, 2))

    def test_degrees_are_read_from_one_skeleton(self):
        rect = rectangle(2, 3)
        self.assertEqual([rect.degree(v) for v in rect.corner_vertices()], [2, 2, 2, 2])
        self.assertIs(rect.degrees, rect.degrees)
        self.assertEqual(sum(rect.degrees.values()), 2 * len(rect.carrier.cells_of_dim(1)))
        self.assertEqual(sorted(rect.degrees.values()).count(4), 2)

    def test_four_saddle_octagon_sides(self):
        octagon = four_saddle_octagon()
        self.assertEqual(octagon.side_lengths, (2, 2, 2, 2, 2, 2, 2, 4))
        self.assertEqual(octagon.square_count, 18)
        self.assertEqual(sum(curvatures(octagon).values()), -4)
        self.assertEqual(gauss_bonnet(octagon), -4)
        self.assertTrue(is_cat0_polygon(octagon)[0])

    def test_regular_right_pentagon(self):
        small = regular_right_pentagon(1)
        self.assertEqual(small.square_count, 5)
        self.assertEqual(small.side_lengths, (2,) * 5)
        self.assertEqual(regular_right_pentagon(2).square_count, 20)
        self.assertEqual(gauss_bonnet(small), -1)
        self.assertEqual(sorted(curvatures(small).values()).count(-1), 1)

    def test_triangle_is_positively_curved(self):
        triangle = single_vertex_polygon((2, 2, 2))
        ok, positive = is_cat0_polygon(triangle)
        self.assertFalse(ok)
        self.assertEqual(len(positive), 1)
        self.assertEqual(curvature(triangle, positive[0]), 1)

    def test_single_vertex_polygon_rejects_bad_lengths(self):
        with self.assertRaises(PolygonError) as ctx:
            single_vertex_polygon((1, 1, 1))
        self.assertEqual(ctx.exception.code, K_NON_INTEGRAL)

    def test_insert_corner_and_collar(self):
        rect = rectangle(2, 3)
        five = insert_corner(rect, 0, 1)
        self.assertEqual(five.side_lengths, (1, 1, 3, 2, 3))
        self.assertEqual(gauss_bonnet(five), -1)
        with self.assertRaises(PolygonError):
            insert_corner(rect, 0, 2)
        collared = collar(rect, 0)
        self.assertEqual(collared.square_count, 8)
        self.assertEqual(collared.side_lengths, (2, 4, 2, 4))
        gauss_bonnet(collared)

    def test_collar_every_side(self):
        once = collar_all(rectangle(1, 1))
        self.assertEqual(once.side_lengths, (3, 3, 3, 3))
        self.assertEqual(once.square_count, 9)
        twice = collar_all_iter(rectangle(1, 1), 2)
        self.assertEqual(twice.side_lengths, (5, 5, 5, 5))
        self.assertEqual(twice.square_count, 25)
        self.assertEqual(gauss_bonnet(twice), 0)

    def test_subdivision_doubles_sides(self):
        sub = subdivide_polygon(four_saddle_octagon())
        self.assertEqual(sub.side_lengths, (4, 4, 4, 4, 4, 4, 4, 8))
        self.assertEqual(sub.square_count, 72)
        self.assertTrue(is_cat0_polygon(sub)[0])

    def test_corner_cuts(self):
        with self.assertRaises(PolygonError) as ctx:
            corner_cut_rectangle(2, 2, (1, 1, 1))
        self.assertEqual(ctx.exception.code, "OUT_OF_RANGE")
        poly, offset, flipped = corner_cut_search(5, 4, (4, 2, 2, 2, 2, 2, 2, 2))
        self.assertEqual(sorted(poly.side_lengths), sorted((4, 2, 2, 2, 2, 2, 2, 2)))
        self.assertEqual(poly.square_count, 18)
        self.assertIn(flipped, (False, True))
        self.assertGreaterEqual(offset, 0)


class WorkedPolygonTests(unittest.TestCase):
    def test_pentagon_with_a_zero_rectangle(self):
        solution = solve_k((2, 2, 1, 2, 1))
        self.assertEqual(solution.status, K_OK)
        self.assertEqual(solution.k, (1, 1, 1, 1, 0))
        self.assertEqual(single_vertex_polygon((2, 2, 1, 2, 1)).square_count, 3)

    def test_corner_cut_l_shape(self):
        poly = corner_cut_rectangle(2, 2, (2, 2, 1, 2, 1))
        self.assertEqual(poly.square_count, 3)
        self.assertEqual(poly.side_lengths, (2, 2, 1, 2, 1))
        self.assertEqual(gauss_bonnet(poly), -1)

    def test_corner_cut_keeps_the_square_and_rejects_a_bow_tie(self):
        poly = corner_cut_rectangle(2, 2, (2, 1, 1, 2, 1, 1))
        self.assertEqual(poly.square_count, 4)
        with self.assertRaises(PolygonError) as ctx:
            corner_cut_rectangle(2, 2, (2, 1, 1, 2, 1, 1), 1)
        self.assertEqual(ctx.exception.code, "OVERLAP")

    def test_octagon_has_four_saddle_vertices(self):
        negative = [c for c in curvatures(four_saddle_octagon()).values() if c < 0]
        self.assertEqual(negative, [-1] * 4)


class GaussBonnetPropertyTests(unittest.TestCase):
    TRIALS = 1000 if SLOW else 250
    STARTS = ((2, 2, 2), (2, 2, 2, 2, 2), (2, 2, 1, 2, 1), (4, 4, 4, 4, 4))

    def _random_polygon(self, rng: random.Random):
        kind = rng.choice(("rectangle", "single_vertex", "corner_cut"))
        if kind == "rectangle":
            s = rectangle(rng.randint(1, 3), rng.randint(1, 3))
        elif kind == "single_vertex":
            s = single_vertex_polygon(rng.choice(self.STARTS))
        else:
            s = corner_cut_rectangle(5, 4, (2, 2, 2, 2, 2, 2, 2, 4))
        subdivided = False
        for _ in range(rng.randint(0, 4)):
            op = rng.choice(("corner", "collar", "subdivide"))
            if op == "corner":
                sides = [i for i, length in enumerate(s.side_lengths) if length >= 2]
                if sides:
                    i = rng.choice(sides)
                    s = insert_corner(s, i, rng.randint(1, s.side_lengths[i] - 1))
            elif op == "collar":
                s = collar(s, rng.randrange(s.n))
            elif not subdivided:
                s = subdivide_polygon(s)
                subdivided = True
        return s

    def test_total_curvature_is_four_minus_n(self):
        rng = random.Random(20240611)
        for trial in range(self.TRIALS):
            s = self._random_polygon(rng)
            with self.subTest(trial=trial, sides=s.side_lengths):
                self.assertEqual(sum(curvatures(s).values()), 4 - s.n)
                self.assertEqual(gauss_bonnet(s), 4 - s.n)


if __name__ == "__main__":
    unittest.main()
