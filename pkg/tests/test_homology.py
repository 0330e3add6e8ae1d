import math
import os
import random
import unittest
from itertools import combinations

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_smith

from kanthurston.complexes import barycentric_subdivision, cubical_subdivision, identify, standard_cube
from kanthurston.complexes.standard import (
    delta_boundary,
    delta_simplex,
    dunce_hat,
    one_square_mobius,
    one_square_sphere,
    one_square_torus,
    two_triangle_torus,
)
from kanthurston.homology import (
    ChainComplex,
    chain_complex,
    complex_homology,
    exponent_matrix,
    homology,
    is_acyclic,
    presentation_h1_h2,
    rational_betti,
    reduced_homology,
    relative_homology,
    smith_normal_form,
    trivializing_reduction_check,
)
from kanthurston.words import Presentation


SLOW = os.environ.get("KANTHURSTON_SLOW") == "1"


def _sympy_factors(rows):
    diagonal = sympy_smith(Matrix(rows), domain=ZZ)
    return tuple(sorted(abs(int(diagonal[k, k])) for k in range(min(diagonal.shape)) if diagonal[k, k] != 0))


def _determinant(rows):
    if not rows:
        return 1
    return sum(
        (-1) ** j * rows[0][j] * _determinant([r[:j] + r[j + 1 :] for r in rows[1:]])
        for j in range(len(rows))
        if rows[0][j]
    )


def _minor_factors(m):
    """Invariant factors as quotients of the gcds of k x k minors."""
    rows, cols = len(m), len(m[0])
    divisors = [1]
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for picked_rows in combinations(range(rows), k):
            for picked_cols in combinations(range(cols), k):
                g = math.gcd(g, _determinant([[m[i][j] for j in picked_cols] for i in picked_rows]))
        if g == 0:
            break
        divisors.append(g)
    return tuple(b // a for a, b in zip(divisors, divisors[1:]))


class SmithNormalFormTests(unittest.TestCase):
    MATRIX_COUNT = 10_000 if SLOW else 1_000
    MATRICES = (
        [[2, 4, 4], [-6, 6, 12], [10, -4, -16]],
        [[1, 2], [3, 4]],
        [[0, 0], [0, 0]],
        [[6, 0], [0, 4]],
        [[2, 0, 0], [0, 3, 0], [0, 0, 0]],
        [[1, -1, 0], [0, 1, -1], [-1, 0, 1]],
    )

    def test_invariant_factors_match_sympy(self):
        for rows in self.MATRICES:
            with self.subTest(rows=rows):
                ours = smith_normal_form(rows).factors
                self.assertEqual(tuple(sorted(ours)), _sympy_factors(rows))
                for a, b in zip(ours, ours[1:]):
                    self.assertEqual(b % a, 0)

    def test_transforms_diagonalize(self):
        rows = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
        result = smith_normal_form(rows, transforms=True)
        product = Matrix(result.left) * Matrix(rows) * Matrix(result.right)
        for i in range(3):
            for j in range(3):
                if i != j:
                    self.assertEqual(product[i, j], 0)
        self.assertEqual(tuple(product[k, k] for k in range(3)), result.factors)

    def test_factors_match_determinantal_divisors(self):
        rng = random.Random(11)
        for trial in range(self.MATRIX_COUNT):
            rows, cols = rng.randint(1, 4), rng.randint(1, 4)
            m = [[rng.randint(-5, 5) for _ in range(cols)] for _ in range(rows)]
            with self.subTest(trial=trial, rows=m):
                self.assertEqual(smith_normal_form(m).factors, _minor_factors(m))

    def test_random_matrices(self):
        rng = random.Random(7)
        for trial in range(300):
            rows, cols = rng.randint(1, 4), rng.randint(1, 4)
            m = [[rng.randint(-4, 4) for _ in range(cols)] for _ in range(rows)]
            result = smith_normal_form(m, transforms=True)
            product = Matrix(result.left) * Matrix(m) * Matrix(result.right)
            with self.subTest(trial=trial, rows=m):
                for i in range(rows):
                    for j in range(cols):
                        expected = result.factors[i] if i == j and i < result.rank else 0
                        self.assertEqual(product[i, j], expected)
                for a, b in zip(result.factors, result.factors[1:]):
                    self.assertEqual(b % a, 0)
                self.assertEqual(result.rank, Matrix(m).rank())
                self.assertEqual(abs(Matrix(result.left).det()), 1)
                self.assertEqual(abs(Matrix(result.right).det()), 1)
                if rows == cols:
                    full = math.prod(result.factors) if result.rank == rows else 0
                    self.assertEqual(full, abs(Matrix(m).det()))
                    self.assertEqual(tuple(sorted(result.factors)), _sympy_factors(m))


class ComplexHomologyTests(unittest.TestCase):
    def test_cube_complexes(self):
        self.assertEqual(complex_homology(one_square_torus()).signature(), ((1, ()), (2, ()), (1, ())))
        self.assertEqual(complex_homology(one_square_sphere()).signature(), ((1, ()), (0, ()), (1, ())))
        self.assertEqual(complex_homology(one_square_mobius()).signature(), ((1, ()), (1, ())))
        self.assertTrue(is_acyclic(standard_cube(3)))

    def test_collapsed_faces_have_degree_zero(self):
        wedge, _qmap = identify(standard_cube(2), [(7, 1, ())])
        self.assertEqual(wedge.cell_counts(), (3, 3, 1))
        self.assertEqual(len(chain_complex(wedge).boundaries[2][0]), 3)
        self.assertTrue(is_acyclic(wedge))

    def test_delta_complexes(self):
        self.assertEqual(complex_homology(two_triangle_torus()).betti, (1, 2, 1))
        self.assertEqual(complex_homology(delta_boundary(3)).signature(), ((1, ()), (0, ()), (1, ())))
        self.assertTrue(is_acyclic(dunce_hat()))
        self.assertTrue(is_acyclic(delta_simplex(3)))
        self.assertFalse(is_acyclic(delta_boundary(2)))

    def test_reduced_homology_drops_one_component(self):
        self.assertTrue(reduced_homology(chain_complex(delta_simplex(0))).is_trivial())
        circle = reduced_homology(chain_complex(delta_boundary(2)))
        self.assertEqual(circle.signature(), ((0, ()), (1, ())))
        torus = reduced_homology(chain_complex(one_square_torus()))
        self.assertEqual(torus.betti, (0, 2, 1))

    def test_boundary_squares_to_zero(self):
        for c in (standard_cube(3), one_square_torus(), delta_simplex(3), dunce_hat()):
            chain_complex(c).check()

    def test_subdivisions_preserve_homology(self):
        torus, _index = cubical_subdivision(one_square_torus())
        self.assertEqual(complex_homology(torus).betti, (1, 2, 1))
        sphere = barycentric_subdivision(delta_boundary(3))
        self.assertEqual(sphere.cell_counts(), (14, 36, 24))
        self.assertEqual(complex_homology(sphere).betti, (1, 0, 1))

    def test_rational_betti_agrees(self):
        for c in (one_square_torus(), one_square_mobius(), two_triangle_torus()):
            self.assertEqual(rational_betti(c), complex_homology(c).betti)

    def test_relative_homology_of_a_cube_rel_boundary(self):
        cube = standard_cube(2)
        boundary = frozenset(range(len(cube))) - {len(cube) - 1}
        self.assertEqual(relative_homology(cube, boundary).signature(), ((0, ()), (0, ()), (1, ())))

    def test_moore_space_torsion(self):
        cc = ChainComplex(cells=((0,), (1,), (2,)), boundaries=((), ({},), ({0: 2},)))
        groups = homology(cc)
        self.assertEqual(groups[1].torsion, (2,))
        self.assertEqual(groups[1].betti, 0)
        self.assertEqual(groups[2].betti, 0)
        self.assertEqual(str(groups[1]), "H_1 = Z/2")


class PresentationHomologyTests(unittest.TestCase):
    def test_exponent_matrix_and_h1(self):
        p = Presentation(2, ((1, 1), (2, 2, 2)))
        self.assertEqual(exponent_matrix(p), [[2, 0], [0, 3]])
        groups = presentation_h1_h2(p)
        self.assertEqual(groups[1].torsion, (6,))
        self.assertEqual(groups[2].betti, 0)

    def test_trivializing_reduction(self):
        self.assertTrue(trivializing_reduction_check(Presentation(2, ((1, 2, -2), (2,)))))
        self.assertFalse(trivializing_reduction_check(Presentation(2, ((1, 2), (2,)))))


if __name__ == "__main__":
    unittest.main()
