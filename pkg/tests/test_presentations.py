import os
import unittest

import networkx as nx

from kanthurston.complexes import check_cellular_map, check_involution, gromov_check
from kanthurston.errors import PresentationError
from kanthurston.homology import complex_homology, is_acyclic, presentation_h1_h2
from kanthurston.polygons import rectangle
from kanthurston.presentation_complexes import (
    PresentationComplexSpec,
    acycone_complex,
    acycone_presentation,
    acyctwo_complex,
    acyctwo_octagon,
    acyctwo_presentation,
    fewquot_certificate,
    fewquot_presentation,
    link_graph_yn,
    meeting_points_distinct,
    presentation_complex,
    y_n,
    y_n_presentation,
)
from kanthurston.words import (
    Presentation,
    coset_enumeration,
    cyclic_reduce,
    format_word,
    free_reduce,
    invert,
    letter_runs,
    parse_word,
    quotient_presentation,
    word_family_general,
    word_family_presentation,
)


SLOW = os.environ.get("KANTHURSTON_SLOW") == "1"


class WordTests(unittest.TestCase):
    def test_parse_and_format(self):
        names = tuple("abc")
        word = parse_word("ab^-1c^2", names)
        self.assertEqual(word, (1, -2, 3, 3))
        self.assertEqual(format_word(word, names), "ab^-1c^2")
        self.assertEqual(parse_word("1, -2, 3"), (1, -2, 3))
        with self.assertRaises(PresentationError):
            parse_word("0")
        with self.assertRaises(PresentationError):
            parse_word("xyz", names)

    def test_reduction(self):
        self.assertEqual(free_reduce((1, 2, -2, 3)), (1, 3))
        self.assertEqual(cyclic_reduce((-1, 2, 3, 1)), (2, 3))
        self.assertEqual(invert((1, -2)), (2, -1))
        self.assertEqual(letter_runs((1, 1, 2, 3, 3, 3)), (2, 1, 3))

    def test_coset_enumeration_counts_group_order(self):
        self.assertEqual(coset_enumeration(Presentation(1, ((1, 1, 1),))), 3)
        self.assertEqual(coset_enumeration(Presentation(2, ((1, 1), (2, 2, 2), (1, 2, 1, 2)))), 6)
        self.assertEqual(coset_enumeration(Presentation(1, ((1,),))), 1)
        self.assertIsNone(coset_enumeration(Presentation(1, ()), max_cosets=50))

    def test_invalid_presentations(self):
        with self.assertRaises(PresentationError):
            Presentation(1, ((2,),))
        with self.assertRaises(PresentationError):
            Presentation(1, ((1, 1),), sides=((3,),))


class YnTests(unittest.TestCase):
    def test_presentation_is_homologically_trivial(self):
        p = y_n_presentation(7)
        self.assertEqual(len(p.relators), 7)
        groups = presentation_h1_h2(p)
        self.assertTrue(groups[1].trivial)
        self.assertTrue(groups[2].trivial)
        with self.assertRaises(PresentationError):
            y_n_presentation(4)

    def test_y7_complex_and_link(self):
        pc = y_n(7)
        self.assertEqual(len(pc.complex.cells_of_dim(2)), 7 * 20)
        self.assertEqual(pc.complex.euler_characteristic(), 1)
        self.assertTrue(is_acyclic(pc.complex))
        link = pc.center_link()
        self.assertTrue(link.is_simplicial)
        self.assertEqual(len(link.vertices), 14)
        expected = link_graph_yn(7)
        self.assertEqual(expected.one_skeleton().number_of_edges(), 35)
        self.assertTrue(nx.is_isomorphic(nx.Graph(link.graph()), expected.one_skeleton()))

    def test_link_condition_fails_at_seven_and_holds_at_eight(self):
        report = gromov_check(y_n(7).complex, stop_early=True)
        self.assertFalse(report.passed)
        self.assertEqual(report.failures[0]["reason"], "not_flag")
        self.assertEqual(len(report.failures[0]["witness"]), 3)
        pc = y_n(8)
        self.assertTrue(gromov_check(pc.complex).passed)
        self.assertTrue(is_acyclic(pc.complex))
        self.assertTrue(nx.is_isomorphic(nx.Graph(pc.center_link().graph()), link_graph_yn(8).one_skeleton()))

    def test_petal_length_must_be_even(self):
        with self.assertRaises(PresentationError):
            y_n(7, petal_length=3)


class AcyclicPresentationTests(unittest.TestCase):
    def test_acycone(self):
        p = acycone_presentation()
        self.assertEqual(p.generators, 6)
        groups = presentation_h1_h2(p)
        self.assertTrue(groups[1].trivial)
        self.assertTrue(groups[2].trivial)
        self.assertTrue(meeting_points_distinct(p, (1, 3, 5)))
        pc = acycone_complex()
        self.assertTrue(complex_homology(pc.complex, reduced=True).is_trivial())

    def test_acyctwo_presentation(self):
        p = acyctwo_presentation()
        self.assertEqual(p.generators, 8)
        self.assertEqual(len(p.relators), 8)
        self.assertTrue(all(len(w) == 49 for w in p.relators))
        groups = presentation_h1_h2(p)
        self.assertTrue(groups[1].trivial)
        self.assertTrue(groups[2].trivial)
        self.assertTrue(meeting_points_distinct(p, (1, 2, 3, 4)))
        quotient = quotient_presentation(p)
        self.assertEqual(quotient.generators, 4)
        self.assertTrue(presentation_h1_h2(quotient)[1].trivial)

    @unittest.skipUnless(SLOW, "set KANTHURSTON_SLOW=1 to build the full acyclic complex")
    def test_acyctwo_complex_with_its_symmetries(self):
        pc, tau, rotation = acyctwo_complex()
        check_involution(tau)
        check_cellular_map(rotation)
        self.assertTrue(complex_homology(pc.complex, reduced=True).is_trivial())

    def test_acyctwo_octagon_sides(self):
        octagon = acyctwo_octagon()
        self.assertEqual(octagon.side_lengths, (28,) + (24,) * 7)

    def test_fewquot(self):
        p = fewquot_presentation(1)
        self.assertEqual(p.generators, 6)
        certificate = fewquot_certificate(1)
        self.assertTrue(certificate.h1_trivial)
        self.assertEqual(certificate.to_dict()["N"], 1)

    def test_word_family(self):
        p = word_family_presentation(3)
        self.assertEqual(len(p.relators), 6)
        self.assertTrue(all(len(w) == 6 for w in p.relators))

    def test_word_family_labellings(self):
        first, second = word_family_general(4, 2)
        self.assertEqual(first, ((1, 6, 2, 7, 3, 8, 4, 5), (1,) * 8))
        self.assertEqual(second, ((1, -6, 2, -5, 3, -8, 4, -7), (1,) * 8))
        fixed, _ = word_family_general(4, 2, shifted=False)
        self.assertEqual(fixed[0], (1, 6, 2, 6, 3, 6, 4, 6))
        with self.assertRaises(PresentationError):
            word_family_general(2, 1)


class PresentationComplexSpecTests(unittest.TestCase):
    def test_side_length_mismatch(self):
        p = Presentation(2, ((1, 2, -1, -2),), tuple("ab"))
        spec = PresentationComplexSpec(p, (rectangle(2, 3),), petal_length=2)
        with self.assertRaises(PresentationError) as ctx:
            presentation_complex(spec)
        self.assertEqual(ctx.exception.code, "side_length_mismatch")

    def test_torus_from_a_square(self):
        p = Presentation(2, ((1, 2, -1, -2),), tuple("ab"))
        spec = PresentationComplexSpec(p, (rectangle(2, 2),), petal_length=2)
        pc = presentation_complex(spec)
        self.assertEqual(complex_homology(pc.complex).betti, (1, 2, 1))


if __name__ == "__main__":
    unittest.main()
