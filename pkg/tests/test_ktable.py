import unittest

from topoband.errors import ComplexClassUnsupported, UnknownLabel
from topoband.ktable import (AbelianGroupExpr, ClassifyingSpace, format_table, generate_periodic_table,
                             ko_torus, table_entry)
from topoband.symmetry import CARTAN_LABELS, COMPLEX_INDEX, REAL_INDEX


GOLDEN = {
    'A':    ['Z', '0', 'Z', '0', 'Z', '0', 'Z', '0'],
    'AIII': ['0', 'Z', '0', 'Z', '0', 'Z', '0', 'Z'],
    'AI':   ['Z', '0', '0', '0', '2Z', '0', 'Z2', 'Z2'],
    'BDI':  ['Z2', 'Z', '0', '0', '0', '2Z', '0', 'Z2'],
    'D':    ['Z2', 'Z2', 'Z', '0', '0', '0', '2Z', '0'],
    'DIII': ['0', 'Z2', 'Z2', 'Z', '0', '0', '0', '2Z'],
    'AII':  ['2Z', '0', 'Z2', 'Z2', 'Z', '0', '0', '0'],
    'CII':  ['0', '2Z', '0', 'Z2', 'Z2', 'Z', '0', '0'],
    'C':    ['0', '0', '2Z', '0', 'Z2', 'Z2', 'Z', '0'],
    'CI':   ['0', '0', '0', '2Z', '0', 'Z2', 'Z2', 'Z'],
}


class PeriodicTableTest(unittest.TestCase):

    def test_golden_table(self):
        for label, row in GOLDEN.items():
            for d, text in enumerate(row):
                with self.subTest(label=label, d=d):
                    entry = table_entry(label, d)
                    self.assertEqual(entry, AbelianGroupExpr.parse(text))
                    self.assertEqual(entry.even, text == '2Z')

    def test_generated_table(self):
        table = generate_periodic_table()
        self.assertEqual(tuple(table.rows), CARTAN_LABELS)
        self.assertEqual(table.d_max, 8)
        expected = {label: [text.replace('2Z', 'Z') for text in row] for label, row in GOLDEN.items()}
        self.assertEqual(table.to_dict(), expected)
        self.assertEqual(table.entry('DIII', 3), 'Z')

    def test_bott_periodicity(self):
        for label in CARTAN_LABELS:
            period = 8 if label in REAL_INDEX else 2
            for d in range(8):
                with self.subTest(label=label, d=d):
                    self.assertEqual(table_entry(label, d + period), table_entry(label, d))

    def test_diagonal(self):
        # Entries depend only on q - d.
        labels = sorted(REAL_INDEX, key=REAL_INDEX.get)
        for q, label in enumerate(labels):
            following = labels[(q + 1) % 8]
            for d in range(8):
                with self.subTest(label=label, d=d):
                    self.assertEqual(table_entry(following, d + 1), table_entry(label, d))
        self.assertEqual(table_entry('AIII', 1), table_entry('A', 0))

    def test_errors(self):
        with self.assertRaises(UnknownLabel):
            table_entry('BD', 1)
        with self.assertRaises(ValueError):
            table_entry('A', -1)

    def test_format_table(self):
        text = format_table(generate_periodic_table())
        lines = text.splitlines()
        self.assertEqual(len(lines), 11)
        self.assertTrue(lines[0].startswith('Cartan\\d'))
        self.assertEqual(lines[6].split(), ['DIII', '0', 'Z2', 'Z2', 'Z', '0', '0', '0', 'Z'])
        with_even = format_table(generate_periodic_table(), show_even=True).splitlines()
        self.assertEqual(with_even[7].split()[:2], ['AII', '2Z'])


class GroupExprTest(unittest.TestCase):

    def test_str(self):
        self.assertEqual(str(AbelianGroupExpr()), '0')
        self.assertEqual(str(AbelianGroupExpr(1, 3)), 'Z ⊕ 3Z2')
        self.assertEqual(str(AbelianGroupExpr(2)), '2Z')

    def test_parse(self):
        self.assertEqual(AbelianGroupExpr.parse('Z ⊕ 3Z2'), AbelianGroupExpr(1, 3))
        self.assertEqual(AbelianGroupExpr.parse('Z + Z2 + Z2'), AbelianGroupExpr(1, 2))
        self.assertTrue(AbelianGroupExpr.parse('0').is_trivial())
        even = AbelianGroupExpr.parse('2Z')
        self.assertTrue(even.even)
        self.assertEqual(even, 'Z')
        with self.assertRaises(ValueError):
            AbelianGroupExpr.parse('Q')

    def test_arithmetic(self):
        total = AbelianGroupExpr(1) + 3 * AbelianGroupExpr(z2=1)
        self.assertEqual(total, 'Z ⊕ 3Z2')
        self.assertEqual(hash(total), hash(AbelianGroupExpr(1, 3)))
        with self.assertRaises(ValueError):
            AbelianGroupExpr(-1)


class ClassifyingSpaceTest(unittest.TestCase):

    def test_labels(self):
        for label in CARTAN_LABELS:
            with self.subTest(label=label):
                self.assertEqual(ClassifyingSpace.for_label(label).cartan_label, label)
        self.assertEqual(str(ClassifyingSpace.for_label('D').shifted(-3)), 'R7')
        self.assertEqual(ClassifyingSpace.for_label('AIII').shifted(3), ClassifyingSpace('C', 0))
        self.assertEqual(set(COMPLEX_INDEX), {'A', 'AIII'})
        with self.assertRaises(ValueError):
            ClassifyingSpace('Q', 0)


class TorusTest(unittest.TestCase):

    def test_three_dimensional_aii(self):
        groups = ko_torus('AII', 3)
        self.assertEqual(groups.band_and_weak, 'Z ⊕ 3Z2')
        self.assertEqual(groups.strong, 'Z2')
        self.assertEqual([(s, n) for s, n, _ in groups.terms], [(0, 1), (1, 3), (2, 3)])
        self.assertEqual(groups.to_dict()['strong'], 'Z2')

    def test_two_dimensional_aii(self):
        groups = ko_torus('AII', 2)
        self.assertEqual(groups.band_and_weak, 'Z')
        self.assertEqual(groups.strong, 'Z2')

    def test_one_dimensional_aii(self):
        groups = ko_torus('AII', 1)
        self.assertEqual(groups.band_and_weak, 'Z')
        self.assertTrue(groups.strong.is_trivial())

    def test_terms_are_table_entries(self):
        for label in REAL_INDEX:
            for d in range(1, 5):
                with self.subTest(label=label, d=d):
                    groups = ko_torus(label, d)
                    for s, n, group in groups.terms:
                        self.assertEqual(group, table_entry(label, s))
                    total = AbelianGroupExpr()
                    for s, n, group in groups.terms:
                        total = total + n * group
                    self.assertEqual(groups.band_and_weak, total)

    def test_errors(self):
        with self.assertRaises(ComplexClassUnsupported):
            ko_torus('A', 2)
        with self.assertRaises(UnknownLabel):
            ko_torus('E', 2)
        with self.assertRaises(ValueError):
            ko_torus('D', 0)
