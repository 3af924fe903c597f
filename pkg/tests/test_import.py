import importlib
import unittest


MODULES = (
    'bandcore.dbfutil', 'bandcore.keyval', 'bandcore.logging',
    'topoband.errors', 'topoband.linalg', 'topoband.models', 'topoband.symmetry',
    'topoband.pfaffian', 'topoband.wilson', 'topoband.invariants', 'topoband.z2',
    'topoband.critical', 'topoband.greens', 'topoband.ktable', 'topoband.edge',
    'topoband.serialize', 'topoband.config', 'topoband.cli', 'topoband.test.topo_test',
)


class TestImport(unittest.TestCase):

    def test_modules_import(self):
        for name in MODULES:
            with self.subTest(module=name):
                module = importlib.import_module(name)
                self.assertEqual(module.__name__, name)

    def test_package_docstring_lists_modules(self):
        import topoband
        listed = {line.split()[0] for line in topoband.__doc__.splitlines() if line.strip() and line[0] != ' '}
        for name in MODULES:
            if name.startswith('topoband.') and name.count('.') == 1:
                with self.subTest(module=name):
                    self.assertIn(name.split('.')[1], listed)
