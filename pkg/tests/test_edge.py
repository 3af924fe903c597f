import numpy as np

from topoband.edge import (edge_mode_count, hopping_blocks, k_samples, ribbon_hamiltonian,
                           ribbon_spectrum)
from topoband.errors import DimensionMismatch, GapClosed, LongRangeModel, WidthTooSmall
from topoband.invariants import chern_number_2d
from topoband.linalg import SIGMA_X, SIGMA_Y, SIGMA_Z
from topoband.models import BlochModel
from topoband.test.topo_test import TopoTest


class RibbonHamiltonianTest(TopoTest):

    def test_hopping_blocks(self):
        model = self.model('qahe2d', m=1)
        for k in (0.0, 0.7, np.pi):
            with self.subTest(k=k):
                h0, h1 = hopping_blocks(model, k)
                self.assertAllClose(h0, np.sin(k) * SIGMA_X + (1 + np.cos(k)) * SIGMA_Z, atol=1e-12)
                self.assertAllClose(h1, (SIGMA_Z - 1j * SIGMA_Y) / 2, atol=1e-12)

    def test_single_cell(self):
        model = self.model('qahe2d', m=0.5)
        self.assertAllClose(ribbon_hamiltonian(model, 1, 0.3), hopping_blocks(model, 0.3)[0], atol=1e-12)

    def test_hermitian(self):
        model = self.model('doubled_qahe_trs', m=1, eps=0.1)
        for k in self.rng.uniform(-np.pi, np.pi, size=5):
            h = ribbon_hamiltonian(model, 12, k)
            self.assertEqual(h.shape, (48, 48))
            self.assertHermitian(h)

    def test_width(self):
        model = self.model('qahe2d', m=1)
        with self.assertRaises(WidthTooSmall):
            ribbon_hamiltonian(model, 0, 0.0)
        with self.assertRaises(WidthTooSmall):
            edge_mode_count(model, 3)

    def test_long_range(self):
        model = BlochModel.from_sampler('long', 2, 2, lambda k: np.cos(2 * k[1]) * SIGMA_Z + SIGMA_X)
        with self.assertRaises(LongRangeModel):
            hopping_blocks(model, 0.0)

    def test_dimension(self):
        with self.assertRaises(DimensionMismatch):
            hopping_blocks(self.model('ssh1d', t1=1, t2=0.5), 0.0)

    def test_k_samples_avoid_trims(self):
        ks = k_samples(201)
        self.assertEqual(len(ks), 201)
        for trim in (-np.pi, 0.0, np.pi):
            self.assertGreater(np.min(np.abs(ks - trim)), 1e-3)


class RibbonSpectrumTest(TopoTest):

    def test_particle_hole_symmetric(self):
        spectrum = ribbon_spectrum(self.model('qahe2d', m=1), 20, 41)
        self.assertEqual(spectrum.energies.shape, (41, 40))
        self.assertAllClose(spectrum.energies, -spectrum.energies[:, ::-1], atol=1e-9)

    def test_interior_gap_matches_bulk(self):
        # At k_par = 0 the bulk gap is smallest at ky = pi, where |d| = m.
        model = self.model('qahe2d', m=1)
        values = np.linalg.eigvalsh(ribbon_hamiltonian(model, 30, 0.0))
        ky = np.linspace(0, 2 * np.pi, 401)
        bulk = np.min(np.sqrt(np.sin(ky) ** 2 + (2 + np.cos(ky)) ** 2))
        self.assertLess(abs(np.min(np.abs(values)) - bulk), 0.1 * bulk)

    def test_edge_weights(self):
        spectrum = ribbon_spectrum(self.model('qahe2d', m=1), 30, 21)
        self.assertTrue(np.all(spectrum.lower + spectrum.upper <= 1 + 1e-12))
        self.assertEqual(spectrum.header()[:2], ['k', 'E1'])
        self.assertEqual(len(next(spectrum.rows())), 61)


class EdgeCountTest(TopoTest):

    def test_counts_equal_chern(self):
        for m, expected in ((-1.5, -1), (-0.5, -1), (0.5, 1), (1.5, 1), (3.0, 0)):
            with self.subTest(m=m):
                model = self.model('qahe2d', m=m)
                count = edge_mode_count(model)
                self.assertEqual(count.net, expected)
                self.assertEqual(count.net, chern_number_2d(model).value)
                self.assertEqual(count.per_edge['upper'], -expected)
                self.assertFalse(count.helical)

    def test_wider_ribbon(self):
        for m in (-1.5, 0.5):
            with self.subTest(m=m):
                model = self.model('qahe2d', m=m)
                self.assertEqual(edge_mode_count(model, 45).net, edge_mode_count(model, 30).net)

    def test_upper_edge(self):
        count = edge_mode_count(self.model('qahe2d', m=1), edge='upper')
        self.assertEqual(count.net, -1)
        self.assertEqual(count.to_dict()['edge'], 'upper')

    def test_helical_pair(self):
        count = edge_mode_count(self.model('doubled_qahe_trs', m=1, eps=0.1))
        self.assertEqual((count.n_plus, count.n_minus), (1, 1))
        self.assertEqual(count.net, 0)
        self.assertTrue(count.to_dict()['helical_flag'])

    def test_gapless_bulk(self):
        with self.assertRaises(GapClosed):
            edge_mode_count(self.model('qahe2d', m=2))

    def test_bad_edge(self):
        with self.assertRaises(ValueError):
            edge_mode_count(self.model('qahe2d', m=1), edge='left')
