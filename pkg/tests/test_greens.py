import numpy as np

from topoband.errors import GapClosed, InconsistentInput, NonUniformFilling, SingularZeroFrequency
from topoband.greens import (GreenFunction, deformation_gap_check, deformed, frequency_nodes,
                             g0_from_model, heff_invariant, heff_model, n3_invariant, with_self_energy)
from topoband.invariants import chern_number_2d
from topoband.models import occupied_projector, spectrally_flatten
from topoband.test.topo_test import TopoTest


class GreenFunctionTest(TopoTest):

    def test_defining_identity(self):
        model = self.model('qahe2d', m=1)
        green = g0_from_model(model)
        ks = self.random_k(2, 100)
        omegas = self.rng.normal(scale=3.0, size=100)
        g = green(omegas, ks)
        lhs = (1j * omegas[:, np.newaxis, np.newaxis] * np.eye(2) - model.hamiltonians(ks)) @ g
        self.assertAllClose(lhs, np.tile(np.eye(2), (100, 1, 1)), atol=1e-10)
        self.assertAllClose(green.inverse(omegas, ks) @ g, np.tile(np.eye(2), (100, 1, 1)), atol=1e-10)

    def test_partial_fractions(self):
        flat = spectrally_flatten(self.model('qahe2d', m=1))
        green = g0_from_model(flat)
        for k, omega in zip(self.random_k(2, 20), self.rng.normal(size=20)):
            p_g = occupied_projector(flat, k).matrix
            p_e = np.eye(2) - p_g
            expected = p_g / (1j * omega + 1) + p_e / (1j * omega - 1)
            self.assertAllClose(green(omega, k), expected, atol=1e-10)

    def test_zero_frequency(self):
        flat = spectrally_flatten(self.model('qahe2d', m=1))
        green = g0_from_model(flat)
        ks = self.random_k(2, 20)
        self.assertAllClose(green(np.zeros(20), ks), -flat.hamiltonians(ks), atol=1e-10)

    def test_gapless_model(self):
        with self.assertRaises(GapClosed):
            g0_from_model(self.model('qahe2d', m=0))

    def test_self_energy(self):
        green = with_self_energy(g0_from_model(self.model('qahe2d', m=1)), 0.2)
        self.assertEqual(green.self_energy_tag, 'static scalar 0.2')
        ks = self.random_k(2, 5)
        base = g0_from_model(self.model('qahe2d', m=1))
        self.assertAllClose(green.inverse(np.ones(5), ks), base.inverse(np.ones(5), ks) - 0.2 * np.eye(2))
        with self.assertRaises(InconsistentInput):
            with_self_energy(green, np.eye(3))

    def test_frequency_nodes(self):
        omegas, weights = frequency_nodes(200)
        self.assertEqual(len(omegas), 200)
        self.assertTrue(np.all(np.diff(omegas) > 0))
        # int d omega / (1 + omega^2) = pi
        self.assertAlmostEqual(np.sum(weights / (1 + omegas ** 2)), np.pi, places=10)


class N3Test(TopoTest):

    def test_equals_chern(self):
        for m, expected in ((1, 1), (3, 0), (-1, -1)):
            with self.subTest(m=m):
                model = self.model('qahe2d', m=m)
                green = g0_from_model(model)
                n3 = n3_invariant(green)
                self.assertEqual(n3.value, expected)
                self.assertLess(n3.residual, 0.02)
                self.assertEqual(heff_invariant(green).value, expected)
                self.assertEqual(chern_number_2d(model).value, expected)

    def test_all_two_dimensional_models(self):
        for name, params in (('qahe2d', dict(m=1.5)), ('doubled_qahe_trs', dict(m=1, eps=0.1))):
            with self.subTest(model=name):
                model = self.model(name, **params)
                green = g0_from_model(model)
                expected = chern_number_2d(model).value
                self.assertEqual(n3_invariant(green).value, expected)
                self.assertEqual(heff_invariant(green).value, expected)

    def test_static_self_energy_keeps_value(self):
        green = with_self_energy(g0_from_model(self.model('qahe2d', m=1)), 0.2)
        n3 = n3_invariant(green)
        self.assertEqual(n3.value, 1)
        self.assertEqual(n3.to_dict()['self_energy_tag'], 'static scalar 0.2')
        self.assertEqual(heff_invariant(green).value, 1)

    def test_quadrature_converged(self):
        green = g0_from_model(self.model('qahe2d', m=1))
        a = n3_invariant(green, 24, 200).raw
        b = n3_invariant(green, 24, 400).raw
        self.assertLess(abs(a - b), 1e-3)

    def test_dimension(self):
        with self.assertRaises(InconsistentInput):
            n3_invariant(g0_from_model(self.model('ssh1d', t1=0.5, t2=1)))


class HeffTest(TopoTest):

    def test_heff_is_hamiltonian(self):
        model = self.model('qahe2d', m=1)
        heff = heff_model(g0_from_model(model), 12)
        ks = self.random_k(2, 10)
        self.assertAllClose(heff.hamiltonians(ks), model.hamiltonians(ks))
        self.assertEqual(heff.n_occ, 1)

    def test_singular_zero_frequency(self):
        # G^-1(0, k) = -H(k) vanishes where the gap closes.
        model = self.model('qahe2d', m=0)

        def inverse(omega, ks):
            return 1j * omega[..., np.newaxis, np.newaxis] * np.eye(2) - model.hamiltonians(ks)

        green = GreenFunction('gapless', 2, 2, lambda w, k: np.linalg.inv(inverse(w, k)), inverse)
        with self.assertRaises(SingularZeroFrequency):
            heff_invariant(green, 24)

    def test_non_uniform_filling(self):
        model = self.model('qahe2d', m=1)
        # h_eff = H - 2.2 has two negative eigenvalues wherever |d| < 2.2;
        # |d| spans [1, 3] and never equals 2.2 on the 24 grid.
        green = with_self_energy(g0_from_model(model), -2.2)
        with self.assertRaises(NonUniformFilling):
            heff_invariant(green, 24)


class DeformationTest(TopoTest):

    def test_smooth(self):
        green = g0_from_model(self.model('qahe2d', m=1))
        check = deformation_gap_check(green, kgrid_size=12, wquad=50)
        self.assertTrue(check.smooth)
        self.assertGreater(check.min_singular, 1e-6)
        self.assertEqual(check.to_dict()['lambdas'], [0, 0.25, 0.5, 0.75, 1])

    def test_endpoints(self):
        model = self.model('qahe2d', m=1)
        green = g0_from_model(model)
        ks = self.random_k(2, 10)
        omegas = self.rng.normal(size=10)
        self.assertAllClose(deformed(green, 0)(omegas, ks), green(omegas, ks), atol=1e-12)
        endpoint = np.linalg.inv(1j * omegas[:, np.newaxis, np.newaxis] * np.eye(2) - model.hamiltonians(ks))
        self.assertAllClose(deformed(green, 1)(omegas, ks), endpoint, atol=1e-12)

    def test_lambda_range(self):
        green = g0_from_model(self.model('qahe2d', m=1))
        with self.assertRaises(InconsistentInput):
            deformation_gap_check(green, [0.5, 1.5], kgrid_size=4, wquad=4)
