import numpy as np

from topoband.errors import DimensionMismatch, GapClosed, NoChiralSymmetry, NotConverged, VanishingField
from topoband.invariants import (InvariantResult, chern_from_frames, chern_number_2d, gauss_degree,
                                 hall_conductance, projector_derivatives, second_chern_4d, winding_number_1d,
                                 winding_number_3d)
from topoband.linalg import PAULI, SIGMA_X, SIGMA_Z
from topoband.models import (BlochModel, DVectorModel, constant_model, kgrid, occupied_states,
                             time_reversal_double, wilson_dirac_d)
from topoband.test.topo_test import TopoTest
from topoband.wilson import berry_curvature, berry_phase, loop_points, wilson_phases


HARMONICS = ((1, 0), (0, 1), (1, 1), (1, -1), (2, 0), (0, 2))


def random_two_band_family(rng, base_mass: float, scale: float = 0.05):
    """qahe2d d-vector at base_mass plus random Fourier modes up to the
    second harmonic."""
    const = scale * rng.normal(size=3)
    cos_coef = scale * rng.normal(size=(len(HARMONICS), 3))
    sin_coef = scale * rng.normal(size=(len(HARMONICS), 3))
    n = np.array(HARMONICS, dtype=float)

    def d_family(k, m):
        phase = np.asarray(k, dtype=float) @ n.T
        return wilson_dirac_d(k, m) + const + np.cos(phase) @ cos_coef + np.sin(phase) @ sin_coef

    return DVectorModel('random2band', 2, PAULI, d_family, params={'m': base_mass})


class InvariantResultTest(TopoTest):

    def test_fields(self):
        result = InvariantResult('chern1', 0.9999999999, 24)
        self.assertEqual(result.value, 1)
        self.assertAlmostEqual(result.residual, 1e-10, places=15)
        self.assertEqual(list(result.to_dict()), ['name', 'raw', 'value', 'residual', 'grid', 'model', 'params'])

    def test_modulus(self):
        self.assertEqual(InvariantResult('z2_2d', -3.0, 24, modulus=2).value, 1)
        self.assertEqual(InvariantResult('z2_2d', 4.0, 24, modulus=2).value, 0)

    def test_require(self):
        with self.assertRaises(NotConverged):
            InvariantResult('chern2', 0.4, 12).require(0.05)
        self.assertEqual(InvariantResult('chern2', 1.01, 12).require(0.05).value, 1)


class ChernTest(TopoTest):

    def test_qahe_phase_diagram(self):
        for m, expected in ((-3, 0), (-1, -1), (1, 1), (3, 0)):
            with self.subTest(m=m):
                result = chern_number_2d(self.model('qahe2d', m=m), 24)
                self.assertEqual(result.value, expected)
                self.assertLess(result.residual, 1e-9)
                self.assertEqual(result.params['m'], float(m))

    def test_hall_conductance(self):
        self.assertEqual(hall_conductance(self.model('qahe2d', m=1)), 1.0)

    def test_gap_closed(self):
        with self.assertRaises(GapClosed):
            chern_number_2d(self.model('qahe2d', m=0), 24)

    def test_dimension(self):
        with self.assertRaises(DimensionMismatch):
            chern_number_2d(self.model('ssh1d', t1=1, t2=0.5))

    def test_quantized_on_coarse_grids(self):
        for grid in (12, 16, 30):
            with self.subTest(grid=grid):
                self.assertLess(chern_number_2d(self.model('qahe2d', m=1.3), grid).residual, 1e-9)

    def test_time_reversal_forces_zero(self):
        self.assertEqual(chern_number_2d(self.model('doubled_qahe_trs', m=1, eps=0.1)).value, 0)

    def test_gauge_invariance(self):
        model = self.model('qahe2d', m=1)
        frames = occupied_states(model, kgrid(2, 12))
        reference = chern_from_frames(frames)
        for _ in range(50):
            phases = np.exp(2j * np.pi * self.rng.uniform(size=frames.shape[:2] + (1, 1)))
            raw = chern_from_frames(frames * phases)
            self.assertEqual(int(np.rint(raw)), int(np.rint(reference)))
            self.assertAlmostEqual(raw, reference, places=10)

    def test_non_abelian_gauge_invariance(self):
        model = self.model('doubled_qahe_trs', m=1, eps=0.1)
        frames = occupied_states(model, kgrid(2, 12))
        reference = chern_from_frames(frames)
        for _ in range(10):
            z = self.rng.normal(size=frames.shape[:2] + (2, 2)) + 1j * self.rng.normal(size=frames.shape[:2] + (2, 2))
            u, _ = np.linalg.qr(z)
            self.assertAlmostEqual(chern_from_frames(frames @ u), reference, places=10)

    def test_curvature_sums_to_chern(self):
        field = berry_curvature(self.model('qahe2d', m=-1), 24)
        self.assertEqual(field.shape, (24, 24))
        self.assertAlmostEqual(np.sum(field) / (2 * np.pi), -1.0, places=9)


class GaussDegreeTest(TopoTest):

    def test_qahe_values(self):
        self.assertEqual(gauss_degree(self.model('qahe2d', m=1)).value, 1)
        self.assertEqual(gauss_degree(self.model('qahe2d', m=-3)).value, 0)
        self.assertEqual(gauss_degree(self.model('qahe2d', m=-1)).value, -1)

    def test_quadrature_agrees(self):
        for m in (-1, 1, 3):
            with self.subTest(m=m):
                model = self.model('qahe2d', m=m)
                self.assertEqual(gauss_degree(model, 48, 'quadrature').value, gauss_degree(model, 48, 'simplex').value)

    def test_equals_chern_on_mass_sweep(self):
        masses = []
        while len(masses) < 20:
            m = self.rng.uniform(-3.5, 3.5)
            if min(abs(m - c) for c in (-2, 0, 2)) > 0.3:
                masses.append(m)
        for m in masses:
            with self.subTest(m=m):
                model = self.model('qahe2d', m=m)
                self.assertEqual(gauss_degree(model).value, chern_number_2d(model).value)

    def test_equals_chern_on_random_models(self):
        accepted = 0
        attempts = 0
        while accepted < 20:
            attempts += 1
            if attempts > 1000:
                self.fail("Could not draw 20 gapped random models")
            base = self.rng.choice([-3.0, -1.0, 1.0, 3.0]) + self.rng.uniform(-0.4, 0.4)
            model = random_two_band_family(self.rng, base)
            d = model.d_map(kgrid(2, 64))
            if np.min(np.linalg.norm(d, axis=-1)) < 0.3:
                continue
            accepted += 1
            with self.subTest(model=accepted):
                self.assertEqual(gauss_degree(model, 64).value, chern_number_2d(model, 40).value)

    def test_errors(self):
        with self.assertRaises(VanishingField):
            gauss_degree(self.model('qahe2d', m=0))
        with self.assertRaises(DimensionMismatch):
            gauss_degree(self.model('ssh1d', t1=1, t2=0.5))
        with self.assertRaises(DimensionMismatch):
            gauss_degree(self.model('dirac3d_chiral', m=2), 8, 'simplex')


class SecondChernTest(TopoTest):

    def test_flat_model(self):
        flat = constant_model(np.diag([1.0, 1.0, -1.0, -1.0]), 4, name='flat')
        result = second_chern_4d(flat, 6)
        self.assertEqual(result.value, 0)
        self.assertAlmostEqual(result.raw, 0.0, places=12)

    def test_gap_closing(self):
        for m in (-4, 4):
            with self.subTest(m=m):
                with self.assertRaises(GapClosed):
                    second_chern_4d(self.model('dirac4d', m=m), 12)

    def test_equals_gauss_degree(self):
        for m in (1, -1, 3):
            with self.subTest(m=m):
                model = self.model('dirac4d', m=m)
                gauss = gauss_degree(model, 16)
                self.assertNotEqual(gauss.value, 0)
                self.assertEqual(second_chern_4d(model, 12).value, gauss.value)

    def test_quantized_on_small_grids(self):
        model = self.model('dirac4d', m=1)
        coarse = second_chern_4d(model, 10)
        self.assertLess(coarse.residual, 0.05)
        self.assertAlmostEqual(second_chern_4d(model, 14).raw, coarse.raw, delta=0.05)

    def test_projector_derivatives(self):
        model = self.model('dirac4d', m=1)
        derivs, occupied = projector_derivatives(model, 6)
        self.assertEqual(len(derivs), 4)
        self.assertEqual(occupied.tolist(), [1.0, 1.0, 0.0, 0.0])
        for d in derivs:
            self.assertHermitian(d[0, 0, 0, 0], atol=1e-10)
            # d P has no occupied-occupied or empty-empty block.
            self.assertAllClose(d[..., :2, :2], 0)
            self.assertAllClose(d[..., 2:, 2:], 0)

    def test_dimension(self):
        with self.assertRaises(DimensionMismatch):
            second_chern_4d(self.model('qahe2d', m=1))


class WindingTest(TopoTest):

    def test_ssh(self):
        self.assertEqual(winding_number_1d(self.model('ssh1d', t1=0, t2=1)).value, -1)
        self.assertEqual(winding_number_1d(self.model('ssh1d', t1=2, t2=1)).value, 0)
        with self.assertRaises(GapClosed):
            winding_number_1d(self.model('ssh1d', t1=1, t2=1))

    def test_chiral_operator_required(self):
        plain = BlochModel.from_sampler('plain', 1, 2, lambda k: np.cos(k[0]) * SIGMA_Z + SIGMA_X)
        with self.assertRaises(NoChiralSymmetry):
            winding_number_1d(plain)
        with self.assertRaises(NoChiralSymmetry):
            winding_number_1d(self.model('ssh1d', t1=0, t2=1), chiral=SIGMA_X)

    def test_time_reversed_copies_wind_evenly(self):
        single = self.model('ssh1d', t1=0, t2=1)
        doubled = time_reversal_double(single)
        self.assertEqual(winding_number_1d(doubled).value, 2 * winding_number_1d(single).value)

    def test_constant_q(self):
        chiral = np.kron(SIGMA_Z, np.eye(2))
        model = constant_model(np.kron(SIGMA_X, np.eye(2)), 3, name='constant', symmetries={'CHIRAL': chiral})
        result = winding_number_3d(model, 8)
        self.assertEqual(result.value, 0)
        self.assertAlmostEqual(result.raw, 0.0, places=12)

    def test_3d_equals_gauss_degree(self):
        # m = 1 is a gap closing of this regularization, m = 2 is inside
        # the inverted window 1 < m < 3.
        model = self.model('dirac3d_chiral', m=2)
        gauss = gauss_degree(model, 24)
        self.assertNotEqual(gauss.value, 0)
        self.assertEqual(winding_number_3d(model, 20).value, gauss.value)

    def test_3d_grid_doubling(self):
        model = self.model('dirac3d_chiral', m=2)
        self.assertEqual(winding_number_3d(model, 20).value, winding_number_3d(model, 40).value)

    def test_3d_gap_closing(self):
        with self.assertRaises(GapClosed):
            winding_number_3d(self.model('dirac3d_chiral', m=1), 20)


class WilsonLoopTest(TopoTest):

    def test_zak_phase(self):
        self.assertAlmostEqual(abs(berry_phase(self.model('ssh1d', t1=0, t2=1))), np.pi, places=8)
        self.assertAlmostEqual(berry_phase(self.model('ssh1d', t1=2, t2=1)), 0.0, places=8)

    def test_wilson_phases_shape(self):
        model = self.model('doubled_qahe_trs', m=1, eps=0.1)
        phases = wilson_phases(model, axis=0, k_perp=[0.3], grid=32)
        self.assertEqual(phases.shape, (2,))
        self.assertTrue(np.all(np.diff(phases) >= 0))

    def test_loop_points(self):
        points = loop_points(2, 1, [0.5], 4)
        self.assertAllClose(points[:, 0], np.full(4, 0.5))
        self.assertAllClose(points[:, 1], [0, np.pi / 2, np.pi, 3 * np.pi / 2])
        with self.assertRaises(ValueError):
            loop_points(2, 0, [], 4)
