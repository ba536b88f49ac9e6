"""
This module contains unit tests for the solutions module.

It includes test cases for the radial equations satisfied by every doublet kind, the Wronskian
and its closed form, bound-state normalization and decay, the boundary form at the origin, the
matching coefficients, and the partial Green's kernel.
"""
import math
import unittest

import numpy as np
from scipy import integrate, special

from core.solutions import DiracSolutions, DoubletKind, DoubletParams, RadialDoublet
from core.specfun import SpecialFunctions
from core.spectrum import BoundStateSolver
from utils.errors import DomainError, KinematicError, ParameterMismatchError, SingularSystemError

RADII = (0.1, 0.5, 1.0, 3.0, 7.5, 20.0)


class ScaledLowerDoublet(RadialDoublet):
    def evaluate(self, r):
        f1, f2 = super().evaluate(r)
        return f1, 1.01 * f2


class TestDiracSolutions(unittest.TestCase):
    def setUp(self):
        """
        Initialize the DiracSolutions instance and a few doublets for testing.
        """
        self.ds = DiracSolutions()
        self.lam = BoundStateSolver.bound_lambda_closed(0.7, 1.0)
        self.doublets = {
            DoubletKind.REGULAR_F: DoubletParams(E=2.0, m=1.0, l=1, mu=0.3, s=-1),
            DoubletKind.IRREGULAR_U: DoubletParams(E=2.0, m=1.0, l=1, mu=0.3, s=-1),
            DoubletKind.MACDONALD_V: DoubletParams(E=0.9, m=1.0, l=0, mu=0.3, s=1),
            DoubletKind.MODIFIED_I: DoubletParams(E=0.9, m=1.0, l=-1, mu=0.3, s=-1),
            DoubletKind.FREE_S: DoubletParams(E=-1.5, m=1.0, l=2, s=1),
            DoubletKind.BOUND_V0: DoubletParams(E=math.sqrt(4.0 - self.lam ** 2), m=2.0, mu=0.7, s=-1),
            DoubletKind.SAE_REGULAR: DoubletParams(E=2.0, m=1.0, mu=0.3, s=-1, theta=math.pi / 3),
        }

    def test_every_kind_solves_radial_system(self):
        for kind, params in self.doublets.items():
            doublet = self.ds.make_doublet(kind, params)
            for r in RADII:
                with self.subTest(kind=kind, r=r):
                    self.assertLessEqual(self.ds.dirac_residual(doublet, r), 1e-6)

    def test_negative_energy_regular_doublet(self):
        doublet = self.ds.make_doublet(DoubletKind.REGULAR_F, DoubletParams(E=-2.0, m=1.0, l=-2, mu=0.4, s=1))
        for r in RADII:
            self.assertLessEqual(self.ds.dirac_residual(doublet, r), 1e-6)

    def test_perturbed_doublet_is_detected(self):
        params = DoubletParams(E=2.0, m=1.0, l=1, mu=0.3, s=-1)
        broken = ScaledLowerDoublet(DoubletKind.REGULAR_F, params)
        self.assertGreater(self.ds.dirac_residual(broken, 1.0), 1e-3)

    def test_bound_doublet_components(self):
        params = self.doublets[DoubletKind.BOUND_V0]
        doublet = self.ds.make_doublet(DoubletKind.BOUND_V0, params)
        f1, f2 = doublet(0.8)
        x = self.lam * 0.8
        ratio = f2 / f1
        expected = -math.sqrt(2.0 - params.E) * special.kv(0.3, x) / (math.sqrt(2.0 + params.E) * special.kv(0.7, x))
        self.assertAlmostEqual(ratio / expected, 1.0, delta=1e-12)

    def test_free_doublet_upper_is_j0(self):
        doublet = self.ds.make_doublet(DoubletKind.FREE_S, DoubletParams(E=2.0, m=1.0, l=0, mu=0.6, s=-1))
        self.assertEqual(doublet.params.mu, 0.0)
        p = math.sqrt(3.0)
        f1, _ = doublet(1.3)
        self.assertAlmostEqual(f1, math.sqrt(3.0) * special.jv(0.0, p * 1.3), places=13)

    def test_sae_regular_at_zero_angle_is_pure_j_beta(self):
        doublet = self.ds.make_doublet(DoubletKind.SAE_REGULAR, DoubletParams(E=2.0, m=1.0, mu=0.3, s=-1))
        f1, _ = doublet(0.4)
        self.assertAlmostEqual(f1, math.sqrt(3.0) * special.jv(0.3, math.sqrt(3.0) * 0.4), places=13)

    def test_kinematic_errors(self):
        with self.assertRaises(KinematicError):
            self.ds.make_doublet(DoubletKind.REGULAR_F, DoubletParams(E=0.5, m=1.0, mu=0.3))
        with self.assertRaises(KinematicError):
            self.ds.make_doublet(DoubletKind.MACDONALD_V, DoubletParams(E=2.0, m=1.0, mu=0.3))
        with self.assertRaises(DomainError):
            self.ds.make_doublet(DoubletKind.SAE_REGULAR, DoubletParams(E=2.0, m=1.0, mu=0.3, theta=7.0))
        with self.assertRaises(DomainError):
            self.ds.make_doublet(DoubletKind.IRREGULAR_U, DoubletParams(E=2.0, m=1.0, l=1, mu=0.0))
        with self.assertRaises(DomainError):
            DoubletParams(E=2.0, m=1.0, s=0)

    def test_integrability_classes(self):
        regular = self.ds.make_doublet(DoubletKind.REGULAR_F, self.doublets[DoubletKind.REGULAR_F])
        decaying = self.ds.make_doublet(DoubletKind.MACDONALD_V, self.doublets[DoubletKind.MACDONALD_V])
        self.assertTrue(regular.square_integrable_at_origin)
        self.assertFalse(regular.square_integrable_at_infinity)
        self.assertTrue(decaying.square_integrable_at_infinity)

    def test_wronskian_is_radius_independent(self):
        for l, s in ((0, -1), (0, 1), (2, -1), (-1, 1)):
            params = DoubletParams(E=0.5, m=1.0, l=l, mu=0.4, s=s)
            v = self.ds.make_doublet(DoubletKind.MACDONALD_V, params)
            f = self.ds.make_doublet(DoubletKind.MODIFIED_I, params)
            reference = self.ds.wronskian(v, f, 0.5)
            for r in (0.05, 5.0):
                self.assertAlmostEqual(self.ds.wronskian(v, f, r) / reference, 1.0, delta=1e-10)
            self.assertAlmostEqual(reference, self.ds.wronskian_closed(s), delta=1e-10)

    def test_wronskian_sign_flips_between_branches(self):
        positive = DoubletParams(E=0.5, m=1.0, l=0, mu=0.3, s=1)
        negative = DoubletParams(E=0.5, m=1.0, l=-1, mu=0.3, s=-1)
        values = []
        for params in (positive, negative):
            v = self.ds.make_doublet(DoubletKind.MACDONALD_V, params)
            f = self.ds.make_doublet(DoubletKind.MODIFIED_I, params)
            values.append(self.ds.wronskian(v, f, 1.0))
        self.assertAlmostEqual(values[0], -1.0, delta=1e-10)
        self.assertAlmostEqual(values[1], 1.0, delta=1e-10)

    def test_wronskian_closed_continued_form(self):
        self.assertAlmostEqual(abs(self.ds.wronskian_closed(-1, nu=0.4, lam=1.0, p=1.0)), 1.0, places=15)
        self.assertAlmostEqual(self.ds.wronskian_closed(1, 2.0, 3.0, nu=0.5, lam=4.0, p=1.0), -3.0, places=14)

    def test_wronskian_rejects_mismatch(self):
        v = self.ds.make_doublet(DoubletKind.MACDONALD_V, DoubletParams(E=0.5, m=1.0, l=0, mu=0.4))
        f = self.ds.make_doublet(DoubletKind.MODIFIED_I, DoubletParams(E=0.5, m=1.0, l=1, mu=0.4))
        with self.assertRaises(ParameterMismatchError):
            self.ds.wronskian(v, f, 1.0)

    def test_normalization_closed_matches_quadrature(self):
        lam = BoundStateSolver.bound_lambda_closed(0.5, 1.0)
        energy = math.sqrt(4.0 - lam ** 2)
        closed = self.ds.normalize_bound(0.5, lam, energy, 2.0)
        quadrature = self.ds.normalize_bound(0.5, lam, energy, 2.0, method="quadrature")
        self.assertAlmostEqual(quadrature / closed, 1.0, delta=1e-8)
        closed = self.ds.normalize_bound(0.3, 0.8, 0.6, 1.0)
        quadrature = self.ds.normalize_bound(0.3, 0.8, 0.6, 1.0, method="quadrature")
        self.assertAlmostEqual(quadrature / closed, 1.0, delta=1e-8)

    def test_normalization_scales_with_lambda(self):
        ratio = self.ds.normalize_bound(0.4, 0.8, 1.0, 2.0) / self.ds.normalize_bound(0.4, 0.4, 1.0, 2.0)
        self.assertAlmostEqual(ratio, 2.0, places=14)

    def test_bound_doublet_has_unit_norm(self):
        doublet = self.ds.make_doublet(DoubletKind.BOUND_V0, self.doublets[DoubletKind.BOUND_V0])

        def density(r):
            f1, f2 = doublet(r)
            return r * (f1 ** 2 + f2 ** 2)

        split = 1.0 / self.lam
        head, _ = integrate.quad(density, 0.0, split, epsabs=1e-13, epsrel=1e-11, limit=400)
        tail, _ = integrate.quad(density, split, np.inf, epsabs=1e-13, epsrel=1e-11, limit=400)
        self.assertAlmostEqual(head + tail, 1.0, delta=1e-8)

    def test_bound_doublet_decay_rate(self):
        doublet = self.ds.make_doublet(DoubletKind.BOUND_V0, self.doublets[DoubletKind.BOUND_V0])

        def density(r):
            f1, f2 = doublet(r)
            return r * (f1 ** 2 + f2 ** 2)

        cutoffs = np.linspace(5.0 / self.lam, 10.0 / self.lam, 6)
        tails = [integrate.quad(density, x, np.inf, epsabs=0.0, epsrel=1e-10, limit=200)[0] for x in cutoffs]
        slope, _ = np.polyfit(cutoffs, np.log(tails), 1)
        self.assertAlmostEqual(-slope / (2.0 * self.lam), 1.0, delta=0.05)

    def test_boundary_form_vanishes_for_extension_doublets(self):
        for beta in (0.25, 0.5, 0.75):
            for k in range(8):
                params = DoubletParams(E=2.0, m=1.0, mu=beta, s=-1, theta=k * math.pi / 4.0)
                doublet = self.ds.make_doublet(DoubletKind.SAE_REGULAR, params)
                self.assertLessEqual(abs(self.ds.boundary_form(doublet)), 1e-8)

    def test_boundary_form_across_energies_at_pure_angles(self):
        for theta in (0.0, math.pi):
            f = self.ds.make_doublet(DoubletKind.SAE_REGULAR, DoubletParams(E=2.0, m=1.0, mu=0.3, theta=theta))
            g = self.ds.make_doublet(DoubletKind.SAE_REGULAR, DoubletParams(E=3.0, m=1.0, mu=0.3, theta=theta))
            self.assertLessEqual(abs(self.ds.boundary_form(f, g)), 1e-8)

    def test_boundary_form_of_free_doublets(self):
        f = self.ds.make_doublet(DoubletKind.FREE_S, DoubletParams(E=2.0, m=1.0, l=0))
        g = self.ds.make_doublet(DoubletKind.FREE_S, DoubletParams(E=3.0, m=1.0, l=0))
        self.assertLessEqual(abs(self.ds.boundary_form(f, g)), 1e-8)

    def test_boundary_form_mixed_angle_depends_on_energy(self):
        f = self.ds.make_doublet(DoubletKind.SAE_REGULAR, DoubletParams(E=1.0, m=0.0, mu=0.25, theta=math.pi / 2))
        g = self.ds.make_doublet(DoubletKind.SAE_REGULAR, DoubletParams(E=3.0, m=0.0, mu=0.25, theta=math.pi / 2))
        self.assertGreater(abs(self.ds.boundary_form(f, g)), 1e-3)

    def test_matching_residual(self):
        for theta in (0.0, 1.0, math.pi, 5.0):
            coeffs = self.ds.matching_c1(0.3, 1.0, 0.7, theta, m=0.5)
            self.assertLessEqual(coeffs.residual, 1e-12)
            self.assertNotEqual(coeffs.W_match, 0.0)

    def test_matching_cramer_form(self):
        beta, x = 0.7, 0.2
        coeffs = self.ds.matching_c1(x, 1.0, beta, 0.0)
        f1, f2 = special.jv(beta, x), special.jv(beta - 1.0, x)
        w = special.kv(beta, x) * special.iv(1.0 - beta, x) - special.kv(1.0 - beta, x) * special.iv(beta, x)
        expected = (f1 * special.iv(1.0 - beta, x) - f2 * special.iv(beta, x)) / w
        self.assertAlmostEqual(coeffs.C1 / expected, 1.0, delta=1e-12)

    def test_matching_slopes(self):
        expected_zero, expected_pi = self.ds.c1_scaling_exponents(0.7)
        self.assertAlmostEqual(expected_zero, 0.8, places=12)
        self.assertEqual(expected_pi, 0.0)
        self.assertAlmostEqual(self.ds.c1_loglog_slope(0.7, 0.0), expected_zero, delta=0.05)
        self.assertAlmostEqual(self.ds.c1_loglog_slope(0.7, math.pi), expected_pi, delta=0.05)
        self.assertAlmostEqual(self.ds.c1_loglog_slope(0.3, math.pi), 0.8, delta=0.05)

    def test_matching_constant_at_pi(self):
        coeffs = self.ds.matching_c1(1e-6, 1.0, 0.7, math.pi)
        self.assertAlmostEqual(coeffs.C1 / (-2.0 * math.sin(0.7 * math.pi) / math.pi), 1.0, delta=1e-2)

    def test_matching_singular_at_half_flux(self):
        with self.assertRaises(SingularSystemError):
            self.ds.matching_c1(0.1, 1.0, 0.5, 0.0)

    def test_kernel_transpose_symmetry(self):
        forward = self.ds.greens_partial(1, 0.7, 0.8, 1.9, mu=0.3, m=1.0, s=-1).values
        backward = self.ds.greens_partial(1, 0.7, 1.9, 0.8, mu=0.3, m=1.0, s=-1).values
        np.testing.assert_allclose(forward, backward.T, rtol=1e-10)

    def test_kernel_diagonal_structure(self):
        lam = math.hypot(1.0, 0.7)
        kernel = self.ds.greens_partial(1, 0.7, 1.2, 1.2, mu=0.3, m=1.0, s=1)
        value, _ = SpecialFunctions.ki_product(1.3, lam * 1.2)
        self.assertAlmostEqual(kernel.values[0, 0] / (-1.0 * value), 1.0, delta=1e-12)
        self.assertEqual(kernel.wronskian, -1.0)

    def test_kernel_off_diagonal_jump(self):
        r, delta = 1.1, 1e-8
        for s in (-1, 1):
            below = self.ds.greens_partial(2, 0.4, r, r + delta, mu=-0.6, m=0.5, s=s).values
            above = self.ds.greens_partial(2, 0.4, r + delta, r, mu=-0.6, m=0.5, s=s).values
            self.assertAlmostEqual((below[0, 1] - above[0, 1]) * r, -1.0, delta=1e-6)
            self.assertAlmostEqual(below[0, 0], above[0, 0], delta=1e-7)

    def test_kernel_scaling(self):
        c = 3.0
        base = self.ds.greens_partial(0, 0.9, 0.7, 1.4, mu=0.25, m=1.0, s=-1).values
        scaled = self.ds.greens_partial(0, 0.9 / c, c * 0.7, c * 1.4, mu=0.25, m=1.0 / c, s=-1).values
        np.testing.assert_allclose(c * scaled, base, rtol=1e-12)

    def test_current_trace(self):
        for l, mu in ((0, 0.3), (-1, 0.3), (2, -0.45)):
            kappa = l + mu
            lam = math.hypot(0.8, 1.1)
            x = lam * 0.9
            product = special.iv(abs(kappa), x) * special.kv(abs(kappa), x)
            expected = -math.copysign(1.0, kappa) * 4.0 * abs(kappa) / 0.9 * product
            self.assertAlmostEqual(self.ds.current_trace(l, 1.1, 0.9, mu, 0.8) / expected, 1.0, delta=1e-12)

    def test_charge_trace(self):
        for l, mu in ((0, 0.3), (-1, 0.3)):
            kappa, m = l + mu, 0.8
            nu, sigma = abs(kappa), math.copysign(1.0, kappa)
            x = math.hypot(m, 1.1) * 0.9

            def p(order):
                return special.iv(order, x) * special.kv(abs(order), x)

            expected = -m * (p(nu + sigma) - p(nu - sigma))
            self.assertAlmostEqual(self.ds.charge_trace(l, 1.1, 0.9, mu, m) / expected, 1.0, delta=1e-11)


if __name__ == '__main__':
    unittest.main()
