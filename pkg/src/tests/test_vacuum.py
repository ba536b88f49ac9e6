"""
This module contains unit tests for the vacuum module.

It includes test cases for the bound-state densities, the closed and tanh-form massless currents,
the channel sums, the regularized massless and massive pipelines, the free charge partial sums,
the finite-size suppression factors, and the assembly of density profiles.
"""
import math
import unittest

import numpy as np

from core.solutions import DiracSolutions
from core.spectrum import BoundStateSolver
from core.vacuum import QuadratureSpec, VacuumPolarization
from utils.errors import DomainError, ExtrapolationError, QuadratureError
from utils.progress_level import ProgressLevel


def brute_lsum(y, beta, signed, reach=400):
    terms = []
    for l in range(-reach, reach + 1):
        kappa = l + beta
        weight = kappa if signed else abs(kappa)
        terms.append(weight * math.exp(-2.0 * abs(kappa) * y))
    return math.fsum(terms)


class TestQuadratureSpec(unittest.TestCase):
    def test_defaults(self):
        spec = QuadratureSpec()
        self.assertEqual(spec.extrapolation_orders[-1], spec.delta)
        self.assertGreaterEqual(spec.l_max, 10)

    def test_with_delta(self):
        spec = QuadratureSpec.with_delta(0.005, points=5)
        self.assertEqual(len(spec.extrapolation_orders), 5)
        self.assertAlmostEqual(spec.extrapolation_orders[0], 0.08, places=15)

    def test_rejections(self):
        with self.assertRaises(DomainError):
            QuadratureSpec(delta=0.0)
        with self.assertRaises(DomainError):
            QuadratureSpec(l_max=5)
        with self.assertRaises(DomainError):
            QuadratureSpec(extrapolation_orders=(0.08, 0.03, 0.01))
        with self.assertRaises(DomainError):
            QuadratureSpec(rel_tol=0.0)


class TestVacuumPolarization(unittest.TestCase):
    def setUp(self):
        """
        Initialize the VacuumPolarization instance for testing.
        """
        self.vacuum = VacuumPolarization()
        self.bound = BoundStateSolver().solve_bound_state(0.75, 2.0, 1.0)

    def test_progress_level_propagates(self):
        self.vacuum.set_progress_level(ProgressLevel.DETAILED)
        self.assertEqual(self.vacuum.solver.progress_level, ProgressLevel.DETAILED)

    def test_bound_state_is_present(self):
        self.assertFalse(self.bound.merged)
        self.assertTrue(self.vacuum.has_bound_contribution(self.bound))

    def test_bound_charge_localization(self):
        lam = self.bound.lam
        radii = np.linspace(5.0 / lam, 10.0 / lam, 6)
        densities = [self.vacuum.bound_charge_density(r, self.bound) for r in radii]
        rate = -np.polyfit(radii, np.log(densities), 1)[0]
        self.assertGreater(rate, 1.5 * lam)
        self.assertLess(rate, 2.5 * lam)

    def test_bound_current_ratio(self):
        lam = self.bound.lam
        for r in (0.1, 1.0, 3.0):
            ratio = self.vacuum.bound_current_density(r, self.bound) / self.vacuum.bound_charge_density(r, self.bound)
            self.assertGreater(ratio, 0.0)
            self.assertLessEqual(ratio, 1.0)
        far = 40.0 / lam
        ratio = self.vacuum.bound_current_density(far, self.bound) / self.vacuum.bound_charge_density(far, self.bound)
        self.assertGreater(ratio, 0.999)

    def test_bound_charge_sign(self):
        self.assertGreater(self.vacuum.bound_charge_density(1.0, self.bound), 0.0)
        self.assertLess(self.vacuum.bound_charge_density(1.0, self.bound, charge_sign=1), 0.0)

    def test_bound_densities_vanish_below_half_flux(self):
        state = BoundStateSolver().solve_bound_state(0.25, 2.0, 1.0)
        self.assertFalse(self.vacuum.has_bound_contribution(state))
        self.assertEqual(self.vacuum.bound_charge_density(1.0, state), 0.0)
        self.assertEqual(self.vacuum.bound_current_density(1.0, state), 0.0)

    def test_bound_densities_vanish_when_merged(self):
        state = BoundStateSolver().solve_bound_state(0.75, 0.5, 1.0)
        self.assertTrue(state.merged)
        self.assertEqual(self.vacuum.bound_charge_density(1.0, state), 0.0)

    def test_bound_total_charge(self):
        closed = self.vacuum.bound_total_charge(self.bound)
        quadrature = self.vacuum.bound_total_charge(self.bound, method="quadrature")
        self.assertAlmostEqual(quadrature / closed, 1.0, delta=1e-8)
        norm = DiracSolutions.normalize_bound(0.75, self.bound.lam, self.bound.E, 2.0)
        expected = math.pi ** 2 * norm ** 2 / (self.bound.lam ** 2 * math.sin(0.75 * math.pi))
        self.assertAlmostEqual(closed / expected, 1.0, delta=1e-12)

    def test_current_coefficient(self):
        self.assertEqual(self.vacuum.current_coefficient(0.5), 0.0)
        self.assertAlmostEqual(self.vacuum.current_coefficient(0.25), 0.25 / (32.0 * math.pi), places=15)
        for beta in (0.1, 0.3, 0.45):
            self.assertAlmostEqual(self.vacuum.current_coefficient(beta),
                                   -self.vacuum.current_coefficient(1.0 - beta), places=14)

    def test_massless_current_closed(self):
        value = self.vacuum.massless_current_closed(1.0, 0.25)
        self.assertAlmostEqual(value, 0.25 / (32.0 * math.pi), places=15)
        self.assertAlmostEqual(self.vacuum.massless_current_closed(2.0, 0.25), value / 4.0, places=15)
        self.assertAlmostEqual(self.vacuum.massless_current_closed(1.0, 0.25, charge_sign=1), -value, places=15)
        with self.assertRaises(DomainError):
            self.vacuum.massless_current_closed(0.0, 0.25)

    def test_tanh_coefficient(self):
        self.assertAlmostEqual(self.vacuum.tanh_coefficient(0.25), 0.1639485, delta=1e-7)
        self.assertAlmostEqual(self.vacuum.tanh_coefficient(1.0 - 1e-9), 0.9962721, delta=1e-6)
        tanh_form = self.vacuum.massless_current_tanh_form(1.0, 0.25)
        self.assertAlmostEqual(tanh_form, -0.1639485 / (4.0 * math.pi), delta=1e-8)

    def test_massive_estimate(self):
        closed = self.vacuum.massless_current_closed(1.0, 0.3)
        self.assertAlmostEqual(self.vacuum.massive_current_estimate(1.0, 1.0, 0.3), closed / math.sqrt(2.0), places=15)
        self.assertEqual(self.vacuum.massive_current_estimate(1.0, 0.0, 0.3), closed)
        tanh_form = self.vacuum.massive_current_estimate(2.0, 0.5, 0.3, tanh_form=True)
        self.assertAlmostEqual(tanh_form, self.vacuum.massless_current_tanh_form(2.0, 0.3) / math.sqrt(2.0), places=15)

    def test_lsum_closed_matches_brute_force(self):
        for y in (0.1, 0.5, 1.0, 3.0):
            for beta in (0.1, 0.5, 0.8):
                unsigned = self.vacuum.lsum_closed(y, beta)
                self.assertAlmostEqual(unsigned / brute_lsum(y, beta, False), 1.0, delta=1e-12)
                signed = self.vacuum.lsum_closed(y, beta, signed=True)
                self.assertAlmostEqual(signed, brute_lsum(y, beta, True), delta=1e-12 * unsigned)

    def test_lsum_closed_symmetry(self):
        for y in (0.2, 2.0):
            self.assertAlmostEqual(self.vacuum.lsum_closed(y, 0.3), self.vacuum.lsum_closed(y, 0.7), places=12)
            self.assertAlmostEqual(self.vacuum.lsum_closed(y, 0.3, signed=True),
                                   -self.vacuum.lsum_closed(y, 0.7, signed=True), places=12)

    def test_lsum_closed_large_y(self):
        y, beta = 20.0, 0.3
        leading = beta * math.exp(-2.0 * beta * y) + (1.0 - beta) * math.exp(-2.0 * (1.0 - beta) * y)
        self.assertAlmostEqual(self.vacuum.lsum_closed(y, beta) / leading, 1.0, delta=1e-9)

    def test_geometric_tail(self):
        brute = math.fsum((k + 0.3) * math.exp(-2.0 * (k + 0.3) * 0.2) for k in range(5, 600))
        self.assertAlmostEqual(self.vacuum.geometric_tail(0.3, 5, 0.2) / brute, 1.0, delta=1e-12)

    def test_massless_numeric_matches_closed(self):
        spec = QuadratureSpec()
        for beta in (0.1, 0.3, 0.5, 0.7, 0.9):
            closed = self.vacuum.massless_current_closed(1.0, beta)
            value, error = self.vacuum.massless_current_numeric(1.0, beta, spec)
            self.assertAlmostEqual(value, closed, delta=1e-4 * abs(closed) + 1e-12)
            self.assertLess(error, 1e-4 * abs(closed) + 1e-9)

    def test_massless_numeric_radial_scaling(self):
        spec = QuadratureSpec()
        for r in (0.5, 5.0, 20.0):
            closed = self.vacuum.massless_current_closed(r, 0.3)
            value, _ = self.vacuum.massless_current_numeric(r, 0.3, spec)
            self.assertAlmostEqual(value / closed, 1.0, delta=1e-4)

    def test_massless_numeric_flux_periodicity(self):
        spec = QuadratureSpec()
        reference, _ = self.vacuum.massless_current_numeric(1.0, 0.3, spec)
        for mu in (1.3, -0.7):
            shifted, _ = self.vacuum.massless_current_numeric(1.0, mu, spec)
            self.assertAlmostEqual(shifted / reference, 1.0, delta=1e-10)

    def test_massive_numeric_massless_limit(self):
        spec = QuadratureSpec()
        massless, _ = self.vacuum.massless_current_numeric(1.0, 0.3, spec)
        massive, _ = self.vacuum.massive_current_numeric(1.0, 0.0, 0.3, spec)
        self.assertAlmostEqual(massive / massless, 1.0, delta=1e-6)

    def test_massive_numeric_suppression(self):
        spec = QuadratureSpec(rel_tol=1e-6, abs_tol=1e-10)
        massless = self.vacuum.massless_current_closed(1.0, 0.25)
        ratios = []
        for m in (1.0, 3.0):
            massive, error = self.vacuum.massive_current_numeric(1.0, m, 0.25, spec)
            self.assertLess(abs(massive), abs(massless))
            self.assertLessEqual(error, max(1e3 * spec.abs_tol, 1e-2 * abs(massive)))
            ratios.append(massive / self.vacuum.massive_current_estimate(1.0, m, 0.25))
        self.assertGreater(ratios[1], 0.0)
        self.assertLess(ratios[1], 0.5 * ratios[0])

    def test_convergence_gate_names_error_source(self):
        spec = QuadratureSpec()
        self.vacuum._check_convergence(1.0, 1e-3, 1e-3, spec, "gate")
        with self.assertRaises(QuadratureError):
            self.vacuum._check_convergence(1.0, 1e-3, 0.05, spec, "gate")
        with self.assertRaises(ExtrapolationError):
            self.vacuum._check_convergence(1.0, 0.05, 1e-3, spec, "gate")
        with self.assertRaises(ExtrapolationError):
            self.vacuum._check_convergence(float("nan"), 0.0, 0.0, spec, "gate")

    def test_free_charge_cancels_at_half_flux(self):
        sums = self.vacuum.free_charge_partial_sums(1.0, 1.0, 0.5, 8)
        self.assertEqual(len(sums), 8)
        for value in sums:
            self.assertEqual(value, 0.0)
        self.assertEqual(self.vacuum.free_charge_limit(1.0, 1.0, 0.5), 0.0)

    def test_free_charge_partial_sums_converge(self):
        sums = self.vacuum.free_charge_partial_sums(1.0, 1.0, 0.3, 40)
        limit = self.vacuum.free_charge_limit(1.0, 1.0, 0.3)
        self.assertLess(abs(sums[39] - limit), 0.5 * abs(sums[9] - limit))

    def test_free_charge_limit_antisymmetry(self):
        self.assertAlmostEqual(self.vacuum.free_charge_limit(1.0, 1.0, 0.3),
                               -self.vacuum.free_charge_limit(1.0, 1.0, 0.7), places=12)

    def test_finite_size_suppression(self):
        first, second = self.vacuum.finite_size_suppression(20.0, 1.0, 0.75, 0.0)
        self.assertAlmostEqual(first, 1.0 / 400.0, places=15)
        self.assertEqual(second, 0.0)
        first, second = self.vacuum.finite_size_suppression(20.0, 1.0, 0.75, math.pi)
        self.assertEqual(first, 0.0)
        self.assertAlmostEqual(second, 20.0 ** -1.5, places=15)
        with self.assertRaises(DomainError):
            self.vacuum.finite_size_suppression(5.0, 1.0, 0.75, 0.0)

    def test_massless_profile(self):
        grid = [0.5, 1.0, 2.0, 4.0]
        profile = self.vacuum.density_profile(0.3, 0.0, 1.0, grid)
        self.assertFalse(profile.metadata["bound_included"])
        np.testing.assert_array_equal(profile.j0_b, np.zeros(4))
        scaled = profile.r_grid ** 2 * profile.jphi_v
        np.testing.assert_allclose(scaled, np.full(4, scaled[0]), rtol=1e-4)
        np.testing.assert_allclose(profile.jphi_total, profile.jphi_v)
        self.assertEqual(len(profile.rows()), 4)

    def test_profile_with_bound_terms(self):
        profile = self.vacuum.density_profile(0.75, 2.0, 1.0, [0.5, 1.0, 2.0], method="estimate")
        self.assertTrue(profile.metadata["bound_included"])
        self.assertTrue(np.all(profile.j0_b > 0.0))
        np.testing.assert_allclose(profile.jphi_total, profile.jphi_b + profile.jphi_v)
        np.testing.assert_array_equal(profile.errors, np.zeros(3))

    def test_profile_depends_on_fractional_flux_only(self):
        grid = [0.5, 1.0, 2.0]
        for mu, reduced in ((-0.25, 0.75), (-0.75, 0.25), (1.75, 0.75)):
            shifted = self.vacuum.density_profile(mu, 2.0, 1.0, grid, method="estimate")
            expected = self.vacuum.density_profile(reduced, 2.0, 1.0, grid, method="estimate")
            self.assertEqual(shifted.metadata["beta"], expected.metadata["beta"])
            self.assertEqual(shifted.metadata["bound_included"], expected.metadata["bound_included"])
            for column in ("j0_b", "jphi_b", "jphi_v", "jphi_total"):
                np.testing.assert_array_equal(getattr(shifted, column), getattr(expected, column))

    def test_negative_flux_bound_terms(self):
        grid = [0.5, 1.0, 2.0]
        above = self.vacuum.density_profile(-0.3, 2.0, 1.0, grid, method="estimate")
        below = self.vacuum.density_profile(-0.7, 2.0, 1.0, grid, method="estimate")
        self.assertTrue(above.metadata["bound_included"])
        self.assertTrue(np.all(above.j0_b > 0.0))
        self.assertFalse(below.metadata["bound_included"])
        np.testing.assert_array_equal(below.j0_b, np.zeros(3))
        np.testing.assert_allclose(above.jphi_v, -below.jphi_v, rtol=1e-12)

    def test_profile_rejections(self):
        with self.assertRaises(DomainError):
            self.vacuum.density_profile(0.3, 0.0, 1.0, [])
        with self.assertRaises(DomainError):
            self.vacuum.density_profile(0.3, 0.0, 1.0, [1.0, 0.5])
        with self.assertRaises(DomainError):
            self.vacuum.density_profile(0.3, 1.0, 1.0, [1.0], method="closed")
        with self.assertRaises(DomainError):
            self.vacuum.density_profile(0.3, 1.0, 1.0, [1.0], method="fourier")


if __name__ == '__main__':
    unittest.main()
