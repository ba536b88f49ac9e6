"""
This module implements the induced vacuum charge and current densities in the Aharonov-Bohm potential.

It provides the bound-state contributions, the free-continuum current from the regularized
pipeline (energy integral, sum over l, integral over y from delta, delta -> 0 extrapolation) for
massless and massive fermions, the closed forms and the massive estimate, the partial sums of the
free charge density and their limit, the finite-size suppression factors, and the assembly of
density profiles over a radial grid.

The charge is carried as e = charge_sign * e0 with e0 = 1; densities are per unit e0.
"""
import functools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from core.solutions import DiracSolutions
from core.specfun import SpecialFunctions
from core.spectrum import BoundState, BoundStateSolver
from utils.errors import DomainError, ExtrapolationError, NumericalError, QuadratureError
from utils.extrapolation import limit_with_exponents, richardson_limit
from utils.progress_level import ProgressLevel, report

ELECTRON_CHARGE = -1


@functools.lru_cache(maxsize=None)
def _legendre_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Legendre nodes and weights on [-1, 1].
    """
    return special.roots_legendre(n)


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Numerical controls of the vacuum pipelines.

    Attributes:
        l_max:                  Number of explicitly summed channels per branch.
        delta:                  Smallest lower limit of the y-integral.
        extrapolation_orders:   Geometric ladder of delta values (ratio 2), ending at delta.
        E_max:                  Upper cutoff of the energy integral in units of 1/r, or None for automatic.
        abs_tol:                Absolute tolerance of the adaptive quadratures.
        rel_tol:                Relative tolerance of the adaptive quadratures and of the l-tail bound.
    """
    l_max: int = 60
    delta: float = 0.01
    extrapolation_orders: Tuple[float, ...] = (0.08, 0.04, 0.02, 0.01)
    E_max: Optional[float] = None
    abs_tol: float = 1e-12
    rel_tol: float = 1e-8

    def __post_init__(self):
        if self.delta <= 0:
            raise DomainError(f"delta must be positive, got {self.delta}", "QuadratureSpec")
        if self.l_max < 10:
            raise DomainError(f"l_max must be at least 10, got {self.l_max}", "QuadratureSpec")
        orders = self.extrapolation_orders
        if len(orders) < 3 or not math.isclose(orders[-1], self.delta):
            raise DomainError("need at least three ladder values ending at delta", "QuadratureSpec")
        if any(not math.isclose(high, 2.0 * low) for high, low in zip(orders, orders[1:])):
            raise DomainError(f"ladder must halve at every step, got {orders}", "QuadratureSpec")
        if self.E_max is not None and self.E_max <= 0:
            raise DomainError(f"E_max must be positive, got {self.E_max}", "QuadratureSpec")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("tolerances must be positive", "QuadratureSpec")

    @classmethod
    def with_delta(cls, delta: float, points: int = 4, **kwargs) -> "QuadratureSpec":
        """
        Build quadrature controls whose ladder is delta * 2^k for k = points - 1, ..., 0.
        """
        orders = tuple(delta * 2.0 ** k for k in reversed(range(points)))
        return cls(delta=delta, extrapolation_orders=orders, **kwargs)


@dataclass
class DensityProfile:
    """
    Charge and current densities on a radial grid.

    Attributes:
        r_grid:         Strictly increasing radii.
        j0_b:           Bound-state charge density.
        jphi_b:         Bound-state current density.
        jphi_v:         Free-continuum current density.
        jphi_total:     Sum of the bound and continuum currents.
        errors:         Achieved error estimate of every jphi_v entry.
        metadata:       Flux, mass, radius, method and quadrature settings.
    """
    r_grid: np.ndarray
    j0_b: np.ndarray
    jphi_b: np.ndarray
    jphi_v: np.ndarray
    jphi_total: np.ndarray
    errors: np.ndarray
    metadata: Dict[str, object] = field(default_factory=dict)

    def rows(self) -> List[Dict[str, float]]:
        """
        One dictionary per grid point, in grid order.
        """
        columns = ("r_grid", "j0_b", "jphi_b", "jphi_v", "jphi_total", "errors")
        names = ("r", "j0_b", "jphi_b", "jphi_v", "jphi_total", "error")
        return [{name: float(getattr(self, column)[i]) for name, column in zip(names, columns)}
                for i in range(len(self.r_grid))]


class VacuumPolarization:
    """
    A class computing the vacuum polarization densities induced by the solenoid.

    Attributes:
        MASSIVE_CUTOFF (float):     Exponent at which the massive energy integrand is cut off.
        GAUSS_NODES (int):          Gauss-Legendre nodes of the massive energy integral.
        NONCONVERGENCE (float):     Relative achieved error treated as divergence.
        MAX_PAIRS (int):            Largest number of channel pairs summed at one y.
        Y_MAX (float):              Beyond this y the integrands are zero to double precision.
        progress_level:             The level of detail to show during computations.
        solver:                     The bound-state solver used for profiles.
    """
    MASSIVE_CUTOFF = 50.0
    GAUSS_NODES = 128
    NONCONVERGENCE = 1e-2
    MAX_PAIRS = 20000
    Y_MAX = 300.0

    def __init__(self):
        """
        Initialize the VacuumPolarization instance.
        """
        self.progress_level = ProgressLevel.NONE
        self.solver = BoundStateSolver()

    def set_progress_level(self, level: ProgressLevel) -> None:
        """
        Set the progress level for the pipelines and the owned bound-state solver.

        Args:
            level: The progress level to set.
        """
        self.progress_level = level
        self.solver.set_progress_level(level)

    @staticmethod
    def has_bound_contribution(bound: BoundState) -> bool:
        """
        True when the occupied bound level contributes: beta > 1/2 and a real bound energy.
        """
        return bound is not None and bound.beta > 0.5 and not bound.merged

    @staticmethod
    def bound_charge_density(r: float, bound: BoundState, charge_sign: int = ELECTRON_CHARGE) -> float:
        """
        Bound-state charge density -e N^2 [K_beta^2 + K_{1-beta}^2](lambda r).

        Args:
            r:              Radius.
            bound:          The bound state.
            charge_sign:    Sign of the fermion charge.

        Returns:
            The density, or 0.0 when has_bound_contribution is False.
        """
        if r <= 0:
            raise DomainError(f"radius must be positive, got {r}", "bound_charge_density")
        if not VacuumPolarization.has_bound_contribution(bound):
            return 0.0
        norm = DiracSolutions.normalize_bound(bound.beta, bound.lam, bound.E, bound.m)
        x = bound.lam * r
        k_beta = SpecialFunctions.bessel_k(bound.beta, x)
        k_dual = SpecialFunctions.bessel_k(1.0 - bound.beta, x)
        return -charge_sign * norm ** 2 * (k_beta ** 2 + k_dual ** 2)

    @staticmethod
    def bound_current_density(r: float, bound: BoundState, charge_sign: int = ELECTRON_CHARGE) -> float:
        """
        Bound-state current density -2e N^2 K_beta(lambda r) K_{1-beta}(lambda r).
        """
        if r <= 0:
            raise DomainError(f"radius must be positive, got {r}", "bound_current_density")
        if not VacuumPolarization.has_bound_contribution(bound):
            return 0.0
        norm = DiracSolutions.normalize_bound(bound.beta, bound.lam, bound.E, bound.m)
        x = bound.lam * r
        return (-2.0 * charge_sign * norm ** 2
                * SpecialFunctions.bessel_k(bound.beta, x) * SpecialFunctions.bessel_k(1.0 - bound.beta, x))

    @staticmethod
    def bound_total_charge(bound: BoundState, charge_sign: int = ELECTRON_CHARGE,
                           method: str = "closed") -> float:
        """
        Integral of the bound charge density over the plane, int j0_b 2 pi r dr.

        Args:
            bound:          The bound state.
            charge_sign:    Sign of the fermion charge.
            method:         "closed" or "quadrature".

        Returns:
            The total bound charge, 0.0 without a bound contribution.
        """
        if not VacuumPolarization.has_bound_contribution(bound):
            return 0.0
        if method == "closed":
            norm = DiracSolutions.normalize_bound(bound.beta, bound.lam, bound.E, bound.m)
            moments = SpecialFunctions.tk2_integral(bound.beta) + SpecialFunctions.tk2_integral(1.0 - bound.beta)
            return -charge_sign * 2.0 * math.pi * norm ** 2 * moments / bound.lam ** 2
        if method != "quadrature":
            raise DomainError(f"unknown method {method!r}", "bound_total_charge")

        def integrand(r: float) -> float:
            return 2.0 * math.pi * r * VacuumPolarization.bound_charge_density(r, bound, charge_sign)

        split = 1.0 / bound.lam
        head, head_err = integrate.quad(integrand, 0.0, split, epsabs=1e-14, epsrel=1e-11, limit=400)
        tail, tail_err = integrate.quad(integrand, split, np.inf, epsabs=1e-14, epsrel=1e-11, limit=400)
        SpecialFunctions.check_quadrature(head + tail, head_err + tail_err, 1e-12, 1e-10, "bound_total_charge")
        return head + tail

    @staticmethod
    def current_coefficient(beta: float) -> float:
        """
        Dimensionless coefficient (2 beta - 1)^2 tan(pi beta) / (32 pi) of the massless current.
        """
        VacuumPolarization._check_beta(beta, "current_coefficient")
        if beta == 0.5:
            return 0.0
        return (2.0 * beta - 1.0) ** 2 * math.tan(math.pi * beta) / (32.0 * math.pi)

    @staticmethod
    def tanh_coefficient(beta: float) -> float:
        """
        Coefficient (2 beta - 1)^2 tanh(pi beta) of the tanh form of the massless current.
        """
        VacuumPolarization._check_beta(beta, "tanh_coefficient")
        return (2.0 * beta - 1.0) ** 2 * math.tanh(math.pi * beta)

    @staticmethod
    def massless_current_closed(r: float, beta: float, charge_sign: int = ELECTRON_CHARGE) -> float:
        """
        Closed form of the massless continuum current, -e (2 beta - 1)^2 tan(pi beta) / (32 pi r^2).

        It is odd under beta -> 1 - beta and vanishes at beta = 1/2.

        Args:
            r:              Radius.
            beta:           Fractional flux in (0, 1).
            charge_sign:    Sign of the fermion charge.

        Returns:
            The current density.
        """
        if r <= 0:
            raise DomainError(f"radius must be positive, got {r}", "massless_current_closed")
        return -charge_sign * VacuumPolarization.current_coefficient(beta) / r ** 2

    @staticmethod
    def massless_current_tanh_form(r: float, beta: float, charge_sign: int = ELECTRON_CHARGE) -> float:
        """
        Tanh form e (2 beta - 1)^2 tanh(pi beta) / (4 pi r^2) of the massless current.
        """
        if r <= 0:
            raise DomainError(f"radius must be positive, got {r}", "massless_current_tanh_form")
        return charge_sign * VacuumPolarization.tanh_coefficient(beta) / (4.0 * math.pi * r ** 2)

    @staticmethod
    def massive_current_estimate(r: float, m: float, beta: float, charge_sign: int = ELECTRON_CHARGE,
                                 tanh_form: bool = False) -> float:
        """
        Massive estimate: the massless current with r^2 replaced by r^2 sqrt(1 + (m r)^2).

        Args:
            r:              Radius.
            m:              Fermion mass (>= 0).
            beta:           Fractional flux.
            charge_sign:    Sign of the fermion charge.
            tanh_form:      Scale the tanh form of the massless current instead of the closed one.

        Returns:
            The estimated current density.
        """
        if m < 0:
            raise DomainError(f"mass must be nonnegative, got {m}", "massive_current_estimate")
        massless = (VacuumPolarization.massless_current_tanh_form if tanh_form
                    else VacuumPolarization.massless_current_closed)
        return massless(r, beta, charge_sign) / math.sqrt(1.0 + (m * r) ** 2)

    @staticmethod
    def geometric_tail(c: float, start: int, y: float) -> float:
        """
        Sum over k >= start of (k + c) exp(-2 (k + c) y).
        """
        q = math.exp(-2.0 * y)
        return q ** (start + c) * ((start + c) / (1.0 - q) + q / (1.0 - q) ** 2)

    @staticmethod
    def lsum_closed(y: float, beta: float, signed: bool = False) -> float:
        """
        Closed form of the sum over all integers l of |l + beta| exp(-2 |l + beta| y).

        With a = 1 - 2 beta the unsigned sum is
        [cosh(ay) cosh(y) - a sinh(ay) sinh(y)] / (2 sinh^2 y); the signed sum, weighted by
        sign(l + beta), is [sinh(ay) cosh(y) - a cosh(ay) sinh(y)] / (2 sinh^2 y).

        Args:
            y:      Positive regularization variable.
            beta:   Fractional flux in (0, 1).
            signed: Weight every term by sign(l + beta).

        Returns:
            The value of the sum.
        """
        if y <= 0:
            raise DomainError(f"y must be positive, got {y}", "lsum_closed")
        VacuumPolarization._check_beta(beta, "lsum_closed")
        a = 1.0 - 2.0 * beta
        if signed:
            numerator = math.sinh(a * y) * math.cosh(y) - a * math.cosh(a * y) * math.sinh(y)
        else:
            numerator = math.cosh(a * y) * math.cosh(y) - a * math.sinh(a * y) * math.sinh(y)
        return numerator / (2.0 * math.sinh(y) ** 2)

    def massless_current_numeric(self, r: float, beta: float, spec: QuadratureSpec,
                                 charge_sign: int = ELECTRON_CHARGE) -> Tuple[float, float]:
        """
        Massless continuum current from the regularized pipeline.

        The energy integral of every channel is e^{-2 nu y} / (2r); the channels are summed
        explicitly for -l_max <= l + n <= l_max - 1 with the geometric remainder added in closed
        form; the y-integral runs from each delta of the ladder and the delta -> 0 limit is
        extrapolated with the powers 1, 3, 5 of the even integrand.

        Args:
            r:              Radius.
            beta:           Flux; any value with a nonzero fractional part.
            spec:           Numerical controls.
            charge_sign:    Sign of the fermion charge.

        Returns:
            The current density and its achieved error estimate.
        """
        if r <= 0:
            raise DomainError(f"radius must be positive, got {r}", "massless_current_numeric")
        flux = self.solver.flux_decompose(beta)
        kappas = (np.arange(-spec.l_max, spec.l_max) - flux.n) + flux.mu

        def signed_sum(y: float) -> float:
            explicit = float(np.sum(kappas * np.exp(-2.0 * np.abs(kappas) * y)))
            remainder = (self.geometric_tail(flux.beta, spec.l_max, y)
                         - self.geometric_tail(1.0 - flux.beta, spec.l_max, y))
            return explicit + remainder

        def integrand(y: float) -> float:
            if y > self.Y_MAX:
                return 0.0
            return signed_sum(y) / math.sinh(y)

        pieces, quad_error = self._ladder_integrals(integrand, spec, "massless_current_numeric")
        limit = limit_with_exponents(spec.extrapolation_orders, pieces, [1.0, 3.0, 5.0])
        coarse = limit_with_exponents(spec.extrapolation_orders[1:], pieces[1:], [1.0, 3.0])
        prefactor = -charge_sign / (4.0 * math.pi ** 2 * r ** 2)
        value = prefactor * limit
        extrapolation_error = abs(prefactor) * abs(limit - coarse)
        error = extrapolation_error + abs(prefactor) * quad_error
        self._check_convergence(value, extrapolation_error, abs(prefactor) * quad_error, spec,
                                "massless_current_numeric")
        report(self.progress_level, ProgressLevel.DETAILED,
               f"massless current at r={r:.6g}, beta={flux.beta:.6g}: {value:.12g} (+- {error:.2e})")
        return value, error

    def massive_current_numeric(self, r: float, m: float, beta: float, spec: QuadratureSpec,
                                charge_sign: int = ELECTRON_CHARGE) -> Tuple[float, float]:
        """
        Massive continuum current from the regularized pipeline.

        j = -(e / (2 pi^2 r)) int_delta^inf dy / sinh(y) sum_l sign(l + mu) nu
        int_0^inf dE exp(-2z coth y) I_{2nu}(2z / sinh y), z = sqrt(m^2 + E^2) r.

        For m > 0 the energy integral uses E = m sinh(u) and the exponentially scaled Bessel
        function; the channel sum is truncated once the geometric bound of its tail falls
        below 0.01 rel_tol of the unsigned sum. For m = 0 the energy integral is taken in
        closed form.

        Args:
            r:              Radius.
            m:              Fermion mass (>= 0).
            beta:           Flux; any value with a nonzero fractional part.
            spec:           Numerical controls.
            charge_sign:    Sign of the fermion charge.

        Returns:
            The current density and its achieved error estimate.
        """
        if r <= 0 or m < 0:
            raise DomainError(f"need r > 0 and m >= 0, got r={r}, m={m}", "massive_current_numeric")
        flux = self.solver.flux_decompose(beta)
        inner_errors: Dict[float, float] = {}

        def integrand(y: float) -> float:
            if y > self.Y_MAX:
                return 0.0
            pairs = self._pair_count(y, flux.beta, spec)
            nu = np.concatenate([flux.beta + np.arange(pairs), 1.0 - flux.beta + np.arange(pairs)])
            weights = np.concatenate([nu[:pairs], -nu[pairs:]])
            if m == 0.0:
                a, b = 2.0 * r / math.tanh(y), 2.0 * r / math.sinh(y)
                energy = SpecialFunctions.laplace_bessel_integral(a, b, 2.0 * nu)
            else:
                energy, error = self._massive_energy_integrals(y, r, m, flux.beta, pairs, spec)
                inner_errors[y] = float(np.abs(weights) @ error) / math.sinh(y)
            return float(weights @ energy) / math.sinh(y)

        pieces, quad_error = self._ladder_integrals(integrand, spec, "massive_current_numeric")
        limit = richardson_limit(2.0, pieces)
        coarse = richardson_limit(2.0, pieces[1:])
        prefactor = -charge_sign / (2.0 * math.pi ** 2 * r)
        value = prefactor * limit
        inner = 0.0
        if len(inner_errors) > 1:
            ys, errors = zip(*sorted(inner_errors.items()))
            inner = float(integrate.trapezoid(errors, ys))
        extrapolation_error = abs(prefactor) * abs(limit - coarse)
        quadrature_error = abs(prefactor) * (quad_error + inner)
        error = extrapolation_error + quadrature_error
        self._check_convergence(value, extrapolation_error, quadrature_error, spec, "massive_current_numeric")
        report(self.progress_level, ProgressLevel.DETAILED,
               f"massive current at r={r:.6g}, m={m:.6g}, beta={flux.beta:.6g}: {value:.12g} (+- {error:.2e})")
        return value, error

    def free_charge_partial_sums(self, r: float, m: float, beta: float, L: int,
                                 charge_sign: int = ELECTRON_CHARGE,
                                 spec: QuadratureSpec = QuadratureSpec()) -> List[float]:
        """
        Partial sums of the free-continuum charge density over the channels -L' <= l + n <= L' - 1.

        Every channel contributes the spin-summed charge trace integrated over the imaginary
        energy axis, j0 = (e / (2 pi^2)) int_0^inf d omega sum_l (-m) [P(nu + sigma) - P(nu - sigma)].

        Args:
            r:              Radius.
            m:              Fermion mass (> 0).
            beta:           Flux with a nonzero fractional part.
            L:              Largest cutoff L'.
            charge_sign:    Sign of the fermion charge.
            spec:           Quadrature tolerances.

        Returns:
            The partial sums for L' = 1, ..., L.
        """
        if L < 1:
            raise DomainError(f"L must be at least 1, got {L}", "free_charge_partial_sums")
        if r <= 0 or m <= 0:
            raise DomainError(f"need r > 0 and m > 0, got r={r}, m={m}", "free_charge_partial_sums")
        flux = self.solver.flux_decompose(beta)
        positive = flux.beta + np.arange(L)
        negative = 1.0 - flux.beta + np.arange(L)

        def products(orders: np.ndarray, z: float) -> np.ndarray:
            return special.ive(orders, z) * special.kve(np.abs(orders), z)

        def integrand(omega: float) -> np.ndarray:
            z = math.hypot(m, omega) * r
            up = products(positive + 1.0, z) - products(positive - 1.0, z)
            down = products(negative - 1.0, z) - products(negative + 1.0, z)
            return np.cumsum(up) + np.cumsum(down)

        sums, error = integrate.quad_vec(integrand, 0.0, np.inf, epsabs=spec.abs_tol, epsrel=spec.rel_tol)
        prefactor = -charge_sign * m / (2.0 * math.pi ** 2)
        report(self.progress_level, ProgressLevel.NORMAL,
               f"free charge partial sums up to L={L} at r={r:.6g} (error {error:.2e})")
        return [float(prefactor * value) for value in sums]

    @staticmethod
    def free_charge_limit(r: float, m: float, beta: float, charge_sign: int = ELECTRON_CHARGE,
                          spec: QuadratureSpec = QuadratureSpec()) -> float:
        """
        Limit of the free charge partial sums.

        The channel sum telescopes to (2/pi) sin(pi beta) [K_beta^2 - K_{1-beta}^2](z) per energy;
        the limit vanishes identically only at beta = 1/2.
        """
        if r <= 0 or m <= 0:
            raise DomainError(f"need r > 0 and m > 0, got r={r}, m={m}", "free_charge_limit")
        flux = BoundStateSolver.flux_decompose(beta)
        b = flux.beta

        def integrand(omega: float) -> float:
            z = math.hypot(m, omega) * r
            squares = special.kve(b, z) ** 2 - special.kve(1.0 - b, z) ** 2
            return 2.0 / math.pi * math.sin(math.pi * b) * squares * math.exp(-2.0 * z)

        value, error = integrate.quad(integrand, 0.0, np.inf, epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=200)
        SpecialFunctions.check_quadrature(value, error, spec.abs_tol, spec.rel_tol, "free_charge_limit")
        return -charge_sign * m / (2.0 * math.pi ** 2) * value

    @staticmethod
    def finite_size_suppression(r: float, R: float, beta: float, theta: float) -> Tuple[float, float]:
        """
        Suppression factors (R/r)^2 cos(theta/2) and (R/r)^{2 beta} sin(theta/2) at r >= 10 R.

        Args:
            r:      Radius.
            R:      Solenoid radius.
            beta:   Fractional flux.
            theta:  Extension angle.

        Returns:
            The two factors.
        """
        VacuumPolarization._check_beta(beta, "finite_size_suppression")
        if R <= 0 or r < 10.0 * R:
            raise DomainError(f"need r >= 10 R > 0, got r={r}, R={R}", "finite_size_suppression")
        ratio = R / r
        # sin((pi - theta)/2) is exactly zero at theta = pi
        return ratio ** 2 * math.sin((math.pi - theta) / 2.0), ratio ** (2.0 * beta) * math.sin(theta / 2.0)

    def density_profile(self, mu: float, m: float, R: float, grid: Sequence[float],
                        spec: QuadratureSpec = QuadratureSpec(), method: str = "numeric",
                        charge_sign: int = ELECTRON_CHARGE) -> DensityProfile:
        """
        Assemble the densities on a radial grid.

        Bound terms are included only when beta > 1/2 and lambda <= m. The continuum current is
        computed by the numeric pipeline ("numeric"), the closed form ("closed", massless) or
        the massive estimate ("estimate").

        Args:
            mu:             Flux parameter.
            m:              Fermion mass (>= 0).
            R:              Solenoid radius.
            grid:           Strictly increasing positive radii.
            spec:           Numerical controls.
            method:         "numeric", "closed" or "estimate".
            charge_sign:    Sign of the fermion charge.

        Returns:
            The density profile.

        Raises:
            DomainError:    On an invalid grid or method.
            NumericalError: Failure at a grid point, with the grid index in the message.
        """
        radii = np.asarray(grid, dtype=float)
        if radii.ndim != 1 or len(radii) == 0:
            raise DomainError("grid must be a nonempty sequence", "density_profile")
        if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
            raise DomainError("grid must be positive and strictly increasing", "density_profile")
        if method not in ("numeric", "closed", "estimate"):
            raise DomainError(f"unknown method {method!r}", "density_profile")
        if method == "closed" and m != 0.0:
            raise DomainError("the closed form is massless", "density_profile")

        flux = self.solver.flux_decompose(mu)
        bound = self.solver.solve_bound_state(mu, m, R) if m > 0 else None
        included = self.has_bound_contribution(bound)
        report(self.progress_level, ProgressLevel.NORMAL,
               f"Profile: mu={mu}, beta={flux.beta:.6g}, m={m}, R={R}, {len(radii)} points, "
               f"bound terms {'included' if included else 'absent'}")

        j0_b, jphi_b, jphi_v, errors = (np.zeros(len(radii)) for _ in range(4))
        for i, r in enumerate(radii):
            try:
                j0_b[i] = self.bound_charge_density(r, bound, charge_sign)
                jphi_b[i] = self.bound_current_density(r, bound, charge_sign)
                jphi_v[i], errors[i] = self._continuum_current(r, m, mu, spec, method, charge_sign)
            except NumericalError as error:
                raise type(error)(f"grid point {i} (r={r}): {error}", "density_profile",
                                  error.achieved_error) from error
            report(self.progress_level, ProgressLevel.DETAILED,
                   f"  [{i}] r={r:.6g}: j0_b={j0_b[i]:.6g}, jphi_b={jphi_b[i]:.6g}, jphi_v={jphi_v[i]:.6g}")

        metadata = {"mu": mu, "beta": flux.beta, "m": m, "R": R, "method": method,
                    "charge_sign": charge_sign, "bound_included": included,
                    "lambda": bound.lam if bound is not None else None,
                    "spec": {"l_max": spec.l_max, "delta": spec.delta,
                             "extrapolation_orders": list(spec.extrapolation_orders),
                             "E_max": spec.E_max, "abs_tol": spec.abs_tol, "rel_tol": spec.rel_tol}}
        return DensityProfile(r_grid=radii, j0_b=j0_b, jphi_b=jphi_b, jphi_v=jphi_v,
                              jphi_total=jphi_b + jphi_v, errors=errors, metadata=metadata)

    def _continuum_current(self, r: float, m: float, mu: float, spec: QuadratureSpec, method: str,
                           charge_sign: int) -> Tuple[float, float]:
        """
        Continuum current at one radius with the selected method.
        """
        beta = self.solver.flux_decompose(mu).beta
        if method == "closed":
            return self.massless_current_closed(r, beta, charge_sign), 0.0
        if method == "estimate":
            return self.massive_current_estimate(r, m, beta, charge_sign), 0.0
        if m == 0.0:
            return self.massless_current_numeric(r, mu, spec, charge_sign)
        return self.massive_current_numeric(r, m, mu, spec, charge_sign)

    def _ladder_integrals(self, integrand, spec: QuadratureSpec, operation: str) -> Tuple[List[float], float]:
        """
        Integrals of the integrand from every delta of the ladder to infinity.

        The piece beyond the largest delta and the pieces between neighbouring deltas are
        integrated once and accumulated.
        """
        orders = spec.extrapolation_orders
        value, total_error = self._quad(integrand, orders[0], np.inf, spec, operation)
        pieces = [value]
        for upper, lower in zip(orders, orders[1:]):
            piece, error = self._quad(integrand, lower, upper, spec, operation)
            total_error += error
            pieces.append(pieces[-1] + piece)
        report(self.progress_level, ProgressLevel.DETAILED,
               "  ladder " + ", ".join(f"{d:.3g}: {v:.12g}" for d, v in zip(orders, pieces)))
        return pieces, total_error

    @staticmethod
    def _quad(integrand, lower: float, upper: float, spec: QuadratureSpec, operation: str) -> Tuple[float, float]:
        value, error = integrate.quad(integrand, lower, upper, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                                      limit=SpecialFunctions.QUAD_LIMIT)
        SpecialFunctions.check_quadrature(value, error, spec.abs_tol, spec.rel_tol, operation)
        return value, error

    def _pair_count(self, y: float, beta: float, spec: QuadratureSpec) -> int:
        """
        Number of channel pairs after which the geometric tail bound drops below 0.01 rel_tol.
        """
        scale = self.lsum_closed(y, beta)
        pairs = 16
        while (self.geometric_tail(beta, pairs, y) + self.geometric_tail(1.0 - beta, pairs, y)
               > 0.01 * spec.rel_tol * scale):
            pairs *= 2
            if pairs > self.MAX_PAIRS:
                raise QuadratureError(f"channel tail does not converge at y={y}", "massive_current_numeric")
        return pairs

    def _massive_energy_integrals(self, y: float, r: float, m: float, beta: float, pairs: int,
                                  spec: QuadratureSpec) -> Tuple[np.ndarray, np.ndarray]:
        """
        Energy integrals of the channels nu = beta + k and 1 - beta + k (k < pairs) at one y for
        m > 0, with their error estimates.

        With E = m sinh(u) and z = m r cosh(u) the integrand is
        m cosh(u) ive(2 nu, 2z / sinh y) exp(-2z tanh(y / 2)), cut off where the exponent
        reaches MASSIVE_CUTOFF (or at E_max). The Bessel ladder of both families is shared by a
        GAUSS_NODES rule and a rule of half the size; their difference is the error estimate.
        """
        sinh_y, damping = math.sinh(y), math.tanh(y / 2.0)
        cutoff = math.acosh(max(1.0, self.MASSIVE_CUTOFF / (2.0 * m * r * damping)))
        if spec.E_max is not None:
            cutoff = min(cutoff, math.asinh(spec.E_max / (m * r)))

        fine_nodes, fine_weights = _legendre_rule(self.GAUSS_NODES)
        coarse_nodes, coarse_weights = _legendre_rule(self.GAUSS_NODES // 2)
        u = 0.5 * cutoff * (np.concatenate([fine_nodes, coarse_nodes]) + 1.0)
        z = m * r * np.cosh(u)
        ladder = SpecialFunctions.bessel_i_ladder(np.array([2.0 * beta, 2.0 - 2.0 * beta]), pairs,
                                                  2.0 * z / sinh_y)
        values = (ladder * (m * np.cosh(u) * np.exp(-2.0 * z * damping))).reshape(2 * pairs, len(u))

        split = len(fine_nodes)
        fine = 0.5 * cutoff * (values[:, :split] @ fine_weights)
        coarse = 0.5 * cutoff * (values[:, split:] @ coarse_weights)
        return fine, np.abs(fine - coarse)

    def _check_convergence(self, value: float, extrapolation_error: float, quadrature_error: float,
                           spec: QuadratureSpec, operation: str) -> None:
        """
        Raise when the achieved error exceeds max(1e3 abs_tol, NONCONVERGENCE |value|).

        The exception names the larger of the two error sources.
        """
        error = extrapolation_error + quadrature_error
        if math.isfinite(value) and error <= max(1e3 * spec.abs_tol, self.NONCONVERGENCE * abs(value)):
            return
        if quadrature_error > extrapolation_error:
            raise QuadratureError(f"quadrature error {quadrature_error:.3e} dominates", operation, error)
        raise ExtrapolationError(f"delta -> 0 limit did not converge (error {error:.3e})", operation, error)

    @staticmethod
    def _check_beta(beta: float, operation: str) -> None:
        if not 0.0 < beta < 1.0:
            raise DomainError(f"beta must lie in (0, 1), got {beta}", operation)
