"""
This module implements the flux decomposition and the bound-state spectrum in the Aharonov-Bohm potential.

It provides the split of the flux parameter into integer and fractional parts, the choice of the
attractive spin orientation, the bound-state decay constant from the closed form and from the
transcendental pole condition, the particle/antiparticle energies, and the correspondence between
the solenoid radius and the self-adjoint extension parameter.
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import optimize, special

from core.specfun import SpecialFunctions
from utils.errors import DomainError, KinematicError, RootNotFoundError
from utils.progress_level import ProgressLevel, report


class Branch(Enum):
    """
    Energy branch of a bound level: the particle level leaves the upper continuum, the
    antiparticle level leaves the lower continuum.
    """
    PARTICLE = 1
    ANTIPARTICLE = -1


@dataclass(frozen=True)
class FluxDecomposition:
    """
    Flux parameter mu = n + beta with n the largest integer <= mu and 0 < beta < 1.

    Attributes:
        mu:     Dimensionless flux e0 * B.
        n:      Integer part of mu.
        beta:   Fractional part of mu.
        s:      Attractive spin parameter for this sign of the flux.
    """
    mu: float
    n: int
    beta: float
    s: int


@dataclass(frozen=True)
class PhysicalParams:
    """
    Physical parameters of the solenoid model.

    Attributes:
        m:              Fermion mass (> 0).
        R:              Solenoid radius in units of 1/m (> 0).
        charge_sign:    Sign of the fermion charge e = charge_sign * e0 (the model uses -1).
    """
    m: float
    R: float
    charge_sign: int = -1

    def __post_init__(self):
        if self.m <= 0 or self.R <= 0:
            raise DomainError(f"need m > 0 and R > 0, got m={self.m}, R={self.R}", "PhysicalParams")

    @property
    def mR(self) -> float:
        """
        The dimensionless control parameter of the spectrum map.
        """
        return self.m * self.R


@dataclass(frozen=True)
class BoundState:
    """
    A bound level of the attractive channel.

    Attributes:
        beta:   Fractional flux of the channel.
        R:      Solenoid radius.
        m:      Fermion mass.
        lam:    Decay constant lambda = sqrt(m^2 - E^2).
        E:      Energy of the level, or None when lambda > m (merged with the continuum).
        branch: Particle or antiparticle branch.
        s:      Spin parameter of the channel.
        xi:     Self-adjoint extension parameter reproducing lambda, or None for beta <= 1/2.
    """
    beta: float
    R: float
    m: float
    lam: float
    E: Optional[float]
    branch: Branch
    s: int
    xi: Optional[float] = None

    @property
    def merged(self) -> bool:
        """
        True when the level has crossed the continuum boundary and no bound energy exists.
        """
        return self.E is None


class BoundStateSolver:
    """
    A class computing the bound-state spectrum of a fermion in the Aharonov-Bohm potential.

    The pure operations are static; the sweep uses the configured progress level.

    Attributes:
        BRACKET (tuple):    Search interval of lambda * R for the transcendental solver.
        progress_level:     The level of detail to show during sweeps.
    """
    BRACKET = (1e-12, 2.0 * (1.0 + 1e-9))

    def __init__(self):
        """
        Initialize the BoundStateSolver instance.
        """
        self.progress_level = ProgressLevel.NONE

    def set_progress_level(self, level: ProgressLevel) -> None:
        """
        Set the progress level for the solver.

        Args:
            level: The progress level to set.
        """
        self.progress_level = level

    @staticmethod
    def flux_decompose(mu: float) -> FluxDecomposition:
        """
        Split the flux into its integer and fractional parts.

        Args:
            mu: Flux parameter, not an integer.

        Returns:
            The decomposition with the attractive spin for the sign of mu.

        Raises:
            DomainError: If mu is an integer.
        """
        if not math.isfinite(mu) or float(mu).is_integer():
            raise DomainError(f"flux must have a nonzero fractional part, got {mu}", "flux_decompose")
        n = math.floor(mu)
        return FluxDecomposition(mu=mu, n=n, beta=mu - n, s=BoundStateSolver.attractive_spin(mu))

    @staticmethod
    def attractive_spin(mu: float) -> int:
        """
        Spin orientation for which the spin-field interaction is attractive.

        Args:
            mu: Nonzero flux parameter.

        Returns:
            -1 for mu > 0 and +1 for mu < 0.
        """
        if mu == 0:
            raise DomainError("zero flux has no attractive orientation", "attractive_spin")
        return -1 if mu > 0 else 1

    @staticmethod
    def bound_lambda_closed(beta: float, R: float) -> float:
        """
        Closed-form decay constant lambda = (2/R) (Gamma(beta) / Gamma(2 - beta))^{1 / (2 (beta - 1))}.

        This is the exact root of the pole condition; it gives lambda R = 1 at beta = 1/2 and
        tends to 0 and 2 exp(-gamma_E) for beta -> 0 and beta -> 1.

        Args:
            beta:   Effective fractional flux in (0, 1).
            R:      Solenoid radius (> 0).

        Returns:
            lambda > 0.
        """
        BoundStateSolver._check_beta_radius(beta, R, "bound_lambda_closed")
        log_ratio = special.gammaln(beta) - special.gammaln(2.0 - beta)
        return 2.0 / R * math.exp(log_ratio / (2.0 * (beta - 1.0)))

    @staticmethod
    def bound_lambda_inverted_exponent(beta: float, R: float) -> float:
        """
        Variant (2/R) (Gamma(beta) / Gamma(2 - beta))^{2 (beta - 1)} with the reciprocal exponent.

        It coincides with bound_lambda_closed only at beta = 1/2.
        """
        BoundStateSolver._check_beta_radius(beta, R, "bound_lambda_inverted_exponent")
        log_ratio = special.gammaln(beta) - special.gammaln(2.0 - beta)
        return 2.0 / R * math.exp(2.0 * (beta - 1.0) * log_ratio)

    @staticmethod
    def pole_condition(x: float, beta: float, s_eff: int) -> float:
        """
        Left minus right side of the pole condition at x = lambda R / 2 with n = 0.

        x^{-a} / Gamma(1 - a) - x^{a} / Gamma(1 + a) - (1 + s_eff), a = beta + s_eff.

        Args:
            x:      Half the dimensionless decay constant.
            beta:   Effective fractional flux.
            s_eff:  Spin relative to the flux sign (-1 is attractive).

        Returns:
            The residual of the condition.
        """
        a = beta + s_eff
        return (x ** (-a) * special.rgamma(1.0 - a)
                - x ** a * special.rgamma(1.0 + a)
                - (1.0 + s_eff))

    @staticmethod
    def bound_lambda_transcendental(beta: float, R: float, m: float, s: int, mu_sign: int = 1) -> float:
        """
        Solve the pole condition for lambda by bracketed root finding.

        Args:
            beta:       Effective fractional flux in (0, 1).
            R:          Solenoid radius.
            m:          Fermion mass (kept for the signature of the physical problem).
            s:          Spin parameter.
            mu_sign:    Sign of the flux; the mirror mu < 0 flips the role of s.

        Returns:
            lambda, agreeing with bound_lambda_closed to machine-level tolerance.

        Raises:
            RootNotFoundError: If the condition has no root in the bracket (repulsive pairing).
        """
        BoundStateSolver._check_beta_radius(beta, R, "bound_lambda_transcendental")
        if m <= 0:
            raise DomainError(f"mass must be positive, got {m}", "bound_lambda_transcendental")
        s_eff = s * mu_sign
        low, high = (bound / 2.0 for bound in BoundStateSolver.BRACKET)
        f_low = BoundStateSolver.pole_condition(low, beta, s_eff)
        f_high = BoundStateSolver.pole_condition(high, beta, s_eff)
        if not (np.isfinite(f_low) and np.isfinite(f_high)) or f_low * f_high > 0:
            raise RootNotFoundError(
                f"no sign change of the pole condition for beta={beta}, s={s}, mu_sign={mu_sign}",
                "bound_lambda_transcendental"
            )

        root = optimize.brentq(BoundStateSolver.pole_condition, low, high, args=(beta, s_eff),
                               xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)

        # One Newton polish on the analytic derivative.
        a = beta + s_eff
        derivative = (-a * root ** (-a - 1.0) * special.rgamma(1.0 - a)
                      - a * root ** (a - 1.0) * special.rgamma(1.0 + a))
        if derivative != 0.0:
            root -= BoundStateSolver.pole_condition(root, beta, s_eff) / derivative
        return 2.0 * root / R

    @staticmethod
    def bound_energy(lam: float, m: float, branch: Branch) -> float:
        """
        Energy of a bound level from its decay constant.

        Args:
            lam:    Decay constant (> 0).
            m:      Fermion mass.
            branch: Particle (+) or antiparticle (-) branch.

        Returns:
            +-sqrt(m^2 - lambda^2).

        Raises:
            KinematicError: If lambda > m (level beyond the continuum boundary).
        """
        if lam > m:
            raise KinematicError(f"level beyond continuum boundary: lambda={lam} > m={m}", "bound_energy")
        return branch.value * math.sqrt(m * m - lam * lam)

    @staticmethod
    def sae_lambda(beta: float, m: float, xi: float) -> float:
        """
        Decay constant from the self-adjoint extension parameter.

        lambda = 2m (-Gamma(|beta - 1/2| + 1/2) / (xi Gamma(1/2 - |beta - 1/2|)))^{-2 |beta - 1/2|}.

        Args:
            beta:   Fractional flux in (0, 1), beta != 1/2.
            m:      Fermion mass.
            xi:     Extension parameter tan(theta / 2), nonzero with a positive base.

        Returns:
            lambda > 0.
        """
        if not 0.0 < beta < 1.0 or beta == 0.5:
            raise DomainError(f"need beta in (0, 1) without 1/2, got {beta}", "sae_lambda")
        if xi == 0.0 or not math.isfinite(xi):
            raise DomainError(f"xi must be finite and nonzero, got {xi}", "sae_lambda")
        a = abs(beta - 0.5)
        base = -SpecialFunctions.gamma(a + 0.5) / (xi * SpecialFunctions.gamma(0.5 - a))
        if base <= 0.0:
            raise DomainError(f"xi={xi} gives no real decay constant", "sae_lambda")
        return 2.0 * m * base ** (-2.0 * a)

    @staticmethod
    def xi_from_R(beta: float, m: float, R: float) -> float:
        """
        Extension parameter whose spectrum reproduces the closed-form lambda of radius R.

        xi = -(Gamma(beta) / Gamma(1 - beta)) (lambda / 2m)^{1 / (2 beta - 1)}.

        Args:
            beta:   Fractional flux in (1/2, 1).
            m:      Fermion mass.
            R:      Solenoid radius.

        Returns:
            xi < 0.
        """
        if not 0.5 < beta < 1.0:
            raise DomainError(f"need beta in (1/2, 1), got {beta}", "xi_from_R")
        if m * R <= 0:
            raise DomainError(f"need mR > 0, got {m * R}", "xi_from_R")
        lam = BoundStateSolver.bound_lambda_closed(beta, R)
        ratio = SpecialFunctions.gamma(beta) / SpecialFunctions.gamma(1.0 - beta)
        return -ratio * (lam / (2.0 * m)) ** (1.0 / (2.0 * beta - 1.0))

    @staticmethod
    def xi_from_R_leading_order(beta: float, m: float, R: float) -> float:
        """
        Leading-order map xi = -(mR)^{2 beta - 1} Gamma(2 - beta) / Gamma(beta).
        """
        if not 0.5 < beta < 1.0:
            raise DomainError(f"need beta in (1/2, 1), got {beta}", "xi_from_R_leading_order")
        return -(m * R) ** (2.0 * beta - 1.0) * SpecialFunctions.gamma(2.0 - beta) / SpecialFunctions.gamma(beta)

    @staticmethod
    def theta_from_xi(xi: float) -> float:
        """
        Extension angle theta in [0, 2 pi) with xi = tan(theta / 2).
        """
        return (2.0 * math.atan(xi)) % (2.0 * math.pi)

    @staticmethod
    def solve_bound_state(mu: float, m: float, R: float, s: Optional[int] = None) -> Optional[BoundState]:
        """
        Bound level of a given flux and spin.

        The level depends on the fractional part beta only. The integer part n is absorbed into
        the angular momentum, so mu and mu + 1 share one level, and a negative flux is handled
        through its fractional part 0 < beta < 1, whose attractive channel is s = -1 on the
        particle branch.

        Args:
            mu: Flux parameter, not an integer.
            m:  Fermion mass.
            R:  Solenoid radius.
            s:  Spin parameter of the reduced flux; defaults to the attractive orientation.

        Returns:
            The bound state, or None for the repulsive orientation.
        """
        params = PhysicalParams(m, R)
        beta = BoundStateSolver.flux_decompose(mu).beta
        attractive = BoundStateSolver.attractive_spin(beta)
        spin = attractive if s is None else s
        if spin != attractive:
            return None

        lam = BoundStateSolver.bound_lambda_closed(beta, params.R)
        branch = Branch.PARTICLE
        try:
            energy = BoundStateSolver.bound_energy(lam, params.m, branch)
        except KinematicError:
            energy = None
        xi = BoundStateSolver.xi_from_R(beta, params.m, params.R) if beta > 0.5 else None
        return BoundState(beta=beta, R=params.R, m=params.m, lam=lam, E=energy, branch=branch, s=spin, xi=xi)

    def spectrum_sweep(self, betas: Sequence[float], m: float, R: float) -> List[Dict[str, float]]:
        """
        Tabulate lambda, both energies and xi over a sweep of the fractional flux.

        Args:
            betas:  Fractional fluxes in (0, 1).
            m:      Fermion mass.
            R:      Solenoid radius.

        Returns:
            One row per beta; energies and xi are NaN where they do not exist.
        """
        if len(betas) == 0:
            raise DomainError("empty sweep", "spectrum_sweep")
        rows = []
        for beta in betas:
            lam = self.bound_lambda_closed(beta, R)
            merged = lam > m
            energy = float("nan") if merged else self.bound_energy(lam, m, Branch.PARTICLE)
            xi = self.xi_from_R(beta, m, R) if beta > 0.5 else float("nan")
            rows.append({
                "beta": beta,
                "lambda": lam,
                "E_particle": energy,
                "E_antiparticle": -energy,
                "xi": xi,
                "merged": float(merged),
            })
            report(self.progress_level, ProgressLevel.DETAILED,
                   f"beta={beta:.6g}: lambda={lam:.12g}, E=+-{energy:.12g}, xi={xi:.12g}")
        report(self.progress_level, ProgressLevel.NORMAL, f"Spectrum sweep: {len(rows)} rows")
        return rows

    @staticmethod
    def _check_beta_radius(beta: float, R: float, operation: str) -> None:
        """
        Validate the fractional flux and the radius.
        """
        if not 0.0 < beta < 1.0:
            raise DomainError(f"beta must lie in (0, 1), got {beta}", operation)
        if R <= 0:
            raise DomainError(f"radius must be positive, got {R}", operation)
