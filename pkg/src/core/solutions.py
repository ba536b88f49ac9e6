"""
This module implements the radial Dirac doublets of the Aharonov-Bohm problem and the objects built from them.

The radial system for the doublet (f1, f2) with kappa = l + mu reads

    s f2' + (kappa + s) / r f2 - (E - m) f1 = 0,
    -s f1' + kappa / r f1 - (E + m) f2 = 0.

It provides the regular, irregular, MacDonald, modified-I, free-region, bound and self-adjoint
extension doublets, the Wronskian and its closed form, bound-state normalization, the boundary
form at the origin, the finite-radius matching coefficients, and the partial Green's kernel on
the imaginary energy axis together with its spin-summed traces.
"""
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy import integrate, special

from core.specfun import ArrayLike, SpecialFunctions
from utils.errors import (DomainError, ExtrapolationError, KinematicError, ParameterMismatchError,
                          RangeError, SingularSystemError)
from utils.extrapolation import limit_with_exponents


class DoubletKind(Enum):
    """
    The kinds of radial doublets.
    """
    REGULAR_F = "regular-F"
    IRREGULAR_U = "irregular-U"
    MACDONALD_V = "macdonald-V"
    MODIFIED_I = "modified-I"
    FREE_S = "free-S"
    BOUND_V0 = "bound-V0"
    SAE_REGULAR = "sae-regular"


@dataclass(frozen=True)
class DoubletParams:
    """
    Parameters of a radial doublet.

    Attributes:
        E:          Energy.
        m:          Fermion mass (>= 0).
        l:          Orbital quantum number.
        mu:         Flux parameter.
        s:          Spin parameter (+1 or -1).
        theta:      Self-adjoint extension angle in [0, 2 pi] (sae-regular only).
        amplitude:  Overall constant factor.
    """
    E: float
    m: float
    l: int = 0
    mu: float = 0.0
    s: int = -1
    theta: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.s not in (-1, 1):
            raise DomainError(f"spin parameter must be +1 or -1, got {self.s}", "DoubletParams")
        if self.m < 0:
            raise DomainError(f"mass must be nonnegative, got {self.m}", "DoubletParams")

    @property
    def kappa(self) -> float:
        return self.l + self.mu

    @property
    def sigma(self) -> int:
        """
        Branch sign of l + mu; the zero-flux l = 0 channel counts as positive.
        """
        return 1 if self.kappa >= 0 else -1

    @property
    def nu(self) -> float:
        return abs(self.kappa)

    @property
    def beta(self) -> float:
        return self.mu - math.floor(self.mu)

    def same_channel(self, other: "DoubletParams") -> bool:
        """
        True when both parameter sets share (E, l, mu, s).
        """
        return (self.E, self.l, self.mu, self.s) == (other.E, other.l, other.mu, other.s)


@dataclass(frozen=True)
class RadialDoublet:
    """
    A radial doublet r -> (f1(r), f2(r)) of a given kind.

    Instances are immutable; evaluation is vectorized over r.

    Attributes:
        kind:   The kind of solution.
        params: Energy, channel and amplitude of the solution.
    """
    kind: DoubletKind
    params: DoubletParams

    def __call__(self, r: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
        return self.evaluate(r)

    @property
    def momentum(self) -> float:
        """
        p = sqrt(E^2 - m^2) for scattering kinds, lambda = sqrt(m^2 - E^2) for decaying kinds.
        """
        return math.sqrt(abs(self.params.E ** 2 - self.params.m ** 2))

    def evaluate(self, r: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
        """
        Evaluate both components.

        Args:
            r: Positive radius or array of radii.

        Returns:
            The pair (f1, f2).
        """
        p = self.params
        x = self.momentum * np.asarray(r, dtype=float)
        sigma, nu, s, amp = p.sigma, p.nu, p.s, p.amplitude
        sf = SpecialFunctions

        if self.kind in (DoubletKind.REGULAR_F, DoubletKind.FREE_S, DoubletKind.IRREGULAR_U,
                         DoubletKind.SAE_REGULAR):
            upper = math.sqrt(abs(p.E + p.m))
            lower = math.copysign(1.0, p.E) * math.sqrt(abs(p.E - p.m))
            regular = (upper * sf.bessel_j(nu, x), sigma * lower * sf.bessel_j(nu + sigma * s, x))
            if self.kind in (DoubletKind.REGULAR_F, DoubletKind.FREE_S):
                return amp * regular[0], amp * regular[1]
            irregular = (upper * sf.bessel_j(-nu, x), -sigma * lower * sf.bessel_j(-nu - sigma * s, x))
            if self.kind == DoubletKind.IRREGULAR_U:
                return amp * irregular[0], amp * irregular[1]
            c, w = math.cos(p.theta / 2.0), math.sin(p.theta / 2.0)
            return amp * (c * regular[0] - w * irregular[0]), amp * (c * regular[1] - w * irregular[1])

        upper = math.sqrt(p.m + p.E)
        lower = math.sqrt(p.m - p.E)
        if self.kind == DoubletKind.MODIFIED_I:
            return amp * upper * sf.bessel_i(nu, x), -amp * s * lower * sf.bessel_i(nu + sigma * s, x)
        return amp * upper * sf.bessel_k(nu, x), amp * s * lower * sf.bessel_k(nu + sigma * s, x)

    def leading_exponents(self) -> Tuple[List[float], List[float]]:
        """
        Powers of r with which the components start as r -> 0.

        Returns:
            Lists of exponents for the upper and the lower component.
        """
        nu, shift = self.params.nu, self.params.sigma * self.params.s

        def regular_power(order: float) -> float:
            return abs(order) if float(order).is_integer() else order

        regular = ([regular_power(nu)], [regular_power(nu + shift)])
        irregular = ([regular_power(-nu)], [regular_power(-nu - shift)])
        if self.kind in (DoubletKind.REGULAR_F, DoubletKind.FREE_S, DoubletKind.MODIFIED_I):
            return regular
        if self.kind == DoubletKind.IRREGULAR_U:
            return irregular
        if self.kind == DoubletKind.SAE_REGULAR:
            return regular[0] + irregular[0], regular[1] + irregular[1]
        return [-nu, nu], [-abs(nu + shift), abs(nu + shift)]

    @property
    def square_integrable_at_origin(self) -> bool:
        upper, lower = self.leading_exponents()
        return min(upper + lower) > -1.0

    @property
    def square_integrable_at_infinity(self) -> bool:
        return self.kind in (DoubletKind.MACDONALD_V, DoubletKind.BOUND_V0)


@dataclass(frozen=True)
class GreensKernel:
    """
    The 2x2 partial Green's kernel of one orbital channel on the imaginary energy axis.

    Attributes:
        l:          Orbital quantum number.
        omega:      Imaginary part of the energy, E = i omega.
        r:          First radius.
        rp:         Second radius.
        values:     The 2x2 kernel.
        wronskian:  Wronskian of the regular and decaying doublets used to build it.
    """
    l: int
    omega: float
    r: float
    rp: float
    values: np.ndarray
    wronskian: float


@dataclass(frozen=True)
class MatchingCoefficients:
    """
    Coefficients joining the outer extension doublet to the inner K/I doublets at r = R.

    Attributes:
        C1:         Coefficient of the K doublet.
        C2:         Coefficient of the I doublet.
        W_match:    Determinant K_beta I_{1-beta} - K_{1-beta} I_beta at z.
        E:          Energy.
        R:          Matching radius.
        beta:       Fractional flux.
        theta:      Extension angle.
        residual:   Relative residual of the solved linear system.
    """
    C1: float
    C2: float
    W_match: float
    E: float
    R: float
    beta: float
    theta: float
    residual: float


class DiracSolutions:
    """
    A class collecting the operations on radial doublets.

    Attributes:
        STENCIL_STEP (float):       Relative finite-difference step of the residual check.
        BOUNDARY_START (float):     Largest radius of the mesh used for r -> 0 limits.
        BOUNDARY_POINTS (int):      Number of mesh points r_k = r0 2^{-k}.
        SINGULAR_TOL (float):       Relative size below which a matching determinant is singular.
    """
    STENCIL_STEP = 1e-4
    BOUNDARY_START = 1e-3
    BOUNDARY_POINTS = 16
    SINGULAR_TOL = 1e-12

    @staticmethod
    def make_doublet(kind: DoubletKind, params: DoubletParams) -> RadialDoublet:
        """
        Build a radial doublet, checking the kinematic region of its kind.

        The bound and extension doublets live in the attractive channel of their spin:
        l + mu = beta for s = -1 and l + mu = beta - 1 for s = +1. The bound doublet is
        normalized to unit norm times the given amplitude.

        Args:
            kind:   The kind of doublet.
            params: Energy, channel and amplitude.

        Returns:
            The doublet.

        Raises:
            KinematicError: If p or lambda would be imaginary.
            DomainError:    On an invalid flux, order or angle.
        """
        E2, m2 = params.E ** 2, params.m ** 2
        if kind == DoubletKind.FREE_S:
            params = replace(params, mu=0.0)

        if kind in (DoubletKind.REGULAR_F, DoubletKind.IRREGULAR_U, DoubletKind.FREE_S, DoubletKind.SAE_REGULAR):
            if E2 <= m2:
                raise KinematicError(f"need E^2 > m^2, got E={params.E}, m={params.m}", "make_doublet")
        elif E2 >= m2:
            raise KinematicError(f"need E^2 < m^2, got E={params.E}, m={params.m}", "make_doublet")

        if kind in (DoubletKind.BOUND_V0, DoubletKind.SAE_REGULAR):
            if float(params.mu).is_integer():
                raise DomainError(f"flux must be fractional, got {params.mu}", "make_doublet")
            n = math.floor(params.mu)
            params = replace(params, l=-n if params.s == -1 else -n - 1)
        if kind == DoubletKind.SAE_REGULAR and not 0.0 <= params.theta <= 2.0 * math.pi:
            raise DomainError(f"theta must lie in [0, 2 pi], got {params.theta}", "make_doublet")
        if kind == DoubletKind.IRREGULAR_U and float(params.nu).is_integer():
            raise DomainError(f"irregular doublet is dependent at integer order {params.nu}", "make_doublet")
        if kind == DoubletKind.BOUND_V0:
            lam = math.sqrt(m2 - E2)
            norm = DiracSolutions.normalize_bound(params.nu, lam, params.E, params.m)
            params = replace(params, amplitude=params.amplitude * norm)
        return RadialDoublet(kind, params)

    @staticmethod
    def dirac_residual(d: RadialDoublet, r: float) -> float:
        """
        Largest residual of the two radial equations at r, using a 5-point derivative stencil.

        Args:
            d:  The doublet.
            r:  Radius.

        Returns:
            max(|row 1|, |row 2|).

        Raises:
            RangeError: If the stencil would reach r <= 0.
        """
        h = DiracSolutions.STENCIL_STEP * max(1.0, r)
        if r - 2.0 * h <= 0.0:
            raise RangeError(f"stencil step {h} underflows at r={r}", "dirac_residual")
        f1, f2 = d.evaluate(r + h * np.arange(-2.0, 3.0))
        stencil = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
        d1, d2 = stencil @ f1, stencil @ f2

        p = d.params
        row1 = p.s * d2 + (p.kappa + p.s) / r * f2[2] - (p.E - p.m) * f1[2]
        row2 = -p.s * d1 + p.kappa / r * f1[2] - (p.E + p.m) * f2[2]
        return float(max(abs(row1), abs(row2)))

    @staticmethod
    def wronskian(v: RadialDoublet, f: RadialDoublet, r: float) -> float:
        """
        Wr(v, f) = r (v1 f2 - f1 v2).

        Raises:
            ParameterMismatchError: If the doublets do not share (E, l, mu, s).
        """
        if not v.params.same_channel(f.params):
            raise ParameterMismatchError("doublets must share (E, l, mu, s)", "wronskian")
        v1, v2 = v.evaluate(r)
        f1, f2 = f.evaluate(r)
        return float(r * (v1 * f2 - f1 * v2))

    @staticmethod
    def wronskian_closed(
            s: int,
            amplitude_v: float = 1.0,
            amplitude_f: float = 1.0,
            nu: Optional[float] = None,
            lam: Optional[float] = None,
            p: Optional[float] = None
    ) -> float:
        """
        Closed form of the Wronskian of the MacDonald doublet and the regular doublet.

        Below threshold Wr(V, modified-I) = -s A C. With nu, lam and p given, the regular doublet
        is the continuation F = (p / lam)^nu modified-I and the result is -s A C lam^{-nu} p^nu.

        Args:
            s:              Spin parameter.
            amplitude_v:    Amplitude A of the MacDonald doublet.
            amplitude_f:    Amplitude C of the regular doublet.
            nu:             Bessel order (continued form only).
            lam:            Decay constant (continued form only).
            p:              Momentum (continued form only).

        Returns:
            The Wronskian.
        """
        value = -s * amplitude_v * amplitude_f
        if nu is None:
            return value
        if lam is None or p is None or lam <= 0 or p <= 0:
            raise DomainError("continued form needs nu, lam > 0 and p > 0", "wronskian_closed")
        return value * lam ** (-nu) * p ** nu

    @staticmethod
    def normalize_bound(beta: float, lam: float, E: float, m: float, method: str = "closed") -> float:
        """
        Normalization N of the bound doublet (sqrt(m+E) K_beta, -+sqrt(m-E) K_{1-beta})(lam r).

        With int_0^inf t K_nu(t)^2 dt = pi nu / (2 sin(pi nu)) the closed form is
        N = lam sqrt(2 sin(pi beta) / (pi [(m+E) beta + (m-E)(1-beta)])).

        Args:
            beta:   Order of the upper component, in (0, 1).
            lam:    Decay constant, 0 < lam <= m.
            E:      Energy, |E| <= m.
            m:      Fermion mass.
            method: "closed" or "quadrature".

        Returns:
            N > 0.
        """
        if not 0.0 < beta < 1.0:
            raise DomainError(f"beta must lie in (0, 1), got {beta}", "normalize_bound")
        if not 0.0 < lam <= m or abs(E) > m:
            raise KinematicError(f"need 0 < lambda <= m and |E| <= m, got {lam}, {E}, {m}", "normalize_bound")

        if method == "closed":
            weight = (m + E) * beta + (m - E) * (1.0 - beta)
            return lam * math.sqrt(2.0 * math.sin(math.pi * beta) / (math.pi * weight))
        if method != "quadrature":
            raise DomainError(f"unknown method {method!r}", "normalize_bound")

        def density(r: float) -> float:
            x = lam * r
            return r * ((m + E) * special.kv(beta, x) ** 2 + (m - E) * special.kv(1.0 - beta, x) ** 2)

        split = 1.0 / lam
        head, head_err = integrate.quad(density, 0.0, split, epsabs=1e-14, epsrel=1e-11, limit=400)
        tail, tail_err = integrate.quad(density, split, np.inf, epsabs=1e-14, epsrel=1e-11, limit=400)
        SpecialFunctions.check_quadrature(head + tail, head_err + tail_err, 1e-12, 1e-10, "normalize_bound")
        return 1.0 / math.sqrt(head + tail)

    @staticmethod
    def boundary_form(
            d: RadialDoublet,
            companion: Optional[RadialDoublet] = None,
            r0: float = BOUNDARY_START,
            points: int = BOUNDARY_POINTS
    ) -> float:
        """
        Limit r -> 0 of r (f1 g2 - f2 g1) for the doublet f and a companion g.

        Without a companion the form pairs the doublet with its own conjugate, which is the radial
        probability current of the real solution. The limit is extrapolated on r_k = r0 2^{-k}
        with the powers of r predicted by the leading behavior of both doublets.

        Args:
            d:          The doublet f.
            companion:  The doublet g; defaults to f.
            r0:         Largest mesh radius.
            points:     Number of mesh points.

        Returns:
            The extrapolated limit.

        Raises:
            ExtrapolationError: If the extrapolation system is singular.
        """
        g = d if companion is None else companion
        radii = r0 * 2.0 ** -np.arange(points, dtype=float)
        f1, f2 = d.evaluate(radii)
        g1, g2 = g.evaluate(radii)
        form = radii * (f1 * g2 - f2 * g1)

        upper = d.leading_exponents()[0] + g.leading_exponents()[0]
        lower = d.leading_exponents()[1] + g.leading_exponents()[1]
        powers = sorted({round(1.0 + a + b + 2.0 * k, 9) for a in upper for b in lower for k in range(3)})
        exponents = [pw for pw in powers if pw > 1e-9][:6]
        if not exponents:
            raise ExtrapolationError("no vanishing powers in the boundary form", "boundary_form")
        return limit_with_exponents(radii, form, exponents)

    @staticmethod
    def matching_c1(E: float, R: float, beta: float, theta: float, m: float = 0.0) -> MatchingCoefficients:
        """
        Solve the continuity system at r = R between the outer extension doublet and the inner K/I pair.

        With f1 = cos(theta/2) J_beta(pR) - sin(theta/2) J_{-beta}(pR),
        f2 = cos(theta/2) J_{beta-1}(pR) + sin(theta/2) J_{1-beta}(pR), p = |E| and
        z = sqrt(m^2 + E^2) R, the system is

            f1 = C1 K_beta(z) + C2 I_beta(z),
            f2 = C1 K_{1-beta}(z) + C2 I_{1-beta}(z),

        so C1 = (f1 I_{1-beta} - f2 I_beta) / W with W = K_beta I_{1-beta} - K_{1-beta} I_beta.

        Args:
            E:      Energy (nonzero).
            R:      Matching radius.
            beta:   Fractional flux in (0, 1).
            theta:  Extension angle.
            m:      Fermion mass.

        Returns:
            The matching coefficients.

        Raises:
            SingularSystemError: If W vanishes (beta = 1/2).
        """
        if not 0.0 < beta < 1.0:
            raise DomainError(f"beta must lie in (0, 1), got {beta}", "matching_c1")
        if E == 0.0 or R <= 0.0 or m < 0.0:
            raise DomainError(f"need E != 0, R > 0, m >= 0, got {E}, {R}, {m}", "matching_c1")
        sf = SpecialFunctions
        x = abs(E) * R
        z = math.hypot(m, E) * R
        c, w = math.cos(theta / 2.0), math.sin(theta / 2.0)
        f1 = c * sf.bessel_j(beta, x) - w * sf.bessel_j(-beta, x)
        f2 = c * sf.bessel_j(beta - 1.0, x) + w * sf.bessel_j(1.0 - beta, x)

        matrix = np.array([[sf.bessel_k(beta, z), sf.bessel_i(beta, z)],
                           [sf.bessel_k(1.0 - beta, z), sf.bessel_i(1.0 - beta, z)]])
        rhs = np.array([f1, f2])
        det = float(matrix[0, 0] * matrix[1, 1] - matrix[1, 0] * matrix[0, 1])
        scale = abs(matrix[0, 0] * matrix[1, 1]) + abs(matrix[1, 0] * matrix[0, 1])
        if abs(det) <= DiracSolutions.SINGULAR_TOL * scale:
            raise SingularSystemError(f"matching determinant vanishes at beta={beta}, z={z}", "matching_c1")

        coeffs = np.linalg.solve(matrix, rhs)
        residual = float(np.linalg.norm(matrix @ coeffs - rhs) / max(np.linalg.norm(rhs), np.finfo(float).tiny))
        return MatchingCoefficients(C1=float(coeffs[0]), C2=float(coeffs[1]), W_match=det,
                                    E=E, R=R, beta=beta, theta=theta, residual=residual)

    @staticmethod
    def c1_scaling_exponents(beta: float) -> Tuple[float, float]:
        """
        Small-z powers of |C1| in ER for theta = 0 and theta = pi.

        Returns:
            (2 max(2 beta - 1, 0), 2 max(1 - 2 beta, 0)).
        """
        return 2.0 * max(2.0 * beta - 1.0, 0.0), 2.0 * max(1.0 - 2.0 * beta, 0.0)

    @staticmethod
    def c1_loglog_slope(
            beta: float,
            theta: float,
            m: float = 0.0,
            er_range: Tuple[float, float] = (1e-6, 1e-4),
            points: int = 9
    ) -> float:
        """
        Least-squares slope of log|C1| against log(ER) at R = 1.
        """
        energies = np.geomspace(er_range[0], er_range[1], points)
        values = [abs(DiracSolutions.matching_c1(E, 1.0, beta, theta, m).C1) for E in energies]
        slope, _ = np.polyfit(np.log(energies), np.log(values), 1)
        return float(slope)

    @staticmethod
    def greens_partial(l: int, omega: float, r: float, rp: float, mu: float, m: float, s: int = -1) -> GreensKernel:
        """
        Partial Green's kernel at E = i omega, built from the modified-I and MacDonald doublets.

        The amplitude products are replaced by their real parts, (m +- E) -> m and
        sqrt(m + E) sqrt(m - E) -> lambda = sqrt(m^2 + omega^2); the Wronskian is -s. For r <= rp
        the kernel is F(r) V(rp)^T / W and for r > rp it is the transpose of the kernel at (rp, r).

        Args:
            l:      Orbital quantum number.
            omega:  Imaginary part of the energy.
            r:      First radius.
            rp:     Second radius.
            mu:     Flux parameter.
            m:      Fermion mass.
            s:      Spin parameter.

        Returns:
            The kernel.
        """
        params = DoubletParams(E=0.0, m=m, l=l, mu=mu, s=s)
        if r <= 0 or rp <= 0:
            raise DomainError(f"radii must be positive, got {r}, {rp}", "greens_partial")
        lam = math.hypot(m, omega)
        if lam == 0.0:
            raise DomainError("kernel needs m^2 + omega^2 > 0", "greens_partial")

        nu, alpha = params.nu, params.nu + params.sigma * s
        inner, outer = lam * min(r, rp), lam * max(r, rp)
        damping = math.exp(inner - outer)

        def product(order_i: float, order_k: float) -> float:
            value = special.ive(order_i, inner) * special.kve(abs(order_k), outer) * damping
            if not math.isfinite(value):
                raise RangeError(f"kernel product overflows at order {order_i}", "greens_partial")
            return float(value)

        values = np.array([[-s * m * product(nu, nu), -lam * product(nu, alpha)],
                           [lam * product(alpha, nu), s * m * product(alpha, alpha)]])
        if r > rp:
            values = values.T
        return GreensKernel(l=l, omega=omega, r=r, rp=rp, values=values, wronskian=float(-s))

    @staticmethod
    def current_trace(l: int, omega: float, r: float, mu: float, m: float) -> float:
        """
        Spin-weighted off-diagonal trace sum_s s (G01 + G10) at coincident radii.

        Equals -sign(l + mu) (4 nu / r) I_nu K_nu(lambda r).
        """
        total = 0.0
        for s in (-1, 1):
            kernel = DiracSolutions.greens_partial(l, omega, r, r, mu, m, s).values
            total += s * (kernel[0, 1] + kernel[1, 0])
        return total

    @staticmethod
    def charge_trace(l: int, omega: float, r: float, mu: float, m: float) -> float:
        """
        Spin-summed trace G00 - G11 at coincident radii.

        Equals -m [P(nu + sigma) - P(nu - sigma)] with P(a) = I_a K_a(lambda r), signed order of I.
        """
        total = 0.0
        for s in (-1, 1):
            kernel = DiracSolutions.greens_partial(l, omega, r, r, mu, m, s).values
            total += kernel[0, 0] - kernel[1, 1]
        return total
