"""
This module implements the special-functions kernel used by the spectrum, doublet and vacuum modules.

It wraps the gamma function and the Bessel functions J, I, K of real order and positive argument
from scipy.special with domain checks and range reporting, and adds the two integral identities
the vacuum-density pipeline relies on: the product representation of K_nu(z) I_nu(z) and the
Laplace transform of I_nu.
"""
import math
from typing import Tuple, Union

import numpy as np
from scipy import integrate, special

from utils.errors import DomainError, PoleError, QuadratureError, RangeError

ArrayLike = Union[float, np.ndarray]


class SpecialFunctions:
    """
    A class collecting the special functions of real order needed by the package.

    All methods are static and pure; array arguments are evaluated element-wise.

    Attributes:
        MAX_ORDER (float):      Largest admissible |nu| for the Bessel functions.
        ABS_TOL (float):        Default absolute quadrature tolerance.
        REL_TOL (float):        Default relative quadrature tolerance.
        QUAD_LIMIT (int):       Subinterval limit passed to scipy.integrate.quad.
    """
    MAX_ORDER = 50.0
    ABS_TOL = 1e-10
    REL_TOL = 1e-8
    QUAD_LIMIT = 400

    @staticmethod
    def gamma(x: float) -> float:
        """
        Evaluate the Euler gamma function.

        Args:
            x: Real argument, not a nonpositive integer.

        Returns:
            Gamma(x).

        Raises:
            PoleError:  If x is 0, -1, -2, ...
            RangeError: If the result overflows.
        """
        if x <= 0 and float(x).is_integer():
            raise PoleError(f"gamma has a pole at x={x}", "gamma")
        value = float(special.gamma(x))
        if not math.isfinite(value):
            raise RangeError(f"gamma({x}) overflows", "gamma")
        return value

    @staticmethod
    def bessel_j(nu: ArrayLike, x: ArrayLike) -> ArrayLike:
        """
        Bessel function of the first kind J_nu(x) for real order and positive argument.

        Negative noninteger orders are evaluated from the defining series (scipy handles
        them directly), not through integer-order reflection.

        Args:
            nu: Real order, |nu| <= MAX_ORDER.
            x:  Positive argument.

        Returns:
            J_nu(x).
        """
        SpecialFunctions._check(nu, x, "bessel_j")
        return SpecialFunctions._finite(special.jv(nu, x), "bessel_j")

    @staticmethod
    def bessel_i(nu: ArrayLike, x: ArrayLike, scaled: bool = False) -> ArrayLike:
        """
        Modified Bessel function of the first kind I_nu(x).

        Args:
            nu:     Real order, |nu| <= MAX_ORDER.
            x:      Positive argument.
            scaled: If True, return exp(-x) * I_nu(x).

        Returns:
            I_nu(x), optionally exponentially scaled.
        """
        SpecialFunctions._check(nu, x, "bessel_i")
        value = special.ive(nu, x) if scaled else special.iv(nu, x)
        return SpecialFunctions._finite(value, "bessel_i")

    @staticmethod
    def bessel_k(nu: ArrayLike, x: ArrayLike, scaled: bool = False) -> ArrayLike:
        """
        MacDonald function K_nu(x); only |nu| matters since K_{-nu} = K_nu.

        Args:
            nu:     Real order, |nu| <= MAX_ORDER.
            x:      Positive argument.
            scaled: If True, return exp(x) * K_nu(x).

        Returns:
            K_nu(x), optionally exponentially scaled.

        Raises:
            RangeError: On overflow as x -> 0 with large |nu|.
        """
        SpecialFunctions._check(nu, x, "bessel_k")
        order = np.abs(nu)
        value = special.kve(order, x) if scaled else special.kv(order, x)
        return SpecialFunctions._finite(value, "bessel_k")

    @staticmethod
    def bessel_i_ladder(first_orders: np.ndarray, count: int, x: np.ndarray) -> np.ndarray:
        """
        Scaled Bessel functions exp(-x) I_{c + 2k}(x) for k = 0, ..., count - 1 and every start order c.

        The ratios rho_a = I_{a+1} / I_a follow from the backward recurrence
        rho_{a-1} = 1 / (2a / x + rho_a), started from the ratio at the highest order (or from
        zero where those values underflow). The ladder is then built upward from a direct
        evaluation at the start order.

        Args:
            first_orders:   Nonnegative start orders c, shape (F,).
            count:          Number of orders per ladder (>= 1).
            x:              Positive arguments, shape (N,).

        Returns:
            Array of shape (F, count, N).
        """
        orders = np.asarray(first_orders, dtype=float)[:, np.newaxis]
        x = np.asarray(x, dtype=float)
        if count < 1 or np.any(orders < 0) or np.any(x <= 0):
            raise DomainError("need count >= 1, nonnegative orders and positive arguments", "bessel_i_ladder")

        bottom = special.ive(orders, x)
        if count == 1:
            return bottom[:, np.newaxis, :]
        order = orders + 2.0 * (count - 1)
        upper, current = special.ive(order + 1.0, x), special.ive(order, x)
        rho = np.divide(upper, current, out=np.zeros_like(upper), where=current > 0)
        ratios = np.empty((len(orders), 2 * count - 2, len(x)))
        for j in range(2 * count - 3, -1, -1):
            rho = 1.0 / (2.0 * order / x + rho)
            order = order - 1.0
            ratios[:, j] = rho
        steps = np.cumprod(ratios[:, 0::2] * ratios[:, 1::2], axis=1)
        return np.concatenate([bottom[:, np.newaxis, :], bottom[:, np.newaxis, :] * steps], axis=1)

    @staticmethod
    def bessel_jp(nu: ArrayLike, x: ArrayLike) -> ArrayLike:
        """
        Derivative J'_nu(x) with respect to the argument.
        """
        SpecialFunctions._check(nu, x, "bessel_jp")
        return SpecialFunctions._finite(special.jvp(nu, x), "bessel_jp")

    @staticmethod
    def bessel_ip(nu: ArrayLike, x: ArrayLike) -> ArrayLike:
        """
        Derivative I'_nu(x) with respect to the argument.
        """
        SpecialFunctions._check(nu, x, "bessel_ip")
        return SpecialFunctions._finite(special.ivp(nu, x), "bessel_ip")

    @staticmethod
    def bessel_kp(nu: ArrayLike, x: ArrayLike) -> ArrayLike:
        """
        Derivative K'_nu(x) with respect to the argument.
        """
        SpecialFunctions._check(nu, x, "bessel_kp")
        return SpecialFunctions._finite(special.kvp(np.abs(nu), x), "bessel_kp")

    @staticmethod
    def bessel_j_small(nu: float, z: float) -> float:
        """
        Leading small-argument form z^nu / (2^nu Gamma(1 + nu)).

        Args:
            nu: Real order with 1 + nu not a nonpositive integer.
            z:  Small positive argument.

        Returns:
            The leading term of J_nu(z) (and of I_nu(z)) as z -> 0.
        """
        return (z / 2.0) ** nu / SpecialFunctions.gamma(1.0 + nu)

    @staticmethod
    def bessel_k_small(nu: float, z: float) -> float:
        """
        Two-term small-argument form of K_nu(z) for noninteger nu.

        Args:
            nu: Noninteger real order.
            z:  Small positive argument.

        Returns:
            -(pi / (2 sin(pi nu))) [ (z/2)^nu / Gamma(1+nu) - (z/2)^{-nu} / Gamma(1-nu) ].

        Raises:
            DomainError: If nu is an integer.
        """
        if float(nu).is_integer():
            raise DomainError(f"two-term form needs noninteger order, got {nu}", "bessel_k_small")
        growing = (z / 2.0) ** (-nu) / SpecialFunctions.gamma(1.0 - nu)
        decaying = (z / 2.0) ** nu / SpecialFunctions.gamma(1.0 + nu)
        return -math.pi / (2.0 * math.sin(math.pi * nu)) * (decaying - growing)

    @staticmethod
    def ki_product(
            nu: float,
            z: float,
            method: str = "direct",
            abs_tol: float = ABS_TOL,
            rel_tol: float = REL_TOL
    ) -> Tuple[float, float]:
        """
        Evaluate K_nu(z) I_nu(z).

        The "direct" method multiplies the exponentially scaled functions, which keeps the
        product finite for large z. The "integral" method evaluates
        int_0^inf dx exp(-2z cosh x) I_{2nu}(2z sinh x) by adaptive quadrature.

        Args:
            nu:         Order, nu >= 0.
            z:          Positive argument.
            method:     "direct" or "integral".
            abs_tol:    Absolute quadrature tolerance.
            rel_tol:    Relative quadrature tolerance.

        Returns:
            A tuple (value, achieved error estimate); the error is 0 for the direct method.

        Raises:
            DomainError:        If nu < 0, z <= 0 or the method is unknown.
            QuadratureError:    If the quadrature misses the tolerance.
        """
        if nu < 0:
            raise DomainError(f"order must be nonnegative, got {nu}", "ki_product")
        SpecialFunctions._check(nu, z, "ki_product")

        if method == "direct":
            value = special.kve(nu, z) * special.ive(nu, z)
            return float(SpecialFunctions._finite(value, "ki_product")), 0.0

        if method != "integral":
            raise DomainError(f"unknown method {method!r}", "ki_product")

        # exp(-2z cosh x) I_2nu(2z sinh x) = ive(2nu, 2z sinh x) exp(-2z e^{-x})
        def integrand(x: float) -> float:
            return special.ive(2.0 * nu, 2.0 * z * math.sinh(x)) * math.exp(-2.0 * z * math.exp(-x))

        value, error = integrate.quad(
            integrand, 0.0, np.inf, epsabs=abs_tol, epsrel=rel_tol, limit=SpecialFunctions.QUAD_LIMIT
        )
        SpecialFunctions.check_quadrature(value, error, abs_tol, rel_tol, "ki_product")
        return value, error

    @staticmethod
    def laplace_bessel_integral(
            a: float,
            b: float,
            nu: ArrayLike,
            method: str = "closed",
            abs_tol: float = ABS_TOL,
            rel_tol: float = REL_TOL
    ) -> ArrayLike:
        """
        Evaluate int_0^inf dt exp(-a t) I_nu(b t) = b^nu / (sqrt(a^2 - b^2) (a + sqrt(a^2 - b^2))^nu).

        Args:
            a:          Decay rate, a > |b|.
            b:          Growth rate of the Bessel argument, b >= 0.
            nu:         Order (scalar or array), nu >= 0.
            method:     "closed" for the formula, "quadrature" for adaptive quadrature (scalar nu).
            abs_tol:    Absolute quadrature tolerance.
            rel_tol:    Relative quadrature tolerance.

        Returns:
            The value of the integral (array if nu is an array and method is "closed").

        Raises:
            DomainError:        If a <= |b|, b < 0, nu < 0 or the method is unknown.
            QuadratureError:    If the quadrature misses the tolerance.
        """
        if a <= abs(b):
            raise DomainError(f"need a > |b|, got a={a}, b={b}", "laplace_bessel_integral")
        if b < 0 or np.any(np.asarray(nu) < 0):
            raise DomainError("need b >= 0 and nu >= 0", "laplace_bessel_integral")

        root = math.sqrt(a * a - b * b)
        if method == "closed":
            value = (b / (a + root)) ** np.asarray(nu, dtype=float) / root
            return value if np.ndim(nu) else float(value)

        if method != "quadrature":
            raise DomainError(f"unknown method {method!r}", "laplace_bessel_integral")

        def integrand(t: float) -> float:
            return special.ive(nu, b * t) * math.exp((b - a) * t)

        value, error = integrate.quad(
            integrand, 0.0, np.inf, epsabs=abs_tol, epsrel=rel_tol, limit=SpecialFunctions.QUAD_LIMIT
        )
        SpecialFunctions.check_quadrature(value, error, abs_tol, rel_tol, "laplace_bessel_integral")
        return value

    @staticmethod
    def tk2_integral(nu: float) -> float:
        """
        Closed form of int_0^inf t K_nu(t)^2 dt = pi nu / (2 sin(pi nu)) for |nu| < 1.

        Args:
            nu: Order with |nu| < 1.

        Returns:
            The value of the integral (1/2 at nu = 0).
        """
        if abs(nu) >= 1.0:
            raise DomainError(f"integral diverges for |nu| >= 1, got {nu}", "tk2_integral")
        if nu == 0.0:
            return 0.5
        return math.pi * nu / (2.0 * math.sin(math.pi * nu))

    @staticmethod
    def _check(nu: ArrayLike, x: ArrayLike, operation: str) -> None:
        """
        Validate order and argument of a Bessel evaluation.
        """
        if np.any(~np.isfinite(nu)) or np.any(np.abs(nu) > SpecialFunctions.MAX_ORDER):
            raise DomainError(f"order must be finite with |nu| <= {SpecialFunctions.MAX_ORDER}", operation)
        if np.any(~(np.asarray(x) > 0)):
            raise DomainError("argument must be strictly positive", operation)

    @staticmethod
    def _finite(value: ArrayLike, operation: str) -> ArrayLike:
        """
        Reject overflowed or undefined results.
        """
        if np.any(~np.isfinite(value)):
            raise RangeError("result overflows or is undefined", operation)
        return value

    @staticmethod
    def check_quadrature(value: float, error: float, abs_tol: float, rel_tol: float, operation: str) -> None:
        """
        Compare a quadrature error estimate against the requested tolerance pair.
        """
        allowed = max(abs_tol, rel_tol * abs(value))
        if not math.isfinite(value) or error > 10.0 * allowed:
            raise QuadratureError(f"error estimate {error:.3e} exceeds {allowed:.3e}", operation, error)
