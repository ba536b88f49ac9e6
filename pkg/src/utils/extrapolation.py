"""
Richardson extrapolation helpers.

Limits are taken on geometric ladders of a small parameter h. When the exponents of the
error expansion are known (possibly noninteger), the limit is the constant term of the
least-squares fit f(h) = L + sum_k c_k h^{p_k}.
"""
from typing import Sequence

import numpy as np

from utils.errors import ExtrapolationError


def richardson_limit(step_ratio: float, values: Sequence[float]) -> float:
    """
    Classic Richardson table for an error expansion in integer powers of h.

    Args:
        step_ratio: Ratio h_i / h_{i+1} between consecutive steps (> 1).
        values:     f(h_0), f(h_1), ... for decreasing h.

    Returns:
        The extrapolated value at h = 0.
    """
    last_level = list(values)
    if not last_level:
        raise ExtrapolationError("no values to extrapolate", "richardson_limit")

    for level in range(1, len(last_level)):
        mult = step_ratio ** level
        last_level = [(mult * high - low) / (mult - 1.0) for low, high in zip(last_level[:-1], last_level[1:])]
    return float(last_level[0])


def limit_with_exponents(h_values: Sequence[float], f_values: Sequence[float], exponents: Sequence[float]) -> float:
    """
    Extrapolate f(h) to h = 0 for an error expansion with known exponents.

    Args:
        h_values:   Sample points, all positive.
        f_values:   Function values at the sample points.
        exponents:  Positive exponents p_k of the error terms c_k h^{p_k}.

    Returns:
        The constant term of the fitted expansion.

    Raises:
        ExtrapolationError: If there are fewer samples than unknowns or the fit is singular.
    """
    h = np.asarray(h_values, dtype=float)
    f = np.asarray(f_values, dtype=float)
    if len(h) < len(exponents) + 1:
        raise ExtrapolationError(
            f"need at least {len(exponents) + 1} samples, got {len(h)}", "limit_with_exponents"
        )
    # Columns scaled by h_max^p keep the system well conditioned.
    scale = h.max()
    columns = [np.ones_like(h)] + [(h / scale) ** p for p in exponents]
    matrix = np.column_stack(columns)
    coeffs, _, rank, _ = np.linalg.lstsq(matrix, f, rcond=None)
    if rank < matrix.shape[1]:
        raise ExtrapolationError("singular extrapolation system", "limit_with_exponents")
    return float(coeffs[0])
