"""
This module defines the ProgressLevel enumeration for the vacuum polarization pipelines.

The ProgressLevel enum controls how much progress information the solvers print while
sweeping parameters, evaluating quadratures and assembling density profiles.
"""

import sys
from enum import Enum


class ProgressLevel(Enum):
    """
    An enumeration of progress output levels.

    Attributes:
        NONE (int):     No progress output (value: 0).
        NORMAL (int):   One line per major step (value: 1).
        DETAILED (int): Intermediate values of every step (value: 2).
    """
    NONE = 0
    NORMAL = 1
    DETAILED = 2


def report(level: ProgressLevel, threshold: ProgressLevel, message: str) -> None:
    """
    Print a progress message to standard error when the level reaches the threshold.

    Args:
        level:      The level configured on the component.
        threshold:  The minimum level at which the message is shown.
        message:    The text to print.
    """
    if level.value >= threshold.value and threshold != ProgressLevel.NONE:
        print(message, file=sys.stderr)
