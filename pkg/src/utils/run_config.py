"""
This module provides run configuration for the command-line front end.

It includes the RunConfig dataclass holding every command-line option, the tolerance tiers
selected through the AB_VACUUM_TOLERANCE_TIER environment variable, loading of flat JSON
configuration files, and parsing of grid specifications.

Precedence: built-in defaults < tolerance tier and command defaults < configuration file < explicit flags.
"""
import json
import os
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, Mapping, Optional

import numpy as np

from core.vacuum import QuadratureSpec
from utils.errors import ConfigurationError

TIER_VARIABLE = "AB_VACUUM_TOLERANCE_TIER"

COMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "spectrum": {"grid": "0.05:0.95:19"},
}

TOLERANCE_TIERS: Dict[str, Dict[str, Any]] = {
    "fast": {"lmax": 30, "delta": 0.02, "tol": 1e-6},
    "default": {"lmax": 60, "delta": 0.01, "tol": 1e-8},
    "strict": {"lmax": 120, "delta": 0.005, "tol": 1e-10},
}


@dataclass
class RunConfig:
    """
    Resolved options of one command.

    Attributes:
        MIN_LMAX (int):         Smallest accepted channel cutoff.
        MAX_GRID_POINTS (int):  Largest accepted grid size.
        command:                "spectrum", "profile" or "selfcheck".
        beta:                   Fractional flux, exclusive with mu.
        mu:                     Full flux, exclusive with beta.
        mass:                   Fermion mass.
        radius:                 Solenoid radius R.
        theta:                  Extension angle used by the finite-size factors.
        grid:                   "min:max:n[:log]" radii for profile, betas for spectrum sweeps.
        method:                 Continuum current method of profile: "numeric" or "estimate".
        lmax:                   Explicitly summed channels per branch.
        delta:                  Smallest y-integral cutoff of the extrapolation ladder.
        tol:                    Relative quadrature tolerance.
        tier:                   Name of the tolerance tier the defaults came from.
        out:                    Output path, standard output when None.
        format:                 "csv" or "json".
        progress:               Progress level 0, 1 or 2.
        only:                   Comma-separated selfcheck criteria to run.
    """
    MIN_LMAX = 10
    MAX_GRID_POINTS = 10000

    command: str = "profile"
    beta: Optional[float] = None
    mu: Optional[float] = None
    mass: float = 1.0
    radius: float = 1.0
    theta: float = 0.0
    grid: str = "0.5:50:12:log"
    method: str = "numeric"
    lmax: int = 60
    delta: float = 0.01
    tol: float = 1e-8
    tier: str = "default"
    out: Optional[str] = None
    format: str = "csv"
    progress: int = 0
    only: Optional[str] = None

    def __post_init__(self):
        if self.command not in ("spectrum", "profile", "selfcheck"):
            raise ConfigurationError(f"unknown command {self.command!r}", "RunConfig")
        if self.beta is not None and self.mu is not None:
            raise ConfigurationError("--beta and --mu are mutually exclusive", "RunConfig")
        if self.mass < 0 or self.radius <= 0:
            raise ConfigurationError(f"need mass >= 0 and radius > 0, got {self.mass}, {self.radius}", "RunConfig")
        if self.lmax < RunConfig.MIN_LMAX:
            raise ConfigurationError(f"lmax must be at least {RunConfig.MIN_LMAX}, got {self.lmax}", "RunConfig")
        if self.delta <= 0 or self.tol <= 0:
            raise ConfigurationError("delta and tol must be positive", "RunConfig")
        if self.format not in ("csv", "json"):
            raise ConfigurationError(f"format must be csv or json, got {self.format!r}", "RunConfig")
        if self.method not in ("numeric", "estimate"):
            raise ConfigurationError(f"method must be numeric or estimate, got {self.method!r}", "RunConfig")
        if self.progress not in (0, 1, 2):
            raise ConfigurationError(f"progress must be 0, 1 or 2, got {self.progress}", "RunConfig")

    @property
    def flux(self) -> Optional[float]:
        """
        The flux given on the command line, mu taking precedence over beta.
        """
        return self.mu if self.mu is not None else self.beta

    def quadrature_spec(self) -> QuadratureSpec:
        """
        Build the quadrature controls of the vacuum pipelines.
        """
        return QuadratureSpec.with_delta(self.delta, l_max=self.lmax, rel_tol=self.tol, abs_tol=1e-4 * self.tol)

    def grid_values(self) -> np.ndarray:
        return parse_grid(self.grid)

    def as_metadata(self) -> Dict[str, Any]:
        """
        The configuration as a plain dictionary with sorted keys.
        """
        return dict(sorted(asdict(self).items()))

    @classmethod
    def option_names(cls):
        return [item.name for item in fields(cls)]

    @classmethod
    def resolve(cls, command: str, flags: Mapping[str, Any],
                environ: Optional[Mapping[str, str]] = None) -> "RunConfig":
        """
        Merge defaults, tolerance tier, configuration file and explicit flags.

        Args:
            command:    The command name.
            flags:      Parsed command-line options; None means "not given". The key "config"
                        names an optional JSON configuration file.
            environ:    Environment mapping, os.environ when None.

        Returns:
            The resolved configuration.

        Raises:
            ConfigurationError: On an unknown tier, a bad file or an invalid value.
        """
        environ = os.environ if environ is None else environ
        tier = environ.get(TIER_VARIABLE, "default")
        if tier not in TOLERANCE_TIERS:
            raise ConfigurationError(f"{TIER_VARIABLE}={tier!r} is not one of {sorted(TOLERANCE_TIERS)}", "resolve")

        values: Dict[str, Any] = {"tier": tier, **TOLERANCE_TIERS[tier], **COMMAND_DEFAULTS.get(command, {})}
        if flags.get("config") is not None:
            values.update(load_config_file(flags["config"]))
        values.update({key: value for key, value in flags.items()
                       if key != "config" and value is not None})
        values["command"] = command

        unknown = sorted(set(values) - set(cls.option_names()))
        if unknown:
            raise ConfigurationError(f"unknown options {unknown}", "resolve")
        try:
            return cls(**values)
        except TypeError as error:
            raise ConfigurationError(str(error), "resolve") from error


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Read a flat JSON object whose keys are long option names ("--" and dashes optional).

    Args:
        path: The file to read.

    Returns:
        The options with normalized keys.

    Raises:
        ConfigurationError: If the file is missing, malformed or not a flat object.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            content = json.load(handle)
    except (OSError, json.JSONDecodeError) as error:
        raise ConfigurationError(f"cannot read configuration {path}: {error}", "load_config_file") from error

    if not isinstance(content, dict):
        raise ConfigurationError("configuration must be a JSON object", "load_config_file")
    options = {}
    for key, value in content.items():
        if isinstance(value, (dict, list)):
            raise ConfigurationError(f"option {key!r} must be a scalar", "load_config_file")
        options[key.lstrip("-").replace("-", "_")] = value
    return options


def parse_grid(text: str) -> np.ndarray:
    """
    Parse "min:max:n" (linear) or "min:max:n:log" (logarithmic) into n points.

    Args:
        text: The grid specification.

    Returns:
        The grid points in increasing order.

    Raises:
        ConfigurationError: On a malformed or empty grid.
    """
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
        raise ConfigurationError(f"grid must be min:max:n[:log], got {text!r}", "parse_grid")
    try:
        low, high, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as error:
        raise ConfigurationError(f"grid must be min:max:n[:log], got {text!r}", "parse_grid") from error

    if count < 1 or count > RunConfig.MAX_GRID_POINTS:
        raise ConfigurationError(f"grid needs 1 to {RunConfig.MAX_GRID_POINTS} points, got {count}", "parse_grid")
    if count > 1 and not low < high:
        raise ConfigurationError(f"grid needs min < max, got {low}, {high}", "parse_grid")
    if len(parts) == 4 and parts[3] == "log":
        if low <= 0:
            raise ConfigurationError("logarithmic grid needs min > 0", "parse_grid")
        return np.geomspace(low, high, count)
    return np.linspace(low, high, count)
