"""
This module provides the command-line interface of the vacuum polarization project.

It parses the options of the spectrum, profile and selfcheck commands, resolves them into a
RunConfig, runs the computation and writes deterministic CSV or JSON artifacts. Configuration
errors exit with status 2, numerical failures with status 3 and failed self-checks with status 1.
"""
import argparse
import math
import sys
import time
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.solutions import DiracSolutions, DoubletKind, DoubletParams
from core.specfun import SpecialFunctions
from core.spectrum import Branch, BoundStateSolver
from core.vacuum import QuadratureSpec, VacuumPolarization
from utils.errors import AharonovBohmError, ConfigurationError, NumericalError
from utils.progress_level import ProgressLevel, report
from utils.run_config import TOLERANCE_TIERS, RunConfig
from utils.utilities import UNITS, Utilities

Check = Callable[[RunConfig], Tuple[float, str]]


class CommandLineInterface:
    """
    A class to run the spectrum, profile and selfcheck commands.

    Attributes:
        EXIT_OK (int):              Successful run.
        EXIT_SELFCHECK (int):       At least one self-check criterion failed.
        EXIT_CONFIG (int):          Invalid configuration.
        EXIT_NUMERICAL (int):       A numerical method failed.
        SPECTRUM_COLUMNS (list):    Columns of the spectrum artifact.
        PROFILE_COLUMNS (list):     Columns shared by every profile artifact.
        solver:                     The bound-state solver.
        vacuum:                     The vacuum polarization pipelines.
        progress_level:             The level of detail to show while running.
    """
    EXIT_OK = 0
    EXIT_SELFCHECK = 1
    EXIT_CONFIG = 2
    EXIT_NUMERICAL = 3

    SPECTRUM_COLUMNS = ["beta", "lambda", "E_particle", "E_antiparticle", "xi", "xi_leading_order", "merged"]
    PROFILE_COLUMNS = ["r", "j0_b", "jphi_b", "jphi_v", "jphi_total", "error", "suppression_cos", "suppression_sin"]
    MASSLESS_COLUMNS = ["jphi_closed", "ratio"]
    MASSIVE_COLUMNS = ["jphi_estimate"]
    SELFCHECK_COLUMNS = ["criterion", "passed", "measured", "threshold", "seconds", "detail"]

    def __init__(self) -> None:
        """
        Initialize the CommandLineInterface instance.
        """
        self.solver = BoundStateSolver()
        self.vacuum = VacuumPolarization()
        self.progress_level = ProgressLevel.NONE
        self.checks: Dict[str, Tuple[Check, float, bool]] = {
            "special-functions": (self._check_special_functions, 1e-8, True),
            "spectrum": (self._check_spectrum, 1e-10, True),
            "sae": (self._check_sae, 1e-10, True),
            "dirac": (self._check_dirac, 1e-6, True),
            "wronskian": (self._check_wronskian, 1e-10, True),
            "massless": (self._check_massless, 1e-4, True),
            "free-charge": (self._check_free_charge, 0.5, False),
            "finite-size": (self._check_finite_size, 0.05, False),
            "periodicity": (self._check_periodicity, 1e-10, True),
            "mass-suppression": (self._check_mass_suppression, 1.0, False),
        }

    def set_progress_level(self, level: ProgressLevel) -> None:
        """
        Set the progress level for the interface and the pipelines it drives.

        Args:
            level: The progress level to set.
        """
        self.progress_level = level
        self.solver.set_progress_level(level)
        self.vacuum.set_progress_level(level)

    def build_parser(self) -> argparse.ArgumentParser:
        """
        Build the argument parser; every option defaults to None so that RunConfig can apply precedence.
        """
        shared = argparse.ArgumentParser(add_help=False)
        flux = shared.add_mutually_exclusive_group()
        flux.add_argument("--beta", type=float, help="fractional flux in (0, 1)")
        flux.add_argument("--mu", type=float, help="full flux parameter")
        shared.add_argument("--mass", type=float, help="fermion mass (0 selects the massless mode)")
        shared.add_argument("--radius", type=float, help="solenoid radius R")
        shared.add_argument("--theta", type=float, help="extension angle for the finite-size factors")
        shared.add_argument("--grid", help="min:max:n[:log]; radii for profile, betas for spectrum")
        shared.add_argument("--lmax", type=int, help="explicitly summed channels per branch")
        shared.add_argument("--delta", type=float, help="smallest y-integral cutoff")
        shared.add_argument("--tol", type=float, help="relative quadrature tolerance")
        shared.add_argument("--out", help="output file (standard output by default)")
        shared.add_argument("--format", choices=["csv", "json"])
        shared.add_argument("--config", help="flat JSON file of options")
        shared.add_argument("--progress", type=int, choices=[0, 1, 2], help="0: none, 1: normal, 2: detailed")

        parser = argparse.ArgumentParser(prog="ab-vacuum", description="Vacuum polarization around a thin solenoid")
        commands = parser.add_subparsers(dest="command", required=True)
        commands.add_parser("spectrum", parents=[shared], help="bound-state spectrum over a flux sweep")
        profile = commands.add_parser("profile", parents=[shared], help="radial charge and current densities")
        profile.add_argument("--method", choices=["numeric", "estimate"], help="massive continuum current method")
        selfcheck = commands.add_parser("selfcheck", parents=[shared], help="run the acceptance suite")
        selfcheck.add_argument("--only", help="comma-separated criteria: " + ", ".join(self.checks))
        return parser

    def run(self, argv: Optional[Sequence[str]] = None) -> int:
        """
        Parse the arguments, run the command and map failures to exit codes.

        Args:
            argv: Arguments without the program name, sys.argv[1:] when None.

        Returns:
            The exit status.
        """
        arguments = vars(self.build_parser().parse_args(argv))
        command = arguments.pop("command")
        try:
            config = RunConfig.resolve(command, arguments)
            self.set_progress_level(ProgressLevel(config.progress))
            if command == "selfcheck":
                text, passed = self.cmd_selfcheck(config)
                Utilities.write_artifact(text, config.out)
                return self.EXIT_OK if passed else self.EXIT_SELFCHECK
            text = self.cmd_spectrum(config) if command == "spectrum" else self.cmd_profile(config)
            Utilities.write_artifact(text, config.out)
            return self.EXIT_OK
        except ConfigurationError as error:
            print(f"configuration error: {error}", file=sys.stderr)
            return self.EXIT_CONFIG
        except NumericalError as error:
            print(f"numerical failure: {error}", file=sys.stderr)
            return self.EXIT_NUMERICAL

    def cmd_spectrum(self, config: RunConfig) -> str:
        """
        Tabulate the bound-state spectrum for one flux or over the beta grid.

        Returns:
            The serialized artifact.
        """
        if config.flux is not None:
            betas = [self.solver.flux_decompose(config.flux).beta]
        else:
            betas = [float(beta) for beta in config.grid_values()]
        rows = self.solver.spectrum_sweep(betas, config.mass, config.radius)
        for row in rows:
            beta = row["beta"]
            row["xi_leading_order"] = float("nan")
            if beta > 0.5:
                row["xi_leading_order"] = self.solver.xi_from_R_leading_order(beta, config.mass, config.radius)
        if self.progress_level != ProgressLevel.NONE:
            report(self.progress_level, ProgressLevel.NORMAL, Utilities.create_table(rows, self.SPECTRUM_COLUMNS))
        return self._serialize(config, self.SPECTRUM_COLUMNS, rows, {})

    def cmd_profile(self, config: RunConfig) -> str:
        """
        Compute the radial densities on the configured grid.

        The massless mode adds the closed-form current and the numeric/closed ratio; the massive
        mode adds the sqrt(1 + (m r)^2) estimate. The finite-size factors are NaN below r = 10 R.

        Returns:
            The serialized artifact.
        """
        if config.flux is None:
            raise ConfigurationError("profile needs --beta or --mu", "cmd_profile")
        massless = config.mass == 0.0
        method = "numeric" if massless else config.method
        profile = self.vacuum.density_profile(config.flux, config.mass, config.radius, config.grid_values(),
                                              config.quadrature_spec(), method=method)
        beta = profile.metadata["beta"]

        rows = profile.rows()
        for row in rows:
            r = row["r"]
            if r >= 10.0 * config.radius:
                row["suppression_cos"], row["suppression_sin"] = self.vacuum.finite_size_suppression(
                    r, config.radius, beta, config.theta)
            else:
                row["suppression_cos"] = row["suppression_sin"] = float("nan")
            if massless:
                closed = self.vacuum.massless_current_closed(r, beta)
                row["jphi_closed"] = closed
                row["ratio"] = row["jphi_v"] / closed if closed != 0.0 else float("nan")
            else:
                row["jphi_estimate"] = self.vacuum.massive_current_estimate(r, config.mass, beta)

        columns = self.PROFILE_COLUMNS + (self.MASSLESS_COLUMNS if massless else self.MASSIVE_COLUMNS)
        return self._serialize(config, columns, rows, {"profile": profile.metadata})

    def cmd_selfcheck(self, config: RunConfig) -> Tuple[str, bool]:
        """
        Run the acceptance criteria, optionally restricted by --only.

        Thresholds of the tolerance-driven criteria scale with tol relative to the tier default,
        so an unattainable tol produces controlled failures.

        Returns:
            The report and whether every criterion passed.
        """
        names = list(self.checks) if config.only is None else [name.strip() for name in config.only.split(",")]
        unknown = [name for name in names if name not in self.checks]
        if unknown or not names:
            raise ConfigurationError(f"unknown criteria {unknown}; choose from {list(self.checks)}", "cmd_selfcheck")

        scale = min(1.0, config.tol / TOLERANCE_TIERS[config.tier]["tol"])
        rows = []
        for name in names:
            check, nominal, scalable = self.checks[name]
            threshold = nominal * scale if scalable else nominal
            start = time.perf_counter()
            try:
                measured, detail = check(config)
            except AharonovBohmError as error:
                measured, detail = float("inf"), f"{type(error).__name__}: {error}"
            seconds = time.perf_counter() - start
            rows.append({"criterion": name, "passed": bool(measured <= threshold), "measured": measured,
                         "threshold": threshold, "seconds": round(seconds, 3), "detail": detail})
            report(self.progress_level, ProgressLevel.NORMAL,
                   f"{name}: {'pass' if rows[-1]['passed'] else 'FAIL'} ({measured:.3e} vs {threshold:.1e})")

        passed = all(row["passed"] for row in rows)
        if config.format == "json" or config.out is not None:
            text = self._serialize(config, self.SELFCHECK_COLUMNS, rows, {"passed": passed})
        else:
            total = sum(row["seconds"] for row in rows)
            text = (Utilities.create_table(rows, self.SELFCHECK_COLUMNS, floatfmt=".3e")
                    + f"\n{'all criteria passed' if passed else 'FAILED'} in {total:.1f} s\n")
        return text, passed

    def _serialize(self, config: RunConfig, columns: List[str], rows: List[dict], extra: dict) -> str:
        metadata = {"command": config.command, "config": config.as_metadata(), "units": UNITS, **extra}
        if config.format == "json":
            return Utilities.to_json(columns, rows, metadata)
        return Utilities.to_csv(columns, rows, metadata)

    @staticmethod
    def _check_special_functions(config: RunConfig) -> Tuple[float, str]:
        worst = 0.0
        for nu in (0.25, 0.7, 2.5):
            for x in (0.3, 1.0, 7.5):
                i_nu, i_next = SpecialFunctions.bessel_i(nu, x), SpecialFunctions.bessel_i(nu + 1.0, x)
                k_prev, k_nu, k_next = (SpecialFunctions.bessel_k(order, x) for order in (nu - 1.0, nu, nu + 1.0))
                worst = max(worst, abs(x * (i_nu * k_next + i_next * k_nu) - 1.0),
                        abs((k_next - k_prev) / (2.0 * nu / x * k_nu) - 1.0))
        for x in (0.1, 0.35, 0.8):
            reflection = SpecialFunctions.gamma(x) * SpecialFunctions.gamma(1.0 - x) * math.sin(math.pi * x) / math.pi
            worst = max(worst, abs(reflection - 1.0))
        direct, _ = SpecialFunctions.ki_product(0.3, 1.2)
        integral, _ = SpecialFunctions.ki_product(0.3, 1.2, method="integral")
        closed = SpecialFunctions.laplace_bessel_integral(2.0, 1.0, 0.6)
        quadrature = SpecialFunctions.laplace_bessel_integral(2.0, 1.0, 0.6, method="quadrature")
        worst = max(worst, abs(integral / direct - 1.0), abs(quadrature / closed - 1.0))
        return worst, "Wronskian, recurrence, reflection, product and Laplace integrals"

    def _check_spectrum(self, config: RunConfig) -> Tuple[float, str]:
        m = 5.0
        worst = 0.0
        for R in (0.5, 1.0, 5.0):
            lam = self.solver.bound_lambda_closed(0.5, R)
            worst = max(worst, abs(lam * R - 1.0))
            if lam < m:
                energy = self.solver.bound_energy(lam, m, Branch.PARTICLE)
                worst = max(worst, abs(energy - math.sqrt(m * m - 1.0 / R ** 2)) / m)
            for beta in np.arange(1, 10) / 10.0:
                closed = self.solver.bound_lambda_closed(beta, R)
                root = self.solver.bound_lambda_transcendental(beta, R, 1.0, s=-1)
                worst = max(worst, abs(root / closed - 1.0))
        return worst, "half-flux degeneracy and transcendental/closed agreement"

    def _check_sae(self, config: RunConfig) -> Tuple[float, str]:
        worst = 0.0
        for beta in (0.55, 0.65, 0.75, 0.85, 0.95):
            xi = self.solver.xi_from_R(beta, 1.0, 0.5)
            lam = self.solver.sae_lambda(beta, 1.0, xi)
            worst = max(worst, abs(lam / self.solver.bound_lambda_closed(beta, 0.5) - 1.0))
        return worst, "xi round trip through the extension spectrum"

    def _check_dirac(self, config: RunConfig) -> Tuple[float, str]:
        lam = self.solver.bound_lambda_closed(0.7, 1.0)
        cases = {
            DoubletKind.REGULAR_F: DoubletParams(E=2.0, m=1.0, l=1, mu=0.3, s=-1),
            DoubletKind.IRREGULAR_U: DoubletParams(E=2.0, m=1.0, l=1, mu=0.3, s=-1),
            DoubletKind.MACDONALD_V: DoubletParams(E=0.9, m=1.0, l=0, mu=0.3, s=1),
            DoubletKind.MODIFIED_I: DoubletParams(E=0.9, m=1.0, l=-1, mu=0.3, s=-1),
            DoubletKind.FREE_S: DoubletParams(E=-1.5, m=1.0, l=2, s=1),
            DoubletKind.BOUND_V0: DoubletParams(E=math.sqrt(4.0 - lam ** 2), m=2.0, mu=0.7, s=-1),
            DoubletKind.SAE_REGULAR: DoubletParams(E=2.0, m=1.0, mu=0.3, s=-1, theta=math.pi / 3),
        }
        worst = 0.0
        for kind, params in cases.items():
            doublet = DiracSolutions.make_doublet(kind, params)
            for r in (0.1, 0.5, 1.0, 3.0, 7.5, 20.0):
                worst = max(worst, DiracSolutions.dirac_residual(doublet, r))
        return worst, f"{len(cases)} doublet kinds on r in [0.1, 20]"

    def _check_wronskian(self, config: RunConfig) -> Tuple[float, str]:
        worst = 0.0
        for s, l in ((1, 0), (-1, -1)):
            params = DoubletParams(E=0.9, m=1.0, l=l, mu=0.3, s=s)
            v = DiracSolutions.make_doublet(DoubletKind.MACDONALD_V, params)
            f = DiracSolutions.make_doublet(DoubletKind.MODIFIED_I, params)
            closed = DiracSolutions.wronskian_closed(s)
            for r in (0.1, 1.0, 10.0):
                worst = max(worst, abs(DiracSolutions.wronskian(v, f, r) - closed))
        return worst, "r-independence and closed value for both spin branches"

    def _check_massless(self, config: RunConfig) -> Tuple[float, str]:
        spec = config.quadrature_spec()
        worst = 0.0
        for beta in (0.1, 0.25, 0.5, 0.75, 0.9):
            for r in (0.5, 1.0, 5.0, 20.0):
                value, _ = self.vacuum.massless_current_numeric(r, beta, spec)
                closed = self.vacuum.massless_current_closed(r, beta)
                if closed == 0.0:
                    worst = max(worst, abs(value) / 1e-8)
                else:
                    worst = max(worst, abs(value / closed - 1.0))
        return worst, "numeric pipeline against -e(2b-1)^2 tan(pi b)/(32 pi r^2)"

    def _check_free_charge(self, config: RunConfig) -> Tuple[float, str]:
        spec = QuadratureSpec(rel_tol=max(config.tol, 1e-10), abs_tol=1e-12)
        worst = 0.0
        for r, m, beta in ((1.0, 1.0, 0.3), (0.5, 1.0, 0.7), (2.0, 0.5, 0.2)):
            sums = self.vacuum.free_charge_partial_sums(r, m, beta, 40, spec=spec)
            limit = self.vacuum.free_charge_limit(r, m, beta, spec=spec)
            worst = max(worst, abs(sums[39] - limit) / abs(sums[9] - limit))
        if any(value != 0.0 for value in self.vacuum.free_charge_partial_sums(1.0, 1.0, 0.5, 10, spec=spec)):
            return float("inf"), "half-flux partial sums do not cancel"
        return worst, "|S_40 - S_inf| / |S_10 - S_inf|; exact cancellation at beta = 1/2"

    @staticmethod
    def _check_finite_size(config: RunConfig) -> Tuple[float, str]:
        worst = 0.0
        for beta, theta, index in ((0.7, 0.0, 0), (0.3, math.pi, 1)):
            expected = DiracSolutions.c1_scaling_exponents(beta)[index]
            slope = DiracSolutions.c1_loglog_slope(beta, theta)
            worst = max(worst, abs(slope / expected - 1.0))
        return worst, "log-log slopes of |C1| against ER"

    def _check_periodicity(self, config: RunConfig) -> Tuple[float, str]:
        spec = config.quadrature_spec()
        reference, _ = self.vacuum.massless_current_numeric(1.0, 0.3, spec)
        shifted, _ = self.vacuum.massless_current_numeric(1.0, 1.3, spec)
        return abs(shifted / reference - 1.0), "current at mu = 0.3 and 1.3"

    def _check_mass_suppression(self, config: RunConfig) -> Tuple[float, str]:
        spec = QuadratureSpec.with_delta(config.delta, l_max=config.lmax, rel_tol=max(config.tol, 1e-6),
                                         abs_tol=1e-10)
        worst, ratios = 0.0, []
        for m in (1.0, 3.0):
            massive, _ = self.vacuum.massive_current_numeric(1.0, m, 0.25, spec)
            worst = max(worst, abs(massive) / abs(self.vacuum.massless_current_closed(1.0, 0.25)))
            ratios.append(massive / self.vacuum.massive_current_estimate(1.0, m, 0.25))
        if abs(ratios[1]) >= 0.5 * abs(ratios[0]):
            worst = math.inf
        detail = "massive/massless; numeric/estimate at mr = 1, 3: " + ", ".join(f"{ratio:.3g}" for ratio in ratios)
        return worst, detail
