"""
Main entry point for the Aharonov-Bohm vacuum polarization toolkit.

This script puts src/ on the import path and runs the command-line interface.
"""
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "src"))

from ui.command_line import CommandLineInterface  # noqa: E402


def main() -> None:
    """
    Initialize and run the command-line interface.
    """
    cli = CommandLineInterface()
    sys.exit(cli.run())


if __name__ == "__main__":
    main()
