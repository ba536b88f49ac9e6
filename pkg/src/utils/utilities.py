"""
This module provides utility functions for writing the artifacts of the vacuum polarization project.

It includes the CSV and JSON serializers with embedded metadata, the reader of CSV metadata
headers, and console tables built with tabulate.
"""
import csv
import io
import json
import math
import sys
from typing import Any, Dict, List, Mapping, Optional, Sequence

from tabulate import tabulate

UNITS = {
    "length": "1/m",
    "energy": "m",
    "charge_density": "e0 m^2",
    "current_density": "e0 m^2",
}


class Utilities:
    """
    A utility class providing static methods for serializing result tables.

    Tables are lists of row dictionaries sharing a fixed, ordered set of columns. Numbers are
    written with 17 significant digits so that files reproduce the computed doubles exactly.
    """

    @staticmethod
    def format_number(value: Any) -> str:
        """
        Format a value for CSV output.

        Args:
            value: A number, boolean, string or None.

        Returns:
            '%.17g' for floats, 'nan' for NaN and missing values, str() otherwise.
        """
        if value is None:
            return "nan"
        if isinstance(value, bool):
            return str(int(value))
        if isinstance(value, float):
            return "nan" if math.isnan(value) else "%.17g" % value
        return str(value)

    @staticmethod
    def metadata_header(metadata: Mapping[str, Any]) -> List[str]:
        """
        Render metadata as '#'-prefixed header lines, one JSON-encoded value per key.
        """
        return [f"# {key}: {json.dumps(Utilities._plain(value), sort_keys=True)}"
                for key, value in sorted(metadata.items())]

    @staticmethod
    def read_metadata(text: str) -> Dict[str, Any]:
        """
        Recover the metadata of a CSV artifact written by to_csv.

        Args:
            text: The file content.

        Returns:
            The decoded metadata.
        """
        metadata = {}
        for line in text.splitlines():
            if not line.startswith("# "):
                break
            key, _, value = line[2:].partition(": ")
            metadata[key] = json.loads(value)
        return metadata

    @staticmethod
    def to_csv(columns: Sequence[str], rows: Sequence[Mapping[str, Any]], metadata: Mapping[str, Any]) -> str:
        """
        Serialize a table as CSV with a metadata header.

        Args:
            columns:    Column names in output order.
            rows:       Row dictionaries holding every column.
            metadata:   Configuration and units to embed.

        Returns:
            The CSV text, newline-terminated.
        """
        buffer = io.StringIO()
        for line in Utilities.metadata_header(metadata):
            buffer.write(line + "\n")
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([Utilities.format_number(row[column]) for column in columns])
        return buffer.getvalue()

    @staticmethod
    def to_json(columns: Sequence[str], rows: Sequence[Mapping[str, Any]], metadata: Mapping[str, Any]) -> str:
        """
        Serialize a table as a JSON document {"metadata", "columns", "rows"}.

        NaN becomes null; keys are sorted so equal inputs give identical text.
        """
        document = {
            "metadata": Utilities._plain(dict(metadata)),
            "columns": list(columns),
            "rows": [[Utilities._plain(row[column]) for column in columns] for row in rows],
        }
        return json.dumps(document, indent=2, sort_keys=True) + "\n"

    @staticmethod
    def write_artifact(text: str, path: Optional[str] = None) -> None:
        """
        Write an artifact to a file, or to standard output when no path is given.
        """
        if path is None:
            sys.stdout.write(text)
            return
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)

    @staticmethod
    def create_table(rows: Sequence[Mapping[str, Any]], columns: Sequence[str], floatfmt: str = ".6g") -> str:
        """
        Create a console table of the rows.

        Args:
            rows:       Row dictionaries.
            columns:    Columns to show, in order.
            floatfmt:   Number format passed to tabulate.

        Returns:
            A string representation of the table.
        """
        table = [[row[column] for column in columns] for row in rows]
        return tabulate(table, headers=list(columns), tablefmt="grid", floatfmt=floatfmt)

    @staticmethod
    def _plain(value: Any) -> Any:
        """
        Convert numpy scalars, tuples and NaN into JSON-friendly values.
        """
        if isinstance(value, dict):
            return {str(key): Utilities._plain(item) for key, item in value.items()}
        if isinstance(value, (list, tuple)):
            return [Utilities._plain(item) for item in value]
        if hasattr(value, "item") and not isinstance(value, (str, bytes)):
            value = value.item()
        if isinstance(value, float) and not math.isfinite(value):
            return None
        return value
