"""
Canonical strings, exit codes and CSV helpers for gausstail.
"""
import csv
import io
from typing import Iterable, Sequence

TOOL_VERSION = "0.1.0"

# Exit codes
EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_CONFIG_ERROR = 3
EXIT_ACCEPTANCE_FAILURE = 4

# Environment
THREADS_ENV_VAR = "GAUSSTAIL_THREADS"

# CSV format
CSV_LINE_TERMINATOR = "\n"
CSV_FLOAT_FORMAT = ".17g"
MANIFEST_SUFFIX = ".manifest.json"
RECORD_SUFFIX = ".record.json"


def format_number(value) -> str:
    """
    Format a value for CSV output.

    Floats use 17 significant digits with '.' as decimal separator so that
    values round-trip; everything else goes through str().
    """
    if isinstance(value, float):
        return format(value, CSV_FLOAT_FORMAT)
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Render a CSV table with LF line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator=CSV_LINE_TERMINATOR)
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(value) for value in row])
    return buffer.getvalue()
