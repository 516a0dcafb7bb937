"""
The threshold sweep file:

    # cvqkd-thresholds v1 va=<v_a>
    delta,eta_clone,eta_anticlone,eta_bma,eta_opt,eta_intercept_resend
    <one row per delta, ascending>

LF line endings, no trailing whitespace, every number in its
shortest round-trip form. A threshold column may hold inf for an
attack that no transmission survives.
"""

import logging
import math
import re

from ..attacks import THRESHOLD_COLUMNS, ThresholdCurve
from ..errors import MalformedDataError

log = logging.getLogger(__name__)

MAGIC = "# cvqkd-thresholds v1"
HEADER = ",".join(THRESHOLD_COLUMNS)

_FIRST_LINE = re.compile(r"^# cvqkd-thresholds v1 va=(\S+)$")


def format_number(value):
    """
    shortest decimal that parses back to the same double
    """

    return repr(float(value))


def format_threshold_csv(curve):
    """
    the file contents for a ThresholdCurve

    :param curve: ThresholdCurve
    :returns:
    :rtype: str

    """

    lines = [f"{MAGIC} va={format_number(curve.v_a)}", HEADER]

    for row in curve.rows:

        lines.append(",".join(format_number(v) for v in row))

    return "\n".join(lines) + "\n"


def write_threshold_csv(curve, file_name):

    with open(file_name, "w", newline="") as f:

        f.write(format_threshold_csv(curve))

    log.info(f"wrote {curve.n_rows} threshold rows to {file_name}")


def _parse_float(field, line_number, allow_inf=False):

    try:

        value = float(field)

    except ValueError:

        raise MalformedDataError(f"not a number: {field!r}", line_number)

    if allow_inf and field == "inf":

        return value

    if not math.isfinite(value):

        raise MalformedDataError(f"non-finite value: {field!r}", line_number)

    return value


def parse_threshold_csv(text):
    """
    Parse threshold-file contents. Errors carry the
    1-based number of the first offending line.

    :param text: file contents
    :returns:
    :rtype: ThresholdCurve

    """

    lines = text.split("\n")

    # a single final LF ends the last line
    if lines and lines[-1] == "":

        lines = lines[:-1]

    if not lines:

        raise MalformedDataError("empty file", 1)

    for number, line in enumerate(lines, start=1):

        if line != line.rstrip():

            raise MalformedDataError("trailing whitespace or CR line ending", number)

    match = _FIRST_LINE.match(lines[0])

    if match is None:

        raise MalformedDataError(f"expected '{MAGIC} va=<value>'", 1)

    v_a = _parse_float(match.group(1), 1)

    if v_a <= 0:

        raise MalformedDataError(f"va must be positive, got {v_a}", 1)

    if len(lines) < 2 or lines[1] != HEADER:

        raise MalformedDataError(f"expected the header '{HEADER}'", 2)

    if len(lines) < 3:

        raise MalformedDataError("no data rows", 3)

    rows = []

    for number, line in enumerate(lines[2:], start=3):

        fields = line.split(",")

        if len(fields) != len(THRESHOLD_COLUMNS):

            raise MalformedDataError(
                f"expected {len(THRESHOLD_COLUMNS)} fields, got {len(fields)}", number
            )

        row = [_parse_float(fields[0], number)] + [
            _parse_float(field, number, allow_inf=True) for field in fields[1:]
        ]

        if row[0] < 0:

            raise MalformedDataError(f"negative delta {row[0]}", number)

        if rows and row[0] < rows[-1][0]:

            raise MalformedDataError("rows are not in ascending delta order", number)

        rows.append(row)

    return ThresholdCurve(v_a, rows)


def read_threshold_csv(file_name):

    with open(file_name, "r", newline="") as f:

        text = f.read()

    return parse_threshold_csv(text)
