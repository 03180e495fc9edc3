import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Iterable, Optional

import mpmath
from mpmath import mpf

from src.schemas import LambdaSequence, SweepRow

SWEEP_COLUMNS = ["q", "N_max", "lambda_last", "s", "s_err", "l", "pct_error", "error"]
LAMBDA_COLUMNS = ["N", "lo", "hi", "midpoint", "prec_bits", "probes"]
RHO_COLUMNS = ["family", "route", "value", "err", "l", "K0"]
SUITE_COLUMNS = ["suite", "passed", "checks", "detail"]


def digits_for(prec_bits: int) -> int:
    """
    Decimal digits printed for numbers computed at ``prec_bits``.

    :param prec_bits: Working precision in bits.
    :type prec_bits: int
    :return: Number of significant decimal digits.
    :rtype: int
    """
    return max(15, int(prec_bits * math.log10(2)))


def format_value(value: Any, digits: int) -> Any:
    if value is None:
        return ""
    if isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, (mpf, float)):
        return mpmath.nstr(mpf(value), digits)
    if isinstance(value, dict):
        return {key: format_value(item, digits) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [format_value(item, digits) for item in value]
    return str(value)


def sequence_records(seq: LambdaSequence) -> list[dict]:
    return [
        {
            "N": entry.N,
            "lo": entry.enclosure.lo,
            "hi": entry.enclosure.hi,
            "midpoint": entry.enclosure.midpoint,
            "prec_bits": entry.prec_bits,
            "probes": entry.enclosure.probes,
        }
        for entry in seq.entries
    ]


def sweep_records(rows: Iterable[SweepRow], verbose: bool = False) -> list[dict]:
    """
    Flattens sweep rows into records with the stable output field names.

    :param rows: The sweep rows.
    :type rows: Iterable[SweepRow]
    :param verbose: Attach the per-N enclosures (JSON output only).
    :type verbose: bool
    :return: One record per row.
    :rtype: list[dict]
    """
    records = []
    for row in rows:
        record = {
            "q": row.q,
            "N_max": row.N_max,
            "lambda_last": row.lambda_last,
            "s": row.s_extrapolated,
            "s_err": row.s_err,
            "l": row.l_bound,
            "pct_error": row.pct_error,
            "error": row.error,
        }
        if verbose and row.sequence is not None:
            record["sequence"] = sequence_records(row.sequence)
        records.append(record)
    return records


def render(records: list[dict], columns: list[str], output: str, digits: int) -> str:
    """
    Renders records as CSV (fixed ``columns``) or JSON (every field).

    :param records: The records.
    :type records: list[dict]
    :param columns: CSV column order.
    :type columns: list[str]
    :param output: ``"csv"`` or ``"json"``.
    :type output: str
    :param digits: Significant digits for multiprecision values.
    :type digits: int
    :return: The rendered text.
    :rtype: str
    """
    formatted = [format_value(record, digits) for record in records]
    if output == "json":
        return json.dumps(formatted, indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    writer.writerows(formatted)
    return buffer.getvalue()


def render_document(document: dict, digits: int) -> str:
    return json.dumps(format_value(document, digits), indent=2) + "\n"


def emit(text: str, out_path: Optional[Path] = None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    Path(out_path).write_text(text, encoding="utf-8")
