import re
from pathlib import Path

import mpmath
from mpmath import mp, mpf

from src.schemas import JacobiCoefficients
from src.services.errors import MomentFileError

HEX_FLOAT = re.compile(r"^([+-]?)0[xX]([0-9a-fA-F]+)(?:\.([0-9a-fA-F]*))?[pP]([+-]?\d+)$")
PRECISION_HEADER = re.compile(r"^#\s*precision-bits:\s*(\d+)\s*$")
S0_HEADER = re.compile(r"^#\s*s0:\s*(\S+)\s*$")


def parse_value(text: str) -> mpf:
    """
    Parses a decimal string or a hexadecimal float literal. Hex floats are
    converted exactly, whatever the working precision.

    :param text: The literal.
    :type text: str
    :return: The parsed value.
    :rtype: mpf
    """
    match = HEX_FLOAT.match(text)
    if match:
        sign, whole, frac, exp = match.groups()
        frac = frac or ""
        mantissa = int(whole + frac, 16)
        if sign == "-":
            mantissa = -mantissa
        value = mpf((mantissa, int(exp) - 4 * len(frac)))
    else:
        try:
            value = mpf(text)
        except (ValueError, TypeError):
            raise MomentFileError(f"cannot parse {text!r} as a number")
    if not mpmath.isfinite(value):
        raise MomentFileError(f"value {text!r} is not finite")
    return value


def format_hex(value: mpf) -> str:
    """
    Writes ``value`` as an exact hexadecimal float literal.

    :param value: The value.
    :type value: mpf
    :return: The literal, e.g. ``0x5p-2``.
    :rtype: str
    """
    if value == 0:
        return "0x0p0"
    man, exp = mpmath.frexp(value)
    bits = max(mp.prec, 64)
    mantissa = int(mpmath.ldexp(man, bits))
    exp = int(exp) - bits
    while mantissa % 2 == 0:
        mantissa //= 2
        exp += 1
    sign = "-" if mantissa < 0 else ""
    return f"{sign}0x{abs(mantissa):x}p{exp}"


def _rows(path: Path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise MomentFileError(f"cannot read {path}: {err}")
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped:
            yield number, stripped


def load_moment_file(path) -> tuple[list[mpf], int | None]:
    """
    Reads a moment file: an optional ``# precision-bits: P`` header, then
    lines ``n value`` with n = 0, 1, 2, ... in order. Values are parsed at
    the header precision when one is given.

    :param path: The moment file.
    :type path: str | Path
    :return: The moments and the header precision (None when absent).
    :rtype: tuple[list[mpf], int | None]
    """
    lines = list(_rows(path))
    bits = None
    if lines:
        header = PRECISION_HEADER.match(lines[0][1])
        if header:
            bits = int(header.group(1))
            if bits < 64:
                raise MomentFileError(f"{path}: precision-bits must be at least 64")
    values = []
    with mp.workprec(max(bits or mp.prec, mp.prec)):
        for number, line in lines:
            if line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) != 2:
                raise MomentFileError(f"{path}:{number}: expected 'n value', got {line!r}")
            try:
                index = int(fields[0])
            except ValueError:
                raise MomentFileError(f"{path}:{number}: bad index {fields[0]!r}")
            if index != len(values):
                raise MomentFileError(f"{path}:{number}: expected index {len(values)}, got {index}")
            try:
                values.append(parse_value(fields[1]))
            except MomentFileError as err:
                raise MomentFileError(f"{path}:{number}: {err.detail}")
    if not values:
        raise MomentFileError(f"{path}: no moments found")
    return values, bits


def write_moment_file(values, path, precision_bits: int) -> Path:
    """
    Writes moments as exact hexadecimal floats under a precision header, so
    that :func:`load_moment_file` reproduces them bit for bit.

    :param values: The moments s_0, s_1, ...
    :type values: list[mpf]
    :param path: Destination file.
    :type path: str | Path
    :param precision_bits: Precision recorded in the header.
    :type precision_bits: int
    :return: The written path.
    :rtype: Path
    """
    path = Path(path)
    lines = [f"# precision-bits: {precision_bits}"]
    with mp.workprec(precision_bits):
        for n, value in enumerate(values):
            lines.append(f"{n} {format_hex(mpf(value))}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def load_jacobi_file(path) -> JacobiCoefficients:
    """
    Reads recurrence coefficients from lines ``n b_n a_n`` (a_n unused at
    n = 0) with an optional ``# s0: value`` header.

    :param path: The coefficient file.
    :type path: str | Path
    :return: The coefficients.
    :rtype: JacobiCoefficients
    """
    diagonal = []
    off_diagonal = []
    s0 = mpf(1)
    for number, line in _rows(path):
        if line.startswith("#"):
            header = S0_HEADER.match(line)
            if header:
                s0 = parse_value(header.group(1))
            continue
        fields = line.split()
        if len(fields) != 3:
            raise MomentFileError(f"{path}:{number}: expected 'n b_n a_n', got {line!r}")
        if fields[0] != str(len(diagonal)):
            raise MomentFileError(f"{path}:{number}: expected index {len(diagonal)}, got {fields[0]}")
        diagonal.append(parse_value(fields[1]))
        if diagonal[1:]:
            off_diagonal.append(parse_value(fields[2]))
    if not diagonal:
        raise MomentFileError(f"{path}: no coefficients found")
    return JacobiCoefficients(diagonal=diagonal, off_diagonal=off_diagonal, s0=s0)
