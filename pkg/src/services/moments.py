import logging
import math
from pathlib import Path
from typing import Literal, Optional

import mpmath
from mpmath import mp, mpf
from pydantic import model_validator

from src.conf.config import settings
from src.repository import moment_files
from src.schemas import HankelMatrix, JacobiCoefficients, MpModel, MpReal, Precision, QParam
from src.services.errors import MomentSourceError, PrecisionExhausted

logger = logging.getLogger(__name__)

GUARD_BITS = 128


class MomentSource(MpModel):
    """
    Immutable generator of a moment sequence s_n. Stieltjes-Wigert and
    recurrence sources compute at the ambient precision on every call; file
    sources replay values loaded once at construction.
    """

    kind: Literal["stieltjes-wigert", "jacobi-recurrence", "file"]
    q: Optional[QParam] = None
    jacobi: Optional[JacobiCoefficients] = None
    values: Optional[list[MpReal]] = None
    path: Optional[Path] = None
    shift: int = 0
    precision: Optional[Precision] = None

    @model_validator(mode="after")
    def kind_fields(self) -> "MomentSource":
        if self.kind == "stieltjes-wigert" and self.q is None:
            raise ValueError("a stieltjes-wigert source needs q")
        if self.kind == "jacobi-recurrence" and self.jacobi is None:
            raise ValueError("a jacobi-recurrence source needs coefficients")
        if self.kind == "file" and not self.values:
            raise ValueError("a file source needs at least one moment")
        return self

    def moment(self, n: int) -> mpf:
        """
        Returns s_n of this source, honouring any shift.

        :param n: Moment index.
        :type n: int
        :return: The moment at the ambient precision.
        :rtype: mpf
        """
        if n < 0:
            raise MomentSourceError(f"moment index must be nonnegative, got {n}")
        index = n + self.shift
        if self.kind == "stieltjes-wigert":
            return sw_moment(index, self.q)
        if self.kind == "jacobi-recurrence":
            return moments_from_jacobi(self, index)
        if index >= len(self.values):
            where = f" in {self.path}" if self.path else ""
            raise MomentSourceError(f"moment s_{index} requested but only {len(self.values)} are listed{where}")
        return +self.values[index]

    def required_precision(self, N: int) -> int:
        """
        Working precision needed to assemble the Hankel matrix of order N + 1.

        :param N: Matrix order minus one.
        :type N: int
        :return: Number of bits.
        :rtype: int
        """
        if self.kind == "stieltjes-wigert":
            top = N + 1 + self.shift // 2
            magnitude = top**2 * -float(mpmath.log(self.q.q, 2)) / 2
            return int(math.ceil(magnitude)) + GUARD_BITS
        if self.precision is not None:
            return self.precision.bits
        return 64

    def working_precision(self, N: int, base: Optional[int] = None) -> int:
        """
        Precision to run order N at: the larger of ``base`` (default: the
        ambient precision) and :meth:`required_precision`.

        :param N: Matrix order minus one.
        :type N: int
        :param base: Lower limit on the returned precision.
        :type base: int | None
        :return: Number of bits.
        :rtype: int
        """
        bits = max(base if base is not None else mp.prec, self.required_precision(N))
        if bits > settings.max_prec_bits:
            raise PrecisionExhausted(
                f"order {N} needs {bits} bits, above the cap of {settings.max_prec_bits}",
                required_bits=bits,
            )
        return bits


def sw_moment(n: int, q) -> mpf:
    """
    Stieltjes-Wigert moment s_n = q^{-(n+1)^2/2}.

    :param n: Moment index.
    :type n: int
    :param q: The base.
    :type q: QParam
    :return: The moment.
    :rtype: mpf
    """
    qq = QParam.of(q).q
    return qq ** (-mpf((n + 1) ** 2) / 2)


def _apply(diagonal, off_diagonal, vector: list, size: int) -> list:
    out = []
    for i in range(size):
        acc = mpf(0)
        if i < len(vector):
            acc += diagonal[i] * vector[i]
        if 0 < i <= len(vector):
            acc += off_diagonal[i - 1] * vector[i - 1]
        if i + 1 < len(vector):
            acc += off_diagonal[i] * vector[i + 1]
        out.append(acc)
    return out


def moments_from_jacobi(src: MomentSource, n: int) -> mpf:
    """
    s_n = s_0 (J^n)_{00} for the symmetric tridiagonal matrix J of a
    jacobi-recurrence source, as <J^m e_0, J^(n-m) e_0> with m = n // 2.
    Only coefficients through index n // 2 are read.

    :param src: A jacobi-recurrence source.
    :type src: MomentSource
    :param n: Moment index.
    :type n: int
    :return: The moment.
    :rtype: mpf
    """
    coeffs = src.jacobi
    if coeffs is None:
        raise MomentSourceError("source has no recurrence coefficients")
    if any(a <= 0 for a in coeffs.off_diagonal):
        raise MomentSourceError("off-diagonal recurrence coefficients must be positive")
    half = n // 2
    if len(coeffs.diagonal) < half + 1 or len(coeffs.off_diagonal) < half:
        raise MomentSourceError(
            f"s_{n} needs diagonal through index {half} and off-diagonal through index {half - 1}"
        )
    vector = [mpf(1)]
    for step in range(1, half + 1):
        vector = _apply(coeffs.diagonal, coeffs.off_diagonal, vector, step + 1)
    other = vector
    if n % 2:
        other = _apply(coeffs.diagonal, coeffs.off_diagonal, vector, half + 1)
    return coeffs.s0 * mp.fdot(vector, other)


def moments_from_file(path) -> MomentSource:
    """
    Loads a moment file fully and returns a source replaying it.

    :param path: Path of the moment file.
    :type path: str | Path
    :return: A file source.
    :rtype: MomentSource
    """
    values, bits = moment_files.load_moment_file(path)
    precision = Precision(bits=bits) if bits else None
    logger.debug("loaded %d moments from %s", len(values), path)
    return MomentSource(kind="file", values=values, path=Path(path), precision=precision)


def stieltjes_wigert(q) -> MomentSource:
    return MomentSource(kind="stieltjes-wigert", q=QParam.of(q))


def jacobi_source(diagonal, off_diagonal, s0=1) -> MomentSource:
    """
    Builds a jacobi-recurrence source from x p_n = a_{n+1} p_{n+1} + b_n p_n + a_n p_{n-1}.

    :param diagonal: b_0, b_1, ...
    :type diagonal: list
    :param off_diagonal: a_1, a_2, ... (all positive).
    :type off_diagonal: list
    :param s0: The total mass.
    :type s0: mpf
    :return: A jacobi-recurrence source.
    :rtype: MomentSource
    """
    coeffs = JacobiCoefficients(diagonal=list(diagonal), off_diagonal=list(off_diagonal), s0=s0)
    if any(a <= 0 for a in coeffs.off_diagonal):
        raise MomentSourceError("off-diagonal recurrence coefficients must be positive")
    if coeffs.s0 <= 0:
        raise MomentSourceError("s0 must be positive")
    return MomentSource(kind="jacobi-recurrence", jacobi=coeffs)


def jacobi_file_source(path) -> MomentSource:
    coeffs = moment_files.load_jacobi_file(path)
    return jacobi_source(coeffs.diagonal, coeffs.off_diagonal, coeffs.s0)


def hankel(src: MomentSource, N: int) -> HankelMatrix:
    """
    Assembles H_N with entries s_{j+k}, 0 <= j, k <= N.

    :param src: The moment source.
    :type src: MomentSource
    :param N: Matrix order minus one.
    :type N: int
    :return: The Hankel matrix.
    :rtype: HankelMatrix
    """
    if N < 0:
        raise MomentSourceError("Hankel order must be nonnegative")
    required = src.required_precision(N)
    if required > mp.prec:
        raise PrecisionExhausted(
            f"H_{N} needs {required} bits but the working precision is {mp.prec}",
            required_bits=required,
        )
    moments = [src.moment(n) for n in range(2 * N + 1)]
    return HankelMatrix.from_moments(moments, N)


def shifted(src: MomentSource) -> MomentSource:
    """Source of s'_n = s_{n+2}."""
    return src.model_copy(update={"shift": src.shift + 2})
