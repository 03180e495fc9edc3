"""
q-Pochhammer symbols, Gaussian binomials, basic hypergeometric series and the
Jacobi triple product, evaluated at the ambient mpmath precision with explicit
truncation and rounding bounds.
"""
import logging
import math

import mpmath
from mpmath import mp, mpf

from src.conf.config import settings
from src.schemas import QParam, SeriesValue
from src.services.errors import ConvergenceError, PrecisionExhausted, QSeriesError

logger = logging.getLogger(__name__)


def eps() -> mpf:
    """
    Unit roundoff at the ambient precision.

    :return: 2^(1 - prec).
    :rtype: mpf
    """
    return mpf(2) ** (1 - mp.prec)


def rounding(ops: int, magnitude) -> mpf:
    """
    Bound on accumulated rounding after ``ops`` floating point operations on
    quantities of size ``magnitude``.

    :param ops: Number of operations.
    :type ops: int
    :param magnitude: Size of the quantities involved.
    :type magnitude: mpf
    :return: Rounding bound.
    :rtype: mpf
    """
    return 4 * ops * eps() * abs(magnitude)


def check_tolerance(tol=None) -> mpf:
    """
    Validates a requested absolute tolerance against the ambient precision.

    :param tol: The tolerance, or None for the precision default.
    :type tol: mpf | str | float | None
    :return: The tolerance as an mpf.
    :rtype: mpf
    """
    floor = mpf(2) ** (8 - mp.prec)
    if tol is None:
        return floor * 256
    tol = mpf(tol)
    if tol <= 0:
        raise QSeriesError(f"tolerance must be positive, got {tol}")
    if tol < floor:
        needed = int(math.ceil(-float(mpmath.log(tol, 2)))) + 8
        raise PrecisionExhausted(
            f"tolerance {mpmath.nstr(tol, 5)} is below the resolution of {mp.prec}-bit arithmetic; "
            f"at least {needed} bits are required",
            required_bits=needed,
        )
    return tol


def q_value(q) -> mpf:
    """
    Extracts the numeric q from a QParam or a plain number and checks |q| < 1.

    :param q: The base.
    :type q: QParam | mpf | float
    :return: The base as an mpmath number.
    :rtype: mpf | mpc
    """
    if isinstance(q, QParam):
        return q.q
    value = mpmath.mpmathify(q)
    if abs(value) >= 1:
        raise QSeriesError(f"q-functions need |q| < 1, got q={value}")
    return value


def product_of(*factors: SeriesValue) -> SeriesValue:
    """
    Multiplies series values and propagates their error bounds.

    :param factors: The factors.
    :type factors: SeriesValue
    :return: The product with a combined bound.
    :rtype: SeriesValue
    """
    value = mpf(1)
    exact = mpf(1)
    padded = mpf(1)
    for factor in factors:
        value *= factor.value
        exact *= abs(factor.value)
        padded *= abs(factor.value) + factor.err
    return SeriesValue(value=value, err=padded - exact + rounding(len(factors), value))


def quotient_of(num: SeriesValue, den: SeriesValue) -> SeriesValue:
    """
    Divides two series values and propagates their error bounds.

    :param num: Numerator.
    :type num: SeriesValue
    :param den: Denominator; its error must be smaller than its magnitude.
    :type den: SeriesValue
    :return: The quotient with a combined bound.
    :rtype: SeriesValue
    """
    if abs(den.value) <= den.err:
        raise PrecisionExhausted("denominator is not resolved from zero at this tolerance")
    value = num.value / den.value
    bound = (abs(num.value) + num.err) / (abs(den.value) - den.err) - abs(value)
    return SeriesValue(value=value, err=bound + rounding(2, value))


def qpochhammer(a, q, n=None, tol=None) -> SeriesValue:
    """
    Evaluates (a;q)_n. With ``n`` None (or infinite) the product is truncated
    once the logarithmic tail bound certifies the requested tolerance.

    :param a: The argument.
    :type a: mpf | mpc
    :param q: The base, |q| < 1.
    :type q: QParam | mpf
    :param n: Number of factors, or None for the infinite product.
    :type n: int | None
    :param tol: Absolute tolerance for the infinite product.
    :type tol: mpf | None
    :return: The product and its error bound.
    :rtype: SeriesValue
    """
    qq = q_value(q)
    a = mpmath.mpmathify(a)
    if n is not None and not (isinstance(n, (float, mpf)) and mpmath.isinf(n)):
        n = int(n)
        if n < 0:
            raise QSeriesError("n cannot be negative")
        value = mpf(1)
        for j in range(n):
            value = value * (1 - a * qq**j)
        return SeriesValue(value=value, err=rounding(3 * n, value))

    tol = check_tolerance(tol)
    abs_q = abs(qq)
    value = mpf(1)
    j = 0
    while True:
        term = a * qq**j
        factor = 1 - term
        if abs(factor) <= 4 * eps() * max(1, abs(term)):
            raise QSeriesError(f"factor 1 - a*q^{j} vanishes, (a;q)_inf is zero")
        value *= factor
        j += 1
        t = abs(a) * abs_q**j
        if t <= 0.5:
            log_tail = t / ((1 - abs_q) * (1 - t))
            tail = abs(value) * mp.expm1(log_tail)
            if tail <= tol:
                break
        if j > settings.max_terms:
            raise ConvergenceError(f"(a;q)_inf did not reach tolerance within {settings.max_terms} factors")
    logger.debug("qpochhammer truncated after %d factors", j)
    return SeriesValue(value=value, err=tail + rounding(3 * j, value))


def euler(q, tol=None) -> SeriesValue:
    """Euler function (q;q)_inf."""
    return qpochhammer(q_value(q), q, None, tol)


def qbinomial(n: int, k: int, q) -> mpf:
    """
    Gaussian binomial coefficient [n k]_q as a product of positive factors.

    :param n: Upper index.
    :type n: int
    :param k: Lower index, 0 <= k <= n.
    :type k: int
    :param q: The base.
    :type q: QParam | mpf
    :return: The coefficient.
    :rtype: mpf
    """
    if k < 0 or k > n:
        raise QSeriesError(f"q-binomial needs 0 <= k <= n, got n={n}, k={k}")
    qq = q_value(q)
    k = min(k, n - k)
    num = mpf(1)
    den = mpf(1)
    for i in range(1, k + 1):
        num *= 1 - qq ** (n - k + i)
        den *= 1 - qq**i
    return num / den


def _terminates(params, qq) -> bool:
    for a in params:
        if a == 0:
            continue
        for m in range(settings.max_terms):
            factor = 1 - a * qq**m
            if factor == 0:
                return True
            if abs(a * qq**m) < mpf("0.5"):
                break
    return False


def phi_series(num, den, q, z, tol=None) -> SeriesValue:
    """
    Basic hypergeometric series r+1phi_r(num; den; q, z) in the Gasper-Rahman
    normalization, truncated once a geometric tail majorant certifies ``tol``.

    :param num: The r+1 numerator parameters.
    :type num: list
    :param den: The r denominator parameters.
    :type den: list
    :param q: The base.
    :type q: QParam | mpf
    :param z: The argument, |z| < 1 unless the series terminates.
    :type z: mpf | mpc
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: The sum and its error bound.
    :rtype: SeriesValue
    """
    qq = q_value(q)
    tol = check_tolerance(tol)
    a = [mpmath.mpmathify(x) for x in num]
    b = [mpmath.mpmathify(x) for x in den]
    z = mpmath.mpmathify(z)
    if len(a) != len(b) + 1:
        raise QSeriesError(
            f"r+1phi_r needs one more numerator than denominator parameter, got {len(a)} and {len(b)}"
        )
    abs_q = abs(qq)
    if abs(z) >= 1 and not _terminates(a, qq):
        raise QSeriesError(f"series diverges: |z| = {mpmath.nstr(abs(z), 5)} >= 1 and it does not terminate")

    term = mpf(1)
    total = mpf(1)
    abs_sum = mpf(1)
    n = 0
    tail = mpf(0)
    while True:
        qn = qq**n
        num_factor = mpf(1)
        for ai in a:
            num_factor *= 1 - ai * qn
        if num_factor == 0:
            logger.debug("phi series terminated at n=%d", n)
            break
        den_factor = mpf(1)
        for bi in b:
            factor = 1 - bi * qn
            if factor == 0:
                raise QSeriesError(f"denominator parameter {bi} makes term {n + 1} infinite")
            den_factor *= factor
        term = term * num_factor / den_factor * z / (1 - qq ** (n + 1))
        total += term
        abs_sum += abs(term)
        n += 1

        qn_abs = abs_q**n
        if all(abs(bi) * qn_abs < 1 for bi in b):
            ratio = abs(z) / (1 - abs_q ** (n + 1))
            for ai in a:
                ratio *= 1 + abs(ai) * qn_abs
            for bi in b:
                ratio /= 1 - abs(bi) * qn_abs
            if ratio < 1:
                tail = abs(term) * ratio / (1 - ratio)
                if tail <= tol:
                    break
        if n > settings.max_terms:
            raise ConvergenceError(f"phi series tail majorant not established within {settings.max_terms} terms")
    ops = 4 * (len(a) + len(b) + 2) * (n + 1)
    return SeriesValue(value=total, err=tail + rounding(ops, abs_sum))


def theta_coefficient(k: int, q) -> mpf:
    """
    Laurent coefficient c_k of the Jacobi triple product; c_k = c_{-k}.

    :param k: The index.
    :type k: int
    :param q: The base.
    :type q: QParam | mpf
    :return: c_k = (-1)^k [q^{k(k+1)/2} + q^{k(k-1)/2}].
    :rtype: mpf
    """
    qq = q_value(q)
    sign = -1 if k % 2 else 1
    return sign * (qq ** (k * (k + 1) // 2) + qq ** (k * (k - 1) // 2))


def triple_product(z, q, tol=None, mode: str = "product") -> SeriesValue:
    """
    Jacobi triple product j(z) = (q, z, 1/z; q)_inf, either as the product
    (``mode="product"``) or as the Laurent sum of theta coefficients
    (``mode="sum"``).

    :param z: Nonzero argument, usually on the unit circle.
    :type z: mpc | mpf
    :param q: The base.
    :type q: QParam | mpf
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :param mode: ``"product"`` or ``"sum"``.
    :type mode: str
    :return: j(z) and its error bound.
    :rtype: SeriesValue
    """
    qq = q_value(q)
    tol = check_tolerance(tol)
    z = mpmath.mpmathify(z)
    if z == 0:
        raise QSeriesError("triple product is undefined at z = 0")
    if z == 1:
        logger.warning("triple product evaluated at z = 1 where j(z) vanishes")
        return SeriesValue(value=mpf(0), err=mpf(0))

    if mode == "product":
        return product_of(
            qpochhammer(qq, qq, None, tol / 8),
            qpochhammer(z, qq, None, tol / 8),
            qpochhammer(1 / z, qq, None, tol / 8),
        )
    if mode != "sum":
        raise QSeriesError(f"unknown triple product mode {mode!r}")

    abs_q = abs(qq)
    spread = max(abs(z), 1 / abs(z))
    total = theta_coefficient(0, qq) + 0 * z
    abs_sum = abs(total)
    k = 0
    while True:
        k += 1
        term = theta_coefficient(k, qq) * (z**k + z ** (-k))
        total += term
        abs_sum += abs(term)
        if abs_q ** (k + 1) * spread < 1:
            next_bound = 4 * abs_q ** (k * (k + 1) // 2) * spread ** (k + 1)
            tail = next_bound / (1 - abs_q ** (k + 1) * spread)
            if tail <= tol:
                break
        if k > settings.max_terms:
            raise ConvergenceError("theta series did not converge")
    return SeriesValue(value=total, err=tail + rounding(6 * k, abs_sum * spread**k))


def identity_check_36(k: int, q, omega, tol=None) -> tuple[SeriesValue, SeriesValue]:
    """
    Both sides of the summation identity

        sum_{n>=k} omega^n/(q;q)_n [n k]_q^2
            = 1/(omega;q)_inf sum_{j=0}^{k} (omega;q)_j omega^{2k-j} / ((q;q)_j (q;q)_{k-j}^2),

    whose case omega = q rewrites the inner sums of the Stieltjes-Wigert rho_0.

    :param k: Nonnegative index.
    :type k: int
    :param q: The base.
    :type q: QParam | mpf
    :param omega: Real number in (0, 1).
    :type omega: mpf
    :param tol: Absolute tolerance for each side.
    :type tol: mpf | None
    :return: (left side, right side).
    :rtype: tuple[SeriesValue, SeriesValue]
    """
    qq = q_value(q)
    omega = mpf(omega)
    tol = check_tolerance(tol)
    if not 0 < omega < 1:
        raise QSeriesError(f"omega must lie in (0, 1), got {omega}")
    if k < 0:
        raise QSeriesError("k must be nonnegative")

    term = omega**k / qpochhammer(qq, qq, k).value
    total = term
    n = k
    while True:
        ratio = omega * (1 - qq ** (n + 1)) / (1 - qq ** (n + 1 - k)) ** 2
        term *= ratio
        total += term
        n += 1
        majorant = omega / (1 - qq ** (n + 1 - k)) ** 2
        if majorant < 1:
            tail = term * majorant / (1 - majorant)
            if tail <= tol:
                break
        if n - k > settings.max_terms:
            raise ConvergenceError("left side of the omega identity did not converge")
    lhs = SeriesValue(value=total, err=tail + rounding(6 * (n - k + 1), total))

    q_fact = [mpf(1)]
    w_fact = [mpf(1)]
    for j in range(1, k + 1):
        q_fact.append(q_fact[-1] * (1 - qq**j))
        w_fact.append(w_fact[-1] * (1 - omega * qq ** (j - 1)))
    finite = mpmath.fsum(
        w_fact[j] * omega ** (2 * k - j) / (q_fact[j] * q_fact[k - j] ** 2) for j in range(k + 1)
    )
    finite_value = SeriesValue(value=finite, err=rounding(8 * (k + 1), finite))
    rhs = quotient_of(finite_value, qpochhammer(omega, qq, None, tol / 4))
    return lhs, rhs


def phi_transform(a, b, c, z, q, tol=None) -> tuple[SeriesValue, SeriesValue]:
    """
    Both sides of the transformation

        2phi1(a, b; c; q, z) = (abz/c;q)_inf/(bz/c;q)_inf 3phi2(a, c/b, 0; c, cq/(bz); q, q)
            + (a, bz, c/b;q)_inf/(c, z, c/(bz);q)_inf 3phi2(z, abz/c, 0; bz, bzq/c; q, q).

    The second term vanishes when a or c/b is of the form q^-m.

    :return: (left side, right side).
    :rtype: tuple[SeriesValue, SeriesValue]
    """
    qq = q_value(q)
    tol = check_tolerance(tol)
    a, b, c, z = (mpmath.mpmathify(x) for x in (a, b, c, z))
    lhs = phi_series([a, b], [c], qq, z, tol)
    part = tol / 16

    def pochhammers(*params) -> SeriesValue:
        return product_of(*(qpochhammer(p, qq, None, part) for p in params))

    first = quotient_of(
        product_of(pochhammers(a * b * z / c), phi_series([a, c / b, 0], [c, c * qq / (b * z)], qq, qq, part)),
        pochhammers(b * z / c),
    )
    if _terminates([a, c / b], qq):
        return lhs, first
    second = quotient_of(
        product_of(pochhammers(a, b * z, c / b), phi_series([z, a * b * z / c, 0], [b * z, b * z * qq / c], qq, qq, part)),
        pochhammers(c, z, c / (b * z)),
    )
    rhs = SeriesValue(
        value=first.value + second.value,
        err=first.err + second.err + rounding(1, first.value + second.value),
    )
    return lhs, rhs
