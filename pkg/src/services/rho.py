"""
rho_0 = (1/2pi) int sum_k |p_k(e^{i theta})|^2 dtheta for the Stieltjes-Wigert,
Al-Salam-Carlitz, Freud-like and q^{-1}-Hermite moment problems, each by at
least two independent routes carrying certified error bounds.
"""
import logging
import math
from typing import Optional

import mpmath
from mpmath import mp, mpf, mpc

from src.conf.config import settings
from src.schemas import (
    ASCParam,
    CircleDensitySample,
    FreudConstants,
    QParam,
    RhoValue,
    RouteComparison,
    SeriesValue,
)
from src.services.errors import ConvergenceError, PrecisionExhausted, QSeriesError
from src.services.moments import hankel, stieltjes_wigert
from src.services.quadrature import periodic_trapezoid
from src.services.qseries import (
    check_tolerance,
    euler,
    phi_series,
    product_of,
    qpochhammer,
    quotient_of,
    rounding,
    theta_coefficient,
)
from src.services.spectra import beta_from_hankel, kernel_matrix, trace_bound

logger = logging.getLogger(__name__)


def _rho(value: SeriesValue, route: str, family: str) -> RhoValue:
    return RhoValue(value=mp.re(value.value), err=value.err, route=route, family=family)


def _inverse_upper(value: SeriesValue) -> mpf:
    if value.value <= value.err:
        raise PrecisionExhausted("value is not resolved from zero")
    return 1 / (value.value - value.err)


def lower_bound(rho: RhoValue) -> mpf:
    """
    Certified lower bound l = 1/(rho_0 + err) for the limit of lambda_N.

    :param rho: A rho_0 evaluation.
    :type rho: RhoValue
    :return: The lower bound.
    :rtype: mpf
    """
    return 1 / (rho.value + rho.err)


def compare_routes(first: RhoValue, second: RhoValue) -> RouteComparison:
    """
    Compares two evaluations of the same rho_0.

    :param first: One route.
    :type first: RhoValue
    :param second: Another route.
    :type second: RhoValue
    :return: Difference, combined error and whether they agree.
    :rtype: RouteComparison
    """
    diff = abs(first.value - second.value)
    combined = first.err + second.err
    agree = diff <= combined
    if not agree:
        logger.warning(
            "routes %s and %s disagree: diff %s exceeds combined err %s",
            first.route,
            second.route,
            mp.nstr(diff, 8),
            mp.nstr(combined, 8),
        )
    return RouteComparison(first=first, second=second, diff=diff, combined_err=combined, agree=agree)


# Stieltjes-Wigert


def _sw_outer_tail(qq: mpf, K: int, scale: mpf) -> mpf:
    return scale * qq ** (2 * (K + mpf(3) / 2) ** 2) / (1 - qq ** (4 * K + 8))


def rho0_sw_direct(q, tol=None) -> RhoValue:
    """
    rho_0 = sum_k q^{2(k+1/2)^2}/(q;q)_k 2phi1(0, q^{k+1}; q; q, q), with each
    inner series summed to its own share of the tolerance.

    :param q: The base.
    :type q: QParam
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: rho_0 and its error bound.
    :rtype: RhoValue
    """
    q = QParam.of(q)
    qq = q.q
    tol = check_tolerance(tol)
    inv_euler = _inverse_upper(euler(q, tol / 16))
    # inner series <= 1/((1-q)(q;q)_inf^2), 1/(q;q)_k <= 1/(q;q)_inf
    scale = inv_euler**3 / (1 - qq)

    total = mpf(0)
    err = mpf(0)
    q_fact = mpf(1)
    k = 0
    while True:
        if k > 0:
            q_fact *= 1 - qq**k
        prefactor = qq ** (2 * (k + mpf(1) / 2) ** 2) / q_fact
        inner_tol = min(mpf(1), tol * mpf(2) ** (-k - 2) / prefactor)
        inner = phi_series([0, qq ** (k + 1)], [qq], q, qq, inner_tol)
        total += prefactor * inner.value
        err += prefactor * inner.err
        tail = _sw_outer_tail(qq, k, scale)
        if tail <= tol / 2:
            break
        k += 1
        if k > settings.max_terms:
            raise ConvergenceError("outer Stieltjes-Wigert sum did not converge")
    logger.debug("direct Stieltjes-Wigert sum used %d outer terms", k + 1)
    return _rho(SeriesValue(value=total, err=err + tail + rounding(8 * (k + 1), total)), "inner-phi-series", "stieltjes-wigert")


def rho0_sw_fast(q, tol=None) -> RhoValue:
    """
    rho_0 = (1/(q;q)_inf) sum_k q^{2(k+1/2)^2} sum_{j<=k} q^j/(q;q)_j^2.

    :param q: The base.
    :type q: QParam
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: rho_0 and its error bound.
    :rtype: RhoValue
    """
    q = QParam.of(q)
    qq = q.q
    tol = check_tolerance(tol)
    euler_value = euler(q, tol / 16)
    inv_euler = _inverse_upper(euler_value)
    scale = inv_euler**2 / (1 - qq)

    total = mpf(0)
    partial = mpf(0)
    q_fact = mpf(1)
    k = 0
    while True:
        if k > 0:
            q_fact *= 1 - qq**k
        partial += qq**k / q_fact**2
        total += qq ** (2 * (k + mpf(1) / 2) ** 2) * partial
        tail = _sw_outer_tail(qq, k, scale)
        if tail * inv_euler <= tol / 4:
            break
        k += 1
        if k > settings.max_terms:
            raise ConvergenceError("Stieltjes-Wigert sum did not converge")
    outer = SeriesValue(value=total, err=tail + rounding(6 * (k + 1), total))
    return _rho(quotient_of(outer, euler_value), "finite-inner-sums", "stieltjes-wigert")


def _sw_trace_tail(qq: mpf, N: int, inv_euler: mpf) -> mpf:
    # sum_k beta_{n,k}^2 <= q^{n+1/2}/((1-q)(q;q)_inf^3)
    return qq ** (N + mpf(3) / 2) * inv_euler**3 / (1 - qq) ** 2


def rho0_sw_trace(q, N: int, tol=None) -> RhoValue:
    """
    rho_0 approached from below by the trace of the kernel matrix K_N; err
    bounds the neglected rows of the coefficient triangle.

    :param q: The base.
    :type q: QParam
    :param N: Matrix order minus one.
    :type N: int
    :param tol: Tolerance for the Euler function in the tail bound.
    :type tol: mpf | None
    :return: trace(K_N) and the tail bound.
    :rtype: RhoValue
    """
    q = QParam.of(q)
    src = stieltjes_wigert(q)
    with mp.workprec(src.working_precision(N)):
        trace = trace_bound(kernel_matrix(beta_from_hankel(hankel(src, N))))
    inv_euler = _inverse_upper(euler(q, check_tolerance(tol)))
    return RhoValue(
        value=trace,
        err=_sw_trace_tail(q.q, N, inv_euler),
        route="kernel-trace",
        family="stieltjes-wigert",
    )


# Al-Salam-Carlitz


def _asc_prefactor(p: ASCParam, tol) -> SeriesValue:
    qq = p.q.q
    e = euler(p.q, tol)
    return product_of(qpochhammer(p.a * qq, qq, None, tol), e, e)


def asc_In(n: int, q, tol=None, form: str = "folded") -> SeriesValue:
    """
    I_n, the circle integral of (e^{it}, e^{-it}; q)_inf / |1 - q^n e^{it}|^2,
    from the theta function expansion. For n >= 1 the alternating sum cancels
    down from terms of size q^{-n^2/2}, so it is summed with that many extra
    bits.

    :param n: Nonnegative index.
    :type n: int
    :param q: The base.
    :type q: QParam
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :param form: ``"folded"`` (coefficients 2(-1)^k q^{k(k-1)/2}) or
        ``"theta"`` (the triple product coefficients c_k).
    :type form: str
    :return: I_n and its error bound.
    :rtype: SeriesValue
    """
    q = QParam.of(q)
    qq = q.q
    tol = check_tolerance(tol)
    if n < 0:
        raise QSeriesError("I_n needs n >= 0")
    if form not in ("folded", "theta"):
        raise QSeriesError(f"unknown I_n form {form!r}")
    euler_value = euler(q, tol / 8)

    if n == 0:
        total = mpf(0)
        k = 0
        while True:
            total += (-1) ** k * qq ** (k * (k + 1) // 2)
            k += 1
            tail = qq ** (k * (k + 1) // 2)
            if tail * 4 <= tol * euler_value.value:
                break
        return quotient_of(SeriesValue(value=total, err=tail + rounding(3 * k, 1)), euler_value)

    extra = int(math.ceil((n + 1) ** 2 * -float(mpmath.log(qq, 2)) / 2)) + 32
    bits = mp.prec + extra
    if bits > settings.max_prec_bits:
        raise PrecisionExhausted(
            f"I_{n} by series needs {bits} bits, above the cap of {settings.max_prec_bits}; use quadrature",
            required_bits=bits,
        )
    scale = 1 - qq ** (2 * n)
    target = tol * scale * euler_value.value / 4
    with mp.workprec(bits):
        total = mpf(0)
        biggest = mpf(0)
        k = 0
        while True:
            k += 1
            if form == "folded":
                coeff = 2 * (-1) ** k * qq ** (k * (k - 1) // 2)
            else:
                coeff = theta_coefficient(k, qq)
            term = coeff * (qq ** (n * k) - qq ** (-n * k))
            total += term
            biggest = max(biggest, abs(term))
            if k + 1 > n:
                following = 4 * qq ** (k * (k + 1) // 2 - n * (k + 1))
                tail = following / (1 - qq ** (k + 1 - n))
                if tail <= target:
                    break
            if k > settings.max_terms:
                raise ConvergenceError(f"theta series for I_{n} did not converge")
        numerator = SeriesValue(value=total, err=tail + rounding(6 * k, biggest))
    logger.debug("I_%d summed with %d extra bits over %d terms", n, extra, k)
    denominator = product_of(SeriesValue(value=scale, err=rounding(2, scale)), euler_value)
    return quotient_of(numerator, denominator)


def _circle_factor(theta, qq, n: Optional[int], tol) -> SeriesValue:
    """|(e^{it};q)_n (q^{n+1} e^{it};q)_inf|^2, i.e. the I_n integrand; n=None drops no factor."""
    z = mp.expj(theta)
    if n is None:
        head = 1 - z
        rest = qpochhammer(qq * z, qq, None, tol)
    else:
        head = qpochhammer(z, qq, n).value
        rest = qpochhammer(qq ** (n + 1) * z, qq, None, tol)
    size = abs(head) * abs(rest.value)
    err = (size + abs(head) * rest.err) ** 2 - size**2
    return SeriesValue(value=size**2, err=err + rounding(4, size**2))


def asc_In_quadrature(n: Optional[int], q, tol=None) -> SeriesValue:
    """
    I_n by the periodic trapezoid rule on its defining circle integral;
    ``n=None`` gives the limit I_inf of the integrand without a removed factor.

    :param n: Nonnegative index or None.
    :type n: int | None
    :param q: The base.
    :type q: QParam
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: I_n and its error bound.
    :rtype: SeriesValue
    """
    q = QParam.of(q)
    qq = q.q
    tol = check_tolerance(tol)
    node_tol = tol / 8
    return periodic_trapezoid(lambda t: _circle_factor(t, qq, n, node_tol), tol / 2, symmetric=True)


def asc_I_infinity(q, tol=None) -> SeriesValue:
    """
    Closed form I_inf = sum_k (q^{k(k-1)/2}/(q;q)_k)^2, the n -> inf limit of I_n.

    :param q: The base.
    :type q: QParam
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: I_inf and its error bound.
    :rtype: SeriesValue
    """
    qq = QParam.of(q).q
    tol = check_tolerance(tol)
    term = mpf(1)
    total = mpf(1)
    k = 0
    while True:
        ratio = (qq**k / (1 - qq ** (k + 1))) ** 2
        term *= ratio
        total += term
        k += 1
        bound = (qq**k / (1 - qq ** (k + 1))) ** 2
        if bound < 1:
            tail = term * bound / (1 - bound)
            if tail <= tol:
                break
    return SeriesValue(value=total, err=tail + rounding(5 * k, total))


def rho0_asc(p: ASCParam, tol=None) -> RhoValue:
    """
    rho_0 = 1/(aq,q,q;q)_inf sum_n I_n (aq;q)_n/(q;q)_n (q/a)^n. I_n comes
    from the theta series up to ``settings.asc_n_switch``; the rest of the
    weighted sum is integrated as a single trapezoid quadrature.

    :param p: The Al-Salam-Carlitz parameters.
    :type p: ASCParam
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: rho_0 and its error bound.
    :rtype: RhoValue
    """
    qq = p.q.q
    a = p.a
    tol = check_tolerance(tol)
    prefactor = _asc_prefactor(p, tol / 64)
    target = tol * prefactor.value / 4
    ratio = qq / a
    euler_value = euler(p.q, tol / 64)
    # I_n <= 4 (-q;q)_inf^2 and |(aq;q)_n/(q;q)_n| <= 1/(q;q)_inf
    minus_q = qpochhammer(-qq, qq, None, tol / 64)
    uniform = 4 * (minus_q.value + minus_q.err) ** 2 * _inverse_upper(euler_value)

    n_switch = settings.asc_n_switch
    last = n_switch
    while uniform * ratio ** (last + 1) / (1 - ratio) > target:
        last += 1
        if last > settings.max_terms:
            raise ConvergenceError("Al-Salam-Carlitz series tail did not converge")
    tail = uniform * ratio ** (last + 1) / (1 - ratio)

    weights = [mpf(1)]
    for n in range(1, last + 1):
        weights.append(weights[-1] * (1 - a * qq**n) / (1 - qq**n) * ratio)

    total = mpf(0)
    err = mpf(0)
    for n in range(min(n_switch, last) + 1):
        In = asc_In(n, p.q, target / (4 * (n_switch + 1)))
        total += weights[n] * In.value
        err += abs(weights[n]) * In.err

    if last > n_switch:
        node_tol = target / 16

        def weighted(theta):
            z = mp.expj(theta)
            rest = qpochhammer(qq * z, qq, None, node_tol)
            base = abs(1 - z) ** 2 * abs(rest.value) ** 2
            base_err = abs(1 - z) ** 2 * ((abs(rest.value) + rest.err) ** 2 - abs(rest.value) ** 2)
            acc = mpf(0)
            scale = mpf(0)
            for n in range(n_switch + 1, last + 1):
                factor = weights[n] / abs(1 - qq**n * z) ** 2
                acc += factor
                scale += abs(factor)
            return SeriesValue(value=base * acc, err=base_err * scale + rounding(4 * last, base * scale))

        large = periodic_trapezoid(weighted, target / 4, symmetric=True)
        logger.debug("I_n for %d < n <= %d integrated on one grid", n_switch, last)
        total += large.value
        err += large.err

    weighted_sum = SeriesValue(value=total, err=err + tail + rounding(4 * last, total))
    return _rho(quotient_of(weighted_sum, prefactor), "theta-series", "al-salam-carlitz")


def asc_kernel(theta, p: ASCParam, tol=None) -> SeriesValue:
    """
    (q e^{it}, q e^{-it}; q)_inf 3phi2(e^{it}, e^{-it}, aq; q e^{it}, q e^{-it}; q, q/a),
    the circle kernel of the Al-Salam-Carlitz polynomials without the
    constant 1/(aq,q,q;q)_inf.
    """
    qq = p.q.q
    tol = check_tolerance(tol)
    z = mp.expj(theta)
    zbar = mp.conj(z)
    rest = qpochhammer(qq * z, qq, None, tol / 4)
    size = abs(rest.value) ** 2
    size_err = (abs(rest.value) + rest.err) ** 2 - size
    phi = phi_series([z, zbar, p.a * qq], [qq * z, qq * zbar], qq, qq / p.a, tol / 4)
    value = size * mp.re(phi.value)
    err = size * phi.err + size_err * (abs(phi.value) + phi.err)
    return SeriesValue(value=value, err=err + rounding(4, value))


def rho0_asc_quadrature(p: ASCParam, tol=None) -> RhoValue:
    """
    rho_0 as the trapezoid quadrature of the 3phi2 circle kernel.

    :param p: The Al-Salam-Carlitz parameters.
    :type p: ASCParam
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: rho_0 and its error bound.
    :rtype: RhoValue
    """
    tol = check_tolerance(tol)
    prefactor = _asc_prefactor(p, tol / 64)
    target = tol * prefactor.value / 4
    integral = periodic_trapezoid(lambda t: asc_kernel(t, p, target / 8), target / 2, symmetric=True)
    return _rho(quotient_of(integral, prefactor), "kernel-quadrature", "al-salam-carlitz")


# Freud-like quartic weight


def freud_constants() -> FreudConstants:
    return FreudConstants(K0=mp.gamma(mpf(1) / 4) * mp.gamma(mpf(5) / 4) / mp.sqrt(mp.pi))


def freud_delta(l: int, z, tol=None) -> SeriesValue:
    """
    delta_l(z) = sum_n (-1)^n z^{4n+l}/(4n+l)! for l = 0, 1, 2, 3.

    :param l: The residue class, 0 to 3.
    :type l: int
    :param z: The argument.
    :type z: mpc | mpf
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: delta_l(z) and its error bound.
    :rtype: SeriesValue
    """
    if l not in (0, 1, 2, 3):
        raise QSeriesError(f"delta_l is defined for l = 0..3, got {l}")
    tol = check_tolerance(tol)
    z = mpmath.mpmathify(z)
    if z == 0:
        return SeriesValue(value=mpf(1) if l == 0 else mpf(0), err=mpf(0))
    z4 = z**4
    size = abs(z4)
    term = z**l / mp.factorial(l)
    total = term
    abs_sum = abs(term)
    n = 0
    while True:
        first = 4 * n + l
        denom = (first + 1) * (first + 2) * (first + 3) * (first + 4)
        term = -term * z4 / denom
        total += term
        abs_sum += abs(term)
        n += 1
        first = 4 * n + l
        bound = size / ((first + 1) * (first + 2) * (first + 3) * (first + 4))
        if bound < 1:
            tail = abs(term) * bound / (1 - bound)
            if tail <= tol:
                break
        if n > settings.max_terms:
            raise ConvergenceError("delta series did not converge")
    return SeriesValue(value=total, err=tail + rounding(6 * n, abs_sum))


def freud_delta_closed_form(l: int, z):
    """delta_l through hyperbolic and circular functions of w = z sqrt(i)."""
    root_i = mp.expj(mp.pi / 4)
    w = z * root_i
    if l == 0:
        return (mp.cosh(w) + mp.cos(w)) / 2
    if l == 1:
        return (mp.sinh(w) + mp.sin(w)) / (2 * root_i)
    if l == 2:
        return (mp.cosh(w) - mp.cos(w)) / (2 * mpc(0, 1))
    if l == 3:
        return (mp.sinh(w) - mp.sin(w)) / (2 * mpc(0, 1) * root_i)
    raise QSeriesError(f"delta_l is defined for l = 0..3, got {l}")


def freud_bd(z, tol=None) -> tuple[SeriesValue, SeriesValue]:
    """
    Nevanlinna functions B(z) = -delta_0(K0 sqrt(z/2)) and
    D(z) = (4/pi) delta_2(K0 sqrt(z/2)); the principal square root is used,
    the result does not depend on the branch.

    :param z: The argument.
    :type z: mpc | mpf
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: (B(z), D(z)).
    :rtype: tuple[SeriesValue, SeriesValue]
    """
    tol = check_tolerance(tol)
    K0 = freud_constants().K0
    w = K0 * mp.sqrt(mpmath.mpmathify(z) / 2)
    d0 = freud_delta(0, w, tol)
    d2 = freud_delta(2, w, tol * mp.pi / 4)
    B = SeriesValue(value=-d0.value, err=d0.err)
    D = SeriesValue(value=4 * d2.value / mp.pi, err=4 * d2.err / mp.pi + rounding(2, d2.value))
    return B, D


def _sinhc(x, cutoff):
    if abs(x) < cutoff:
        return 1 + x * x / 6
    return mp.sinh(x) / x


def _sinc(x, cutoff):
    if abs(x) < cutoff:
        return 1 - x * x / 6
    return mp.sin(x) / x


def freud_kernel(theta) -> CircleDensitySample:
    """
    sum_k |p_k(e^{it})|^2 = [sinh a sinh b + sin a sin b]/(pi sin t) with
    a = K0 cos(t/2), b = K0 sin(t/2), written as
    (K0^2/2pi)[sinhc(a) sinhc(b) + sinc(a) sinc(b)] so that t = 0, pi need no limit.

    :param theta: Angle.
    :type theta: mpf
    :return: The kernel sample.
    :rtype: CircleDensitySample
    """
    theta = mpf(theta)
    K0 = freud_constants().K0
    cutoff = mpf(2) ** (-mp.prec / 4)
    a = K0 * mp.cos(theta / 2)
    b = K0 * mp.sin(theta / 2)
    value = K0**2 / (2 * mp.pi) * (_sinhc(a, cutoff) * _sinhc(b, cutoff) + _sinc(a, cutoff) * _sinc(b, cutoff))
    return CircleDensitySample(theta=theta, value=value, err=rounding(24, value))


def freud_kernel_nevanlinna(theta, tol=None) -> CircleDensitySample:
    """
    The same kernel as (B(x)D(y) - B(y)D(x))/(x - y) with x = e^{it}, y = e^{-it}.
    Loses digits as sin(t) -> 0.

    :param theta: Angle with sin(theta) != 0.
    :type theta: mpf
    :param tol: Tolerance for the delta series.
    :type tol: mpf | None
    :return: The kernel sample.
    :rtype: CircleDensitySample
    """
    theta = mpf(theta)
    x = mp.expj(theta)
    y = mp.expj(-theta)
    if x == y:
        raise QSeriesError("the Nevanlinna quotient is singular at sin(theta) = 0")
    Bx, Dx = freud_bd(x, tol)
    By, Dy = freud_bd(y, tol)
    return _nevanlinna_sample(theta, x, y, Bx, Dx, By, Dy)


def _nevanlinna_sample(theta, x, y, Bx, Dx, By, Dy) -> CircleDensitySample:
    numerator = Bx.value * Dy.value - By.value * Dx.value
    spread = abs(x - y)
    err = 0
    for B, D in ((Bx, Dy), (By, Dx)):
        err += (abs(B.value) + B.err) * (abs(D.value) + D.err) - abs(B.value) * abs(D.value)
    value = mp.re(numerator / (x - y))
    return CircleDensitySample(theta=theta, value=value, err=err / spread + rounding(8, abs(numerator) / spread))


def freud_double_sum(tol=None, even_only: bool = True) -> SeriesValue:
    """
    sum over m, n >= 0 (m + n even unless ``even_only`` is False) of
    x^{m+n}/((2m+1)(2n+1) m! n! (m+n)!) with x = (K0/2)^2, summed along
    anti-diagonals m + n = s; each anti-diagonal is at most (2x)^s/(s!)^2.

    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :param even_only: Restrict to m + n even.
    :type even_only: bool
    :return: The double sum and its error bound.
    :rtype: SeriesValue
    """
    tol = check_tolerance(tol)
    x = (freud_constants().K0 / 2) ** 2
    step = 2 if even_only else 1
    total = mpf(0)
    s = 0
    while True:
        inner = mp.fsum(
            1 / ((2 * m + 1) * (2 * (s - m) + 1) * mp.factorial(m) * mp.factorial(s - m)) for m in range(s + 1)
        )
        total += x**s / mp.factorial(s) * inner
        s += step
        following = (2 * x) ** s / mp.factorial(s) ** 2
        ratio = (2 * x) ** step / (mp.factorial(s + step) / mp.factorial(s)) ** 2
        if ratio < 1:
            tail = following / (1 - ratio)
            if tail <= tol:
                break
        if s > settings.max_terms:
            raise ConvergenceError("Freud double sum did not converge")
    return SeriesValue(value=total, err=tail + rounding(4 * s * s, total))


def rho0_freud(tol=None) -> RhoValue:
    """
    rho_0 = (K0^2/pi) times the anti-diagonal double sum over m + n even.

    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: rho_0 and its error bound.
    :rtype: RhoValue
    """
    tol = check_tolerance(tol)
    K0 = freud_constants().K0
    scale = K0**2 / mp.pi
    inner = freud_double_sum(tol / (2 * scale))
    return _rho(
        SeriesValue(value=scale * inner.value, err=scale * inner.err + rounding(4, scale * inner.value)),
        "double-sum",
        "freud-quartic",
    )


def rho0_freud_quadrature(tol=None) -> RhoValue:
    tol = check_tolerance(tol)

    def sample(theta):
        point = freud_kernel(theta)
        return SeriesValue(value=point.value, err=point.err)

    return _rho(periodic_trapezoid(sample, tol, symmetric=True), "kernel-quadrature", "freud-quartic")


# q^{-1}-Hermite


def _qh_tail_log(qq: mpf, M: int) -> Optional[mpf]:
    """Log bound for the factors n > M of prod [(1+q^n)^4 - 16 q^{2n} c]."""
    if qq ** (M + 1) >= mpf("0.15"):
        return None
    return 4 * qq ** (M + 1) / (1 - qq) + 32 * qq ** (2 * M + 2) / (1 - qq**2)


def qh_kernel(theta, q, tol=None) -> CircleDensitySample:
    """
    (1/(q;q)_inf) prod_{n>=1} [(1+q^n)^4 - 16 q^{2n} cos^2(theta)].

    :param theta: Angle.
    :type theta: mpf
    :param q: The base.
    :type q: QParam
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: The kernel sample.
    :rtype: CircleDensitySample
    """
    q = QParam.of(q)
    qq = q.q
    tol = check_tolerance(tol)
    theta = mpf(theta)
    c = mp.cos(theta) ** 2
    euler_value = euler(q, tol / 8)
    product = mpf(1)
    n = 0
    while True:
        n += 1
        product *= (1 + qq**n) ** 4 - 16 * qq ** (2 * n) * c
        log_tail = _qh_tail_log(qq, n)
        if log_tail is not None:
            tail = product * mp.expm1(log_tail)
            if tail * 4 <= tol * euler_value.value:
                break
        if n > settings.max_terms:
            raise ConvergenceError("q-Hermite kernel product did not converge")
    value = quotient_of(SeriesValue(value=product, err=tail + rounding(6 * n, product)), euler_value)
    return CircleDensitySample(theta=theta, value=value.value, err=value.err)


def qhermite_bd(z, q, tol=None) -> tuple[SeriesValue, SeriesValue]:
    """
    Nevanlinna functions of the q^{-1}-Hermite problem at z = sinh(xi):
    B = -(q e^{2xi}, q e^{-2xi}; q^2)_inf/(q, q; q^2)_inf and
    D = sinh(xi) (q^2 e^{2xi}, q^2 e^{-2xi}; q^2)_inf/(q;q)_inf.

    :param z: The argument.
    :type z: mpc | mpf
    :param q: The base.
    :type q: QParam
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: (B(z), D(z)).
    :rtype: tuple[SeriesValue, SeriesValue]
    """
    q = QParam.of(q)
    qq = q.q
    tol = check_tolerance(tol)
    z = mpmath.mpmathify(z)
    e2 = mp.exp(2 * mp.asinh(z))
    q2 = qq**2
    part = tol / 16
    odd = qpochhammer(qq, q2, None, part)
    B = quotient_of(
        product_of(qpochhammer(qq * e2, q2, None, part), qpochhammer(qq / e2, q2, None, part)),
        product_of(odd, odd),
    )
    B = SeriesValue(value=-B.value, err=B.err)
    D = quotient_of(
        product_of(
            SeriesValue(value=z, err=mpf(0)),
            qpochhammer(q2 * e2, q2, None, part),
            qpochhammer(q2 / e2, q2, None, part),
        ),
        euler(q, part),
    )
    return B, D


def qh_kernel_nevanlinna(theta, q, tol=None) -> CircleDensitySample:
    """The q^{-1}-Hermite kernel from qhermite_bd, as (B(x)D(y) - B(y)D(x))/(x - y)."""
    theta = mpf(theta)
    x = mp.expj(theta)
    y = mp.expj(-theta)
    if x == y:
        raise QSeriesError("the Nevanlinna quotient is singular at sin(theta) = 0")
    Bx, Dx = qhermite_bd(x, q, tol)
    By, Dy = qhermite_bd(y, q, tol)
    return _nevanlinna_sample(theta, x, y, Bx, Dx, By, Dy)


def _qh_truncation(qq: mpf, tol: mpf, inv_euler: mpf) -> tuple[int, mpf]:
    # the integrand never exceeds (-q;q)_M^4/(q;q)_inf at theta = pi/2
    M = 0
    peak = mpf(1)
    while True:
        M += 1
        peak *= (1 + qq**M) ** 4
        log_tail = _qh_tail_log(qq, M)
        if log_tail is not None:
            tail = peak * inv_euler * mp.expm1(log_tail) * mp.exp(log_tail)
            if tail <= tol / 4:
                return M, log_tail
        if M > settings.max_terms:
            raise ConvergenceError("q-Hermite truncation not found")


def _qh_polynomial(qq: mpf, M: int) -> list[mpf]:
    """Coefficients of prod_{n=1}^M [(1+q^n)^4 - 16 q^{2n} c] in powers of c."""
    coeffs = [mpf(1)]
    for n in range(1, M + 1):
        alpha = (1 + qq**n) ** 4
        beta = 16 * qq ** (2 * n)
        grown = [mpf(0)] * (len(coeffs) + 1)
        for k, value in enumerate(coeffs):
            grown[k] += alpha * value
            grown[k + 1] -= beta * value
        coeffs = grown
    return coeffs


def _cos_moment(k: int) -> mpf:
    """(1/2pi) int cos^{2k} = binom(2k, k)/4^k."""
    return mp.binomial(2 * k, k) / mpf(4) ** k


def _qh_expansion_value(qq: mpf, M: int) -> tuple[mpf, mpf]:
    terms = [coeff * _cos_moment(k) for k, coeff in enumerate(_qh_polynomial(qq, M))]
    return mp.fsum(terms), mp.fsum(abs(t) for t in terms)


def _qh_subset_sum_value(qq: mpf, M: int) -> tuple[mpf, mpf]:
    """prod_{n<=M} (1+q^n)^4 sum_k (-4)^k binom(2k,k) e_k(q^{2n}/(1+q^n)^4)."""
    leading = mpf(1)
    elementary = [mpf(1)]
    for n in range(1, M + 1):
        base = (1 + qq**n) ** 4
        leading *= base
        g = qq ** (2 * n) / base
        elementary = [
            (elementary[k] if k < len(elementary) else 0) + (g * elementary[k - 1] if k > 0 else 0)
            for k in range(len(elementary) + 1)
        ]
    terms = [(-4) ** k * mp.binomial(2 * k, k) * e for k, e in enumerate(elementary)]
    value = leading * mp.fsum(terms)
    return value, leading * mp.fsum(abs(t) for t in terms)


def _qh_route(q, tol, evaluate, route: str) -> RhoValue:
    q = QParam.of(q)
    qq = q.q
    tol = check_tolerance(tol)
    euler_value = euler(q, tol / 16)
    M, log_tail = _qh_truncation(qq, tol, _inverse_upper(euler_value))
    value, magnitude = evaluate(qq, M)
    truncated = SeriesValue(
        value=value,
        err=value * mp.expm1(log_tail) + rounding(4 * (M + 1) ** 2, magnitude),
    )
    logger.debug("q-Hermite %s route truncated after %d factors", route, M)
    return _rho(quotient_of(truncated, euler_value), route, "q-inverse-hermite")


def rho0_qhermite_subset_sum(q, tol=None) -> RhoValue:
    """
    rho_0 through the elementary symmetric form of the cos^2 expansion, with
    the same truncation as the polynomial route.
    """
    return _qh_route(q, tol, _qh_subset_sum_value, "subset-sum")


def rho0_qhermite(q, tol=None) -> tuple[RhoValue, RhoValue]:
    """
    rho_0 for the q^{-1}-Hermite problem by two routes: (a) the truncated
    product expanded as a polynomial in cos^2(theta) and integrated termwise,
    (b) trapezoid quadrature of qh_kernel. Disagreement is logged.

    :param q: The base.
    :type q: QParam
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: (expansion route, quadrature route).
    :rtype: tuple[RhoValue, RhoValue]
    """
    q = QParam.of(q)
    tol = check_tolerance(tol)
    expansion = _qh_route(q, tol, _qh_expansion_value, "cos2-expansion")

    def sample(theta):
        point = qh_kernel(theta, q, tol / 4)
        return SeriesValue(value=point.value, err=point.err)

    quadrature = _rho(periodic_trapezoid(sample, tol / 2, symmetric=True), "kernel-quadrature", "q-inverse-hermite")
    compare_routes(expansion, quadrature)
    return expansion, quadrature
