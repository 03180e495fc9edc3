"""
Certified extremal eigenvalues of Hankel and kernel matrices by bisection on
Cholesky definiteness, orthonormal polynomial coefficients and the Hamburger
minima.
"""
import logging
from typing import Optional

from mpmath import mp, mpf

from src.conf.config import settings
from src.schemas import (
    CoeffTriangle,
    EigenEnclosure,
    HankelMatrix,
    JacobiCoefficients,
    KernelMatrix,
    QParam,
    SpectralReport,
    SymmetricMatrix,
)
from src.services.errors import NotPositiveDefinite, PrecisionExhausted
from src.services.moments import MomentSource, hankel, shifted
from src.services.qseries import check_tolerance, qbinomial, qpochhammer

logger = logging.getLogger(__name__)


def _factor(rows: list[list[mpf]], shift, negate: bool = False):
    """
    Attempts L L^T = A - shift*I (or shift*I - A when ``negate``).

    Returns (status, pivot, L) where status is True on success, False when a
    pivot is clearly negative and None when a pivot is within rounding noise
    of zero.
    """
    n = len(rows)
    eps = mpf(2) ** (1 - mp.prec)
    L = [[mpf(0)] * (i + 1) for i in range(n)]
    for i in range(n):
        diag = shift - rows[i][i] if negate else rows[i][i] - shift
        squares = mp.fdot(L[i][:i], L[i][:i])
        pivot = diag - squares
        noise = (i + 4) * eps * (abs(rows[i][i]) + abs(shift) + squares)
        if pivot < -noise:
            return False, i, L
        if pivot <= noise:
            return None, i, L
        L[i][i] = mp.sqrt(pivot)
        for j in range(i + 1, n):
            entry = -rows[j][i] if negate else rows[j][i]
            L[j][i] = (entry - mp.fdot(L[j][:i], L[i][:i])) / L[i][i]
    return True, None, L


def cholesky(A: SymmetricMatrix, shift=0) -> list[list[mpf]]:
    """
    Cholesky factor of A - shift*I with positive diagonal.

    :param A: The symmetric matrix.
    :type A: SymmetricMatrix
    :param shift: Diagonal shift.
    :type shift: mpf
    :return: Rows of the lower triangular factor L.
    :rtype: list[list[mpf]]
    """
    status, pivot, L = _factor(A.entries, mpf(shift))
    if status is False:
        raise NotPositiveDefinite(f"matrix is not positive definite (pivot {pivot})", pivot=pivot)
    if status is None:
        raise PrecisionExhausted(
            f"positive definiteness is lost in rounding at pivot {pivot} with {mp.prec} bits",
            required_bits=2 * mp.prec,
        )
    return L


def probe(A: SymmetricMatrix, sigma, negate: bool = False) -> tuple[bool, int]:
    """
    Decides whether A - sigma*I (or sigma*I - A) is positive definite,
    retrying an indeterminate answer at doubled precision.

    :param A: The symmetric matrix.
    :type A: SymmetricMatrix
    :param sigma: The shift.
    :type sigma: mpf
    :param negate: Test sigma*I - A instead.
    :type negate: bool
    :return: The decision and the number of factorizations performed.
    :rtype: tuple[bool, int]
    """
    bits = mp.prec
    for attempt in range(settings.probe_doublings + 1):
        if bits > settings.max_prec_bits:
            break
        with mp.workprec(bits):
            status, pivot, _ = _factor(A.entries, sigma, negate)
        if status is not None:
            return status, attempt + 1
        logger.debug("indeterminate probe at pivot %d with %d bits, doubling", pivot, bits)
        bits *= 2
    raise PrecisionExhausted(
        f"definiteness test at shift {mp.nstr(sigma, 10)} stays within rounding noise up to {bits // 2} bits",
        required_bits=bits,
    )


def smallest_eig(H: SymmetricMatrix, tol=None, upper: Optional[mpf] = None) -> EigenEnclosure:
    """
    Encloses the smallest eigenvalue by bisection on the shift: the
    Cholesky factorization of H - sigma*I succeeds iff sigma < lambda_min.

    :param H: A positive definite matrix.
    :type H: SymmetricMatrix
    :param tol: Requested enclosure width.
    :type tol: mpf
    :param upper: Optional known upper bound for lambda_min, e.g. lambda of a
        principal submatrix.
    :type upper: mpf | None
    :return: The enclosure.
    :rtype: EigenEnclosure
    """
    tol = check_tolerance(tol)
    if H.order == 1:
        value = H.entry(0, 0)
        if value <= 0:
            raise NotPositiveDefinite("1x1 matrix is not positive definite", pivot=0)
        return EigenEnclosure(lo=value, hi=value, probes=0, prec_bits=mp.prec)

    definite, probes = probe(H, mpf(0))
    if not definite:
        status, pivot, _ = _factor(H.entries, mpf(0))
        raise NotPositiveDefinite(f"Hankel matrix is not positive definite (pivot {pivot})", pivot=pivot)
    lo = mpf(0)
    hi = min(H.diagonal())
    if upper is not None and upper < hi:
        hi = mpf(upper)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        definite, count = probe(H, mid)
        probes += count
        if definite:
            lo = mid
        else:
            hi = mid
    logger.debug("smallest eigenvalue of order %d enclosed after %d probes", H.order, probes)
    return EigenEnclosure(lo=lo, hi=hi, probes=probes, prec_bits=mp.prec)


def largest_eig(K: SymmetricMatrix, tol=None) -> EigenEnclosure:
    """
    Encloses the largest eigenvalue of a positive definite matrix by bisection
    on the definiteness of sigma*I - K, starting from [max diagonal, trace].

    :param K: A positive definite matrix.
    :type K: SymmetricMatrix
    :param tol: Requested enclosure width.
    :type tol: mpf
    :return: The enclosure.
    :rtype: EigenEnclosure
    """
    tol = check_tolerance(tol)
    diagonal = K.diagonal()
    if K.order == 1:
        return EigenEnclosure(lo=diagonal[0], hi=diagonal[0], probes=0, prec_bits=mp.prec)
    lo = max(diagonal)
    hi = mp.fsum(diagonal)
    probes = 0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        definite, count = probe(K, mid, negate=True)
        probes += count
        if definite:
            hi = mid
        else:
            lo = mid
    return EigenEnclosure(lo=lo, hi=hi, probes=probes, prec_bits=mp.prec)


def beta_from_hankel(H: HankelMatrix) -> CoeffTriangle:
    """
    Coefficients beta_{k,j} of the orthonormal polynomials: B = L^{-1} for
    the Cholesky factor H = L L^T, so that B H B^T = I.

    :param H: The Hankel matrix.
    :type H: HankelMatrix
    :return: The coefficient triangle.
    :rtype: CoeffTriangle
    """
    L = cholesky(H)
    n = len(L)
    B = []
    for k in range(n):
        row = [mpf(0)] * (k + 1)
        row[k] = 1 / L[k][k]
        for j in range(k - 1, -1, -1):
            acc = mp.fdot([L[k][m] for m in range(j, k)], [B[m][j] for m in range(j, k)])
            row[j] = -acc / L[k][k]
        B.append(row)
    return CoeffTriangle(rows=B)


def sw_beta(n: int, k: int, q) -> mpf:
    """
    Closed form of beta_{n,k} for the Stieltjes-Wigert polynomials:
    (-1)^(n+k) q^(n/2+1/4) (q;q)_n^(-1/2) [n k]_q q^(k^2+k/2).

    :param n: Degree.
    :type n: int
    :param k: Power of x, 0 <= k <= n.
    :type k: int
    :param q: The base.
    :type q: QParam
    :return: The coefficient.
    :rtype: mpf
    """
    qq = QParam.of(q).q
    sign = -1 if (n + k) % 2 else 1
    norm = qq ** (mpf(n) / 2 + mpf(1) / 4) / mp.sqrt(qpochhammer(qq, qq, n).value)
    return sign * norm * qbinomial(n, k, qq) * qq ** (k * k + mpf(k) / 2)


def kernel_matrix(B: CoeffTriangle) -> KernelMatrix:
    """K(j, k) = sum over m <= min(j, k) of beta(j, m) beta(k, m)."""
    n = B.N + 1
    entries = [[mpf(0)] * n for _ in range(n)]
    for j in range(n):
        for k in range(j + 1):
            value = mp.fdot(B.rows[j][: k + 1], B.rows[k][: k + 1])
            entries[j][k] = value
            entries[k][j] = value
    return KernelMatrix(entries=entries)


def trace_bound(K: KernelMatrix) -> mpf:
    return mp.fsum(K.diagonal())


def hamburger_mu(H: HankelMatrix) -> mpf:
    """
    mu_N = 1/(H^{-1})_{00}, the minimum of the Hankel form on v_0 = 1,
    by solving H w = e_0 through the Cholesky factor.

    :param H: The Hankel matrix.
    :type H: HankelMatrix
    :return: mu_N.
    :rtype: mpf
    """
    L = cholesky(H)
    n = len(L)
    y = [mpf(0)] * n
    for i in range(n):
        rhs = 1 if i == 0 else 0
        y[i] = (rhs - mp.fdot(L[i][:i], y[:i])) / L[i][i]
    w = [mpf(0)] * n
    for i in range(n - 1, -1, -1):
        acc = mp.fdot([L[m][i] for m in range(i + 1, n)], w[i + 1 :])
        w[i] = (y[i] - acc) / L[i][i]
    return 1 / w[0]


def hamburger_mu_shifted(src: MomentSource, N: int) -> mpf:
    """mu'_N for the shifted moments s'_n = s_{n+2}."""
    return hamburger_mu(hankel(shifted(src), N))


def pk_eval(B: CoeffTriangle, z, upto: Optional[int] = None) -> list:
    """
    Values p_k(z) for k = 0..upto by Horner's rule on each row.

    :param B: The coefficient triangle.
    :type B: CoeffTriangle
    :param z: The point.
    :type z: mpc | mpf
    :param upto: Highest degree; defaults to B.N.
    :type upto: int | None
    :return: [p_0(z), ..., p_upto(z)].
    :rtype: list
    """
    upto = B.N if upto is None else upto
    if upto > B.N:
        raise ValueError(f"triangle only reaches degree {B.N}")
    values = []
    for k in range(upto + 1):
        acc = 0
        for coeff in reversed(B.rows[k]):
            acc = acc * z + coeff
        values.append(acc)
    return values


def point_bound(B: CoeffTriangle, z, gamma) -> tuple[mpf, mpf]:
    """
    Both sides of sum_k |p_k(z)|^2 <= 1/(gamma (1 - |z|^2)) for |z| < 1,
    where gamma is a lower bound of the Hankel form.

    :return: (left side, right side).
    :rtype: tuple[mpf, mpf]
    """
    if abs(z) >= 1:
        raise ValueError("point bound needs |z| < 1")
    left = mp.fsum(abs(value) ** 2 for value in pk_eval(B, z))
    return left, 1 / (gamma * (1 - abs(z) ** 2))


def jacobi_from_beta(B: CoeffTriangle) -> JacobiCoefficients:
    """
    Recurrence coefficients x p_n = a_{n+1} p_{n+1} + b_n p_n + a_n p_{n-1}
    read off the leading coefficients of consecutive rows.

    :param B: The coefficient triangle.
    :type B: CoeffTriangle
    :return: b_0..b_{N-1}, a_1..a_N and s_0 = 1/beta_{00}^2.
    :rtype: JacobiCoefficients
    """
    diagonal = []
    off_diagonal = []
    for n in range(B.N):
        a_next = B.beta(n, n) / B.beta(n + 1, n + 1)
        below = B.beta(n, n - 1) if n > 0 else mpf(0)
        diagonal.append((below - a_next * B.beta(n + 1, n)) / B.beta(n, n))
        off_diagonal.append(a_next)
    return JacobiCoefficients(diagonal=diagonal, off_diagonal=off_diagonal, s0=1 / B.beta(0, 0) ** 2)


def spectral_report(src: MomentSource, N: int, tol=None) -> SpectralReport:
    """
    lambda_N, mu_N, mu'_N and the trace bound for one order, each at the
    precision the source requires for it.

    :param src: The moment source.
    :type src: MomentSource
    :param N: Matrix order minus one.
    :type N: int
    :param tol: Enclosure width.
    :type tol: mpf | None
    :return: The report.
    :rtype: SpectralReport
    """
    with mp.workprec(src.working_precision(N)):
        H = hankel(src, N)
        enclosure = smallest_eig(H, tol)
        mu = hamburger_mu(H)
        trace = trace_bound(kernel_matrix(beta_from_hankel(H)))
    with mp.workprec(src.working_precision(N + 1)):
        mu_shifted = hamburger_mu_shifted(src, N)
    return SpectralReport(lambda_=enclosure, mu=mu, mu_shifted=mu_shifted, trace_bound=trace)
