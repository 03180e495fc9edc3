"""
Property suites run by ``hankel-indet verify``: dual-route agreement,
q-series identities, eigenvalue duality and the lower-bound inequalities.
"""
import logging
from typing import Callable, Iterable, Optional

from mpmath import mp, mpc, mpf

from src.schemas import ASCParam, Precision, QParam, SuiteResult
from src.services.errors import ConfigError
from src.services.moments import hankel, shifted, stieltjes_wigert
from src.services.qseries import (
    check_tolerance,
    euler,
    identity_check_36,
    qbinomial,
    qpochhammer,
    triple_product,
)
from src.services.rho import (
    asc_In,
    asc_In_quadrature,
    compare_routes,
    freud_constants,
    freud_kernel,
    freud_kernel_nevanlinna,
    lower_bound,
    qh_kernel,
    rho0_asc,
    rho0_asc_quadrature,
    rho0_freud,
    rho0_freud_quadrature,
    rho0_qhermite,
    rho0_qhermite_subset_sum,
    rho0_sw_direct,
    rho0_sw_fast,
)
from src.services.spectra import (
    beta_from_hankel,
    hamburger_mu,
    kernel_matrix,
    largest_eig,
    point_bound,
    smallest_eig,
    sw_beta,
    trace_bound,
)
from src.services.sweep import lambda_sequence

logger = logging.getLogger(__name__)

DUAL_ROUTE_GAP = mpf("1e-12")


class Checks:
    def __init__(self):
        self.count = 0
        self.failures: list[str] = []

    def expect(self, ok: bool, message: str) -> None:
        self.count += 1
        if not ok:
            self.failures.append(message)


def _qpochhammer(q: QParam, tol, checks: Checks) -> None:
    qq = q.q
    for a in (mpf("0.7"), mpc("0.3", "0.4")):
        for n in range(16):
            step = qpochhammer(a, qq, n).value * (1 - a * qq**n)
            checks.expect(qpochhammer(a, qq, n + 1).value == step, f"(a;q)_{n + 1} step identity, a={a}")
    value = euler(q, tol)
    oracle = mp.qp(qq, qq)
    checks.expect(abs(value.value - oracle) <= value.err + mpf(2) ** (8 - mp.prec), "Euler function oracle")


def _qbinomial(q: QParam, tol, checks: Checks) -> None:
    qq = q.q
    slack = mpf(2) ** (16 - mp.prec)
    for n in range(13):
        for k in range(n + 1):
            value = qbinomial(n, k, qq)
            checks.expect(value == qbinomial(n, n - k, qq), f"symmetry [{n} {k}]")
            if 0 < k < n:
                pascal = qbinomial(n - 1, k - 1, qq) + qq**k * qbinomial(n - 1, k, qq)
                checks.expect(abs(value - pascal) <= slack * value, f"Pascal recurrence [{n} {k}]")


def _triple_product(q: QParam, tol, checks: Checks) -> None:
    for j in range(16):
        z = mp.expj(2 * mp.pi * (j + mpf(1) / 2) / 16)
        product = triple_product(z, q, tol, mode="product")
        series = triple_product(z, q, tol, mode="sum")
        checks.expect(
            abs(product.value - series.value) <= product.err + series.err,
            f"triple product forms at node {j}",
        )


def _identity_36(q: QParam, tol, checks: Checks) -> None:
    for k in range(9):
        for omega in (mpf("0.25"), q.q, mpf("0.9")):
            lhs, rhs = identity_check_36(k, q, omega, tol)
            checks.expect(abs(lhs.value - rhs.value) <= lhs.err + rhs.err, f"omega identity k={k} omega={omega}")


def _sw_rho(q: QParam, tol, checks: Checks) -> None:
    comparison = compare_routes(rho0_sw_direct(q, tol), rho0_sw_fast(q, tol))
    checks.expect(comparison.agree, f"Stieltjes-Wigert rho_0 routes differ by {mp.nstr(comparison.diff, 5)}")


def _duality(q: QParam, tol, checks: Checks) -> None:
    src = stieltjes_wigert(q)
    for N in range(1, 25):
        with Precision(bits=src.working_precision(N)).context():
            H = hankel(src, N)
            smallest = smallest_eig(H, tol)
            largest = largest_eig(kernel_matrix(beta_from_hankel(H)), tol)
            product = smallest.midpoint * largest.midpoint
        checks.expect(abs(product - 1) <= mpf("1e-10"), f"lambda_N * max eig K_N = 1 at N={N}")


def _trace_bound(q: QParam, tol, checks: Checks) -> None:
    src = stieltjes_wigert(q)
    for N in (0, 4, 8):
        with Precision(bits=src.working_precision(N)).context():
            H = hankel(src, N)
            enclosure = smallest_eig(H, tol)
            trace = trace_bound(kernel_matrix(beta_from_hankel(H)))
            slack = mpf(2) ** (-mp.prec // 2)
        checks.expect(1 / enclosure.hi <= trace * (1 + slack), f"1/lambda_N <= trace K_N at N={N}")


def _hamburger(q: QParam, tol, checks: Checks) -> None:
    src = stieltjes_wigert(q)
    seq = lambda_sequence(src, 17, tol)
    for N in range(17):
        with Precision(bits=src.working_precision(N + 1)).context():
            mu = hamburger_mu(hankel(src, N))
            mu_shifted = hamburger_mu(hankel(shifted(src), N))
        checks.expect(mu >= seq.entries[N].enclosure.lo, f"mu_N >= lambda_N at N={N}")
        checks.expect(mu_shifted >= seq.entries[N + 1].enclosure.lo, f"mu'_N >= lambda_(N+1) at N={N}")


def _beta(q: QParam, tol, checks: Checks) -> None:
    src = stieltjes_wigert(q)
    N = 12
    limit = max(mpf("1e-25"), mpf(2) ** (-mp.prec // 3))
    with Precision(bits=src.working_precision(N)).context():
        B = beta_from_hankel(hankel(src, N))
        gap = max(abs(sw_beta(n, k, q) - B.beta(n, k)) for n in range(N + 1) for k in range(n + 1))
    checks.expect(gap <= limit, f"closed-form coefficients differ by {mp.nstr(gap, 5)}")


def _point_bound(q: QParam, tol, checks: Checks) -> None:
    src = stieltjes_wigert(q)
    N = 24
    with Precision(bits=src.working_precision(N)).context():
        H = hankel(src, N)
        gamma = smallest_eig(H, tol).lo
        B = beta_from_hankel(H)
        for z in (mpc(0, "0.5"), mpc("0.25", "0.25")):
            left, right = point_bound(B, z, gamma)
            checks.expect(left <= right, f"point bound at z={z}")


def _theorem_bound(q: QParam, tol, checks: Checks) -> None:
    bound = lower_bound(rho0_sw_fast(q, tol))
    for entry in lambda_sequence(stieltjes_wigert(q), 32, tol).entries:
        checks.expect(entry.enclosure.lo >= bound, f"lambda_{entry.N} >= 1/rho_0")


def _asc(q: QParam, tol, checks: Checks) -> None:
    for n in range(9):
        folded = asc_In(n, q, tol)
        theta = asc_In(n, q, tol, form="theta")
        quadrature = asc_In_quadrature(n, q, tol)
        checks.expect(abs(folded.value - theta.value) <= folded.err + theta.err, f"I_{n} series forms")
        checks.expect(abs(folded.value - quadrature.value) <= DUAL_ROUTE_GAP, f"I_{n} series against quadrature")
    p = ASCParam(q=q, a=1)
    series = rho0_asc(p, tol)
    quadrature = rho0_asc_quadrature(p, tol)
    checks.expect(abs(series.value - quadrature.value) <= mpf("1e-10") * series.value, "Al-Salam-Carlitz rho_0 routes")


def _freud(q: QParam, tol, checks: Checks) -> None:
    K0 = freud_constants().K0
    oracle = mp.gamma(mpf(1) / 4) ** 2 / (4 * mp.sqrt(mp.pi))
    checks.expect(abs(K0 - oracle) <= mpf("1e-20"), "K0 against Gamma(1/4)^2/(4 sqrt(pi))")
    series = rho0_freud(tol)
    quadrature = rho0_freud_quadrature(tol)
    checks.expect(abs(series.value - quadrature.value) <= DUAL_ROUTE_GAP, "Freud rho_0 routes")
    for j in range(8):
        theta = 2 * mp.pi * (j + mpf(1) / 2) / 8
        gap = abs(freud_kernel(theta).value - freud_kernel_nevanlinna(theta, tol).value)
        checks.expect(gap <= DUAL_ROUTE_GAP, f"Freud kernel against Nevanlinna form at node {j}")


def _qhermite(q: QParam, tol, checks: Checks) -> None:
    expansion, quadrature = rho0_qhermite(q, tol)
    checks.expect(abs(expansion.value - quadrature.value) <= DUAL_ROUTE_GAP, "q-Hermite rho_0 routes")
    subset = rho0_qhermite_subset_sum(q, tol)
    checks.expect(abs(subset.value - expansion.value) <= subset.err + expansion.err, "q-Hermite subset-sum form")
    qq = q.q
    spot = qh_kernel(mp.pi / 2, q, tol)
    peak = qpochhammer(-qq, qq, None, tol).value ** 4 / euler(q, tol).value
    checks.expect(abs(spot.value - peak) <= mpf("1e-20") * peak, "q-Hermite kernel at pi/2")
    checks.expect(expansion.value <= peak, "leading term bounds rho_0 from above")


SUITES: dict[str, Callable] = {
    "qpochhammer": _qpochhammer,
    "qbinomial": _qbinomial,
    "triple-product": _triple_product,
    "identity-36": _identity_36,
    "sw-rho": _sw_rho,
    "duality": _duality,
    "trace-bound": _trace_bound,
    "hamburger": _hamburger,
    "beta": _beta,
    "point-bound": _point_bound,
    "theorem-bound": _theorem_bound,
    "asc": _asc,
    "freud": _freud,
    "qhermite": _qhermite,
}


def run_suites(names: Optional[Iterable[str]] = None, q=None, tol=None) -> list[SuiteResult]:
    """
    Runs the named property suites (all of them by default).

    :param names: Suite names.
    :type names: Iterable[str] | None
    :param q: The base used by q-dependent suites, default 0.5.
    :type q: QParam | None
    :param tol: Absolute tolerance.
    :type tol: mpf | None
    :return: One result per suite, in the order requested.
    :rtype: list[SuiteResult]
    """
    tol = check_tolerance(tol)
    q = QParam.of(q if q is not None else "0.5")
    selected = list(names) if names else list(SUITES)
    unknown = [name for name in selected if name not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    results = []
    for name in selected:
        checks = Checks()
        SUITES[name](q, tol, checks)
        passed = not checks.failures
        if not passed:
            logger.warning("suite %s failed: %s", name, "; ".join(checks.failures))
        results.append(SuiteResult(suite=name, passed=passed, checks=checks.count, detail="; ".join(checks.failures)))
    return results
