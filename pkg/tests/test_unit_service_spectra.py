import unittest

from mpmath import mp, mpf

from src.schemas import HankelMatrix, SymmetricMatrix
from src.services.errors import NotPositiveDefinite, PrecisionExhausted
from src.services.moments import hankel, jacobi_source, stieltjes_wigert
from src.services.spectra import *


class TestSpectra(unittest.TestCase):

    def setUp(self):
        self.prec = mp.prec
        mp.prec = 256
        self.tol = mpf("1e-30")
        self.src = stieltjes_wigert("0.5")
        self.A = SymmetricMatrix(entries=[[2, 1], [1, 3]])

    def tearDown(self):
        mp.prec = self.prec

    def test_cholesky(self):
        L = cholesky(SymmetricMatrix(entries=[[4, 2], [2, 3]]))
        self.assertEqual(L[0][0], 2)
        self.assertEqual(L[1][0], 1)
        self.assertEqual(L[1][1], mp.sqrt(2))

    def test_cholesky_not_positive_definite(self):
        with self.assertRaises(NotPositiveDefinite) as ctx:
            cholesky(SymmetricMatrix(entries=[[1, 2], [2, 1]]))
        self.assertEqual(ctx.exception.pivot, 1)
        self.assertEqual(ctx.exception.exit_code, 4)

    def test_smallest_and_largest_eig(self):
        smallest = smallest_eig(self.A, self.tol)
        largest = largest_eig(self.A, self.tol)
        self.assertLessEqual(smallest.lo, (5 - mp.sqrt(5)) / 2)
        self.assertGreaterEqual(smallest.hi, (5 - mp.sqrt(5)) / 2)
        self.assertLessEqual(smallest.width, self.tol)
        self.assertLessEqual(largest.lo, (5 + mp.sqrt(5)) / 2)
        self.assertGreaterEqual(largest.hi, (5 + mp.sqrt(5)) / 2)
        self.assertGreater(smallest.probes, 0)

    def test_smallest_eig_one_by_one(self):
        enclosure = smallest_eig(SymmetricMatrix(entries=[[mpf("0.75")]]), self.tol)
        self.assertEqual(enclosure.lo, mpf("0.75"))
        self.assertEqual(enclosure.hi, mpf("0.75"))
        self.assertEqual(enclosure.probes, 0)

    def test_smallest_eig_upper_hint(self):
        enclosure = smallest_eig(self.A, self.tol, upper=mpf("1.5"))
        self.assertLess(abs(enclosure.midpoint - (5 - mp.sqrt(5)) / 2), self.tol)

    def test_smallest_eig_errors(self):
        with self.assertRaises(NotPositiveDefinite):
            smallest_eig(SymmetricMatrix(entries=[[1, 2], [2, 1]]), self.tol)
        with self.assertRaises(PrecisionExhausted):
            smallest_eig(SymmetricMatrix(entries=[[1, 1], [1, 1]]), self.tol)

    def test_sw_lambda_1(self):
        with mp.workprec(self.src.working_precision(1)):
            enclosure = smallest_eig(hankel(self.src, 1), self.tol)
            expected = (mp.sqrt(578) - mp.sqrt(514)) / 2
        self.assertLessEqual(enclosure.lo, expected + mpf("1e-60"))
        self.assertGreaterEqual(enclosure.hi, expected - mpf("1e-60"))
        self.assertAlmostEqual(float(enclosure.midpoint), 0.6850313, places=6)

    def test_duality(self):
        with mp.workprec(self.src.working_precision(4)):
            H = hankel(self.src, 4)
            smallest = smallest_eig(H, self.tol)
            largest = largest_eig(kernel_matrix(beta_from_hankel(H)), self.tol)
            self.assertLess(abs(smallest.midpoint * largest.midpoint - 1), mpf("1e-25"))

    def test_beta_orthonormal(self):
        with mp.workprec(self.src.working_precision(5)):
            H = hankel(self.src, 5)
            B = beta_from_hankel(H)
            for j in range(6):
                for k in range(6):
                    gram = mp.fsum(
                        B.beta(j, m) * H.entry(m, n) * B.beta(k, n)
                        for m in range(j + 1)
                        for n in range(k + 1)
                    )
                    self.assertLess(abs(gram - (1 if j == k else 0)), mpf("1e-30"))

    def test_sw_beta_closed_form(self):
        with mp.workprec(self.src.working_precision(6)):
            B = beta_from_hankel(hankel(self.src, 6))
            for n in range(7):
                for k in range(n + 1):
                    self.assertLess(abs(sw_beta(n, k, "0.5") - B.beta(n, k)), mpf("1e-30"))

    def test_hamburger_mu(self):
        with mp.workprec(self.src.working_precision(1)):
            self.assertLess(abs(hamburger_mu(hankel(self.src, 0)) - self.src.moment(0)), mpf("1e-60"))
            self.assertLess(abs(hamburger_mu(hankel(self.src, 1)) - 1 / mp.sqrt(2)), mpf("1e-60"))

    def test_trace_bound_and_rho(self):
        with mp.workprec(self.src.working_precision(8)):
            H = hankel(self.src, 8)
            trace = trace_bound(kernel_matrix(beta_from_hankel(H)))
            self.assertGreaterEqual(trace, 1 / smallest_eig(H, self.tol).lo)
        self.assertLess(trace, mpf("2.911"))
        self.assertGreater(trace, mpf("2.85"))

    def test_pk_eval_and_point_bound(self):
        with mp.workprec(self.src.working_precision(6)):
            H = hankel(self.src, 6)
            B = beta_from_hankel(H)
            values = pk_eval(B, mpf(0))
            self.assertEqual(values[0], B.beta(0, 0))
            self.assertEqual(values[3], B.beta(3, 0))
            gamma = smallest_eig(H, self.tol).lo
            left, right = point_bound(B, mp.mpc("0.2", "0.3"), gamma)
            self.assertLessEqual(left, right)
        with self.assertRaises(ValueError):
            point_bound(B, mpf(1), gamma)
        with self.assertRaises(ValueError):
            pk_eval(B, mpf(0), upto=7)

    def test_jacobi_from_beta_chebyshev(self):
        src = jacobi_source([0] * 5, [mpf(1) / 2] * 5)
        H = HankelMatrix.from_moments([src.moment(n) for n in range(9)], 4)
        coeffs = jacobi_from_beta(beta_from_hankel(H))
        self.assertEqual(coeffs.s0, 1)
        for b in coeffs.diagonal:
            self.assertLess(abs(b), mpf("1e-60"))
        for a in coeffs.off_diagonal:
            self.assertLess(abs(a - mpf("0.5")), mpf("1e-60"))

    def test_spectral_report(self):
        report = spectral_report(self.src, 3, self.tol)
        self.assertGreaterEqual(report.mu, report.lambda_.lo)
        self.assertGreaterEqual(report.trace_bound, 1 / report.lambda_.hi)
        with mp.workprec(self.src.working_precision(4)):
            lambda_4 = smallest_eig(hankel(self.src, 4), self.tol)
        self.assertGreaterEqual(report.mu_shifted, lambda_4.lo)


if __name__ == "__main__":
    unittest.main()
