import unittest

from mpmath import mp, mpc, mpf

from src.schemas import QParam
from src.services.errors import PrecisionExhausted, QSeriesError
from src.services.qseries import *


class TestQSeries(unittest.TestCase):

    def setUp(self):
        self.prec = mp.prec
        mp.prec = 256
        self.q = QParam(q="0.5")
        self.tol = mpf("1e-30")

    def tearDown(self):
        mp.prec = self.prec

    def test_check_tolerance_default_and_floor(self):
        self.assertEqual(check_tolerance(), mpf(2) ** (16 - 256))
        self.assertEqual(check_tolerance("1e-30"), mpf("1e-30"))
        with self.assertRaises(PrecisionExhausted) as ctx:
            check_tolerance("1e-80")
        self.assertEqual(ctx.exception.exit_code, 3)
        self.assertGreater(ctx.exception.required_bits, 256)

    def test_check_tolerance_rejects_nonpositive(self):
        with self.assertRaises(QSeriesError):
            check_tolerance(0)

    def test_q_value_rejects_unit_circle(self):
        with self.assertRaises(QSeriesError):
            q_value(mpf("1.2"))
        with self.assertRaises(ValueError):
            q_value(-1)
        self.assertEqual(q_value(self.q), mpf("0.5"))

    def test_qpochhammer_finite(self):
        self.assertEqual(qpochhammer("0.5", self.q, 0).value, 1)
        result = qpochhammer("0.5", self.q, 3)
        self.assertEqual(result.value, mpf("0.328125"))
        self.assertLess(result.err, mpf("1e-70"))

    def test_qpochhammer_negative_n(self):
        with self.assertRaises(QSeriesError):
            qpochhammer("0.5", self.q, -1)

    def test_euler_matches_mpmath(self):
        result = euler(self.q, self.tol)
        self.assertLessEqual(abs(result.value - mp.qp(mpf("0.5"), mpf("0.5"))), result.err + mpf("1e-70"))
        self.assertLessEqual(result.err, self.tol)
        self.assertAlmostEqual(float(result.value), 0.288788095086602, places=14)

    def test_qpochhammer_complex_argument(self):
        a = mpc("0.3", "0.4")
        result = qpochhammer(a, self.q, None, self.tol)
        self.assertLessEqual(abs(result.value - mp.qp(a, mpf("0.5"))), result.err + mpf("1e-70"))

    def test_qpochhammer_vanishing_factor(self):
        with self.assertRaises(QSeriesError):
            qpochhammer(4, self.q, None, self.tol)

    def test_qbinomial(self):
        self.assertEqual(qbinomial(4, 2, self.q), mpf("2.1875"))
        self.assertEqual(qbinomial(7, 0, self.q), 1)
        self.assertEqual(qbinomial(7, 7, self.q), 1)
        self.assertEqual(qbinomial(9, 4, self.q), qbinomial(9, 5, self.q))
        with self.assertRaises(QSeriesError):
            qbinomial(3, 5, self.q)

    def test_qbinomial_pascal(self):
        q = mpf("0.5")
        for n in range(2, 10):
            for k in range(1, n):
                pascal = qbinomial(n - 1, k - 1, q) + q**k * qbinomial(n - 1, k, q)
                self.assertLess(abs(qbinomial(n, k, q) - pascal), mpf("1e-60"))

    def test_phi_series_q_binomial_theorem(self):
        a, z = mpf("0.3"), mpf("0.4")
        series = phi_series([a], [], self.q, z, self.tol)
        ratio = quotient_of(qpochhammer(a * z, self.q, None, self.tol), qpochhammer(z, self.q, None, self.tol))
        self.assertLessEqual(abs(series.value - ratio.value), series.err + ratio.err)

    def test_phi_series_terminating_outside_disc(self):
        result = phi_series([mpf(4)], [], self.q, mpf(2), self.tol)
        self.assertEqual(result.value, 21)

    def test_phi_series_errors(self):
        with self.assertRaises(QSeriesError):
            phi_series([mpf("0.3"), mpf("0.2")], [], self.q, mpf("0.4"), self.tol)
        with self.assertRaises(QSeriesError):
            phi_series([mpf("0.3")], [], self.q, mpf("1.5"), self.tol)
        with self.assertRaises(QSeriesError):
            phi_series([mpf("0.3"), mpf("0.2")], [mpf(2)], self.q, mpf("0.4"), self.tol)

    def test_theta_coefficient(self):
        self.assertEqual(theta_coefficient(0, self.q), 2)
        self.assertEqual(theta_coefficient(1, self.q), mpf("-1.5"))
        self.assertEqual(theta_coefficient(2, self.q), mpf("0.625"))

    def test_triple_product_forms_agree(self):
        for theta in (mpf("0.3"), mpf(1), mpf("2.5")):
            z = mp.expj(theta)
            product = triple_product(z, self.q, self.tol)
            series = triple_product(z, self.q, self.tol, mode="sum")
            self.assertLessEqual(abs(product.value - series.value), product.err + series.err)
            self.assertLess(abs(mp.im(product.value)), mpf("1e-60"))

    def test_triple_product_special_points(self):
        with self.assertLogs("src.services.qseries", level="WARNING"):
            result = triple_product(1, self.q, self.tol)
        self.assertEqual(result.value, 0)
        with self.assertRaises(QSeriesError):
            triple_product(0, self.q, self.tol)
        with self.assertRaises(QSeriesError):
            triple_product(mpf("0.5"), self.q, self.tol, mode="series")

    def test_identity_check_36(self):
        for k in (0, 2, 5):
            for omega in (mpf("0.3"), mpf("0.5"), mpf("0.8")):
                lhs, rhs = identity_check_36(k, self.q, omega, self.tol)
                self.assertLessEqual(abs(lhs.value - rhs.value), lhs.err + rhs.err)

    def test_identity_check_36_rejects_omega(self):
        with self.assertRaises(QSeriesError):
            identity_check_36(1, self.q, mpf("1.5"), self.tol)

    def test_phi_transform(self):
        lhs, rhs = phi_transform("0.3", "0.2", "0.5", "0.4", self.q, self.tol)
        self.assertLess(abs(lhs.value - mpf("2.76909")), mpf("1e-5"))
        self.assertLessEqual(abs(lhs.value - rhs.value), lhs.err + rhs.err + mpf("1e-60"))

    def test_phi_transform_with_vanishing_second_term(self):
        # c/b = 1/q
        lhs, rhs = phi_transform("0.3", "0.25", "0.5", "0.4", self.q, self.tol)
        self.assertLessEqual(abs(lhs.value - rhs.value), lhs.err + rhs.err + mpf("1e-60"))

    def test_product_and_quotient_errors(self):
        a = SeriesValue(value=2, err=mpf("0.1"))
        b = SeriesValue(value=4, err=mpf("0.2"))
        product = product_of(a, b)
        self.assertEqual(product.value, 8)
        self.assertGreaterEqual(product.err, mpf("2.1") * mpf("4.2") - 8)
        quotient = quotient_of(a, b)
        self.assertEqual(quotient.value, mpf("0.5"))
        self.assertGreaterEqual(quotient.err, mpf("2.1") / mpf("3.8") - mpf("0.5"))
        with self.assertRaises(PrecisionExhausted):
            quotient_of(a, SeriesValue(value=mpf("0.1"), err=mpf("0.2")))


if __name__ == "__main__":
    unittest.main()
