import unittest

import pytest
from mpmath import mp, mpf

from src.services.errors import ConfigError, PrecisionExhausted
from src.services.verify import *


class TestVerify(unittest.TestCase):

    def setUp(self):
        self.prec = mp.prec
        mp.prec = 256

    def tearDown(self):
        mp.prec = self.prec

    def test_checks_collects_failures(self):
        checks = Checks()
        checks.expect(True, "fine")
        checks.expect(False, "broken")
        self.assertEqual(checks.count, 2)
        self.assertEqual(checks.failures, ["broken"])

    def test_cheap_suites_pass(self):
        outcome = run_suites(["qbinomial", "triple-product", "sw-rho"], tol=mpf("1e-30"))
        self.assertEqual([result.suite for result in outcome], ["qbinomial", "triple-product", "sw-rho"])
        for result in outcome:
            self.assertTrue(result.passed, result.detail)
            self.assertGreater(result.checks, 0)

    @pytest.mark.slow
    def test_other_base(self):
        outcome = run_suites(["theorem-bound"], q="0.3", tol=mpf("1e-20"))
        self.assertTrue(outcome[0].passed, outcome[0].detail)
        self.assertEqual(outcome[0].checks, 33)

    def test_q_series_identities_across_bases(self):
        for q in ("0.3", "0.5", "0.7"):
            outcome = run_suites(["triple-product", "identity-36"], q=q, tol=mpf("1e-25"))
            for result in outcome:
                self.assertTrue(result.passed, f"q={q}: {result.detail}")
            self.assertEqual([result.checks for result in outcome], [16, 27])

    @pytest.mark.slow
    def test_duality_across_bases(self):
        for q in ("0.3", "0.5", "0.7"):
            outcome = run_suites(["duality"], q=q, tol=mpf("1e-25"))
            self.assertTrue(outcome[0].passed, f"q={q}: {outcome[0].detail}")
            self.assertEqual(outcome[0].checks, 24)

    @pytest.mark.slow
    def test_lower_bound_across_bases(self):
        for step in range(1, 10):
            q = f"0.{step}"
            outcome = run_suites(["theorem-bound"], q=q, tol=mpf("1e-20"))
            self.assertTrue(outcome[0].passed, f"q={q}: {outcome[0].detail}")

    @pytest.mark.slow
    def test_matrix_suites(self):
        outcome = run_suites(["hamburger", "beta", "point-bound", "asc"], tol=mpf("1e-20"))
        for result in outcome:
            self.assertTrue(result.passed, f"{result.suite}: {result.detail}")
        self.assertEqual([result.checks for result in outcome], [34, 1, 2, 19])

    def test_unknown_suite(self):
        with self.assertRaises(ConfigError):
            run_suites(["qbinomial", "nope"])

    def test_tolerance_below_precision(self):
        with mp.workprec(64):
            with self.assertRaises(PrecisionExhausted):
                run_suites(["qbinomial"], tol=mpf("1e-40"))

    def test_every_suite_is_registered(self):
        self.assertEqual(len(SUITES), 14)
        self.assertIn("duality", SUITES)


if __name__ == "__main__":
    unittest.main()
