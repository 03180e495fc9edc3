import tempfile
import unittest
from pathlib import Path

from mpmath import mp, mpf

from src.repository.moment_files import write_moment_file
from src.services.errors import MomentSourceError, PrecisionExhausted
from src.services.moments import *
from src.services.spectra import beta_from_hankel, jacobi_from_beta


class TestMoments(unittest.TestCase):

    def setUp(self):
        self.prec = mp.prec
        mp.prec = 256
        self.src = stieltjes_wigert("0.5")

    def tearDown(self):
        mp.prec = self.prec

    def test_sw_moment(self):
        self.assertLess(abs(sw_moment(0, "0.5") - mp.sqrt(2)), mpf("1e-70"))
        self.assertEqual(sw_moment(1, "0.5"), 4)
        self.assertEqual(sw_moment(3, "0.5"), 256)
        self.assertEqual(self.src.moment(1), 4)

    def test_shifted_source(self):
        shifted_src = shifted(self.src)
        self.assertEqual(shifted_src.shift, 2)
        self.assertEqual(shifted_src.moment(1), sw_moment(3, "0.5"))
        self.assertEqual(self.src.shift, 0)

    def test_negative_index(self):
        with self.assertRaises(MomentSourceError):
            self.src.moment(-1)

    def test_required_precision(self):
        self.assertEqual(self.src.required_precision(16), 273)
        self.assertEqual(self.src.working_precision(4), 256)
        self.assertEqual(self.src.working_precision(16), 273)

    def test_working_precision_cap(self):
        with self.assertRaises(PrecisionExhausted) as ctx:
            stieltjes_wigert("0.05").working_precision(200)
        self.assertGreater(ctx.exception.required_bits, 16384)

    def test_hankel(self):
        H = hankel(self.src, 2)
        self.assertEqual(H.order, 3)
        self.assertEqual(H.entry(0, 2), H.entry(1, 1))
        self.assertEqual(H.entry(1, 2), sw_moment(3, "0.5"))
        self.assertEqual(len(H.moments), 5)

    def test_hankel_precheck(self):
        with self.assertRaises(PrecisionExhausted) as ctx:
            hankel(self.src, 16)
        self.assertEqual(ctx.exception.required_bits, 273)
        with mp.workprec(self.src.working_precision(16)):
            self.assertEqual(hankel(self.src, 16).order, 17)

    def test_jacobi_source_chebyshev(self):
        half = mpf(1) / 2
        src = jacobi_source([0] * 6, [half] * 6)
        expected = [1, 0, mpf(1) / 4, 0, mpf(2) / 16, 0, mpf(5) / 64]
        for n, value in enumerate(expected):
            self.assertEqual(src.moment(n), value)

    def test_jacobi_source_needs_coefficients(self):
        src = jacobi_source([0, 0], [1])
        self.assertEqual(src.moment(3), 0)
        with self.assertRaises(MomentSourceError):
            src.moment(4)

    def test_jacobi_source_rejects_nonpositive(self):
        with self.assertRaises(MomentSourceError):
            jacobi_source([0, 0], [0])
        with self.assertRaises(MomentSourceError):
            jacobi_source([0, 0], [1], s0=-1)

    def test_jacobi_round_trip(self):
        with mp.workprec(self.src.working_precision(6)):
            coeffs = jacobi_from_beta(beta_from_hankel(hankel(self.src, 6)))
            rebuilt = jacobi_source(coeffs.diagonal, coeffs.off_diagonal, coeffs.s0)
            for n in range(2 * 6):
                original = self.src.moment(n)
                self.assertLess(abs(rebuilt.moment(n) - original), mpf("1e-30") * original)

    def test_file_source(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_moment_file([self.src.moment(n) for n in range(5)], Path(tmp) / "m.txt", 256)
            src = moments_from_file(path)
        self.assertEqual(src.kind, "file")
        self.assertEqual(src.precision.bits, 256)
        self.assertEqual(src.moment(4), self.src.moment(4))
        with self.assertRaises(MomentSourceError):
            src.moment(5)
        self.assertEqual(hankel(src, 2).entry(2, 2), self.src.moment(4))


if __name__ == "__main__":
    unittest.main()
