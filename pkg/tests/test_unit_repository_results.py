import json
import tempfile
import unittest
from pathlib import Path

from mpmath import mp, mpf

from src.repository.results import *
from src.schemas import EigenEnclosure, LambdaEntry, LambdaSequence, SweepRow


class TestResults(unittest.TestCase):

    def setUp(self):
        self.prec = mp.prec
        mp.prec = 256
        enclosure = EigenEnclosure(lo=mpf("0.5"), hi=mpf("0.75"), probes=3)
        self.seq = LambdaSequence(entries=[LambdaEntry(N=0, enclosure=enclosure, prec_bits=256)])
        self.rows = [
            SweepRow(
                q=mpf("0.5"),
                N_max=0,
                lambda_last=mpf("0.625"),
                s_extrapolated=mpf("0.625"),
                s_err=mpf(0),
                l_bound=mpf("0.5"),
                pct_error=mpf(20),
                sequence=self.seq,
            ),
            SweepRow(q=mpf("0.9"), N_max=0, error="order 0 needs too many bits"),
        ]

    def tearDown(self):
        mp.prec = self.prec

    def test_digits_for(self):
        self.assertEqual(digits_for(53), 15)
        self.assertEqual(digits_for(256), 77)

    def test_format_value(self):
        self.assertEqual(format_value(None, 10), "")
        self.assertEqual(format_value(3, 10), 3)
        self.assertEqual(format_value(mpf("0.25"), 10), "0.25")
        self.assertEqual(format_value({"a": [mpf(1), "x"]}, 10), {"a": ["1.0", "x"]})

    def test_sweep_csv(self):
        text = render(sweep_records(self.rows), SWEEP_COLUMNS, "csv", 15)
        lines = text.splitlines()
        self.assertEqual(lines[0], "q,N_max,lambda_last,s,s_err,l,pct_error,error")
        self.assertEqual(lines[1], "0.5,0,0.625,0.625,0.0,0.5,20.0,")
        self.assertEqual(lines[2], "0.9,0,,,,,,order 0 needs too many bits")

    def test_sweep_json_verbose(self):
        data = json.loads(render(sweep_records(self.rows, verbose=True), SWEEP_COLUMNS, "json", 15))
        self.assertEqual(data[0]["s"], "0.625")
        self.assertEqual(data[0]["sequence"][0]["midpoint"], "0.625")
        self.assertEqual(data[0]["sequence"][0]["probes"], 3)
        self.assertNotIn("sequence", data[1])

    def test_sequence_records(self):
        records = sequence_records(self.seq)
        self.assertEqual(records[0]["N"], 0)
        self.assertEqual(records[0]["hi"], mpf("0.75"))

    def test_render_document(self):
        data = json.loads(render_document({"s": mpf("0.5"), "method": "aitken"}, 15))
        self.assertEqual(data, {"s": "0.5", "method": "aitken"})

    def test_emit_to_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "out.csv"
            emit("a,b\n", path)
            self.assertEqual(path.read_text(encoding="utf-8"), "a,b\n")


if __name__ == "__main__":
    unittest.main()
