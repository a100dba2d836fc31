#!/usr/bin/env python3

import io
import json
import math
import tempfile
import unittest
import zipfile
from pathlib import Path

from core import reporter
from core.models import SweepRow


class ReporterTests(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def test_json_replaces_non_finite_values(self):
        path = reporter.write_json(self.root / "nested" / "summary.json",
                                   {"tau_ns": math.nan, "gap": (1.0, math.inf), "ok": 2.5})
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        self.assertEqual(payload, {"tau_ns": None, "gap": [1.0, None], "ok": 2.5})

    def test_sweep_header(self):
        self.assertEqual(reporter.sweep_header("motion.a_m_s2"),
                         ["motion.a_m_s2", "d_peak_v_m_per_s", "dv_semiclassical_m_per_s", "a_tau_m_per_s",
                          "outcome", "error"])
        self.assertEqual(reporter.sweep_header("packet.E0_neV", energy_scan=True)[-4:],
                         ["T", "tau_ns", "dv_m_per_s", "error"])

    def test_sweep_rows_keep_blanks_for_missing_values(self):
        rows = [SweepRow(value=1e5, d_peak_v=0.01, outcome="transmitted"),
                SweepRow(value=2e5, error="boundary_contact: too wide")]
        path = reporter.write_sweep_csv(self.root / "sweep.csv", "motion.a_m_s2", rows)
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        self.assertEqual(len(lines), 3)
        self.assertEqual(lines[1], "1.000000000000e+05,1.000000000000e-02,,,transmitted,")
        self.assertTrue(lines[2].endswith(",boundary_contact: too wide"))

    def test_bundle_zip_uses_relative_names(self):
        first = reporter.write_json(self.root / "run" / "summary.json", {"name": "x"})
        second = reporter.write_semiclassical_csv(self.root / "run" / "semiclassical.csv", [(1e5, 0.01, "transmitted")])
        archive = zipfile.ZipFile(io.BytesIO(reporter.bundle_zip([first, second, first], self.root)))
        self.assertEqual(sorted(archive.namelist()), ["run/semiclassical.csv", "run/summary.json"])


if __name__ == "__main__":
    unittest.main()
