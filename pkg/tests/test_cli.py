#!/usr/bin/env python3

import contextlib
import csv
import io
import json
import tempfile
import unittest
from pathlib import Path

import cli

STATIONARY_YAML = """
name: filter-curve
mode: stationary
structure: {kind: nif, params: {U1: 200.0, a: 0.030, U2: 2.15, b: 0.023}}
stationary: {E_min_neV: 98.0, E_max_neV: 102.0, n_points: 9}
"""

DYNAMIC_YAML = """
name: pushed-barrier
structure: {kind: barrier, params: {U0: 0.5, d: 1.25}}
packet: {E0_neV: 1.0, x0_um: -10.0, delta_x_um: 2.0}
grid: {x_min_um: -40.0, x_max_um: 40.0, n_points: 1024}
time: {t_max_us: 80.0}
cases:
  - {label: back, overrides: {motion.a_m_s2: -1000.0}}
  - {label: forward, overrides: {motion.a_m_s2: 1000.0}}
"""


def run_cli(*argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
        code = cli.main(list(argv))
    return code, out.getvalue()


class CliTests(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)

    def write(self, name, text):
        path = self.root / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    def test_list_scenarios(self):
        code, output = run_cli("list-scenarios", "--quiet")
        self.assertEqual(code, 0)
        names = [item["name"] for item in json.loads(output)]
        self.assertIn("fig7", names)

    def test_missing_config_exits_with_validation_code(self):
        code, _ = run_cli("run", str(self.root / "nope.yaml"), "--quiet")
        self.assertEqual(code, 2)

    def test_invalid_config_exits_with_validation_code(self):
        path = self.write("bad.yaml", STATIONARY_YAML.replace("kind: nif", "kind: tunnel"))
        code, _ = run_cli("transmission", path, "--quiet")
        self.assertEqual(code, 2)

    def test_unknown_builtin(self):
        code, _ = run_cli("scenario", "fig42", "--quiet")
        self.assertEqual(code, 2)

    def test_transmission_curve(self):
        path = self.write("curve.yaml", STATIONARY_YAML)
        code, output = run_cli("transmission", path, "--out-dir", str(self.root / "out"), "--quiet")

        self.assertEqual(code, 0)
        curve = self.root / "out" / "filter-curve" / "curve_transmission.csv"
        self.assertIn(str(curve), output)
        with curve.open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ["E_neV", "T", "R", "tau_ns"])
        self.assertEqual(len(rows), 10)
        stationary = json.loads((curve.parent / "stationary_transmission.json").read_text(encoding="utf-8"))
        self.assertAlmostEqual(stationary["resonance"]["energy_neV"], 100.0, delta=1.0)

    def test_stationary_run(self):
        path = self.write("curve.yaml", STATIONARY_YAML)
        code, _ = run_cli("run", path, "--out-dir", str(self.root / "out"), "--quiet")
        self.assertEqual(code, 0)
        self.assertTrue((self.root / "out" / "filter-curve" / "summary.json").is_file())

    def test_semiclassical_table(self):
        path = self.write("dynamic.yaml", DYNAMIC_YAML)
        code, _ = run_cli("semiclassical", path, "--out-dir", str(self.root / "out"), "--quiet")

        self.assertEqual(code, 0)
        with (self.root / "out" / "pushed-barrier" / "semiclassical.csv").open(encoding="utf-8") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ["a_m_per_s2", "dv_classical", "outcome"])
        self.assertEqual([row[2] for row in rows[1:]], ["transmitted", "transmitted"])

    def test_sweep_without_values_writes_header(self):
        path = self.write("dynamic.yaml", DYNAMIC_YAML)
        code, _ = run_cli("sweep", path, "--vary", "motion.a_m_s2", "--out-dir", str(self.root / "out"), "--quiet")

        self.assertEqual(code, 0)
        lines = (self.root / "out" / "pushed-barrier" / "sweep.csv").read_text(encoding="utf-8").splitlines()
        self.assertEqual(len(lines), 1)
        self.assertTrue(lines[0].startswith("motion.a_m_s2,d_peak_v_m_per_s"))


if __name__ == "__main__":
    unittest.main()
