#!/usr/bin/env python3

import unittest

from core.errors import ValidationError
from core.grid import make_grid
from core.models import RunMode
from core.parser import ScenarioParser
from core.scenarios import BUILTIN_SCENARIOS, builtin_payload, get_builtin, list_scenarios
from core.wavepacket import validate_packet_on_grid


class BuiltinScenarioTests(unittest.TestCase):
    def test_listing(self):
        names = [item["name"] for item in list_scenarios()]
        self.assertEqual(names, [f"fig{i}" for i in range(1, 10)])
        self.assertTrue(all(item["description"] for item in list_scenarios()))

    def test_every_builtin_parses(self):
        for name in BUILTIN_SCENARIOS:
            with self.subTest(name=name):
                config = get_builtin(name)
                self.assertEqual(config.name, name)
                config.structure.build()
                for case in config.cases:
                    ScenarioParser.with_overrides(config, case.overrides)

    def test_dynamic_packets_fit_their_grids(self):
        for name in BUILTIN_SCENARIOS:
            config = get_builtin(name)
            if config.mode != RunMode.DYNAMIC:
                continue
            with self.subTest(name=name):
                grid = make_grid(config.grid.x_min_um, config.grid.x_max_um, config.grid.n_points)
                validate_packet_on_grid(config.packet.spec(), grid)

    def test_stationary_builtin(self):
        config = get_builtin("fig7")
        self.assertEqual(config.mode, RunMode.STATIONARY)
        self.assertEqual(config.stationary.n_points, 1001)

    def test_lattice_builtin(self):
        structure = get_builtin("fig9").structure.build()
        self.assertEqual(len(structure.layers), 101)
        self.assertEqual(structure.heights[:2], [250.0, 0.0])

    def test_payload_is_a_fresh_copy(self):
        payload = builtin_payload("fig1")
        self.assertEqual(payload["version"], 1)
        payload["name"] = "changed"
        self.assertEqual(builtin_payload("fig1")["name"], "fig1")

    def test_unknown_scenario(self):
        with self.assertRaises(ValidationError):
            get_builtin("fig10")


if __name__ == "__main__":
    unittest.main()
