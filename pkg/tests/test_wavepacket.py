#!/usr/bin/env python3

import math
import unittest

import numpy as np

from core.constants import NEUTRON
from core.errors import ValidationError
from core.grid import make_grid
from core.wavepacket import (PacketSpec, analytic_momentum_density, free_density_width, make_gaussian,
                             validate_packet_on_grid)


class PacketSpecTests(unittest.TestCase):
    def test_width_pairing(self):
        spec = PacketSpec(E0_neV=100.0, x0_um=-5.0, delta_E_neV=2.0)
        self.assertAlmostEqual(spec.delta_x, NEUTRON.hbar_nev_us * spec.v0 / 2.0)
        self.assertAlmostEqual(spec.delta_E, 2.0)
        other = PacketSpec(E0_neV=100.0, x0_um=-5.0, delta_x_um=spec.delta_x)
        self.assertAlmostEqual(other.delta_E, 2.0)

    def test_exactly_one_width(self):
        with self.assertRaises(ValidationError):
            PacketSpec(E0_neV=100.0, x0_um=0.0)
        with self.assertRaises(ValidationError):
            PacketSpec(E0_neV=100.0, x0_um=0.0, delta_x_um=1.0, delta_E_neV=2.0)

    def test_invalid_values(self):
        with self.assertRaises(ValidationError):
            PacketSpec(E0_neV=0.0, x0_um=0.0, delta_x_um=1.0)
        with self.assertRaises(ValidationError):
            PacketSpec(E0_neV=1.0, x0_um=0.0, delta_x_um=-1.0)
        with self.assertRaises(ValidationError):
            PacketSpec(E0_neV=1.0, x0_um=0.0, delta_x_um=1.0, direction=2)

    def test_direction_sets_velocity_sign(self):
        spec = PacketSpec(E0_neV=1.0, x0_um=0.0, delta_x_um=1.0, direction=-1)
        self.assertLess(spec.v0, 0.0)
        self.assertLess(spec.k0, 0.0)

    def test_with_energy(self):
        spec = PacketSpec(E0_neV=1.0, x0_um=0.0, delta_x_um=1.0)
        self.assertEqual(spec.with_energy(2.0).E0_neV, 2.0)
        self.assertEqual(spec.with_energy(2.0).delta_x, 1.0)


class GaussianTests(unittest.TestCase):
    def setUp(self):
        self.grid = make_grid(-40.0, 40.0, 2048)
        self.spec = PacketSpec(E0_neV=1.0, x0_um=-10.0, delta_x_um=2.0)

    def test_normalized_and_centred(self):
        state = make_gaussian(self.spec, self.grid)
        self.assertAlmostEqual(state.norm(), 1.0, places=12)
        self.assertAlmostEqual(state.mean_position(), -10.0, places=6)
        self.assertAlmostEqual(state.position_width(), self.spec.density_width, places=6)
        self.assertAlmostEqual(state.peak_position(), -10.0, delta=self.grid.dx)

    def test_mean_velocity(self):
        state = make_gaussian(self.spec, self.grid)
        self.assertAlmostEqual(state.mean_velocity(), self.spec.v0, places=6)

    def test_momentum_density_matches_analytic(self):
        state = make_gaussian(self.spec, self.grid)
        numeric = state.momentum_density()
        expected = analytic_momentum_density(self.spec, self.grid.k)
        np.testing.assert_allclose(numeric, expected, atol=1e-8)
        self.assertAlmostEqual(np.sum(numeric) * self.grid.dk, 1.0, places=10)

    def test_probability_between(self):
        state = make_gaussian(self.spec, self.grid)
        self.assertAlmostEqual(state.probability_between(-40.0, -10.0), 0.5, delta=0.01)
        self.assertLess(state.probability_between(10.0, 40.0), 1e-12)

    def test_copy_is_independent(self):
        state = make_gaussian(self.spec, self.grid)
        twin = state.copy()
        twin.psi[:] = 0.0
        self.assertAlmostEqual(state.norm(), 1.0, places=12)


class PacketFitTests(unittest.TestCase):
    def test_clipped_packet(self):
        grid = make_grid(-10.0, 10.0, 1024)
        with self.assertRaises(ValidationError):
            validate_packet_on_grid(PacketSpec(E0_neV=1.0, x0_um=-8.0, delta_x_um=1.0), grid)

    def test_under_resolved_packet(self):
        grid = make_grid(-100.0, 100.0, 256)
        with self.assertRaises(ValidationError):
            validate_packet_on_grid(PacketSpec(E0_neV=0.01, x0_um=0.0, delta_x_um=1.0), grid)

    def test_nyquist_margin(self):
        grid = make_grid(-40.0, 40.0, 1024)
        with self.assertRaises(ValidationError):
            make_gaussian(PacketSpec(E0_neV=100.0, x0_um=0.0, delta_x_um=2.0), grid)


class FreeSpreadingTests(unittest.TestCase):
    def test_width_at_zero_and_later(self):
        spec = PacketSpec(E0_neV=1.0, x0_um=0.0, delta_x_um=2.0)
        self.assertAlmostEqual(free_density_width(spec, 0.0), spec.density_width)
        sigma0 = spec.density_width
        t = 100.0
        expected = math.sqrt(sigma0 ** 2 + (NEUTRON.hbar_over_m * t / (2.0 * sigma0)) ** 2)
        self.assertAlmostEqual(free_density_width(spec, t), expected)


if __name__ == "__main__":
    unittest.main()
