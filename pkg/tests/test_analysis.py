#!/usr/bin/env python3

import math
import unittest

import numpy as np

from core.analysis import (SpectrumRegion, VelocitySpectrum, a_tau_prediction, correlation, peak_interpolated,
                           predicted_transmitted_weight, shift, spectrum, split_components,
                           transmitted_velocity_change)
from core.constants import NEUTRON
from core.errors import EmptyComponentError, ValidationError
from core.grid import make_grid
from core.potentials import MotionLaw, barrier, stack
from core.stationary import gdt
from core.wavepacket import PacketSpec, WaveState, make_gaussian


class SpectrumTests(unittest.TestCase):
    def setUp(self):
        self.grid = make_grid(-40.0, 40.0, 2048)
        self.spec = PacketSpec(E0_neV=1.0, x0_um=-10.0, delta_x_um=2.0)
        self.state = make_gaussian(self.spec, self.grid)

    def test_gaussian_spectrum(self):
        result = spectrum(self.state, label="initial")
        self.assertAlmostEqual(result.weight, 1.0, places=8)
        self.assertAlmostEqual(result.peak_v, self.spec.v0, places=8)
        self.assertAlmostEqual(result.mean_v, self.spec.v0, places=8)
        expected_width = NEUTRON.hbar_over_m / (2.0 * math.sqrt(2.0))
        self.assertAlmostEqual(result.rms_width, expected_width, places=6)
        self.assertTrue(np.all(np.diff(result.v) > 0))
        self.assertEqual(result.to_dict()["label"], "initial")

    def test_empty_window_raises(self):
        with self.assertRaises(EmptyComponentError):
            spectrum(self.state, SpectrumRegion(x_lo=20.0))

    def test_region_validation(self):
        with self.assertRaises(ValidationError):
            SpectrumRegion(momentum_sign=2)
        with self.assertRaises(ValidationError):
            SpectrumRegion(x_lo=1.0, x_hi=1.0)

    def test_peak_interpolation_is_exact_for_gaussians(self):
        v = np.arange(0.0, 6.0)
        self.assertAlmostEqual(peak_interpolated(v, np.exp(-(v - 2.3) ** 2)), 2.3, places=10)
        self.assertEqual(peak_interpolated(v, np.exp(-v)), 0.0)

    def test_predicted_weight_without_structure(self):
        self.assertAlmostEqual(predicted_transmitted_weight(self.state, stack([])), 1.0, places=6)


class ComponentSplitTests(unittest.TestCase):
    def setUp(self):
        self.grid = make_grid(-40.0, 40.0, 2048)
        self.structure = barrier(1.0, 1.0)
        self.motion = MotionLaw()

    def test_separated_components(self):
        left = make_gaussian(PacketSpec(E0_neV=1.0, x0_um=-10.0, delta_x_um=2.0, direction=-1), self.grid)
        right = make_gaussian(PacketSpec(E0_neV=1.0, x0_um=11.0, delta_x_um=2.0), self.grid)
        state = WaveState(grid=self.grid, psi=(left.psi + right.psi) / math.sqrt(2.0))
        split = split_components(state, self.structure, self.motion)
        self.assertAlmostEqual(split.reflected_weight, 0.5, places=6)
        self.assertAlmostEqual(split.transmitted_weight, 0.5, places=6)
        self.assertLess(split.reflected.peak_v, 0.0)
        self.assertGreater(split.transmitted.peak_v, 0.0)
        self.assertEqual(split.warnings, [])
        self.assertIs(split.component("transmission"), split.transmitted)
        self.assertIs(split.component("reflection"), split.reflected)

    def test_unseparated_packet_is_flagged(self):
        state = make_gaussian(PacketSpec(E0_neV=1.0, x0_um=-10.0, delta_x_um=2.0), self.grid)
        split = split_components(state, self.structure, self.motion)
        self.assertIsNone(split.reflected)
        self.assertIsNone(split.transmitted)
        self.assertEqual(split.transmitted_weight, 0.0)
        self.assertEqual(len(split.warnings), 1)


def _spectrum(peak, mean, width):
    v = np.linspace(-1.0, 1.0, 5)
    return VelocitySpectrum(v=v, density=np.ones(5), weight=1.0, peak_v=peak, mean_v=mean, rms_width=width)


class ShiftTests(unittest.TestCase):
    def test_shift(self):
        delta = shift(_spectrum(1.5, 1.4, 0.2), _spectrum(1.0, 1.1, 0.1))
        self.assertAlmostEqual(delta.d_peak_v, 0.5)
        self.assertAlmostEqual(delta.d_mean_v, 0.3)
        self.assertAlmostEqual(delta.d_width, 0.1)
        self.assertEqual(set(delta.to_dict()), {"d_peak_v", "d_mean_v", "d_width"})

    def test_a_tau(self):
        structure = barrier(50.0, 1.0)
        self.assertEqual(a_tau_prediction(structure, 100.0, 0.0), 0.0)
        self.assertAlmostEqual(a_tau_prediction(structure, 100.0, -1e6),
                               -1e6 * gdt(structure, 100.0) * 1e-9, places=12)

    def test_velocity_change_against_itself(self):
        grid = make_grid(-40.0, 40.0, 2048)
        initial = spectrum(make_gaussian(PacketSpec(E0_neV=1.0, x0_um=-10.0, delta_x_um=2.0), grid))
        self.assertAlmostEqual(transmitted_velocity_change(initial, initial), 0.0, places=4)

    def test_correlation(self):
        self.assertAlmostEqual(correlation([1, 2, 3, 4], [2, 4, 6, 8]), 1.0)
        self.assertAlmostEqual(correlation([1, 2, 3, 4, 5], [-1, -2, math.nan, -4, -5]), -1.0)
        with self.assertRaises(ValidationError):
            correlation([1, 2], [1, 2])


if __name__ == "__main__":
    unittest.main()
