#!/usr/bin/env python3

import unittest

import numpy as np

from core.analysis import predicted_transmitted_weight, split_components
from core.constants import NEUTRON
from core.errors import BoundaryContactError, ValidationError
from core.grid import make_grid
from core.potentials import MotionLaw, PotentialStructure, barrier
from core.propagator import (STOP_SEPARATED, STOP_TIME_CAP, SplitOperatorPropagator, StepPlan, derive_time_step,
                             run, step)
from core.wavepacket import PacketSpec, free_density_width, make_gaussian


class StepPlanTests(unittest.TestCase):
    def test_margins_and_budget(self):
        plan = StepPlan(theta_us=0.1, t_max_us=1.0, packet_width_um=2.0)
        self.assertEqual(plan.n_steps, 10)
        self.assertAlmostEqual(plan.separation_um, 6.0)
        self.assertAlmostEqual(plan.edge_margin_um, 10.0)

    def test_invalid_plan(self):
        with self.assertRaises(ValidationError):
            StepPlan(theta_us=0.0, t_max_us=1.0, packet_width_um=1.0)
        with self.assertRaises(ValidationError):
            StepPlan(theta_us=0.1, t_max_us=-1.0, packet_width_um=1.0)
        with self.assertRaises(ValidationError):
            StepPlan(theta_us=0.1, t_max_us=1.0, packet_width_um=1.0, check_every=0)


class TimeStepTests(unittest.TestCase):
    def test_potential_limited(self):
        spec = PacketSpec(E0_neV=100.0, x0_um=-5.0, delta_E_neV=2.0)
        theta = derive_time_step(spec, barrier(50.0, 1.0))
        self.assertAlmostEqual(theta, 0.05 * NEUTRON.hbar_nev_us / 50.0)

    def test_kinetic_limited_for_free_packet(self):
        spec = PacketSpec(E0_neV=1.0, x0_um=0.0, delta_x_um=2.0)
        theta = derive_time_step(spec, PotentialStructure())
        k_max = spec.k_extent
        self.assertAlmostEqual(theta, 0.5 * NEUTRON.hbar_nev_us / (NEUTRON.kinetic_coefficient * k_max ** 2))


class SingleStepTests(unittest.TestCase):
    def test_step_is_unitary(self):
        grid = make_grid(-40.0, 40.0, 1024)
        state = make_gaussian(PacketSpec(E0_neV=1.0, x0_um=-5.0, delta_x_um=2.0), grid)
        V = np.where((grid.x >= 0.0) & (grid.x < 1.0), 0.5, 0.0)
        after = step(state, V, V, 0.05)
        self.assertAlmostEqual(after.norm(), 1.0, places=12)
        self.assertAlmostEqual(after.t_us, 0.05)

    def test_step_rejects_wrong_potential_size(self):
        grid = make_grid(-40.0, 40.0, 1024)
        state = make_gaussian(PacketSpec(E0_neV=1.0, x0_um=-5.0, delta_x_um=2.0), grid)
        with self.assertRaises(ValidationError):
            step(state, np.zeros(10), np.zeros(10), 0.05)


class FreePacketTests(unittest.TestCase):
    def test_free_drift_matches_analytic_spreading(self):
        grid = make_grid(-40.0, 40.0, 1024)
        spec = PacketSpec(E0_neV=1.0, x0_um=-10.0, delta_x_um=2.0)
        state = make_gaussian(spec, grid)
        structure = PotentialStructure()
        plan = StepPlan(theta_us=derive_time_step(spec, structure), t_max_us=40.0, packet_width_um=spec.delta_x,
                        stop_on_separation=False)
        final, log = run(state, structure, MotionLaw(), plan)

        self.assertEqual(log.stop_reason, STOP_TIME_CAP)
        self.assertFalse(log.partial)
        self.assertLess(log.norm_drift, 1e-10)
        self.assertAlmostEqual(final.mean_velocity(), spec.v0, places=9)
        self.assertAlmostEqual(final.mean_position(), spec.x0_um + spec.v0 * final.t_us, places=4)
        expected_width = free_density_width(spec, final.t_us)
        self.assertLess(abs(final.position_width() - expected_width) / expected_width, 1e-3)
        self.assertEqual(len(log.peak_trace), log.steps // plan.check_every + 1 + (log.steps % plan.check_every > 0))


class StaticBarrierTests(unittest.TestCase):
    """Packet-weighted stationary transmission against the dynamic run."""

    def test_transmitted_weight_matches_stationary_theory(self):
        grid = make_grid(-80.0, 80.0, 2048)
        spec = PacketSpec(E0_neV=1.0, x0_um=-30.0, delta_x_um=4.0)
        structure = barrier(0.75, 1.25)
        state = make_gaussian(spec, grid)
        plan = StepPlan(theta_us=derive_time_step(spec, structure), t_max_us=200.0, packet_width_um=spec.delta_x,
                        edge_margin_multiple=2.0)
        final, log = run(state, structure, MotionLaw(), plan)

        self.assertEqual(log.stop_reason, STOP_SEPARATED)
        self.assertLess(log.norm_drift, 1e-8)
        split = split_components(final, structure, MotionLaw())
        predicted = predicted_transmitted_weight(state, structure)
        self.assertGreater(split.reflected_weight, 0.05)
        self.assertAlmostEqual(split.transmitted_weight, predicted, delta=2e-3)
        self.assertAlmostEqual(split.transmitted_weight + split.reflected_weight, 1.0, delta=1e-3)


class GuardTests(unittest.TestCase):
    def test_edge_contact_raises(self):
        grid = make_grid(-40.0, 40.0, 1024)
        spec = PacketSpec(E0_neV=1.0, x0_um=-30.0, delta_x_um=2.0)
        state = make_gaussian(spec, grid)
        plan = StepPlan(theta_us=0.1, t_max_us=1.0, packet_width_um=spec.delta_x)
        with self.assertRaises(BoundaryContactError):
            run(state, PotentialStructure(), MotionLaw(), plan)

    def test_time_cap_marks_partial(self):
        grid = make_grid(-40.0, 40.0, 1024)
        spec = PacketSpec(E0_neV=1.0, x0_um=-10.0, delta_x_um=2.0)
        structure = barrier(0.5, 1.25)
        plan = StepPlan(theta_us=0.05, t_max_us=1.0, packet_width_um=spec.delta_x)
        final, log = run(make_gaussian(spec, grid), structure, MotionLaw(), plan)
        self.assertEqual(log.stop_reason, STOP_TIME_CAP)
        self.assertTrue(log.partial)
        self.assertEqual(log.steps, 20)
        self.assertAlmostEqual(final.t_us, 1.0)

    def test_not_separated_at_start(self):
        grid = make_grid(-40.0, 40.0, 1024)
        spec = PacketSpec(E0_neV=1.0, x0_um=-10.0, delta_x_um=2.0)
        propagator = SplitOperatorPropagator(barrier(0.5, 1.25), MotionLaw(),
                                             StepPlan(theta_us=0.05, t_max_us=1.0, packet_width_um=2.0))
        self.assertFalse(propagator.is_separated(make_gaussian(spec, grid)))


if __name__ == "__main__":
    unittest.main()
