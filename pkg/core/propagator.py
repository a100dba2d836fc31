#!/usr/bin/env python3
"""
Split-Operator Propagator
Second-order split-operator evolution under a rigidly moving potential:

    psi(t + theta) = P(t + theta) . F^-1 K F . P(t) . psi(t)
    P(t) = exp(-i theta V(x, t) / 2 hbar),  K = exp(-i theta hbar k^2 / 2m)

The potential is re-sampled at both t and t + theta on every step.
"""

import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from core.constants import NEUTRON
from core.errors import BoundaryContactError, NumericalFailure, ValidationError
from core.potentials import MotionLaw, PotentialStructure, faces_at, sample
from core.wavepacket import PacketSpec, WaveState
from utils.helpers import safe_log

POTENTIAL_PHASE_LIMIT = 0.05  # rad per step
KINETIC_PHASE_LIMIT = 0.5  # rad per step
NORM_DRIFT_LIMIT = 1e-6
EDGE_PROBABILITY_LIMIT = 1e-6
NEAR_ZONE_LIMIT = 1e-4
EMPTY_WEIGHT = 1e-6

STOP_SEPARATED = "separated"
STOP_TIME_CAP = "time_cap"


@dataclass(frozen=True)
class StepPlan:
    """
    Time step plus the stop-rule parameters of a run.
    Separation and edge margins are multiples of the initial packet width.
    """
    theta_us: float
    t_max_us: float
    packet_width_um: float
    stop_separation_multiple: float = 3.0
    edge_margin_multiple: float = 5.0
    check_every: int = 50
    nan_check_every: int = 1000
    stop_on_separation: bool = True
    workers: Optional[int] = None

    def __post_init__(self):
        if not self.theta_us > 0:
            raise ValidationError(f"theta must be positive, got {self.theta_us} us")
        if not self.t_max_us > 0:
            raise ValidationError(f"t_max must be positive, got {self.t_max_us} us")
        if not self.packet_width_um > 0:
            raise ValidationError(f"Packet width must be positive, got {self.packet_width_um} um")
        if self.check_every < 1 or self.nan_check_every < 1:
            raise ValidationError("Check intervals must be at least one step")

    @property
    def n_steps(self) -> int:
        """Number of steps implied by the time cap."""
        return int(math.ceil(self.t_max_us / self.theta_us - 1e-9))

    @property
    def separation_um(self) -> float:
        return self.stop_separation_multiple * self.packet_width_um

    @property
    def edge_margin_um(self) -> float:
        return self.edge_margin_multiple * self.packet_width_um


@dataclass
class RunLog:
    theta_us: float
    steps: int = 0
    norm_initial: float = 1.0
    norm_drift: float = 0.0
    stop_reason: str = ""
    partial: bool = False
    wall_time_s: float = 0.0
    peak_trace: List[Tuple[float, float]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "norm_drift": self.norm_drift,
            "steps": self.steps,
            "theta": self.theta_us,
            "peak_trace": [list(point) for point in self.peak_trace],
            "stop_reason": self.stop_reason,
            "partial": self.partial,
        }


def kinetic_factor(k: np.ndarray, theta_us: float) -> np.ndarray:
    return np.exp(-0.5j * theta_us * NEUTRON.hbar_over_m * k * k)


def potential_half_factor(V: np.ndarray, theta_us: float) -> np.ndarray:
    return np.exp(-0.5j * theta_us * V / NEUTRON.hbar_nev_us)


def step(state: WaveState, V_now: np.ndarray, V_next: np.ndarray, theta: float,
         workers: Optional[int] = None) -> WaveState:
    """One split-operator step; returns a new state at t + theta."""
    n = state.grid.n_points
    if np.shape(V_now) != (n,) or np.shape(V_next) != (n,):
        raise ValidationError(f"Potential arrays do not match the grid size {n}")
    psi = potential_half_factor(V_now, theta) * state.psi
    psi = state.grid.apply_in_wavenumber_space(psi, kinetic_factor(state.grid.k, theta), workers=workers)
    psi = potential_half_factor(V_next, theta) * psi
    return WaveState(grid=state.grid, psi=psi, t_us=state.t_us + theta, mass_label=state.mass_label)


def derive_time_step(spec: PacketSpec, structure: PotentialStructure) -> float:
    """
    Largest theta with max|V| theta / hbar <= 0.05 rad and
    hbar k_max^2 theta / 2m <= 0.5 rad, k_max being the largest wavenumber the
    packet carries (or reaches after falling into the deepest well).
    """
    hbar = NEUTRON.hbar_nev_us
    v_max = structure.max_abs_height
    k_max = spec.k_extent
    if v_max > 0:
        k_max = max(k_max, math.sqrt(spec.k0 ** 2 + v_max / NEUTRON.kinetic_coefficient))
    limits = [KINETIC_PHASE_LIMIT * hbar / (NEUTRON.kinetic_coefficient * k_max * k_max)]
    if v_max > 0:
        limits.append(POTENTIAL_PHASE_LIMIT * hbar / v_max)
    return min(limits)


def _component_velocity(state: WaveState, mask: np.ndarray) -> float:
    """Mean velocity of the masked part from the probability current."""
    psi = np.where(mask, state.psi, 0.0)
    weight = np.sum(np.abs(psi) ** 2)
    if weight == 0:
        return 0.0
    current = np.imag(np.conj(psi) * np.gradient(psi, state.grid.dx))
    return float(NEUTRON.hbar_over_m * np.sum(current) / weight)


class SplitOperatorPropagator:
    """Runs a WaveState through a moving structure until its components separate."""

    def __init__(self, structure: PotentialStructure, motion: MotionLaw, plan: StepPlan):
        self.structure = structure
        self.motion = motion
        self.plan = plan

    def potential_at(self, state: WaveState, t_us: float) -> np.ndarray:
        return sample(self.structure, self.motion, state.grid, t_us)

    def check_edges(self, state: WaveState):
        grid = state.grid
        margin = self.plan.edge_margin_um
        edge_probability = state.probability_between(grid.x_min, grid.x_min + margin) + \
            state.probability_between(grid.x_max - margin, grid.x_max)
        if edge_probability > EDGE_PROBABILITY_LIMIT:
            raise BoundaryContactError(
                f"Probability {edge_probability:.3e} within {margin:.4g} um of the domain edge at t={state.t_us:.4g} us; "
                f"enlarge the domain")

    def is_separated(self, state: WaveState) -> bool:
        """
        True once every non-empty component has its peak at least the separation
        margin away from the structure, almost nothing is left inside it, and the
        part left of the structure is moving away from it.
        """
        left_face, right_face = faces_at(self.structure, self.motion, state.t_us)
        margin = self.plan.separation_um
        x = state.grid.x
        rho = state.density
        dx = state.grid.dx

        inside = (x >= left_face) & (x < right_face)
        if np.sum(rho[inside]) * dx >= NEAR_ZONE_LIMIT:
            return False

        left = x < left_face
        if np.sum(rho[left]) * dx > EMPTY_WEIGHT:
            peak = x[int(np.argmax(np.where(left, rho, 0.0)))]
            if left_face - peak < margin:
                return False
            if _component_velocity(state, left) >= self.motion.velocity(state.t_us):
                return False

        right = x >= right_face
        if np.sum(rho[right]) * dx > EMPTY_WEIGHT:
            peak = x[int(np.argmax(np.where(right, rho, 0.0)))]
            if peak - right_face < margin:
                return False
        return True

    def run(self, state: WaveState,
            on_progress: Optional[Callable[[float], None]] = None) -> Tuple[WaveState, RunLog]:
        plan = self.plan
        log = RunLog(theta_us=plan.theta_us, norm_initial=state.norm())
        started = time.perf_counter()
        safe_log(f"Propagator: run start theta={plan.theta_us:.4g} us, up to {plan.n_steps} steps, "
                 f"structure '{self.structure.label}'", "DEBUG")

        self.check_edges(state)
        kinetic = kinetic_factor(state.grid.k, plan.theta_us)
        static = self.motion.is_static
        half_now = potential_half_factor(self.potential_at(state, state.t_us), plan.theta_us)
        t0 = state.t_us
        current = state.copy()

        log.peak_trace.append((current.t_us, current.peak_position()))
        for n in range(1, plan.n_steps + 1):
            t_next = t0 + n * plan.theta_us
            if static:
                half_next = half_now
            else:
                half_next = potential_half_factor(self.potential_at(current, t_next), plan.theta_us)
            psi = current.grid.apply_in_wavenumber_space(half_now * current.psi, kinetic, workers=plan.workers)
            current.psi = half_next * psi
            current.t_us = t_next
            half_now = half_next
            log.steps = n

            if n % plan.nan_check_every == 0 and not np.all(np.isfinite(current.psi)):
                raise NumericalFailure(f"Non-finite wave function at step {n} (t={t_next:.4g} us)")
            if n % plan.check_every == 0:
                log.peak_trace.append((current.t_us, current.peak_position()))
                self.check_edges(current)
                if on_progress:
                    on_progress(min(1.0, n / plan.n_steps))
                if plan.stop_on_separation and self.is_separated(current):
                    log.stop_reason = STOP_SEPARATED
                    break
        else:
            log.stop_reason = STOP_TIME_CAP
            log.partial = plan.stop_on_separation
            if log.partial:
                safe_log(f"Propagator: time cap {plan.t_max_us:.4g} us reached before the components separated",
                         "WARNING")

        if not np.all(np.isfinite(current.psi)):
            raise NumericalFailure(f"Non-finite wave function at the end of the run (t={current.t_us:.4g} us)")
        if log.peak_trace[-1][0] != current.t_us:
            log.peak_trace.append((current.t_us, current.peak_position()))

        log.norm_drift = abs(current.norm() - log.norm_initial)
        log.wall_time_s = time.perf_counter() - started
        if log.norm_drift > NORM_DRIFT_LIMIT:
            raise NumericalFailure(f"Norm drift {log.norm_drift:.3e} exceeds {NORM_DRIFT_LIMIT:g}")
        safe_log(f"Propagator: {log.stop_reason} after {log.steps} steps (t={current.t_us:.4g} us), "
                 f"norm drift {log.norm_drift:.2e}, {log.wall_time_s:.1f} s")
        return current, log


def run(state: WaveState, structure: PotentialStructure, motion: MotionLaw, plan: StepPlan,
        on_progress: Optional[Callable[[float], None]] = None) -> Tuple[WaveState, RunLog]:
    return SplitOperatorPropagator(structure, motion, plan).run(state, on_progress=on_progress)
