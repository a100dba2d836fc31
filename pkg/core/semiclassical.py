#!/usr/bin/env python3
"""
Semiclassical Tracer
Event-driven point particle crossing the faces of a rigidly moving layer stack.
Between crossings the particle moves force-free; at each face the velocity
relative to the face is refracted by the potential step or reflected.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from core.constants import NEUTRON
from core.errors import NumericalFailure, ValidationError
from core.potentials import MotionLaw, PotentialStructure
from utils.helpers import safe_log

ROOT_GUARD_US = 1e-9
MAX_EVENTS = 10000

OUTCOME_TRANSMITTED = "transmitted"
OUTCOME_REFLECTED = "reflected"
OUTCOME_OVERTAKEN = "overtaken-exit"


@dataclass(frozen=True)
class CrossingEvent:
    t_us: float
    boundary: int
    side: str
    v_before: float
    v_after: float
    reflected: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"t_us": self.t_us, "boundary": self.boundary, "side": self.side,
                "v_before": self.v_before, "v_after": self.v_after, "reflected": self.reflected}


@dataclass
class ClassicalTrace:
    entry_velocity: float
    exit_velocity: float
    outcome: str
    exit_time_us: float
    exit_position_um: float
    events: List[CrossingEvent] = field(default_factory=list)

    @property
    def velocity_change(self) -> float:
        return self.exit_velocity - self.entry_velocity

    def to_dict(self) -> Dict[str, Any]:
        return {
            "entry_velocity": self.entry_velocity,
            "exit_velocity": self.exit_velocity,
            "velocity_change": self.velocity_change,
            "outcome": self.outcome,
            "exit_time_us": self.exit_time_us,
            "exit_position_um": self.exit_position_um,
            "events": [event.to_dict() for event in self.events],
        }


def earliest_root(a2: float, b: float, c: float, guard: float = ROOT_GUARD_US) -> Optional[float]:
    """Smallest tau > guard with a2 tau^2 + b tau + c = 0, or None."""
    roots: List[float] = []
    if a2 == 0.0:
        if b != 0.0:
            roots.append(-c / b)
    else:
        disc = b * b - 4.0 * a2 * c
        if disc < 0:
            return None
        q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
        if q != 0.0:
            roots.extend([q / a2, c / q])
        else:
            roots.append(0.0)
    candidates = [tau for tau in roots if tau > guard]
    return min(candidates) if candidates else None


def _start_region(structure: PotentialStructure, motion: MotionLaw, x: float, t: float) -> int:
    offset = motion.offset(t)
    if x <= offset:
        return 0
    if not structure.semi_infinite and x >= offset + structure.total_thickness:
        return len(structure.layers) + 1
    raise ValidationError(f"Particle at x={x} um must start outside the structure")


def trace_from(x: float, v: float, structure: PotentialStructure, motion: MotionLaw,
               t0: float = 0.0, max_events: int = MAX_EVENTS) -> ClassicalTrace:
    """Follow a particle from (x, v) at time t0 until it is back in field-free space."""
    edges = structure.edges
    heights = structure.region_heights()
    n_regions = len(heights)
    accel = motion.a_internal
    region = start_region = _start_region(structure, motion, x, t0)
    t = t0
    entry_velocity = v
    trace = ClassicalTrace(entry_velocity=v, exit_velocity=v, outcome=OUTCOME_TRANSMITTED,
                           exit_time_us=t0, exit_position_um=x)

    if structure.is_empty:
        return trace

    for _ in range(max_events):
        best: Optional[Tuple[float, int]] = None
        for boundary in (region - 1, region):
            if boundary < 0 or boundary >= len(edges):
                continue
            x_b = motion.offset(t) + edges[boundary]
            tau = earliest_root(0.5 * accel, motion.velocity(t) - v, x_b - x)
            if tau is not None and (best is None or tau < best[0]):
                best = (tau, boundary)

        if best is None:
            if trace.events:
                raise NumericalFailure(f"Particle lost inside region {region} at t={t:.6g} us")
            trace.exit_time_us = t
            trace.exit_position_um = x
            return trace

        tau, boundary = best
        t += tau
        x += v * tau
        wall_velocity = motion.velocity(t)
        target = boundary + 1 if boundary == region else boundary
        delta_u = heights[target] - heights[region]
        relative = v - wall_velocity
        threshold = 2.0 * delta_u / NEUTRON.mass_internal
        reflected = relative * relative <= threshold
        if reflected:
            new_relative = -relative
        else:
            new_relative = math.copysign(math.sqrt(relative * relative - threshold), relative)
            region = target
        v_before, v = v, new_relative + wall_velocity
        trace.events.append(CrossingEvent(t_us=t, boundary=boundary,
                                          side="left-to-right" if relative > 0 else "right-to-left",
                                          v_before=v_before, v_after=v, reflected=reflected))

        if region in (0, n_regions - 1):
            trace.exit_velocity = v
            trace.exit_time_us = t
            trace.exit_position_um = x
            if region != start_region:
                trace.outcome = OUTCOME_TRANSMITTED
            elif (v > 0) == (start_region == 0):
                trace.outcome = OUTCOME_OVERTAKEN
            else:
                trace.outcome = OUTCOME_REFLECTED
            safe_log(f"Semiclassical: {trace.outcome} after {len(trace.events)} crossings, "
                     f"dv={v - entry_velocity:+.6g} m/s", "DEBUG")
            return trace

    raise NumericalFailure(f"Semiclassical trace exceeded {max_events} crossings (trapped orbit)")


def trace(E0: float, structure: PotentialStructure, motion: MotionLaw, start_x: float,
          t0: float = 0.0, direction: int = 1) -> ClassicalTrace:
    """Particle of energy E0 (neV) launched from start_x toward +x (or -x for direction=-1)."""
    v = direction * NEUTRON.energy_to_velocity(E0)
    return trace_from(start_x, v, structure, motion, t0=t0)


def reversed_motion(motion: MotionLaw, t_us: float) -> MotionLaw:
    """Motion law s'(tau) = s(t - tau), which retraces the structure's path backwards from t."""
    return MotionLaw(s0_um=motion.offset(t_us), V0_m_s=-motion.velocity(t_us), a_m_s2=motion.a_m_s2)
