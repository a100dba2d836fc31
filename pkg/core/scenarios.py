#!/usr/bin/env python3
"""
Builtin Scenario Library
Ready-made configs for the moving-structure experiments: accelerated barriers
and wells, the near-threshold energy scan, resonant reflection from a double
step, the interference filter and the periodic lattice.
Values the experiments leave open are editable defaults.
"""

from typing import Any, Dict, List

from core.errors import ValidationError
from core.models import ScenarioConfig
from core.parser import ScenarioParser

# fig1-fig4 share the 100 neV packet with a 2 neV spread; the structure is at rest when the packet center arrives
_UCN_100 = {"E0_neV": 100.0, "x0_um": -5.0, "delta_E_neV": 2.0}
_GRID_128 = {"x_min_um": -64.0, "x_max_um": 64.0, "n_points": 16384}
_TIME_SHORT = {"t_max_us": 6.0}
_AT_REST_ON_ARRIVAL = {"synchronize": {"target_velocity_m_s": 0.0}}


def _accel_cases(values: List[float], extra: Dict[str, Any] = None) -> List[Dict[str, Any]]:
    cases = []
    for a in values:
        overrides = {"motion.a_m_s2": a}
        overrides.update(extra or {})
        cases.append({"label": f"a={a:+g}", "overrides": overrides})
    return cases


BUILTIN_SCENARIOS: Dict[str, Dict[str, Any]] = {
    "fig1": {
        "description": "Barrier U=50 neV of width 1 or 2 um accelerated at +/-1e6 m/s^2; transmitted spectra",
        "structure": {"kind": "barrier", "params": {"U0": 50.0, "d": 1.0}},
        "packet": _UCN_100,
        "grid": _GRID_128,
        "time": _TIME_SHORT,
        "motion": _AT_REST_ON_ARRIVAL,
        "cases": [
            {"label": f"d={d:g}um a={a:+g}", "overrides": {"structure.params.d": d, "motion.a_m_s2": a}}
            for d in (1.0, 2.0) for a in (-1e6, 1e6)
        ],
    },
    "fig2": {
        "description": "Barriers of 50 and 75 neV accelerated against the neutron velocity",
        "structure": {"kind": "barrier", "params": {"U0": 50.0, "d": 1.0}},
        "packet": _UCN_100,
        "grid": _GRID_128,
        "time": _TIME_SHORT,
        "motion": dict(_AT_REST_ON_ARRIVAL, a_m_s2=-1e6),
        "cases": [{"label": f"U={U:g}neV", "overrides": {"structure.params.U0": U}} for U in (50.0, 75.0)],
    },
    "fig3": {
        "description": "Well of depth 50 neV and width 1 um accelerated at +/-1e6 m/s^2",
        "structure": {"kind": "well", "params": {"depth": 50.0, "d": 1.0}},
        "packet": _UCN_100,
        "grid": _GRID_128,
        "time": _TIME_SHORT,
        "motion": _AT_REST_ON_ARRIVAL,
        "cases": _accel_cases([-1e6, 1e6]),
    },
    "fig4": {
        "description": "Velocity change vs acceleration for the 50 neV / 1 um barrier, quantum and semiclassical",
        "structure": {"kind": "barrier", "params": {"U0": 50.0, "d": 1.0}},
        "packet": _UCN_100,
        "grid": _GRID_128,
        "time": _TIME_SHORT,
        "motion": _AT_REST_ON_ARRIVAL,
        "sweep": {"vary": "motion.a_m_s2", "values": [-1e6, -3e5, -1e5, 1e5, 3e5, 1e6]},
    },
    "fig5": {
        "description": "Near-threshold energy scan through a 100 neV / 0.2 um barrier decelerating the neutron",
        "structure": {"kind": "barrier", "params": {"U0": 100.0, "d": 0.2}},
        "packet": {"E0_neV": 110.0, "x0_um": -40.0, "delta_x_um": 8.0},
        "grid": {"x_min_um": -80.0, "x_max_um": 80.0, "n_points": 16384},
        "time": {"t_max_us": 20.0, "edge_margin_multiple": 1.5},
        "motion": {"a_m_s2": -2e4, "synchronize": {"target_velocity_m_s": 0.0}},
        "analysis": {"reference_run": False},
        "stationary": {"E_min_neV": 100.5, "E_max_neV": 130.0, "n_points": 296},
        "sweep": {"vary": "packet.E0_neV", "values": [float(E) for E in range(101, 131)]},
    },
    "fig6": {
        "description": "Reflection from a step at rest, a slowly moving double step, and an accelerated double step",
        "structure": {"kind": "double_step", "params": {"U1": 100.0, "d": 0.2, "U2": 300.0}},
        "packet": {"E0_neV": 103.2, "x0_um": -30.0, "delta_x_um": 5.0},
        "grid": {"x_min_um": -80.0, "x_max_um": 16.0, "n_points": 16384},
        "time": {"t_max_us": 24.0, "edge_margin_multiple": 1.5},
        "analysis": {"branch": "reflection", "reference_run": False, "semiclassical": False},
        "stationary": {"E_min_neV": 95.0, "E_max_neV": 120.0, "n_points": 501, "branch": "reflection"},
        "cases": [
            {"label": "step at rest", "overrides": {"structure": {"kind": "step", "params": {"U": 300.0}}}},
            {"label": "double step V0=-0.05", "overrides": {"motion.V0_m_s": -0.05}},
            {"label": "double step a=-5e4", "overrides": {
                "motion.a_m_s2": -5e4, "motion.synchronize": {"target_velocity_m_s": -0.05}}},
        ],
    },
    "fig7": {
        "description": "Interference filter transmission and group delay around its 100 neV line",
        "mode": "stationary",
        "structure": {"kind": "nif", "params": {"U1": 200.0, "a": 0.030, "U2": 2.15, "b": 0.023}},
        "stationary": {"E_min_neV": 95.0, "E_max_neV": 105.0, "n_points": 1001},
    },
    "fig8": {
        "description": "Narrow packet through the interference filter accelerated in both directions",
        "structure": {"kind": "nif", "params": {"U1": 200.0, "a": 0.030, "U2": 2.15, "b": 0.023}},
        "packet": {"E0_neV": 100.0, "x0_um": -150.0, "delta_x_um": 40.0},
        "grid": {"x_min_um": -336.0, "x_max_um": 304.0, "n_points": 65536},
        "time": {"t_max_us": 100.0, "edge_margin_multiple": 1.0},
        "motion": {"synchronize": {"target_velocity_m_s": 0.0}},
        "analysis": {"reference_run": False},
        "stationary": {"E_min_neV": 95.0, "E_max_neV": 105.0, "n_points": 401},
        "cases": _accel_cases([-5e3, 5e3, -1e4, 1e4, -2e4, 2e4]),
    },
    "fig9": {
        "description": "51-barrier lattice: transmission band structure and accelerated passband transmission",
        "structure": {"kind": "lattice", "params": {"n_barriers": 51, "U": 250.0, "barrier_w": 0.005, "gap_w": 0.025}},
        "packet": {"E0_neV": 180.0, "x0_um": -8.0, "delta_x_um": 2.0},
        "grid": {"x_min_um": -32.0, "x_max_um": 32.0, "n_points": 65536},
        "time": {"t_max_us": 10.0},
        "motion": _AT_REST_ON_ARRIVAL,
        "stationary": {"E_min_neV": 1.0, "E_max_neV": 400.0, "n_points": 800},
        "cases": _accel_cases([-5e5, 5e5]),
    },
}


def list_scenarios() -> List[Dict[str, str]]:
    return [{"name": name, "description": payload["description"]} for name, payload in BUILTIN_SCENARIOS.items()]


def builtin_payload(name: str) -> Dict[str, Any]:
    if name not in BUILTIN_SCENARIOS:
        raise ValidationError(f"Unknown scenario '{name}'; available: {', '.join(BUILTIN_SCENARIOS)}")
    payload = {"version": 1, "name": name}
    payload.update(BUILTIN_SCENARIOS[name])
    return payload


def get_builtin(name: str) -> ScenarioConfig:
    return ScenarioParser.parse_payload_to_config(builtin_payload(name))
