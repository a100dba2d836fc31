#!/usr/bin/env python3
"""
Data Models Module
Scenario configuration sections and the result records handed between the
orchestrator, the reporter and the interactive runner.
"""

import copy
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from core.potentials import (MotionLaw, PotentialStructure, barrier, double_step, lattice, nif, stack, step,
                             well)
from core.wavepacket import PacketSpec

CONFIG_VERSION = 1


class StructureKind(str, Enum):
    BARRIER = "barrier"
    WELL = "well"
    STEP = "step"
    DOUBLE_STEP = "double_step"
    NIF = "nif"
    LATTICE = "lattice"
    LAYERS = "layers"

    @classmethod
    def from_string(cls, value: str) -> "StructureKind":
        """Raises ValueError for unknown kinds; config errors must not pass silently."""
        return cls(str(value).lower().strip())


class RunMode(str, Enum):
    DYNAMIC = "dynamic"
    STATIONARY = "stationary"

    @classmethod
    def from_string(cls, value: Optional[str]) -> "RunMode":
        if not value:
            return cls.DYNAMIC
        return cls(str(value).lower().strip())


# Parameters every structure kind needs (thicknesses in um, heights in neV).
STRUCTURE_PARAMETERS: Dict[StructureKind, tuple] = {
    StructureKind.BARRIER: ("U0", "d"),
    StructureKind.WELL: ("depth", "d"),
    StructureKind.STEP: ("U",),
    StructureKind.DOUBLE_STEP: ("U1", "d", "U2"),
    StructureKind.NIF: ("U1", "a", "U2", "b"),
    StructureKind.LATTICE: ("n_barriers", "U", "barrier_w", "gap_w"),
    StructureKind.LAYERS: ("layers",),
}

OUTPUT_KINDS = ("spectra", "runlog", "summary")


@dataclass
class GridConfig:
    x_min_um: float
    x_max_um: float
    n_points: int


@dataclass
class PacketConfig:
    E0_neV: float
    x0_um: float
    delta_x_um: Optional[float] = None
    delta_E_neV: Optional[float] = None

    def spec(self) -> PacketSpec:
        return PacketSpec(E0_neV=self.E0_neV, x0_um=self.x0_um,
                          delta_x_um=self.delta_x_um, delta_E_neV=self.delta_E_neV)


@dataclass
class StructureConfig:
    kind: StructureKind
    params: Dict[str, Any] = field(default_factory=dict)

    def build(self) -> PotentialStructure:
        p = self.params
        if self.kind == StructureKind.BARRIER:
            return barrier(float(p["U0"]), float(p["d"]))
        if self.kind == StructureKind.WELL:
            return well(float(p["depth"]), float(p["d"]))
        if self.kind == StructureKind.STEP:
            return step(float(p["U"]))
        if self.kind == StructureKind.DOUBLE_STEP:
            return double_step(float(p["U1"]), float(p["d"]), float(p["U2"]))
        if self.kind == StructureKind.NIF:
            return nif(float(p["U1"]), float(p["a"]), float(p["U2"]), float(p["b"]))
        if self.kind == StructureKind.LATTICE:
            return lattice(int(p["n_barriers"]), float(p["U"]), float(p["barrier_w"]), float(p["gap_w"]))
        terminal = p.get("terminal_height_neV")
        return stack([(h, d) for h, d in p["layers"]],
                     terminal_height_neV=None if terminal is None else float(terminal))


@dataclass
class SynchronizeConfig:
    target_velocity_m_s: float = 0.0


@dataclass
class MotionConfig:
    s0_um: float = 0.0
    V0_m_s: float = 0.0
    a_m_s2: float = 0.0
    synchronize: Optional[SynchronizeConfig] = None

    def law(self) -> MotionLaw:
        return MotionLaw(s0_um=self.s0_um, V0_m_s=self.V0_m_s, a_m_s2=self.a_m_s2)


@dataclass
class TimeConfig:
    t_max_us: float
    theta_us: Optional[float] = None  # None = derived from the accuracy rule
    stop_separation_multiple: float = 3.0
    edge_margin_multiple: float = 5.0
    refine: bool = False


@dataclass
class AnalysisConfig:
    branch: str = "transmission"
    reference_run: bool = True
    semiclassical: bool = True
    a_tau: bool = True


@dataclass
class StationaryConfig:
    E_min_neV: float
    E_max_neV: float
    n_points: int = 501
    branch: str = "transmission"


@dataclass
class OutputsConfig:
    directory: str = "results"
    which: List[str] = field(default_factory=lambda: list(OUTPUT_KINDS))


@dataclass
class CaseConfig:
    label: str
    overrides: Dict[str, Any] = field(default_factory=dict)


@dataclass
class SweepConfig:
    vary: str
    values: List[float] = field(default_factory=list)


@dataclass
class ScenarioConfig:
    name: str
    structure: StructureConfig
    packet: Optional[PacketConfig] = None
    grid: Optional[GridConfig] = None
    time: Optional[TimeConfig] = None
    motion: MotionConfig = field(default_factory=MotionConfig)
    mode: RunMode = RunMode.DYNAMIC
    description: str = ""
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    stationary: Optional[StationaryConfig] = None
    outputs: OutputsConfig = field(default_factory=OutputsConfig)
    cases: List[CaseConfig] = field(default_factory=list)
    sweep: Optional[SweepConfig] = None
    version: int = CONFIG_VERSION

    def to_dict(self) -> Dict[str, Any]:
        """Plain mapping in config-file layout (enums as strings, None sections dropped)."""
        data = asdict(self)
        data["mode"] = self.mode.value
        data["structure"]["kind"] = self.structure.kind.value
        ordered = {"version": data.pop("version"), "name": data.pop("name"),
                   "description": data.pop("description"), "mode": data.pop("mode")}
        ordered.update({key: value for key, value in data.items() if value is not None})
        return copy.deepcopy(ordered)

    def output_enabled(self, kind: str) -> bool:
        return kind in self.outputs.which


# --- Results ---

@dataclass
class CaseResult:
    """Outcome of one dynamic run; failures are recorded, not raised."""
    label: str
    success: bool
    error_type: Optional[str] = None
    error: Optional[str] = None
    partial: bool = False
    summary: Dict[str, Any] = field(default_factory=dict)
    spectra: Dict[str, Any] = field(default_factory=dict)  # name -> VelocitySpectrum
    run_log: Optional[Dict[str, Any]] = None
    warnings: List[str] = field(default_factory=list)
    exit_code: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "success": self.success,
            "error_type": self.error_type,
            "error": self.error,
            "partial": self.partial,
            "summary": self.summary,
            "warnings": self.warnings,
        }


@dataclass
class ScenarioResult:
    """The package returned by run_scenario and shown by the runner."""
    success: bool
    name: str = ""
    cases: List[CaseResult] = field(default_factory=list)
    artifacts: List[str] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    processing_time: float = 0.0
    error_type: Optional[str] = None
    error: Optional[str] = None
    exit_code: int = 0

    @property
    def partial(self) -> bool:
        return any(case.partial for case in self.cases)


@dataclass
class SweepRow:
    value: float
    d_peak_v: Optional[float] = None
    dv_semiclassical: Optional[float] = None
    a_tau: Optional[float] = None
    outcome: str = ""
    transmission: Optional[float] = None
    tau_ns: Optional[float] = None
    dv: Optional[float] = None
    error: str = ""
