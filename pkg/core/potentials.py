#!/usr/bin/env python3
"""
Potential Structures & Motion Laws
Piecewise-constant layer stacks in their own rest frame, rigid motion
s(t) = s0 + V0 t + a t^2 / 2 (positive a pushes the structure toward +x),
and sampling of the moving profile onto the grid.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.constants import ACCEL_SI_TO_INTERNAL, NEUTRON
from core.errors import ValidationError
from core.grid import Grid

UM_PER_NM = 1e-3


@dataclass(frozen=True)
class Layer:
    height_neV: float
    thickness_um: float

    def __post_init__(self):
        if not (self.thickness_um > 0 and math.isfinite(self.thickness_um)):
            raise ValidationError(f"Layer thickness must be positive and finite, got {self.thickness_um} um")
        if not math.isfinite(self.height_neV):
            raise ValidationError(f"Layer height must be finite, got {self.height_neV} neV")

    def to_dict(self) -> Dict[str, float]:
        return {"height_neV": self.height_neV, "thickness_um": self.thickness_um}


@dataclass(frozen=True)
class PotentialStructure:
    """
    Layer stack with its left face at the rest-frame origin.
    terminal_height_neV, when set, is a semi-infinite final layer (step potentials);
    otherwise the potential is zero beyond the stack.
    """
    layers: Tuple[Layer, ...] = ()
    terminal_height_neV: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers and self.terminal_height_neV is None:
            return
        if self.terminal_height_neV is not None and not math.isfinite(self.terminal_height_neV):
            raise ValidationError("Terminal layer height must be finite")

    @property
    def is_empty(self) -> bool:
        return not self.layers and self.terminal_height_neV is None

    @property
    def semi_infinite(self) -> bool:
        return self.terminal_height_neV is not None

    @property
    def total_thickness(self) -> float:
        """Thickness of the finite part of the stack."""
        return float(sum(layer.thickness_um for layer in self.layers))

    @property
    def edges(self) -> np.ndarray:
        """Rest-frame positions of every layer face, left to right."""
        return np.concatenate([[0.0], np.cumsum([layer.thickness_um for layer in self.layers])])

    @property
    def heights(self) -> List[float]:
        heights = [layer.height_neV for layer in self.layers]
        if self.terminal_height_neV is not None:
            heights.append(self.terminal_height_neV)
        return heights

    @property
    def max_abs_height(self) -> float:
        return max((abs(h) for h in self.heights), default=0.0)

    @property
    def area(self) -> float:
        """Integral of the finite part, neV*um."""
        return float(sum(layer.height_neV * layer.thickness_um for layer in self.layers))

    def right_face(self) -> float:
        return math.inf if self.semi_infinite else self.total_thickness

    def region_heights(self) -> List[float]:
        """Potential in every region crossed left to right, exterior regions included."""
        right = self.terminal_height_neV if self.semi_infinite else 0.0
        return [0.0] + [layer.height_neV for layer in self.layers] + [right]

    def reversed(self) -> "PotentialStructure":
        if self.semi_infinite:
            raise ValidationError("A semi-infinite structure has no mirror image")
        return PotentialStructure(layers=tuple(reversed(self.layers)), label=f"{self.label} (reversed)")

    def concatenate(self, other: "PotentialStructure") -> "PotentialStructure":
        if self.semi_infinite:
            raise ValidationError("Cannot append to a semi-infinite structure")
        return PotentialStructure(layers=self.layers + other.layers,
                                  terminal_height_neV=other.terminal_height_neV,
                                  label=f"{self.label}+{other.label}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "layers": [layer.to_dict() for layer in self.layers],
            "terminal_height_neV": self.terminal_height_neV,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PotentialStructure":
        layers = tuple(Layer(float(item["height_neV"]), float(item["thickness_um"])) for item in data.get("layers", []))
        terminal = data.get("terminal_height_neV")
        return cls(layers=layers, terminal_height_neV=None if terminal is None else float(terminal),
                   label=data.get("label", ""))


# --- Structure library ---

def _positive(name: str, value: float):
    if not value > 0:
        raise ValidationError(f"{name} must be positive, got {value}")


def barrier(U0: float, d: float) -> PotentialStructure:
    _positive("Barrier thickness", d)
    return PotentialStructure(layers=(Layer(U0, d),), label=f"barrier U={U0:g} neV d={d:g} um")


def well(depth: float, d: float) -> PotentialStructure:
    """depth is given as a positive number; the layer height is -depth."""
    _positive("Well thickness", d)
    return PotentialStructure(layers=(Layer(-abs(depth), d),), label=f"well depth={abs(depth):g} neV d={d:g} um")


def step(U: float) -> PotentialStructure:
    return PotentialStructure(terminal_height_neV=U, label=f"step U={U:g} neV")


def double_step(U1: float, d: float, U2: float) -> PotentialStructure:
    _positive("Double-step first layer thickness", d)
    return PotentialStructure(layers=(Layer(U1, d),), terminal_height_neV=U2,
                              label=f"double step U1={U1:g} d={d:g} um U2={U2:g}")


def nif(U1: float, a_thick: float, U2: float, b_thick: float) -> PotentialStructure:
    """Interference filter: barrier / well / barrier."""
    _positive("Filter barrier thickness", a_thick)
    _positive("Filter well thickness", b_thick)
    return PotentialStructure(layers=(Layer(U1, a_thick), Layer(U2, b_thick), Layer(U1, a_thick)),
                              label=f"NIF U1={U1:g} a={a_thick:g} U2={U2:g} b={b_thick:g}")


def lattice(n_barriers: int, U: float, barrier_w: float, gap_w: float) -> PotentialStructure:
    if int(n_barriers) != n_barriers or n_barriers < 1:
        raise ValidationError(f"n_barriers must be a positive integer, got {n_barriers}")
    _positive("Lattice barrier width", barrier_w)
    _positive("Lattice gap width", gap_w)
    layers: List[Layer] = []
    for i in range(int(n_barriers)):
        if i:
            layers.append(Layer(0.0, gap_w))
        layers.append(Layer(U, barrier_w))
    return PotentialStructure(layers=tuple(layers), label=f"lattice {n_barriers}x(U={U:g}, {barrier_w:g}/{gap_w:g} um)")


def stack(layers: Sequence[Tuple[float, float]], terminal_height_neV: Optional[float] = None,
          label: str = "layers") -> PotentialStructure:
    return PotentialStructure(layers=tuple(Layer(float(h), float(d)) for h, d in layers),
                              terminal_height_neV=terminal_height_neV, label=label)


# --- Effective potential ---

def effective_potential(rho_b: float) -> float:
    """U = 2 pi hbar^2 rho_b / m in neV, rho_b in nm^-2."""
    hbar2_over_m_nev_nm2 = 2.0 * NEUTRON.kinetic_coefficient / UM_PER_NM**2
    return 2.0 * math.pi * hbar2_over_m_nev_nm2 * rho_b


def scattering_length_density(U: float) -> float:
    """Inverse of effective_potential: rho_b in nm^-2 for U in neV."""
    return U / effective_potential(1.0)


# --- Motion ---

@dataclass(frozen=True)
class MotionLaw:
    s0_um: float = 0.0
    V0_m_s: float = 0.0
    a_m_s2: float = 0.0

    @property
    def a_internal(self) -> float:
        return self.a_m_s2 * ACCEL_SI_TO_INTERNAL

    @property
    def is_static(self) -> bool:
        return self.V0_m_s == 0.0 and self.a_m_s2 == 0.0

    def offset(self, t_us: float) -> float:
        return self.s0_um + self.V0_m_s * t_us + 0.5 * self.a_internal * t_us * t_us

    def velocity(self, t_us: float) -> float:
        return self.V0_m_s + self.a_internal * t_us

    def to_dict(self) -> Dict[str, float]:
        return {"s0_um": self.s0_um, "V0_m_s": self.V0_m_s, "a_m_s2": self.a_m_s2}


def faces_at(structure: PotentialStructure, motion: MotionLaw, t_us: float) -> Tuple[float, float]:
    """Lab positions of the left and right faces at time t."""
    offset = motion.offset(t_us)
    return offset, offset + structure.right_face()


def validate_structure_on_grid(structure: PotentialStructure, motion: MotionLaw, grid: Grid, t_us: float = 0.0):
    left, right = faces_at(structure, motion, t_us)
    right = left + structure.total_thickness if structure.semi_infinite else right
    if left < grid.x_min or right > grid.x_max:
        raise ValidationError(
            f"Structure [{left:.4g}, {right:.4g}] um at t={t_us:.4g} us extends past the domain [{grid.x_min}, {grid.x_max})")


def sample(structure: PotentialStructure, motion: MotionLaw, grid: Grid, t_us: float) -> np.ndarray:
    """
    V(x_j, t) = U(x_j - offset(t)) as the average of U over each cell [x_j, x_j + dx).
    A cell cut by a layer face gets the thickness-weighted mean of the heights;
    faces landing on grid points reproduce the layer heights exactly.
    """
    validate_structure_on_grid(structure, motion, grid, t_us)
    if structure.is_empty:
        return np.zeros(grid.n_points)

    offset = motion.offset(t_us)
    cell_bounds = grid.x_min + grid.dx * np.arange(grid.n_points + 1) - offset

    # Cumulative integral of U, piecewise linear between faces.
    edges = structure.edges
    areas = np.concatenate([[0.0], np.cumsum([layer.height_neV * layer.thickness_um for layer in structure.layers])])
    if structure.layers:
        cumulative = np.interp(cell_bounds, edges, areas, left=0.0, right=areas[-1])
    else:
        cumulative = np.zeros_like(cell_bounds)
    if structure.semi_infinite:
        cumulative = cumulative + structure.terminal_height_neV * np.maximum(cell_bounds - edges[-1], 0.0)
    return np.diff(cumulative) / grid.dx
