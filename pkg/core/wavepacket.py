#!/usr/bin/env python3
"""
Wave Packet Module
Gaussian packet construction, the evolving WaveState and packet kinematics.

Conventions:
- A packet moving toward +x carries exp(+i k0 x); evolution is exp(-iEt/hbar).
- delta_x is the amplitude width: psi ~ exp(-(x-x0)^2 / (2 delta_x^2)),
  so the density standard deviation is delta_x / sqrt(2) and the amplitude
  width in k is sigma_k = 1 / delta_x.
- delta_E = hbar * v0 * sigma_k = hbar * v0 / delta_x. At E0 = 100 neV,
  delta_x = 1.35 um gives delta_E = 2.13 neV (6.6% above the quoted 2 neV pairing).
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from core.constants import NEUTRON
from core.errors import ValidationError
from core.grid import Grid

CLIP_MARGIN_WIDTHS = 4.0
MIN_POINTS_PER_WIDTH = 8.0
NYQUIST_MARGIN = math.pi / 4.0


@dataclass(frozen=True)
class PacketSpec:
    """Initial Gaussian packet; give exactly one of delta_x_um / delta_E_neV."""
    E0_neV: float
    x0_um: float
    delta_x_um: Optional[float] = None
    delta_E_neV: Optional[float] = None
    direction: int = 1

    def __post_init__(self):
        if not self.E0_neV > 0:
            raise ValidationError(f"Packet energy must be positive, got {self.E0_neV} neV")
        if (self.delta_x_um is None) == (self.delta_E_neV is None):
            raise ValidationError("Specify exactly one of delta_x_um or delta_E_neV")
        width = self.delta_x_um if self.delta_x_um is not None else self.delta_E_neV
        if not width > 0:
            raise ValidationError(f"Packet width must be positive, got {width}")
        if self.direction not in (1, -1):
            raise ValidationError(f"direction must be +1 or -1, got {self.direction}")

    @property
    def v0(self) -> float:
        """Signed group velocity in m/s."""
        return self.direction * NEUTRON.energy_to_velocity(self.E0_neV)

    @property
    def k0(self) -> float:
        return NEUTRON.velocity_to_wavenumber(self.v0)

    @property
    def delta_x(self) -> float:
        if self.delta_x_um is not None:
            return self.delta_x_um
        return NEUTRON.hbar_nev_us * abs(self.v0) / self.delta_E_neV

    @property
    def delta_E(self) -> float:
        if self.delta_E_neV is not None:
            return self.delta_E_neV
        return NEUTRON.hbar_nev_us * abs(self.v0) / self.delta_x_um

    @property
    def sigma_k(self) -> float:
        return 1.0 / self.delta_x

    @property
    def density_width(self) -> float:
        return self.delta_x / math.sqrt(2.0)

    @property
    def k_extent(self) -> float:
        """Largest |k| carrying appreciable probability."""
        return abs(self.k0) + 8.0 * self.sigma_k

    def with_energy(self, energy_nev: float) -> "PacketSpec":
        return replace(self, E0_neV=energy_nev)


@dataclass
class WaveState:
    grid: Grid
    psi: np.ndarray
    t_us: float = 0.0
    mass_label: str = field(default="neutron")

    def copy(self) -> "WaveState":
        return WaveState(grid=self.grid, psi=self.psi.copy(), t_us=self.t_us, mass_label=self.mass_label)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def norm(self) -> float:
        return float(np.sum(self.density) * self.grid.dx)

    def probability_between(self, x_lo: float, x_hi: float) -> float:
        x = self.grid.x
        mask = (x >= x_lo) & (x < x_hi)
        return float(np.sum(self.density[mask]) * self.grid.dx)

    def mean_position(self) -> float:
        rho = self.density
        return float(np.sum(self.grid.x * rho) / np.sum(rho))

    def position_width(self) -> float:
        rho = self.density
        total = np.sum(rho)
        mean = np.sum(self.grid.x * rho) / total
        return float(math.sqrt(np.sum((self.grid.x - mean) ** 2 * rho) / total))

    def peak_position(self, x_lo: Optional[float] = None, x_hi: Optional[float] = None) -> float:
        rho = self.density
        x = self.grid.x
        if x_lo is not None or x_hi is not None:
            lo = -np.inf if x_lo is None else x_lo
            hi = np.inf if x_hi is None else x_hi
            rho = np.where((x >= lo) & (x < hi), rho, 0.0)
        return float(x[int(np.argmax(rho))])

    def momentum_density(self) -> np.ndarray:
        """|psi~(k)|^2 on the DFT-ordered wavenumber lattice (integrates to the norm with dk)."""
        return np.abs(self.grid.forward_transform(self.psi)) ** 2

    def mean_velocity(self) -> float:
        rho_k = self.momentum_density()
        return float(NEUTRON.hbar_over_m * np.sum(self.grid.k * rho_k) / np.sum(rho_k))


def validate_packet_on_grid(spec: PacketSpec, grid: Grid):
    dx_packet = spec.delta_x
    problems = []
    if spec.x0_um - grid.x_min < CLIP_MARGIN_WIDTHS * dx_packet or grid.x_max - spec.x0_um < CLIP_MARGIN_WIDTHS * dx_packet:
        problems.append(
            f"packet at x0={spec.x0_um} um with delta_x={dx_packet:.4g} um is clipped by the domain "
            f"[{grid.x_min}, {grid.x_max}) (needs {CLIP_MARGIN_WIDTHS:g} widths each side)")
    if dx_packet < MIN_POINTS_PER_WIDTH * grid.dx:
        problems.append(f"packet under-resolved: delta_x={dx_packet:.4g} um < {MIN_POINTS_PER_WIDTH:g}*dx={MIN_POINTS_PER_WIDTH * grid.dx:.4g} um")
    if abs(spec.k0) * grid.dx >= NYQUIST_MARGIN:
        problems.append(f"k0*dx={abs(spec.k0) * grid.dx:.3f} exceeds the Nyquist margin pi/4; refine the grid")
    if problems:
        raise ValidationError("Packet does not fit the grid: " + "; ".join(problems))


def make_gaussian(spec: PacketSpec, grid: Grid) -> WaveState:
    """Normalized Gaussian packet on the grid at t = 0."""
    validate_packet_on_grid(spec, grid)
    width = spec.delta_x
    offset = grid.x - spec.x0_um
    psi = (math.pi * width * width) ** -0.25 * np.exp(1j * spec.k0 * offset - offset * offset / (2.0 * width * width))
    psi = psi / math.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx)
    return WaveState(grid=grid, psi=psi.astype(np.complex128), t_us=0.0)


def analytic_momentum_density(spec: PacketSpec, k: np.ndarray) -> np.ndarray:
    """|psi~(k)|^2 of the continuous packet, normalized over k."""
    width = spec.delta_x
    return width / math.sqrt(math.pi) * np.exp(-(width * (k - spec.k0)) ** 2)


def free_density_width(spec: PacketSpec, t_us: float) -> float:
    """Density standard deviation of the freely spreading packet."""
    sigma0 = spec.density_width
    return sigma0 * math.sqrt(1.0 + (NEUTRON.hbar_over_m * t_us / (2.0 * sigma0 * sigma0)) ** 2)
