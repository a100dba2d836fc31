#!/usr/bin/env python3
"""
Physical Constants
Neutron mass and hbar folded into the internal unit system:
lengths in um, times in us, energies in neV.
With these units a velocity of 1 um/us is exactly 1 m/s and an
acceleration of 1 um/us^2 is 10^6 m/s^2.
"""

import math
from dataclasses import dataclass, field

import scipy.constants as const

NEV_IN_J = const.e * 1e-9
M_PER_UM = 1e-6
S_PER_US = 1e-6
NS_PER_US = 1e3
ACCEL_SI_TO_INTERNAL = 1e-6  # m/s^2 -> um/us^2


@dataclass(frozen=True)
class PhysicalConstants:
    """
    SI inputs plus the two precomputed coefficients every module works with:
    hbar in neV*us and hbar/m in um^2/us.
    """
    m: float = const.m_n
    hbar: float = const.hbar
    c: float = const.c

    hbar_nev_us: float = field(init=False)
    hbar_over_m: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "hbar_nev_us", self.hbar / NEV_IN_J / S_PER_US)
        object.__setattr__(self, "hbar_over_m", self.hbar / self.m / M_PER_UM**2 * S_PER_US)

    @property
    def mass_internal(self) -> float:
        """Mass in neV*us^2/um^2, so that E = m v^2 / 2 in neV for v in m/s."""
        return self.hbar_nev_us / self.hbar_over_m

    @property
    def kinetic_coefficient(self) -> float:
        """hbar^2 / 2m in neV*um^2 (E = C k^2)."""
        return 0.5 * self.hbar_nev_us * self.hbar_over_m

    @property
    def hbar_nev_ns(self) -> float:
        return self.hbar_nev_us * NS_PER_US

    # --- Kinematics ---

    def energy_to_velocity(self, energy_nev: float) -> float:
        if energy_nev < 0:
            raise ValueError(f"Energy must be non-negative, got {energy_nev} neV")
        return math.sqrt(2.0 * energy_nev / self.mass_internal)

    def velocity_to_energy(self, velocity: float) -> float:
        return 0.5 * self.mass_internal * velocity * velocity

    def velocity_to_wavenumber(self, velocity: float) -> float:
        """m/s -> um^-1."""
        return velocity / self.hbar_over_m

    def wavenumber_to_velocity(self, k: float) -> float:
        return k * self.hbar_over_m

    def energy_to_wavenumber(self, energy_nev: float) -> float:
        return self.velocity_to_wavenumber(self.energy_to_velocity(energy_nev))


NEUTRON = PhysicalConstants()


def energy_to_velocity(energy_nev: float) -> float:
    """Neutron speed in m/s for a kinetic energy in neV."""
    return NEUTRON.energy_to_velocity(energy_nev)


def velocity_to_wavenumber(velocity: float) -> float:
    """Neutron wavenumber in um^-1 for a speed in m/s."""
    return NEUTRON.velocity_to_wavenumber(velocity)
