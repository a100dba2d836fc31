#!/usr/bin/env python3
"""
Spatial Grid & Fourier Transforms
Uniform lattice x_j = x_min + j*dx with its DFT-ordered wavenumber lattice.

Transform convention (internal, fixed once here):
    forward(f)[m] = dx / sqrt(2*pi) * sum_j f_j exp(-i k_m x_j)
    inverse(g)[j] = inverse of the above
so forward approximates the unitary continuous transform and Parseval reads
sum |f|^2 dx == sum |forward(f)|^2 dk.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.fft as sfft

from core.errors import ValidationError
from utils.helpers import is_power_of_two

MIN_GRID_POINTS = 8


@dataclass(frozen=True)
class Grid:
    x_min: float
    n_points: int
    dx: float

    def __post_init__(self):
        if not is_power_of_two(self.n_points) or self.n_points < MIN_GRID_POINTS:
            raise ValidationError(f"n_points must be a power of two >= {MIN_GRID_POINTS}, got {self.n_points}")
        if not self.dx > 0:
            raise ValidationError(f"dx must be positive, got {self.dx}")

    @property
    def length(self) -> float:
        return self.n_points * self.dx

    @property
    def x_max(self) -> float:
        return self.x_min + self.length

    @property
    def dk(self) -> float:
        return 2.0 * math.pi / self.length

    @property
    def k_nyquist(self) -> float:
        return math.pi / self.dx

    @cached_property
    def x(self) -> np.ndarray:
        x = self.x_min + self.dx * np.arange(self.n_points)
        x.setflags(write=False)
        return x

    @cached_property
    def k(self) -> np.ndarray:
        k = 2.0 * math.pi * sfft.fftfreq(self.n_points, d=self.dx)
        k.setflags(write=False)
        return k

    @cached_property
    def _shift_phase(self) -> np.ndarray:
        return np.exp(-1j * self.k * self.x_min) * (self.dx / math.sqrt(2.0 * math.pi))

    def index_of(self, x: float) -> int:
        """Nearest grid index, clipped to the lattice."""
        return int(np.clip(round((x - self.x_min) / self.dx), 0, self.n_points - 1))

    def contains(self, x_lo: float, x_hi: float) -> bool:
        return x_lo >= self.x_min and x_hi <= self.x_max

    def same_as(self, other: "Grid") -> bool:
        return (self.n_points == other.n_points
                and math.isclose(self.x_min, other.x_min, rel_tol=0, abs_tol=1e-12 * self.length)
                and math.isclose(self.dx, other.dx, rel_tol=1e-12))

    # --- Transforms ---

    def _check_length(self, field: np.ndarray):
        if np.shape(field) != (self.n_points,):
            raise ValidationError(f"Field length {np.shape(field)} does not match grid size {self.n_points}")

    def forward_transform(self, field: np.ndarray, workers: Optional[int] = None) -> np.ndarray:
        self._check_length(field)
        return sfft.fft(field, workers=workers) * self._shift_phase

    def inverse_transform(self, spectrum: np.ndarray, workers: Optional[int] = None) -> np.ndarray:
        self._check_length(spectrum)
        return sfft.ifft(spectrum / self._shift_phase, workers=workers)

    def apply_in_wavenumber_space(self, field: np.ndarray, factor: np.ndarray,
                                  workers: Optional[int] = None) -> np.ndarray:
        """inverse_transform(factor * forward_transform(field)); the phase factors cancel."""
        return sfft.ifft(factor * sfft.fft(field, workers=workers), workers=workers)


def make_grid(x_min: float, x_max: float, n_points: int) -> Grid:
    """Grid covering [x_min, x_max) with n_points cells (power of two)."""
    if not is_power_of_two(n_points):
        raise ValidationError(f"n_points must be a power of two, got {n_points}")
    if not x_max > x_min:
        raise ValidationError(f"Grid extent must be positive, got [{x_min}, {x_max})")
    return Grid(x_min=float(x_min), n_points=int(n_points), dx=(x_max - x_min) / n_points)
