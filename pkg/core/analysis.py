#!/usr/bin/env python3
"""
Spectral Analysis
Velocity spectra of whole states or separated components, spectral shifts,
and the acceleration-times-delay prediction they are compared with.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from core.constants import NEUTRON
from core.errors import EmptyComponentError, ValidationError
from core.potentials import MotionLaw, PotentialStructure, faces_at
from core.stationary import BRANCH_TRANSMISSION, gdt, transfer_matrix
from core.wavepacket import WaveState
from utils.helpers import safe_log

EMPTY_WEIGHT = 1e-6
SPLIT_MISMATCH_LIMIT = 1e-4
TAPER_CELLS = 2.0
SUPPORT_FRACTION = 1e-3
DENSITY_CUTOFF = 1e-12


@dataclass
class VelocitySpectrum:
    v: np.ndarray
    density: np.ndarray
    weight: float
    peak_v: float
    mean_v: float
    rms_width: float
    label: str = ""

    @property
    def dv(self) -> float:
        return float(self.v[1] - self.v[0])

    def rows(self) -> List[Tuple[float, float]]:
        return list(zip(self.v.tolist(), self.density.tolist()))

    def to_dict(self) -> Dict[str, Any]:
        return {"label": self.label, "peak_v": self.peak_v, "mean_v": self.mean_v,
                "rms_width": self.rms_width, "weight": self.weight}


@dataclass(frozen=True)
class SpectrumRegion:
    """Spatial window [x_lo, x_hi) plus an optional momentum-sign filter (+1 / -1 / 0)."""
    x_lo: Optional[float] = None
    x_hi: Optional[float] = None
    momentum_sign: int = 0

    def __post_init__(self):
        if self.momentum_sign not in (-1, 0, 1):
            raise ValidationError(f"momentum_sign must be -1, 0 or +1, got {self.momentum_sign}")
        if self.x_lo is not None and self.x_hi is not None and self.x_hi <= self.x_lo:
            raise ValidationError(f"Empty spectrum window [{self.x_lo}, {self.x_hi})")


def _ramp(x: np.ndarray, center: float, half_width: float) -> np.ndarray:
    """Raised-cosine step rising from 0 to 1 across [center - half_width, center + half_width]."""
    s = np.clip((x - center + half_width) / (2.0 * half_width), 0.0, 1.0)
    return 0.5 * (1.0 - np.cos(math.pi * s))


def window(state: WaveState, region: SpectrumRegion) -> np.ndarray:
    x = state.grid.x
    half = 0.5 * TAPER_CELLS * state.grid.dx
    mask = np.ones_like(x)
    if region.x_lo is not None and math.isfinite(region.x_lo):
        mask *= _ramp(x, region.x_lo, half)
    if region.x_hi is not None and math.isfinite(region.x_hi):
        mask *= 1.0 - _ramp(x, region.x_hi, half)
    return mask


def peak_interpolated(v: np.ndarray, density: np.ndarray) -> float:
    """Three-point parabola through the log-density around the maximum."""
    i = int(np.argmax(density))
    if 0 < i < len(density) - 1 and np.all(density[i - 1:i + 2] > 0):
        left, centre, right = np.log(density[i - 1:i + 2])
        curvature = left - 2.0 * centre + right
        if curvature < 0:
            return float(v[i] + 0.5 * (left - right) / curvature * (v[1] - v[0]))
    return float(v[i])


def spectrum_from_amplitudes(state: WaveState, amplitudes: np.ndarray, label: str = "") -> VelocitySpectrum:
    """k-space amplitudes (DFT order) to a velocity spectrum sorted by velocity."""
    hbar_over_m = NEUTRON.hbar_over_m
    v = np.fft.fftshift(state.grid.k) * hbar_over_m
    density = np.fft.fftshift(np.abs(amplitudes) ** 2) / hbar_over_m
    dv = state.grid.dk * hbar_over_m
    weight = float(np.sum(density) * dv)
    if weight < EMPTY_WEIGHT:
        raise EmptyComponentError(f"Component '{label}' holds only {weight:.3e} probability")
    mean = float(np.sum(v * density) / np.sum(density))
    rms = float(math.sqrt(np.sum((v - mean) ** 2 * density) / np.sum(density)))
    return VelocitySpectrum(v=v, density=density, weight=weight, peak_v=peak_interpolated(v, density),
                            mean_v=mean, rms_width=rms, label=label)


def spectrum(state: WaveState, region: Optional[SpectrumRegion] = None, label: str = "") -> VelocitySpectrum:
    region = region or SpectrumRegion()
    amplitudes = state.grid.forward_transform(window(state, region) * state.psi)
    if region.momentum_sign:
        amplitudes = np.where(region.momentum_sign * state.grid.k > 0, amplitudes, 0.0)
    return spectrum_from_amplitudes(state, amplitudes, label=label)


# --- Component splitting ---

@dataclass
class ComponentSplit:
    transmitted: Optional[VelocitySpectrum]
    reflected: Optional[VelocitySpectrum]
    transmitted_weight: float
    reflected_weight: float
    warnings: List[str] = field(default_factory=list)

    def component(self, branch: str) -> Optional[VelocitySpectrum]:
        return self.transmitted if branch == BRANCH_TRANSMISSION else self.reflected


def _component(state: WaveState, region: SpectrumRegion, label: str, warnings: List[str]) -> Tuple[Optional[VelocitySpectrum], float]:
    spatial_only = SpectrumRegion(region.x_lo, region.x_hi, 0)
    try:
        spatial = spectrum(state, spatial_only, label=label)
    except EmptyComponentError:
        return None, 0.0
    try:
        filtered = spectrum(state, region, label=label)
    except EmptyComponentError:
        filtered = None
    filtered_weight = filtered.weight if filtered else 0.0
    mismatch = abs(spatial.weight - filtered_weight)
    if mismatch > SPLIT_MISMATCH_LIMIT:
        message = f"{label} component: spatial and momentum filters disagree by {mismatch:.2e} (incomplete separation)"
        safe_log(f"Analysis: {message}", "WARNING")
        warnings.append(message)
    return filtered, filtered_weight


def split_components(state: WaveState, structure: PotentialStructure, motion: MotionLaw) -> ComponentSplit:
    """Transmitted = k > 0 beyond the right face, reflected = k < 0 before the left face."""
    left_face, right_face = faces_at(structure, motion, state.t_us)
    warnings: List[str] = []
    reflected, reflected_weight = _component(state, SpectrumRegion(x_hi=left_face, momentum_sign=-1), "reflected", warnings)
    if math.isfinite(right_face):
        transmitted, transmitted_weight = _component(
            state, SpectrumRegion(x_lo=right_face, momentum_sign=1), "transmitted", warnings)
    else:
        transmitted, transmitted_weight = None, 0.0
    return ComponentSplit(transmitted=transmitted, reflected=reflected, transmitted_weight=transmitted_weight,
                          reflected_weight=reflected_weight, warnings=warnings)


# --- Shifts & predictions ---

@dataclass(frozen=True)
class SpectrumShift:
    d_peak_v: float
    d_mean_v: float
    d_width: float

    def to_dict(self) -> Dict[str, float]:
        return {"d_peak_v": self.d_peak_v, "d_mean_v": self.d_mean_v, "d_width": self.d_width}


def shift(result: VelocitySpectrum, reference: VelocitySpectrum) -> SpectrumShift:
    return SpectrumShift(d_peak_v=result.peak_v - reference.peak_v,
                         d_mean_v=result.mean_v - reference.mean_v,
                         d_width=result.rms_width - reference.rms_width)


def a_tau_prediction(structure: PotentialStructure, E0: float, a: float,
                     branch: str = BRANCH_TRANSMISSION) -> float:
    """a * tau in m/s, tau the group delay at E0; positive a accelerates the structure toward +x."""
    if a == 0:
        return 0.0
    return a * gdt(structure, E0, branch) * 1e-9


def predicted_transmitted_weight(state: WaveState, structure: PotentialStructure) -> float:
    """sum over k > 0 of T(E(k)) |psi~(k)|^2 dk for a structure at rest."""
    rho_k = state.momentum_density()
    k = state.grid.k
    relevant = (k > 0) & (rho_k > DENSITY_CUTOFF * rho_k.max())
    total = 0.0
    for kj, rho in zip(k[relevant], rho_k[relevant]):
        energy = NEUTRON.kinetic_coefficient * kj * kj
        total += transfer_matrix(structure, float(energy)).transmission * rho
    return float(total * state.grid.dk)


def restricted_mean(values: VelocitySpectrum, support: VelocitySpectrum,
                    fraction: float = SUPPORT_FRACTION) -> float:
    """Mean velocity of values over the bins where support exceeds fraction of its maximum."""
    inside = support.density >= fraction * support.density.max()
    lo, hi = support.v[inside].min(), support.v[inside].max()
    band = (values.v >= lo) & (values.v <= hi)
    weights = values.density[band]
    if weights.sum() == 0:
        raise EmptyComponentError("Reference spectrum is empty over the transmitted support")
    return float(np.sum(values.v[band] * weights) / weights.sum())


def transmitted_velocity_change(transmitted: VelocitySpectrum, initial: VelocitySpectrum) -> float:
    """Transmitted mean minus the initial mean restricted to the transmitted support."""
    return transmitted.mean_v - restricted_mean(initial, transmitted)


def correlation(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson r over the finite pairs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    finite = np.isfinite(x) & np.isfinite(y)
    if finite.sum() < 3:
        raise ValidationError("Correlation needs at least three finite pairs")
    return float(stats.pearsonr(x[finite], y[finite])[0])
