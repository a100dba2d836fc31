#!/usr/bin/env python3
"""
Stationary Scattering Theory
Transfer-matrix amplitudes, group delay times, resonance and band-gap
location, and the closed-form frequency-shift formulas used as oracles.

Amplitude conventions:
- incident e^{ikx} from the left, reflected r e^{-ikx} referenced to the left face (x = 0);
- transmitted t e^{ik_R x}, so arg t measures the delay relative to free flight
  across the stack (negative for wells).
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from core.constants import NEUTRON, NEV_IN_J
from core.errors import NumericalFailure, ValidationError
from core.potentials import PotentialStructure
from utils.helpers import safe_log

BRANCH_TRANSMISSION = "transmission"
BRANCH_REFLECTION = "reflection"
BRANCHES = (BRANCH_TRANSMISSION, BRANCH_REFLECTION)

DEGENERACY_TOLERANCE = 1e-12
DEGENERACY_NUDGE = 1e-9
GDT_BASE_STEP = 1e-4
GDT_MIN_STEP = 1e-9
GDT_WIDTH_FRACTION = 50.0
GUARD_RATIO = 0.1


@dataclass(frozen=True)
class ScatteringAmplitudes:
    E: float
    t_amp: complex
    r_amp: complex
    k_left: float
    k_right: complex
    nudged: bool = False

    @property
    def transmission(self) -> float:
        return float(self.k_right.real / self.k_left * abs(self.t_amp) ** 2)

    @property
    def reflection(self) -> float:
        return float(abs(self.r_amp) ** 2)

    @property
    def flux_error(self) -> float:
        return abs(self.transmission + self.reflection - 1.0)

    def amplitude(self, branch: str) -> complex:
        return self.t_amp if branch == BRANCH_TRANSMISSION else self.r_amp


def _check_branch(branch: str):
    if branch not in BRANCHES:
        raise ValidationError(f"branch must be one of {BRANCHES}, got '{branch}'")


def _wavenumber(E: float, U: float) -> complex:
    """sqrt(2m(E - U))/hbar, positive imaginary (decaying rightward) below U."""
    delta = (E - U) / NEUTRON.kinetic_coefficient
    return complex(math.sqrt(delta), 0.0) if delta >= 0 else complex(0.0, math.sqrt(-delta))


def nudge_energy(structure: PotentialStructure, E: float) -> Tuple[float, bool]:
    for height in structure.heights:
        if abs(E - height) <= DEGENERACY_TOLERANCE * abs(E):
            nudged = E * (1.0 + DEGENERACY_NUDGE)
            safe_log(f"Stationary: E={E:.12g} neV sits on a layer height; evaluated at {nudged:.12g} neV", "WARNING")
            return nudged, True
    return E, False


def layer_matrix(E: float, U: float, d: float) -> np.ndarray:
    """Real matrix carrying (psi, psi') across a layer of height U and thickness d."""
    delta = (E - U) / NEUTRON.kinetic_coefficient
    if delta > 0:
        q = math.sqrt(delta)
        c, s = math.cos(q * d), math.sin(q * d)
        return np.array([[c, s / q], [-q * s, c]])
    kappa = math.sqrt(-delta)
    c, s = math.cosh(kappa * d), math.sinh(kappa * d)
    return np.array([[c, s / kappa], [kappa * s, c]])


def characteristic_matrix(structure: PotentialStructure, E: float) -> Tuple[np.ndarray, float]:
    """
    Product of layer matrices, left face to right face, returned as (M_hat, log_scale)
    with M = exp(log_scale) * M_hat. Rescaling after every layer keeps thick
    evanescent stacks finite.
    """
    matrix = np.eye(2)
    log_scale = 0.0
    for layer in structure.layers:
        matrix = layer_matrix(E, layer.height_neV, layer.thickness_um) @ matrix
        scale = float(np.max(np.abs(matrix)))
        if scale > 0 and scale != 1.0:
            matrix = matrix / scale
            log_scale += math.log(scale)
    return matrix, log_scale


def transfer_matrix(structure: PotentialStructure, E: float) -> ScatteringAmplitudes:
    if not E > 0:
        raise ValidationError(f"Energy must be positive, got {E} neV")
    E, nudged = nudge_energy(structure, E)
    k = _wavenumber(E, 0.0).real
    right_height = structure.terminal_height_neV if structure.semi_infinite else 0.0
    k_right = _wavenumber(E, right_height)

    m, log_scale = characteristic_matrix(structure, E)
    a_term = 1j * k_right * m[0, 0] - m[1, 0]
    b_term = 1j * k * m[1, 1] + k * k_right * m[0, 1]
    denominator = a_term + b_term
    if denominator == 0:
        raise NumericalFailure(f"Singular transfer matrix at E={E} neV")

    r_amp = (b_term - a_term) / denominator
    thickness = structure.total_thickness
    t_amp = 2j * k * np.exp(-1j * k_right.real * thickness - log_scale) / denominator
    return ScatteringAmplitudes(E=E, t_amp=complex(t_amp), r_amp=complex(r_amp),
                                k_left=k, k_right=k_right, nudged=nudged)


# --- Group delay ---

def _phase_slope(structure: PotentialStructure, E: float, h: float, branch: str) -> Tuple[float, float]:
    """Central difference of the phase; returns (dphi/dE, |dphi|)."""
    upper = transfer_matrix(structure, E + h).amplitude(branch)
    lower = transfer_matrix(structure, E - h).amplitude(branch)
    if upper == 0 or lower == 0:
        raise NumericalFailure(f"{branch} amplitude vanishes near E={E} neV; phase undefined")
    dphi = float(np.angle(upper / lower))
    return dphi / (2.0 * h), abs(dphi)


def _resolved_slope(structure: PotentialStructure, E: float, h: float, floor: float, branch: str) -> Tuple[float, float]:
    """Shrinks h until the phase change across the stencil is well below pi."""
    for _ in range(64):
        slope, jump = _phase_slope(structure, E, h, branch)
        if jump < 0.5 * math.pi or h <= floor:
            return slope, h
        h *= 0.5
    return slope, h


def gdt(structure: PotentialStructure, E: float, branch: str = BRANCH_TRANSMISSION) -> float:
    """
    tau = hbar dphi/dE in ns. Richardson-extrapolated central difference with
    step min(1e-4 E, Gamma/50), Gamma estimated as 2 hbar / |tau| from a first pass.
    The step is the smaller of the two: a narrow line needs a step well inside its width.
    """
    _check_branch(branch)
    if not E > 0:
        raise ValidationError(f"Energy must be positive, got {E} neV")
    hbar = NEUTRON.hbar_nev_ns
    floor = GDT_MIN_STEP * E
    h = GDT_BASE_STEP * E

    threshold_distance = min((abs(E - height) for height in structure.heights), default=math.inf)
    if threshold_distance < 4.0 * h:
        safe_log(f"Stationary: E={E:.6g} neV is {threshold_distance:.3g} neV from a layer threshold", "WARNING")
        h = max(threshold_distance / 4.0, floor)

    slope, h = _resolved_slope(structure, E, h, floor, branch)
    if slope != 0:
        width_estimate = 2.0 / abs(slope)
        h = max(min(h, width_estimate / GDT_WIDTH_FRACTION), floor)
        slope, h = _resolved_slope(structure, E, h, floor, branch)
    half_slope, _ = _phase_slope(structure, E, 0.5 * h, branch)
    return hbar * (4.0 * half_slope - slope) / 3.0


def gdt_step_analytic(E: float, U: float) -> float:
    """Delay at total reflection from a semi-infinite step: hbar / sqrt(E (U - E)), ns."""
    if not 0 < E < U:
        raise ValidationError(f"Closed-form step delay needs 0 < E < U, got E={E}, U={U}")
    return NEUTRON.hbar_nev_ns / math.sqrt(E * (U - E))


@dataclass
class GdtCurve:
    energies: np.ndarray
    tau: np.ndarray
    branch: str
    transmission: np.ndarray
    reflection: np.ndarray
    phase: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def rows(self) -> List[Tuple[float, float, float, float]]:
        return [(float(E), float(T), float(R), float(tau))
                for E, T, R, tau in zip(self.energies, self.transmission, self.reflection, self.tau)]


def gdt_curve(structure: PotentialStructure, energies: Sequence[float],
              branch: str = BRANCH_TRANSMISSION) -> GdtCurve:
    """T, R, unwrapped phase and GDT over an energy grid."""
    _check_branch(branch)
    energies = np.asarray(energies, dtype=float)
    amplitudes = [transfer_matrix(structure, float(E)) for E in energies]
    taus = []
    for E in energies:
        try:
            taus.append(gdt(structure, float(E), branch))
        except NumericalFailure as exc:
            safe_log(f"Stationary: GDT undefined at E={E:.6g} neV: {exc}", "WARNING")
            taus.append(math.nan)
    return GdtCurve(
        energies=energies,
        tau=np.asarray(taus),
        branch=branch,
        transmission=np.array([a.transmission for a in amplitudes]),
        reflection=np.array([a.reflection for a in amplitudes]),
        phase=np.unwrap(np.angle([a.amplitude(branch) for a in amplitudes])),
    )


def transmission_coefficient(structure: PotentialStructure, E: float) -> float:
    return transfer_matrix(structure, E).transmission


# --- Refractive index & quasibound levels ---

def refractive_index(E: float, U: float) -> float:
    if not E > 0:
        raise ValidationError(f"Energy must be positive, got {E} neV")
    if E <= U:
        raise ValidationError(f"Refractive index is imaginary for E={E} <= U={U} neV")
    return math.sqrt(1.0 - U / E)


def quasibound_energies(d: float, n_max: int, U_well: float = 0.0) -> List[float]:
    """Levels from k d = n pi with k the well-interior wavenumber; d in um."""
    if not d > 0:
        raise ValidationError(f"Well width must be positive, got {d}")
    if n_max < 1:
        raise ValidationError(f"n_max must be at least 1, got {n_max}")
    return [U_well + NEUTRON.kinetic_coefficient * (n * math.pi / d) ** 2 for n in range(1, n_max + 1)]


# --- Resonances & bands ---

@dataclass(frozen=True)
class Resonance:
    energy: float
    peak_transmission: float
    fwhm: float


def find_resonance(structure: PotentialStructure, E_lo: float, E_hi: float, n_scan: int = 2001) -> Resonance:
    """Highest transmission line in [E_lo, E_hi] with its full width at half maximum."""
    if not 0 < E_lo < E_hi:
        raise ValidationError(f"Need 0 < E_lo < E_hi, got [{E_lo}, {E_hi}]")
    energies = np.linspace(E_lo, E_hi, n_scan)
    values = np.array([transmission_coefficient(structure, float(E)) for E in energies])
    i = int(np.argmax(values))
    lo, hi = energies[max(i - 1, 0)], energies[min(i + 1, n_scan - 1)]
    best = optimize.minimize_scalar(lambda E: -transmission_coefficient(structure, E), bounds=(lo, hi),
                                    method="bounded", options={"xatol": 1e-9 * energies[i]})
    E_peak = float(best.x) if -best.fun >= values[i] else float(energies[i])
    T_peak = transmission_coefficient(structure, E_peak)
    half = 0.5 * T_peak

    def edge(indices) -> Optional[float]:
        previous = E_peak
        for j in indices:
            if values[j] < half:
                return float(optimize.brentq(lambda E: transmission_coefficient(structure, E) - half,
                                             min(previous, energies[j]), max(previous, energies[j])))
            previous = energies[j]
        return None

    left = edge(range(i, -1, -1))
    right = edge(range(i, n_scan))
    fwhm = (right - left) if left is not None and right is not None else math.nan
    safe_log(f"Stationary: resonance at {E_peak:.6g} neV, T={T_peak:.4f}, FWHM={fwhm:.4g} neV", "DEBUG")
    return Resonance(energy=E_peak, peak_transmission=T_peak, fwhm=fwhm)


def _crossing(E0: float, T0: float, E1: float, T1: float, level: float) -> float:
    if T1 == T0:
        return 0.5 * (E0 + E1)
    return E0 + (level - T0) * (E1 - E0) / (T1 - T0)


def _runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """Inclusive index ranges of contiguous True stretches."""
    runs = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def _interval(curve: GdtCurve, start: int, end: int, level: float) -> Tuple[float, float]:
    E, T = curve.energies, curve.transmission
    lo = E[start] if start == 0 else _crossing(E[start - 1], T[start - 1], E[start], T[start], level)
    hi = E[end] if end == len(E) - 1 else _crossing(E[end], T[end], E[end + 1], T[end + 1], level)
    return float(lo), float(hi)


def transmission_gaps(curve: GdtCurve, threshold: float = 0.5) -> List[Tuple[float, float]]:
    """Energy intervals with T below threshold, edges linearly interpolated."""
    return [_interval(curve, start, end, threshold) for start, end in _runs(curve.transmission < threshold)]


def bounding_gap(curve: GdtCurve, gaps: Sequence[Tuple[float, float]]) -> Optional[Tuple[float, float]]:
    """Widest gap with transmitting energies on both sides of it, or None."""
    lo_limit, hi_limit = float(curve.energies[0]), float(curve.energies[-1])
    interior = [gap for gap in gaps if gap[0] > lo_limit and gap[1] < hi_limit]
    if not interior:
        return None
    return max(interior, key=lambda gap: gap[1] - gap[0])


def passband_window(curve: GdtCurve, threshold: float = 0.5,
                    below: Optional[float] = None) -> Optional[Tuple[int, int]]:
    """
    Index range of the widest contiguous region with T > threshold. With `below`
    (the lower edge of a band gap) only the band under that gap is considered.
    """
    mask = curve.transmission > threshold
    if below is not None:
        mask &= curve.energies < below
    runs = _runs(mask)
    if not runs:
        return None
    return max(runs, key=lambda run: curve.energies[run[1]] - curve.energies[run[0]])


# --- Closed-form shift formulas ---

@dataclass(frozen=True)
class ShiftResult:
    value: float
    warning: str = ""


def _guarded(value: float, violated: bool, message: str) -> ShiftResult:
    if violated:
        safe_log(f"Stationary: {message}", "WARNING")
        return ShiftResult(value=value, warning=message)
    return ShiftResult(value=value)


def tanaka_light(omega: float, a: float, d: float, n: float) -> ShiftResult:
    """Light frequency shift in an accelerated refractive slab, omega in rad/s, d in um."""
    ratio = a * d * 1e-6 / NEUTRON.c ** 2
    return _guarded(omega * ratio * (n - 1.0), abs(ratio) > 1e-3, f"a*d/c^2 = {ratio:.3g} is not small")


def kowalski_energy(a: float, d: float, n: float) -> ShiftResult:
    """Energy change m a d (1 - n)/n in neV for a slab of thickness d um accelerating along the beam."""
    if not n > 0:
        raise ValidationError(f"Refractive index must be positive, got {n}")
    value = NEUTRON.m * a * d * 1e-6 * (1.0 - n) / n / NEV_IN_J
    return ShiftResult(value=value)


def kowalski_velocity(a: float, d: float, n: float, v: float) -> ShiftResult:
    """The same change as a velocity, dE / (m v) in m/s."""
    if v == 0:
        raise ValidationError("Velocity must be non-zero")
    energy = kowalski_energy(a, d, n)
    return ShiftResult(value=energy.value / (NEUTRON.mass_internal * v), warning=energy.warning)


def doppler_boundary(n_prime: float, k: float, V: float) -> ShiftResult:
    """(n' - 1) k V in rad/s; k in um^-1, V in m/s."""
    v = NEUTRON.wavenumber_to_velocity(k)
    value = (n_prime - 1.0) * k * V * 1e6
    return _guarded(value, v != 0 and abs(V) > GUARD_RATIO * abs(v), f"boundary speed {V:g} m/s is not small against {v:.4g} m/s")


def accel_refractive(a: float, d: float, n: float, k: float, v: float) -> ShiftResult:
    """a d (1 - n)/n * k / v in rad/s; d in um, k in um^-1."""
    if not n > 0 or v == 0:
        raise ValidationError("Need n > 0 and v != 0")
    value = a * d * (1.0 - n) / n * k / v
    gained = a * d * 1e-6 / v
    return _guarded(value, abs(gained) > GUARD_RATIO * abs(v), f"a*t = {gained:.3g} m/s is not small against v={v:g} m/s")


def universal(k: float, a: float, dt: float) -> ShiftResult:
    """k a dt in rad/s; k in um^-1, a in m/s^2, dt in s."""
    v = NEUTRON.wavenumber_to_velocity(k)
    value = k * a * dt * 1e6
    return _guarded(value, v != 0 and abs(a * dt) > GUARD_RATIO * abs(v), f"a*dt = {a * dt:.3g} m/s is not small against v")
