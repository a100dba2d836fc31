#!/usr/bin/env python3
"""
Scenario Orchestrator - Prepare → Propagate → Analyze → Write
Runs every case of a scenario (in parallel), the optional reference runs,
stationary curves and parameter sweeps, and hands the results to the reporter.
"""

import math
import os
import threading
import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import astuple, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import streamlit as st

from core import reporter
from core.analysis import (ComponentSplit, VelocitySpectrum, a_tau_prediction, correlation,
                           predicted_transmitted_weight, shift, spectrum, split_components,
                           transmitted_velocity_change)
from core.errors import EmptyComponentError, SimulationError, ValidationError
from core.grid import make_grid
from core.models import CaseResult, RunMode, ScenarioConfig, ScenarioResult, StructureKind, SweepRow, TimeConfig
from core.parser import ScenarioParser, get_path
from core.potentials import MotionLaw, PotentialStructure, validate_structure_on_grid
from core.propagator import RunLog, StepPlan, derive_time_step, run
from core.semiclassical import trace
from core.stationary import (GdtCurve, bounding_gap, find_resonance, gdt, gdt_curve, passband_window,
                             transmission_coefficient, transmission_gaps)
from core.wavepacket import PacketSpec, WaveState, make_gaussian
from utils.helpers import create_safe_filename, safe_log

MAX_REFINEMENTS = 4
REFINE_TOLERANCE = 1e-3
ENERGY_SCAN_PATH = "packet.E0_neV"
PACKET_BAND_WIDTHS = 2.0
ACCELERATION_PATH = "motion.a_m_s2"

DEFAULT_SETTINGS: Dict[str, Any] = {
    "default_threads": None,
    "output_root": "results",
    "fft_workers": None,
}


def load_settings() -> Dict[str, Any]:
    """Runner defaults from Streamlit secrets, falling back to DEFAULT_SETTINGS."""
    settings = dict(DEFAULT_SETTINGS)
    try:
        for key in settings:
            value = st.secrets.get(key)
            if value is not None:
                settings[key] = value
    except Exception as exc:
        safe_log(f"Orchestrator: no secrets available ({type(exc).__name__}); using defaults", "DEBUG")
    return settings


def synchronized_motion(config: ScenarioConfig) -> MotionLaw:
    """
    Motion law of the scenario. With a synchronize section, V0 is chosen so the
    structure moves at the target velocity when the packet center reaches its
    left face: t* = (s0 - x0) / v0, V0 = V_target - a t*.
    """
    motion = config.motion
    if motion.synchronize is None:
        return motion.law()
    if config.packet is None:
        raise ValidationError("motion.synchronize needs a 'packet' section")
    spec = config.packet.spec()
    t_arrival = (motion.s0_um - spec.x0_um) / spec.v0
    law = MotionLaw(s0_um=motion.s0_um, a_m_s2=motion.a_m_s2, V0_m_s=0.0)
    V0 = motion.synchronize.target_velocity_m_s - law.a_internal * t_arrival
    return replace(law, V0_m_s=V0)


def reference_motion(config: ScenarioConfig, motion: MotionLaw) -> MotionLaw:
    """
    Unaccelerated twin from the same start: the synchronized target velocity, or V0.
    A uniformly moving structure is compared with the same structure at rest.
    """
    if motion.a_m_s2 == 0:
        return MotionLaw(s0_um=motion.s0_um)
    sync = config.motion.synchronize
    velocity = sync.target_velocity_m_s if sync is not None else motion.V0_m_s
    return MotionLaw(s0_um=motion.s0_um, V0_m_s=velocity, a_m_s2=0.0)


def case_configs(config: ScenarioConfig) -> List[Tuple[str, ScenarioConfig]]:
    if not config.cases:
        return [("base", config)]
    return [(case.label, replace(ScenarioParser.with_overrides(config, case.overrides), cases=[], sweep=None))
            for case in config.cases]


class ScenarioOrchestrator:
    def __init__(self, settings: Optional[Dict[str, Any]] = None):
        self.settings = settings or load_settings()
        self._references: Dict[Tuple, Future] = {}
        self._reference_lock = threading.Lock()

    def _threads(self, threads: Optional[int]) -> int:
        return max(1, int(threads or self.settings.get("default_threads") or os.cpu_count() or 1))

    # --- Single dynamic run ---

    def run_case(self, config: ScenarioConfig, label: str = "base") -> CaseResult:
        result = CaseResult(label=label, success=False)
        try:
            self._run_case(config, result)
            result.success = True
        except SimulationError as exc:
            result.error_type = exc.error_type
            result.error = str(exc)
            result.exit_code = exc.exit_code
            safe_log(f"Orchestrator: case '{label}' failed ({exc.error_type}): {exc}", "ERROR")
        return result

    def _run_case(self, config: ScenarioConfig, result: CaseResult):
        if config.packet is None or config.grid is None or config.time is None:
            raise ValidationError("Dynamic runs need 'packet', 'grid' and 'time' sections")
        structure = config.structure.build()
        motion = synchronized_motion(config)
        spec = config.packet.spec()
        grid = make_grid(config.grid.x_min_um, config.grid.x_max_um, config.grid.n_points)
        validate_structure_on_grid(structure, motion, grid)
        self._check_start(spec, structure, motion, config.time)
        branch = config.analysis.branch

        initial = make_gaussian(spec, grid)
        initial_spectrum = spectrum(initial, label="initial")
        theta = config.time.theta_us or derive_time_step(spec, structure)
        safe_log(f"Orchestrator: case '{result.label}' start, theta={theta:.4g} us, motion {motion.to_dict()}")

        final, log, split = self._propagate(initial, structure, motion, config.time, theta, spec)
        if config.time.refine:
            final, log, split = self._refine(initial, structure, motion, config.time, spec, branch,
                                             (final, log, split), result.warnings)
        result.warnings.extend(split.warnings)
        if log.partial:
            result.partial = True
            result.warnings.append(f"time cap {config.time.t_max_us:g} us reached before the components separated")

        component = split.component(branch)
        if component is None:
            raise EmptyComponentError(f"The {branch} component of case '{result.label}' is empty")
        result.spectra = {"initial": initial_spectrum}
        if split.transmitted is not None:
            result.spectra["transmitted"] = split.transmitted
        if split.reflected is not None:
            result.spectra["reflected"] = split.reflected

        summary: Dict[str, Any] = {
            "motion": motion.to_dict(),
            "branch": branch,
            "theta_us": log.theta_us,
            "steps": log.steps,
            "stop_reason": log.stop_reason,
            "norm_drift": log.norm_drift,
            "t_final_us": final.t_us,
            "transmitted_weight": split.transmitted_weight,
            "reflected_weight": split.reflected_weight,
        }
        summary.update(component.to_dict())
        summary["shift_vs_initial"] = shift(component, initial_spectrum).to_dict()
        summary["shift_vs_ref"] = self._reference_shift(config, structure, motion, spec, initial, log.theta_us,
                                                         branch, component, result)
        if split.transmitted is not None:
            summary["dv"] = transmitted_velocity_change(split.transmitted, initial_spectrum)
        if motion.is_static:
            summary["predicted_transmitted_weight"] = predicted_transmitted_weight(initial, structure)
        if config.analysis.a_tau:
            self._add_delay(summary, structure, spec.E0_neV, motion.a_m_s2, branch, result.warnings)
        if config.analysis.semiclassical:
            self._add_trace(summary, structure, motion, spec, result.warnings)

        result.summary = summary
        result.run_log = log.to_dict()
        safe_log(f"Orchestrator: case '{result.label}' done, {branch} peak {component.peak_v:.6f} m/s, "
                 f"shift {summary['shift_vs_initial']['d_peak_v']:+.3e} m/s")

    @staticmethod
    def _check_start(spec: PacketSpec, structure: PotentialStructure, motion: MotionLaw, time_config: TimeConfig):
        clearance = time_config.stop_separation_multiple * spec.delta_x
        left_face = motion.offset(0.0)
        right_face = left_face + structure.total_thickness
        if left_face - clearance < spec.x0_um < right_face + clearance:
            raise ValidationError(
                f"Packet at x0={spec.x0_um} um starts within {clearance:.4g} um of the structure "
                f"[{left_face:.4g}, {right_face:.4g}] um")

    def _propagate(self, initial: WaveState, structure: PotentialStructure, motion: MotionLaw,
                   time_config: TimeConfig, theta: float, spec: PacketSpec) -> Tuple[WaveState, RunLog, ComponentSplit]:
        plan = StepPlan(
            theta_us=theta,
            t_max_us=time_config.t_max_us,
            packet_width_um=spec.delta_x,
            stop_separation_multiple=time_config.stop_separation_multiple,
            edge_margin_multiple=time_config.edge_margin_multiple,
            workers=self.settings.get("fft_workers"),
        )
        final, log = run(initial, structure, motion, plan)
        return final, log, split_components(final, structure, motion)

    def _refine(self, initial, structure, motion, time_config, spec, branch, current, warnings: List[str]):
        """Halves theta until the component's peak and weight move by less than REFINE_TOLERANCE."""
        final, log, split = current
        for _ in range(MAX_REFINEMENTS):
            previous = split.component(branch)
            final, log, split = self._propagate(initial, structure, motion, time_config, 0.5 * log.theta_us, spec)
            latest = split.component(branch)
            if previous is None or latest is None:
                continue
            if abs(latest.peak_v - previous.peak_v) <= REFINE_TOLERANCE * abs(previous.peak_v) and \
                    abs(latest.weight - previous.weight) <= REFINE_TOLERANCE * previous.weight:
                safe_log(f"Orchestrator: converged at theta={log.theta_us:.4g} us")
                return final, log, split
        message = f"theta refinement did not converge within {MAX_REFINEMENTS} halvings"
        safe_log(f"Orchestrator: {message}", "WARNING")
        warnings.append(message)
        return final, log, split

    def _reference_shift(self, config, structure, motion, spec, initial, theta, branch, component,
                         result: CaseResult) -> Optional[Dict[str, float]]:
        if not config.analysis.reference_run:
            return None
        if motion.is_static:
            return shift(component, component).to_dict()
        reference, partial = self._reference_component(initial, structure, reference_motion(config, motion),
                                                       config.time, theta, spec, branch)
        if reference is None:
            result.warnings.append(f"reference run left the {branch} component empty")
            return None
        if partial:
            result.partial = True
            result.warnings.append("reference run stopped at the time cap")
        reference = replace(reference, label="reference")
        result.spectra["reference"] = reference
        return shift(component, reference).to_dict()

    def _reference_component(self, initial: WaveState, structure: PotentialStructure, motion: MotionLaw,
                             time_config: TimeConfig, theta: float, spec: PacketSpec,
                             branch: str) -> Tuple[Optional[VelocitySpectrum], bool]:
        """Reference runs shared by every case and sweep point with the same inputs."""
        grid = initial.grid
        key = (structure, motion, spec, grid.x_min, grid.x_max, grid.n_points, theta, astuple(time_config), branch)
        with self._reference_lock:
            pending = self._references.get(key)
            owner = pending is None
            if owner:
                pending = Future()
                self._references[key] = pending
        if owner:
            try:
                _, log, split = self._propagate(initial, structure, motion, time_config, theta, spec)
                pending.set_result((split.component(branch), log.partial))
            except SimulationError as exc:
                pending.set_exception(exc)
        else:
            safe_log("Orchestrator: reusing reference run", "DEBUG")
        return pending.result()

    @staticmethod
    def _add_delay(summary: Dict[str, Any], structure: PotentialStructure, E0: float, a: float, branch: str,
                   warnings: List[str]):
        try:
            summary["tau_ns"] = gdt(structure, E0, branch)
            summary["a_tau"] = a_tau_prediction(structure, E0, a, branch)
        except SimulationError as exc:
            warnings.append(f"group delay undefined at E0={E0:g} neV: {exc}")

    @staticmethod
    def _add_trace(summary: Dict[str, Any], structure: PotentialStructure, motion: MotionLaw, spec: PacketSpec,
                   warnings: List[str]):
        try:
            path = trace(spec.E0_neV, structure, motion, spec.x0_um, direction=spec.direction)
        except SimulationError as exc:
            warnings.append(f"semiclassical trace failed: {exc}")
            return
        summary["dv_semiclassical"] = path.velocity_change
        summary["semiclassical_outcome"] = path.outcome

    # --- Stationary ---

    def run_stationary(self, config: ScenarioConfig, branch: Optional[str] = None) -> GdtCurve:
        if config.stationary is None:
            raise ValidationError("Stationary curves need a 'stationary' section")
        section = config.stationary
        energies = np.linspace(section.E_min_neV, section.E_max_neV, section.n_points)
        safe_log(f"Orchestrator: stationary curve over {section.E_min_neV:g}-{section.E_max_neV:g} neV "
                 f"({section.n_points} points)")
        return gdt_curve(config.structure.build(), energies, branch or section.branch)

    @staticmethod
    def stationary_summary(config: ScenarioConfig, curve: GdtCurve) -> Dict[str, Any]:
        peak = int(np.argmax(curve.transmission))
        gaps = transmission_gaps(curve)
        summary: Dict[str, Any] = {
            "branch": curve.branch,
            "peak_energy_neV": float(curve.energies[peak]),
            "peak_transmission": float(curve.transmission[peak]),
            "gaps_neV": [list(gap) for gap in gaps],
        }
        band_gap = bounding_gap(curve, gaps)
        window = passband_window(curve, below=band_gap[0] if band_gap else None)
        if window is not None:
            taus = curve.tau[window[0]:window[1] + 1]
            summary["passband_neV"] = [float(curve.energies[window[0]]), float(curve.energies[window[1]])]
            summary["passband_tau_ns"] = [float(np.nanmin(taus)), float(np.nanmax(taus))]
            summary["passband_tau_median_ns"] = float(np.nanmedian(taus))
            if band_gap is not None:
                summary["passband_gap_neV"] = list(band_gap)
        if config.packet is not None:
            summary.update(_packet_band(config, curve))
        if config.structure.kind == StructureKind.NIF:
            try:
                line = find_resonance(config.structure.build(), float(curve.energies[0]), float(curve.energies[-1]))
                summary["resonance"] = {"energy_neV": line.energy, "peak_transmission": line.peak_transmission,
                                        "fwhm_neV": line.fwhm}
            except SimulationError as exc:
                safe_log(f"Orchestrator: resonance search failed: {exc}", "WARNING")
        return summary

    # --- Sweeps ---

    def sweep(self, config: ScenarioConfig, vary: Optional[str] = None, values: Optional[List[float]] = None,
              threads: Optional[int] = None) -> List[SweepRow]:
        """One independent run per value; failures are recorded in the row and the sweep continues."""
        if vary is None:
            if config.sweep is None:
                raise ValidationError("No sweep section and no --vary path given")
            vary, values = config.sweep.vary, config.sweep.values
        get_path(config.to_dict(), vary)
        values = [float(value) for value in (values or [])]
        base = replace(config, cases=[], sweep=None)
        safe_log(f"Orchestrator: sweeping {vary} over {len(values)} values")
        with ThreadPoolExecutor(max_workers=self._threads(threads)) as executor:
            return list(executor.map(lambda value: self._sweep_point(base, vary, value), values))

    def _sweep_point(self, config: ScenarioConfig, vary: str, value: float) -> SweepRow:
        row = SweepRow(value=value)
        try:
            point = ScenarioParser.with_overrides(config, {vary: value})
        except ValidationError as exc:
            row.error = str(exc)
            return row
        case = self.run_case(point, label=f"{vary}={value:g}")
        if case.success:
            summary = case.summary
            moved = summary.get("shift_vs_ref") or summary["shift_vs_initial"]
            row.d_peak_v = moved["d_peak_v"]
            row.dv_semiclassical = summary.get("dv_semiclassical")
            row.a_tau = summary.get("a_tau")
            row.outcome = summary.get("semiclassical_outcome", "")
            row.dv = summary.get("dv")
        else:
            row.error = f"{case.error_type}: {case.error}"
        if vary == ENERGY_SCAN_PATH:
            structure = point.structure.build()
            row.transmission = transmission_coefficient(structure, value)
            try:
                row.tau_ns = gdt(structure, value, point.analysis.branch)
            except SimulationError as exc:
                safe_log(f"Orchestrator: no group delay at {value:g} neV: {exc}", "WARNING")
        return row

    # --- Semiclassical table ---

    def run_semiclassical(self, config: ScenarioConfig) -> List[Tuple[float, float, str]]:
        """(a, dv, outcome) for the sweep accelerations, the case accelerations, or the base motion."""
        if config.packet is None:
            raise ValidationError("Semiclassical traces need a 'packet' section")
        if config.sweep is not None and config.sweep.vary == ACCELERATION_PATH:
            points = [ScenarioParser.with_overrides(config, {ACCELERATION_PATH: a}) for a in config.sweep.values]
        else:
            points = [point for _, point in case_configs(config)]
        rows = []
        for point in points:
            motion = synchronized_motion(point)
            spec = point.packet.spec()
            try:
                path = trace(spec.E0_neV, point.structure.build(), motion, spec.x0_um, direction=spec.direction)
                rows.append((motion.a_m_s2, path.velocity_change, path.outcome))
            except SimulationError as exc:
                safe_log(f"Orchestrator: trace failed at a={motion.a_m_s2:g}: {exc}", "WARNING")
                rows.append((motion.a_m_s2, math.nan, "failed"))
        return rows

    # --- Whole scenario ---

    def run_scenario(self, config: ScenarioConfig, out_dir: Optional[str] = None, threads: Optional[int] = None,
                     on_progress: Optional[Callable[[int, int, str], None]] = None) -> ScenarioResult:
        start_time = time.time()
        directory = Path(out_dir or config.outputs.directory) / create_safe_filename(config.name)
        result = ScenarioResult(success=False, name=config.name)
        summary: Dict[str, Any] = {"name": config.name, "description": config.description,
                                   "version": config.version, "mode": config.mode.value}
        try:
            directory.mkdir(parents=True, exist_ok=True)
            if config.mode == RunMode.STATIONARY:
                self._stationary_artifacts(config, directory, summary, result)
            else:
                self._dynamic_artifacts(config, directory, threads, summary, result, on_progress)
        except SimulationError as exc:
            result.error_type = exc.error_type
            result.error = str(exc)
            result.exit_code = exc.exit_code
            safe_log(f"Orchestrator: scenario '{config.name}' failed: {exc}", "ERROR")
            return result

        failed = [case for case in result.cases if not case.success]
        if failed:
            result.exit_code = failed[0].exit_code
            result.error_type = failed[0].error_type
            result.error = f"{len(failed)} of {len(result.cases)} cases failed; first: {failed[0].error}"
        summary["partial"] = result.partial
        result.summary = summary
        if config.output_enabled("summary"):
            result.artifacts.append(reporter.write_json(directory / "summary.json", summary))
        result.success = not failed
        result.processing_time = time.time() - start_time
        if result.partial:
            safe_log(f"Orchestrator: scenario '{config.name}' finished with partial results", "WARNING")
        safe_log(f"Orchestrator: scenario '{config.name}' wrote {len(result.artifacts)} artifacts "
                 f"to {directory} in {result.processing_time:.1f} s")
        return result

    def _stationary_artifacts(self, config: ScenarioConfig, directory: Path, summary: Dict[str, Any],
                              result: ScenarioResult):
        curve = self.run_stationary(config)
        result.artifacts.append(reporter.write_curve_csv(directory / f"curve_{curve.branch}.csv", curve))
        summary["stationary"] = self.stationary_summary(config, curve)

    def _dynamic_artifacts(self, config: ScenarioConfig, directory: Path, threads: Optional[int],
                           summary: Dict[str, Any], result: ScenarioResult, on_progress):
        runs = [] if (config.sweep is not None and not config.cases) else case_configs(config)
        with ThreadPoolExecutor(max_workers=self._threads(threads)) as executor:
            futures = [(label, executor.submit(self.run_case, point, label)) for label, point in runs]
            for done, (label, future) in enumerate(futures, start=1):
                result.cases.append(future.result())
                if on_progress:
                    on_progress(done, len(futures), label)
        summary["cases"] = [case.to_dict() for case in result.cases]
        shared_initial = None
        for case in result.cases:
            shared_initial = self._write_case(config, directory, case, result, shared_initial)

        if config.stationary is not None:
            self._stationary_artifacts(config, directory, summary, result)
        if config.sweep is not None:
            rows = self.sweep(config, threads=threads)
            energy_scan = config.sweep.vary == ENERGY_SCAN_PATH
            result.artifacts.append(reporter.write_sweep_csv(directory / "sweep.csv", config.sweep.vary, rows,
                                                             energy_scan=energy_scan))
            summary["sweep"] = self._sweep_summary(config.sweep.vary, rows, energy_scan)

    def _write_case(self, config: ScenarioConfig, directory: Path, case: CaseResult, result: ScenarioResult,
                    shared_initial: Optional[VelocitySpectrum]) -> Optional[VelocitySpectrum]:
        """
        Writes the spectra and run log of one case. spectrum_initial.csv is rewritten by
        the first successful case; a case whose packet differs gets its own initial file.
        """
        if not case.success:
            return shared_initial
        stem = create_safe_filename(case.label)
        if config.output_enabled("spectra"):
            for name, values in case.spectra.items():
                if name != "initial":
                    path = directory / f"spectrum_{stem}_{name}.csv"
                elif shared_initial is None:
                    shared_initial = values
                    path = directory / "spectrum_initial.csv"
                elif _same_spectrum(values, shared_initial):
                    continue
                else:
                    path = directory / f"spectrum_{stem}_initial.csv"
                result.artifacts.append(reporter.write_spectrum_csv(path, values))
        if config.output_enabled("runlog") and case.run_log is not None:
            result.artifacts.append(reporter.write_json(directory / f"runlog_{stem}.json", case.run_log))
        return shared_initial

    @staticmethod
    def _sweep_summary(vary: str, rows: List[SweepRow], energy_scan: bool) -> Dict[str, Any]:
        summary: Dict[str, Any] = {"vary": vary, "points": len(rows),
                                   "failed": sum(1 for row in rows if row.error)}
        if energy_scan:
            dv = [math.nan if row.dv is None else row.dv for row in rows]
            predicted = [math.nan if row.a_tau is None else row.a_tau for row in rows]
            try:
                summary["correlation_dv_a_tau"] = correlation(dv, predicted)
            except ValidationError as exc:
                safe_log(f"Orchestrator: no correlation for the scan: {exc}", "WARNING")
        return summary


def _packet_band(config: ScenarioConfig, curve: GdtCurve) -> Dict[str, Any]:
    """Group delay at E0 and its range over E0 +- PACKET_BAND_WIDTHS energy spreads."""
    spec = config.packet.spec()
    lo = spec.E0_neV - PACKET_BAND_WIDTHS * spec.delta_E
    hi = spec.E0_neV + PACKET_BAND_WIDTHS * spec.delta_E
    band: Dict[str, Any] = {}
    try:
        band["tau_at_E0_ns"] = gdt(config.structure.build(), spec.E0_neV, curve.branch)
    except SimulationError as exc:
        safe_log(f"Orchestrator: no group delay at the packet energy: {exc}", "WARNING")
    inside = (curve.energies >= lo) & (curve.energies <= hi)
    if inside.any():
        band["packet_band_neV"] = [float(lo), float(hi)]
        band["packet_tau_ns"] = [float(np.nanmin(curve.tau[inside])), float(np.nanmax(curve.tau[inside]))]
    return band


def _same_spectrum(first: VelocitySpectrum, second: VelocitySpectrum) -> bool:
    return np.array_equal(first.v, second.v) and np.array_equal(first.density, second.density)


def run_scenario(config: ScenarioConfig, out_dir: Optional[str] = None, threads: Optional[int] = None) -> ScenarioResult:
    orchestrator = ScenarioOrchestrator()
    return orchestrator.run_scenario(config, out_dir=out_dir, threads=threads)
